#include "symdiss/systems.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace symdiss {

namespace {

void check_box(const Box& box, const char* name) {
  for (const auto& iv : box) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi))
      throw std::invalid_argument(std::string(name) + ": non-finite interval");
    if (iv.lo > iv.hi)
      throw std::invalid_argument(std::string(name) + ": interval lower bound above upper");
  }
}

void check_zero_in_box(const Box& box, const char* name) {
  for (const auto& iv : box)
    if (iv.lo > 0.0 || iv.hi < 0.0)
      throw std::invalid_argument(std::string(name) + ": must contain the zero input");
}

}  // namespace

ContinuousSystem ContinuousSystem::lti(const Matrix& a, const Matrix& b, const Matrix& c,
                                       const Matrix& d, MeasurementMode mode, Box domain,
                                       Box input_set, std::optional<double> k1,
                                       std::optional<double> k2) {
  const int n = a.rows();
  const int m = b.cols();
  const int p = c.rows();
  if (a.cols() != n) throw std::invalid_argument("lti: A must be square");
  if (b.rows() != n) throw std::invalid_argument("lti: B row count must match A");
  if (c.cols() != n) throw std::invalid_argument("lti: C column count must match A");
  if (d.rows() != p || d.cols() != m)
    throw std::invalid_argument("lti: D must be output_dim x input_dim");
  if (!a.is_finite() || !b.is_finite() || !c.is_finite() || !d.is_finite())
    throw std::invalid_argument("lti: non-finite matrix entry");
  if (static_cast<int>(domain.size()) != n)
    throw std::invalid_argument("lti: domain dimension must match state dimension");
  if (static_cast<int>(input_set.size()) != m)
    throw std::invalid_argument("lti: input_set dimension must match input dimension");
  check_box(domain, "domain");
  check_box(input_set, "input_set");
  check_zero_in_box(input_set, "input_set");

  ContinuousSystem sys;
  sys.n_ = n;
  sys.m_ = m;
  sys.p_ = p;
  sys.mode_ = mode;
  sys.domain_ = std::move(domain);
  sys.input_set_ = std::move(input_set);
  sys.lti_ = true;
  sys.a_ = a;
  sys.b_ = b;
  sys.c_ = c;
  sys.d_ = d;
  sys.k1_ = k1.value_or(induced_inf_norm(c));
  sys.k2_ = k2.value_or(induced_inf_norm(d));
  sys.f_ = [a, b](const Vec& x, const Vec& u) {
    Vec r = a * x;
    const Vec bu = b * u;
    for (size_t i = 0; i < r.size(); ++i) r[i] += bu[i];
    return r;
  };
  sys.h_ = [c, d](const Vec& x, const Vec& u) {
    Vec r = c * x;
    const Vec du = d * u;
    for (size_t i = 0; i < r.size(); ++i) r[i] += du[i];
    return r;
  };
  return sys;
}

ContinuousSystem ContinuousSystem::generic(int state_dim, int input_dim, int output_dim,
                                           VectorField f, OutputMap h, MeasurementMode mode,
                                           Box domain, Box input_set, double k1, double k2) {
  if (state_dim <= 0 || input_dim <= 0 || output_dim <= 0)
    throw std::invalid_argument("generic: dimensions must be positive");
  if (!f || !h) throw std::invalid_argument("generic: dynamics and output map required");
  if (static_cast<int>(domain.size()) != state_dim)
    throw std::invalid_argument("generic: domain dimension must match state dimension");
  if (static_cast<int>(input_set.size()) != input_dim)
    throw std::invalid_argument("generic: input_set dimension must match input dimension");
  if (!(k1 >= 0.0) || !(k2 >= 0.0))
    throw std::invalid_argument("generic: output Lipschitz bounds must be nonnegative");
  check_box(domain, "domain");
  check_box(input_set, "input_set");
  check_zero_in_box(input_set, "input_set");

  ContinuousSystem sys;
  sys.n_ = state_dim;
  sys.m_ = input_dim;
  sys.p_ = output_dim;
  sys.mode_ = mode;
  sys.domain_ = std::move(domain);
  sys.input_set_ = std::move(input_set);
  sys.k1_ = k1;
  sys.k2_ = k2;
  sys.f_ = std::move(f);
  sys.h_ = std::move(h);
  return sys;
}

Vec ContinuousSystem::dynamics(const Vec& x, const Vec& u) const {
  if (static_cast<int>(x.size()) != n_ || static_cast<int>(u.size()) != m_)
    throw std::invalid_argument("dynamics: dimension mismatch");
  Vec r = f_(x, u);
  if (static_cast<int>(r.size()) != n_)
    throw std::runtime_error("dynamics: vector field returned wrong dimension");
  return r;
}

Vec ContinuousSystem::output(const Vec& x, const Vec& u) const {
  if (static_cast<int>(x.size()) != n_ || static_cast<int>(u.size()) != m_)
    throw std::invalid_argument("output: dimension mismatch");
  Vec r = h_(x, u);
  if (static_cast<int>(r.size()) != p_)
    throw std::runtime_error("output: output map returned wrong dimension");
  return r;
}

const Matrix& ContinuousSystem::a() const {
  if (!lti_) throw std::runtime_error("system is not LTI");
  return a_;
}
const Matrix& ContinuousSystem::b() const {
  if (!lti_) throw std::runtime_error("system is not LTI");
  return b_;
}
const Matrix& ContinuousSystem::c() const {
  if (!lti_) throw std::runtime_error("system is not LTI");
  return c_;
}
const Matrix& ContinuousSystem::d() const {
  if (!lti_) throw std::runtime_error("system is not LTI");
  return d_;
}

IfcBounds lti_ifc_bounds(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols()) throw std::invalid_argument("lti_ifc_bounds: A must be square");
  if (b.rows() != a.rows()) throw std::invalid_argument("lti_ifc_bounds: B row count mismatch");
  IfcBounds bounds;
  bounds.alpha1 = [a](double r, double t) {
    if (r < 0.0 || t < 0.0) throw std::invalid_argument("alpha1: negative argument");
    return induced_inf_norm(matrix_exponential(a, t)) * r;
  };
  bounds.alpha2 = [a, b](double r, double t) {
    if (r < 0.0 || t < 0.0) throw std::invalid_argument("alpha2: negative argument");
    if (t == 0.0) return 0.0;
    /* composite Simpson over 64 panels */
    const int panels = 64;
    const double w = t / panels;
    auto g = [&](double s) { return induced_inf_norm(matrix_exponential(a, s) * b); };
    double sum = 0.0;
    for (int i = 0; i < panels; ++i) {
      const double l = i * w;
      sum += (w / 6.0) * (g(l) + 4.0 * g(l + 0.5 * w) + g(l + w));
    }
    return sum * r;
  };
  return bounds;
}

Vec integrate(const ContinuousSystem& sys, const Vec& x0, const Vec& u, double t, double h) {
  if (static_cast<int>(x0.size()) != sys.state_dim())
    throw std::invalid_argument("integrate: x0 dimension mismatch");
  if (static_cast<int>(u.size()) != sys.input_dim())
    throw std::invalid_argument("integrate: u dimension mismatch");
  for (double v : x0)
    if (!std::isfinite(v)) throw std::invalid_argument("integrate: non-finite x0");
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("integrate: t must be >= 0");
  if (t == 0.0) return x0;
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("integrate: h must be > 0");

  Vec x = x0;
  const int n = sys.state_dim();
  auto step = [&](double dt) {
    const Vec k1 = sys.dynamics(x, u);
    Vec tmp(n);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    const Vec k2 = sys.dynamics(tmp, u);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    const Vec k3 = sys.dynamics(tmp, u);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
    const Vec k4 = sys.dynamics(tmp, u);
    for (int i = 0; i < n; ++i)
      x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  };

  const int nsteps = static_cast<int>(std::floor(t / h + 1e-9));
  double elapsed = 0.0;
  for (int s = 0; s < nsteps; ++s) {
    step(h);
    elapsed += h;
    for (double v : x)
      if (!std::isfinite(v) || std::abs(v) > 1e12)
        throw std::runtime_error("integrate: trajectory diverged near t=" +
                                 std::to_string(elapsed));
  }
  const double rem = t - nsteps * h;
  if (rem > 1e-12) {
    step(rem);
    for (double v : x)
      if (!std::isfinite(v) || std::abs(v) > 1e12)
        throw std::runtime_error("integrate: trajectory diverged near t=" + std::to_string(t));
  }
  return x;
}

namespace {

using CVec = std::vector<std::complex<double>>;

/* partial-pivot Gaussian elimination on (jw I - A) x = b_col */
std::vector<CVec> resolvent_times_b(const Matrix& a, const Matrix& b, double omega) {
  const int n = a.rows();
  const int m = b.cols();
  std::vector<CVec> lhs(n, CVec(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      lhs[i][j] = std::complex<double>(-a(i, j), i == j ? omega : 0.0);
  std::vector<CVec> rhs(n, CVec(m));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) rhs[i][j] = b(i, j);

  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(lhs[r][col]) > std::abs(lhs[piv][col])) piv = r;
    if (std::abs(lhs[piv][col]) < 1e-300)
      throw std::runtime_error("l2_gain: resolvent is singular on the sweep");
    std::swap(lhs[col], lhs[piv]);
    std::swap(rhs[col], rhs[piv]);
    const std::complex<double> d = lhs[col][col];
    for (int j = col; j < n; ++j) lhs[col][j] /= d;
    for (int j = 0; j < m; ++j) rhs[col][j] /= d;
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const std::complex<double> f = lhs[r][col];
      if (f == std::complex<double>(0.0, 0.0)) continue;
      for (int j = col; j < n; ++j) lhs[r][j] -= f * lhs[col][j];
      for (int j = 0; j < m; ++j) rhs[r][j] -= f * rhs[col][j];
    }
  }
  return rhs;
}

/* sigma_max of a complex matrix G through the realified Hermitian G^H G */
double sigma_max_complex(const std::vector<CVec>& g) {
  const int p = static_cast<int>(g.size());
  const int m = p > 0 ? static_cast<int>(g[0].size()) : 0;
  if (p == 0 || m == 0) return 0.0;
  std::vector<CVec> gram(m, CVec(m, 0.0));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      std::complex<double> s = 0.0;
      for (int k = 0; k < p; ++k) s += std::conj(g[k][i]) * g[k][j];
      gram[i][j] = s;
    }
  Matrix real2(2 * m, 2 * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double re = gram[i][j].real();
      const double im = gram[i][j].imag();
      real2(i, j) = re;
      real2(i + m, j + m) = re;
      real2(i, j + m) = -im;
      real2(i + m, j) = im;
    }
  const auto eig = symmetric_eigenvalues(real2);
  return std::sqrt(std::max(eig.back(), 0.0));
}

}  // namespace

L2GainEstimate l2_gain_u_to_ydot(const Matrix& a, const Matrix& b, const Matrix& c,
                                 const Matrix& d) {
  const int n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("l2_gain: A must be square");
  if (b.rows() != n) throw std::invalid_argument("l2_gain: B row count mismatch");
  if (c.cols() != n) throw std::invalid_argument("l2_gain: C column count mismatch");
  if (d.rows() != c.rows() || d.cols() != b.cols())
    throw std::invalid_argument("l2_gain: D shape mismatch");
  if (spectral_abscissa(a) >= -1e-9)
    throw std::runtime_error("l2_gain: A is not Hurwitz");

  const Matrix ca = c * a;
  const Matrix cb = c * b;
  const int p = c.rows();
  const int m = b.cols();

  auto response = [&](double log_omega) {
    const double omega = std::pow(10.0, log_omega);
    const auto x = resolvent_times_b(a, b, omega);
    std::vector<CVec> g(p, CVec(m));
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < m; ++j) {
        std::complex<double> s = cb(i, j);
        for (int k = 0; k < n; ++k) s += ca(i, k) * x[k][j];
        g[i][j] = s;
      }
    return sigma_max_complex(g);
  };

  const int points = 400;
  double best = 0.0;
  int best_idx = 0;
  std::vector<double> logs(points);
  for (int i = 0; i < points; ++i) {
    logs[i] = -4.0 + 8.0 * i / (points - 1);
    const double v = response(logs[i]);
    if (v > best) {
      best = v;
      best_idx = i;
    }
  }

  /* golden-section refinement of the sweep peak */
  double lo = logs[best_idx > 0 ? best_idx - 1 : 0];
  double hi = logs[best_idx + 1 < points ? best_idx + 1 : points - 1];
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo);
  double x2 = lo + gr * (hi - lo);
  double f1 = response(x1);
  double f2 = response(x2);
  for (int it = 0; it < 100 && hi - lo > 1e-10; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = response(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = response(x1);
    }
    best = std::max(best, std::max(f1, f2));
  }

  L2GainEstimate est;
  est.high_freq_limit = spectral_norm(cb);
  est.gamma = std::max(best, est.high_freq_limit);
  return est;
}

}  // namespace symdiss
