#include "symdiss/dissipativity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "symdiss/parallel.hpp"

namespace symdiss {

QsrTriple::QsrTriple(Matrix q_in, Matrix s_in, Matrix r_in)
    : q(std::move(q_in)), s(std::move(s_in)), r(std::move(r_in)) {
  if (q.rows() != q.cols()) throw std::invalid_argument("QsrTriple: Q must be square");
  if (r.rows() != r.cols()) throw std::invalid_argument("QsrTriple: R must be square");
  if (!q.is_symmetric(1e-12)) throw std::invalid_argument("QsrTriple: Q must be symmetric");
  if (!r.is_symmetric(1e-12)) throw std::invalid_argument("QsrTriple: R must be symmetric");
  if (s.rows() != q.rows() || s.cols() != r.rows())
    throw std::invalid_argument("QsrTriple: S must be output_dim x input_dim");
  if (!q.is_finite() || !s.is_finite() || !r.is_finite())
    throw std::invalid_argument("QsrTriple: non-finite entry");
}

QsrTriple QsrTriple::passivity(double rho, double nu, int m) {
  if (m < 1) throw std::invalid_argument("passivity: m must be >= 1");
  Matrix q(m, m), s(m, m), r(m, m);
  for (int i = 0; i < m; ++i) {
    q(i, i) = -rho;
    s(i, i) = 0.5;
    r(i, i) = -nu;
  }
  return QsrTriple(std::move(q), std::move(s), std::move(r));
}

std::optional<PassivityIndices> as_passivity_indices(const QsrTriple& qsr) {
  const int m = qsr.input_dim();
  if (qsr.output_dim() != m || m == 0) return std::nullopt;
  const double rho = -qsr.q(0, 0);
  const double nu = -qsr.r(0, 0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double qe = i == j ? -rho : 0.0;
      const double se = i == j ? 0.5 : 0.0;
      const double re = i == j ? -nu : 0.0;
      if (std::abs(qsr.q(i, j) - qe) > 1e-12) return std::nullopt;
      if (std::abs(qsr.s(i, j) - se) > 1e-12) return std::nullopt;
      if (std::abs(qsr.r(i, j) - re) > 1e-12) return std::nullopt;
    }
  return PassivityIndices{rho, nu};
}

double storage_lipschitz_bound(const Matrix& p, const std::vector<Vec>& states) {
  double best = 0.0;
  for (const auto& x : states) {
    const Vec px = p * x;
    double one = 0.0;
    for (double v : px) one += std::abs(v);
    best = std::max(best, one);
  }
  return best;
}

StorageFunction StorageFunction::quadratic(const Matrix& p, double tau,
                                           const std::vector<Vec>& domain_states) {
  if (p.rows() != p.cols()) throw std::invalid_argument("StorageFunction: P must be square");
  if (!p.is_symmetric(1e-12)) throw std::invalid_argument("StorageFunction: P must be symmetric");
  if (!(tau > 0.0)) throw std::invalid_argument("StorageFunction: tau must be positive");
  if (p.rows() > 0 && min_symmetric_eigenvalue(p) < -1e-9)
    throw std::invalid_argument("StorageFunction: P must be positive semidefinite");
  StorageFunction sf;
  sf.p = p;
  sf.scale = 1.0 / (2.0 * tau);
  sf.l = storage_lipschitz_bound(p, domain_states);
  return sf;
}

double supply_rate(const QsrTriple& qsr, const Vec& u, const Vec& y) {
  if (static_cast<int>(y.size()) != qsr.output_dim() ||
      static_cast<int>(u.size()) != qsr.input_dim())
    throw std::invalid_argument("supply_rate: dimension mismatch");
  return quad_form(y, qsr.q, y) + 2.0 * quad_form(y, qsr.s, u) + quad_form(u, qsr.r, u);
}

LtiQsrCheck verify_lti_qsr(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d,
                           const Matrix& p, const QsrTriple& qsr) {
  const int n = a.rows();
  const int m = b.cols();
  if (a.cols() != n || b.rows() != n || c.cols() != n || d.cols() != m)
    throw std::invalid_argument("verify_lti_qsr: state-space dimension mismatch");
  if (c.rows() != qsr.output_dim() || d.rows() != qsr.output_dim() ||
      m != qsr.input_dim())
    throw std::invalid_argument("verify_lti_qsr: qsr dimension mismatch");
  if (p.rows() != n || p.cols() != n || !p.is_symmetric(1e-9))
    throw std::invalid_argument("verify_lti_qsr: P must be n x n symmetric");

  /* omega(u, Cx+Du) - x^T P (Ax+Bu) as a symmetric form in (x,u) */
  const Matrix ct = c.transpose();
  const Matrix dt = d.transpose();
  const Matrix pa = p * a;
  const Matrix m_xx = ct * qsr.q * c - 0.5 * (pa + pa.transpose());
  const Matrix m_xu = ct * qsr.q * d + ct * qsr.s - 0.5 * (p * b);
  const Matrix m_uu = dt * qsr.q * d + dt * qsr.s + qsr.s.transpose() * d + qsr.r;

  Matrix form(n + m, n + m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) form(i, j) = 0.5 * (m_xx(i, j) + m_xx(j, i));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      form(i, n + j) = m_xu(i, j);
      form(n + j, i) = m_xu(i, j);
    }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) form(n + i, n + j) = 0.5 * (m_uu(i, j) + m_uu(j, i));

  LtiQsrCheck out;
  out.form = form;
  out.margin = min_symmetric_eigenvalue(form);
  out.ok = out.margin >= -1e-9;
  return out;
}

namespace {

/* enumerate symmetric matrices whose independent entries run over the level grid */
void enumerate_symmetric(int n, const std::vector<std::vector<double>>& axis_values,
                         const std::function<void(const Matrix&)>& visit) {
  const int dof = n * (n + 1) / 2;
  std::vector<size_t> idx(dof, 0);
  while (true) {
    Matrix p(n, n);
    int k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        p(i, j) = axis_values[k][idx[k]];
        p(j, i) = p(i, j);
        ++k;
      }
    visit(p);
    int d = dof;
    while (d > 0) {
      --d;
      if (++idx[d] < axis_values[d].size()) break;
      idx[d] = 0;
      if (d == 0) return;
    }
  }
}

}  // namespace

std::optional<Matrix> search_storage(const Matrix& a, const Matrix& b, const Matrix& c,
                                     const Matrix& d, const QsrTriple& qsr,
                                     const StorageSearchGrid& grid) {
  const int n = a.rows();
  if (n > 3) throw std::invalid_argument("search_storage: grid search limited to n <= 3");
  if (grid.points < 2 || !(grid.p_max > 0.0))
    throw std::invalid_argument("search_storage: malformed grid");

  const int dof = n * (n + 1) / 2;
  std::vector<double> center(dof, 0.0);
  double half = grid.p_max;
  Matrix best_p;
  double best_margin = -std::numeric_limits<double>::infinity();
  bool have_best = false;

  for (int level = 0; level <= grid.refinements; ++level) {
    std::vector<std::vector<double>> axes(dof);
    int k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const bool diag = i == j;
        const double lo = diag ? std::max(0.0, center[k] - half) : center[k] - half;
        const double hi = center[k] + half;
        for (int t = 0; t < grid.points; ++t)
          axes[k].push_back(lo + (hi - lo) * t / (grid.points - 1));
        ++k;
      }
    enumerate_symmetric(n, axes, [&](const Matrix& p) {
      if (min_symmetric_eigenvalue(p) < -1e-9) return;
      const LtiQsrCheck check = verify_lti_qsr(a, b, c, d, p, qsr);
      if (check.margin > best_margin) {
        best_margin = check.margin;
        best_p = p;
        have_best = true;
      }
    });
    if (!have_best) break;
    if (best_margin >= 0.0) return best_p;
    int kk = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        center[kk] = best_p(i, j);
        ++kk;
      }
    half /= static_cast<double>(grid.points - 1);
    half = std::max(half, 1e-6);
  }
  return std::nullopt;
}

namespace {

void check_zetas(const TransferConstants& zeta) {
  if (!(zeta.zeta1 >= 0.0) || !(zeta.zeta2 >= 0.0) || !(zeta.zeta3 >= 0.0) ||
      !(zeta.zeta4 >= 0.0))
    throw std::invalid_argument("transfer: zeta constants must be nonnegative");
}

TransferCheck transfer_check_impl(const QsrTriple& known, const TransferConstants& zeta,
                                  const QsrTriple& candidate) {
  check_zetas(zeta);
  if (known.output_dim() != candidate.output_dim() ||
      known.input_dim() != candidate.input_dim())
    throw std::invalid_argument("transfer: dimension mismatch");
  TransferCheck out;
  out.q_slack = min_symmetric_eigenvalue(candidate.q - known.q) -
                zeta.zeta1 * std::pow(spectral_norm(candidate.q), 2) - zeta.zeta3;
  out.r_slack = min_symmetric_eigenvalue(candidate.r - known.r) -
                zeta.zeta2 * std::pow(spectral_norm(candidate.s), 2) -
                zeta.zeta4 * std::pow(spectral_norm(candidate.r), 2);
  out.s_mismatch = 0.0;
  for (int i = 0; i < candidate.s.rows(); ++i)
    for (int j = 0; j < candidate.s.cols(); ++j)
      out.s_mismatch = std::max(out.s_mismatch,
                                std::abs(candidate.s(i, j) - known.s(i, j)));
  out.ok = out.q_slack >= -1e-12 && out.r_slack >= -1e-12 && out.s_mismatch <= 1e-12;
  return out;
}

}  // namespace

TransferCheck transfer_qsr_from_abstraction(const QsrTriple& qsr2, const TransferConstants& zeta,
                                            const QsrTriple& qsr1) {
  return transfer_check_impl(qsr2, zeta, qsr1);
}

PassivityIndices transfer_passivity_indices(double rho2, double nu2,
                                            const TransferConstants& zeta) {
  check_zetas(zeta);
  const double rho_gap = rho2 - zeta.zeta3;
  const double nu_gap = nu2 - zeta.zeta2;
  if (!(rho_gap > 0.0))
    throw std::invalid_argument("transfer_passivity_indices: rho2 - zeta3 > 0 fails");
  if (!(nu_gap > 0.0))
    throw std::invalid_argument("transfer_passivity_indices: nu2 - zeta2 > 0 fails");
  auto positive_root = [](double zeta_q, double gap) {
    if (zeta_q == 0.0) return gap;
    return (-1.0 + std::sqrt(1.0 + 4.0 * zeta_q * gap)) / (2.0 * zeta_q);
  };
  return PassivityIndices{positive_root(zeta.zeta1, rho_gap),
                          positive_root(zeta.zeta4, nu_gap)};
}

double transfer_offset_penalty(const QsrTriple& qsr1, const TransferConstants& zeta,
                               double eps_u, double eps_y) {
  check_zetas(zeta);
  if (!(zeta.zeta1 > 0.0) || !(zeta.zeta2 > 0.0) || !(zeta.zeta3 > 0.0) ||
      !(zeta.zeta4 > 0.0))
    throw std::invalid_argument("transfer_offset_penalty: zetas must be strictly positive");
  const double s_norm = spectral_norm(qsr1.s);
  const double q_bar = symmetric_eigenvalues(qsr1.q * -1.0).back();
  const double r_bar = symmetric_eigenvalues(qsr1.r * -1.0).back();
  return eps_y / zeta.zeta1 + eps_y / zeta.zeta2 + (eps_u / zeta.zeta3) * s_norm * s_norm +
         eps_u / zeta.zeta4 + std::max(0.0, q_bar) * eps_y + std::max(0.0, r_bar) * eps_u +
         2.0 * s_norm * eps_y * eps_u;
}

std::optional<QsrTriple> search_transfer_candidate(const QsrTriple& qsr2,
                                                   const TransferConstants& zeta) {
  check_zetas(zeta);
  if (!(zeta.zeta1 > 0.0) || !(zeta.zeta4 > 0.0)) {
    throw std::invalid_argument("search_transfer_candidate: zeta1 and zeta4 must be positive");
  }

  /* each slack is concave in its shift, so golden-section maximization
   * brackets the feasible interval when one exists */
  auto maximize = [](double hi, const std::function<double(double)>& f) {
    double lo = 0.0;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
      if (f1 < f2) {
        lo = x1; x1 = x2; f1 = f2;
        x2 = lo + gr * (hi - lo); f2 = f(x2);
      } else {
        hi = x2; x2 = x1; f2 = f1;
        x1 = hi - gr * (hi - lo); f1 = f(x1);
      }
    }
    return std::make_pair(0.5 * (lo + hi), std::max(f1, f2));
  };

  auto shifted = [](const Matrix& base, double c) {
    Matrix out = base;
    for (int i = 0; i < out.rows(); ++i) out(i, i) += c;
    return out;
  };

  const double s_term = zeta.zeta2 * std::pow(spectral_norm(qsr2.s), 2);
  auto q_slack = [&](double c) {
    return c - zeta.zeta1 * std::pow(spectral_norm(shifted(qsr2.q, c)), 2) - zeta.zeta3;
  };
  auto r_slack = [&](double d) {
    return d - s_term - zeta.zeta4 * std::pow(spectral_norm(shifted(qsr2.r, d)), 2);
  };

  const double c_hi = 0.5 / zeta.zeta1 + spectral_norm(qsr2.q) + 1.0;
  const double d_hi = 0.5 / zeta.zeta4 + spectral_norm(qsr2.r) + 1.0;
  const auto [c_best, c_val] = maximize(c_hi, q_slack);
  const auto [d_best, d_val] = maximize(d_hi, r_slack);
  if (c_val < 0.0 || d_val < 0.0) return std::nullopt;
  return QsrTriple(shifted(qsr2.q, c_best), qsr2.s, shifted(qsr2.r, d_best));
}

QsrTriple abstraction_qsr_state_measured(const QsrTriple& qsr, double tau, double gamma) {
  if (!(tau >= 0.0) || !(gamma >= 0.0))
    throw std::invalid_argument("abstraction_qsr_state_measured: tau, gamma must be >= 0");
  const double nq = spectral_norm(qsr.q);
  const double ns = spectral_norm(qsr.s);
  const int p = qsr.output_dim();
  const int m = qsr.input_dim();
  Matrix q1 = qsr.q;
  for (int i = 0; i < p; ++i) q1(i, i) += tau * nq * (tau * gamma + 1.0);
  Matrix r1 = qsr.r;
  const double r_shift = tau * gamma * ns + tau * gamma * nq * (tau * tau * gamma + tau + gamma);
  for (int i = 0; i < m; ++i) r1(i, i) += r_shift;
  return QsrTriple(std::move(q1), qsr.s, std::move(r1));
}

QsrTriple abstraction_qsr_output_measured(const QsrTriple& qsr, double tau, double gamma,
                                          double mu, int m, OutputFormulaMode mode) {
  if (!(tau >= 0.0) || !(gamma >= 0.0) || !(mu >= 0.0))
    throw std::invalid_argument("abstraction_qsr_output_measured: tau, gamma, mu must be >= 0");
  if (m < 1) throw std::invalid_argument("abstraction_qsr_output_measured: m must be >= 1");
  if (qsr.input_dim() != m)
    throw std::invalid_argument("abstraction_qsr_output_measured: qsr input dim != m");

  if (mode == OutputFormulaMode::kExample2Compat) {
    const auto idx = as_passivity_indices(qsr);
    if (!idx)
      throw std::invalid_argument(
          "abstraction_qsr_output_measured: Example2Compat mode supports passivity-form qsr only");
    const double rho = idx->rho;
    const double nu = idx->nu;
    const double drift = tau * rho * (tau * gamma + 1.0);
    const double rho1 = rho - drift - std::abs(1.0 - rho + drift);
    const double nu1 = nu - 0.5 - tau * gamma * rho * (tau * tau * gamma + tau + gamma) -
                       (gamma * std::sqrt(m * tau) * mu + gamma * gamma * tau);
    return QsrTriple::passivity(rho1, nu1, m);
  }

  const double nq = spectral_norm(qsr.q);
  const double ns = spectral_norm(qsr.s);
  const int p = qsr.output_dim();
  Matrix qc = qsr.q;
  for (int i = 0; i < p; ++i) qc(i, i) += tau * nq * (tau * gamma + 1.0);
  const double nqc = spectral_norm(qc);
  Matrix q1 = qc;
  for (int i = 0; i < p; ++i) q1(i, i) += nqc * nqc;
  Matrix r1 = qsr.r;
  const double r_shift = tau * gamma * nq * (tau * tau * gamma + tau + gamma) + ns * ns +
                         (gamma * std::sqrt(m * tau) * mu + gamma * gamma * tau);
  for (int i = 0; i < m; ++i) r1(i, i) += r_shift;
  return QsrTriple(std::move(q1), qsr.s, std::move(r1));
}

QuasiCertificate verify_quasi_dissipativity(const FiniteTransitionSystem& ts,
                                            const QsrTriple& qsr,
                                            const StorageFunction& storage, double beta) {
  const double tau = ts.tau();
  const int n_state = ts.num_states();
  if (n_state > 0 && static_cast<int>(ts.state(0).size()) != storage.p.rows())
    throw std::invalid_argument("verify_quasi_dissipativity: storage dimension mismatch");

  QuasiCertificate cert;
  cert.qsr = qsr;
  cert.storage = storage;
  cert.beta = beta;

  auto value = [&](const Vec& x) { return storage.scale * quad_form(x, storage.p, x); };

  std::vector<std::vector<std::vector<double>>> margins(n_state);
  run_chunked(n_state, [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      margins[i].resize(ts.num_inputs());
      const double vq = value(ts.state(i));
      for (int j = 0; j < ts.num_inputs(); ++j) {
        const double omega = supply_rate(qsr, ts.input(j), ts.system_output(i, j));
        for (int k : ts.post(i, j)) {
          const double m = tau * omega - tau * (value(ts.state(k)) - vq) + tau * beta;
          margins[i][j].push_back(m);
        }
      }
    }
  });

  cert.min_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_state; ++i)
    for (int j = 0; j < ts.num_inputs(); ++j) {
      const auto& post = ts.post(i, j);
      for (size_t t = 0; t < post.size(); ++t) {
        cert.margins.push_back({i, j, post[t], margins[i][j][t]});
        cert.min_margin = std::min(cert.min_margin, margins[i][j][t]);
      }
    }
  if (cert.margins.empty()) cert.min_margin = 0.0;
  cert.verdict = cert.margins.empty() || cert.min_margin >= -1e-9;
  return cert;
}

double quantization_offset(const StorageFunction& storage, double eta, double tau) {
  if (!(eta > 0.0) || !(tau > 0.0))
    throw std::invalid_argument("quantization_offset: eta, tau must be positive");
  return storage.l * eta / (2.0 * tau);
}

std::vector<double> kron_batch_check(const FiniteTransitionSystem& ts,
                                     const PassivityIndices& indices, const Matrix& c,
                                     const Matrix& d, const StorageFunction& storage,
                                     double beta) {
  const double tau = ts.tau();
  const double rho = indices.rho;
  const double nu = indices.nu;
  const int n = c.cols();
  const int m = d.cols();
  if (c.rows() != m || d.rows() != m)
    throw std::invalid_argument("kron_batch_check: square-output passivity shape required");
  if (storage.p.rows() != n)
    throw std::invalid_argument("kron_batch_check: storage dimension mismatch");
  if (ts.num_states() > 0 && static_cast<int>(ts.state(0).size()) != n)
    throw std::invalid_argument("kron_batch_check: state dimension mismatch");

  const Matrix ct = c.transpose();
  const Matrix dt = d.transpose();
  Matrix f = tau * storage.scale * storage.p - rho * tau * (ct * c);
  Matrix g = (tau / 2.0) * c - rho * tau * (dt * c);
  Matrix h = (tau / 2.0) * (d + dt) - rho * tau * (dt * d);
  for (int i = 0; i < m; ++i) h(i, i) -= nu * tau;

  std::vector<double> values;
  for (int i = 0; i < ts.num_states(); ++i) {
    const Vec& q = ts.state(i);
    const double fq = quad_form(q, f, q);
    for (int j = 0; j < ts.num_inputs(); ++j) {
      const Vec& l = ts.input(j);
      const double cross = 2.0 * quad_form(l, g, q);
      const double hl = quad_form(l, h, l);
      for (int k : ts.post(i, j)) {
        const Vec& p = ts.state(k);
        values.push_back(fq + cross + hl + tau * beta -
                         tau * storage.scale * quad_form(p, storage.p, p));
      }
    }
  }
  return values;
}

FeedbackIndexResult feedback_passivity_index(double rho1, double nu1, double rho2, double nu2) {
  FeedbackIndexResult out;
  out.ok = nu1 > 0.0 && rho2 > 0.0 && rho1 + nu2 > 0.0;
  out.rho_cl = std::min(rho1 + nu2, rho2 + nu1);
  return out;
}

nlohmann::json certificate_to_json(const QuasiCertificate& cert,
                                   const std::string& formula_mode,
                                   const std::string& radius_mode) {
  nlohmann::json j;
  j["qsr"]["Q"] = cert.qsr.q.to_rows();
  j["qsr"]["S"] = cert.qsr.s.to_rows();
  j["qsr"]["R"] = cert.qsr.r.to_rows();
  j["storage"]["P"] = cert.storage.p.to_rows();
  j["storage"]["scale"] = cert.storage.scale;
  j["storage"]["L"] = cert.storage.l;
  j["beta"] = cert.beta;
  j["min_margin"] = cert.min_margin;
  j["transitions_checked"] = cert.margins.size();
  j["verdict"] = cert.verdict;
  j["formula_mode"] = formula_mode;
  j["radius_mode"] = radius_mode;
  return j;
}

}  // namespace symdiss
