#include "symdiss/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace symdiss {

Matrix::Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative dimension");
  data_.assign(static_cast<size_t>(rows) * cols, 0.0);
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = static_cast<int>(rows.size());
  cols_ = rows_ > 0 ? static_cast<int>(rows.begin()->size()) : 0;
  data_.reserve(static_cast<size_t>(rows_) * cols_);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != cols_)
      throw std::invalid_argument("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix::Matrix(const std::vector<std::vector<double>>& rows) {
  rows_ = static_cast<int>(rows.size());
  cols_ = rows_ > 0 ? static_cast<int>(rows.front().size()) : 0;
  data_.reserve(static_cast<size_t>(rows_) * cols_);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != cols_)
      throw std::invalid_argument("Matrix: ragged rows");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool Matrix::is_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

bool Matrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (int i = 0; i < rows_; ++i)
    for (int j = i + 1; j < cols_; ++j)
      if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
  return true;
}

std::vector<std::vector<double>> Matrix::to_rows() const {
  std::vector<std::vector<double>> out(rows_, std::vector<double>(cols_));
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out[i][j] = (*this)(i, j);
  return out;
}

static void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string("Matrix ") + op + ": shape mismatch");
}

Matrix Matrix::operator+(const Matrix& o) const {
  check_same_shape(*this, o, "+");
  Matrix r(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j) + o(i, j);
  return r;
}

Matrix Matrix::operator-(const Matrix& o) const {
  check_same_shape(*this, o, "-");
  Matrix r(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j) - o(i, j);
  return r;
}

Matrix Matrix::operator*(const Matrix& o) const {
  if (cols_ != o.rows()) throw std::invalid_argument("Matrix *: inner dimension mismatch");
  Matrix r(rows_, o.cols());
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const double v = (*this)(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < o.cols(); ++j) r(i, j) += v * o(k, j);
    }
  return r;
}

Matrix Matrix::operator*(double s) const {
  Matrix r(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j) * s;
  return r;
}

Vec Matrix::operator*(const Vec& v) const {
  if (static_cast<int>(v.size()) != cols_)
    throw std::invalid_argument("Matrix * vec: dimension mismatch");
  Vec r(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

Matrix& Matrix::operator+=(const Matrix& o) {
  check_same_shape(*this, o, "+=");
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) (*this)(i, j) += o(i, j);
  return *this;
}

Matrix operator*(double s, const Matrix& m) { return m * s; }

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vec vec_sub(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vec_sub: size mismatch");
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

double inf_norm(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double induced_inf_norm(const Matrix& m) {
  double best = 0.0;
  for (int i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < m.cols(); ++j) s += std::abs(m(i, j));
    best = std::max(best, s);
  }
  return best;
}

double spectral_norm(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  const Matrix b = m.transpose() * m;
  const int n = b.rows();
  bool all_zero = true;
  for (int i = 0; i < n && all_zero; ++i)
    for (int j = 0; j < n; ++j)
      if (b(i, j) != 0.0) { all_zero = false; break; }
  if (all_zero) return 0.0;

  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  double best = 0.0;
  for (int restart = 0; restart < 3; ++restart) {
    Vec v(n);
    if (restart == 0)
      std::fill(v.begin(), v.end(), 1.0);
    else
      for (double& x : v) x = dist(rng);
    double nv = std::sqrt(dot(v, v));
    if (nv == 0.0) continue;
    for (double& x : v) x /= nv;
    double lambda = 0.0;
    for (int it = 0; it < 20000; ++it) {
      Vec w = b * v;
      const double next = dot(v, w);
      const double nw = std::sqrt(dot(w, w));
      if (nw == 0.0) { lambda = 0.0; break; }
      for (size_t i = 0; i < w.size(); ++i) v[i] = w[i] / nw;
      if (it > 0 && std::abs(next - lambda) <= 1e-12 * std::max(1.0, std::abs(next))) {
        lambda = next;
        break;
      }
      lambda = next;
    }
    best = std::max(best, lambda);
  }
  return std::sqrt(std::max(best, 0.0));
}

std::vector<double> symmetric_eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("symmetric_eigenvalues: not square");
  const int n = m.rows();
  if (n == 0) return {};
  /* work on the symmetrized copy so callers can pass numerically near-symmetric forms */
  Matrix a(n, n);
  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a(i, j) = 0.5 * (m(i, j) + m(j, i));
      scale += a(i, j) * a(i, j);
    }
  scale = std::sqrt(scale);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    off = std::sqrt(2.0 * off);
    if (off <= 1e-12 * std::max(1.0, scale)) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

double min_symmetric_eigenvalue(const Matrix& m) {
  const auto eig = symmetric_eigenvalues(m);
  if (eig.empty()) throw std::invalid_argument("min_symmetric_eigenvalue: empty matrix");
  return eig.front();
}

Matrix matrix_exponential(const Matrix& a, double t) {
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix_exponential: not square");
  if (!a.is_finite() || !std::isfinite(t))
    throw std::invalid_argument("matrix_exponential: non-finite input");
  const int n = a.rows();
  Matrix b = a * t;
  const double nb = induced_inf_norm(b);
  if (nb == 0.0) return Matrix::identity(n);

  int s = 0;
  if (nb > 0.5) s = static_cast<int>(std::ceil(std::log2(nb / 0.5)));
  const double divisor = std::ldexp(1.0, s);
  b = b * (1.0 / divisor);

  Matrix result = Matrix::identity(n);
  Matrix term = Matrix::identity(n);
  for (int k = 1; k <= 40; ++k) {
    term = term * b * (1.0 / k);
    result += term;
    if (induced_inf_norm(term) <= 1e-18 * std::max(1.0, induced_inf_norm(result))) break;
  }
  for (int i = 0; i < s; ++i) result = result * result;
  return result;
}

double spectral_abscissa(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("spectral_abscissa: not square");
  if (a.rows() == 0) throw std::invalid_argument("spectral_abscissa: empty matrix");
  /* log rho(e^A) = lim (1/2^k) log ||(e^A)^{2^k}|| */
  Matrix cur = matrix_exponential(a, 1.0);
  double total = 0.0;
  double weight = 1.0;
  for (int i = 0; i < 64; ++i) {
    const double nrm = induced_inf_norm(cur);
    if (nrm == 0.0) return -std::numeric_limits<double>::infinity();
    total += weight * std::log(nrm);
    if (nrm < 1e-280) break;
    cur = cur * (1.0 / nrm);
    cur = cur * cur;
    weight *= 0.5;
  }
  return total;
}

double quad_form(const Vec& x, const Matrix& m, const Vec& y) {
  if (static_cast<int>(x.size()) != m.rows() || static_cast<int>(y.size()) != m.cols())
    throw std::invalid_argument("quad_form: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < m.rows(); ++i) {
    double row = 0.0;
    for (int j = 0; j < m.cols(); ++j) row += m(i, j) * y[j];
    s += x[i] * row;
  }
  return s;
}

}  // namespace symdiss
