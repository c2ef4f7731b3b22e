#ifndef SYMDISS_LINALG_HPP
#define SYMDISS_LINALG_HPP

#include <initializer_list>
#include <vector>

namespace symdiss {

using Vec = std::vector<double>;

/* Dense row-major matrix sized for control problems (n <= 16 or so).
 * All factory validation throws std::invalid_argument. */
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);
  explicit Matrix(const std::vector<std::vector<double>>& rows);

  static Matrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

  Matrix transpose() const;
  bool is_finite() const;
  bool is_symmetric(double tol = 1e-12) const;
  std::vector<std::vector<double>> to_rows() const;

  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  Matrix operator*(const Matrix& o) const;
  Matrix operator*(double s) const;
  Vec operator*(const Vec& v) const;
  Matrix& operator+=(const Matrix& o);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(double s, const Matrix& m);

double dot(const Vec& a, const Vec& b);
Vec vec_sub(const Vec& a, const Vec& b);

/* max_i |v_i|; 0 for the empty vector */
double inf_norm(const Vec& v);

/* induced infinity norm, max absolute row sum */
double induced_inf_norm(const Matrix& m);

/* largest singular value by power iteration on M^T M, relative tolerance 1e-12,
 * restarted from several seeded vectors to dodge orthogonal starts */
double spectral_norm(const Matrix& m);

/* eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending order */
std::vector<double> symmetric_eigenvalues(const Matrix& m);
double min_symmetric_eigenvalue(const Matrix& m);

/* e^{A t} by scaling and squaring with a truncated series core */
Matrix matrix_exponential(const Matrix& a, double t);

/* estimate of max_i Re(lambda_i(A)) from the spectral radius of e^A,
 * computed by repeated squaring with per-step norm normalization */
double spectral_abscissa(const Matrix& a);

/* x^T M y for conformable sizes */
double quad_form(const Vec& x, const Matrix& m, const Vec& y);

}  // namespace symdiss

#endif
