#ifndef SYMDISS_DISSIPATIVITY_HPP
#define SYMDISS_DISSIPATIVITY_HPP

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "symdiss/linalg.hpp"
#include "symdiss/transition.hpp"

namespace symdiss {

/* quadratic supply rate omega(u,y) = y^T Q y + 2 y^T S u + u^T R u */
struct QsrTriple {
  Matrix q, s, r;

  QsrTriple() = default;
  QsrTriple(Matrix q_in, Matrix s_in, Matrix r_in);

  int output_dim() const { return q.rows(); }
  int input_dim() const { return r.rows(); }

  /* the passivity specialization Q = -rho I, S = 1/2 I, R = -nu I */
  static QsrTriple passivity(double rho, double nu, int m);
};

struct PassivityIndices {
  double rho = 0.0;
  double nu = 0.0;
  QsrTriple to_qsr(int m) const { return QsrTriple::passivity(rho, nu, m); }
};

/* recognize a passivity-form triple; entries compared within 1e-12 */
std::optional<PassivityIndices> as_passivity_indices(const QsrTriple& qsr);

/* V(x) = scale * x^T P x with a Lipschitz bound l of V under the infinity
 * norm on the compact domain (dual 1-norm of Px, maximized over the grid) */
struct StorageFunction {
  Matrix p;
  double scale = 0.5;
  double l = 0.0;

  static StorageFunction quadratic(const Matrix& p, double tau,
                                   const std::vector<Vec>& domain_states);
};

double storage_lipschitz_bound(const Matrix& p, const std::vector<Vec>& states);

struct TransferConstants {
  double zeta1 = 0.0, zeta2 = 0.0, zeta3 = 0.0, zeta4 = 0.0;
};

double supply_rate(const QsrTriple& qsr, const Vec& u, const Vec& y);

struct LtiQsrCheck {
  double margin = 0.0;
  bool ok = false;
  Matrix form;  /* (n+m)x(n+m) symmetric matrix of omega - dV/dt */
};

/* continuous-time QSR check for dx/dt = Ax+Bu, y = Cx+Du with V = 1/2 x^T P x:
 * the quadratic form omega(u, Cx+Du) - x^T P (Ax+Bu) in (x,u) must be PSD */
LtiQsrCheck verify_lti_qsr(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d,
                           const Matrix& p, const QsrTriple& qsr);

struct StorageSearchGrid {
  double p_max = 5.0;
  int points = 9;
  int refinements = 3;
};

/* coarse-to-fine grid search over symmetric PSD P; none when no grid point
 * reaches margin >= 0 */
std::optional<Matrix> search_storage(const Matrix& a, const Matrix& b, const Matrix& c,
                                     const Matrix& d, const QsrTriple& qsr,
                                     const StorageSearchGrid& grid = {});

struct TransferCheck {
  bool ok = false;
  double q_slack = 0.0;    /* lambda_min(Q1-Q2) - zeta1 ||Q1||^2 - zeta3 */
  double r_slack = 0.0;    /* lambda_min(R1-R2) - zeta2 ||S1||^2 - zeta4 ||R1||^2 */
  double s_mismatch = 0.0; /* max entrywise |S1 - S2|, must be <= 1e-12 */
};

/* dissipativity transfer check: T2 dissipative with qsr2 and T1 simulated by
 * T2 imply T1 quasi-dissipative with a candidate qsr1 when all slacks clear */
TransferCheck transfer_qsr_from_abstraction(const QsrTriple& qsr2, const TransferConstants& zeta,
                                            const QsrTriple& qsr1);

/* passivity-index corollary: largest rho1 >= 0 with rho1(1+zeta1 rho1) = rho2-zeta3
 * and nu1 from nu2 analogously; requires rho2-zeta3 > 0 and nu2-zeta2 > 0 */
PassivityIndices transfer_passivity_indices(double rho2, double nu2,
                                            const TransferConstants& zeta);

/* informational penalty sum of the transfer offset bound: the transferred
 * quasi-dissipativity rate satisfies r1 > r2 - penalty; reported, not asserted */
double transfer_offset_penalty(const QsrTriple& qsr1, const TransferConstants& zeta,
                               double eps_u, double eps_y);

/* convenience search for a feasible transfer candidate Q1 = Q2 + cI,
 * R1 = R2 + dI, S1 = S2; none when no (c,d) clears both slacks */
std::optional<QsrTriple> search_transfer_candidate(const QsrTriple& qsr2,
                                                   const TransferConstants& zeta);

/* abstraction supply rate for state-measured models:
 * Q' = Q + tau ||Q|| (tau gamma + 1) I,  S' = S,
 * R' = R + tau gamma ||S|| I + tau gamma ||Q|| (tau^2 gamma + tau + gamma) I */
QsrTriple abstraction_qsr_state_measured(const QsrTriple& qsr, double tau, double gamma);

enum class OutputFormulaMode { kTheorem, kExample2Compat };

/* output-measured variant; kTheorem adds the squared-norm corrections while
 * kExample2Compat reproduces the published worked-example arithmetic
 * (passivity-form only); the two disagree and both are kept on purpose */
QsrTriple abstraction_qsr_output_measured(const QsrTriple& qsr, double tau, double gamma,
                                          double mu, int m, OutputFormulaMode mode);

struct TransitionMargin {
  int state = 0;
  int input = 0;
  int successor = 0;
  double margin = 0.0;
};

struct QuasiCertificate {
  QsrTriple qsr;
  StorageFunction storage;
  double beta = 0.0;
  std::vector<TransitionMargin> margins;
  double min_margin = 0.0;
  bool verdict = false;
};

/* exhaustive per-transition quasi-dissipativity check:
 * margin = tau*omega(l, y(q,l)) - tau*(V(p)-V(q)) + tau*beta over all q -l-> p */
QuasiCertificate verify_quasi_dissipativity(const FiniteTransitionSystem& ts,
                                            const QsrTriple& qsr,
                                            const StorageFunction& storage, double beta);

/* default quantization offset beta = L*eta/(2*tau) */
double quantization_offset(const StorageFunction& storage, double eta, double tau);

/* batched passivity margins from the Kronecker-form matrices
 * F = tau*scale*P - rho tau C^T C, G = (tau/2) C - rho tau D^T C,
 * H = (tau/2)(D+D^T) - rho tau D^T D - nu tau I, evaluated per (q, l, p);
 * must equal verify_quasi_dissipativity margins as a multiset */
std::vector<double> kron_batch_check(const FiniteTransitionSystem& ts,
                                     const PassivityIndices& indices, const Matrix& c,
                                     const Matrix& d, const StorageFunction& storage,
                                     double beta);

struct FeedbackIndexResult {
  bool ok = false;
  double rho_cl = 0.0;
};

/* negative-feedback passivity-index composition: ok iff nu1 > 0, rho2 > 0,
 * rho1 + nu2 > 0; closed-loop output index min(rho1+nu2, rho2+nu1) */
FeedbackIndexResult feedback_passivity_index(double rho1, double nu1, double rho2, double nu2);

nlohmann::json certificate_to_json(const QuasiCertificate& cert,
                                   const std::string& formula_mode,
                                   const std::string& radius_mode);

}  // namespace symdiss

#endif
