#ifndef SYMDISS_SYSTEMS_HPP
#define SYMDISS_SYSTEMS_HPP

#include <functional>
#include <optional>
#include <vector>

#include "symdiss/linalg.hpp"

namespace symdiss {

/* state-measured: the symbolic layer observes the state itself;
 * output-measured: it observes a quantized copy of h(x,u) */
enum class MeasurementMode { kStateMeasured, kOutputMeasured };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
using Box = std::vector<Interval>;

using VectorField = std::function<Vec(const Vec&, const Vec&)>;
using OutputMap = std::function<Vec(const Vec&, const Vec&)>;

/* Continuous-time control system dx/dt = f(x,u), y = h(x,u) on a compact
 * state box with a compact input box containing 0.  K1, K2 are Lipschitz
 * bounds of h in x and u under the infinity norm. */
class ContinuousSystem {
 public:
  static ContinuousSystem lti(const Matrix& a, const Matrix& b, const Matrix& c,
                              const Matrix& d, MeasurementMode mode, Box domain,
                              Box input_set,
                              std::optional<double> k1 = std::nullopt,
                              std::optional<double> k2 = std::nullopt);

  static ContinuousSystem generic(int state_dim, int input_dim, int output_dim,
                                  VectorField f, OutputMap h, MeasurementMode mode,
                                  Box domain, Box input_set, double k1, double k2);

  int state_dim() const { return n_; }
  int input_dim() const { return m_; }
  int output_dim() const { return p_; }
  MeasurementMode measurement_mode() const { return mode_; }
  const Box& domain() const { return domain_; }
  const Box& input_set() const { return input_set_; }
  double k1() const { return k1_; }
  double k2() const { return k2_; }

  Vec dynamics(const Vec& x, const Vec& u) const;
  Vec output(const Vec& x, const Vec& u) const;

  bool is_lti() const { return lti_; }
  const Matrix& a() const;
  const Matrix& b() const;
  const Matrix& c() const;
  const Matrix& d() const;

 private:
  ContinuousSystem() = default;
  int n_ = 0, m_ = 0, p_ = 0;
  MeasurementMode mode_ = MeasurementMode::kStateMeasured;
  Box domain_, input_set_;
  double k1_ = 0.0, k2_ = 0.0;
  VectorField f_;
  OutputMap h_;
  bool lti_ = false;
  Matrix a_, b_, c_, d_;
};

/* class-K-in-r bounds alpha1(r,t), alpha2(r,t) on trajectory deviation caused
 * by state and input perturbations (incremental forward completeness) */
struct IfcBounds {
  std::function<double(double, double)> alpha1;
  std::function<double(double, double)> alpha2;
};

/* closed-form bounds for LTI dynamics:
 * alpha1(r,t) = ||e^{At}||_inf r, alpha2(r,t) = (int_0^t ||e^{As}B||_inf ds) r */
IfcBounds lti_ifc_bounds(const Matrix& a, const Matrix& b);

/* fixed-step RK4 under constant input; throws std::runtime_error on divergence */
Vec integrate(const ContinuousSystem& sys, const Vec& x0, const Vec& u, double t,
              double h);

struct L2GainEstimate {
  double gamma = 0.0;            /* sup singular value over the frequency sweep */
  double high_freq_limit = 0.0;  /* sigma_max(CB), the omega -> inf limit */
};

/* L2 gain of the map u -> dy/dt for piecewise-constant inputs, i.e. the
 * H-infinity norm of (A, B, CA, CB).  Requires A Hurwitz. */
L2GainEstimate l2_gain_u_to_ydot(const Matrix& a, const Matrix& b, const Matrix& c,
                                 const Matrix& d);

}  // namespace symdiss

#endif
