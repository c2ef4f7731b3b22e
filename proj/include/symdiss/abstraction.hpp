#ifndef SYMDISS_ABSTRACTION_HPP
#define SYMDISS_ABSTRACTION_HPP

#include <string>
#include <vector>

#include "symdiss/systems.hpp"
#include "symdiss/transition.hpp"

namespace symdiss {

/* kSpec: successor cell included when the sampled flow lands within
 *        alpha1(theta1,tau) + alpha2(theta2,tau) + eta/2 of the cell center;
 * kFigure: strict eta ball, the tight variant used by the worked scalar model */
enum class RadiusMode { kSpec, kFigure };

struct AbstractionParams {
  double tau = 0.0;     /* sampling period */
  double eta = 0.0;     /* state quantization */
  double mu = 0.0;      /* input (and output) quantization */
  double theta1 = 0.0;  /* state perturbation budget */
  double theta2 = 0.0;  /* input perturbation budget */
  double eps_u = 0.0;   /* input matching precision */
  double eps_y = 0.0;   /* output matching precision */
  RadiusMode radius_mode = RadiusMode::kSpec;
};

struct ParamCheck {
  bool ok = true;
  std::vector<std::string> violations;
};

/* state-measured inequalities: eta/2 <= eps_y <= theta1, mu/2 <= eps_u <= theta2 */
ParamCheck validate_state_measured(const AbstractionParams& p);

/* output-measured inequalities: K1*eta/2 + (K2+1)*mu/2 <= eps_y,
 * eta/2 <= theta1, mu/2 <= eps_u <= theta2 */
ParamCheck validate_output_measured(const AbstractionParams& p, double k1, double k2);

/* flow of the sampled system over one period (RK4, step tau/100) */
Vec sampled_successor(const ContinuousSystem& sys, const Vec& x, const Vec& u, double tau);

struct AbstractionDiagnostics {
  std::vector<int> dead_states;  /* states with no enabled input */
};

/* quantized symbolic model of the tau-sampled system on the domain box */
FiniteTransitionSystem build_abstraction(const ContinuousSystem& sys, const IfcBounds& ifc,
                                         const AbstractionParams& params,
                                         AbstractionDiagnostics* diag = nullptr);

double transition_radius(const IfcBounds& ifc, const AbstractionParams& params);

}  // namespace symdiss

#endif
