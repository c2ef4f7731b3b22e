#include "symdiss/abstraction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "symdiss/parallel.hpp"

namespace symdiss {

namespace {

std::string ineq(const char* text, double lhs, double rhs) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s fails (%.12g > %.12g)", text, lhs, rhs);
  return buf;
}

void check_positive(const AbstractionParams& p, ParamCheck& out) {
  auto pos = [&](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      out.violations.push_back(std::string(name) + " > 0 fails");
  };
  pos(p.tau, "tau");
  pos(p.eta, "eta");
  pos(p.mu, "mu");
  pos(p.theta1, "theta1");
  pos(p.theta2, "theta2");
  pos(p.eps_u, "eps_u");
  pos(p.eps_y, "eps_y");
}

}  // namespace

ParamCheck validate_state_measured(const AbstractionParams& p) {
  ParamCheck out;
  check_positive(p, out);
  if (p.eta / 2.0 > p.eps_y) out.violations.push_back(ineq("eta/2 <= eps_y", p.eta / 2.0, p.eps_y));
  if (p.eps_y > p.theta1) out.violations.push_back(ineq("eps_y <= theta1", p.eps_y, p.theta1));
  if (p.mu / 2.0 > p.eps_u) out.violations.push_back(ineq("mu/2 <= eps_u", p.mu / 2.0, p.eps_u));
  if (p.eps_u > p.theta2) out.violations.push_back(ineq("eps_u <= theta2", p.eps_u, p.theta2));
  out.ok = out.violations.empty();
  return out;
}

ParamCheck validate_output_measured(const AbstractionParams& p, double k1, double k2) {
  ParamCheck out;
  check_positive(p, out);
  if (!(k1 >= 0.0) || !(k2 >= 0.0))
    out.violations.push_back("K1 >= 0 and K2 >= 0 fails");
  const double lhs = k1 * p.eta / 2.0 + (k2 + 1.0) * p.mu / 2.0;
  if (lhs > p.eps_y)
    out.violations.push_back(ineq("K1*eta/2 + (K2+1)*mu/2 <= eps_y", lhs, p.eps_y));
  if (p.eta / 2.0 > p.theta1) out.violations.push_back(ineq("eta/2 <= theta1", p.eta / 2.0, p.theta1));
  if (p.mu / 2.0 > p.eps_u) out.violations.push_back(ineq("mu/2 <= eps_u", p.mu / 2.0, p.eps_u));
  if (p.eps_u > p.theta2) out.violations.push_back(ineq("eps_u <= theta2", p.eps_u, p.theta2));
  out.ok = out.violations.empty();
  return out;
}

Vec sampled_successor(const ContinuousSystem& sys, const Vec& x, const Vec& u, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("sampled_successor: tau must be positive");
  return integrate(sys, x, u, tau, tau / 100.0);
}

double transition_radius(const IfcBounds& ifc, const AbstractionParams& params) {
  if (params.radius_mode == RadiusMode::kFigure) return params.eta;
  if (!ifc.alpha1 || !ifc.alpha2)
    throw std::invalid_argument("transition_radius: missing completeness bounds");
  return ifc.alpha1(params.theta1, params.tau) + ifc.alpha2(params.theta2, params.tau) +
         params.eta / 2.0;
}

FiniteTransitionSystem build_abstraction(const ContinuousSystem& sys, const IfcBounds& ifc,
                                         const AbstractionParams& params,
                                         AbstractionDiagnostics* diag) {
  const ParamCheck check = sys.measurement_mode() == MeasurementMode::kStateMeasured
                               ? validate_state_measured(params)
                               : validate_output_measured(params, sys.k1(), sys.k2());
  if (!check.ok) {
    std::string msg = "build_abstraction: parameter inequalities violated:";
    for (const auto& v : check.violations) msg += " [" + v + "]";
    throw std::invalid_argument(msg);
  }

  const std::vector<Vec> states = build_grid({params.eta, sys.domain()});
  const std::vector<Vec> inputs = build_grid({params.mu, sys.input_set()});
  if (states.empty()) throw std::invalid_argument("build_abstraction: state grid is empty");
  if (inputs.empty()) throw std::invalid_argument("build_abstraction: input grid is empty");

  const double radius = transition_radius(ifc, params);
  const bool strict = params.radius_mode == RadiusMode::kFigure;
  const int ns = static_cast<int>(states.size());
  const int ni = static_cast<int>(inputs.size());

  std::vector<std::vector<std::vector<int>>> post(
      ns, std::vector<std::vector<int>>(ni));
  std::vector<std::vector<Vec>> measured(ns, std::vector<Vec>(ni));
  std::vector<std::vector<Vec>> system(ns, std::vector<Vec>(ni));

  run_chunked(ns, [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      for (int j = 0; j < ni; ++j) {
        const Vec flow = sampled_successor(sys, states[i], inputs[j], params.tau);
        auto& succ = post[i][j];
        for (int k = 0; k < ns; ++k) {
          const double d = inf_norm(vec_sub(flow, states[k]));
          const bool in = strict ? d < radius * (1.0 - 1e-9) : d <= radius + 1e-12;
          if (in) succ.push_back(k);
        }
        if (sys.measurement_mode() == MeasurementMode::kStateMeasured) {
          measured[i][j] = states[i];
          system[i][j] = sys.output(states[i], inputs[j]);
        } else {
          const Vec hq = quantize(sys.output(states[i], inputs[j]), params.mu);
          measured[i][j] = hq;
          system[i][j] = hq;
        }
      }
    }
  });

  FiniteTransitionSystem ts(params.tau, states, inputs, std::move(post), std::move(measured),
                            std::move(system));
  if (diag) {
    diag->dead_states.clear();
    for (int i = 0; i < ts.num_states(); ++i)
      if (ts.enabled_inputs(i).empty()) diag->dead_states.push_back(i);
  }
  return ts;
}

}  // namespace symdiss
