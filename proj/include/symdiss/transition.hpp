#ifndef SYMDISS_TRANSITION_HPP
#define SYMDISS_TRANSITION_HPP

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "symdiss/linalg.hpp"
#include "symdiss/systems.hpp"

namespace symdiss {

/* snap each coordinate to the nearest multiple of step, ties toward +inf */
Vec quantize(const Vec& x, double step);
double quantize_scalar(double x, double step);

struct GridSpec {
  double step = 0.0;
  Box bounds;
};

/* all grid points k*step inside the box, lexicographic order */
std::vector<Vec> build_grid(const GridSpec& spec);

/* Finite transition system with finitely many states and input labels.
 * post[i][j] lists successor state indices of state i under input j (sorted);
 * both output maps are total, i.e. defined for every (state, input) cell. */
class FiniteTransitionSystem {
 public:
  FiniteTransitionSystem(double tau, std::vector<Vec> states, std::vector<Vec> inputs,
                         std::vector<std::vector<std::vector<int>>> post,
                         std::vector<std::vector<Vec>> measured_output,
                         std::vector<std::vector<Vec>> system_output);

  int num_states() const { return static_cast<int>(states_.size()); }
  int num_inputs() const { return static_cast<int>(inputs_.size()); }
  double tau() const { return tau_; }
  const Vec& state(int i) const { return states_.at(i); }
  const Vec& input(int j) const { return inputs_.at(j); }
  const std::vector<Vec>& states() const { return states_; }
  const std::vector<Vec>& inputs() const { return inputs_; }

  const std::vector<int>& post(int i, int j) const;
  const Vec& measured_output(int i, int j) const;
  const Vec& system_output(int i, int j) const;

  /* inputs enabled at state i, i.e. those with a nonempty successor set */
  const std::vector<int>& enabled_inputs(int i) const { return enabled_.at(i); }

  bool deterministic() const { return deterministic_; }
  int num_transitions() const { return num_transitions_; }

  std::vector<std::vector<std::vector<int>>> post_table() const { return post_; }
  std::vector<std::vector<Vec>> measured_output_table() const { return measured_; }
  std::vector<std::vector<Vec>> system_output_table() const { return system_; }

 private:
  double tau_ = 0.0;
  std::vector<Vec> states_, inputs_;
  std::vector<std::vector<std::vector<int>>> post_;
  std::vector<std::vector<Vec>> measured_, system_;
  std::vector<std::vector<int>> enabled_;
  bool deterministic_ = true;
  int num_transitions_ = 0;
};

/* Graphviz dump, one labeled edge per (state, input, successor) triple */
std::string export_dot(const FiniteTransitionSystem& ts, const std::string& name = "symbolic_model");

nlohmann::json fts_to_json(const FiniteTransitionSystem& ts);
FiniteTransitionSystem fts_from_json(const nlohmann::json& j);

}  // namespace symdiss

#endif
