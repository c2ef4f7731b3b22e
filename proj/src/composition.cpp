#include "symdiss/composition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace symdiss {

namespace {

constexpr double kEpsSlack = 1e-12;

Vec concat(const Vec& a, const Vec& b) {
  Vec r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

Vec combine_outputs(CompositionOutputMode mode, const Vec& y1, const Vec& y2) {
  if (y1.size() != y2.size())
    throw std::invalid_argument("compose: component output dimensions differ");
  switch (mode) {
    case CompositionOutputMode::kLeft:
      return y1;
    case CompositionOutputMode::kRight:
      return y2;
    case CompositionOutputMode::kAverage:
    default: {
      Vec r(y1.size());
      for (size_t i = 0; i < r.size(); ++i) r[i] = 0.5 * (y1[i] + y2[i]);
      return r;
    }
  }
}

FeedbackRelation build_quadruples(const FiniteTransitionSystem& t1,
                                  const FiniteTransitionSystem& t2, const SimRelation& rel,
                                  double eps_u, double eps_y) {
  FeedbackRelation f;
  f.eps_u = eps_u;
  f.eps_y = eps_y;
  for (const auto& [x2, x1] : rel.pairs) {
    for (int u1 : t1.enabled_inputs(x1)) {
      for (int u2 : t2.enabled_inputs(x2)) {
        if (inf_norm(vec_sub(t1.input(u1), t2.input(u2))) > eps_u + kEpsSlack) continue;
        if (inf_norm(vec_sub(t1.measured_output(x1, u1), t2.measured_output(x2, u2))) >
            eps_y + kEpsSlack)
          continue;
        bool alternating_ok = true;
        for (int s1 : t1.post(x1, u1)) {
          bool matched = false;
          for (int s2 : t2.post(x2, u2)) {
            if (rel.contains(s2, s1)) { matched = true; break; }
          }
          if (!matched) { alternating_ok = false; break; }
        }
        if (alternating_ok) f.quadruples.push_back({x1, x2, u1, u2});
      }
    }
  }
  std::sort(f.quadruples.begin(), f.quadruples.end());
  return f;
}

}  // namespace

FeedbackRelation build_feedback_relation(const FiniteTransitionSystem& t1,
                                         const FiniteTransitionSystem& t2,
                                         const SimRelation& rel, double eps_u, double eps_y) {
  if (std::abs(t1.tau() - t2.tau()) > 1e-12)
    throw std::invalid_argument("build_feedback_relation: mismatched sampling periods");
  if (rel.kind != RelationKind::kIoas)
    throw std::invalid_argument("build_feedback_relation: relation must be alternating (IOAS)");
  for (const auto& [a, b] : rel.pairs)
    if (a < 0 || a >= t2.num_states() || b < 0 || b >= t1.num_states())
      throw std::invalid_argument(
          "build_feedback_relation: relation indices out of range (expect pairs of t2 x t1)");
  return build_quadruples(t1, t2, rel, eps_u, eps_y);
}

ComposedSystem compose(const FiniteTransitionSystem& t1, const FiniteTransitionSystem& t2,
                       const FeedbackRelation& f, CompositionOutputMode mode) {
  ComposedSystem out;
  out.mode = mode;
  out.eps_u = f.eps_u;
  out.eps_y = f.eps_y;
  out.m1 = t1.num_inputs() > 0 ? static_cast<int>(t1.input(0).size()) : 0;
  out.m2 = t2.num_inputs() > 0 ? static_cast<int>(t2.input(0).size()) : 0;

  std::map<std::pair<int, int>, int> state_index;
  for (const auto& quad : f.quadruples) {
    const std::pair<int, int> key{quad.x1, quad.x2};
    if (state_index.emplace(key, 0).second) out.state_pairs.push_back(key);
  }
  std::sort(out.state_pairs.begin(), out.state_pairs.end());
  for (size_t i = 0; i < out.state_pairs.size(); ++i) state_index[out.state_pairs[i]] = static_cast<int>(i);

  if (out.state_pairs.empty()) {
    out.composable = false;
    return out;
  }
  out.composable = true;

  for (int u1 = 0; u1 < t1.num_inputs(); ++u1)
    for (int u2 = 0; u2 < t2.num_inputs(); ++u2)
      if (inf_norm(vec_sub(t1.input(u1), t2.input(u2))) <= f.eps_u + kEpsSlack)
        out.input_pairs.emplace_back(u1, u2);

  const int ns = static_cast<int>(out.state_pairs.size());
  const int ni = static_cast<int>(out.input_pairs.size());
  std::vector<Vec> states(ns), inputs(ni);
  for (int i = 0; i < ns; ++i)
    states[i] = concat(t1.state(out.state_pairs[i].first), t2.state(out.state_pairs[i].second));
  for (int j = 0; j < ni; ++j)
    inputs[j] = concat(t1.input(out.input_pairs[j].first), t2.input(out.input_pairs[j].second));

  std::vector<std::vector<std::vector<int>>> post(ns, std::vector<std::vector<int>>(ni));
  std::vector<std::vector<Vec>> measured(ns, std::vector<Vec>(ni));
  std::vector<std::vector<Vec>> system(ns, std::vector<Vec>(ni));

  for (int i = 0; i < ns; ++i) {
    const auto [x1, x2] = out.state_pairs[i];
    for (int j = 0; j < ni; ++j) {
      const auto [u1, u2] = out.input_pairs[j];
      measured[i][j] = combine_outputs(mode, t1.measured_output(x1, u1),
                                       t2.measured_output(x2, u2));
      system[i][j] = combine_outputs(mode, t1.system_output(x1, u1),
                                     t2.system_output(x2, u2));
      if (!std::binary_search(f.quadruples.begin(), f.quadruples.end(),
                              FeedbackQuadruple{x1, x2, u1, u2}))
        continue;
      for (int s1 : t1.post(x1, u1))
        for (int s2 : t2.post(x2, u2)) {
          const auto it = state_index.find({s1, s2});
          if (it != state_index.end()) post[i][j].push_back(it->second);
        }
    }
  }

  out.fts.emplace(t1.tau(), std::move(states), std::move(inputs), std::move(post),
                  std::move(measured), std::move(system));
  return out;
}

namespace {

/* view of the composed system whose input payloads are one component's inputs */
FiniteTransitionSystem input_projection(const ComposedSystem& comp,
                                        const FiniteTransitionSystem& t1,
                                        const FiniteTransitionSystem& t2, bool first) {
  const FiniteTransitionSystem& fts = *comp.fts;
  std::vector<Vec> inputs(comp.input_pairs.size());
  for (size_t j = 0; j < comp.input_pairs.size(); ++j)
    inputs[j] = first ? t1.input(comp.input_pairs[j].first)
                      : t2.input(comp.input_pairs[j].second);
  return FiniteTransitionSystem(fts.tau(), fts.states(), std::move(inputs), fts.post_table(),
                                fts.measured_output_table(), fts.system_output_table());
}

}  // namespace

bool check_prop_5_2(const ComposedSystem& composed, const FiniteTransitionSystem& t1,
                    const FiniteTransitionSystem& t2, CompositionOutputMode mode) {
  if (!composed.composable || !composed.fts) return false;
  const double eps_y_eff =
      mode == CompositionOutputMode::kAverage ? composed.eps_y / 2.0 : composed.eps_y;

  const FiniteTransitionSystem view1 = input_projection(composed, t1, t2, true);
  const SimRelation rel1 = max_ios_relation(view1, t1, composed.eps_u, eps_y_eff);
  if (!check_covering(rel1, view1)) return false;

  const FiniteTransitionSystem view2 = input_projection(composed, t1, t2, false);
  const SimRelation rel2 = max_ios_relation(view2, t2, composed.eps_u, eps_y_eff);
  return check_covering(rel2, view2);
}

TransferCheck composition_qsr(const QsrTriple& qsr1, const TransferConstants& zeta,
                              const QsrTriple& qsr12_candidate) {
  return transfer_qsr_from_abstraction(qsr1, zeta, qsr12_candidate);
}

}  // namespace symdiss
