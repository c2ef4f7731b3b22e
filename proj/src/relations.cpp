#include "symdiss/relations.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace symdiss {

bool SimRelation::contains(int i, int j) const {
  return std::binary_search(pairs.begin(), pairs.end(), std::make_pair(i, j));
}

namespace {

constexpr double kEpsSlack = 1e-12;

bool pair_survives(const FiniteTransitionSystem& t1, const FiniteTransitionSystem& t2,
                   int x1, int x2, double eps_u, double eps_y, RelationKind kind,
                   const std::vector<char>& prev, int n2) {
  for (int u1 : t1.enabled_inputs(x1)) {
    bool witnessed = false;
    for (int u2 : t2.enabled_inputs(x2)) {
      if (inf_norm(vec_sub(t1.input(u1), t2.input(u2))) > eps_u + kEpsSlack) continue;
      if (inf_norm(vec_sub(t1.measured_output(x1, u1), t2.measured_output(x2, u2))) >
          eps_y + kEpsSlack)
        continue;
      bool succ_ok = true;
      if (kind == RelationKind::kIos) {
        for (int s1 : t1.post(x1, u1)) {
          bool matched = false;
          for (int s2 : t2.post(x2, u2)) {
            if (prev[static_cast<size_t>(s1) * n2 + s2]) { matched = true; break; }
          }
          if (!matched) { succ_ok = false; break; }
        }
      } else {
        for (int s2 : t2.post(x2, u2)) {
          bool matched = false;
          for (int s1 : t1.post(x1, u1)) {
            if (prev[static_cast<size_t>(s1) * n2 + s2]) { matched = true; break; }
          }
          if (!matched) { succ_ok = false; break; }
        }
      }
      if (succ_ok) { witnessed = true; break; }
    }
    if (!witnessed) return false;
  }
  return true;
}

SimRelation max_relation(const FiniteTransitionSystem& t1, const FiniteTransitionSystem& t2,
                         double eps_u, double eps_y, RelationKind kind) {
  if (std::abs(t1.tau() - t2.tau()) > 1e-12)
    throw std::invalid_argument("max_relation: mismatched sampling periods");
  if (!(eps_u >= 0.0) || !(eps_y >= 0.0))
    throw std::invalid_argument("max_relation: precisions must be nonnegative");
  const int n1 = t1.num_states();
  const int n2 = t2.num_states();
  std::vector<char> rel(static_cast<size_t>(n1) * n2, 1);

  bool changed = true;
  while (changed) {
    changed = false;
    const std::vector<char> prev = rel;
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) {
        const size_t idx = static_cast<size_t>(i) * n2 + j;
        if (!prev[idx]) continue;
        if (!pair_survives(t1, t2, i, j, eps_u, eps_y, kind, prev, n2)) {
          rel[idx] = 0;
          changed = true;
        }
      }
  }

  SimRelation out;
  out.kind = kind;
  out.eps_u = eps_u;
  out.eps_y = eps_y;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      if (rel[static_cast<size_t>(i) * n2 + j]) out.pairs.emplace_back(i, j);
  return out;
}

}  // namespace

SimRelation max_ios_relation(const FiniteTransitionSystem& t1, const FiniteTransitionSystem& t2,
                             double eps_u, double eps_y) {
  return max_relation(t1, t2, eps_u, eps_y, RelationKind::kIos);
}

SimRelation max_ioas_relation(const FiniteTransitionSystem& t1, const FiniteTransitionSystem& t2,
                              double eps_u, double eps_y) {
  return max_relation(t1, t2, eps_u, eps_y, RelationKind::kIoas);
}

bool check_covering(const SimRelation& rel, const FiniteTransitionSystem& t1) {
  std::vector<char> seen(t1.num_states(), 0);
  for (const auto& [i, j] : rel.pairs)
    if (i >= 0 && i < t1.num_states()) seen[i] = 1;
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

nlohmann::json relation_to_json(const SimRelation& rel) {
  nlohmann::json j;
  j["kind"] = rel.kind == RelationKind::kIos ? "ios" : "ioas";
  j["eps_u"] = rel.eps_u;
  j["eps_y"] = rel.eps_y;
  j["pairs"] = nlohmann::json::array();
  for (const auto& [a, b] : rel.pairs) j["pairs"].push_back({a, b});
  return j;
}

}  // namespace symdiss
