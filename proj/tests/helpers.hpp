#ifndef SYMDISS_TESTS_HELPERS_HPP
#define SYMDISS_TESTS_HELPERS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "symdiss/relations.hpp"
#include "symdiss/transition.hpp"

namespace symdiss::testing {

/* random transition system with scalar payloads on a 0.1 grid; posts may be
 * empty (disabled input), outputs are grid multiples in [-0.2, 0.2] */
inline FiniteTransitionSystem random_fts(std::mt19937& rng, int max_states, int max_inputs,
                                         double empty_post_prob = 0.15) {
  std::uniform_int_distribution<int> nstates(2, max_states);
  std::uniform_int_distribution<int> ninputs(1, max_inputs);
  const int n = nstates(rng);
  const int m = ninputs(rng);

  std::vector<Vec> states, inputs;
  for (int i = 0; i < n; ++i) states.push_back({0.1 * i});
  for (int j = 0; j < m; ++j) inputs.push_back({0.1 * j});

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> state_pick(0, n - 1);
  std::uniform_int_distribution<int> out_pick(-2, 2);
  std::uniform_int_distribution<int> count_pick(1, std::min(3, n));

  std::vector<std::vector<std::vector<int>>> post(n, std::vector<std::vector<int>>(m));
  std::vector<std::vector<Vec>> measured(n, std::vector<Vec>(m));
  std::vector<std::vector<Vec>> system(n, std::vector<Vec>(m));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (unit(rng) >= empty_post_prob) {
        std::set<int> succ;
        const int count = count_pick(rng);
        for (int k = 0; k < count; ++k) succ.insert(state_pick(rng));
        post[i][j].assign(succ.begin(), succ.end());
      }
      const double y = 0.1 * out_pick(rng);
      measured[i][j] = {y};
      system[i][j] = {y};
    }
  }
  return FiniteTransitionSystem(0.2, std::move(states), std::move(inputs), std::move(post),
                                std::move(measured), std::move(system));
}

/* brute-force maximal relation: enumerate every subset of X1 x X2, keep the
 * self-consistent ones, return their union.  Needs |X1|*|X2| <= 20 or so. */
inline std::vector<std::pair<int, int>> exhaustive_relation_oracle(
    const FiniteTransitionSystem& t1, const FiniteTransitionSystem& t2, RelationKind kind,
    double eps_u, double eps_y) {
  const int n1 = t1.num_states();
  const int n2 = t2.num_states();
  const int bits = n1 * n2;
  auto bit = [&](int i, int j) { return std::uint32_t{1} << (i * n2 + j); };

  /* per pair and enabled u1: every candidate u2 carries the successor masks
   * that all have to intersect the relation */
  struct Candidate {
    std::vector<std::uint32_t> masks;
  };
  std::vector<std::vector<std::vector<Candidate>>> table(bits);
  std::uint32_t dead = 0;
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      auto& cell = table[i * n2 + j];
      for (int u1 : t1.enabled_inputs(i)) {
        std::vector<Candidate> cands;
        for (int u2 : t2.enabled_inputs(j)) {
          if (inf_norm(vec_sub(t1.input(u1), t2.input(u2))) > eps_u) continue;
          if (inf_norm(vec_sub(t1.measured_output(i, u1), t2.measured_output(j, u2))) > eps_y)
            continue;
          Candidate cand;
          bool feasible = true;
          if (kind == RelationKind::kIos) {
            for (int s1 : t1.post(i, u1)) {
              std::uint32_t mask = 0;
              for (int s2 : t2.post(j, u2)) mask |= bit(s1, s2);
              if (mask == 0) feasible = false;
              cand.masks.push_back(mask);
            }
          } else {
            for (int s2 : t2.post(j, u2)) {
              std::uint32_t mask = 0;
              for (int s1 : t1.post(i, u1)) mask |= bit(s1, s2);
              if (mask == 0) feasible = false;
              cand.masks.push_back(mask);
            }
          }
          if (feasible) cands.push_back(std::move(cand));
        }
        if (cands.empty()) dead |= bit(i, j);
        cell.push_back(std::move(cands));
      }
    }
  }

  std::uint32_t found = 0;
  const std::uint64_t total = std::uint64_t{1} << bits;
  for (std::uint64_t r = 1; r < total; ++r) {
    if (r & dead) continue;
    if ((r | found) == found) continue;
    bool valid = true;
    for (int b = 0; b < bits && valid; ++b) {
      if (!(r & (std::uint64_t{1} << b))) continue;
      for (const auto& cands : table[b]) {
        bool witness = false;
        for (const auto& cand : cands) {
          bool all = true;
          for (std::uint32_t mask : cand.masks) {
            if (!(r & mask)) {
              all = false;
              break;
            }
          }
          if (all) {
            witness = true;
            break;
          }
        }
        if (!witness) {
          valid = false;
          break;
        }
      }
    }
    if (valid) found |= static_cast<std::uint32_t>(r);
  }

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      if (found & bit(i, j)) pairs.emplace_back(i, j);
  return pairs;
}

/* closed-form sampled successor of dx/dt = -x + u under constant input */
inline double scalar_model_flow(double x, double u, double tau) {
  const double decay = std::exp(-tau);
  return decay * x + (1.0 - decay) * u;
}

/* frozen edge set of the strict-radius scalar model on state grid
 * {-0.2,...,0.2} (indices 0..4) and input grid {-0.1,0,0.1} (indices 0..2) */
inline std::vector<std::array<int, 3>> scalar_model_edges() {
  return {
      {0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 1}, {0, 2, 0}, {0, 2, 1},
      {1, 0, 1}, {1, 1, 1}, {1, 1, 2}, {1, 2, 1}, {1, 2, 2},
      {2, 0, 1}, {2, 0, 2}, {2, 1, 2}, {2, 2, 2}, {2, 2, 3},
      {3, 0, 2}, {3, 0, 3}, {3, 1, 2}, {3, 1, 3}, {3, 2, 3},
      {4, 0, 3}, {4, 0, 4}, {4, 1, 3}, {4, 1, 4}, {4, 2, 3}, {4, 2, 4},
  };
}

inline std::vector<std::array<int, 3>> edge_list(const FiniteTransitionSystem& ts) {
  std::vector<std::array<int, 3>> edges;
  for (int i = 0; i < ts.num_states(); ++i)
    for (int j = 0; j < ts.num_inputs(); ++j)
      for (int k : ts.post(i, j)) edges.push_back({i, j, k});
  return edges;
}

/* same system with one successor of cell (i, j) redirected to new_state */
inline FiniteTransitionSystem redirect_successor(const FiniteTransitionSystem& ts, int i,
                                                 int j, int slot, int new_state) {
  auto post = ts.post_table();
  post[i][j][static_cast<size_t>(slot)] = new_state;
  return FiniteTransitionSystem(ts.tau(), ts.states(), ts.inputs(), std::move(post),
                                ts.measured_output_table(), ts.system_output_table());
}

}  // namespace symdiss::testing

#endif
