#ifndef SYMDISS_RELATIONS_HPP
#define SYMDISS_RELATIONS_HPP

#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "symdiss/transition.hpp"

namespace symdiss {

enum class RelationKind { kIos, kIoas };

/* binary relation over state indices of two transition systems; pairs are
 * (state of t1, state of t2), sorted lexicographically */
struct SimRelation {
  RelationKind kind = RelationKind::kIos;
  double eps_u = 0.0;
  double eps_y = 0.0;
  std::vector<std::pair<int, int>> pairs;

  bool contains(int i, int j) const;
};

/* maximal approximate input-output simulation relation of t1 by t2: greatest
 * fixed point of pair deletion.  For every pair (x1,x2) and every enabled u1
 * there must be an enabled u2 with close inputs, close measured outputs, and
 * every u1-successor of x1 matched by some u2-successor of x2. */
SimRelation max_ios_relation(const FiniteTransitionSystem& t1,
                             const FiniteTransitionSystem& t2, double eps_u, double eps_y);

/* alternating variant: the successor obligation of the witness u2 is flipped,
 * every u2-successor of x2 must be matched by some u1-successor of x1; the
 * same u2 still has to satisfy input and output closeness */
SimRelation max_ioas_relation(const FiniteTransitionSystem& t1,
                              const FiniteTransitionSystem& t2, double eps_u, double eps_y);

/* every state of t1 appears in some pair */
bool check_covering(const SimRelation& rel, const FiniteTransitionSystem& t1);

nlohmann::json relation_to_json(const SimRelation& rel);

}  // namespace symdiss

#endif
