#ifndef SYMDISS_COMPOSITION_HPP
#define SYMDISS_COMPOSITION_HPP

#include <optional>
#include <utility>
#include <vector>

#include "symdiss/dissipativity.hpp"
#include "symdiss/relations.hpp"
#include "symdiss/transition.hpp"

namespace symdiss {

struct FeedbackQuadruple {
  int x1 = 0, x2 = 0, u1 = 0, u2 = 0;
  auto operator<=>(const FeedbackQuadruple&) const = default;
};

/* joint moves extracted from an alternating simulation of t1 by t2:
 * (x2,x1) in rel, both inputs enabled, inputs within eps_u, measured outputs
 * within eps_y, and every u1-successor of x1 answered by a u2-successor of x2
 * staying inside rel */
struct FeedbackRelation {
  double eps_u = 0.0;
  double eps_y = 0.0;
  std::vector<FeedbackQuadruple> quadruples;
};

/* rel must come from max_ioas_relation(t2, t1), i.e. pairs (t2 state, t1 state) */
FeedbackRelation build_feedback_relation(const FiniteTransitionSystem& t1,
                                         const FiniteTransitionSystem& t2,
                                         const SimRelation& rel, double eps_u, double eps_y);

enum class CompositionOutputMode { kAverage, kLeft, kRight };

struct ComposedSystem {
  bool composable = false;
  CompositionOutputMode mode = CompositionOutputMode::kAverage;
  double eps_u = 0.0;
  double eps_y = 0.0;
  std::optional<FiniteTransitionSystem> fts;      /* states/inputs are concatenated pairs */
  std::vector<std::pair<int, int>> state_pairs;   /* composed idx -> (t1 idx, t2 idx) */
  std::vector<std::pair<int, int>> input_pairs;   /* composed idx -> (t1 idx, t2 idx) */
  int m1 = 0;                                     /* input dimension of t1 payloads */
  int m2 = 0;
};

/* feedback composition over F; a transition exists iff both component
 * transitions exist, the quadruple is in F, and the successor pair is again a
 * composed state; empty state set means "not composable", not an error */
ComposedSystem compose(const FiniteTransitionSystem& t1, const FiniteTransitionSystem& t2,
                       const FeedbackRelation& f, CompositionOutputMode mode);

/* the composed system approximately simulates into both components: checks
 * max_ios_relation(composed -> t1) and (composed -> t2) with covering, at
 * precision eps_y/2 for Average mode and eps_y for Left/Right */
bool check_prop_5_2(const ComposedSystem& composed, const FiniteTransitionSystem& t1,
                    const FiniteTransitionSystem& t2, CompositionOutputMode mode);

/* transfer check for the composed supply rate, same mechanics as
 * transfer_qsr_from_abstraction with qsr1 as the known side */
TransferCheck composition_qsr(const QsrTriple& qsr1, const TransferConstants& zeta,
                              const QsrTriple& qsr12_candidate);

}  // namespace symdiss

#endif
