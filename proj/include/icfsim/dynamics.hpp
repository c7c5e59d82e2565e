#pragma once
// Stochastic event loop: random user activation, deliberate selection with
// frequency phi, recommendation following otherwise, constant-degree
// turnover.
//
// RNG order per run (one stream, seeded from (master_seed, instance_index)):
//   1. synthetic start state (tastes, then initial collections, user order)
//   2. per step: activation draw, channel draw, [taste draw in two-taste
//      selections], item draw (selection) or tie-break draw (recommendation),
//      removal-victim draw
//   3. estimated-AUC probe draws after the last step
// Shadow omega probes draw from an independent tagged stream and never touch
// the run stream, so measurement cannot perturb the trajectory.

#include <functional>
#include <ostream>

#include "icfsim/config.hpp"
#include "icfsim/events.hpp"
#include "icfsim/metrics.hpp"
#include "icfsim/recommender.hpp"
#include "icfsim/rng.hpp"
#include "icfsim/world.hpp"

namespace icfsim {

// Non-model observation hooks; they must not consume the run stream.
struct RunHooks {
  std::function<void(long step, const StepOutcome&)> on_step;   // per-event trace
  std::function<void(const BipartiteState&)> on_finish;         // final snapshot
  long dump_scores_step = -1;
  int dump_scores_user = -1;
  std::ostream* dump_scores_out = nullptr;
};

// One activation of `user`: acquire through selection (prob phi) or
// recommendation, then remove one uniformly chosen pre-acquisition item, so
// the collection size is unchanged. Selection with no un-collected item of
// the drawn taste falls back to the full catalog and flags the outcome.
StepOutcome step(BipartiteState& state, const TasteMap& tastes, int user,
                 const WorldConfig& config, SplitMix64& rng, ScoreScratch& scratch);
StepOutcome step(BipartiteState& state, const TasteMap& tastes, int user,
                 const WorldConfig& config, SplitMix64& rng);

// Full synthetic run: n_users * updates_per_user steps, omega over the
// post-burn-in window, both AUC measures on the final snapshot.
// Deterministic given (config, master_seed, instance_index).
MetricsReport run(const WorldConfig& config, const RunHooks* hooks = nullptr);

// Stream tag for shadow omega probes (documented constant, see header note).
inline constexpr std::uint64_t kShadowStreamTag = 0x73686164;

}  // namespace icfsim
