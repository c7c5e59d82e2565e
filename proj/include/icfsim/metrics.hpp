#pragma once
// Accuracy measures: the matching fraction omega, its taste-1 share in
// two-taste mode, the real AUC over taste-matching items and the probe-based
// estimated AUC.

#include <cstdint>
#include <span>
#include <vector>

#include "icfsim/config.hpp"
#include "icfsim/events.hpp"
#include "icfsim/recommender.hpp"
#include "icfsim/rng.hpp"
#include "icfsim/world.hpp"

namespace icfsim {

struct MetricsReport {
  WorldConfig config;

  double omega = 0.0;
  bool omega_defined = false;  // false when no measured recommendation events
  double omega1 = 0.0;
  bool omega1_defined = false;  // two-taste mode only

  double auc_real = 0.0;
  double auc_est = 0.0;

  long rec_events = 0;  // recommendation acquisitions inside the window
  long sel_events = 0;  // selection acquisitions inside the window
  long shadow_events = 0;
  long fallback_events = 0;  // whole-run selection fallbacks
  long skipped_events = 0;   // whole-run replay skips
  long auc_real_skipped_users = 0;
  long auc_est_skipped_users = 0;
};

// Event counters; omega is a pure function of these.
struct OmegaAccumulator {
  long rec_events = 0;
  long rec_match = 0;
  long rec_taste1 = 0;
  long sel_events = 0;
  long fallback_events = 0;
  long skipped_events = 0;
  long shadow_events = 0;
  long shadow_match = 0;
  long shadow_taste1 = 0;

  void add(const StepOutcome& out, bool in_window) {
    if (out.fallback) ++fallback_events;
    if (out.skipped) {
      ++skipped_events;
      return;
    }
    if (!in_window) return;
    if (out.channel == Channel::Recommendation) {
      ++rec_events;
      if (out.match) ++rec_match;
      if (out.taste1) ++rec_taste1;
    } else {
      ++sel_events;
    }
  }

  void add_shadow(bool match, bool taste1) {
    ++shadow_events;
    if (match) ++shadow_match;
    if (taste1) ++shadow_taste1;
  }

  // source picks which event family defines omega / omega1.
  void fill(MetricsReport& report, OmegaSource source, bool two_taste) const;
};

// Recounts omega (and omega1) from a persisted outcome stream; events with
// step index < window_begin are ignored.
OmegaAccumulator accumulate_omega(std::span<const StepOutcome> outcomes, long window_begin);

// Rank-based accuracy of one correct candidate among all candidates:
// (n_strictly_lower + 0.5 * n_ties) / n_candidates, the correct item itself
// excluded from both counts. Throws on an empty candidate set.
double auc_for_item(std::span<const double> candidate_scores, int correct_idx);

// Mean auc_for_item over every (user, un-collected correct item) pair.
// correct_mask is an n_users x n_items row-major 0/1 table; `users` restricts
// evaluation to a subset (nullptr = all). Users without an un-collected
// correct item are skipped and counted.
double auc_real(const BipartiteState& state, const std::vector<std::uint8_t>& correct_mask,
                const RecommenderConfig& config, const std::vector<std::int32_t>* users,
                long* skipped_users);

// Probe-based estimate: per repetition one uniformly drawn edge per evaluated
// user is withheld, similarity structures are rebuilt from the training
// adjacency (or reused live when reuse_similarity is set), and the probe item
// is ranked against all items outside the user's training collection. Probe
// draws consume `rng` user-by-user in ascending order within each repetition.
// The live state is left untouched. Users with degree < 2 are skipped.
double auc_est(const BipartiteState& state, const RecommenderConfig& config, SplitMix64& rng,
               int repetitions, bool reuse_similarity, const std::vector<std::int32_t>* users,
               long* skipped_users);

}  // namespace icfsim
