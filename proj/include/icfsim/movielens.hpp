#pragma once
// Empirical-dataset replay: parse a ratings file in the MovieLens-100K
// `user<TAB>item<TAB>rating<TAB>timestamp` layout and drive the turnover
// dynamics over it. A movie counts as correct for a user iff that user rated
// it 3 or higher.

#include <istream>
#include <string>
#include <unordered_map>
#include <vector>

#include "icfsim/config.hpp"
#include "icfsim/dynamics.hpp"
#include "icfsim/events.hpp"
#include "icfsim/metrics.hpp"
#include "icfsim/rng.hpp"
#include "icfsim/world.hpp"

namespace icfsim {

struct RatingsTable {
  int n_users = 0;
  int n_items = 0;
  std::vector<std::vector<std::int32_t>> rated;    // R_i in first-appearance order
  std::vector<std::vector<std::int32_t>> correct;  // Q_i = items rated >= 3
  std::vector<std::int64_t> user_ids;              // dense -> external
  std::vector<std::int64_t> item_ids;
  std::unordered_map<std::int64_t, std::int32_t> user_index;  // external -> dense
  std::unordered_map<std::int64_t, std::int32_t> item_index;
  long duplicate_pairs = 0;  // repeated (user, item) rows; the last rating wins
};

// Throws on an unreadable file, a malformed line (the message carries the
// line number) or zero valid rows. Dense ids follow first appearance.
RatingsTable parse_ratings(const std::string& path);
RatingsTable parse_ratings(std::istream& in, const std::string& name);

struct ReplayInit {
  BipartiteState state;
  std::vector<std::uint8_t> correct_mask;    // n_users x n_items
  std::vector<std::uint8_t> eligible_mask;   // per user: |Q_i| >= 2
  std::vector<std::int32_t> eligible_users;
};

// Eligible users start with k_i - 1 of their rated movies, re-drawn until at
// least one correct movie is un-collected; ineligible users hold their full
// rated set, contribute co-occurrence evidence, but are never activated or
// measured. Per-user draws consume `rng` in ascending user order.
ReplayInit init_replay(const RatingsTable& table, const WorldConfig& config, SplitMix64& rng);

// Replay step: deliberate selection picks uniformly among un-collected
// correct movies (no such movie: the event is skipped outright);
// recommendation scans the full catalog. Turnover as in the synthetic model.
StepOutcome replay_step(BipartiteState& state, const RatingsTable& table,
                        const std::vector<std::uint8_t>& correct_mask, int user,
                        const WorldConfig& config, SplitMix64& rng, ScoreScratch& scratch);

// Full replay run over eligible users: n_eligible * updates_per_user steps.
MetricsReport run_replay(const WorldConfig& config, const RatingsTable& table,
                         const RunHooks* hooks = nullptr);

}  // namespace icfsim
