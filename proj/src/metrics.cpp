#include "icfsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace icfsim {

void OmegaAccumulator::fill(MetricsReport& report, OmegaSource source, bool two_taste) const {
  const long events = source == OmegaSource::Shadow ? shadow_events : rec_events;
  const long match = source == OmegaSource::Shadow ? shadow_match : rec_match;
  const long t1 = source == OmegaSource::Shadow ? shadow_taste1 : rec_taste1;
  report.rec_events = rec_events;
  report.sel_events = sel_events;
  report.shadow_events = shadow_events;
  report.fallback_events = fallback_events;
  report.skipped_events = skipped_events;
  if (events > 0) {
    report.omega = static_cast<double>(match) / static_cast<double>(events);
    report.omega_defined = true;
    if (two_taste) {
      report.omega1 = static_cast<double>(t1) / static_cast<double>(events);
      report.omega1_defined = true;
    }
  }
}

OmegaAccumulator accumulate_omega(std::span<const StepOutcome> outcomes, long window_begin) {
  OmegaAccumulator acc;
  long idx = 0;
  for (const StepOutcome& out : outcomes) {
    acc.add(out, idx >= window_begin);
    ++idx;
  }
  return acc;
}

double auc_for_item(std::span<const double> candidate_scores, int correct_idx) {
  if (candidate_scores.empty()) throw std::logic_error("auc_for_item: empty candidate set");
  const double correct = candidate_scores[correct_idx];
  long lower = 0, ties = 0;
  for (int i = 0; i < static_cast<int>(candidate_scores.size()); ++i) {
    if (i == correct_idx) continue;
    if (candidate_scores[i] < correct)
      ++lower;
    else if (candidate_scores[i] == correct)
      ++ties;
  }
  return (static_cast<double>(lower) + 0.5 * static_cast<double>(ties)) /
         static_cast<double>(candidate_scores.size());
}

namespace {

// Rank counts against a sorted score array; same comparisons as the direct
// count in auc_for_item.
double auc_from_sorted(const std::vector<double>& sorted, double correct_score) {
  const auto lo = std::lower_bound(sorted.begin(), sorted.end(), correct_score);
  const auto hi = std::upper_bound(lo, sorted.end(), correct_score);
  const long lower = static_cast<long>(lo - sorted.begin());
  const long ties = static_cast<long>(hi - lo) - 1;  // minus the correct item itself
  return (static_cast<double>(lower) + 0.5 * static_cast<double>(ties)) /
         static_cast<double>(sorted.size());
}

struct TrainingBundle {
  PairCounts<std::int32_t> cooc;
  std::vector<double> inv_sqrt_degree;
  PairCounts<double> weighted_cooc;
  std::vector<double> weighted_inv_sqrt_degree;
  bool weighted = false;

  SimilarityStats stats() const {
    SimilarityStats s;
    s.n_items = static_cast<int>(inv_sqrt_degree.size());
    s.cooc = &cooc;
    s.inv_sqrt_degree = inv_sqrt_degree.data();
    if (weighted) {
      s.weighted_cooc = &weighted_cooc;
      s.weighted_inv_sqrt_degree = weighted_inv_sqrt_degree.data();
    }
    return s;
  }
};

// Full recomputation of similarity structures with one probe edge per user
// removed (probe[u] < 0 keeps user u complete).
TrainingBundle build_training(const BipartiteState& state, const std::vector<std::int32_t>& probe,
                              const RecommenderConfig& config) {
  const int m = state.n_items();
  TrainingBundle t;
  t.weighted = state.weighted();
  t.cooc = PairCounts<std::int32_t>(m, state.cooc().is_dense());
  std::vector<std::int32_t> degree(static_cast<std::size_t>(m), 0);
  std::vector<double> wdegree;
  if (t.weighted) {
    t.weighted_cooc = PairCounts<double>(m, state.weighted_cooc().is_dense());
    wdegree.assign(static_cast<std::size_t>(m), 0.0);
  }
  const double b = config.bias_b;
  std::vector<Edge> train;
  for (int u = 0; u < state.n_users(); ++u) {
    train.clear();
    for (const Edge& e : state.collection(u))
      if (e.item != probe[u]) train.push_back(e);
    for (std::size_t i = 0; i < train.size(); ++i) {
      ++degree[train[i].item];
      const double wi = train[i].prov == Provenance::ViaSelection ? b : 1.0;
      if (t.weighted) wdegree[train[i].item] += wi;
      for (std::size_t j = i + 1; j < train.size(); ++j) {
        t.cooc.add(train[i].item, train[j].item, 1);
        if (t.weighted) {
          const double wj = train[j].prov == Provenance::ViaSelection ? b : 1.0;
          t.weighted_cooc.add(train[i].item, train[j].item, wi * wj);
        }
      }
    }
  }
  t.inv_sqrt_degree.assign(static_cast<std::size_t>(m), 0.0);
  for (int a = 0; a < m; ++a)
    if (degree[a] > 0) t.inv_sqrt_degree[a] = 1.0 / std::sqrt(static_cast<double>(degree[a]));
  if (t.weighted) {
    t.weighted_inv_sqrt_degree.assign(static_cast<std::size_t>(m), 0.0);
    for (int a = 0; a < m; ++a)
      if (wdegree[a] > 0.0) t.weighted_inv_sqrt_degree[a] = 1.0 / std::sqrt(wdegree[a]);
  }
  return t;
}

}  // namespace

double auc_real(const BipartiteState& state, const std::vector<std::uint8_t>& correct_mask,
                const RecommenderConfig& config, const std::vector<std::int32_t>* users,
                long* skipped_users) {
  const int m = state.n_items();
  const SimilarityStats stats = stats_of(state);
  ScoreScratch scratch;
  std::vector<double> sorted;
  std::vector<double> correct_scores;
  double sum = 0.0;
  long pairs = 0;
  long skipped = 0;

  std::vector<std::int32_t> all;
  if (users == nullptr) {
    all.resize(static_cast<std::size_t>(state.n_users()));
    for (int u = 0; u < state.n_users(); ++u) all[u] = u;
    users = &all;
  }
  for (const std::int32_t u : *users) {
    const std::uint8_t* held = state.membership_row(u);
    const std::uint8_t* correct = correct_mask.data() + static_cast<std::size_t>(u) * m;
    score_profile(stats, state.collection(u), config, scratch);
    sorted.clear();
    correct_scores.clear();
    for (int a = 0; a < m; ++a) {
      if (held[a]) continue;
      sorted.push_back(scratch.scores[a]);
      if (correct[a]) correct_scores.push_back(scratch.scores[a]);
    }
    if (correct_scores.empty()) {
      ++skipped;
      continue;
    }
    std::sort(sorted.begin(), sorted.end());
    for (const double cs : correct_scores) {
      sum += auc_from_sorted(sorted, cs);
      ++pairs;
    }
  }
  if (skipped_users != nullptr) *skipped_users = skipped;
  return pairs > 0 ? sum / static_cast<double>(pairs) : std::nan("");
}

double auc_est(const BipartiteState& state, const RecommenderConfig& config, SplitMix64& rng,
               int repetitions, bool reuse_similarity, const std::vector<std::int32_t>* users,
               long* skipped_users) {
  const int m = state.n_items();
  std::vector<std::int32_t> evaluated;
  long skipped = 0;
  if (users == nullptr) {
    for (int u = 0; u < state.n_users(); ++u)
      if (state.collection(u).size() >= 2)
        evaluated.push_back(u);
      else
        ++skipped;
  } else {
    for (const std::int32_t u : *users)
      if (state.collection(u).size() >= 2)
        evaluated.push_back(u);
      else
        ++skipped;
  }
  if (skipped_users != nullptr) *skipped_users = skipped;
  if (evaluated.empty()) return std::nan("");

  ScoreScratch scratch;
  std::vector<double> sorted;
  std::vector<Edge> train;
  std::vector<std::int32_t> probe(static_cast<std::size_t>(state.n_users()), -1);
  double sum = 0.0;
  long samples = 0;

  for (int rep = 0; rep < repetitions; ++rep) {
    std::fill(probe.begin(), probe.end(), -1);
    for (const std::int32_t u : evaluated) {
      const auto coll = state.collection(u);
      probe[u] = coll[rng.uniform_index(coll.size())].item;
    }
    TrainingBundle training;
    SimilarityStats stats;
    if (reuse_similarity) {
      stats = stats_of(state);
    } else {
      training = build_training(state, probe, config);
      stats = training.stats();
    }
    for (const std::int32_t u : evaluated) {
      train.clear();
      for (const Edge& e : state.collection(u))
        if (e.item != probe[u]) train.push_back(e);
      score_profile(stats, train, config, scratch);
      // candidates: every item outside the training collection (probe included)
      const std::uint8_t* held = state.membership_row(u);
      sorted.clear();
      for (int a = 0; a < m; ++a)
        if (!held[a] || a == probe[u]) sorted.push_back(scratch.scores[a]);
      const double correct_score = scratch.scores[probe[u]];
      std::sort(sorted.begin(), sorted.end());
      sum += auc_from_sorted(sorted, correct_score);
      ++samples;
    }
  }
  return sum / static_cast<double>(samples);
}

}  // namespace icfsim
