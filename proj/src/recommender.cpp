#include "icfsim/recommender.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace icfsim {

SimilarityStats stats_of(const BipartiteState& state) {
  SimilarityStats s;
  s.n_items = state.n_items();
  s.cooc = &state.cooc();
  s.inv_sqrt_degree = state.inv_sqrt_degree_data();
  if (state.weighted()) {
    s.weighted_cooc = &state.weighted_cooc();
    s.weighted_inv_sqrt_degree = state.weighted_inv_sqrt_degree_data();
  }
  return s;
}

namespace {

bool everywhere_bias(const RecommenderConfig& c) {
  return c.bias_b != 1.0 && c.bias_scope == BiasScope::Everywhere;
}

double profile_weight(const RecommenderConfig& c, Provenance p) {
  return (c.bias_b != 1.0 && p == Provenance::ViaSelection) ? c.bias_b : 1.0;
}

}  // namespace

double similarity(const SimilarityStats& stats, int item_a, int item_b,
                  const RecommenderConfig& config) {
  if (item_a == item_b) throw std::logic_error("similarity: self-similarity is never consumed");
  if (everywhere_bias(config)) {
    if (stats.weighted_cooc == nullptr)
      throw std::logic_error("similarity: Everywhere bias needs a weighted state");
    const double c = stats.weighted_cooc->get(item_a, item_b);
    if (config.similarity == Similarity::CommonNeighbor) return c;
    return c * stats.weighted_inv_sqrt_degree[item_a] * stats.weighted_inv_sqrt_degree[item_b];
  }
  const double c = static_cast<double>(stats.cooc->get(item_a, item_b));
  if (config.similarity == Similarity::CommonNeighbor) return c;
  return c * stats.inv_sqrt_degree[item_a] * stats.inv_sqrt_degree[item_b];
}

double similarity(const BipartiteState& state, int item_a, int item_b,
                  const RecommenderConfig& config) {
  return similarity(stats_of(state), item_a, item_b, config);
}

void score_profile(const SimilarityStats& stats, std::span<const Edge> profile,
                   const RecommenderConfig& config, ScoreScratch& scratch) {
  const int m = stats.n_items;
  scratch.scores.assign(static_cast<std::size_t>(m), 0.0);
  if (profile.empty()) return;

  const bool biased = config.bias_b != 1.0;
  const double b = config.bias_b;

  if (everywhere_bias(config)) {
    if (stats.weighted_cooc == nullptr)
      throw std::logic_error("score_profile: Everywhere bias needs a weighted state");
    auto& acc = scratch.acc_real;
    acc.assign(static_cast<std::size_t>(m), 0.0);
    const bool cosine = config.similarity == Similarity::Cosine;
    for (const Edge& e : profile) {
      double coeff = profile_weight(config, e.prov);
      if (cosine) coeff *= stats.weighted_inv_sqrt_degree[e.item];
      if (stats.weighted_cooc->is_dense()) {
        const double* row = stats.weighted_cooc->row(e.item);
        for (int a = 0; a < m; ++a) acc[a] += coeff * row[a];
      } else {
        stats.weighted_cooc->for_each_in_row(e.item,
                                             [&](int a, double v) { acc[a] += coeff * v; });
      }
    }
    if (cosine)
      for (int a = 0; a < m; ++a) scratch.scores[a] = acc[a] * stats.weighted_inv_sqrt_degree[a];
    else
      for (int a = 0; a < m; ++a) scratch.scores[a] = acc[a];
    return;
  }

  if (config.similarity == Similarity::CommonNeighbor) {
    // Integer accumulation; with bias the selection edges use a second buffer
    // so that b = 1 reproduces the unbiased values bit for bit.
    auto& plain = scratch.acc_plain;
    plain.assign(static_cast<std::size_t>(m), 0);
    auto& sel = scratch.acc_selection;
    if (biased) sel.assign(static_cast<std::size_t>(m), 0);
    for (const Edge& e : profile) {
      auto& acc = (biased && e.prov == Provenance::ViaSelection) ? sel : plain;
      if (stats.cooc->is_dense()) {
        const std::int32_t* row = stats.cooc->row(e.item);
        for (int a = 0; a < m; ++a) acc[a] += row[a];
      } else {
        stats.cooc->for_each_in_row(e.item, [&](int a, std::int32_t v) { acc[a] += v; });
      }
    }
    if (biased)
      for (int a = 0; a < m; ++a)
        scratch.scores[a] = static_cast<double>(plain[a]) + b * static_cast<double>(sel[a]);
    else
      for (int a = 0; a < m; ++a) scratch.scores[a] = static_cast<double>(plain[a]);
    return;
  }

  // Cosine: per-edge coefficient w * 1/sqrt(k_beta), final factor 1/sqrt(k_alpha).
  auto& acc = scratch.acc_real;
  acc.assign(static_cast<std::size_t>(m), 0.0);
  for (const Edge& e : profile) {
    const double coeff = profile_weight(config, e.prov) * stats.inv_sqrt_degree[e.item];
    if (coeff == 0.0) continue;
    if (stats.cooc->is_dense()) {
      const std::int32_t* row = stats.cooc->row(e.item);
      for (int a = 0; a < m; ++a) acc[a] += coeff * static_cast<double>(row[a]);
    } else {
      stats.cooc->for_each_in_row(e.item,
                                  [&](int a, std::int32_t v) { acc[a] += coeff * v; });
    }
  }
  for (int a = 0; a < m; ++a) scratch.scores[a] = acc[a] * stats.inv_sqrt_degree[a];
}

double score(const BipartiteState& state, int user, int item, const RecommenderConfig& config) {
  if (state.has_item(user, item))
    throw std::logic_error("score: item " + std::to_string(item) + " already collected by user " +
                           std::to_string(user));
  ScoreScratch scratch;
  score_profile(stats_of(state), state.collection(user), config, scratch);
  return scratch.scores[item];
}

int recommend(const BipartiteState& state, int user, const RecommenderConfig& config,
              SplitMix64& rng, ScoreScratch& scratch) {
  const int m = state.n_items();
  score_profile(stats_of(state), state.collection(user), config, scratch);
  const double* s = scratch.scores.data();
  const std::uint8_t* held = state.membership_row(user);

  double best = 0.0;
  int ties = 0;
  for (int a = 0; a < m; ++a) {
    if (held[a]) continue;
    if (ties == 0 || s[a] > best) {
      best = s[a];
      ties = 1;
    } else if (s[a] == best) {
      ++ties;
    }
  }
  if (ties == 0) throw std::logic_error("recommend: user holds every item");

  // Exactly one tie-break draw per recommendation.
  auto pick = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(ties)));
  for (int a = 0; a < m; ++a) {
    if (held[a] || s[a] != best) continue;
    if (pick == 0) return a;
    --pick;
  }
  throw std::logic_error("recommend: tie scan out of sync");
}

int recommend(const BipartiteState& state, int user, const RecommenderConfig& config,
              SplitMix64& rng) {
  ScoreScratch scratch;
  return recommend(state, user, config, rng, scratch);
}

void write_scores_csv(const BipartiteState& state, int user, const RecommenderConfig& config,
                      std::ostream& out) {
  ScoreScratch scratch;
  score_profile(stats_of(state), state.collection(user), config, scratch);
  out << "item,score,held\n";
  for (int a = 0; a < state.n_items(); ++a)
    out << a << ',' << scratch.scores[a] << ',' << (state.has_item(user, a) ? 1 : 0) << '\n';
}

}  // namespace icfsim
