#include "icfsim/dynamics.hpp"

#include <algorithm>

namespace icfsim {

namespace {

// Uniform choice among un-collected items of `genre`, falling back to the
// whole catalog when the genre is exhausted for this user.
int select_deliberate(const BipartiteState& state, const TasteMap& tastes, int user, int genre,
                      SplitMix64& rng, ScoreScratch& scratch, bool& fallback) {
  auto& cand = scratch.candidates;
  cand.clear();
  const std::uint8_t* held = state.membership_row(user);
  for (int a = tastes.genre_begin(genre); a < tastes.genre_end(genre); ++a)
    if (!held[a]) cand.push_back(a);
  fallback = cand.empty();
  if (fallback) {
    for (int a = 0; a < state.n_items(); ++a)
      if (!held[a]) cand.push_back(a);
  }
  return cand[rng.uniform_index(cand.size())];
}

}  // namespace

StepOutcome step(BipartiteState& state, const TasteMap& tastes, int user,
                 const WorldConfig& config, SplitMix64& rng, ScoreScratch& scratch) {
  StepOutcome out;
  out.user = user;
  const UserTastes& taste = tastes.user(user);

  const bool deliberate = rng.bernoulli(config.phi);
  int item;
  Provenance prov;
  if (deliberate) {
    out.channel = Channel::Selection;
    int genre = taste.taste1;
    if (config.mode == Mode::TwoTaste && !rng.bernoulli(config.f1)) genre = taste.taste2;
    item = select_deliberate(state, tastes, user, genre, rng, scratch, out.fallback);
    prov = Provenance::ViaSelection;
  } else {
    out.channel = Channel::Recommendation;
    item = recommend(state, user, config.recommender, rng, scratch);
    prov = Provenance::ViaRecommendation;
  }

  // Turnover: victim drawn uniformly from the pre-acquisition collection, so
  // the just-acquired item always survives the step.
  const auto victim = static_cast<int>(rng.uniform_index(state.collection(user).size()));
  state.add_item(user, item, prov);
  state.remove_at(user, victim);

  out.item = item;
  out.genre = tastes.item_genre(item);
  out.match = taste.matches(out.genre);
  out.taste1 = out.genre == taste.taste1;
  return out;
}

StepOutcome step(BipartiteState& state, const TasteMap& tastes, int user,
                 const WorldConfig& config, SplitMix64& rng) {
  ScoreScratch scratch;
  return step(state, tastes, user, config, rng, scratch);
}

MetricsReport run(const WorldConfig& config, const RunHooks* hooks) {
  validate(config);
  if (config.mode == Mode::Replay)
    throw ConfigError("run: replay mode needs a ratings table (use run_replay)");

  SplitMix64 rng = SplitMix64::derive(config.master_seed, config.instance_index);
  auto [state, tastes] = new_synthetic(config, rng);

  const long total = static_cast<long>(config.n_users) * config.updates_per_user;
  const auto window_begin = static_cast<long>(config.burn_in_fraction * static_cast<double>(total));

  const bool shadow = config.omega_source == OmegaSource::Shadow;
  SplitMix64 shadow_rng =
      SplitMix64::derive(SplitMix64::mix(config.master_seed ^ kShadowStreamTag),
                         config.instance_index);
  const long window_steps = total - window_begin;
  const long stride = std::max<long>(1, window_steps / config.shadow_samples);

  OmegaAccumulator acc;
  ScoreScratch scratch;
  for (long t = 0; t < total; ++t) {
    const auto user = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(config.n_users)));
    const bool in_window = t >= window_begin;

    if (shadow && in_window && (t - window_begin) % stride == 0) {
      const int item = recommend(state, user, config.recommender, shadow_rng, scratch);
      const int genre = tastes.item_genre(item);
      const UserTastes& taste = tastes.user(user);
      acc.add_shadow(taste.matches(genre), genre == taste.taste1);
    }

    const StepOutcome out = step(state, tastes, user, config, rng, scratch);
    acc.add(out, in_window);
    if (hooks != nullptr) {
      if (hooks->on_step) hooks->on_step(t, out);
      if (t == hooks->dump_scores_step && hooks->dump_scores_out != nullptr)
        write_scores_csv(state, hooks->dump_scores_user, config.recommender,
                         *hooks->dump_scores_out);
    }
  }

  MetricsReport report;
  report.config = config;
  acc.fill(report, config.omega_source, config.mode == Mode::TwoTaste);

  // Correct = un-collected items of a matching taste.
  const int m = state.n_items();
  std::vector<std::uint8_t> correct_mask(static_cast<std::size_t>(config.n_users) * m, 0);
  for (int u = 0; u < config.n_users; ++u) {
    const UserTastes& taste = tastes.user(u);
    auto* row = correct_mask.data() + static_cast<std::size_t>(u) * m;
    for (int a = 0; a < m; ++a) row[a] = taste.matches(tastes.item_genre(a)) ? 1 : 0;
  }
  report.auc_real = auc_real(state, correct_mask, config.recommender, nullptr,
                             &report.auc_real_skipped_users);
  report.auc_est = auc_est(state, config.recommender, rng, config.auc_est_repetitions,
                           config.probe_reuse_similarity, nullptr, &report.auc_est_skipped_users);
  if (hooks != nullptr && hooks->on_finish) hooks->on_finish(state);
  return report;
}

}  // namespace icfsim
