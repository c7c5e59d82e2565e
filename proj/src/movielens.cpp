#include "icfsim/movielens.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace icfsim {

RatingsTable parse_ratings(std::istream& in, const std::string& name) {
  RatingsTable table;
  struct Row {
    std::int32_t user, item, rating;
  };
  std::vector<Row> rows;
  std::unordered_map<std::int64_t, std::size_t> row_of_pair;  // (user<<32|item) -> rows idx

  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::int64_t user_ext, item_ext, timestamp;
    int rating;
    if (!(fields >> user_ext >> item_ext >> rating >> timestamp) || rating < 1 || rating > 5)
      throw std::runtime_error(name + ":" + std::to_string(line_no) + ": malformed ratings line");

    auto [uit, unew] = table.user_index.try_emplace(user_ext, table.n_users);
    if (unew) {
      ++table.n_users;
      table.user_ids.push_back(user_ext);
    }
    auto [iit, inew] = table.item_index.try_emplace(item_ext, table.n_items);
    if (inew) {
      ++table.n_items;
      table.item_ids.push_back(item_ext);
    }
    const std::int32_t u = uit->second;
    const std::int32_t i = iit->second;
    const std::int64_t key = (static_cast<std::int64_t>(u) << 32) | static_cast<std::uint32_t>(i);
    auto [rit, rnew] = row_of_pair.try_emplace(key, rows.size());
    if (rnew) {
      rows.push_back(Row{u, i, rating});
    } else {
      rows[rit->second].rating = rating;  // duplicate pair: last rating wins
      ++table.duplicate_pairs;
    }
  }
  if (rows.empty()) throw std::runtime_error(name + ": no valid ratings rows");

  table.rated.resize(static_cast<std::size_t>(table.n_users));
  table.correct.resize(static_cast<std::size_t>(table.n_users));
  for (const Row& r : rows) {
    table.rated[r.user].push_back(r.item);
    if (r.rating >= 3) table.correct[r.user].push_back(r.item);
  }
  return table;
}

RatingsTable parse_ratings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open ratings file");
  return parse_ratings(in, path);
}

ReplayInit init_replay(const RatingsTable& table, const WorldConfig& config, SplitMix64& rng) {
  const int n = table.n_users;
  const int m = table.n_items;
  const bool weighted =
      config.recommender.bias_scope == BiasScope::Everywhere && config.recommender.bias_b != 1.0;

  ReplayInit init{
      BipartiteState(n, m, config.sparse_above, weighted ? config.recommender.bias_b : 1.0),
      std::vector<std::uint8_t>(static_cast<std::size_t>(n) * m, 0),
      std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0),
      {}};

  for (int u = 0; u < n; ++u) {
    for (const std::int32_t a : table.correct[u])
      init.correct_mask[static_cast<std::size_t>(u) * m + a] = 1;
    if (table.correct[u].size() >= 2) {
      init.eligible_mask[u] = 1;
      init.eligible_users.push_back(u);
    }
  }

  std::vector<std::int32_t> pool;
  for (int u = 0; u < n; ++u) {
    if (!init.eligible_mask[u]) {
      if (!config.exclude_ineligible_edges)
        for (const std::int32_t a : table.rated[u]) init.state.add_item(u, a, Provenance::Initial);
      continue;
    }
    const auto k = static_cast<int>(table.rated[u].size());
    const auto* correct = init.correct_mask.data() + static_cast<std::size_t>(u) * m;
    // Re-draw (k-1)-subsets of the rated set until a correct movie stays
    // un-collected; terminates since |Q_u| >= 2.
    while (true) {
      pool = table.rated[u];
      for (int j = 0; j + 1 < k; ++j) {
        const auto r = j + static_cast<int>(rng.uniform_index(pool.size() - j));
        std::swap(pool[j], pool[r]);
      }
      if (correct[pool[k - 1]]) break;  // the one excluded movie is correct
    }
    for (int j = 0; j + 1 < k; ++j) init.state.add_item(u, pool[j], Provenance::Initial);
  }
  return init;
}

StepOutcome replay_step(BipartiteState& state, const RatingsTable& table,
                        const std::vector<std::uint8_t>& correct_mask, int user,
                        const WorldConfig& config, SplitMix64& rng, ScoreScratch& scratch) {
  StepOutcome out;
  out.user = user;
  const auto* correct = correct_mask.data() + static_cast<std::size_t>(user) * state.n_items();

  const bool deliberate = rng.bernoulli(config.phi);
  int item;
  Provenance prov;
  if (deliberate) {
    out.channel = Channel::Selection;
    auto& cand = scratch.candidates;
    cand.clear();
    for (const std::int32_t a : table.correct[user])
      if (!state.has_item(user, a)) cand.push_back(a);
    if (cand.empty()) {
      out.skipped = true;  // every correct movie already collected
      return out;
    }
    item = cand[rng.uniform_index(cand.size())];
    prov = Provenance::ViaSelection;
  } else {
    out.channel = Channel::Recommendation;
    item = recommend(state, user, config.recommender, rng, scratch);
    prov = Provenance::ViaRecommendation;
  }

  const auto victim = static_cast<int>(rng.uniform_index(state.collection(user).size()));
  state.add_item(user, item, prov);
  state.remove_at(user, victim);

  out.item = item;
  out.match = correct[item] != 0;
  return out;
}

MetricsReport run_replay(const WorldConfig& config, const RatingsTable& table,
                         const RunHooks* hooks) {
  WorldConfig cfg = config;
  cfg.mode = Mode::Replay;
  validate(cfg);

  SplitMix64 rng = SplitMix64::derive(cfg.master_seed, cfg.instance_index);
  ReplayInit init = init_replay(table, cfg, rng);
  BipartiteState& state = init.state;
  const auto n_eligible = static_cast<long>(init.eligible_users.size());
  if (n_eligible == 0) throw ConfigError("run_replay: no eligible users in the ratings table");

  const long total = n_eligible * cfg.updates_per_user;
  const auto window_begin = static_cast<long>(cfg.burn_in_fraction * static_cast<double>(total));
  const bool shadow = cfg.omega_source == OmegaSource::Shadow;
  SplitMix64 shadow_rng =
      SplitMix64::derive(SplitMix64::mix(cfg.master_seed ^ kShadowStreamTag), cfg.instance_index);
  const long stride = std::max<long>(1, (total - window_begin) / cfg.shadow_samples);

  OmegaAccumulator acc;
  ScoreScratch scratch;
  for (long t = 0; t < total; ++t) {
    const int user = init.eligible_users[rng.uniform_index(init.eligible_users.size())];
    const bool in_window = t >= window_begin;

    if (shadow && in_window && (t - window_begin) % stride == 0) {
      const int item = recommend(state, user, cfg.recommender, shadow_rng, scratch);
      acc.add_shadow(
          init.correct_mask[static_cast<std::size_t>(user) * state.n_items() + item] != 0, false);
    }

    const StepOutcome out = replay_step(state, table, init.correct_mask, user, cfg, rng, scratch);
    acc.add(out, in_window);
    if (hooks != nullptr) {
      if (hooks->on_step) hooks->on_step(t, out);
      if (t == hooks->dump_scores_step && hooks->dump_scores_out != nullptr)
        write_scores_csv(state, hooks->dump_scores_user, cfg.recommender,
                         *hooks->dump_scores_out);
    }
  }

  MetricsReport report;
  report.config = cfg;
  report.config.n_users = table.n_users;
  report.config.n_items = table.n_items;
  acc.fill(report, cfg.omega_source, false);
  report.auc_real = auc_real(state, init.correct_mask, cfg.recommender, &init.eligible_users,
                             &report.auc_real_skipped_users);
  report.auc_est = auc_est(state, cfg.recommender, rng, cfg.auc_est_repetitions,
                           cfg.probe_reuse_similarity, &init.eligible_users,
                           &report.auc_est_skipped_users);
  if (hooks != nullptr && hooks->on_finish) hooks->on_finish(state);
  return report;
}

}  // namespace icfsim
