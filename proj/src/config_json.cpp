#include "icfsim/config_json.hpp"

#include <set>

namespace icfsim {

using nlohmann::json;

std::string similarity_to_string(Similarity s) {
  return s == Similarity::CommonNeighbor ? "cn" : "cosine";
}

Similarity similarity_from_string(const std::string& name) {
  if (name == "cn" || name == "common_neighbor") return Similarity::CommonNeighbor;
  if (name == "cosine") return Similarity::Cosine;
  throw ConfigError("unknown similarity '" + name + "' (expected cn or cosine)");
}

namespace {

std::string mode_to_string(Mode m) {
  switch (m) {
    case Mode::SingleTaste: return "single_taste";
    case Mode::TwoTaste: return "two_taste";
    case Mode::Replay: return "replay";
  }
  return "?";
}

Mode mode_from_string(const std::string& name) {
  if (name == "single_taste") return Mode::SingleTaste;
  if (name == "two_taste") return Mode::TwoTaste;
  if (name == "replay") return Mode::Replay;
  throw ConfigError("unknown mode '" + name + "'");
}

template <class T>
void take(const json& j, std::set<std::string>& seen, const char* key, T& into) {
  if (auto it = j.find(key); it != j.end()) {
    seen.insert(key);
    into = it->get<T>();
  }
}

void take_similarity(const json& j, std::set<std::string>& seen, const char* key,
                     Similarity& into) {
  if (auto it = j.find(key); it != j.end()) {
    seen.insert(key);
    into = similarity_from_string(it->get<std::string>());
  }
}

}  // namespace

json to_json(const WorldConfig& c) {
  return json{{"n_users", c.n_users},
              {"n_items", c.n_items},
              {"n_genres", c.n_genres},
              {"items_per_user", c.items_per_user},
              {"phi", c.phi},
              {"f1", c.f1},
              {"updates_per_user", c.updates_per_user},
              {"burn_in_fraction", c.burn_in_fraction},
              {"mode", mode_to_string(c.mode)},
              {"init", c.init == InitKind::Uniform ? "uniform" : "taste_matched"},
              {"similarity", similarity_to_string(c.recommender.similarity)},
              {"bias_b", c.recommender.bias_b},
              {"bias_scope",
               c.recommender.bias_scope == BiasScope::ScoreOnly ? "score_only" : "everywhere"},
              {"master_seed", c.master_seed},
              {"instance_index", c.instance_index},
              {"auc_est_repetitions", c.auc_est_repetitions},
              {"probe_reuse_similarity", c.probe_reuse_similarity},
              {"exclude_ineligible_edges", c.exclude_ineligible_edges},
              {"sparse_above", c.sparse_above},
              {"omega_source", c.omega_source == OmegaSource::Events ? "events" : "shadow"},
              {"shadow_samples", c.shadow_samples}};
}

// parallelism is deliberately not echoed: the CSV must not depend on the
// execution width.
json to_json(const SweepSpec& s) {
  json j{{"base", to_json(s.base)}, {"instances", s.instances}};
  if (!s.phi_grid.empty()) j["phi_grid"] = s.phi_grid;
  if (!s.g_grid.empty()) j["g_grid"] = s.g_grid;
  if (!s.k_grid.empty()) j["k_grid"] = s.k_grid;
  if (!s.f1_grid.empty()) j["f1_grid"] = s.f1_grid;
  if (!s.b_grid.empty()) j["b_grid"] = s.b_grid;
  if (!s.similarity_grid.empty()) {
    json arr = json::array();
    for (const auto sim : s.similarity_grid) arr.push_back(similarity_to_string(sim));
    j["similarity_grid"] = arr;
  }
  return j;
}

WorldConfig world_config_from_json(const json& j, const WorldConfig& base) {
  if (!j.is_object()) throw ConfigError("config document must be a JSON object");
  WorldConfig c = base;
  std::set<std::string> seen;
  take(j, seen, "n_users", c.n_users);
  take(j, seen, "n_items", c.n_items);
  take(j, seen, "n_genres", c.n_genres);
  take(j, seen, "items_per_user", c.items_per_user);
  take(j, seen, "phi", c.phi);
  take(j, seen, "f1", c.f1);
  take(j, seen, "updates_per_user", c.updates_per_user);
  take(j, seen, "burn_in_fraction", c.burn_in_fraction);
  if (auto it = j.find("mode"); it != j.end()) {
    seen.insert("mode");
    c.mode = mode_from_string(it->get<std::string>());
  }
  if (auto it = j.find("init"); it != j.end()) {
    seen.insert("init");
    const auto name = it->get<std::string>();
    if (name == "uniform")
      c.init = InitKind::Uniform;
    else if (name == "taste_matched")
      c.init = InitKind::TasteMatched;
    else
      throw ConfigError("unknown init '" + name + "'");
  }
  take_similarity(j, seen, "similarity", c.recommender.similarity);
  take(j, seen, "bias_b", c.recommender.bias_b);
  if (auto it = j.find("bias_scope"); it != j.end()) {
    seen.insert("bias_scope");
    const auto name = it->get<std::string>();
    if (name == "score_only")
      c.recommender.bias_scope = BiasScope::ScoreOnly;
    else if (name == "everywhere")
      c.recommender.bias_scope = BiasScope::Everywhere;
    else
      throw ConfigError("unknown bias_scope '" + name + "'");
  }
  take(j, seen, "master_seed", c.master_seed);
  take(j, seen, "instance_index", c.instance_index);
  take(j, seen, "auc_est_repetitions", c.auc_est_repetitions);
  take(j, seen, "probe_reuse_similarity", c.probe_reuse_similarity);
  take(j, seen, "exclude_ineligible_edges", c.exclude_ineligible_edges);
  take(j, seen, "sparse_above", c.sparse_above);
  if (auto it = j.find("omega_source"); it != j.end()) {
    seen.insert("omega_source");
    const auto name = it->get<std::string>();
    if (name == "events")
      c.omega_source = OmegaSource::Events;
    else if (name == "shadow")
      c.omega_source = OmegaSource::Shadow;
    else
      throw ConfigError("unknown omega_source '" + name + "'");
  }
  take(j, seen, "shadow_samples", c.shadow_samples);
  for (const auto& [key, _] : j.items())
    if (!seen.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  return c;
}

SweepSpec sweep_spec_from_json(const json& j, const SweepSpec& base) {
  if (!j.is_object()) throw ConfigError("sweep document must be a JSON object");
  SweepSpec s = base;
  std::set<std::string> seen;
  if (auto it = j.find("base"); it != j.end()) {
    seen.insert("base");
    s.base = world_config_from_json(*it, s.base);
  }
  take(j, seen, "phi_grid", s.phi_grid);
  take(j, seen, "g_grid", s.g_grid);
  take(j, seen, "k_grid", s.k_grid);
  take(j, seen, "f1_grid", s.f1_grid);
  take(j, seen, "b_grid", s.b_grid);
  if (auto it = j.find("similarity_grid"); it != j.end()) {
    seen.insert("similarity_grid");
    s.similarity_grid.clear();
    for (const auto& name : *it) s.similarity_grid.push_back(similarity_from_string(name));
  }
  take(j, seen, "instances", s.instances);
  take(j, seen, "parallelism", s.parallelism);
  for (const auto& [key, _] : j.items())
    if (!seen.contains(key)) throw ConfigError("unknown sweep key '" + key + "'");
  return s;
}

}  // namespace icfsim
