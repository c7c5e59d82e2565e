#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "icfsim/dynamics.hpp"

using namespace icfsim;

namespace {

WorldConfig tiny_config() {
  WorldConfig c;
  c.n_users = 20;
  c.n_items = 30;
  c.n_genres = 3;
  c.items_per_user = 3;
  c.updates_per_user = 50;
  return c;
}

struct Traced {
  MetricsReport report;
  std::vector<StepOutcome> outcomes;
  std::uint64_t final_fingerprint = 0;
};

Traced traced_run(const WorldConfig& cfg) {
  Traced t;
  RunHooks hooks;
  hooks.on_step = [&t](long, const StepOutcome& o) { t.outcomes.push_back(o); };
  hooks.on_finish = [&t](const BipartiteState& s) { t.final_fingerprint = s.fingerprint(); };
  t.report = run(cfg, &hooks);
  return t;
}

}  // namespace

TEST_CASE("phi = 1 yields only matching deliberate selections") {
  WorldConfig cfg;
  cfg.n_users = 12;
  cfg.n_items = 60;
  cfg.n_genres = 6;  // block size 10 > k: the taste can never be exhausted
  cfg.items_per_user = 5;
  cfg.updates_per_user = 40;
  cfg.phi = 1.0;
  const Traced t = traced_run(cfg);
  CHECK(t.outcomes.size() == 12u * 40u);
  for (const auto& o : t.outcomes) {
    CHECK(o.channel == Channel::Selection);
    CHECK(o.match);
    CHECK_FALSE(o.fallback);
  }
  CHECK_FALSE(t.report.omega_defined);  // no recommendation events at all
  CHECK(t.report.fallback_events == 0);
}

TEST_CASE("phi = 0 yields only recommendations") {
  WorldConfig cfg = tiny_config();
  cfg.phi = 0.0;
  const Traced t = traced_run(cfg);
  for (const auto& o : t.outcomes) CHECK(o.channel == Channel::Recommendation);
  CHECK(t.report.omega_defined);
}

TEST_CASE("runs are reproducible and instances differ") {
  WorldConfig cfg = tiny_config();
  cfg.phi = 0.4;
  const Traced a = traced_run(cfg);
  const Traced b = traced_run(cfg);
  CHECK(a.final_fingerprint == b.final_fingerprint);
  REQUIRE(a.outcomes.size() == b.outcomes.size());
  for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
    CHECK(a.outcomes[i].user == b.outcomes[i].user);
    CHECK(a.outcomes[i].item == b.outcomes[i].item);
    CHECK(a.outcomes[i].channel == b.outcomes[i].channel);
  }
  CHECK(a.report.omega == b.report.omega);
  CHECK(a.report.auc_est == b.report.auc_est);

  WorldConfig other = cfg;
  other.instance_index = 1;
  const Traced c = traced_run(other);
  CHECK(c.final_fingerprint != a.final_fingerprint);
}

TEST_CASE("degree stays k after every step") {
  WorldConfig cfg;
  cfg.n_users = 8;
  cfg.n_items = 20;
  cfg.n_genres = 4;
  cfg.items_per_user = 4;
  cfg.phi = 0.5;
  SplitMix64 rng = SplitMix64::derive(cfg.master_seed, 0);
  auto [state, tastes] = new_synthetic(cfg, rng);
  ScoreScratch scratch;
  for (int t = 0; t < 500; ++t) {
    const auto user = static_cast<int>(rng.uniform_index(cfg.n_users));
    step(state, tastes, user, cfg, rng, scratch);
    for (int u = 0; u < cfg.n_users; ++u)
      CHECK(state.collection(u).size() == static_cast<std::size_t>(cfg.items_per_user));
  }
  CHECK(state.verify_against_oracle());
}

TEST_CASE("selection frequency concentrates at phi") {
  WorldConfig cfg;
  cfg.n_users = 50;
  cfg.n_items = 40;
  cfg.n_genres = 4;
  cfg.items_per_user = 4;
  cfg.updates_per_user = 100;
  cfg.phi = 0.3;
  cfg.burn_in_fraction = 0.0;
  const Traced t = traced_run(cfg);
  const auto total = static_cast<double>(t.outcomes.size());
  long selections = 0;
  for (const auto& o : t.outcomes) selections += o.channel == Channel::Selection;
  const double sigma = std::sqrt(0.3 * 0.7 / total);
  CHECK(std::abs(selections / total - 0.3) < 4.0 * sigma);
}

TEST_CASE("every deliberate selection matches the taste when no fallback is possible") {
  WorldConfig cfg;
  cfg.n_users = 15;
  cfg.n_items = 50;
  cfg.n_genres = 5;
  cfg.items_per_user = 6;  // block size 10 > k
  cfg.updates_per_user = 60;
  cfg.phi = 0.5;
  const Traced t = traced_run(cfg);
  for (const auto& o : t.outcomes)
    if (o.channel == Channel::Selection) {
      CHECK(o.match);
      CHECK_FALSE(o.fallback);
    }
}

TEST_CASE("a fully segregated state keeps recommending inside the cluster") {
  // users of genre g hold cyclic windows of their own block: co-occurrence
  // evidence never crosses genres, so recommendations cannot either
  const int genres = 4, per_genre = 10, block = 10, k = 5;
  const int n = genres * per_genre, m = genres * block;
  BipartiteState state(n, m);
  TasteMap tastes(n, m, genres);
  for (int u = 0; u < n; ++u) {
    const int g = u / per_genre;
    tastes.user_mut(u).taste1 = g;
    for (int j = 0; j < k; ++j)
      state.add_item(u, g * block + (u % per_genre + j) % block, Provenance::Initial);
  }
  WorldConfig cfg;
  cfg.n_users = n;
  cfg.n_items = m;
  cfg.n_genres = genres;
  cfg.items_per_user = k;
  cfg.phi = 0.0;  // recommendations only
  SplitMix64 rng(1234);
  ScoreScratch scratch;
  for (int t = 0; t < 2000; ++t) {
    const auto user = static_cast<int>(rng.uniform_index(n));
    const StepOutcome out = step(state, tastes, user, cfg, rng, scratch);
    CHECK(out.match);
  }
}

TEST_CASE("exhausted taste falls back to the whole catalog and is counted") {
  WorldConfig cfg;
  cfg.n_users = 6;
  cfg.n_items = 6;
  cfg.n_genres = 3;  // block size 2
  cfg.items_per_user = 4;  // k > block size: fallbacks must occur
  cfg.updates_per_user = 50;
  cfg.phi = 1.0;
  const Traced t = traced_run(cfg);
  CHECK(t.report.fallback_events > 0);
  long flagged = 0;
  for (const auto& o : t.outcomes) flagged += o.fallback;
  CHECK(flagged == t.report.fallback_events);
}

TEST_CASE("report counters recount from the trace") {
  WorldConfig cfg = tiny_config();
  cfg.phi = 0.6;
  cfg.updates_per_user = 80;
  const Traced t = traced_run(cfg);
  const long total = static_cast<long>(t.outcomes.size());
  const auto window_begin = static_cast<long>(cfg.burn_in_fraction * total);
  const OmegaAccumulator acc = accumulate_omega(t.outcomes, window_begin);
  CHECK(acc.rec_events == t.report.rec_events);
  CHECK(acc.sel_events == t.report.sel_events);
  CHECK(acc.rec_events + acc.sel_events == total - window_begin);
  MetricsReport recount;
  acc.fill(recount, OmegaSource::Events, false);
  CHECK(recount.omega == t.report.omega);
}

TEST_CASE("two-taste selections follow f1 and stay within the pair") {
  WorldConfig cfg;
  cfg.mode = Mode::TwoTaste;
  cfg.n_users = 20;
  cfg.n_items = 60;
  cfg.n_genres = 6;  // block size 10 > k
  cfg.items_per_user = 4;
  cfg.updates_per_user = 60;
  cfg.phi = 1.0;
  cfg.f1 = 1.0;
  const Traced t = traced_run(cfg);
  for (const auto& o : t.outcomes) {
    CHECK(o.channel == Channel::Selection);
    CHECK(o.match);
    CHECK(o.taste1);  // f1 = 1 always draws taste 1
  }
}

TEST_CASE("shadow omega measurement does not perturb the trajectory") {
  WorldConfig cfg = tiny_config();
  cfg.phi = 0.7;
  const Traced events = traced_run(cfg);
  WorldConfig shadow_cfg = cfg;
  shadow_cfg.omega_source = OmegaSource::Shadow;
  shadow_cfg.shadow_samples = 100;
  const Traced shadow = traced_run(shadow_cfg);
  CHECK(events.final_fingerprint == shadow.final_fingerprint);
  REQUIRE(events.outcomes.size() == shadow.outcomes.size());
  for (std::size_t i = 0; i < events.outcomes.size(); ++i)
    CHECK(events.outcomes[i].item == shadow.outcomes[i].item);
  CHECK(shadow.report.shadow_events >= 100);
}

TEST_CASE("shadow omega stays defined at phi = 1") {
  WorldConfig cfg;
  cfg.n_users = 10;
  cfg.n_items = 40;
  cfg.n_genres = 4;
  cfg.items_per_user = 4;
  cfg.updates_per_user = 100;
  cfg.phi = 1.0;
  cfg.omega_source = OmegaSource::Shadow;
  cfg.shadow_samples = 200;
  const MetricsReport r = run(cfg);
  CHECK(r.omega_defined);
  CHECK(r.rec_events == 0);
  CHECK(r.shadow_events >= 200);
}

TEST_CASE("run rejects replay mode without a table") {
  WorldConfig cfg = tiny_config();
  cfg.mode = Mode::Replay;
  CHECK_THROWS_AS(run(cfg), ConfigError);
}
