#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fadcm/harness.hpp"
#include "fadcm/optimizer.hpp"
#include "fadcm/rng.hpp"

using namespace fadcm;
using nlohmann::json;

namespace {

CaseConfig small_case() {
    CaseConfig cfg;
    cfg.label = "unit";
    cfg.catalog.items_per_category = {3, 3};
    cfg.relevance.lo = 0.0;
    cfg.relevance.hi = 0.5;
    cfg.discount.kappa = 0.1;
    cfg.g = 0.85;
    cfg.q = 0.7;
    cfg.horizon = 250;
    cfg.replications = 3;
    cfg.policy.kind = PolicyKind::FaDcmP;
    cfg.master_seed = 99;
    cfg.checkpoint_every = 50;
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("case validation names the violated field") {
    CaseConfig cfg = small_case();
    SUBCASE("valid baseline passes") { CHECK_NOTHROW(validate_case(cfg)); }
    SUBCASE("q above g") {
        cfg.q = 0.9;
        cfg.g = 0.5;
        try {
            validate_case(cfg);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("0 <= q <= g <= 1") != std::string::npos);
        }
    }
    SUBCASE("zero horizon") {
        cfg.horizon = 0;
        CHECK_THROWS_AS(validate_case(cfg), ConfigError);
    }
    SUBCASE("no replications") {
        cfg.replications = 0;
        CHECK_THROWS_AS(validate_case(cfg), ConfigError);
    }
    SUBCASE("empty catalog") {
        cfg.catalog.items_per_category.clear();
        CHECK_THROWS_AS(validate_case(cfg), ConfigError);
    }
    SUBCASE("bad relevance range") {
        cfg.relevance.lo = 0.4;
        cfg.relevance.hi = 0.2;
        CHECK_THROWS_AS(validate_case(cfg), ConfigError);
    }
    SUBCASE("fixed relevance must match the catalog size") {
        cfg.relevance.fixed = {0.1, 0.2};
        CHECK_THROWS_AS(validate_case(cfg), ConfigError);
    }
    SUBCASE("kappa must be positive for the exponential curve") {
        cfg.discount.kappa = -0.5;
        CHECK_THROWS_AS(validate_case(cfg), ConfigError);
    }
    SUBCASE("checkpoint cadence must be positive") {
        cfg.checkpoint_every = 0;
        CHECK_THROWS_AS(validate_case(cfg), ConfigError);
    }
}

TEST_CASE("truth construction") {
    CaseConfig cfg = small_case();
    SUBCASE("uniform draws live inside the configured range") {
        for (int rep = 0; rep < 10; ++rep) {
            ModelParams truth = build_truth(cfg, rep);
            for (double v : truth.relevance.values()) {
                CHECK(v >= cfg.relevance.lo);
                CHECK(v < cfg.relevance.hi);
            }
        }
    }
    SUBCASE("fixed relevance is used verbatim") {
        cfg.relevance.fixed = {0.1, 0.2, 0.3, 0.4, 0.45, 0.05};
        ModelParams truth = build_truth(cfg, 3);
        CHECK(truth.relevance.values() == cfg.relevance.fixed);
    }
    SUBCASE("the same replication always sees the same truth") {
        ModelParams a = build_truth(cfg, 2);
        ModelParams b = build_truth(cfg, 2);
        CHECK(a.relevance.values() == b.relevance.values());
    }
    SUBCASE("different replications see different truths") {
        ModelParams a = build_truth(cfg, 0);
        ModelParams b = build_truth(cfg, 1);
        CHECK(a.relevance.values() != b.relevance.values());
    }
    SUBCASE("discount table form") {
        cfg.discount.exponential = false;
        cfg.discount.table = {1.0, 0.7, 0.4};
        ModelParams truth = build_truth(cfg, 0);
        CHECK(truth.discount.value(1) == 0.7);
        CHECK(truth.discount.value(5) == 0.4);
    }
    SUBCASE("exponential plateau defaults to the deepest observable index") {
        ModelParams truth = build_truth(cfg, 0);
        CHECK(truth.discount.plateau_index() == 2); // categories of size 3
        CHECK(truth.discount.value(1) == doctest::Approx(std::exp(-0.1)).epsilon(1e-15));
    }
}

TEST_CASE("instantaneous regret") {
    CaseConfig cfg = small_case();
    cfg.relevance.fixed = {0.45, 0.3, 0.1, 0.4, 0.2, 0.05};
    ModelParams truth = build_truth(cfg, 0);
    Catalog cat = Catalog::grouped(cfg.catalog.items_per_category);

    Slate best = optimal_slate(cat, truth.relevance.values(), truth.discount);
    CHECK(instantaneous_regret(truth, best) == 0.0);

    Slate reversed = best;
    std::reverse(reversed.order.begin(), reversed.order.end());
    const double direct =
        expected_reward(best, truth) - expected_reward(reversed, truth);
    CHECK(instantaneous_regret(truth, reversed) == doctest::Approx(direct).epsilon(1e-12));

    Rng rng(5);
    std::vector<int> ids(6);
    std::iota(ids.begin(), ids.end(), 0);
    for (int trial = 0; trial < 2000; ++trial) {
        rng.shuffle(ids);
        const std::size_t len = 1 + rng.below(6);
        Slate s{std::vector<int>(ids.begin(), ids.begin() + static_cast<long>(len))};
        CHECK(instantaneous_regret(truth, s) >= 0.0);
    }
}

TEST_CASE("a replication is reproducible and properly accumulated") {
    CaseConfig cfg = small_case();
    RegretSeries a = run_replication(cfg, 1);
    RegretSeries b = run_replication(cfg, 1);
    REQUIRE(a.cumulative.size() == cfg.horizon);
    REQUIRE(a.instantaneous.size() == cfg.horizon);
    CHECK(a.cumulative == b.cumulative);
    CHECK(std::is_sorted(a.cumulative.begin(), a.cumulative.end()));
    double run = 0.0;
    for (std::size_t i = 0; i < cfg.horizon; ++i) {
        run += a.instantaneous[i];
        CHECK(a.cumulative[i] == doctest::Approx(run).epsilon(1e-12));
    }
}

TEST_CASE("the oracle baseline accrues zero regret") {
    CaseConfig cfg = small_case();
    cfg.policy.kind = PolicyKind::Oracle;
    RegretSeries series = run_replication(cfg, 0);
    for (double r : series.instantaneous) CHECK(r == 0.0);
}

TEST_CASE("artifacts capture sessions and the final policy state") {
    CaseConfig cfg = small_case();
    cfg.horizon = 40;
    ReplicationArtifacts art;
    art.record_sessions = true;
    run_replication(cfg, 0, &art);
    REQUIRE(art.sessions.size() == 40);
    CHECK(art.sessions[0].at("t") == 1);
    CHECK(art.sessions[0].contains("slate"));
    CHECK(art.sessions[0].contains("clicks"));
    CHECK(art.sessions[0].contains("exit_cause"));
    CHECK(art.policy_snapshot.at("policy") == "fa_dcm_p");
}

TEST_CASE("experiment aggregation is independent of the worker count") {
    CaseConfig cfg = small_case();
    cfg.replications = 5;
    SummaryStats serial = run_experiment(cfg, 1);
    SummaryStats pooled = run_experiment(cfg, 3);
    CHECK(serial.checkpoints == pooled.checkpoints);
    CHECK(serial.mean_cum == pooled.mean_cum);
    CHECK(serial.lo95 == pooled.lo95);
    CHECK(serial.hi95 == pooled.hi95);
    CHECK(serial.final_per_replication == pooled.final_per_replication);
    CHECK(serial.final_mean == pooled.final_mean);
}

TEST_CASE("checkpoints cover the cadence and always include the horizon") {
    CaseConfig cfg = small_case();
    cfg.horizon = 130; // not a multiple of 50
    cfg.replications = 2;
    SummaryStats stats = run_experiment(cfg);
    CHECK(stats.checkpoints == std::vector<std::uint64_t>{50, 100, 130});
    REQUIRE(stats.mean_cum.size() == 3);
    CHECK(stats.final_mean == stats.mean_cum.back());
    CHECK(stats.final_per_replication.size() == 2);
}

TEST_CASE("the percentile band brackets the mean at every checkpoint") {
    CaseConfig cfg = small_case();
    cfg.replications = 8;
    SummaryStats stats = run_experiment(cfg, 4);
    for (std::size_t i = 0; i < stats.checkpoints.size(); ++i) {
        CHECK(stats.lo95[i] <= stats.mean_cum[i]);
        CHECK(stats.hi95[i] >= stats.mean_cum[i]);
        CHECK(stats.lo95[i] >= 0.0);
    }
}

TEST_CASE("a single replication collapses the band onto the mean") {
    CaseConfig cfg = small_case();
    cfg.replications = 1;
    SummaryStats stats = run_experiment(cfg);
    for (std::size_t i = 0; i < stats.checkpoints.size(); ++i) {
        CHECK(stats.lo95[i] == stats.mean_cum[i]);
        CHECK(stats.hi95[i] == stats.mean_cum[i]);
    }
}

TEST_CASE("percentile interpolates between order statistics") {
    CHECK(percentile({3.0, 1.0, 2.0}, 50.0) == 2.0);
    CHECK(percentile({1.0, 2.0, 3.0, 4.0}, 0.0) == 1.0);
    CHECK(percentile({1.0, 2.0, 3.0, 4.0}, 100.0) == 4.0);
    CHECK(percentile({0.0, 10.0}, 25.0) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(percentile({5.0}, 97.5) == 5.0);
}

TEST_CASE("every session exhausts the slate when continuation is certain") {
    CaseConfig cfg = small_case();
    cfg.g = 1.0;
    cfg.q = 1.0;
    cfg.horizon = 300;
    ReplicationArtifacts art;
    art.record_sessions = true;
    run_replication(cfg, 0, &art);
    for (const auto& s : art.sessions) {
        CHECK(s.at("exit_cause") == "exhausted_slate");
        CHECK(s.at("examined_len") == 6);
    }
}

TEST_CASE("regret flattens once the learner settles") {
    CaseConfig cfg = small_case();
    cfg.g = 1.0;
    cfg.q = 1.0;
    cfg.horizon = 2000;
    cfg.replications = 2;
    cfg.checkpoint_every = 1000;
    SummaryStats stats = run_experiment(cfg, 2);
    REQUIRE(stats.checkpoints == std::vector<std::uint64_t>{1000, 2000});
    CHECK(stats.mean_cum[1] / stats.mean_cum[0] < 2.0);
}

// ---------------------------------------------------------------------------
// presets

TEST_CASE("preset lookup accepts numerals and is case-insensitive") {
    CHECK(preset("I").name == "expI");
    CHECK(preset("i").name == "expI");
    CHECK(preset("1").name == "expI");
    CHECK(preset("iv").name == "expIV");
    CHECK(preset("4").name == "expIV");
    CHECK_THROWS_AS(preset("V"), ConfigError);
    CHECK_THROWS_AS(preset(""), ConfigError);
}

TEST_CASE("preset parameters are pinned") {
    SUBCASE("first suite varies the click-continuation") {
        ExperimentConfig exp = preset("I");
        REQUIRE(exp.cases.size() == 3);
        CHECK(exp.cases[0].label == "case1");
        CHECK(exp.cases[0].g == 0.95);
        CHECK(exp.cases[1].g == 0.85);
        CHECK(exp.cases[2].g == 0.75);
        for (const auto& c : exp.cases) {
            CHECK(c.q == 0.7);
            CHECK(c.policy.kind == PolicyKind::FaDcmP);
            CHECK(c.catalog.items_per_category == std::vector<int>{10, 10, 10});
            CHECK(c.horizon == 10000);
            CHECK(c.replications == 20);
            CHECK(c.master_seed == 1234);
            CHECK(c.relevance.hi == 0.5);
            CHECK(c.discount.kappa == 0.1);
        }
    }
    SUBCASE("second suite varies continuation and fatigue") {
        ExperimentConfig exp = preset("II");
        REQUIRE(exp.cases.size() == 3);
        CHECK(exp.cases[0].g == 0.85);
        CHECK(exp.cases[0].discount.kappa == 0.1);
        CHECK(exp.cases[1].discount.kappa == 0.15);
        CHECK(exp.cases[2].g == 0.75);
        for (const auto& c : exp.cases) CHECK(c.policy.kind == PolicyKind::FaDcm);
    }
    SUBCASE("third suite compares the two learners on one instance") {
        ExperimentConfig exp = preset("III");
        REQUIRE(exp.cases.size() == 2);
        CHECK(exp.cases[0].label == "case7_fadcm");
        CHECK(exp.cases[0].policy.kind == PolicyKind::FaDcm);
        CHECK(exp.cases[1].label == "case7_ete");
        CHECK(exp.cases[1].policy.kind == PolicyKind::Ete);
        CHECK(exp.cases[0].g == 0.75);
        CHECK(exp.cases[0].master_seed == exp.cases[1].master_seed);
    }
    SUBCASE("fourth suite scales the catalog up") {
        ExperimentConfig exp = preset("IV");
        REQUIRE(exp.cases.size() == 2);
        for (const auto& c : exp.cases) {
            CHECK(c.catalog.items_per_category == std::vector<int>(5, 20));
            CHECK(c.g == 0.843);
            CHECK(c.q == 0.823);
        }
        CHECK(exp.cases[0].policy.kind == PolicyKind::FaDcm);
        CHECK(exp.cases[1].policy.kind == PolicyKind::Ete);
    }
}

// ---------------------------------------------------------------------------
// config parsing and outputs

TEST_CASE("resolved case json round-trips through the parser") {
    CaseConfig cfg = small_case();
    cfg.policy.kind = PolicyKind::FaDcm;
    cfg.policy.alpha = 0.4;
    cfg.policy.delta_form = DeltaForm::Literal;
    const json resolved = resolved_case_json(cfg);
    ExperimentConfig parsed = parse_config_json(resolved);
    REQUIRE(parsed.cases.size() == 1);
    CHECK(resolved_case_json(parsed.cases[0]) == resolved);
}

TEST_CASE("config parsing accepts the three top-level shapes") {
    const json bare = {{"label", "a"},
                       {"catalog", {{"items_per_category", {2, 2}}}},
                       {"horizon", 100},
                       {"replications", 2}};
    CHECK(parse_config_json(bare).cases.size() == 1);

    const json full = {{"name", "suite"}, {"cases", json::array({bare})}};
    ExperimentConfig exp = parse_config_json(full);
    CHECK(exp.name == "suite");
    CHECK(exp.cases.size() == 1);

    const json sidecar = {{"config", bare}, {"config_hash", "ff"}, {"final_mean", 1.0}};
    CHECK(parse_config_json(sidecar).cases.size() == 1);
}

TEST_CASE("catalog accepts a category count with uniform size") {
    const json j = {{"label", "a"},
                    {"catalog", {{"n_categories", 3}, {"items_per_category", 4}}}};
    ExperimentConfig exp = parse_config_json(j);
    CHECK(exp.cases[0].catalog.items_per_category == std::vector<int>{4, 4, 4});
}

TEST_CASE("config parsing rejects malformed input") {
    SUBCASE("unknown case key") {
        const json j = {{"label", "a"},
                        {"catalog", {{"items_per_category", {2}}}},
                        {"horizonn", 10}};
        CHECK_THROWS_AS(parse_config_json(j), ConfigError);
    }
    SUBCASE("unknown policy kind") {
        const json j = {{"label", "a"},
                        {"catalog", {{"items_per_category", {2}}}},
                        {"policy", {{"kind", "thompson"}}}};
        CHECK_THROWS_AS(parse_config_json(j), ConfigError);
    }
    SUBCASE("behavior invariant is enforced at parse time") {
        const json j = {{"label", "a"},
                        {"catalog", {{"items_per_category", {2}}}},
                        {"behavior", {{"g", 0.5}, {"q", 0.9}}}};
        try {
            parse_config_json(j);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("0 <= q <= g <= 1") != std::string::npos);
        }
    }
    SUBCASE("missing catalog") {
        const json j = {{"label", "a"}, {"horizon", 10}};
        CHECK_THROWS_AS(parse_config_json(j), ConfigError);
    }
    SUBCASE("wrong draw name") {
        const json j = {{"label", "a"},
                        {"catalog", {{"items_per_category", {2}}}},
                        {"relevance", {{"draw", "gaussian"}}}};
        CHECK_THROWS_AS(parse_config_json(j), ConfigError);
    }
}

TEST_CASE("config files: missing path and broken json fail cleanly") {
    CHECK_THROWS_AS(load_config_file("/nonexistent/nope.json"), ConfigError);
    const std::string path = "/tmp/fadcm_broken_config.json";
    std::ofstream(path) << "{not json";
    CHECK_THROWS_AS(load_config_file(path), ConfigError);
    std::remove(path.c_str());
}

TEST_CASE("config hash is stable and distinguishes cases") {
    CaseConfig a = small_case();
    CaseConfig b = small_case();
    CHECK(config_hash_hex(a) == config_hash_hex(b));
    CHECK(config_hash_hex(a).size() == 16);
    b.g = 0.9;
    CHECK(config_hash_hex(a) != config_hash_hex(b));
}

TEST_CASE("fnv1a64 matches reference values") {
    CHECK(fnv1a64("") == 14695981039346656037ULL);
    CHECK(fnv1a64("a") == 12638187200555641996ULL);
}

TEST_CASE("case outputs embed the provenance line and reproduce exactly") {
    CaseConfig cfg = small_case();
    cfg.horizon = 120;
    cfg.replications = 2;
    const std::string dir = "/tmp/fadcm_test_outputs";
    std::filesystem::remove_all(dir);

    SummaryStats stats = run_experiment(cfg);
    CaseOutput out = write_case_outputs(dir, "unitrun", cfg, stats);
    CHECK(out.csv_path == dir + "/unitrun_unit.csv");

    const std::string csv = slurp(out.csv_path);
    CHECK(csv.find("# config_hash=" + config_hash_hex(cfg)) == 0);
    CHECK(csv.find("master_seed=99") != std::string::npos);
    CHECK(csv.find("checkpoint_t,mean_cum_regret,lo95,hi95,policy,case_label") !=
          std::string::npos);

    const json sidecar = json::parse(slurp(out.sidecar_path));
    CHECK(sidecar.at("config_hash") == config_hash_hex(cfg));
    CHECK(sidecar.at("case_label") == "unit");
    CHECK(sidecar.at("checkpoints").size() == stats.checkpoints.size());
    CHECK(sidecar.at("final_mean") == stats.final_mean);

    // the sidecar's embedded config reruns to the identical file
    ExperimentConfig re = parse_config_json(sidecar);
    SummaryStats stats2 = run_experiment(re.cases[0]);
    CaseOutput out2 = write_case_outputs(dir + "_again", "unitrun", re.cases[0], stats2);
    CHECK(slurp(out2.csv_path) == csv);

    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(dir + "_again");
}

TEST_CASE("policy construction follows the case config") {
    CaseConfig cfg = small_case();
    ModelParams truth = build_truth(cfg, 0);
    CHECK(std::string(make_policy(cfg, truth)->name()) == "fa_dcm_p");
    cfg.policy.kind = PolicyKind::FaDcm;
    CHECK(std::string(make_policy(cfg, truth)->name()) == "fa_dcm");
    cfg.policy.kind = PolicyKind::Ete;
    CHECK(std::string(make_policy(cfg, truth)->name()) == "ete");
    cfg.policy.kind = PolicyKind::Oracle;
    auto oracle = make_policy(cfg, truth);
    Rng rng(1);
    Catalog cat = Catalog::grouped(cfg.catalog.items_per_category);
    Slate best = optimal_slate(cat, truth.relevance.values(), truth.discount);
    CHECK(oracle->select(1, rng).order == best.order);
}
