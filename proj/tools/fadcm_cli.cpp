#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fadcm/harness.hpp"
#include "fadcm/optimizer.hpp"

namespace {

struct Overrides {
    bool has_seed = false;
    std::uint64_t seed = 0;
    bool has_horizon = false;
    std::uint64_t horizon = 0;
    bool has_replications = false;
    int replications = 0;
    bool has_checkpoint = false;
    std::uint64_t checkpoint_every = 0;
};

void apply_overrides(fadcm::ExperimentConfig& exp, const Overrides& ov) {
    for (auto& c : exp.cases) {
        if (ov.has_seed) c.master_seed = ov.seed;
        if (ov.has_horizon) c.horizon = ov.horizon;
        if (ov.has_replications) c.replications = ov.replications;
        if (ov.has_checkpoint) c.checkpoint_every = ov.checkpoint_every;
    }
}

int run_cases(const fadcm::ExperimentConfig& exp, const std::string& out_dir, int jobs,
              bool dump_sessions, bool dump_policy_state) {
    for (const auto& cfg : exp.cases) {
        fadcm::validate_case(cfg);
    }
    for (const auto& cfg : exp.cases) {
        auto progress = [&](int rep, int total) {
            std::cerr << exp.name << "/" << cfg.label << ": replication " << rep + 1 << "/"
                      << total << " done\n";
        };
        const fadcm::SummaryStats stats = fadcm::run_experiment(cfg, jobs, progress);
        const fadcm::CaseOutput files = fadcm::write_case_outputs(out_dir, exp.name, cfg, stats);

        nlohmann::json line{{"case", cfg.label},
                            {"policy", fadcm::policy_kind_name(cfg.policy.kind)},
                            {"final_mean_cum_regret", stats.final_mean},
                            {"csv", files.csv_path},
                            {"sidecar", files.sidecar_path},
                            {"config_hash", fadcm::config_hash_hex(cfg)},
                            {"master_seed", cfg.master_seed}};

        if (dump_sessions || dump_policy_state) {
            fadcm::ReplicationArtifacts artifacts;
            artifacts.record_sessions = dump_sessions;
            fadcm::run_replication(cfg, 0, &artifacts);
            const std::string stem = out_dir + "/" + exp.name + "_" + cfg.label;
            if (dump_sessions) {
                const std::string path = stem + "_sessions.ndjson";
                std::ofstream nd(path);
                if (!nd) throw std::runtime_error("cannot write " + path);
                for (const auto& s : artifacts.sessions) nd << s.dump() << "\n";
                line["sessions"] = path;
            }
            if (dump_policy_state) {
                const std::string path = stem + "_policy.json";
                std::ofstream ps(path);
                if (!ps) throw std::runtime_error("cannot write " + path);
                ps << artifacts.policy_snapshot.dump(2) << "\n";
                line["policy_state"] = path;
            }
        }
        std::cout << line.dump() << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fatigue-aware click-model bandit simulator"};
    app.require_subcommand(1);

    unsigned hw = std::thread::hardware_concurrency();
    int jobs = hw > 0 ? static_cast<int>(hw) : 1;
    std::string out_dir = "results";
    Overrides ov;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
        cmd->add_option("--jobs", jobs, "replication work-pool size")->capture_default_str();
        cmd->add_option("--seed", ov.seed, "master seed override")
            ->each([&](const std::string&) { ov.has_seed = true; });
        cmd->add_option("--horizon", ov.horizon, "rounds per replication override")
            ->each([&](const std::string&) { ov.has_horizon = true; });
        cmd->add_option("--replications", ov.replications, "replication count override")
            ->each([&](const std::string&) { ov.has_replications = true; });
        cmd->add_option("--checkpoint-every", ov.checkpoint_every, "checkpoint spacing override")
            ->each([&](const std::string&) { ov.has_checkpoint = true; });
    };

    std::string config_path;
    bool dump_sessions = false;
    bool dump_policy_state = false;
    CLI::App* cmd_run = app.add_subcommand("run", "run experiments from a JSON config file");
    cmd_run->add_option("--config", config_path, "config file (JSON)")->required();
    add_common(cmd_run);
    cmd_run->add_flag("--dump-sessions", dump_sessions,
                      "write replication 0's sessions as NDJSON");
    cmd_run->add_flag("--dump-policy-state", dump_policy_state,
                      "write replication 0's final policy state as JSON");

    std::string preset_name;
    bool show_only = false;
    CLI::App* cmd_preset = app.add_subcommand("preset", "run a built-in experiment suite");
    cmd_preset->add_option("name", preset_name, "suite name: I, II, III or IV")->required();
    add_common(cmd_preset);
    cmd_preset->add_flag("--show", show_only, "print the resolved config and exit");
    cmd_preset->add_flag("--dump-sessions", dump_sessions,
                         "write replication 0's sessions as NDJSON");
    cmd_preset->add_flag("--dump-policy-state", dump_policy_state,
                         "write replication 0's final policy state as JSON");

    int oc_instances = 1000;
    int oc_max_n = 7;
    int oc_max_k = 3;
    std::uint64_t oc_seed = 7;
    double oc_tolerance = 1e-12;
    bool oc_corrupt = false;
    CLI::App* cmd_oracle =
        app.add_subcommand("oracle-check", "cross-check the ranking rule against brute force");
    cmd_oracle->add_option("--instances", oc_instances, "random instances")->capture_default_str();
    cmd_oracle->add_option("--max-n", oc_max_n, "max items per instance (<= 8)")
        ->capture_default_str();
    cmd_oracle->add_option("--max-k", oc_max_k, "max categories per instance")
        ->capture_default_str();
    cmd_oracle->add_option("--seed", oc_seed, "suite seed")->capture_default_str();
    cmd_oracle->add_option("--tolerance", oc_tolerance, "max allowed reward gap")
        ->capture_default_str();
    cmd_oracle
        ->add_flag("--corrupt-lambda", oc_corrupt,
                   "negative control: sabotage the ranking before comparing")
        ->group("");

    std::uint64_t bench_horizon = 2000;
    CLI::App* cmd_bench = app.add_subcommand("bench", "time a short canned run");
    cmd_bench->add_option("--horizon", bench_horizon, "rounds")->capture_default_str();
    cmd_bench->add_option("--jobs", jobs, "work-pool size")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_run->parsed()) {
            fadcm::ExperimentConfig exp = fadcm::load_config_file(config_path);
            apply_overrides(exp, ov);
            return run_cases(exp, out_dir, jobs, dump_sessions, dump_policy_state);
        }
        if (cmd_preset->parsed()) {
            fadcm::ExperimentConfig exp = fadcm::preset(preset_name);
            apply_overrides(exp, ov);
            if (show_only) {
                nlohmann::json j{{"name", exp.name}};
                j["cases"] = nlohmann::json::array();
                for (const auto& c : exp.cases) j["cases"].push_back(fadcm::resolved_case_json(c));
                std::cout << j.dump(2) << "\n";
                return 0;
            }
            return run_cases(exp, out_dir, jobs, dump_sessions, dump_policy_state);
        }
        if (cmd_oracle->parsed()) {
            const fadcm::OracleCheckStats stats = fadcm::oracle_equivalence_suite(
                oc_instances, oc_max_n, oc_max_k, oc_seed, oc_tolerance, oc_corrupt);
            nlohmann::json line{{"instances", stats.instances},
                                {"failures", stats.failures},
                                {"max_abs_diff", stats.max_abs_diff}};
            std::cout << line.dump() << "\n";
            std::cerr << "oracle-check: " << stats.failures << " failures over "
                      << stats.instances << " instances\n";
            return stats.failures == 0 ? 0 : 1;
        }
        if (cmd_bench->parsed()) {
            fadcm::ExperimentConfig exp = fadcm::preset("I");
            fadcm::CaseConfig cfg = exp.cases[0];
            cfg.horizon = bench_horizon;
            cfg.replications = 2;
            const auto start = std::chrono::steady_clock::now();
            const fadcm::SummaryStats stats = fadcm::run_experiment(cfg, jobs);
            const auto elapsed = std::chrono::duration<double>(
                std::chrono::steady_clock::now() - start);
            const double rounds =
                static_cast<double>(cfg.horizon) * static_cast<double>(cfg.replications);
            nlohmann::json line{{"rounds", rounds},
                                {"seconds", elapsed.count()},
                                {"rounds_per_second", rounds / elapsed.count()},
                                {"final_mean_cum_regret", stats.final_mean}};
            std::cout << line.dump() << "\n";
            return 0;
        }
    } catch (const fadcm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
