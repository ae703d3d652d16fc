#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fadcm/model.hpp"
#include "fadcm/policies.hpp"

namespace fadcm {

enum class PolicyKind { FaDcmP, FaDcm, Ete, Oracle };

const char* policy_kind_name(PolicyKind kind);

struct CatalogSpec {
    std::vector<int> items_per_category;
};

struct RelevanceSpec {
    std::vector<double> fixed; // takes precedence when non-empty
    double lo = 0.0;
    double hi = 0.5;
};

struct DiscountSpec {
    bool exponential = true;
    double kappa = 0.1;
    std::optional<int> plateau_index; // defaults to max category size - 1
    std::vector<double> table;        // used when exponential is false
};

struct PolicySpec {
    PolicyKind kind = PolicyKind::FaDcm;
    double alpha = 0.3;
    ThresholdMode threshold_mode = ThresholdMode::Anytime;
    DeltaForm delta_form = DeltaForm::Inverse;
    std::optional<int> pool_index;
    double beta = 50.0;
};

struct CaseConfig {
    std::string label = "case";
    CatalogSpec catalog;
    RelevanceSpec relevance;
    DiscountSpec discount;
    double g = 0.85;
    double q = 0.7;
    std::uint64_t horizon = 10000;
    int replications = 20;
    PolicySpec policy;
    std::uint64_t master_seed = 1234;
    std::uint64_t checkpoint_every = 100;
};

struct ExperimentConfig {
    std::string name = "run";
    std::vector<CaseConfig> cases;
};

struct RegretSeries {
    std::vector<double> instantaneous;
    std::vector<double> cumulative;
};

struct SummaryStats {
    std::vector<std::uint64_t> checkpoints;
    std::vector<double> mean_cum;
    std::vector<double> lo95;
    std::vector<double> hi95;
    std::vector<double> final_per_replication;
    double final_mean = 0.0;
};

// Throws ConfigError naming the violated field.
void validate_case(const CaseConfig& cfg);

// True environment for one replication; relevance draws come from the
// replication's own truth stream.
ModelParams build_truth(const CaseConfig& cfg, int replication);

std::unique_ptr<Policy> make_policy(const CaseConfig& cfg, const ModelParams& truth);

// Gap between the optimal slate's expected reward and the offered slate's,
// both under the truth. Never negative up to rounding.
double instantaneous_regret(const ModelParams& truth, const Slate& offered);

// Optional side products of a replication (debug dumps).
struct ReplicationArtifacts {
    bool record_sessions = false;
    std::vector<nlohmann::json> sessions;
    nlohmann::json policy_snapshot;
};

RegretSeries run_replication(const CaseConfig& cfg, int replication,
                             ReplicationArtifacts* artifacts = nullptr);

// Runs all replications (in a small work pool when jobs > 1) and aggregates
// mean cumulative regret plus the 2.5/97.5 percentile band at checkpoints.
// Deterministic regardless of jobs or scheduling.
SummaryStats run_experiment(const CaseConfig& cfg, int jobs = 1,
                            const std::function<void(int, int)>& on_replication_done = {});

// Built-in experiment suites: "I".."IV" (also accepts "1".."4", case-insensitive).
ExperimentConfig preset(const std::string& name);

ExperimentConfig parse_config_json(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);

// Fully resolved (defaults materialized) case description; feeds the config
// hash, the sidecar, and `preset --show`. Parses back via parse_config_json.
nlohmann::json resolved_case_json(const CaseConfig& cfg);

std::uint64_t fnv1a64(const std::string& bytes);
std::string config_hash_hex(const CaseConfig& cfg);

struct CaseOutput {
    std::string csv_path;
    std::string sidecar_path;
};

// Writes <out_dir>/<name>_<label>.csv and .json; both embed the config hash
// and master seed.
CaseOutput write_case_outputs(const std::string& out_dir, const std::string& name,
                              const CaseConfig& cfg, const SummaryStats& stats);

nlohmann::json session_to_json(std::uint64_t t, const InteractionRecord& record);

// Percentile with linear interpolation between order statistics; p in [0,100].
double percentile(std::vector<double> values, double p);

} // namespace fadcm
