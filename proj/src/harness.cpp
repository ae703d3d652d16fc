#include "fadcm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "fadcm/optimizer.hpp"
#include "fadcm/rng.hpp"
#include "fadcm/simulator.hpp"

namespace fadcm {

const char* policy_kind_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::FaDcmP: return "fa_dcm_p";
        case PolicyKind::FaDcm: return "fa_dcm";
        case PolicyKind::Ete: return "ete";
        case PolicyKind::Oracle: return "oracle";
    }
    return "unknown";
}

void validate_case(const CaseConfig& cfg) {
    if (cfg.label.empty()) {
        throw ConfigError("label: must be non-empty");
    }
    if (cfg.catalog.items_per_category.empty()) {
        throw ConfigError("catalog: items_per_category must be non-empty");
    }
    for (int n : cfg.catalog.items_per_category) {
        if (n <= 0) throw ConfigError("catalog: items_per_category entries must be positive");
    }
    std::size_t n_items = 0;
    for (int n : cfg.catalog.items_per_category) n_items += static_cast<std::size_t>(n);

    if (!cfg.relevance.fixed.empty()) {
        if (cfg.relevance.fixed.size() != n_items) {
            throw ConfigError("relevance: fixed vector has " +
                              std::to_string(cfg.relevance.fixed.size()) + " entries for " +
                              std::to_string(n_items) + " items");
        }
        for (double u : cfg.relevance.fixed) {
            if (!(u >= 0.0 && u <= 1.0)) {
                throw ConfigError("relevance: fixed entries must lie in [0,1]");
            }
        }
    } else {
        if (!(cfg.relevance.lo >= 0.0 && cfg.relevance.lo <= cfg.relevance.hi &&
              cfg.relevance.hi <= 1.0)) {
            throw ConfigError("relevance: draw range must satisfy 0 <= lo <= hi <= 1");
        }
    }

    if (cfg.discount.exponential) {
        if (!(cfg.discount.kappa >= 0.0)) {
            throw ConfigError("discount: kappa must be non-negative");
        }
        if (cfg.discount.plateau_index && *cfg.discount.plateau_index < 0) {
            throw ConfigError("discount: m must be non-negative");
        }
    } else {
        try {
            DiscountCurve check(cfg.discount.table);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("discount: ") + e.what());
        }
    }

    if (!(cfg.q >= 0.0 && cfg.q <= cfg.g && cfg.g <= 1.0)) {
        throw ConfigError("behavior: requires 0 <= q <= g <= 1");
    }
    if (cfg.horizon < 1) throw ConfigError("horizon: must be at least 1");
    if (cfg.replications < 1) throw ConfigError("replications: must be at least 1");
    if (cfg.checkpoint_every < 1) throw ConfigError("checkpoint_every: must be at least 1");

    if (!(cfg.policy.alpha >= 0.0)) throw ConfigError("policy: alpha must be non-negative");
    if (!(cfg.policy.beta >= 0.0)) throw ConfigError("policy: beta must be non-negative");
    if (cfg.policy.pool_index && *cfg.policy.pool_index < 0) {
        throw ConfigError("policy: m must be non-negative");
    }
}

namespace {

int resolved_plateau(const CaseConfig& cfg, const Catalog& catalog) {
    if (cfg.discount.plateau_index) return *cfg.discount.plateau_index;
    return default_pool_index(catalog);
}

DiscountCurve build_curve(const CaseConfig& cfg, const Catalog& catalog) {
    if (cfg.discount.exponential) {
        return DiscountCurve::exponential(cfg.discount.kappa, resolved_plateau(cfg, catalog));
    }
    return DiscountCurve(cfg.discount.table);
}

} // namespace

ModelParams build_truth(const CaseConfig& cfg, int replication) {
    Catalog catalog = Catalog::grouped(cfg.catalog.items_per_category);
    std::vector<double> u;
    if (!cfg.relevance.fixed.empty()) {
        u = cfg.relevance.fixed;
    } else {
        Rng rng(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(replication), 0,
                            Stream::Truth));
        u.resize(static_cast<std::size_t>(catalog.n_items()));
        for (double& v : u) v = rng.uniform(cfg.relevance.lo, cfg.relevance.hi);
    }
    return ModelParams(catalog, Relevance(std::move(u)), build_curve(cfg, catalog),
                       BehaviorParams(cfg.g, cfg.q));
}

std::unique_ptr<Policy> make_policy(const CaseConfig& cfg, const ModelParams& truth) {
    switch (cfg.policy.kind) {
        case PolicyKind::FaDcmP:
            return std::make_unique<FaDcmPPolicy>(truth.catalog, truth.discount);
        case PolicyKind::FaDcm: {
            FaDcmOptions opts;
            opts.alpha = cfg.policy.alpha;
            opts.threshold_mode = cfg.policy.threshold_mode;
            opts.delta_form = cfg.policy.delta_form;
            opts.pool_index = cfg.policy.pool_index;
            opts.horizon = cfg.horizon;
            return std::make_unique<FaDcmPolicy>(truth.catalog, opts);
        }
        case PolicyKind::Ete: {
            EteOptions opts;
            opts.beta = cfg.policy.beta;
            opts.pool_index = cfg.policy.pool_index;
            return std::make_unique<EtePolicy>(truth.catalog, opts);
        }
        case PolicyKind::Oracle:
            return std::make_unique<OraclePolicy>(
                optimal_slate(truth.catalog, truth.relevance.values(), truth.discount));
    }
    throw ConfigError("policy: unknown kind");
}

double instantaneous_regret(const ModelParams& truth, const Slate& offered) {
    const Slate best = optimal_slate(truth.catalog, truth.relevance.values(), truth.discount);
    const double gap = expected_reward(best, truth) - expected_reward(offered, truth);
    return std::max(gap, 0.0);
}

RegretSeries run_replication(const CaseConfig& cfg, int replication,
                             ReplicationArtifacts* artifacts) {
    validate_case(cfg);
    const ModelParams truth = build_truth(cfg, replication);
    const Slate best = optimal_slate(truth.catalog, truth.relevance.values(), truth.discount);
    const double best_reward = expected_reward(best, truth);
    std::unique_ptr<Policy> policy = make_policy(cfg, truth);

    RegretSeries series;
    series.instantaneous.reserve(cfg.horizon);
    series.cumulative.reserve(cfg.horizon);
    double cum = 0.0;
    const std::uint64_t rep = static_cast<std::uint64_t>(replication);

    for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
        Rng policy_rng(derive_seed(cfg.master_seed, rep, t, Stream::Policy));
        Rng session_rng(derive_seed(cfg.master_seed, rep, t, Stream::Session));

        const Slate offered = policy->select(t, policy_rng);
        double r = best_reward - expected_reward(offered, truth);
        if (r < -1e-9) {
            throw std::logic_error("run_replication: offered slate beat the optimal slate by " +
                                   std::to_string(-r) + "; ranking is broken");
        }
        r = std::max(r, 0.0);

        const InteractionRecord rec = simulate_session(offered, truth, session_rng);
        policy->observe(rec);

        if (artifacts && artifacts->record_sessions) {
            artifacts->sessions.push_back(session_to_json(t, rec));
        }

        cum += r;
        series.instantaneous.push_back(r);
        series.cumulative.push_back(cum);
    }

    if (artifacts) {
        artifacts->policy_snapshot = policy->snapshot();
    }
    return series;
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values[0];
    const double pos = (static_cast<double>(values.size()) - 1.0) * p / 100.0;
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

SummaryStats run_experiment(const CaseConfig& cfg, int jobs,
                            const std::function<void(int, int)>& on_replication_done) {
    validate_case(cfg);
    const int reps = cfg.replications;
    std::vector<RegretSeries> all(static_cast<std::size_t>(reps));

    jobs = std::clamp(jobs, 1, reps);
    if (jobs == 1) {
        for (int r = 0; r < reps; ++r) {
            all[static_cast<std::size_t>(r)] = run_replication(cfg, r);
            if (on_replication_done) on_replication_done(r, reps);
        }
    } else {
        std::atomic<int> next{0};
        std::mutex mu;
        std::exception_ptr failure;
        auto worker = [&] {
            for (;;) {
                const int r = next.fetch_add(1);
                if (r >= reps) return;
                try {
                    all[static_cast<std::size_t>(r)] = run_replication(cfg, r);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!failure) failure = std::current_exception();
                    return;
                }
                if (on_replication_done) {
                    std::lock_guard<std::mutex> lock(mu);
                    on_replication_done(r, reps);
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    SummaryStats stats;
    for (std::uint64_t t = cfg.checkpoint_every; t <= cfg.horizon; t += cfg.checkpoint_every) {
        stats.checkpoints.push_back(t);
    }
    if (stats.checkpoints.empty() || stats.checkpoints.back() != cfg.horizon) {
        stats.checkpoints.push_back(cfg.horizon);
    }

    std::vector<double> at_cp(static_cast<std::size_t>(reps));
    for (std::uint64_t cp : stats.checkpoints) {
        for (int r = 0; r < reps; ++r) {
            at_cp[static_cast<std::size_t>(r)] =
                all[static_cast<std::size_t>(r)].cumulative[cp - 1];
        }
        double mean = 0.0;
        for (double v : at_cp) mean += v;
        mean /= static_cast<double>(reps);
        stats.mean_cum.push_back(mean);
        stats.lo95.push_back(percentile(at_cp, 2.5));
        stats.hi95.push_back(percentile(at_cp, 97.5));
    }

    stats.final_per_replication.resize(static_cast<std::size_t>(reps));
    for (int r = 0; r < reps; ++r) {
        stats.final_per_replication[static_cast<std::size_t>(r)] =
            all[static_cast<std::size_t>(r)].cumulative.back();
    }
    stats.final_mean = stats.mean_cum.back();
    return stats;
}

// ---------------------------------------------------------------------------
// Presets

ExperimentConfig preset(const std::string& raw) {
    std::string name;
    for (char ch : raw) name.push_back(static_cast<char>(std::toupper(ch)));
    if (name == "1") name = "I";
    if (name == "2") name = "II";
    if (name == "3") name = "III";
    if (name == "4") name = "IV";

    CaseConfig base;
    base.catalog.items_per_category = {10, 10, 10};
    base.relevance.lo = 0.0;
    base.relevance.hi = 0.5;
    base.discount.exponential = true;
    base.discount.kappa = 0.1;
    base.q = 0.7;
    base.horizon = 10000;
    base.replications = 20;
    base.master_seed = 1234;
    base.checkpoint_every = 100;

    ExperimentConfig exp;
    if (name == "I") {
        exp.name = "expI";
        base.policy.kind = PolicyKind::FaDcmP;
        const double gs[] = {0.95, 0.85, 0.75};
        for (int i = 0; i < 3; ++i) {
            CaseConfig c = base;
            c.label = "case" + std::to_string(i + 1);
            c.g = gs[i];
            exp.cases.push_back(std::move(c));
        }
    } else if (name == "II") {
        exp.name = "expII";
        base.policy.kind = PolicyKind::FaDcm;
        const double gs[] = {0.85, 0.85, 0.75};
        const double kappas[] = {0.1, 0.15, 0.1};
        for (int i = 0; i < 3; ++i) {
            CaseConfig c = base;
            c.label = "case" + std::to_string(i + 4);
            c.g = gs[i];
            c.discount.kappa = kappas[i];
            exp.cases.push_back(std::move(c));
        }
    } else if (name == "III") {
        exp.name = "expIII";
        base.g = 0.75;
        CaseConfig fadcm = base;
        fadcm.label = "case7_fadcm";
        fadcm.policy.kind = PolicyKind::FaDcm;
        CaseConfig ete = base;
        ete.label = "case7_ete";
        ete.policy.kind = PolicyKind::Ete;
        exp.cases.push_back(std::move(fadcm));
        exp.cases.push_back(std::move(ete));
    } else if (name == "IV") {
        exp.name = "expIV";
        base.catalog.items_per_category = {20, 20, 20, 20, 20};
        base.g = 0.843;
        base.q = 0.823;
        CaseConfig fadcm = base;
        fadcm.label = "case8_fadcm";
        fadcm.policy.kind = PolicyKind::FaDcm;
        CaseConfig ete = base;
        ete.label = "case8_ete";
        ete.policy.kind = PolicyKind::Ete;
        exp.cases.push_back(std::move(fadcm));
        exp.cases.push_back(std::move(ete));
    } else {
        throw ConfigError("preset: unknown name '" + raw + "' (expected I, II, III or IV)");
    }
    return exp;
}

// ---------------------------------------------------------------------------
// Config JSON

namespace {

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const std::string& context) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            if (key == a) {
                ok = true;
                break;
            }
        }
        if (!ok) throw ConfigError(context + ": unknown field '" + key + "'");
    }
}

PolicyKind parse_policy_kind(const std::string& s) {
    if (s == "fa_dcm_p") return PolicyKind::FaDcmP;
    if (s == "fa_dcm") return PolicyKind::FaDcm;
    if (s == "ete") return PolicyKind::Ete;
    if (s == "oracle") return PolicyKind::Oracle;
    throw ConfigError("policy: unknown kind '" + s +
                      "' (expected fa_dcm_p, fa_dcm, ete or oracle)");
}

CaseConfig parse_case_json(const nlohmann::json& j, const std::string& default_label) {
    if (!j.is_object()) throw ConfigError("case: expected a JSON object");
    reject_unknown_keys(j,
                        {"label", "catalog", "relevance", "discount", "behavior", "horizon",
                         "replications", "policy", "master_seed", "checkpoint_every"},
                        "case");

    CaseConfig cfg;
    cfg.label = j.value("label", default_label);

    if (!j.contains("catalog")) throw ConfigError("catalog: required");
    {
        const auto& jc = j.at("catalog");
        reject_unknown_keys(jc, {"n_categories", "items_per_category"}, "catalog");
        if (!jc.contains("items_per_category")) {
            throw ConfigError("catalog: items_per_category required");
        }
        const auto& jitems = jc.at("items_per_category");
        std::vector<int> counts;
        if (jitems.is_number_integer()) {
            if (!jc.contains("n_categories")) {
                throw ConfigError("catalog: n_categories required with scalar items_per_category");
            }
            const int k = jc.at("n_categories").get<int>();
            if (k <= 0) throw ConfigError("catalog: n_categories must be positive");
            counts.assign(static_cast<std::size_t>(k), jitems.get<int>());
        } else if (jitems.is_array()) {
            counts = jitems.get<std::vector<int>>();
            if (jc.contains("n_categories") &&
                jc.at("n_categories").get<int>() != static_cast<int>(counts.size())) {
                throw ConfigError("catalog: n_categories disagrees with items_per_category");
            }
        } else {
            throw ConfigError("catalog: items_per_category must be an integer or array");
        }
        cfg.catalog.items_per_category = std::move(counts);
    }

    if (j.contains("relevance")) {
        const auto& jr = j.at("relevance");
        reject_unknown_keys(jr, {"draw", "lo", "hi", "fixed"}, "relevance");
        if (jr.contains("fixed")) {
            cfg.relevance.fixed = jr.at("fixed").get<std::vector<double>>();
        } else {
            if (jr.contains("draw") && jr.at("draw").get<std::string>() != "uniform") {
                throw ConfigError("relevance: only 'uniform' draws are supported");
            }
            cfg.relevance.lo = jr.value("lo", 0.0);
            cfg.relevance.hi = jr.value("hi", 0.5);
        }
    }

    if (j.contains("discount")) {
        const auto& jd = j.at("discount");
        reject_unknown_keys(jd, {"kind", "kappa", "m", "values"}, "discount");
        const std::string kind = jd.value("kind", "exponential");
        if (kind == "exponential") {
            cfg.discount.exponential = true;
            cfg.discount.kappa = jd.value("kappa", 0.1);
            if (jd.contains("m")) cfg.discount.plateau_index = jd.at("m").get<int>();
        } else if (kind == "table") {
            cfg.discount.exponential = false;
            if (!jd.contains("values")) throw ConfigError("discount: table needs 'values'");
            cfg.discount.table = jd.at("values").get<std::vector<double>>();
        } else {
            throw ConfigError("discount: unknown kind '" + kind + "'");
        }
    }

    if (j.contains("behavior")) {
        const auto& jb = j.at("behavior");
        reject_unknown_keys(jb, {"g", "q"}, "behavior");
        cfg.g = jb.value("g", cfg.g);
        cfg.q = jb.value("q", cfg.q);
    }

    cfg.horizon = j.value("horizon", cfg.horizon);
    cfg.replications = j.value("replications", cfg.replications);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.checkpoint_every = j.value("checkpoint_every", cfg.checkpoint_every);

    if (j.contains("policy")) {
        const auto& jp = j.at("policy");
        reject_unknown_keys(jp, {"kind", "alpha", "threshold_mode", "delta_form", "m", "beta"},
                            "policy");
        cfg.policy.kind = parse_policy_kind(jp.value("kind", "fa_dcm"));
        cfg.policy.alpha = jp.value("alpha", cfg.policy.alpha);
        cfg.policy.beta = jp.value("beta", cfg.policy.beta);
        if (jp.contains("m")) cfg.policy.pool_index = jp.at("m").get<int>();
        if (jp.contains("threshold_mode")) {
            const std::string mode = jp.at("threshold_mode").get<std::string>();
            if (mode == "anytime") {
                cfg.policy.threshold_mode = ThresholdMode::Anytime;
            } else if (mode == "fixed_horizon") {
                cfg.policy.threshold_mode = ThresholdMode::FixedHorizon;
            } else {
                throw ConfigError("policy: unknown threshold_mode '" + mode + "'");
            }
        }
        if (jp.contains("delta_form")) {
            const std::string form = jp.at("delta_form").get<std::string>();
            if (form == "inverse") {
                cfg.policy.delta_form = DeltaForm::Inverse;
            } else if (form == "literal") {
                cfg.policy.delta_form = DeltaForm::Literal;
            } else {
                throw ConfigError("policy: unknown delta_form '" + form + "'");
            }
        }
    }

    validate_case(cfg);
    return cfg;
}

} // namespace

ExperimentConfig parse_config_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object at top level");
    try {
        if (j.contains("cases")) {
            reject_unknown_keys(j, {"name", "cases"}, "config");
            ExperimentConfig exp;
            exp.name = j.value("name", "run");
            const auto& jcases = j.at("cases");
            if (!jcases.is_array() || jcases.empty()) {
                throw ConfigError("config: 'cases' must be a non-empty array");
            }
            int idx = 1;
            for (const auto& jc : jcases) {
                exp.cases.push_back(parse_case_json(jc, "case" + std::to_string(idx)));
                ++idx;
            }
            return exp;
        }
        if (j.contains("config")) {
            // Sidecar files embed the resolved case under "config"; accept them
            // directly so any run can be repeated from its own output.
            ExperimentConfig exp;
            exp.cases.push_back(parse_case_json(j.at("config"), "case1"));
            exp.name = j.value("experiment", exp.name);
            return exp;
        }
        ExperimentConfig exp;
        exp.cases.push_back(parse_case_json(j, "case1"));
        return exp;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config_json(j);
}

nlohmann::json resolved_case_json(const CaseConfig& cfg) {
    nlohmann::json j;
    j["label"] = cfg.label;
    j["catalog"] = {{"n_categories", cfg.catalog.items_per_category.size()},
                    {"items_per_category", cfg.catalog.items_per_category}};
    if (!cfg.relevance.fixed.empty()) {
        j["relevance"] = {{"fixed", cfg.relevance.fixed}};
    } else {
        j["relevance"] = {{"draw", "uniform"}, {"lo", cfg.relevance.lo}, {"hi", cfg.relevance.hi}};
    }
    if (cfg.discount.exponential) {
        j["discount"] = {{"kind", "exponential"}, {"kappa", cfg.discount.kappa}};
        if (cfg.discount.plateau_index) j["discount"]["m"] = *cfg.discount.plateau_index;
    } else {
        j["discount"] = {{"kind", "table"}, {"values", cfg.discount.table}};
    }
    j["behavior"] = {{"g", cfg.g}, {"q", cfg.q}};
    j["horizon"] = cfg.horizon;
    j["replications"] = cfg.replications;
    j["master_seed"] = cfg.master_seed;
    j["checkpoint_every"] = cfg.checkpoint_every;

    nlohmann::json jp{{"kind", policy_kind_name(cfg.policy.kind)}};
    if (cfg.policy.kind == PolicyKind::FaDcm) {
        jp["alpha"] = cfg.policy.alpha;
        jp["threshold_mode"] =
            cfg.policy.threshold_mode == ThresholdMode::Anytime ? "anytime" : "fixed_horizon";
        jp["delta_form"] = cfg.policy.delta_form == DeltaForm::Inverse ? "inverse" : "literal";
        if (cfg.policy.pool_index) jp["m"] = *cfg.policy.pool_index;
    } else if (cfg.policy.kind == PolicyKind::Ete) {
        jp["beta"] = cfg.policy.beta;
        if (cfg.policy.pool_index) jp["m"] = *cfg.policy.pool_index;
    }
    j["policy"] = std::move(jp);
    return j;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string config_hash_hex(const CaseConfig& cfg) {
    const std::uint64_t h = fnv1a64(resolved_case_json(cfg).dump());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
}

} // namespace

nlohmann::json session_to_json(std::uint64_t t, const InteractionRecord& record) {
    return nlohmann::json{{"t", t},
                          {"slate", record.slate.order},
                          {"examined_len", record.examined_len},
                          {"clicks", record.clicks},
                          {"exit_cause", exit_cause_name(record.exit_cause)},
                          {"realized_clicks", record.realized_clicks}};
}

CaseOutput write_case_outputs(const std::string& out_dir, const std::string& name,
                              const CaseConfig& cfg, const SummaryStats& stats) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::string stem = name + "_" + cfg.label;
    CaseOutput out;
    out.csv_path = (fs::path(out_dir) / (stem + ".csv")).string();
    out.sidecar_path = (fs::path(out_dir) / (stem + ".json")).string();

    const std::string hash = config_hash_hex(cfg);
    const char* policy = policy_kind_name(cfg.policy.kind);

    std::ofstream csv(out.csv_path);
    if (!csv) throw std::runtime_error("cannot write " + out.csv_path);
    csv << "# config_hash=" << hash << " master_seed=" << cfg.master_seed << "\n";
    csv << "checkpoint_t,mean_cum_regret,lo95,hi95,policy,case_label\n";
    for (std::size_t i = 0; i < stats.checkpoints.size(); ++i) {
        csv << stats.checkpoints[i] << ',' << format_double(stats.mean_cum[i]) << ','
            << format_double(stats.lo95[i]) << ',' << format_double(stats.hi95[i]) << ','
            << policy << ',' << cfg.label << "\n";
    }
    csv.close();

    nlohmann::json side;
    side["config"] = resolved_case_json(cfg);
    side["config_hash"] = hash;
    side["experiment"] = name;
    side["master_seed"] = cfg.master_seed;
    side["policy"] = policy;
    side["case_label"] = cfg.label;
    side["checkpoints"] = stats.checkpoints;
    side["mean_cum_regret"] = stats.mean_cum;
    side["lo95"] = stats.lo95;
    side["hi95"] = stats.hi95;
    side["final_per_replication"] = stats.final_per_replication;
    side["final_mean"] = stats.final_mean;

    std::ofstream js(out.sidecar_path);
    if (!js) throw std::runtime_error("cannot write " + out.sidecar_path);
    js << side.dump(2) << "\n";
    return out;
}

} // namespace fadcm
