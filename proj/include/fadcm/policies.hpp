#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"

#include "fadcm/model.hpp"
#include "fadcm/rng.hpp"
#include "fadcm/simulator.hpp"

namespace fadcm {

// Which round count feeds the forced-exploration threshold alpha * (.)^{2/3}:
// the current round t, or the fixed horizon T.
enum class ThresholdMode { Anytime, FixedHorizon };

// Shape of the correction factor (1 - (1/u_hat) * sqrt(log t / T_0j)) inside
// the discount-curve exploration bonus: divided (default) or multiplied.
enum class DeltaForm { Inverse, Literal };

// Forward pass i = 1..M: f[i] <- min(f[i], f[i-1]). Entry 0 is the caller's
// responsibility (pin to 1 before calling).
std::vector<double> monotone_repair(std::vector<double> f_ucb);

class Policy {
public:
    virtual ~Policy() = default;
    virtual const char* name() const = 0;
    // t is the 1-based round index. rng carries the policy's own randomness;
    // deterministic policies ignore it.
    virtual Slate select(std::uint64_t t, Rng& rng) = 0;
    virtual void observe(const InteractionRecord& record) = 0;
    virtual nlohmann::json snapshot() const = 0;
};

// Optimistic index policy for the known-discount setting: learns item
// relevance only. Each examined event (i, j, z) contributes z / f(i) to item
// j's reweighted click sum.
class FaDcmPPolicy : public Policy {
public:
    FaDcmPPolicy(Catalog catalog, DiscountCurve known_f);

    const char* name() const override { return "fa_dcm_p"; }
    Slate select(std::uint64_t t, Rng& rng) override;
    void observe(const InteractionRecord& record) override;
    nlohmann::json snapshot() const override;

    // Index per item at (possibly fractional) round count t: empirical mean
    // plus sqrt(2 log t / T_j); 1 while T_j = 0.
    std::vector<double> ucb_values(double t) const;
    const std::vector<std::uint64_t>& exposure_counts() const { return t_j_; }
    const std::vector<double>& reweighted_click_sums() const { return sum_z_over_f_; }
    std::uint64_t rounds_observed() const { return rounds_observed_; }

private:
    Catalog catalog_;
    DiscountCurve f_;
    std::vector<std::uint64_t> t_j_;
    std::vector<double> sum_z_over_f_;
    std::uint64_t rounds_observed_ = 0;
};

struct FaDcmOptions {
    double alpha = 0.3;
    ThresholdMode threshold_mode = ThresholdMode::Anytime;
    DeltaForm delta_form = DeltaForm::Inverse;
    // Discount indices are pooled at min(i, pool_index); defaults to the
    // largest category size minus one (no pooling in effect).
    std::optional<int> pool_index;
    // Required when threshold_mode is FixedHorizon.
    std::uint64_t horizon = 0;
};

// Optimistic policy for the unknown-discount setting: learns both item
// relevance (from first-of-category events) and the discount curve, with
// forced exploration of under-sampled items at the slate front.
class FaDcmPolicy : public Policy {
public:
    FaDcmPolicy(Catalog catalog, FaDcmOptions opts);

    const char* name() const override { return "fa_dcm"; }
    Slate select(std::uint64_t t, Rng& rng) override;
    void observe(const InteractionRecord& record) override;
    nlohmann::json snapshot() const override;

    struct Indices {
        std::vector<double> u_ucb;
        std::vector<double> f_ucb; // raw: before pinning f[0] and repair
    };
    struct Estimates {
        std::vector<double> u_hat; // 0 while an item has no depth-0 exposure
        std::vector<double> f_hat; // 1 while a depth has no events
    };
    // Plug-in means with no exploration widths attached.
    Estimates point_estimates() const;
    Indices indices(double t) const;
    // f index made usable for ranking: entry 0 pinned to 1, then repaired.
    std::vector<double> repaired_f(double t) const;

    int pool_index() const { return m_; }
    const std::vector<std::vector<std::uint64_t>>& event_counts() const { return t_ij_; }
    const std::vector<std::vector<std::uint64_t>>& event_clicks() const { return clicks_ij_; }
    const std::vector<std::uint64_t>& index_totals() const { return t_hat_; }
    std::uint64_t rounds_observed() const { return rounds_observed_; }

private:
    Catalog catalog_;
    FaDcmOptions opts_;
    int m_;
    std::vector<std::vector<std::uint64_t>> t_ij_;
    std::vector<std::vector<std::uint64_t>> clicks_ij_;
    std::vector<std::uint64_t> t_hat_;
    std::uint64_t rounds_observed_ = 0;
};

struct EteOptions {
    double beta = 50.0;
    std::optional<int> pool_index;
};

// Explore-then-exploit benchmark. Round t explores (uniformly random
// permutation) while fewer than beta * log t exploration rounds have
// happened, round 1 always; otherwise it plays the greedy slate under
// empirical means with unknowns defaulting to 1.
class EtePolicy : public Policy {
public:
    EtePolicy(Catalog catalog, EteOptions opts);

    const char* name() const override { return "ete"; }
    Slate select(std::uint64_t t, Rng& rng) override;
    void observe(const InteractionRecord& record) override;
    nlohmann::json snapshot() const override;

    std::uint64_t exploration_rounds() const { return exploration_rounds_; }
    std::vector<double> empirical_u() const;
    std::vector<double> empirical_f() const;

private:
    Catalog catalog_;
    EteOptions opts_;
    int m_;
    std::vector<std::vector<std::uint64_t>> t_ij_;
    std::vector<std::vector<std::uint64_t>> clicks_ij_;
    std::vector<std::uint64_t> t_hat_;
    std::uint64_t exploration_rounds_ = 0;
    std::uint64_t rounds_observed_ = 0;
};

// Clairvoyant baseline: plays the truth-optimal slate every round.
class OraclePolicy : public Policy {
public:
    explicit OraclePolicy(Slate best);

    const char* name() const override { return "oracle"; }
    Slate select(std::uint64_t t, Rng& rng) override;
    void observe(const InteractionRecord& record) override;
    nlohmann::json snapshot() const override;

private:
    Slate best_;
    std::uint64_t rounds_observed_ = 0;
};

// Largest observable discount index for the catalog (max category size - 1).
int default_pool_index(const Catalog& catalog);

} // namespace fadcm
