#include "fadcm/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fadcm/optimizer.hpp"

namespace fadcm {

std::vector<double> monotone_repair(std::vector<double> f_ucb) {
    for (std::size_t i = 1; i < f_ucb.size(); ++i) {
        f_ucb[i] = std::min(f_ucb[i], f_ucb[i - 1]);
    }
    return f_ucb;
}

int default_pool_index(const Catalog& catalog) {
    int largest = 1;
    for (int c = 0; c < catalog.n_categories(); ++c) {
        largest = std::max(largest, static_cast<int>(catalog.items_in(c).size()));
    }
    return largest - 1;
}

namespace {

int resolve_pool_index(const Catalog& catalog, const std::optional<int>& requested) {
    if (!requested) return default_pool_index(catalog);
    if (*requested < 0) {
        throw std::invalid_argument("policy: pool index must be non-negative");
    }
    return *requested;
}

double log_clamped(double t) { return std::log(std::max(t, 1.0)); }

} // namespace

// ---------------------------------------------------------------------------
// FaDcmPPolicy

FaDcmPPolicy::FaDcmPPolicy(Catalog catalog, DiscountCurve known_f)
    : catalog_(std::move(catalog)),
      f_(std::move(known_f)),
      t_j_(static_cast<std::size_t>(catalog_.n_items()), 0),
      sum_z_over_f_(static_cast<std::size_t>(catalog_.n_items()), 0.0) {}

std::vector<double> FaDcmPPolicy::ucb_values(double t) const {
    std::vector<double> out(t_j_.size(), 1.0);
    const double lt = log_clamped(t);
    for (std::size_t j = 0; j < t_j_.size(); ++j) {
        if (t_j_[j] == 0) continue;
        const double tj = static_cast<double>(t_j_[j]);
        out[j] = sum_z_over_f_[j] / tj + std::sqrt(2.0 * lt / tj);
    }
    return out;
}

Slate FaDcmPPolicy::select(std::uint64_t t, Rng&) {
    const double prev = t > 1 ? static_cast<double>(t - 1) : 1.0;
    return optimal_slate(catalog_, ucb_values(prev), f_);
}

void FaDcmPPolicy::observe(const InteractionRecord& record) {
    for (const EventObservation& ev : extract_events(record, catalog_)) {
        const double fi = f_.value(ev.discount_index);
        if (fi <= 0.0) {
            throw ModelDegenerateError("fa_dcm_p: examined an item at discount index " +
                                       std::to_string(ev.discount_index) +
                                       " where f is zero; reweighting undefined");
        }
        t_j_[static_cast<std::size_t>(ev.item_id)] += 1;
        sum_z_over_f_[static_cast<std::size_t>(ev.item_id)] +=
            static_cast<double>(ev.click) / fi;
    }
    rounds_observed_ += 1;
}

nlohmann::json FaDcmPPolicy::snapshot() const {
    const double t = std::max<double>(1.0, static_cast<double>(rounds_observed_));
    return nlohmann::json{{"policy", name()},
                          {"rounds_observed", rounds_observed_},
                          {"exposures", t_j_},
                          {"reweighted_click_sums", sum_z_over_f_},
                          {"u_ucb", ucb_values(t)}};
}

// ---------------------------------------------------------------------------
// FaDcmPolicy

FaDcmPolicy::FaDcmPolicy(Catalog catalog, FaDcmOptions opts)
    : catalog_(std::move(catalog)), opts_(opts),
      m_(resolve_pool_index(catalog_, opts.pool_index)) {
    if (!(opts_.alpha >= 0.0)) {
        throw std::invalid_argument("fa_dcm: alpha must be non-negative");
    }
    if (opts_.threshold_mode == ThresholdMode::FixedHorizon && opts_.horizon == 0) {
        throw std::invalid_argument("fa_dcm: fixed-horizon threshold needs a horizon");
    }
    const std::size_t rows = static_cast<std::size_t>(m_) + 1;
    const std::size_t n = static_cast<std::size_t>(catalog_.n_items());
    t_ij_.assign(rows, std::vector<std::uint64_t>(n, 0));
    clicks_ij_.assign(rows, std::vector<std::uint64_t>(n, 0));
    t_hat_.assign(rows, 0);
}

FaDcmPolicy::Estimates FaDcmPolicy::point_estimates() const {
    const std::size_t n = static_cast<std::size_t>(catalog_.n_items());
    std::vector<double> u_hat(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const std::uint64_t t0 = t_ij_[0][j];
        if (t0 == 0) continue;
        u_hat[j] = static_cast<double>(clicks_ij_[0][j]) / static_cast<double>(t0);
    }
    std::vector<double> f_hat(static_cast<std::size_t>(m_) + 1, 1.0);
    for (std::size_t i = 0; i <= static_cast<std::size_t>(m_); ++i) {
        const std::uint64_t ti = t_hat_[i];
        if (ti == 0) continue;
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const std::uint64_t clicks = clicks_ij_[i][j];
            if (clicks == 0 || u_hat[j] <= 0.0) continue;
            sum += static_cast<double>(clicks) / u_hat[j];
        }
        f_hat[i] = sum / static_cast<double>(ti);
    }
    return Estimates{std::move(u_hat), std::move(f_hat)};
}

FaDcmPolicy::Indices FaDcmPolicy::indices(double t) const {
    const std::size_t n = static_cast<std::size_t>(catalog_.n_items());
    const double lt = log_clamped(t);
    const Estimates est = point_estimates();

    std::vector<double> u_ucb(n, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        const std::uint64_t t0 = t_ij_[0][j];
        if (t0 == 0) continue;
        u_ucb[j] = est.u_hat[j] + std::sqrt(2.0 * lt / static_cast<double>(t0));
    }

    std::vector<double> f_ucb(static_cast<std::size_t>(m_) + 1, 1.0);
    for (std::size_t i = 0; i <= static_cast<std::size_t>(m_); ++i) {
        const std::uint64_t ti = t_hat_[i];
        if (ti == 0) continue;
        double delta = std::sqrt(lt / static_cast<double>(ti));
        for (std::size_t j = 0; j < n; ++j) {
            const std::uint64_t clicks = clicks_ij_[i][j];
            if (clicks == 0 || est.u_hat[j] <= 0.0) continue;
            const double eps = std::sqrt(lt / static_cast<double>(t_ij_[0][j]));
            if (est.u_hat[j] > eps) {
                const double core = (static_cast<double>(clicks) / static_cast<double>(ti)) *
                                    (1.0 / (est.u_hat[j] * est.u_hat[j])) * eps;
                const double factor = 1.0 - eps / est.u_hat[j];
                delta += opts_.delta_form == DeltaForm::Inverse ? core / factor : core * factor;
            }
        }
        f_ucb[i] = est.f_hat[i] + delta;
    }
    return Indices{std::move(u_ucb), std::move(f_ucb)};
}

std::vector<double> FaDcmPolicy::repaired_f(double t) const {
    std::vector<double> f = indices(t).f_ucb;
    f[0] = 1.0;
    return monotone_repair(std::move(f));
}

Slate FaDcmPolicy::select(std::uint64_t t, Rng&) {
    const double prev = t > 1 ? static_cast<double>(t - 1) : 1.0;
    const Indices idx = indices(prev);
    std::vector<double> f = idx.f_ucb;
    f[0] = 1.0;
    f = monotone_repair(std::move(f));
    Slate slate = optimal_slate(catalog_, idx.u_ucb, DiscountCurve(std::move(f)));

    const double base = opts_.threshold_mode == ThresholdMode::Anytime
                            ? static_cast<double>(t)
                            : static_cast<double>(opts_.horizon);
    const double threshold = opts_.alpha * std::pow(base, 2.0 / 3.0);
    int forced = -1;
    std::uint64_t forced_count = 0;
    for (int j = 0; j < catalog_.n_items(); ++j) {
        const std::uint64_t c = t_ij_[0][static_cast<std::size_t>(j)];
        if (static_cast<double>(c) < threshold && (forced < 0 || c < forced_count)) {
            forced = j;
            forced_count = c;
        }
    }
    if (forced >= 0) {
        auto it = std::find(slate.order.begin(), slate.order.end(), forced);
        if (it != slate.order.end()) slate.order.erase(it);
        slate.order.insert(slate.order.begin(), forced);
    }
    return slate;
}

void FaDcmPolicy::observe(const InteractionRecord& record) {
    for (const EventObservation& ev : extract_events(record, catalog_)) {
        const std::size_t i = static_cast<std::size_t>(std::min(ev.discount_index, m_));
        const std::size_t j = static_cast<std::size_t>(ev.item_id);
        t_ij_[i][j] += 1;
        clicks_ij_[i][j] += ev.click;
        t_hat_[i] += 1;
    }
    rounds_observed_ += 1;
}

nlohmann::json FaDcmPolicy::snapshot() const {
    const double t = std::max<double>(1.0, static_cast<double>(rounds_observed_));
    const Indices idx = indices(t);
    const Estimates est = point_estimates();
    return nlohmann::json{{"policy", name()},
                          {"rounds_observed", rounds_observed_},
                          {"pool_index", m_},
                          {"alpha", opts_.alpha},
                          {"threshold_mode",
                           opts_.threshold_mode == ThresholdMode::Anytime ? "anytime"
                                                                          : "fixed_horizon"},
                          {"delta_form",
                           opts_.delta_form == DeltaForm::Inverse ? "inverse" : "literal"},
                          {"event_counts", t_ij_},
                          {"event_clicks", clicks_ij_},
                          {"index_totals", t_hat_},
                          {"u_hat", est.u_hat},
                          {"f_hat", est.f_hat},
                          {"u_ucb", idx.u_ucb},
                          {"f_ucb", repaired_f(t)}};
}

// ---------------------------------------------------------------------------
// EtePolicy

EtePolicy::EtePolicy(Catalog catalog, EteOptions opts)
    : catalog_(std::move(catalog)), opts_(opts),
      m_(resolve_pool_index(catalog_, opts.pool_index)) {
    if (!(opts_.beta >= 0.0)) {
        throw std::invalid_argument("ete: beta must be non-negative");
    }
    const std::size_t rows = static_cast<std::size_t>(m_) + 1;
    const std::size_t n = static_cast<std::size_t>(catalog_.n_items());
    t_ij_.assign(rows, std::vector<std::uint64_t>(n, 0));
    clicks_ij_.assign(rows, std::vector<std::uint64_t>(n, 0));
    t_hat_.assign(rows, 0);
}

std::vector<double> EtePolicy::empirical_u() const {
    const std::size_t n = static_cast<std::size_t>(catalog_.n_items());
    std::vector<double> u(n, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        if (t_ij_[0][j] > 0) {
            u[j] = static_cast<double>(clicks_ij_[0][j]) / static_cast<double>(t_ij_[0][j]);
        }
    }
    return u;
}

std::vector<double> EtePolicy::empirical_f() const {
    const std::size_t n = static_cast<std::size_t>(catalog_.n_items());
    constexpr double kMeanFloor = 1e-6;
    std::vector<double> u_hat(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        if (t_ij_[0][j] > 0) {
            u_hat[j] = static_cast<double>(clicks_ij_[0][j]) / static_cast<double>(t_ij_[0][j]);
        }
    }
    std::vector<double> f(static_cast<std::size_t>(m_) + 1, 1.0);
    for (std::size_t i = 0; i <= static_cast<std::size_t>(m_); ++i) {
        if (t_hat_[i] == 0) continue;
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (clicks_ij_[i][j] == 0) continue;
            sum += static_cast<double>(clicks_ij_[i][j]) / std::max(u_hat[j], kMeanFloor);
        }
        f[i] = std::clamp(sum / static_cast<double>(t_hat_[i]), 0.0, 1.0);
    }
    f[0] = 1.0;
    return monotone_repair(std::move(f));
}

Slate EtePolicy::select(std::uint64_t t, Rng& rng) {
    const bool explore =
        t == 1 || static_cast<double>(exploration_rounds_) <
                      opts_.beta * std::log(static_cast<double>(t));
    if (explore) {
        exploration_rounds_ += 1;
        Slate slate;
        slate.order.resize(static_cast<std::size_t>(catalog_.n_items()));
        std::iota(slate.order.begin(), slate.order.end(), 0);
        rng.shuffle(slate.order);
        return slate;
    }
    return optimal_slate(catalog_, empirical_u(), DiscountCurve(empirical_f()));
}

void EtePolicy::observe(const InteractionRecord& record) {
    for (const EventObservation& ev : extract_events(record, catalog_)) {
        const std::size_t i = static_cast<std::size_t>(std::min(ev.discount_index, m_));
        const std::size_t j = static_cast<std::size_t>(ev.item_id);
        t_ij_[i][j] += 1;
        clicks_ij_[i][j] += ev.click;
        t_hat_[i] += 1;
    }
    rounds_observed_ += 1;
}

nlohmann::json EtePolicy::snapshot() const {
    return nlohmann::json{{"policy", name()},
                          {"rounds_observed", rounds_observed_},
                          {"pool_index", m_},
                          {"beta", opts_.beta},
                          {"exploration_rounds", exploration_rounds_},
                          {"event_counts", t_ij_},
                          {"event_clicks", clicks_ij_},
                          {"empirical_u", empirical_u()},
                          {"empirical_f", empirical_f()}};
}

// ---------------------------------------------------------------------------
// OraclePolicy

OraclePolicy::OraclePolicy(Slate best) : best_(std::move(best)) {}

Slate OraclePolicy::select(std::uint64_t, Rng&) { return best_; }

void OraclePolicy::observe(const InteractionRecord&) { rounds_observed_ += 1; }

nlohmann::json OraclePolicy::snapshot() const {
    return nlohmann::json{{"policy", name()},
                          {"rounds_observed", rounds_observed_},
                          {"slate", best_.order}};
}

} // namespace fadcm
