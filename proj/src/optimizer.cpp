#include "fadcm/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fadcm/rng.hpp"

namespace fadcm {

Slate optimal_slate(const Catalog& catalog, const std::vector<double>& u,
                    const DiscountCurve& f, std::optional<int> max_len) {
    const int n = catalog.n_items();
    if (u.size() != static_cast<std::size_t>(n)) {
        throw DimensionError("optimal_slate: score vector has " + std::to_string(u.size()) +
                             " entries for a catalog of " + std::to_string(n) + " items");
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] >= 0.0)) {
            throw std::invalid_argument("optimal_slate: score u[" + std::to_string(i) +
                                        "] must be non-negative");
        }
    }
    int len = n;
    if (max_len) {
        if (*max_len < 0 || *max_len > n) {
            throw std::invalid_argument("optimal_slate: max_len must lie in [0,N]");
        }
        len = *max_len;
    }

    std::vector<double> lambda(static_cast<std::size_t>(n));
    std::vector<int> by_score;
    for (int c = 0; c < catalog.n_categories(); ++c) {
        by_score = catalog.items_in(c);
        std::sort(by_score.begin(), by_score.end(), [&](int a, int b) {
            if (u[static_cast<std::size_t>(a)] != u[static_cast<std::size_t>(b)]) {
                return u[static_cast<std::size_t>(a)] > u[static_cast<std::size_t>(b)];
            }
            return a < b;
        });
        for (std::size_t r = 0; r < by_score.size(); ++r) {
            const int item = by_score[r];
            lambda[static_cast<std::size_t>(item)] =
                u[static_cast<std::size_t>(item)] * f.value(static_cast<int>(r));
        }
    }

    Slate slate;
    slate.order.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) slate.order[static_cast<std::size_t>(i)] = i;
    std::sort(slate.order.begin(), slate.order.end(), [&](int a, int b) {
        if (lambda[static_cast<std::size_t>(a)] != lambda[static_cast<std::size_t>(b)]) {
            return lambda[static_cast<std::size_t>(a)] > lambda[static_cast<std::size_t>(b)];
        }
        return a < b;
    });
    slate.order.resize(static_cast<std::size_t>(len));
    return slate;
}

namespace {

void enumerate(const ModelParams& params, int max_len, std::vector<int>& current,
               std::vector<char>& used, BruteForceResult& best) {
    if (static_cast<int>(current.size()) == max_len) {
        Slate s{current};
        const double r = expected_reward(s, params);
        if (r > best.reward) {
            best.reward = r;
            best.slate = std::move(s);
        }
        return;
    }
    for (int i = 0; i < params.catalog.n_items(); ++i) {
        if (used[static_cast<std::size_t>(i)]) continue;
        used[static_cast<std::size_t>(i)] = 1;
        current.push_back(i);
        enumerate(params, max_len, current, used, best);
        current.pop_back();
        used[static_cast<std::size_t>(i)] = 0;
    }
}

} // namespace

BruteForceResult brute_force_slate(const Catalog& catalog, const ModelParams& params,
                                   int max_len, std::uint64_t cap) {
    const int n = catalog.n_items();
    if (max_len < 0 || max_len > n) {
        throw std::invalid_argument("brute_force_slate: max_len must lie in [0,N]");
    }
    std::uint64_t count = 1;
    for (int k = 0; k < max_len; ++k) {
        count *= static_cast<std::uint64_t>(n - k);
        if (count > cap) {
            throw CapacityError("brute_force_slate: " + std::to_string(n) + " items at length " +
                                std::to_string(max_len) + " exceeds the enumeration cap of " +
                                std::to_string(cap));
        }
    }

    BruteForceResult best;
    best.reward = -1.0;
    std::vector<int> current;
    current.reserve(static_cast<std::size_t>(max_len));
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    enumerate(params, max_len, current, used, best);
    return best;
}

OracleCheckStats oracle_equivalence_suite(int n_instances, int max_n, int max_k,
                                          std::uint64_t seed, double tolerance,
                                          bool corrupt_lambda) {
    if (max_n < 1 || max_n > 8) {
        throw CapacityError("oracle suite: max_n must lie in [1,8]");
    }
    Rng rng(seed);
    OracleCheckStats stats;
    for (int inst = 0; inst < n_instances; ++inst) {
        const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_n)));
        const int k = 1 + static_cast<int>(rng.below(
                              static_cast<std::uint64_t>(std::min(n, std::max(1, max_k)))));

        std::vector<int> cats(static_cast<std::size_t>(n));
        for (int c = 0; c < k; ++c) cats[static_cast<std::size_t>(c)] = c;
        for (int i = k; i < n; ++i) {
            cats[static_cast<std::size_t>(i)] =
                static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
        }
        rng.shuffle(cats);
        Catalog catalog(cats, k);

        std::vector<double> u(static_cast<std::size_t>(n));
        for (auto& v : u) v = rng.next_double();

        std::vector<double> fv(static_cast<std::size_t>(n));
        fv[0] = 1.0;
        for (int h = 1; h < n; ++h) {
            fv[static_cast<std::size_t>(h)] = fv[static_cast<std::size_t>(h - 1)] * rng.next_double();
        }
        DiscountCurve f(fv);

        double q = rng.next_double();
        double g = rng.next_double();
        if (q > g) std::swap(q, g);

        ModelParams params(catalog, Relevance(u), f, BehaviorParams(g, q));
        const int len = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));

        Slate analytic = optimal_slate(catalog, u, f, len);
        if (corrupt_lambda) {
            std::reverse(analytic.order.begin(), analytic.order.end());
        }
        const double analytic_reward = expected_reward(analytic, params);
        const BruteForceResult oracle = brute_force_slate(catalog, params, len);

        const double diff = std::fabs(oracle.reward - analytic_reward);
        stats.instances += 1;
        stats.max_abs_diff = std::max(stats.max_abs_diff, diff);
        if (diff > tolerance) stats.failures += 1;
    }
    return stats;
}

} // namespace fadcm
