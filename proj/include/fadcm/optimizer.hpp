#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fadcm/model.hpp"

namespace fadcm {

// Reward-maximizing slate for score vector u (entries >= 0, may exceed 1 for
// optimism-inflated scores) and discount curve f. Within each category items
// are ranked by u descending; rank r earns lambda = u * f(r); the slate is the
// global sort of lambda descending. Independent of resume probabilities.
// Ties break toward the smaller item id. O(N log N).
Slate optimal_slate(const Catalog& catalog, const std::vector<double>& u,
                    const DiscountCurve& f, std::optional<int> max_len = std::nullopt);

struct BruteForceResult {
    Slate slate;
    double reward = 0.0;
};

// Exhaustive argmax of expected_reward over every ordered selection of exactly
// max_len distinct items. Testing oracle only; refuses instances whose
// enumeration count exceeds `cap`.
BruteForceResult brute_force_slate(const Catalog& catalog, const ModelParams& params,
                                   int max_len, std::uint64_t cap = 40320);

struct OracleCheckStats {
    int instances = 0;
    int failures = 0;
    double max_abs_diff = 0.0;
};

// Randomized cross-check of optimal_slate against brute force on small
// instances (random catalog, u, non-increasing f, 0 <= q <= g <= 1, random
// slate length). `corrupt_lambda` reverses the analytic slate first and is a
// negative control: it must produce failures.
OracleCheckStats oracle_equivalence_suite(int n_instances, int max_n, int max_k,
                                          std::uint64_t seed, double tolerance = 1e-12,
                                          bool corrupt_lambda = false);

} // namespace fadcm
