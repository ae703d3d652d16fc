#pragma once

#include <cstddef>
#include <vector>

#include "fadcm/errors.hpp"

namespace fadcm {

// Item universe: N items, each belonging to one of K categories.
class Catalog {
public:
    Catalog(std::vector<int> category_by_item, int n_categories);

    // Items 0..sum(counts)-1 laid out contiguously: counts[0] items of
    // category 0 first, then counts[1] of category 1, and so on.
    static Catalog grouped(const std::vector<int>& items_per_category);

    int n_items() const { return static_cast<int>(category_by_item_.size()); }
    int n_categories() const { return n_categories_; }
    int category_of(int item) const;
    const std::vector<int>& items_in(int category) const;
    const std::vector<int>& categories() const { return category_by_item_; }

private:
    std::vector<int> category_by_item_;
    std::vector<std::vector<int>> items_by_category_;
    int n_categories_ = 0;
};

// Intrinsic click probabilities, one per item, each in [0,1].
class Relevance {
public:
    explicit Relevance(std::vector<double> u);

    const std::vector<double>& values() const { return u_; }
    double operator[](int i) const { return u_[static_cast<std::size_t>(i)]; }
    std::size_t size() const { return u_.size(); }

private:
    std::vector<double> u_;
};

// Fatigue discount f(0..M), f(0)=1, non-increasing; queries past M clamp to f(M).
class DiscountCurve {
public:
    explicit DiscountCurve(std::vector<double> values);

    static DiscountCurve exponential(double kappa, int plateau_index);

    double value(int h) const {
        const std::size_t m = values_.size() - 1;
        const std::size_t idx = (h < 0) ? 0u : std::size_t(h);
        return values_[idx > m ? m : idx];
    }
    int plateau_index() const { return static_cast<int>(values_.size()) - 1; }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> values_;
};

// Resume probabilities: g after a click, q after a skip, with q <= g.
class BehaviorParams {
public:
    BehaviorParams(double g, double q);
    double g() const { return g_; }
    double q() const { return q_; }

private:
    double g_;
    double q_;
};

struct ModelParams {
    Catalog catalog;
    Relevance relevance;
    DiscountCurve discount;
    BehaviorParams behavior;

    ModelParams(Catalog c, Relevance r, DiscountCurve d, BehaviorParams b);
};

// Ordered, duplicate-free list of item ids offered to one user.
struct Slate {
    std::vector<int> order;
};

void validate_slate(const Slate& slate, const Catalog& catalog);

// h values: output[p] = how many earlier positions share slate[p]'s category.
std::vector<int> same_category_prefix_counts(const Slate& slate, const Catalog& catalog);

// z values: output[p] = f(h[p]) * u[slate[p]].
std::vector<double> attractiveness_profile(const Slate& slate, const ModelParams& params);

// Probability the user clicks the item at `position`, scanning from the front.
double click_probability(const Slate& slate, std::size_t position, const ModelParams& params);

// Expected number of clicks over the whole slate; single pass over positions.
double expected_reward(const Slate& slate, const ModelParams& params);

} // namespace fadcm
