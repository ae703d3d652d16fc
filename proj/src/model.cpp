#include "fadcm/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fadcm {

Catalog::Catalog(std::vector<int> category_by_item, int n_categories)
    : category_by_item_(std::move(category_by_item)), n_categories_(n_categories) {
    if (n_categories_ <= 0) {
        throw std::invalid_argument("catalog: n_categories must be positive");
    }
    if (category_by_item_.empty()) {
        throw std::invalid_argument("catalog: at least one item required");
    }
    items_by_category_.assign(static_cast<std::size_t>(n_categories_), {});
    for (std::size_t i = 0; i < category_by_item_.size(); ++i) {
        const int c = category_by_item_[i];
        if (c < 0 || c >= n_categories_) {
            throw std::invalid_argument("catalog: item " + std::to_string(i) +
                                        " has category " + std::to_string(c) +
                                        " outside [0," + std::to_string(n_categories_) + ")");
        }
        items_by_category_[static_cast<std::size_t>(c)].push_back(static_cast<int>(i));
    }
    for (int c = 0; c < n_categories_; ++c) {
        if (items_by_category_[static_cast<std::size_t>(c)].empty()) {
            throw std::invalid_argument("catalog: category " + std::to_string(c) + " owns no items");
        }
    }
}

Catalog Catalog::grouped(const std::vector<int>& items_per_category) {
    std::vector<int> cats;
    for (std::size_t c = 0; c < items_per_category.size(); ++c) {
        if (items_per_category[c] <= 0) {
            throw std::invalid_argument("catalog: items_per_category entries must be positive");
        }
        for (int k = 0; k < items_per_category[c]; ++k) {
            cats.push_back(static_cast<int>(c));
        }
    }
    return Catalog(std::move(cats), static_cast<int>(items_per_category.size()));
}

int Catalog::category_of(int item) const {
    if (item < 0 || item >= n_items()) {
        throw InvalidSlateError("unknown item id " + std::to_string(item));
    }
    return category_by_item_[static_cast<std::size_t>(item)];
}

const std::vector<int>& Catalog::items_in(int category) const {
    if (category < 0 || category >= n_categories_) {
        throw std::invalid_argument("catalog: no category " + std::to_string(category));
    }
    return items_by_category_[static_cast<std::size_t>(category)];
}

Relevance::Relevance(std::vector<double> u) : u_(std::move(u)) {
    for (std::size_t i = 0; i < u_.size(); ++i) {
        if (!(u_[i] >= 0.0 && u_[i] <= 1.0)) {
            throw std::invalid_argument("relevance: u[" + std::to_string(i) +
                                        "] must lie in [0,1]");
        }
    }
}

DiscountCurve::DiscountCurve(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw std::invalid_argument("discount: needs at least f(0)");
    }
    if (values_[0] != 1.0) {
        throw std::invalid_argument("discount: f(0) must equal 1");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] >= 0.0 && values_[i] <= 1.0)) {
            throw std::invalid_argument("discount: f(" + std::to_string(i) +
                                        ") must lie in [0,1]");
        }
        if (i > 0 && values_[i] > values_[i - 1]) {
            throw std::invalid_argument("discount: f must be non-increasing, violated at index " +
                                        std::to_string(i));
        }
    }
}

DiscountCurve DiscountCurve::exponential(double kappa, int plateau_index) {
    if (!(kappa >= 0.0)) {
        throw std::invalid_argument("discount: kappa must be non-negative");
    }
    if (plateau_index < 0) {
        throw std::invalid_argument("discount: plateau index must be non-negative");
    }
    std::vector<double> v(static_cast<std::size_t>(plateau_index) + 1);
    for (std::size_t h = 0; h < v.size(); ++h) {
        v[h] = std::exp(-kappa * static_cast<double>(h));
    }
    return DiscountCurve(std::move(v));
}

BehaviorParams::BehaviorParams(double g, double q) : g_(g), q_(q) {
    if (!(q >= 0.0 && q <= g && g <= 1.0)) {
        throw std::invalid_argument("behavior: requires 0 <= q <= g <= 1");
    }
}

ModelParams::ModelParams(Catalog c, Relevance r, DiscountCurve d, BehaviorParams b)
    : catalog(std::move(c)), relevance(std::move(r)), discount(std::move(d)), behavior(b) {
    if (relevance.size() != static_cast<std::size_t>(catalog.n_items())) {
        throw DimensionError("relevance has " + std::to_string(relevance.size()) +
                             " entries for a catalog of " + std::to_string(catalog.n_items()) +
                             " items");
    }
}

void validate_slate(const Slate& slate, const Catalog& catalog) {
    std::vector<char> seen(static_cast<std::size_t>(catalog.n_items()), 0);
    for (int id : slate.order) {
        if (id < 0 || id >= catalog.n_items()) {
            throw InvalidSlateError("slate references unknown item id " + std::to_string(id));
        }
        if (seen[static_cast<std::size_t>(id)]) {
            throw InvalidSlateError("slate repeats item id " + std::to_string(id));
        }
        seen[static_cast<std::size_t>(id)] = 1;
    }
}

std::vector<int> same_category_prefix_counts(const Slate& slate, const Catalog& catalog) {
    validate_slate(slate, catalog);
    std::vector<int> per_category(static_cast<std::size_t>(catalog.n_categories()), 0);
    std::vector<int> h(slate.order.size());
    for (std::size_t p = 0; p < slate.order.size(); ++p) {
        const int c = catalog.category_of(slate.order[p]);
        h[p] = per_category[static_cast<std::size_t>(c)]++;
    }
    return h;
}

std::vector<double> attractiveness_profile(const Slate& slate, const ModelParams& params) {
    const std::vector<int> h = same_category_prefix_counts(slate, params.catalog);
    std::vector<double> z(slate.order.size());
    for (std::size_t p = 0; p < slate.order.size(); ++p) {
        z[p] = params.discount.value(h[p]) * params.relevance[slate.order[p]];
    }
    return z;
}

double click_probability(const Slate& slate, std::size_t position, const ModelParams& params) {
    if (position >= slate.order.size()) {
        throw std::out_of_range("click_probability: position " + std::to_string(position) +
                                " outside slate of length " + std::to_string(slate.order.size()));
    }
    const std::vector<double> z = attractiveness_profile(slate, params);
    double cont = 1.0;
    for (std::size_t k = 0; k < position; ++k) {
        cont *= params.behavior.g() * z[k] + params.behavior.q() * (1.0 - z[k]);
    }
    return cont * z[position];
}

double expected_reward(const Slate& slate, const ModelParams& params) {
    const std::vector<double> z = attractiveness_profile(slate, params);
    double total = 0.0;
    double cont = 1.0;
    for (std::size_t p = 0; p < z.size(); ++p) {
        total += cont * z[p];
        cont *= params.behavior.g() * z[p] + params.behavior.q() * (1.0 - z[p]);
    }
    return total;
}

} // namespace fadcm
