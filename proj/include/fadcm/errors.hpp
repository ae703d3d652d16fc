#pragma once

#include <stdexcept>
#include <string>

namespace fadcm {

// A slate referenced an item id outside the catalog, or repeated an id.
class InvalidSlateError : public std::runtime_error {
public:
    explicit InvalidSlateError(const std::string& what) : std::runtime_error(what) {}
};

// Two containers that must agree in size (e.g. relevance vector vs catalog) do not.
class DimensionError : public std::runtime_error {
public:
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

// A request exceeds a hard resource bound (e.g. exhaustive search too large).
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// A config file or CLI flag combination cannot be resolved into a valid run.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// The model reached a state where an estimator update is undefined
// (e.g. a discount value of exactly zero at an examined position).
class ModelDegenerateError : public std::runtime_error {
public:
    explicit ModelDegenerateError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fadcm
