#pragma once

#include <stdexcept>
#include <string>

namespace molres {

/// Invalid or inconsistent configuration (bad grid, unstable timestep, ...).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration is well-formed but the data is too short for the request.
class insufficient_data_error : public config_error {
public:
    explicit insufficient_data_error(const std::string& what) : config_error(what) {}
};

/// A position fell outside the simulation domain.
class domain_error : public std::runtime_error {
public:
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

/// A metric is undefined for the given data (e.g. zero-variance target).
class metric_error : public std::runtime_error {
public:
    explicit metric_error(const std::string& what) : std::runtime_error(what) {}
};

/// A file does not match the expected schema (headers, column layout).
class schema_error : public std::runtime_error {
public:
    explicit schema_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace molres
