#pragma once

#include <stdexcept>
#include <string>

namespace imsp {

/// Bad configuration value or malformed config file. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Inconsistent geometry (point outside domain, mismatched grids, ...).
class GeometryError : public ConfigError {
public:
    explicit GeometryError(const std::string& msg) : ConfigError(msg) {}
};

/// Linear solver failure (singular factorization, residual above tolerance).
/// CLI exit code 3.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numeric failure outside the PDE solver (non-PD covariance, collapsed
/// mixture component, degenerate metric). CLI exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File system failure. CLI exit code 4.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace imsp
