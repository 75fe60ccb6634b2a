#pragma once

#include <stdexcept>
#include <string>

namespace semicomp {

// Error taxonomy used across the library.  Configuration problems (bad
// scenario input, inconsistent grids) are distinguished from data problems
// (asymmetric matrices, NaNs), domain problems (evaluation outside a field's
// grid, kernel mass escaping the domain) and integrability failures
// (divergent kernel integrals).  The pipeline maps them to report stages and
// exit codes.

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error("config: " + msg) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error("data: " + msg) {}
};

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error("domain: " + msg) {}
};

struct IntegrabilityError : std::runtime_error {
    explicit IntegrabilityError(const std::string& msg) : std::runtime_error("integrability: " + msg) {}
};

struct DensityUnavailable : std::runtime_error {
    explicit DensityUnavailable(const std::string& msg) : std::runtime_error("density: " + msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error("io: " + msg) {}
};

} // namespace semicomp
