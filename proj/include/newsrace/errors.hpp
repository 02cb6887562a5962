#pragma once

#include <stdexcept>
#include <string>

namespace newsrace {

struct InvalidModel : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ZeroDegree : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InconsistentArrivalMap : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malthusian equation E[exp(-lambda L)] = 1/nu has no positive solution.
struct NoRoot : std::domain_error {
    using std::domain_error::domain_error;
};

struct InsufficientData : std::domain_error {
    using std::domain_error::domain_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace newsrace
