#pragma once

#include <stdexcept>
#include <string>

namespace mobsim {

/// Rejection sampling could not place a body (overcrowded configuration).
struct PlacementError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (world files, CSV tables, traces).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mobsim
