// Error types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace onspin {

// Invalid user-facing configuration (bad flags, impossible parameter combos).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A numerical scheme failed to converge or produced an inconsistent result.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace onspin
