#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nls {

using cd = std::complex<double>;

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Bad run configuration / malformed input (CLI exit code 1).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A theorem-hypothesis gate refused the requested operation (CLI exit code 2).
struct HypothesisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical failure: divergence, corrupt field, empty feasible family (CLI exit code 3).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double sq(double x) { return x * x; }

} // namespace nls
