#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nls/groundstate.hpp"
#include "nls/scaling.hpp"

namespace nls {

enum class ThresholdKind { d_I, d_prime_I, d_N, d_M, d_II };

const char* threshold_name(ThresholdKind k);

/// Upper-bound estimate of one of the paper's infima: minimization over a
/// finite search family with restart evidence. `value` is the min over
/// restarts; `converged` means the restart spread stayed within 10%.
struct ThresholdReport {
    ThresholdKind which = ThresholdKind::d_N;
    double value = 0.0;
    double constraint_residual = 0.0;
    double omega = 0.0;
    int iterations = 0;
    std::vector<double> restart_values;
    bool converged = false;
    std::string note;
    ComplexField minimizer;

    std::string serialize() const;
};

struct SearchOptions {
    int restarts = 3;
    int descent_steps = 200;
    std::uint64_t seed = 1;
    bool enforce_gate = true; // theorem-hypothesis gate; overrides are recorded
    std::vector<double> widths{0.6, 0.85, 1.2, 1.7, 2.4};
    std::vector<double> amplitudes{0.5, 1.0, 2.0};
    GroundstateOptions groundstate;
};

/// Dilate u along the L^2-preserving family u_lambda(x) = lambda^{N/2} u(lambda x)
/// until Q(u_lambda) = 0. At the mass-critical degeneracy (Q scales like a
/// single power of lambda) falls back to the amplitude ray Q(rho u) = 0.
/// Throws NumericalError when no scaling reaches the constraint.
ComplexField project_to_Q_zero(const ComplexField& u, const ModelOnGrid& mog,
                               double* lambda_out = nullptr);

ThresholdReport estimate_d_I(const ModelOnGrid& mog, double omega, const SearchOptions& opts);
ThresholdReport estimate_d_prime_I(const ModelOnGrid& mog, double omega,
                                   const SearchOptions& opts);
ThresholdReport estimate_d_N(const ModelOnGrid& mog, double omega, const SearchOptions& opts);
ThresholdReport estimate_d_M(const ModelOnGrid& mog, double omega, const SearchOptions& opts);
ThresholdReport estimate_d_II(const ThresholdReport& dN, const ThresholdReport& dM);

} // namespace nls
