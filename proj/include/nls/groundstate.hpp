#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nls/functionals.hpp"

namespace nls {

struct StationaryState {
    ComplexField field; // real-valued up to roundoff
    double omega = 0.0;
    double residual_norm = 0.0; // L^2 residual of 2 w + V w - Lap w = f w + (W*w^2) w, w scaled by omega
    double s_omega_value = 0.0;
    double q_value = 0.0;
    double pohozaev_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string failure; // "", "mass_collapse", "diverged", "max_iterations"
};

struct GroundstateOptions {
    double tol = 1e-9;     // L^2 residual target
    int max_iter = 10000;
    double tau = 0.35;     // damping of the preconditioned residual step
    int pcg_iters = 8;     // inner linear-solve iterations when V != 0
    int retries = 3;       // random-perturbation restarts on mass collapse
    double init_width = 1.0;
    std::uint64_t seed = 1;
};

/// Damped preconditioned fixed-point iteration on the residual of the
/// stationary equation, with the iterate rescaled to the Nehari slice
/// S_omega(rho w) = 0 every sweep (this removes the unstable amplitude mode;
/// the fixed points are unchanged). Iterates are kept real.
StationaryState solve_stationary(const ModelOnGrid& mog, double omega,
                                 const ComplexField* init, const GroundstateOptions& opts);

struct IdentityReport {
    double eps = 0.0; // max(1e-6, 10 * residual * sigma_norm)
    double s_omega = 0.0;
    double q = 0.0;
    double pohozaev_residual = 0.0;
    bool s_ok = false, q_ok = false;
};

/// Nehari and virial identities plus the Pohozaev residual (signed difference
/// of the two sides of the dilation identity).
IdentityReport verify_stationary_identities(const StationaryState& state,
                                            const ModelOnGrid& mog);

/// Pohozaev residual for an arbitrary real state (exposed for box-size studies).
double pohozaev_residual(const ComplexField& w, const ModelOnGrid& mog, double omega);

struct ProbeSample {
    double k = 1.0;      // amplitude factor
    double lambda = 1.0; // dilation factor (v(x) = k w(lambda x))
    double S_omega = 0.0;
    double Q = 0.0;
    double I_omega = 0.0;
};

/// Curves of (S_omega, Q, I_omega) along the amplitude ray rho*w.
std::vector<ProbeSample> scaling_probe_amplitude(const StationaryState& state,
                                                 const ModelOnGrid& mog,
                                                 const std::vector<double>& rhos);

/// Curves over the (k, lambda) lattice of v_{k,lambda}(x) = k w(lambda x).
std::vector<ProbeSample> scaling_probe_dilation(const StationaryState& state,
                                                const ModelOnGrid& mog,
                                                const std::vector<double>& ks,
                                                const std::vector<double>& lambdas);

} // namespace nls
