#pragma once

#include <optional>

#include "nls/functionals.hpp"

namespace nls {

/// Scalar evaluator for the two-parameter family v(x) = k u(lambda x), built
/// once from a base field. Every functional of v is computed in O(M^N) per
/// (k, lambda) from cached data, without materializing v:
///   - pointwise terms re-evaluate f/F at k^2 s and V at x/lambda (closed forms),
///   - the kinetic term scales as k^2 lambda^{2-N},
///   - Hartree terms use Plancherel with the kernel multiplier sampled at
///     lambda*k_m (analytic kernels; lambda = 1 works for sampled kernels too).
class FamilyEvaluator {
  public:
    FamilyEvaluator(const ComplexField& u, const ModelOnGrid& mog, double omega);

    /// True when lambda != 1 evaluations are possible (zero or analytic kernel).
    bool supports_dilation() const { return dilation_ok_; }

    FunctionalBreakdown breakdown(double k, double lambda) const;
    DiagnosticsRecord at(double k, double lambda) const;

    double omega() const { return omega_; }
    const ModelOnGrid& mog() const { return mog_; }

  private:
    struct PowTerm {
        double coef;
        double p;
        double moment = 0.0; // h^N sum s^{p+1}
    };

    const ModelOnGrid& mog_;
    double omega_;
    std::vector<double> s_;       // |u|^2 per cell
    std::vector<double> r2_;      // |x|^2 per cell (when needed)
    std::vector<double> k2_;      // |k|^2 per mode (Gaussian-kernel dilations)
    std::vector<double> rhohat2_; // |FFT(|u|^2)|^2 per mode (index scaling)
    std::vector<PowTerm> pow_terms_;
    double mass_ = 0.0, kin_ = 0.0;
    double r2s_moment_ = 0.0;        // h^N sum r^2 s (harmonic potential)
    double WG1_ = 0.0, xdWG1_ = 0.0; // Hartree quadratic forms at lambda = 1
    bool generic_f_ = false;         // log family: per-cell evaluation
    bool kernel_homogeneous_ = false;
    bool dilation_ok_ = true;
    static constexpr double kPi_ = 3.141592653589793238462643;
};

/// Materialize v(x) = k u(lambda x) by exact trigonometric resampling, one
/// axis at a time (periodic extension for lambda > 1).
ComplexField materialize_family(const ComplexField& u, double k, double lambda);

/// u <- u * exp(-i sigma |x|^2 / 2) (J'(0) < 0 for sigma > 0 on real profiles).
ComplexField apply_quadratic_phase(const ComplexField& u, double sigma);

/// u <- c * u.
ComplexField scale_amplitude(const ComplexField& u, double c);

/// First variation of I_omega: 2 omega u - Lap u + V u - f(|u|^2) u - (W*|u|^2) u.
/// Vanishes exactly at stationary states.
ComplexField gradient_I_omega(const ComplexField& u, const ModelOnGrid& mog, double omega);

/// Smallest rho > 0 with S_omega(rho u) = 0 (the Nehari amplitude), if any.
std::optional<double> nehari_amplitude_root(const FamilyEvaluator& ev);

} // namespace nls
