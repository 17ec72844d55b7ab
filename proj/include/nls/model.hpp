#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nls/grid.hpp"

namespace nls {

/// Exact rational exponent. Admissibility comparisons such as p > 2/N or
/// p < 2/(N-2)+ are decided by cross-multiplication, never in floating point,
/// so mass-critical boundary cases (p = 2/N) are classified exactly.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d);

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_zero() const { return num == 0; }

    static Rational parse(const std::string& text);      // "3/4", "2", "0.4"
    static Rational from_double(double x);               // continued fractions, den <= 10^6
    std::string str() const;
};

bool operator==(const Rational& a, const Rational& b);
bool operator<(const Rational& a, const Rational& b);
inline bool operator<=(const Rational& a, const Rational& b) { return a < b || a == b; }
inline bool operator>(const Rational& a, const Rational& b) { return b < a; }
inline bool operator>=(const Rational& a, const Rational& b) { return b <= a; }

enum class PotentialKind { Zero, Harmonic, Saturating };

/// V(x) >= 0 from the built-in family. Radial: value depends on r^2 = |x|^2.
struct PotentialSpec {
    PotentialKind kind = PotentialKind::Zero;
    double a = 1.0; // coefficient (harmonic a|x|^2; saturating a|x|^2/(1+|x|^2))

    double V(double r2) const;
    double x_dot_gradV(double r2) const; // closed form, never finite differences
    bool is_zero() const { return kind == PotentialKind::Zero || a == 0.0; }
};

enum class LocalKind { Zero, Power, TwoPower, LogPower };

/// Local nonlinearity f(s), s = |u|^2, with closed-form antiderivative F and
/// partial derivative f'_s. Catalog families:
///   Power     f = b s^p
///   TwoPower  f = mu s^p1 + nu s^p2,  p1 < p2
///   LogPower  f = b s^p ln(1+s)
struct LocalSpec {
    LocalKind kind = LocalKind::Zero;
    double b = 0.0, mu = 0.0, nu = 0.0;
    Rational p{0, 1}, p1{0, 1}, p2{0, 1};

    double f(double s) const;
    double F(double s) const;
    double f_prime(double s) const;
    bool is_zero() const;
};

enum class KernelKind { Zero, InversePower, Gaussian, Saturating, BridgedInversePower };

/// Convolution kernel catalog. The coefficient multiplies every kind.
///   InversePower        a |x|^-K,            0 < K < min(4, N)
///   Gaussian            a exp(-pi |x|^2)
///   Saturating          a |x|^2/(1+|x|^2)    (bounded; sampled multiplier)
///   BridgedInversePower a { r^-K_inner (r<=1), phi(r) (1<=r<=2), A r^-K (r>=2) }
///     with phi built so that K_inner*phi + r*phi' <= 0 <= K*phi + r*phi'.
struct KernelSpec {
    KernelKind kind = KernelKind::Zero;
    double a = 0.0;
    double K = 0.0;       // outer exponent
    double K_inner = 0.0; // bridged only

    bool is_zero() const { return kind == KernelKind::Zero || a == 0.0; }
};

/// A concrete radial kernel (W itself or its radial derivative x.grad W),
/// evaluable pointwise and, where closed forms exist, as an analytic Fourier
/// multiplier. This is what hartree_convolve consumes.
struct RadialKernel {
    enum class Tag {
        Zero,
        InvPow,        // a r^-K
        Gauss,         // a exp(-pi r^2)
        GaussRadDeriv, // -2 pi a r^2 exp(-pi r^2)
        Saturating,    // a r^2/(1+r^2)
        SaturatingRadDeriv,
        Bridged,
        BridgedRadDeriv,
    };
    Tag tag = Tag::Zero;
    double a = 0.0, K = 0.0, K_inner = 0.0;
    double bridge_phi2 = 0.0; // cached phi(2) for the bridged kernel

    bool is_zero() const { return tag == Tag::Zero || a == 0.0; }
    double value(double r) const;
    bool has_analytic_multiplier() const;
    /// Continuum Fourier transform evaluated at |k| (convention e^{-ik.x});
    /// for InvPow the k=0 mode is handled separately by the regularized sum.
    double analytic_multiplier(double kabs, int dims) const;

    static RadialKernel of(const KernelSpec& k);
    static RadialKernel radial_derivative_of(const KernelSpec& k);
};

/// x.grad W as a convolvable descriptor (Euler homogeneity for inverse powers,
/// closed-form differentiation otherwise).
RadialKernel kernel_radial_derivative(const KernelSpec& kernel);

/// The (V, f, W) triple plus hypothesis metadata.
struct ModelSpec {
    int dims = 1;
    PotentialSpec potential;
    LocalSpec local;
    KernelSpec kernel;
    std::optional<Rational> l;  // exponent of conditions (4.1)/(4.2)-type
    // Optional attested constants; the checker records derived ones.
    std::optional<double> c1, c2, c3, c;
};

/// Model sampled on a grid: potential fields and Fourier multiplier tables,
/// built once and shared read-only. Operations on fields take this context.
class ModelOnGrid {
  public:
    static ModelOnGrid build(std::shared_ptr<const Grid> grid, const ModelSpec& model);

    const Grid& grid() const { return *grid_; }
    const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
    const ModelSpec& model() const { return model_; }

    bool has_potential() const { return !V_.empty(); }
    bool has_kernel() const { return !multW_.empty(); }
    const std::vector<double>& V() const { return V_; }
    const std::vector<double>& x_dot_gradV() const { return xdV_; }
    /// Multiplier tables for W and x.grad W (index layout = spectral layout).
    const std::vector<double>& mult_W() const { return multW_; }
    const std::vector<double>& mult_xdW() const { return multXdW_; }

    /// W evaluated spectrally: inverse transform of mult .* FFT(rho).
    std::vector<double> convolve(const std::vector<double>& rho, bool derivative_kernel) const;

  private:
    std::shared_ptr<const Grid> grid_;
    ModelSpec model_;
    std::vector<double> V_, xdV_;
    std::vector<double> multW_, multXdW_;
};

/// eval_potential: V(x) and (x.grad V)(x) sampled on the grid (closed forms).
struct PotentialFields {
    std::vector<double> V;
    std::vector<double> x_dot_gradV;
};
PotentialFields eval_potential(const ModelSpec& model, const Grid& grid);

/// hartree_convolve: (W * rho) on the grid of `mog`. rho must be real data of
/// grid size; nonnegative up to -1e-12 (validated).
std::vector<double> hartree_convolve(const ModelOnGrid& mog, const std::vector<double>& rho);

/// Multiplier table for an arbitrary radial kernel on a grid (used for the
/// x.grad W table and by tests). Sampled kernels are cell-regularized at the
/// origin (equal-volume-ball average) and transformed numerically.
std::vector<double> build_multiplier(const Grid& grid, const RadialKernel& kernel);

// ---------------------------------------------------------------------------
// Hypothesis checks: closed-form exponent/sign algebra per catalog family.
// ---------------------------------------------------------------------------

struct TheoremCheck {
    bool holds = false;
    std::vector<std::string> reasons;       // which sub-conditions passed/failed
    std::map<std::string, double> witness;  // chosen l, c constants, ...
};

struct HypothesisReport {
    TheoremCheck thm1, thm2, thm3, thm4, cor41, cor51;
    std::string serialize() const; // flat key/value text block
};

HypothesisReport check_hypotheses(const ModelSpec& model);

} // namespace nls
