#include "nls/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "nls/reduce.hpp"

namespace nls {

namespace {

constexpr double kPi = 3.141592653589793238462643;

// --- small quadrature helpers (setup/evaluation-time only) ------------------

// 24-point Gauss-Legendre on [a,b].
double gauss24(double a, double b, const std::function<double(double)>& g) {
    static const double xs[12] = {
        0.0640568928626056260850431, 0.1911188674736163091586398, 0.3150426796961633743867933,
        0.4337935076260451384870842, 0.5454214713888395356583756, 0.6480936519369755692524957,
        0.7401241915785543642438281, 0.8200019859739029219539499, 0.8864155270044010342131543,
        0.9382745520027327585236490, 0.9747285559713094981983919, 0.9951872199970213601799974};
    static const double ws[12] = {
        0.1279381953467521569740562, 0.1258374563468282961213754, 0.1216704729278033912044631,
        0.1155056680537256013533445, 0.1074442701159656347825773, 0.0976186521041138882698806,
        0.0861901615319532759171852, 0.0733464814110803057340336, 0.0592985849154367807463678,
        0.0442774388174198061686027, 0.0285313886289336631813078, 0.0123412297999871995468057};
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 12; ++i) s += ws[i] * (g(c - h * xs[i]) + g(c + h * xs[i]));
    return s * h;
}

// tanh-sinh quadrature on [0,s]; handles the algebraic endpoint of sigma^{p+1}.
double tanh_sinh_0s(double s, const std::function<double(double)>& g) {
    if (s <= 0.0) return 0.0;
    const double h = 0.05;
    const int n = 120;
    double sum = 0.0;
    for (int j = -n; j <= n; ++j) {
        const double t = h * j;
        const double u = std::tanh(0.5 * kPi * std::sinh(t));
        const double w = 0.5 * kPi * std::cosh(t) / sq(std::cosh(0.5 * kPi * std::sinh(t)));
        const double x = 0.5 * s * (u + 1.0);
        sum += w * g(x);
    }
    return sum * 0.5 * s * h;
}

double smoothstep5(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

// Log-derivative r (ln phi)' of the bridged kernel on [1,2]: interpolates
// monotonically from -K_inner to -K, so the (4.2)-type inequalities hold with
// c3 = K.
double bridge_logderiv(double r, double k_inner, double k_outer) {
    return -k_inner - (k_outer - k_inner) * smoothstep5(r - 1.0);
}

double bridge_phi(double r, double k_inner, double k_outer) {
    return std::exp(gauss24(1.0, r, [&](double s) {
        return bridge_logderiv(s, k_inner, k_outer) / s;
    }));
}

double unit_ball_volume(int dims) {
    switch (dims) {
        case 1: return 2.0;
        case 2: return kPi;
        default: return 4.0 * kPi / 3.0;
    }
}

} // namespace

// --- Rational ----------------------------------------------------------------

Rational::Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw ConfigError("rational exponent with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

bool operator==(const Rational& a, const Rational& b) { return a.num == b.num && a.den == b.den; }
bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
}

Rational Rational::parse(const std::string& text) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    }
    if (text.find('.') != std::string::npos || text.find('e') != std::string::npos)
        return from_double(std::stod(text));
    return Rational(std::stoll(text), 1);
}

Rational Rational::from_double(double x) {
    // Continued fractions, denominator capped at 10^6; recovers decimal inputs
    // like 0.4 -> 2/5 exactly.
    const bool neg = x < 0;
    double v = neg ? -x : x;
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int it = 0; it < 64; ++it) {
        const double fl = std::floor(v);
        const long long a = static_cast<long long>(fl);
        const long long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > 1000000) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if (std::abs(static_cast<double>(p1) / static_cast<double>(q1) - (neg ? -0.0 : 0.0) -
                     v) < 1e-12 * std::max(1.0, v))
            break;
        const double frac = v - fl;
        if (frac < 1e-14) break;
        v = 1.0 / frac;
    }
    return Rational(neg ? -p1 : p1, q1);
}

std::string Rational::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

// --- PotentialSpec -------------------------------------------------------------

double PotentialSpec::V(double r2) const {
    switch (kind) {
        case PotentialKind::Zero: return 0.0;
        case PotentialKind::Harmonic: return a * r2;
        case PotentialKind::Saturating: return a * r2 / (1.0 + r2);
    }
    return 0.0;
}

double PotentialSpec::x_dot_gradV(double r2) const {
    switch (kind) {
        case PotentialKind::Zero: return 0.0;
        case PotentialKind::Harmonic: return 2.0 * a * r2;
        case PotentialKind::Saturating: return 2.0 * a * r2 / sq(1.0 + r2);
    }
    return 0.0;
}

// --- LocalSpec -----------------------------------------------------------------

bool LocalSpec::is_zero() const {
    switch (kind) {
        case LocalKind::Zero: return true;
        case LocalKind::Power: return b == 0.0;
        case LocalKind::TwoPower: return mu == 0.0 && nu == 0.0;
        case LocalKind::LogPower: return b == 0.0;
    }
    return true;
}

double LocalSpec::f(double s) const {
    switch (kind) {
        case LocalKind::Zero: return 0.0;
        case LocalKind::Power: return b * std::pow(s, p.value());
        case LocalKind::TwoPower:
            return mu * std::pow(s, p1.value()) + nu * std::pow(s, p2.value());
        case LocalKind::LogPower: return b * std::pow(s, p.value()) * std::log1p(s);
    }
    return 0.0;
}

double LocalSpec::F(double s) const {
    switch (kind) {
        case LocalKind::Zero: return 0.0;
        case LocalKind::Power: {
            const double e = p.value() + 1.0;
            return b * std::pow(s, e) / e;
        }
        case LocalKind::TwoPower: {
            const double e1 = p1.value() + 1.0, e2 = p2.value() + 1.0;
            return mu * std::pow(s, e1) / e1 + nu * std::pow(s, e2) / e2;
        }
        case LocalKind::LogPower: {
            // Integration by parts: F = b/(p+1) [ s^{p+1} ln(1+s) - I(s) ],
            // I(s) = int_0^s sigma^{p+1}/(1+sigma) d sigma (tanh-sinh).
            if (s <= 0.0) return 0.0;
            const double e = p.value() + 1.0;
            const double I =
                tanh_sinh_0s(s, [&](double x) { return std::pow(x, e) / (1.0 + x); });
            return b / e * (std::pow(s, e) * std::log1p(s) - I);
        }
    }
    return 0.0;
}

double LocalSpec::f_prime(double s) const {
    switch (kind) {
        case LocalKind::Zero: return 0.0;
        case LocalKind::Power: {
            const double pv = p.value();
            return b * pv * std::pow(s, pv - 1.0);
        }
        case LocalKind::TwoPower: {
            const double q1 = p1.value(), q2 = p2.value();
            return mu * q1 * std::pow(s, q1 - 1.0) + nu * q2 * std::pow(s, q2 - 1.0);
        }
        case LocalKind::LogPower: {
            const double pv = p.value();
            return b * (pv * std::pow(s, pv - 1.0) * std::log1p(s) +
                        std::pow(s, pv) / (1.0 + s));
        }
    }
    return 0.0;
}

// --- RadialKernel ----------------------------------------------------------------

RadialKernel RadialKernel::of(const KernelSpec& k) {
    RadialKernel r;
    r.a = k.a;
    r.K = k.K;
    r.K_inner = k.K_inner;
    switch (k.kind) {
        case KernelKind::Zero: r.tag = Tag::Zero; break;
        case KernelKind::InversePower: r.tag = Tag::InvPow; break;
        case KernelKind::Gaussian: r.tag = Tag::Gauss; break;
        case KernelKind::Saturating: r.tag = Tag::Saturating; break;
        case KernelKind::BridgedInversePower:
            r.tag = Tag::Bridged;
            r.bridge_phi2 = bridge_phi(2.0, k.K_inner, k.K);
            break;
    }
    if (k.is_zero()) r.tag = Tag::Zero;
    return r;
}

RadialKernel RadialKernel::radial_derivative_of(const KernelSpec& k) {
    RadialKernel r = of(k);
    switch (r.tag) {
        case Tag::Zero: break;
        case Tag::InvPow: r.a *= -r.K; break; // Euler homogeneity
        case Tag::Gauss: r.tag = Tag::GaussRadDeriv; break;
        case Tag::Saturating: r.tag = Tag::SaturatingRadDeriv; break;
        case Tag::Bridged: r.tag = Tag::BridgedRadDeriv; break;
        default: break;
    }
    return r;
}

RadialKernel kernel_radial_derivative(const KernelSpec& kernel) {
    return RadialKernel::radial_derivative_of(kernel);
}

double RadialKernel::value(double r) const {
    switch (tag) {
        case Tag::Zero: return 0.0;
        case Tag::InvPow: return a * std::pow(r, -K);
        case Tag::Gauss: return a * std::exp(-kPi * r * r);
        case Tag::GaussRadDeriv: return -2.0 * kPi * a * r * r * std::exp(-kPi * r * r);
        case Tag::Saturating: return a * r * r / (1.0 + r * r);
        case Tag::SaturatingRadDeriv: return a * 2.0 * r * r / sq(1.0 + r * r);
        case Tag::Bridged:
            if (r <= 1.0) return a * std::pow(r, -K_inner);
            if (r <= 2.0) return a * bridge_phi(r, K_inner, K);
            return a * bridge_phi2 * std::pow(2.0, K) * std::pow(r, -K);
        case Tag::BridgedRadDeriv: {
            RadialKernel w = *this;
            w.tag = Tag::Bridged;
            if (r <= 1.0) return -K_inner * w.value(r);
            if (r <= 2.0) return bridge_logderiv(r, K_inner, K) * w.value(r);
            return -K * w.value(r);
        }
    }
    return 0.0;
}

bool RadialKernel::has_analytic_multiplier() const {
    switch (tag) {
        case Tag::Zero:
        case Tag::InvPow:
        case Tag::Gauss:
        case Tag::GaussRadDeriv: return true;
        default: return false;
    }
}

double RadialKernel::analytic_multiplier(double kabs, int dims) const {
    switch (tag) {
        case Tag::Zero: return 0.0;
        case Tag::InvPow: {
            // FT(|x|^-K) = 2^{N-K} pi^{N/2} Gamma((N-K)/2)/Gamma(K/2) |k|^{K-N}
            const double n = dims;
            const double c = std::pow(2.0, n - K) * std::pow(kPi, 0.5 * n) *
                             std::tgamma(0.5 * (n - K)) / std::tgamma(0.5 * K);
            return a * c * std::pow(kabs, K - n);
        }
        case Tag::Gauss: return a * std::exp(-kabs * kabs / (4.0 * kPi));
        case Tag::GaussRadDeriv:
            return a * (-static_cast<double>(dims) + kabs * kabs / (2.0 * kPi)) *
                   std::exp(-kabs * kabs / (4.0 * kPi));
        default: throw NumericalError("kernel has no analytic Fourier multiplier");
    }
}

// --- multiplier tables ------------------------------------------------------------

namespace {

// Equal-volume-ball average of a * r^-K over one cell (origin regularization).
double singular_cell_average(double a, double K, double h, int dims) {
    const double R = std::pow(std::pow(h, dims) / unit_ball_volume(dims), 1.0 / dims);
    return a * static_cast<double>(dims) / (static_cast<double>(dims) - K) * std::pow(R, -K);
}

// Displacement radius of a spectral-layout cell: component d*h for d < M/2,
// (d-M)*h beyond.
double displacement_radius(const Grid& g, std::size_t cell) {
    double r2 = 0.0;
    const double h = g.spacing();
    const auto m = static_cast<long long>(g.points());
    for (int axisd = 0; axisd < g.dims(); ++axisd) {
        const auto d = static_cast<long long>(g.axis_index(cell, axisd));
        const double c = h * static_cast<double>(d < m / 2 ? d : d - m);
        r2 += c * c;
    }
    return std::sqrt(r2);
}

} // namespace

std::vector<double> build_multiplier(const Grid& grid, const RadialKernel& kernel) {
    const std::size_t n = grid.cell_count();
    std::vector<double> mult(n, 0.0);
    if (kernel.is_zero()) return mult;

    if (kernel.has_analytic_multiplier()) {
        par_for(n, [&](std::size_t i) {
            const double kabs = std::sqrt(grid.wavenumber_sq(i));
            if (i == 0 && kernel.tag == RadialKernel::Tag::InvPow) return;
            mult[i] = kernel.analytic_multiplier(kabs, grid.dims());
        });
        if (kernel.tag == RadialKernel::Tag::InvPow) {
            // Zero mode: box integral of the cell-regularized kernel.
            const double origin_avg =
                singular_cell_average(kernel.a, kernel.K, grid.spacing(), grid.dims());
            mult[0] = grid.cell_volume() *
                      det_sum(n, [&](std::size_t i) {
                          return i == 0 ? origin_avg : kernel.value(displacement_radius(grid, i));
                      });
        }
        return mult;
    }

    // Sampled kernel: periodized numeric transform. Singular origins (bridged
    // kinds) get the equal-volume-ball cell average.
    std::vector<cd> samp(n);
    par_for(n, [&](std::size_t i) {
        samp[i] = cd{kernel.value(displacement_radius(grid, i)), 0.0};
    });
    if (kernel.tag == RadialKernel::Tag::Bridged)
        samp[0] = cd{singular_cell_average(kernel.a, kernel.K_inner, grid.spacing(), grid.dims()), 0.0};
    else if (kernel.tag == RadialKernel::Tag::BridgedRadDeriv)
        samp[0] = cd{-kernel.K_inner * singular_cell_average(kernel.a, kernel.K_inner,
                                                             grid.spacing(), grid.dims()),
                     0.0};
    else
        samp[0] = cd{kernel.value(0.0), 0.0};

    fft_nd(grid.plan(), grid.dims(), samp.data(), false);
    const double w = grid.cell_volume();
    par_for(n, [&](std::size_t i) { mult[i] = w * samp[i].real(); }); // even kernel => real
    return mult;
}

// --- ModelOnGrid -------------------------------------------------------------------

ModelOnGrid ModelOnGrid::build(std::shared_ptr<const Grid> grid, const ModelSpec& model) {
    ModelOnGrid m;
    m.grid_ = std::move(grid);
    m.model_ = model;
    if (!model.potential.is_zero()) {
        PotentialFields pf = eval_potential(model, *m.grid_);
        m.V_ = std::move(pf.V);
        m.xdV_ = std::move(pf.x_dot_gradV);
    }
    if (!model.kernel.is_zero()) {
        m.multW_ = build_multiplier(*m.grid_, RadialKernel::of(model.kernel));
        m.multXdW_ = build_multiplier(*m.grid_, RadialKernel::radial_derivative_of(model.kernel));
    }
    return m;
}

std::vector<double> ModelOnGrid::convolve(const std::vector<double>& rho,
                                          bool derivative_kernel) const {
    const std::size_t n = grid_->cell_count();
    std::vector<double> out(n, 0.0);
    if (!has_kernel()) return out;
    const std::vector<double>& mult = derivative_kernel ? multXdW_ : multW_;

    std::vector<cd> buf(n);
    par_for(n, [&](std::size_t i) { buf[i] = cd{rho[i], 0.0}; });
    fft_nd(grid_->plan(), grid_->dims(), buf.data(), false);
    par_for(n, [&](std::size_t i) { buf[i] *= mult[i]; });
    fft_nd(grid_->plan(), grid_->dims(), buf.data(), true);
    par_for(n, [&](std::size_t i) { out[i] = buf[i].real(); });
    return out;
}

PotentialFields eval_potential(const ModelSpec& model, const Grid& grid) {
    const std::size_t n = grid.cell_count();
    PotentialFields out;
    out.V.assign(n, 0.0);
    out.x_dot_gradV.assign(n, 0.0);
    par_for(n, [&](std::size_t i) {
        const double r2 = grid.radius_sq(i);
        out.V[i] = model.potential.V(r2);
        out.x_dot_gradV[i] = model.potential.x_dot_gradV(r2);
    });
    return out;
}

std::vector<double> hartree_convolve(const ModelOnGrid& mog, const std::vector<double>& rho) {
    if (rho.size() != mog.grid().cell_count())
        throw NumericalError("density size does not match grid");
    double lo = 0.0;
    for (double v : rho) lo = std::min(lo, v);
    if (lo < -1e-12 * (1.0 + std::abs(lo)))
        throw NumericalError("density must be nonnegative up to -1e-12");
    return mog.convolve(rho, false);
}

} // namespace nls
