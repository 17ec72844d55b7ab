#include "nls/grid.hpp"

#include <cmath>

#include "nls/reduce.hpp"

namespace nls {

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;
} // namespace

Grid::Grid(int dims, double extent, std::size_t points)
    : dims_(dims), extent_(extent), points_(points), plan_(points) {
    spacing_ = extent_ / static_cast<double>(points_);
    cells_ = 1;
    for (int d = 0; d < dims_; ++d) cells_ *= points_;
    cell_vol_ = std::pow(spacing_, dims_);

    x_.resize(points_);
    k_.resize(points_);
    for (std::size_t j = 0; j < points_; ++j) {
        x_[j] = -0.5 * extent_ + spacing_ * static_cast<double>(j);
        const long long m = j < points_ / 2 ? static_cast<long long>(j)
                                            : static_cast<long long>(j) - static_cast<long long>(points_);
        k_[j] = kTwoPi * static_cast<double>(m) / extent_;
    }
    for (int a = 0; a < dims_; ++a) {
        std::size_t s = 1;
        for (int d = a + 1; d < dims_; ++d) s *= points_;
        stride_[a] = s;
    }
}

std::shared_ptr<const Grid> Grid::make(int dims, double extent, std::size_t points) {
    if (dims < 1 || dims > 3) throw ConfigError("grid dims must be 1, 2 or 3");
    if (extent <= 0.0) throw ConfigError("grid extent must be positive");
    if (points < 8 || (points & (points - 1)) != 0)
        throw ConfigError("grid points must be a power of two >= 8");
    return std::shared_ptr<const Grid>(new Grid(dims, extent, points));
}

std::shared_ptr<const Grid> make_grid(int dims, double extent, std::size_t points) {
    return Grid::make(dims, extent, points);
}

bool ComplexField::finite() const {
    const std::size_t n = values.size();
    // det_sum of squared magnitudes is NaN iff any entry is NaN/Inf-tainted.
    const double s = det_sum(n, [&](std::size_t i) { return std::norm(values[i]); });
    return std::isfinite(s);
}

std::vector<cd> to_spectral(const ComplexField& u) {
    const Grid& g = *u.grid;
    if (u.values.size() != g.cell_count()) throw NumericalError("field size does not match grid");
    std::vector<cd> coef = u.values;
    fft_nd(g.plan(), g.dims(), coef.data(), false);
    const double w = g.cell_volume();
    par_for(coef.size(), [&](std::size_t i) { coef[i] *= w; });
    return coef;
}

ComplexField from_spectral(const std::shared_ptr<const Grid>& grid, std::vector<cd> coef) {
    if (coef.size() != grid->cell_count()) throw NumericalError("spectrum size does not match grid");
    ComplexField u(grid);
    u.values = std::move(coef);
    const double w = 1.0 / grid->cell_volume();
    par_for(u.values.size(), [&](std::size_t i) { u.values[i] *= w; });
    fft_nd(grid->plan(), grid->dims(), u.values.data(), true);
    return u;
}

double spectral_gradient_norm_sq(const ComplexField& u) {
    const Grid& g = *u.grid;
    std::vector<cd> coef = u.values;
    fft_nd(g.plan(), g.dims(), coef.data(), false);
    // sum_j |grad u|^2 h^N = (h^N / M^N) sum_m |k|^2 |c_m|^2
    const double w = g.cell_volume() / static_cast<double>(g.cell_count());
    return w * det_sum(coef.size(),
                       [&](std::size_t i) { return g.wavenumber_sq(i) * std::norm(coef[i]); });
}

ComplexField spectral_laplacian(const ComplexField& u) {
    const Grid& g = *u.grid;
    std::vector<cd> coef = u.values;
    fft_nd(g.plan(), g.dims(), coef.data(), false);
    par_for(coef.size(), [&](std::size_t i) { coef[i] *= -g.wavenumber_sq(i); });
    ComplexField out(u.grid);
    out.values = std::move(coef);
    fft_nd(g.plan(), g.dims(), out.values.data(), true);
    return out;
}

ComplexField spectral_derivative(const ComplexField& u, int axis) {
    const Grid& g = *u.grid;
    std::vector<cd> coef = u.values;
    fft_nd(g.plan(), g.dims(), coef.data(), false);
    const auto& k = g.axis_k();
    // The unpaired Nyquist mode is zeroed in odd derivatives: with it retained,
    // d/dx of a real field acquires a spurious imaginary part at the Nyquist
    // amplitude level (the Laplacian keeps |k_Nyq|^2, where it is harmless).
    const std::size_t nyq = g.points() / 2;
    par_for(coef.size(), [&](std::size_t i) {
        const std::size_t m = g.axis_index(i, axis);
        coef[i] *= cd{0.0, m == nyq ? 0.0 : k[m]};
    });
    ComplexField out(u.grid);
    out.values = std::move(coef);
    fft_nd(g.plan(), g.dims(), out.values.data(), true);
    return out;
}

double norm_sq(const ComplexField& u) {
    return u.grid->cell_volume() *
           det_sum(u.size(), [&](std::size_t i) { return std::norm(u.values[i]); });
}

double norm_sq_diff(const ComplexField& a, const ComplexField& b) {
    return a.grid->cell_volume() *
           det_sum(a.size(), [&](std::size_t i) { return std::norm(a.values[i] - b.values[i]); });
}

MomentNorms moment_weighted_norms(const ComplexField& u) {
    const Grid& g = *u.grid;
    MomentNorms out;
    out.J = g.cell_volume() *
            det_sum(u.size(), [&](std::size_t i) { return g.radius_sq(i) * std::norm(u.values[i]); });

    // J' = 4 Im sum (x . grad u) conj(u) h^N, with grad spectral per axis.
    double jp = 0.0;
    for (int a = 0; a < g.dims(); ++a) {
        ComplexField du = spectral_derivative(u, a);
        const auto& x = g.axis_x();
        jp += det_sum(u.size(), [&](std::size_t i) {
            return x[g.axis_index(i, a)] * std::imag(du.values[i] * std::conj(u.values[i]));
        });
    }
    out.J_prime = 4.0 * g.cell_volume() * jp;
    out.finite = std::isfinite(out.J) && std::isfinite(out.J_prime);
    return out;
}

} // namespace nls
