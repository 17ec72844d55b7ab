#pragma once

#include <memory>
#include <vector>

#include "nls/common.hpp"
#include "nls/fft.hpp"

namespace nls {

/// Uniform periodic tensor grid on [-L/2, L/2)^N, N in {1,2,3}, M points per
/// axis (power of two). Nodes x_j = -L/2 + j*h include the origin; wavenumbers
/// are in FFT order, k_m = 2*pi*m/L for m in {0..M/2-1, -M/2..-1}. The Nyquist
/// mode is retained in derivative multipliers. Immutable after construction.
class Grid {
  public:
    static std::shared_ptr<const Grid> make(int dims, double extent, std::size_t points);

    int dims() const { return dims_; }
    double extent() const { return extent_; }
    std::size_t points() const { return points_; }
    double spacing() const { return spacing_; }
    std::size_t cell_count() const { return cells_; }
    /// Quadrature weight per cell, h^N.
    double cell_volume() const { return cell_vol_; }

    const std::vector<double>& axis_x() const { return x_; }
    const std::vector<double>& axis_k() const { return k_; }

    const FftPlan& plan() const { return plan_; }

    /// Per-axis index digit of a flat row-major cell index.
    std::size_t axis_index(std::size_t cell, int axis) const {
        return (cell / stride_[axis]) % points_;
    }
    std::size_t stride(int axis) const { return stride_[axis]; }

    /// |x|^2 at a cell.
    double radius_sq(std::size_t cell) const {
        double r2 = 0.0;
        for (int a = 0; a < dims_; ++a) r2 += sq(x_[axis_index(cell, a)]);
        return r2;
    }
    /// |k|^2 at a cell of the spectral array (same layout).
    double wavenumber_sq(std::size_t cell) const {
        double k2 = 0.0;
        for (int a = 0; a < dims_; ++a) k2 += sq(k_[axis_index(cell, a)]);
        return k2;
    }

  private:
    Grid(int dims, double extent, std::size_t points);

    int dims_;
    double extent_;
    std::size_t points_;
    double spacing_;
    std::size_t cells_;
    double cell_vol_;
    std::vector<double> x_, k_;
    std::size_t stride_[3] = {1, 1, 1};
    FftPlan plan_;
};

/// Discretized complex wavefunction on a Grid. Value semantics; the grid is
/// shared immutable state.
struct ComplexField {
    std::shared_ptr<const Grid> grid;
    std::vector<cd> values;

    ComplexField() = default;
    explicit ComplexField(std::shared_ptr<const Grid> g)
        : grid(std::move(g)), values(grid->cell_count()) {}

    std::size_t size() const { return values.size(); }
    bool finite() const;
};

std::shared_ptr<const Grid> make_grid(int dims, double extent, std::size_t points);

/// Spectral coefficients with quadrature scaling: uhat[m] = h^N * DFT(u)[m]
/// (the trapezoid approximation of the continuum transform up to a unimodular
/// boundary phase). Parseval: sum_j |u_j|^2 h^N = (1/L^N) sum_m |uhat_m|^2.
std::vector<cd> to_spectral(const ComplexField& u);
ComplexField from_spectral(const std::shared_ptr<const Grid>& grid, std::vector<cd> coef);

/// ||grad u||_2^2 via the spectral multiplier |k|^2.
double spectral_gradient_norm_sq(const ComplexField& u);

/// Laplacian via the multiplier -|k|^2.
ComplexField spectral_laplacian(const ComplexField& u);

/// Partial derivative along one axis (multiplier i*k_axis).
ComplexField spectral_derivative(const ComplexField& u, int axis);

/// L^2 norm squared with h^N weights.
double norm_sq(const ComplexField& u);
double norm_sq_diff(const ComplexField& a, const ComplexField& b);

struct MomentNorms {
    double J = 0.0;        // integral |x|^2 |u|^2
    double J_prime = 0.0;  // 4 Im integral (x . grad u) conj(u)
    bool finite = true;
};
MomentNorms moment_weighted_norms(const ComplexField& u);

} // namespace nls
