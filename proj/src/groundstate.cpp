#include "nls/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "nls/reduce.hpp"
#include "nls/rng.hpp"
#include "nls/scaling.hpp"

namespace nls {

namespace {

constexpr double kPi = 3.141592653589793238462643;

ComplexField gaussian_init(const std::shared_ptr<const Grid>& grid, double width) {
    ComplexField u(grid);
    const Grid& g = *grid;
    const double norm = std::pow(kPi * width * width, -0.25 * g.dims()); // unit L^2 mass
    par_for(u.size(), [&](std::size_t i) {
        u.values[i] = cd{norm * std::exp(-0.5 * g.radius_sq(i) / (width * width)), 0.0};
    });
    return u;
}

void perturb(ComplexField& u, Rng& rng) {
    // Smooth multiplicative ripple: low-order cosine modes, 10% amplitude.
    const Grid& g = *u.grid;
    const double L = g.extent();
    double amp[3], ph[3];
    int mode[3];
    for (int a = 0; a < 3; ++a) {
        amp[a] = 0.1 * rng.uniform();
        ph[a] = rng.uniform(0.0, 2.0 * kPi);
        mode[a] = 1 + static_cast<int>(rng.uniform() * 2.999);
    }
    par_for(u.size(), [&](std::size_t i) {
        double m = 1.0;
        for (int a = 0; a < g.dims(); ++a) {
            const double x = g.axis_x()[g.axis_index(i, a)];
            m += amp[a] * std::cos(2.0 * kPi * mode[a] * x / L + ph[a]);
        }
        u.values[i] *= m;
    });
}

/// Working state for one solve: real field arrays plus spectral scratch.
struct Work {
    const ModelOnGrid& mog;
    const Grid& g;
    double omega;
    std::size_t n;
    std::vector<double> w, rho, conv, resid, z;
    std::vector<cd> buf;

    Work(const ModelOnGrid& m, double om)
        : mog(m), g(m.grid()), omega(om), n(g.cell_count()), w(n), rho(n), conv(n), resid(n),
          z(n), buf(n) {}

    double l2(const std::vector<double>& v) const {
        return std::sqrt(g.cell_volume() * det_sum(n, [&](std::size_t i) { return v[i] * v[i]; }));
    }

    // (2 omega - Lap + V) v, spectral Laplacian.
    void apply_linear(const std::vector<double>& v, std::vector<double>& out) {
        par_for(n, [&](std::size_t i) { buf[i] = cd{v[i], 0.0}; });
        fft_nd(g.plan(), g.dims(), buf.data(), false);
        par_for(n, [&](std::size_t i) { buf[i] *= 2.0 * omega + g.wavenumber_sq(i); });
        fft_nd(g.plan(), g.dims(), buf.data(), true);
        if (mog.has_potential()) {
            const auto& V = mog.V();
            par_for(n, [&](std::size_t i) { out[i] = buf[i].real() + V[i] * v[i]; });
        } else {
            par_for(n, [&](std::size_t i) { out[i] = buf[i].real(); });
        }
    }

    // z = (2 omega - Lap)^{-1} r, exact in Fourier space.
    void precondition(const std::vector<double>& r, std::vector<double>& out) {
        par_for(n, [&](std::size_t i) { buf[i] = cd{r[i], 0.0}; });
        fft_nd(g.plan(), g.dims(), buf.data(), false);
        par_for(n, [&](std::size_t i) { buf[i] /= 2.0 * omega + g.wavenumber_sq(i); });
        fft_nd(g.plan(), g.dims(), buf.data(), true);
        par_for(n, [&](std::size_t i) { out[i] = buf[i].real(); });
    }

    // z ~= (2 omega - Lap + V)^{-1} r: fixed number of PCG sweeps with the
    // Fourier-diagonal preconditioner (the physical-space V correction).
    void solve_linear(const std::vector<double>& r, std::vector<double>& out, int iters) {
        if (!mog.has_potential()) {
            precondition(r, out);
            return;
        }
        std::vector<double> x(n, 0.0), res = r, zv(n), p(n), Ap(n);
        precondition(res, zv);
        p = zv;
        double rz = g.cell_volume() * det_sum(n, [&](std::size_t i) { return res[i] * zv[i]; });
        const double r0 = l2(r);
        for (int it = 0; it < iters; ++it) {
            apply_linear(p, Ap);
            const double pAp =
                g.cell_volume() * det_sum(n, [&](std::size_t i) { return p[i] * Ap[i]; });
            if (pAp <= 0.0) break;
            const double alpha = rz / pAp;
            par_for(n, [&](std::size_t i) {
                x[i] += alpha * p[i];
                res[i] -= alpha * Ap[i];
            });
            if (l2(res) < 1e-3 * r0) break;
            precondition(res, zv);
            const double rz_new =
                g.cell_volume() * det_sum(n, [&](std::size_t i) { return res[i] * zv[i]; });
            const double beta = rz_new / rz;
            rz = rz_new;
            par_for(n, [&](std::size_t i) { p[i] = zv[i] + beta * p[i]; });
        }
        out = x;
    }
};

} // namespace

double pohozaev_residual(const ComplexField& w, const ModelOnGrid& mog, double omega) {
    const FunctionalBreakdown b = functional_breakdown(w, mog);
    const double N = mog.grid().dims();
    const double lhs =
        N * omega * b.mass_sq + 0.5 * (N - 2.0) * b.kinetic + 0.5 * N * b.potential_term +
        0.5 * b.xdV_term;
    const double rhs = 0.5 * N * b.F_integral + 0.5 * N * b.WG + 0.25 * b.xdWG;
    return lhs - rhs;
}

StationaryState solve_stationary(const ModelOnGrid& mog, double omega, const ComplexField* init,
                                 const GroundstateOptions& opts) {
    if (!(omega > 0.0)) throw ConfigError("solve_stationary requires omega > 0");
    StationaryState st;
    st.omega = omega;

    Work wk(mog, omega);
    const std::size_t n = wk.n;
    const LocalSpec& f = mog.model().local;
    Rng rng(Rng::mix(opts.seed, 0xe57));

    ComplexField start =
        init ? *init : gaussian_init(mog.grid_ptr(), opts.init_width);

    for (int attempt = 0; attempt <= opts.retries; ++attempt) {
        ComplexField cur = start;
        if (attempt > 0) perturb(cur, rng);
        // real part only; ground states of the stationary equation can be taken real
        par_for(n, [&](std::size_t i) { wk.w[i] = cur.values[i].real(); });

        double tau = opts.tau;
        double prev_res = std::numeric_limits<double>::infinity();
        double best_res = prev_res;
        int since_best = 0;
        bool collapsed = false, diverged = false;

        for (int iter = 0; iter < opts.max_iter; ++iter) {
            ComplexField wf(mog.grid_ptr());
            par_for(n, [&](std::size_t i) { wf.values[i] = cd{wk.w[i], 0.0}; });
            const double msq = norm_sq(wf);
            if (!std::isfinite(msq) || msq < 1e-8) {
                collapsed = true;
                break;
            }

            // 1. rescale to the Nehari slice (kills the unstable amplitude mode)
            FamilyEvaluator ev(wf, mog, omega);
            const std::optional<double> rho = nehari_amplitude_root(ev);
            if (!rho) {
                collapsed = true;
                break;
            }
            if (std::abs(*rho - 1.0) > 1e-15)
                par_for(n, [&](std::size_t i) { wk.w[i] *= *rho; });

            // 2. residual of the stationary equation
            wk.apply_linear(wk.w, wk.resid);
            par_for(n, [&](std::size_t i) { wk.rho[i] = wk.w[i] * wk.w[i]; });
            if (mog.has_kernel()) {
                wk.conv = mog.convolve(wk.rho, false);
                par_for(n, [&](std::size_t i) {
                    wk.resid[i] -= (f.f(wk.rho[i]) + wk.conv[i]) * wk.w[i];
                });
            } else if (!f.is_zero()) {
                par_for(n, [&](std::size_t i) { wk.resid[i] -= f.f(wk.rho[i]) * wk.w[i]; });
            }
            const double res = wk.l2(wk.resid);
            st.iterations = iter + 1;
            st.residual_norm = res;
            if (!std::isfinite(res)) {
                diverged = true;
                break;
            }
            if (res <= opts.tol) break;

            if (res < best_res) {
                best_res = res;
                since_best = 0;
            } else if (++since_best > 100 && res > 10.0 * best_res) {
                diverged = true;
                break;
            }
            if (res > prev_res) tau = std::max(0.5 * tau, 0.02);
            else if (iter % 50 == 49) tau = std::min(1.05 * tau, opts.tau);
            prev_res = res;

            // 3. damped preconditioned correction
            wk.solve_linear(wk.resid, wk.z, opts.pcg_iters);
            par_for(n, [&](std::size_t i) { wk.w[i] -= tau * wk.z[i]; });
        }

        if (collapsed) {
            st.failure = "mass_collapse";
            continue; // random-perturbation retry
        }
        if (diverged) {
            st.failure = "diverged";
            continue;
        }

        ComplexField wf(mog.grid_ptr());
        par_for(n, [&](std::size_t i) { wf.values[i] = cd{wk.w[i], 0.0}; });
        st.field = wf;
        if (st.residual_norm <= opts.tol) {
            st.converged = true;
            st.failure.clear();
            const DiagnosticsRecord d = diagnostics(st.field, mog, omega, 0.0);
            st.s_omega_value = d.S_omega;
            st.q_value = d.Q;
            st.pohozaev_residual = pohozaev_residual(st.field, mog, omega);
            return st;
        }
        st.failure = "max_iterations";
    }
    return st;
}

IdentityReport verify_stationary_identities(const StationaryState& state,
                                            const ModelOnGrid& mog) {
    if (!state.converged || norm_sq(state.field) < 1e-8)
        throw NumericalError("verify_stationary_identities requires a converged nonzero state");
    IdentityReport rep;
    const DiagnosticsRecord d = diagnostics(state.field, mog, state.omega, 0.0);
    rep.eps = std::max(1e-6, 10.0 * state.residual_norm * std::sqrt(d.sigma_norm_sq));
    rep.s_omega = d.S_omega;
    rep.q = d.Q;
    rep.pohozaev_residual = pohozaev_residual(state.field, mog, state.omega);
    rep.s_ok = std::abs(rep.s_omega) <= rep.eps;
    rep.q_ok = std::abs(rep.q) <= rep.eps;
    return rep;
}

std::vector<ProbeSample> scaling_probe_amplitude(const StationaryState& state,
                                                 const ModelOnGrid& mog,
                                                 const std::vector<double>& rhos) {
    FamilyEvaluator ev(state.field, mog, state.omega);
    std::vector<ProbeSample> out;
    out.reserve(rhos.size());
    for (double r : rhos) {
        if (!(r > 0.0 && r <= 4.0)) throw ConfigError("probe parameters must lie in (0, 4]");
        const DiagnosticsRecord d = ev.at(r, 1.0);
        out.push_back({r, 1.0, d.S_omega, d.Q, d.I_omega});
    }
    return out;
}

std::vector<ProbeSample> scaling_probe_dilation(const StationaryState& state,
                                                const ModelOnGrid& mog,
                                                const std::vector<double>& ks,
                                                const std::vector<double>& lambdas) {
    FamilyEvaluator ev(state.field, mog, state.omega);
    if (!ev.supports_dilation())
        throw NumericalError("dilation probe needs an analytic kernel multiplier");
    std::vector<ProbeSample> out;
    for (double k : ks)
        for (double lam : lambdas) {
            if (!(k > 0.0 && k <= 4.0 && lam > 0.0 && lam <= 4.0))
                throw ConfigError("probe parameters must lie in (0, 4]");
            const DiagnosticsRecord d = ev.at(k, lam);
            out.push_back({k, lam, d.S_omega, d.Q, d.I_omega});
        }
    return out;
}

} // namespace nls
