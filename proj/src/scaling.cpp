#include "nls/scaling.hpp"

#include <cmath>
#include <optional>

#include "nls/reduce.hpp"

namespace nls {

FamilyEvaluator::FamilyEvaluator(const ComplexField& u, const ModelOnGrid& mog, double omega)
    : mog_(mog), omega_(omega) {
    const Grid& g = *u.grid;
    const std::size_t n = u.size();
    s_.resize(n);
    par_for(n, [&](std::size_t i) { s_[i] = std::norm(u.values[i]); });

    mass_ = g.cell_volume() * det_sum(n, [&](std::size_t i) { return s_[i]; });
    kin_ = spectral_gradient_norm_sq(u);

    const PotentialSpec& pot = mog_.model().potential;
    const LocalSpec& f = mog_.model().local;

    // Cached geometry (cell radius; spectral radius when a kernel is present).
    if (!pot.is_zero() || mog_.has_kernel()) {
        r2_.resize(n);
        par_for(n, [&](std::size_t i) { r2_[i] = g.radius_sq(i); });
    }
    if (pot.kind == PotentialKind::Harmonic && !pot.is_zero()) {
        r2s_moment_ = g.cell_volume() *
                      det_sum(n, [&](std::size_t i) { return r2_[i] * s_[i]; });
    }

    // Power-sum nonlinearities are separable in (k, lambda): only the moments
    // sum s^{p+1} are needed.
    if (f.kind == LocalKind::Power && f.b != 0.0) {
        pow_terms_.push_back({f.b, f.p.value()});
    } else if (f.kind == LocalKind::TwoPower) {
        if (f.mu != 0.0) pow_terms_.push_back({f.mu, f.p1.value()});
        if (f.nu != 0.0) pow_terms_.push_back({f.nu, f.p2.value()});
    } else if (f.kind == LocalKind::LogPower && f.b != 0.0) {
        generic_f_ = true;
    }
    for (auto& t : pow_terms_)
        t.moment = g.cell_volume() *
                   det_sum(n, [&](std::size_t i) { return std::pow(s_[i], t.p + 1.0); });

    if (mog_.has_kernel()) {
        std::vector<cd> buf(n);
        par_for(n, [&](std::size_t i) { buf[i] = cd{s_[i], 0.0}; });
        fft_nd(g.plan(), g.dims(), buf.data(), false);
        rhohat2_.resize(n);
        par_for(n, [&](std::size_t i) { rhohat2_[i] = std::norm(buf[i]); });

        const double spectral_w = g.cell_volume() / static_cast<double>(g.cell_count());
        const auto& mw = mog_.mult_W();
        const auto& mxd = mog_.mult_xdW();
        WG1_ = spectral_w * det_sum(n, [&](std::size_t i) { return mw[i] * rhohat2_[i]; });
        xdWG1_ = spectral_w * det_sum(n, [&](std::size_t i) { return mxd[i] * rhohat2_[i]; });

        const RadialKernel rk = RadialKernel::of(mog_.model().kernel);
        dilation_ok_ = rk.has_analytic_multiplier();
        kernel_homogeneous_ = rk.tag == RadialKernel::Tag::InvPow || rk.is_zero();
        if (dilation_ok_ && !kernel_homogeneous_) {
            k2_.resize(n);
            par_for(n, [&](std::size_t i) { k2_[i] = g.wavenumber_sq(i); });
        }
    }
}

FunctionalBreakdown FamilyEvaluator::breakdown(double k, double lambda) const {
    const Grid& g = mog_.grid();
    const int N = g.dims();
    const std::size_t n = s_.size();
    const double w = g.cell_volume();
    const double k2 = k * k;
    const double lamN = std::pow(lambda, N);
    const PotentialSpec& pot = mog_.model().potential;
    const LocalSpec& f = mog_.model().local;

    FunctionalBreakdown b;
    b.mass_sq = k2 / lamN * mass_;
    b.kinetic = k2 * lambda * lambda / lamN * kin_;

    if (!pot.is_zero()) {
        if (pot.kind == PotentialKind::Harmonic) {
            // V(y/lambda) = a r^2 / lambda^2; x.grad V doubles it
            const double base = k2 / lamN / (lambda * lambda) * r2s_moment_;
            b.potential_term = pot.a * base;
            b.xdV_term = 2.0 * pot.a * base;
        } else {
            const double inv_l2 = 1.0 / (lambda * lambda);
            b.potential_term = k2 / lamN * w * det_sum(n, [&](std::size_t i) {
                                   return pot.V(r2_[i] * inv_l2) * s_[i];
                               });
            b.xdV_term = k2 / lamN * w * det_sum(n, [&](std::size_t i) {
                             return pot.x_dot_gradV(r2_[i] * inv_l2) * s_[i];
                         });
        }
    }

    if (!f.is_zero()) {
        if (!generic_f_) {
            // F = sum_i b_i (k^2 s)^{p_i+1}/(p_i+1); s f = sum_i b_i k^{2 p_i} s^{p_i+1}
            double Fint = 0.0, sfint = 0.0;
            for (const auto& t : pow_terms_) {
                const double kp = std::pow(k2, t.p);
                Fint += t.coef * kp * k2 * t.moment / (t.p + 1.0);
                sfint += t.coef * kp * k2 * t.moment;
            }
            b.F_integral = Fint / lamN;
            b.sf_integral = sfint / lamN;
        } else {
            b.F_integral =
                1.0 / lamN * w * det_sum(n, [&](std::size_t i) { return f.F(k2 * s_[i]); });
            b.sf_integral = k2 / lamN * w *
                            det_sum(n, [&](std::size_t i) { return s_[i] * f.f(k2 * s_[i]); });
        }
    }

    if (mog_.has_kernel()) {
        const double pref = k2 * k2 / lamN;
        if (lambda == 1.0) {
            b.WG = pref * WG1_;
            b.xdWG = pref * xdWG1_;
        } else if (kernel_homogeneous_) {
            // What(lambda k) = lambda^{K-N} What(k) for |x|^{-K}; x.grad W shares K
            const double scale = std::pow(lambda, mog_.model().kernel.K - N);
            b.WG = pref * scale * WG1_;
            b.xdWG = pref * scale * xdWG1_;
        } else {
            if (!dilation_ok_)
                throw NumericalError("dilation scaling unsupported for sampled kernel multipliers");
            // Gaussian kernel: multiplier exp(-lambda^2 |k|^2 / 4 pi), zero mode as tabled
            const double spectral_w = w / static_cast<double>(g.cell_count());
            const double a = mog_.model().kernel.a;
            const double l2q = lambda * lambda / (4.0 * kPi_);
            b.WG = pref * spectral_w *
                   det_sum(n, [&](std::size_t i) {
                       return a * std::exp(-l2q * k2_[i]) * rhohat2_[i];
                   });
            b.xdWG = pref * spectral_w *
                     det_sum(n, [&](std::size_t i) {
                         const double kk = lambda * lambda * k2_[i];
                         return a * (-N + kk / (2.0 * kPi_)) * std::exp(-kk / (4.0 * kPi_)) *
                                rhohat2_[i];
                     });
        }
    }
    return b;
}

DiagnosticsRecord FamilyEvaluator::at(double k, double lambda) const {
    return assemble_diagnostics(breakdown(k, lambda), mog_.grid().dims(), omega_);
}

ComplexField materialize_family(const ComplexField& u, double k, double lambda) {
    const Grid& g = *u.grid;
    const std::size_t M = g.points();
    const std::size_t n = g.cell_count();
    ComplexField out = u;

    if (lambda != 1.0) {
        const auto& kv = g.axis_k();
        const auto& xv = g.axis_x();
        std::vector<double> target(M); // lambda*x_j + L/2, the series argument
        for (std::size_t j = 0; j < M; ++j) target[j] = lambda * xv[j] + 0.5 * g.extent();

        for (int axis = 0; axis < g.dims(); ++axis) {
            const std::size_t stride = g.stride(axis);
            const std::size_t block = stride * M;
            const std::size_t nblocks = n / block;
#pragma omp parallel
            {
                std::vector<cd> line(M), coef(M), res(M);
#pragma omp for schedule(static) collapse(2)
                for (long long bl = 0; bl < static_cast<long long>(nblocks); ++bl)
                    for (long long off = 0; off < static_cast<long long>(stride); ++off) {
                        cd* base = out.values.data() + static_cast<std::size_t>(bl) * block +
                                   static_cast<std::size_t>(off);
                        for (std::size_t t = 0; t < M; ++t) coef[t] = base[t * stride];
                        g.plan().line(coef.data(), false);
                        for (std::size_t j = 0; j < M; ++j) {
                            cd acc{0.0, 0.0};
                            for (std::size_t m = 0; m < M; ++m) {
                                const double th = kv[m] * target[j];
                                acc += coef[m] * cd{std::cos(th), std::sin(th)};
                            }
                            res[j] = acc / static_cast<double>(M);
                        }
                        for (std::size_t t = 0; t < M; ++t) base[t * stride] = res[t];
                    }
            }
        }
    }
    if (k != 1.0) par_for(n, [&](std::size_t i) { out.values[i] *= k; });
    return out;
}

ComplexField apply_quadratic_phase(const ComplexField& u, double sigma) {
    ComplexField out = u;
    const Grid& g = *u.grid;
    par_for(out.size(), [&](std::size_t i) {
        const double th = -0.5 * sigma * g.radius_sq(i);
        out.values[i] *= cd{std::cos(th), std::sin(th)};
    });
    return out;
}

ComplexField scale_amplitude(const ComplexField& u, double c) {
    ComplexField out = u;
    par_for(out.size(), [&](std::size_t i) { out.values[i] *= c; });
    return out;
}

ComplexField gradient_I_omega(const ComplexField& u, const ModelOnGrid& mog, double omega) {
    const std::size_t n = u.size();
    const LocalSpec& f = mog.model().local;
    ComplexField g = spectral_laplacian(u);
    std::vector<double> rho(n);
    par_for(n, [&](std::size_t i) { rho[i] = std::norm(u.values[i]); });
    std::vector<double> conv;
    if (mog.has_kernel()) conv = mog.convolve(rho, false);
    const bool has_v = mog.has_potential();
    const bool has_f = !f.is_zero();
    par_for(n, [&](std::size_t i) {
        double coeff = 2.0 * omega;
        if (has_v) coeff += mog.V()[i];
        if (has_f) coeff -= f.f(rho[i]);
        if (!conv.empty()) coeff -= conv[i];
        g.values[i] = coeff * u.values[i] - g.values[i];
    });
    return g;
}

std::optional<double> nehari_amplitude_root(const FamilyEvaluator& ev) {
    // S_omega(rho u)/rho^2 starts positive (quadratic part dominates) and must
    // turn negative for a root to exist.
    auto S = [&](double rho) { return ev.at(rho, 1.0).S_omega / (rho * rho); };
    double lo = 1e-8, hi = 1.0;
    double Shi = S(hi);
    int guard = 0;
    while (Shi > 0.0 && guard++ < 40) {
        hi *= 2.0;
        Shi = S(hi);
    }
    if (Shi > 0.0 || !std::isfinite(Shi)) return std::nullopt;
    for (int it = 0; it < 100 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (S(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace nls
