#include "nls/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nls/reduce.hpp"

namespace nls {

void EvolveOptions::validate() const {
    if (!(dt_min > 0.0) || !(dt_init >= dt_min))
        throw ConfigError("evolve options require 0 < dt_min <= dt_init");
    if (!(t_final > 0.0)) throw ConfigError("t_final must be positive");
    if (!(record_every > 0.0)) throw ConfigError("record_every must be positive");
    if (!(blowup_gradient_factor > 1.0) || !(blowup_sigma_cap > 1.0))
        throw ConfigError("blowup factors must exceed 1");
    if (!(adapt_tolerance > 0.0)) throw ConfigError("adapt_tolerance must be positive");
}

const char* outcome_name(RunOutcome o) {
    switch (o) {
        case RunOutcome::Completed: return "completed";
        case RunOutcome::BlowupDetected: return "blowup_detected";
        case RunOutcome::StepUnderflow: return "step_underflow";
        case RunOutcome::Corrupt: return "corrupt";
    }
    return "?";
}

namespace {

/// Owns per-evolution scratch; one instance per running evolution.
class Stepper {
  public:
    Stepper(const ModelOnGrid& mog) : mog_(mog), g_(mog.grid()) {
        const std::size_t n = g_.cell_count();
        rho_.resize(n);
        phase_.resize(n);
        lap_phase_.resize(n);
        par_for(n, [&](std::size_t i) { lap_phase_[i] = g_.wavenumber_sq(i); });
    }

    void step(std::vector<cd>& u, double dt) {
        nonlinear_half(u, dt);
        potential_half(u, dt);
        laplacian_full(u, dt);
        potential_half(u, dt);
        nonlinear_half(u, dt);
    }

    /// ||grad u||^2 of the mid-step state, measured for free from the spectrum
    /// inside the Laplacian substep. Used as a cheap per-step blowup trigger
    /// (collapse can cross the detection threshold between two record times).
    double last_kinetic() const { return last_kinetic_; }

  private:
    const ModelOnGrid& mog_;
    const Grid& g_;
    std::vector<double> rho_, phase_, lap_phase_;
    double last_kinetic_ = 0.0;

    // u <- u * exp(+i (dt/2) (f(x,|u|^2) + W*|u|^2)); |u|^2 frozen, which is
    // exact since this subflow preserves |u| pointwise.
    void nonlinear_half(std::vector<cd>& u, double dt) {
        const LocalSpec& f = mog_.model().local;
        const bool has_f = !f.is_zero();
        const bool has_w = mog_.has_kernel();
        if (!has_f && !has_w) return;
        const std::size_t n = u.size();
        par_for(n, [&](std::size_t i) { rho_[i] = std::norm(u[i]); });
        if (has_w) {
            const std::vector<double> conv = mog_.convolve(rho_, false);
            if (has_f)
                par_for(n, [&](std::size_t i) { phase_[i] = f.f(rho_[i]) + conv[i]; });
            else
                par_for(n, [&](std::size_t i) { phase_[i] = conv[i]; });
        } else {
            par_for(n, [&](std::size_t i) { phase_[i] = f.f(rho_[i]); });
        }
        const double half = 0.5 * dt;
        par_for(n, [&](std::size_t i) {
            u[i] *= cd{std::cos(half * phase_[i]), std::sin(half * phase_[i])};
        });
    }

    // u <- u * exp(-i (dt/2) V)
    void potential_half(std::vector<cd>& u, double dt) {
        if (!mog_.has_potential()) return;
        const auto& V = mog_.V();
        const double half = 0.5 * dt;
        par_for(u.size(), [&](std::size_t i) {
            u[i] *= cd{std::cos(half * V[i]), -std::sin(half * V[i])};
        });
    }

    // uhat <- uhat * exp(-i dt |k|^2)
    void laplacian_full(std::vector<cd>& u, double dt) {
        fft_nd(g_.plan(), g_.dims(), u.data(), false);
        const double w = g_.cell_volume() / static_cast<double>(g_.cell_count());
        last_kinetic_ =
            w * det_sum(u.size(), [&](std::size_t i) { return lap_phase_[i] * std::norm(u[i]); });
        par_for(u.size(), [&](std::size_t i) {
            u[i] *= cd{std::cos(dt * lap_phase_[i]), -std::sin(dt * lap_phase_[i])};
        });
        fft_nd(g_.plan(), g_.dims(), u.data(), true);
    }
};

double l2_diff(const Grid& g, const std::vector<cd>& a, const std::vector<cd>& b) {
    return std::sqrt(g.cell_volume() *
                     det_sum(a.size(), [&](std::size_t i) { return std::norm(a[i] - b[i]); }));
}

double l2(const Grid& g, const std::vector<cd>& a) {
    return std::sqrt(g.cell_volume() *
                     det_sum(a.size(), [&](std::size_t i) { return std::norm(a[i]); }));
}

} // namespace

ComplexField step_strang(const ComplexField& u, const ModelOnGrid& mog, double dt) {
    if (!(dt > 0.0)) throw ConfigError("step_strang requires dt > 0");
    ComplexField out = u;
    Stepper st(mog);
    st.step(out.values, dt);
    return out;
}

StopDecision detect_blowup(const std::vector<DiagnosticsRecord>& records,
                           const EvolveOptions& opts, bool dt_underflow) {
    StopDecision d;
    if (records.empty()) return d;
    const DiagnosticsRecord& r0 = records.front();
    const DiagnosticsRecord& r = records.back();

    if (r0.kinetic > 0.0 && r.kinetic >= sq(opts.blowup_gradient_factor) * r0.kinetic) {
        d.stop = true;
        d.reason = RunOutcome::BlowupDetected;
        return d;
    }
    if (r.sigma_norm_sq >= opts.blowup_sigma_cap) {
        d.stop = true;
        d.reason = RunOutcome::BlowupDetected;
        return d;
    }
    if (dt_underflow) {
        bool monotone = records.size() >= 10;
        for (std::size_t i = records.size() >= 10 ? records.size() - 10 : 0;
             monotone && i + 1 < records.size(); ++i)
            monotone = records[i + 1].kinetic > records[i].kinetic;
        d.stop = true;
        d.reason = monotone ? RunOutcome::BlowupDetected : RunOutcome::StepUnderflow;
    }
    return d;
}

double fit_j_curvature(const std::vector<DiagnosticsRecord>& records) {
    // Fit over the smooth window: records before kinetic exceeded 100x its
    // initial value (all records on completed runs). Time is mapped to [0,1]
    // for conditioning; the quadratic coefficient is rescaled back.
    if (records.size() < 3) return 0.0;
    const double kin0 = records.front().kinetic;
    std::size_t nfit = records.size();
    if (kin0 > 0.0) {
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (records[i].kinetic > 100.0 * kin0) {
                nfit = i;
                break;
            }
        }
    }
    if (nfit < 3) nfit = std::min<std::size_t>(3, records.size());

    const double t0 = records.front().t;
    const double t1 = records[nfit - 1].t;
    if (!(t1 > t0)) return 0.0;
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, b0 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < nfit; ++i) {
        const double x = (records[i].t - t0) / (t1 - t0);
        const double y = records[i].J;
        const double x2 = x * x;
        s0 += 1.0; s1 += x; s2 += x2; s3 += x2 * x; s4 += x2 * x2;
        b0 += y; b1 += x * y; b2 += x2 * y;
    }
    // Solve the 3x3 normal equations by Cramer's rule.
    const double det = s0 * (s2 * s4 - s3 * s3) - s1 * (s1 * s4 - s2 * s3) +
                       s2 * (s1 * s3 - s2 * s2);
    if (det == 0.0) return 0.0;
    const double c2 = (s0 * (s2 * b2 - s3 * b1) - s1 * (s1 * b2 - s3 * b0) +
                       s2 * (s1 * b1 - s2 * b0)) /
                      det;
    return 2.0 * c2 / sq(t1 - t0);
}

TrajectoryLog evolve(const ComplexField& u0, const ModelOnGrid& mog, double omega,
                     const EvolveOptions& opts) {
    opts.validate();
    if (u0.grid.get() != mog.grid_ptr().get())
        throw ConfigError("initial data and model live on different grids");

    TrajectoryLog log;
    ComplexField u = u0;
    Stepper st(mog);
    const Grid& g = mog.grid();

    log.records.push_back(diagnostics(u, mog, omega, 0.0));
    if (opts.snapshot_every > 0.0) log.snapshots.emplace_back(0.0, u);

    double t = 0.0;
    double dt = opts.dt_init;
    double next_snapshot = opts.snapshot_every;
    bool underflow = false;
    bool corrupt = false;
    bool kinetic_trigger = false;

    const double kin0 = log.records.front().kinetic;
    const double kin_cap = sq(opts.blowup_gradient_factor) * kin0;

    std::vector<cd> coarse, fine;

    const long long nrec = static_cast<long long>(std::ceil(opts.t_final / opts.record_every - 1e-9));
    for (long long rec = 1; rec <= nrec && !underflow && !corrupt && !kinetic_trigger; ++rec) {
        const double target = std::min(opts.t_final, opts.record_every * static_cast<double>(rec));
        while (t < target - 1e-12 * opts.t_final) {
            const double dts = std::min(dt, target - t);
            if (!opts.adapt) {
                st.step(u.values, dts);
                t += dts;
            } else {
                // Step doubling: one dts step against two dts/2 steps.
                coarse = u.values;
                st.step(coarse, dts);
                fine = u.values;
                st.step(fine, 0.5 * dts);
                st.step(fine, 0.5 * dts);
                const double err = l2_diff(g, coarse, fine) / std::max(1.0, l2(g, fine));
                if (!std::isfinite(err)) {
                    corrupt = true;
                    break;
                }
                if (err > opts.adapt_tolerance) {
                    if (dts <= opts.dt_min * (1.0 + 1e-12)) {
                        underflow = true;
                        break;
                    }
                    dt = std::max(0.5 * dts, opts.dt_min);
                    continue;
                }
                u.values = fine;
                t += dts;
                if (err < 0.1 * opts.adapt_tolerance) dt = std::min(2.0 * dts, opts.dt_init);
            }
            // cheap per-step trigger: collapse can cross the threshold between records
            if (kin0 > 0.0 && st.last_kinetic() >= kin_cap) {
                kinetic_trigger = true;
                break;
            }
        }
        if (corrupt) break;
        if (!underflow && !kinetic_trigger) t = target;

        DiagnosticsRecord r;
        try {
            r = diagnostics(u, mog, omega, t);
        } catch (const NumericalError&) {
            corrupt = true;
            break;
        }
        if (!r.finite()) {
            corrupt = true;
            break;
        }
        log.records.push_back(r);
        if (opts.snapshot_every > 0.0 && t >= next_snapshot - 1e-12) {
            log.snapshots.emplace_back(t, u);
            next_snapshot += opts.snapshot_every;
        }

        const StopDecision d = detect_blowup(log.records, opts, underflow);
        if (d.stop || kinetic_trigger) {
            log.outcome = kinetic_trigger ? RunOutcome::BlowupDetected : d.reason;
            log.t_end = t;
            const double kin_peak = std::max(log.records.back().kinetic, st.last_kinetic());
            log.evidence.gradient_growth = kin0 > 0.0 ? std::sqrt(kin_peak / kin0) : 0.0;
            log.evidence.dt_at_stop = dt;
            log.evidence.j_curvature_fit = fit_j_curvature(log.records);
            return log;
        }
    }

    log.t_end = t;
    if (corrupt) {
        log.outcome = RunOutcome::Corrupt;
    } else if (underflow) {
        const StopDecision d = detect_blowup(log.records, opts, true);
        log.outcome = d.reason; // blowup if kinetic rose monotonically, else underflow
    } else {
        log.outcome = RunOutcome::Completed;
    }
    log.evidence.gradient_growth =
        log.records.front().kinetic > 0.0
            ? std::sqrt(log.records.back().kinetic / log.records.front().kinetic)
            : 0.0;
    log.evidence.dt_at_stop = dt;
    log.evidence.j_curvature_fit = fit_j_curvature(log.records);
    return log;
}

std::string TrajectoryLog::csv() const {
    std::ostringstream os;
    os << DiagnosticsRecord::csv_header() << "\n";
    for (const auto& r : records) os << r.csv_row() << "\n";
    return os.str();
}

} // namespace nls
