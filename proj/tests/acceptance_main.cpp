// Acceptance suite: every criterion runs at its stated tolerance and prints
// one pass/fail line. The whole battery executes twice with the same seeds;
// the second pass must reproduce every CSV/text artifact byte for byte
// (criterion 9). Artifacts land under ./acceptance_out.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nls/classify.hpp"
#include "nls/io.hpp"
#include "nls/rng.hpp"
#include "reference.hpp"

using namespace nls;

namespace {

constexpr double kPi = 3.141592653589793238462643;

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

struct Artifacts {
    std::map<std::string, std::string> files;
    void put(const std::string& name, const std::string& content) { files[name] = content; }
};

ComplexField gaussian(const std::shared_ptr<const Grid>& g, double A, double width) {
    ComplexField u(g);
    for (std::size_t i = 0; i < u.size(); ++i)
        u.values[i] = cd{A * std::exp(-0.5 * g->radius_sq(i) / (width * width)), 0.0};
    return u;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Shared heavy state within one pass.
struct PassState {
    // criterion 1/2: quintic conservation run
    TrajectoryLog conservation;
    // criterion 5: quintic ground state (M = 1024, L = 40)
    std::shared_ptr<const Grid> quintic_grid;
    ModelOnGrid quintic_mog;
    StationaryState quintic_state;
    // criteria 6-8: Example-1 3D model
    std::shared_ptr<const Grid> ex1_grid;
    ModelOnGrid ex1_mog;
    StationaryState ex1_state;
    ThresholdSet ex1_thresholds;
};

ModelSpec quintic_model() {
    ModelSpec m;
    m.dims = 1;
    m.local.kind = LocalKind::Power;
    m.local.b = 1.0;
    m.local.p = Rational(2, 1);
    return m;
}

ModelSpec septic_model() {
    ModelSpec m = quintic_model();
    m.local.p = Rational(3, 1);
    return m;
}

ModelSpec example1_model() {
    // Remark 5.2.1 Example 1 instantiated in Theorem 4's admissible region:
    // N = 3, V = |x|^2, W = 0.5 |x|^{-5/2}, f = s^{4/5} + s.
    ModelSpec m;
    m.dims = 3;
    m.potential = {PotentialKind::Harmonic, 1.0};
    m.local.kind = LocalKind::TwoPower;
    m.local.mu = 1.0;
    m.local.nu = 1.0;
    m.local.p1 = Rational(4, 5);
    m.local.p2 = Rational(1, 1);
    m.kernel = {KernelKind::InversePower, 0.5, 2.5, 0.0};
    m.l = Rational(3, 4);
    return m;
}

// --- criterion 1: conservation --------------------------------------------

Outcome criterion1(PassState& st, Artifacts& art) {
    Outcome out;
    auto g = make_grid(1, 40.0, 1024);
    const ModelOnGrid mog = ModelOnGrid::build(g, quintic_model());
    const ComplexField u0 = gaussian(g, 0.8, std::sqrt(0.5)); // A e^{-x^2}

    auto run = [&](double dt) {
        EvolveOptions opts;
        opts.dt_init = dt;
        opts.t_final = 5.0;
        opts.record_every = 1e-2;
        return evolve(u0, mog, 1.0, opts);
    };
    const TrajectoryLog full = run(1e-3);
    const TrajectoryLog half = run(5e-4);
    art.put("c1_traj.csv", full.csv());

    out.require(full.outcome == RunOutcome::Completed, "run did not complete");
    const double m0 = full.records.front().mass_sq;
    const double e0 = full.records.front().energy;
    double mass_drift = 0.0, e_drift = 0.0, e_drift_half = 0.0;
    for (const auto& r : full.records) {
        mass_drift = std::max(mass_drift, std::abs(r.mass_sq - m0) / m0);
        e_drift = std::max(e_drift, std::abs(r.energy - e0) / std::abs(e0));
    }
    for (const auto& r : half.records)
        e_drift_half = std::max(e_drift_half,
                                std::abs(r.energy - half.records.front().energy) /
                                    std::abs(half.records.front().energy));
    out.require(mass_drift <= 1e-11, "mass drift " + fmt(mass_drift) + " > 1e-11");
    out.require(e_drift <= 1e-6, "energy drift " + fmt(e_drift) + " > 1e-6");
    const double ratio = e_drift / e_drift_half;
    out.require(ratio >= 3.5 && ratio <= 4.5,
                "dt-halving energy-drift ratio " + fmt(ratio) + " outside [3.5, 4.5]");
    out.detail += " mass_drift=" + fmt(mass_drift) + " energy_drift=" + fmt(e_drift) +
                  " halving_ratio=" + fmt(ratio);
    st.conservation = full;
    return out;
}

// --- criterion 2: virial identity ------------------------------------------

Outcome criterion2(PassState& st, Artifacts&) {
    Outcome out;
    const auto& rec = st.conservation.records;
    out.require(rec.size() >= 501, "conservation run too short");
    if (!out.pass) return out;
    // 20 interior sample times in t = 0.24 .. 1.76: late times are excluded
    // because dispersive tails wrap around the periodic box and contaminate
    // the |x|^2-weighted moment (box-size guidance in the README)
    const double dt = 1e-2;
    double worst = 0.0;
    for (int k = 3; k <= 22; ++k) {
        const std::size_t i = static_cast<std::size_t>(k) * 8;
        const double d2J = (rec[i + 1].J - 2.0 * rec[i].J + rec[i - 1].J) / (dt * dt);
        const double q4 = 4.0 * rec[i].Q;
        worst = std::max(worst, std::abs(d2J - q4) / std::abs(q4));
    }
    out.require(worst <= 1e-2, "virial mismatch " + fmt(worst) + " > 1e-2");
    out.detail += " max_rel_err=" + fmt(worst);
    return out;
}

// --- criterion 3: Theorem 2 blowup -----------------------------------------

Outcome criterion3(PassState&, Artifacts& art) {
    Outcome out;
    auto g = make_grid(1, 10.0, 16384);
    const ModelOnGrid mog = ModelOnGrid::build(g, quintic_model());
    const ComplexField u0 = gaussian(g, 2.0, std::sqrt(0.5)); // 2 e^{-x^2}

    // E(u0) < 0 by quadrature of the analytic integrand
    const double kin = nlsref::integrate(
        [](double x) { return sq(-4.0 * x * std::exp(-x * x)); }, -8.0, 8.0, 1e-12);
    const double s3 = nlsref::integrate(
        [](double x) { return std::pow(2.0 * std::exp(-x * x), 6.0); }, -8.0, 8.0, 1e-12);
    const double E0 = 0.5 * kin - s3 / 6.0;
    out.require(E0 < 0.0, "oracle energy not negative");

    // Adaptive stepping tracks the collapse to the grid scale; the per-step
    // kinetic trigger catches the threshold crossing inside a record interval.
    EvolveOptions opts;
    opts.dt_init = 1e-3;
    opts.dt_min = 1e-12;
    opts.t_final = 2.0;
    opts.record_every = 5e-3;
    opts.adapt = true;
    opts.adapt_tolerance = 1e-5;
    const TrajectoryLog log = evolve(u0, mog, 1.0, opts);
    art.put("c3_traj.csv", log.csv());

    out.require(log.outcome == RunOutcome::BlowupDetected, "blowup not detected");
    out.require(log.t_end < 2.0, "detection after t = 2");
    out.require(log.evidence.gradient_growth >= 1e3,
                "gradient growth " + fmt(log.evidence.gradient_growth) + " < 1e3");
    const double J2 = log.evidence.j_curvature_fit;
    const double bound = 16.0 * E0 * (1.0 - 1e-2);
    out.require(J2 <= bound, "fitted J'' = " + fmt(J2) + " above " + fmt(bound));
    out.detail += " t*=" + fmt(log.t_end) + " growth=" + fmt(log.evidence.gradient_growth) +
                  " J''=" + fmt(J2) + " 16E=" + fmt(16.0 * E0);
    return out;
}

// --- criterion 4: Theorem 1 global route ------------------------------------

Outcome criterion4(PassState&, Artifacts& art) {
    Outcome out;
    ModelSpec m;
    m.dims = 2;
    m.potential = {PotentialKind::Harmonic, 1.0};
    m.kernel = {KernelKind::Gaussian, 1.0, 0.0, 0.0};
    m.local.kind = LocalKind::Power;
    m.local.b = 1.0;
    m.local.p = Rational(2, 5);
    auto g = make_grid(2, 16.0, 256);
    const ModelOnGrid mog = ModelOnGrid::build(g, m);
    out.require(check_hypotheses(m).thm1.holds, "Theorem 1 gate failed");

    EvolveOptions opts;
    opts.dt_init = 2.5e-3;
    opts.t_final = 5.0;
    opts.record_every = 2.5e-2;
    const TrajectoryLog log = evolve(gaussian(g, 2.0, 1.0), mog, 1.0, opts);
    art.put("c4_traj.csv", log.csv());

    out.require(log.outcome == RunOutcome::Completed, "run did not complete");
    const double s0 = log.records.front().sigma_norm_sq;
    double smax = 0.0;
    for (const auto& r : log.records) smax = std::max(smax, r.sigma_norm_sq);
    out.require(smax <= 2.0 * s0,
                "sigma norm grew to " + fmt(smax / s0) + "x its initial value");
    out.detail += " sigma_growth=" + fmt(smax / s0);
    return out;
}

// --- criterion 5: stationary identities --------------------------------------

Outcome criterion5(PassState& st, Artifacts& art) {
    Outcome out;
    st.quintic_grid = make_grid(1, 40.0, 1024);
    st.quintic_mog = ModelOnGrid::build(st.quintic_grid, quintic_model());
    GroundstateOptions go;
    go.seed = 2024;
    st.quintic_state = solve_stationary(st.quintic_mog, 1.0, nullptr, go);
    out.require(st.quintic_state.converged, "stationary solver failed");
    if (!st.quintic_state.converged) return out;

    std::vector<double> xs(st.quintic_grid->cell_count());
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = st.quintic_grid->axis_x()[i];
    const std::vector<double> oracle = nlsref::shoot_soliton(1.0, 2.0, xs);
    double err2 = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        err2 += sq(std::abs(st.quintic_state.field.values[i]) - oracle[i]);
    err2 = std::sqrt(err2 * st.quintic_grid->cell_volume());
    out.require(err2 <= 1e-6, "soliton L2 error " + fmt(err2) + " > 1e-6");

    const IdentityReport idr = verify_stationary_identities(st.quintic_state, st.quintic_mog);
    out.require(std::abs(idr.s_omega) <= 1e-6, "|S_omega| = " + fmt(std::abs(idr.s_omega)));
    out.require(std::abs(idr.q) <= 1e-6, "|Q| = " + fmt(std::abs(idr.q)));
    out.require(std::abs(idr.pohozaev_residual) <= 1e-6,
                "Pohozaev residual " + fmt(std::abs(idr.pohozaev_residual)));
    out.detail += " L2_err=" + fmt(err2) + " S=" + fmt(idr.s_omega) + " Q=" + fmt(idr.q) +
                  " poho=" + fmt(idr.pohozaev_residual);

    std::ostringstream os;
    os << "omega=" << fmt(1.0) << "\nresidual_norm=" << fmt(st.quintic_state.residual_norm)
       << "\nS_omega=" << fmt(idr.s_omega) << "\nQ=" << fmt(idr.q)
       << "\npohozaev_residual=" << fmt(idr.pohozaev_residual)
       << "\nsoliton_l2_error=" << fmt(err2) << "\n";
    art.put("c5_groundstate.txt", os.str());
    return out;
}

// --- criterion 6: threshold positivity and stability --------------------------

Outcome criterion6(PassState& st, Artifacts& art) {
    Outcome out;
    st.ex1_grid = make_grid(3, 10.0, 32);
    st.ex1_mog = ModelOnGrid::build(st.ex1_grid, example1_model());
    out.require(check_hypotheses(example1_model()).thm4.holds, "Theorem 4 gate failed");

    GroundstateOptions go;
    go.seed = 2024;
    st.ex1_state = solve_stationary(st.ex1_mog, 1.0, nullptr, go);
    out.require(st.ex1_state.converged, "3D stationary solver failed");

    SearchOptions so;
    so.restarts = 3;
    so.descent_steps = 80;
    so.seed = 2024;
    const ThresholdReport dN = estimate_d_N(st.ex1_mog, 1.0, so);
    const ThresholdReport dM = estimate_d_M(st.ex1_mog, 1.0, so);
    const ThresholdReport dII = estimate_d_II(dN, dM);
    st.ex1_thresholds.d_N = dN;
    st.ex1_thresholds.d_M = dM;
    art.put("c6_thresholds.txt", dN.serialize() + "\n" + dM.serialize() + "\n" + dII.serialize());

    for (const ThresholdReport* r : {&dN, &dM, &dII}) {
        out.require(r->value > 0.0, std::string(threshold_name(r->which)) + " not positive");
        out.require(r->constraint_residual <= 1e-6,
                    std::string(threshold_name(r->which)) + " constraint residual " +
                        fmt(r->constraint_residual));
    }
    auto spread = [](const ThresholdReport& r) {
        double lo = r.restart_values.front(), hi = lo;
        for (double v : r.restart_values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return (hi - lo) / lo;
    };
    out.require(dN.converged, "d_N restart spread " + fmt(spread(dN)) + " > 10%");
    out.require(dM.converged, "d_M restart spread " + fmt(spread(dM)) + " > 10%");
    out.detail += " d_N=" + fmt(dN.value) + " d_M=" + fmt(dM.value) + " d_II=" + fmt(dII.value);
    return out;
}

// --- criterion 7: dichotomy experiments ---------------------------------------

Outcome criterion7(PassState& st, Artifacts& art) {
    Outcome out;

    // 7a: Theorem 3 route, 1D septic (p = 3 > 2/N), quadratic phase on the
    // blowup side per the criterion.
    {
        auto g = make_grid(1, 40.0, 2048);
        const ModelOnGrid mog = ModelOnGrid::build(g, septic_model());
        GroundstateOptions go;
        go.seed = 2024;
        const StationaryState ws = solve_stationary(mog, 1.0, nullptr, go);
        out.require(ws.converged, "septic soliton solve failed");
        if (!ws.converged) return out;

        SearchOptions so;
        so.restarts = 3;
        so.descent_steps = 100;
        so.seed = 2024;
        ThresholdSet ts;
        ts.d_I = estimate_d_prime_I(mog, 1.0, so);
        out.require(ts.d_I->converged, "d'_I report not converged");

        DichotomyOptions dop;
        dop.amplitudes = {0.6, 0.8, 0.95, 1.1, 1.3};
        dop.quad_phase_sigma = 0.5;
        dop.quad_phase_min_c = 1.0;
        dop.evolve.dt_init = 2e-4;
        dop.evolve.dt_min = 1e-9;
        dop.evolve.t_final = 3.0;
        dop.evolve.record_every = 2e-2;
        dop.evolve.adapt = true;
        dop.evolve.adapt_tolerance = 1e-8;
        dop.evolve.blowup_gradient_factor = 25.0;
        const auto rows = dichotomy_experiment(ws.field, mog, 1.0, ts, dop);
        art.put("c7a_classify.csv", dichotomy_csv(rows));

        int nondeterminate = 0;
        for (const auto& r : rows) {
            if (r.prediction != Prediction::Indeterminate) ++nondeterminate;
            out.require(r.agreement, "7a: c = " + fmt(r.c) + " predicted " +
                                         prediction_name(r.prediction) + ", observed " +
                                         r.observed);
            out.require(!(r.invariance.asserted && r.invariance.first_violation >= 0),
                        "7a: sign flip at c = " + fmt(r.c));
        }
        out.require(nondeterminate >= 4, "7a: too few conclusive rows");
    }

    // 7b: Theorem 4 route on the Example-1 model, raw amplitude ray.
    {
        out.require(st.ex1_state.converged && st.ex1_thresholds.d_II_converged(),
                    "7b: missing 3D state or thresholds");
        if (!out.pass) return out;
        DichotomyOptions dop;
        dop.amplitudes = {0.6, 0.8, 0.95, 1.1, 1.3};
        dop.quad_phase_sigma = 0.0;
        dop.evolve.dt_init = 2e-3;
        dop.evolve.dt_min = 1e-6;
        dop.evolve.t_final = 2.5;
        dop.evolve.record_every = 2.5e-2;
        dop.evolve.adapt = true;
        dop.evolve.adapt_tolerance = 1e-7;
        dop.evolve.blowup_gradient_factor = 4.0;
        const auto rows =
            dichotomy_experiment(st.ex1_state.field, st.ex1_mog, 1.0, st.ex1_thresholds, dop);
        art.put("c7b_classify.csv", dichotomy_csv(rows));
        for (const auto& r : rows) {
            out.require(r.agreement, "7b: c = " + fmt(r.c) + " predicted " +
                                         prediction_name(r.prediction) + ", observed " +
                                         r.observed);
            out.require(!(r.invariance.asserted && r.invariance.first_violation >= 0),
                        "7b: sign flip at c = " + fmt(r.c));
        }
    }
    return out;
}

// --- criterion 8: partition property ------------------------------------------

Outcome criterion8(PassState& st, Artifacts& art) {
    Outcome out;
    out.require(st.ex1_thresholds.d_II_converged(), "missing d_II");
    if (!out.pass) return out;
    const double dII = *st.ex1_thresholds.d_II_value();

    std::ostringstream csv;
    csv << "trial,I_omega,S_omega,Q,set_label\n";
    Rng rng(991);
    int assigned = 0, trials = 0;
    while (assigned < 100 && trials < 400) {
        ++trials;
        // random smooth field: Gaussian envelope times low-order cosine ripple
        ComplexField u(st.ex1_grid);
        const double w = 0.7 + rng.uniform();
        double amp[3], ph[3];
        int mode[3];
        for (int a = 0; a < 3; ++a) {
            amp[a] = 0.4 * rng.uniform();
            ph[a] = rng.uniform(0.0, 2.0 * kPi);
            mode[a] = 1 + static_cast<int>(rng.uniform() * 2.999);
        }
        const Grid& g = *st.ex1_grid;
        for (std::size_t i = 0; i < u.size(); ++i) {
            double ripple = 1.0;
            for (int a = 0; a < 3; ++a) {
                const double x = g.axis_x()[g.axis_index(i, a)];
                ripple += amp[a] * std::cos(2.0 * kPi * mode[a] * x / g.extent() + ph[a]);
            }
            u.values[i] = cd{ripple * std::exp(-0.5 * g.radius_sq(i) / (w * w)), 0.0};
        }
        // scale onto a random level below d_II (smallest amplitude root)
        FamilyEvaluator ev(u, st.ex1_mog, 1.0);
        const double target = (0.1 + 0.85 * rng.uniform()) * dII;
        double lo = 0.0, hi = 1.0;
        while (ev.at(hi, 1.0).I_omega < target && hi < 64.0) hi *= 2.0;
        if (hi >= 64.0) continue;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (ev.at(mid, 1.0).I_omega < target ? lo : hi) = mid;
        }
        const double rho = 0.5 * (lo + hi);
        const ClassificationReport rep =
            classify_initial_data(scale_amplitude(u, rho), st.ex1_mog, 1.0, st.ex1_thresholds);
        if (!(rep.I_omega < dII)) continue;
        const int hits = (rep.set_label == SetLabel::K ? 1 : 0) +
                         (rep.set_label == SetLabel::KPlus ? 1 : 0) +
                         (rep.set_label == SetLabel::RPlus ? 1 : 0);
        out.require(hits == 1, "trial " + std::to_string(trials) + " got label " +
                                   set_label_name(rep.set_label));
        ++assigned;
        csv << trials << "," << fmt(rep.I_omega) << "," << fmt(rep.S_omega) << ","
            << fmt(rep.Q) << "," << set_label_name(rep.set_label) << "\n";
    }
    out.require(assigned == 100, "only " + std::to_string(assigned) + " samples below d_II");
    art.put("c8_partition.csv", csv.str());
    out.detail += " samples=" + std::to_string(assigned);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    auto run_pass = [&](Artifacts& art, std::vector<Outcome>& res) {
        PassState st;
        using Fn = Outcome (*)(PassState&, Artifacts&);
        const Fn fns[] = {criterion1, criterion2, criterion3, criterion4,
                          criterion5, criterion6, criterion7, criterion8};
        auto needed = [&](int crit) {
            if (!only) return true;
            if (only == crit) return true;
            // dependencies: 2 reuses 1's run; 7 and 8 reuse 6's thresholds
            if (only == 2 && crit == 1) return true;
            if ((only == 7 || only == 8) && crit == 6) return true;
            return false;
        };
        for (int i = 0; i < 8; ++i) {
            if (!needed(i + 1)) {
                res.push_back({});
                continue;
            }
            const auto t0 = std::chrono::steady_clock::now();
            Outcome o;
            try {
                o = fns[i](st, art);
            } catch (const std::exception& e) {
                o.pass = false;
                o.detail = std::string("exception: ") + e.what();
            }
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            o.detail += " (" + std::to_string(secs).substr(0, 5) + " s)";
            res.push_back(o);
        }
    };

    const char* names[] = {
        "conservation of mass and energy (quintic, dt and dt/2)",
        "virial identity J'' = 4Q at 20 interior times",
        "Theorem 2 blowup: detection, gradient growth, fitted J'' <= 16E",
        "Theorem 1 global route (2D harmonic + Gaussian kernel)",
        "stationary identities: soliton match, S_omega, Q, Pohozaev",
        "threshold positivity and restart stability (d_N, d_M, d_II)",
        "dichotomy experiments (Theorem 3 and Theorem 4 routes)",
        "partition property: K / K_plus / R_plus below d_II",
    };

    Artifacts artA, artB;
    std::vector<Outcome> resA, resB;
    run_pass(artA, resA);
    run_pass(artB, resB);

    namespace fs = std::filesystem;
    fs::create_directories("acceptance_out");
    for (const auto& [name, content] : artA.files)
        atomic_write_text((fs::path("acceptance_out") / name).string(), content);

    bool all = true;
    for (int i = 0; i < 8; ++i) {
        if (only && resA[i].detail.empty() && resA[i].pass) continue;
        const bool p = resA[i].pass;
        all = all && p;
        std::printf("[%s] criterion %d: %s —%s\n", p ? "PASS" : "FAIL", i + 1, names[i],
                    resA[i].detail.c_str());
    }

    if (!only) {
        bool identical = artA.files.size() == artB.files.size();
        std::string mismatch;
        for (const auto& [name, content] : artA.files) {
            const auto it = artB.files.find(name);
            if (it == artB.files.end() || it->second != content) {
                identical = false;
                mismatch += " " + name;
            }
        }
        all = all && identical;
        std::printf("[%s] criterion 9: determinism — rerun artifacts byte-identical%s\n",
                    identical ? "PASS" : "FAIL", mismatch.c_str());
    }
    return all ? 0 : 1;
}
