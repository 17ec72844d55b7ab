#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "nls/classify.hpp"
#include "nls/config.hpp"
#include "nls/io.hpp"
#include "nls/rng.hpp"

namespace nls {

namespace {

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ComplexField build_initial(const RunConfig& cfg, const ModelOnGrid& mog) {
    const InitialConfig& ic = cfg.initial;
    ComplexField u;
    if (ic.kind == "gaussian") {
        u = ComplexField(mog.grid_ptr());
        const Grid& g = mog.grid();
        const double inv2w2 = 0.5 / (ic.width * ic.width);
        for (std::size_t i = 0; i < u.size(); ++i)
            u.values[i] = cd{ic.amplitude * std::exp(-g.radius_sq(i) * inv2w2), 0.0};
    } else if (ic.kind == "snapshot") {
        u = nlsf1_read(ic.path);
        if (u.grid->dims() != mog.grid().dims() || u.grid->points() != mog.grid().points() ||
            u.grid->extent() != mog.grid().extent())
            throw ConfigError("snapshot grid does not match the configured grid");
        u.grid = mog.grid_ptr();
        if (ic.amplitude != 1.0) u = scale_amplitude(u, ic.amplitude);
    } else { // ground_state
        GroundstateOptions go;
        go.seed = cfg.seed;
        go.init_width = ic.width;
        const StationaryState st = solve_stationary(mog, cfg.omega, nullptr, go);
        if (!st.converged)
            throw NumericalError("initial.kind=ground_state: solver failed (" + st.failure + ")");
        u = st.field;
        if (ic.amplitude != 1.0) u = scale_amplitude(u, ic.amplitude);
    }
    if (ic.quad_phase_sigma != 0.0) u = apply_quadratic_phase(u, ic.quad_phase_sigma);
    return u;
}

SearchOptions search_options(const RunConfig& cfg) {
    SearchOptions so;
    so.restarts = cfg.threshold.restarts;
    so.descent_steps = cfg.threshold.descent_steps;
    so.seed = cfg.seed;
    so.enforce_gate = cfg.threshold.enforce_gate;
    so.groundstate.seed = cfg.seed;
    return so;
}

struct ComputedThresholds {
    ThresholdSet set;
    std::string text;
    std::vector<std::pair<std::string, ComplexField>> minimizers;
};

ComputedThresholds compute_thresholds(const RunConfig& cfg, const ModelOnGrid& mog) {
    ComputedThresholds out;
    const SearchOptions so = search_options(cfg);
    std::optional<ThresholdReport> dN, dM;
    for (const std::string& which : cfg.threshold.which) {
        ThresholdReport rep;
        if (which == "d_I") rep = estimate_d_I(mog, cfg.omega, so);
        else if (which == "d_prime_I") rep = estimate_d_prime_I(mog, cfg.omega, so);
        else if (which == "d_N") rep = estimate_d_N(mog, cfg.omega, so);
        else if (which == "d_M") rep = estimate_d_M(mog, cfg.omega, so);
        else if (which == "d_II") {
            if (!dN) { dN = estimate_d_N(mog, cfg.omega, so); out.text += dN->serialize() + "\n"; }
            if (!dM) { dM = estimate_d_M(mog, cfg.omega, so); out.text += dM->serialize() + "\n"; }
            rep = estimate_d_II(*dN, *dM);
        } else {
            continue;
        }
        out.text += rep.serialize() + "\n";
        if (which == "d_I" || which == "d_prime_I") out.set.d_I = rep;
        if (which == "d_N") { dN = rep; out.set.d_N = rep; }
        if (which == "d_M") { dM = rep; out.set.d_M = rep; }
        if (cfg.threshold.save_minimizer && rep.minimizer.grid)
            out.minimizers.emplace_back(which, rep.minimizer);
    }
    if (dN) out.set.d_N = dN;
    if (dM) out.set.d_M = dM;
    return out;
}

void write_output(const std::filesystem::path& dir, const std::string& name,
                  const std::string& content, RunResult& res) {
    const std::string path = (dir / name).string();
    atomic_write_text(path, content);
    res.outputs.push_back(name);
}

std::string snapshot_time_tag(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", t);
    return buf;
}

void execute(const RunConfig& cfg, const std::filesystem::path& dir, RunResult& res) {
    auto grid = make_grid(cfg.model.dims, cfg.grid.extent, cfg.grid.points);
    const ModelOnGrid mog = ModelOnGrid::build(grid, cfg.model);

    switch (cfg.command) {
        case Command::Simulate: {
            const ComplexField u0 = build_initial(cfg, mog);
            const TrajectoryLog traj = evolve(u0, mog, cfg.omega, cfg.evolve);
            write_output(dir, cfg.run_id + "_traj.csv", traj.csv(), res);
            for (const auto& [t, field] : traj.snapshots) {
                const std::string name = cfg.run_id + "_t" + snapshot_time_tag(t) + ".nlsf";
                nlsf1_write((dir / name).string(), field);
                res.outputs.push_back(name);
            }
            res.summary.emplace_back("outcome", outcome_name(traj.outcome));
            res.summary.emplace_back("t_end", fmt(traj.t_end));
            res.summary.emplace_back("gradient_growth", fmt(traj.evidence.gradient_growth));
            if (traj.outcome == RunOutcome::Corrupt) {
                res.exit_code = 3;
                res.error = "corrupt field during evolution";
            }
            break;
        }
        case Command::Groundstate: {
            GroundstateOptions go;
            go.seed = cfg.seed;
            go.init_width = cfg.initial.width;
            const StationaryState st = solve_stationary(mog, cfg.omega, nullptr, go);
            if (!st.converged)
                throw NumericalError("stationary solver failed: " + st.failure);
            const IdentityReport idr = verify_stationary_identities(st, mog);
            nlsf1_write((dir / (cfg.run_id + "_state.nlsf")).string(), st.field);
            res.outputs.push_back(cfg.run_id + "_state.nlsf");
            std::ostringstream os;
            os << "omega=" << fmt(st.omega) << "\n"
               << "residual_norm=" << fmt(st.residual_norm) << "\n"
               << "iterations=" << st.iterations << "\n"
               << "S_omega=" << fmt(idr.s_omega) << "\n"
               << "Q=" << fmt(idr.q) << "\n"
               << "pohozaev_residual=" << fmt(idr.pohozaev_residual) << "\n"
               << "identity_tolerance=" << fmt(idr.eps) << "\n"
               << "identities_ok=" << ((idr.s_ok && idr.q_ok) ? 1 : 0) << "\n";
            write_output(dir, cfg.run_id + "_groundstate.txt", os.str(), res);
            res.summary.emplace_back("residual_norm", fmt(st.residual_norm));
            break;
        }
        case Command::Threshold: {
            if (cfg.threshold.which.empty())
                throw ConfigError("threshold command requires threshold.which");
            const ComputedThresholds ct = compute_thresholds(cfg, mog);
            write_output(dir, cfg.run_id + "_thresholds.txt", ct.text, res);
            for (const auto& [which, field] : ct.minimizers) {
                const std::string name = cfg.run_id + "_" + which + "_min.nlsf";
                nlsf1_write((dir / name).string(), field);
                res.outputs.push_back(name);
            }
            break;
        }
        case Command::Classify: {
            const ComplexField u0 = build_initial(cfg, mog);
            const ComputedThresholds ct = compute_thresholds(cfg, mog);
            if (!ct.text.empty()) write_output(dir, cfg.run_id + "_thresholds.txt", ct.text, res);
            ClassificationReport rep = classify_initial_data(u0, mog, cfg.omega, ct.set);
            if (cfg.observe) {
                const TrajectoryLog traj = evolve(u0, mog, cfg.omega, cfg.evolve);
                rep.observed = traj.outcome;
                rep.t_end = traj.t_end;
                write_output(dir, cfg.run_id + "_traj.csv", traj.csv(), res);
            }
            std::ostringstream os;
            os << classification_csv_header() << "\n"
               << classification_csv_row(cfg.initial.amplitude, rep) << "\n";
            write_output(dir, cfg.run_id + "_classify.csv", os.str(), res);
            res.summary.emplace_back("set_label", set_label_name(rep.set_label));
            res.summary.emplace_back("prediction", prediction_name(rep.prediction));
            res.summary.emplace_back("reasons", rep.reasons);
            break;
        }
        case Command::Dichotomy: {
            const ComplexField base = build_initial(cfg, mog);
            const ComputedThresholds ct = compute_thresholds(cfg, mog);
            if (!ct.text.empty()) write_output(dir, cfg.run_id + "_thresholds.txt", ct.text, res);
            DichotomyOptions dop;
            dop.amplitudes = cfg.dichotomy.amplitudes;
            dop.quad_phase_sigma = cfg.dichotomy.quad_phase_sigma;
            dop.quad_phase_min_c = cfg.dichotomy.quad_phase_min_c;
            dop.evolve = cfg.evolve;
            const auto rows = dichotomy_experiment(base, mog, cfg.omega, ct.set, dop);
            write_output(dir, cfg.run_id + "_classify.csv", dichotomy_csv(rows), res);
            bool all_agree = true;
            for (const auto& r : rows) all_agree = all_agree && r.agreement;
            res.summary.emplace_back("rows", std::to_string(rows.size()));
            res.summary.emplace_back("all_agree", all_agree ? "1" : "0");
            break;
        }
        case Command::Sweep: break; // handled by the caller
    }
}

RunConfig apply_override(const RunConfig& base, const std::string& key, double value) {
    RunConfig cfg = base;
    if (key == "omega") cfg.omega = value;
    else if (key == "initial.amplitude") cfg.initial.amplitude = value;
    else if (key == "initial.width") cfg.initial.width = value;
    else if (key == "initial.quad_phase_sigma") cfg.initial.quad_phase_sigma = value;
    else throw ConfigError("unsupported sweep key '" + key + "'");
    if (!(cfg.omega > 0.0)) throw ConfigError("omega must stay positive along the sweep");
    return cfg;
}

void execute_sweep(const RunConfig& cfg, const std::filesystem::path& dir, RunResult& res) {
    auto grid = make_grid(cfg.model.dims, cfg.grid.extent, cfg.grid.points);
    const ModelOnGrid mog = ModelOnGrid::build(grid, cfg.model);

    // Thresholds are shared across rows (same model and, unless swept, omega).
    ComputedThresholds shared;
    const bool sweep_omega = cfg.sweep.key == "omega";
    if (!sweep_omega && !cfg.threshold.which.empty()) shared = compute_thresholds(cfg, mog);

    std::ostringstream os;
    if (cfg.sweep.command == "classify")
        os << classification_csv_header() << ",exit\n";
    else if (cfg.sweep.command == "simulate")
        os << "value,outcome,t_end,exit\n";
    else
        os << "value,which,threshold,converged,exit\n";

    std::vector<std::string> rows(cfg.sweep.values.size());
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(cfg.sweep.values.size()); ++i) {
        const double v = cfg.sweep.values[static_cast<std::size_t>(i)];
        std::ostringstream row;
        try {
            RunConfig rc = apply_override(cfg, cfg.sweep.key, v);
            rc.seed = Rng::mix(cfg.seed, 0xa11 + static_cast<std::uint64_t>(i));
            if (cfg.sweep.command == "classify") {
                const ComplexField u0 = build_initial(rc, mog);
                ThresholdSet ts = shared.set;
                if (sweep_omega && !rc.threshold.which.empty())
                    ts = compute_thresholds(rc, mog).set;
                ClassificationReport rep = classify_initial_data(u0, mog, rc.omega, ts);
                if (rc.observe) {
                    const TrajectoryLog traj = evolve(u0, mog, rc.omega, rc.evolve);
                    rep.observed = traj.outcome;
                    rep.t_end = traj.t_end;
                }
                row << classification_csv_row(v, rep) << ",0";
            } else if (cfg.sweep.command == "simulate") {
                const ComplexField u0 = build_initial(rc, mog);
                const TrajectoryLog traj = evolve(u0, mog, rc.omega, rc.evolve);
                row << fmt(v) << "," << outcome_name(traj.outcome) << "," << fmt(traj.t_end)
                    << "," << (traj.outcome == RunOutcome::Corrupt ? 3 : 0);
            } else { // threshold
                if (rc.threshold.which.empty())
                    throw ConfigError("sweep over threshold requires threshold.which");
                const ComputedThresholds ct = compute_thresholds(rc, mog);
                const std::string& which = rc.threshold.which.front();
                double val = 0.0;
                bool conv = false;
                if (which == "d_N" && ct.set.d_N) { val = ct.set.d_N->value; conv = ct.set.d_N->converged; }
                else if (which == "d_M" && ct.set.d_M) { val = ct.set.d_M->value; conv = ct.set.d_M->converged; }
                else if (ct.set.d_I) { val = ct.set.d_I->value; conv = ct.set.d_I->converged; }
                row << fmt(v) << "," << which << "," << fmt(val) << "," << (conv ? 1 : 0) << ",0";
            }
        } catch (const ConfigError& e) {
            row << fmt(v) << ",error,,,1";
        } catch (const HypothesisError& e) {
            row << fmt(v) << ",error,,,2";
        } catch (const std::exception& e) {
            row << fmt(v) << ",error,,,3";
        }
        rows[static_cast<std::size_t>(i)] = row.str();
    }
    for (const auto& r : rows) os << r << "\n";
    write_output(dir, cfg.run_id + "_sweep.csv", os.str(), res);
    res.summary.emplace_back("rows", std::to_string(rows.size()));
}

} // namespace

RunResult run_config(const RunConfig& cfg, const std::string& config_bytes, bool quiet) {
    RunResult res;
    const std::string started = utc_now();
    const std::filesystem::path dir(cfg.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);

    try {
        if (cfg.command == Command::Sweep) {
            if (cfg.sweep.values.empty() && cfg.sweep.command.empty())
                throw ConfigError("sweep command requires a sweep block");
            execute_sweep(cfg, dir, res);
        } else {
            execute(cfg, dir, res);
        }
    } catch (const ConfigError& e) {
        res.exit_code = 1;
        res.error = e.what();
    } catch (const HypothesisError& e) {
        res.exit_code = 2;
        res.error = e.what();
    } catch (const NumericalError& e) {
        res.exit_code = 3;
        res.error = e.what();
    } catch (const std::exception& e) {
        res.exit_code = 3;
        res.error = e.what();
    }

    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(config_bytes)));
    std::ostringstream man;
    man << "artifact_version=" << kArtifactVersion << "\n"
        << "config_fnv1a64=" << hash << "\n"
        << "seed=" << cfg.seed << "\n"
        << "started=" << started << "\n"
        << "finished=" << utc_now() << "\n"
        << "exit=" << res.exit_code << "\n";
    for (const auto& o : res.outputs) man << "output=" << o << "\n";
    for (const auto& [k, v] : res.summary) man << "summary." << k << "=" << v << "\n";
    if (!res.error.empty()) man << "error=" << res.error << "\n";
    try {
        atomic_write_text((dir / "manifest.txt").string(), man.str());
    } catch (const std::exception& e) {
        if (!quiet) std::cerr << "manifest write failed: " << e.what() << "\n";
        if (res.exit_code == 0) res.exit_code = 1;
    }
    if (!quiet) {
        if (res.exit_code == 0)
            std::cerr << "ok: outputs in " << cfg.output_dir << "\n";
        else
            std::cerr << "error (exit " << res.exit_code << "): " << res.error << "\n";
    }
    return res;
}

} // namespace nls
