#pragma once

#include <optional>
#include <vector>

#include "nls/functionals.hpp"

namespace nls {

struct EvolveOptions {
    double dt_init = 1e-3;
    double dt_min = 1e-10;
    double t_final = 1.0;
    double record_every = 1e-2;
    double blowup_gradient_factor = 1e3; // trigger: kinetic >= factor^2 * kinetic(0)
    double blowup_sigma_cap = 1e8;
    bool adapt = false;
    double adapt_tolerance = 1e-8; // local L^2 error target per step (step doubling)
    double snapshot_every = 0.0;   // 0 = no field snapshots

    void validate() const;
};

enum class RunOutcome { Completed, BlowupDetected, StepUnderflow, Corrupt };

const char* outcome_name(RunOutcome o);

struct BlowupEvidence {
    double gradient_growth = 0.0; // ||grad u|| / ||grad u0|| at stop
    double dt_at_stop = 0.0;
    double j_curvature_fit = 0.0; // least-squares quadratic curvature of J(t)
};

struct TrajectoryLog {
    std::vector<DiagnosticsRecord> records;
    RunOutcome outcome = RunOutcome::Completed;
    double t_end = 0.0;
    BlowupEvidence evidence;
    std::vector<std::pair<double, ComplexField>> snapshots;

    std::string csv() const;
};

/// One Strang step: nonlinear half phase (|u|^2 frozen; exact for that subflow),
/// V half phase, exact spectral Laplacian step, V half phase, nonlinear half phase.
/// Sign conventions follow i u_t = -Lap u + V u - f u - (W*|u|^2) u.
ComplexField step_strang(const ComplexField& u, const ModelOnGrid& mog, double dt);

TrajectoryLog evolve(const ComplexField& u0, const ModelOnGrid& mog, double omega,
                     const EvolveOptions& opts);

struct StopDecision {
    bool stop = false;
    RunOutcome reason = RunOutcome::Completed;
};

/// Evaluated on the recorded diagnostics so far. `dt_underflow` marks that the
/// adaptive stepper hit dt_min while the tolerance was still exceeded.
StopDecision detect_blowup(const std::vector<DiagnosticsRecord>& records,
                           const EvolveOptions& opts, bool dt_underflow);

/// Least-squares quadratic curvature of J(t) over the pre-collapse window.
double fit_j_curvature(const std::vector<DiagnosticsRecord>& records);

} // namespace nls
