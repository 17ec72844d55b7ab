#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nls/dynamics.hpp"
#include "nls/thresholds.hpp"

namespace nls {

enum class SetLabel { None, K, KPlus, RPlus, Thm3KPlus, Thm3KMinus, OutsideScope };
enum class Prediction { Global, Blowup, Indeterminate };

const char* set_label_name(SetLabel s);
const char* prediction_name(Prediction p);

/// Threshold estimates handed to the classifier. Missing or non-converged
/// reports disable the corresponding route (with a warning in the reasons).
struct ThresholdSet {
    std::optional<ThresholdReport> d_I;       // Theorem 3 route (or d'_I for V=W=0)
    std::optional<ThresholdReport> d_N, d_M;  // Theorem 4 route

    std::optional<double> d_I_value() const;
    std::optional<double> d_II_value() const;
    bool d_II_converged() const;
};

struct ClassificationReport {
    std::vector<TheoremCheck> theorems; // order: thm1, thm2, thm3, thm4 (named in reasons)
    SetLabel set_label = SetLabel::None;
    Prediction prediction = Prediction::Indeterminate;
    std::string reasons;
    // memberships / signs recorded for the report
    double I_omega = 0.0, S_omega = 0.0, Q = 0.0, Q1 = 0.0, E = 0.0;
    double J0 = 0.0, J_prime0 = 0.0; // |x| u0 in L^2 is automatic on a box; J(0) recorded
    std::optional<double> d_I, d_II;
    bool j_prime_premise_flag = false; // K with J'(0) >= 0: Prop 2.2 premise unmet, flagged
    std::optional<RunOutcome> observed;
    double t_end = 0.0;
};

ClassificationReport classify_initial_data(const ComplexField& u0, const ModelOnGrid& mog,
                                           double omega, const ThresholdSet& thresholds);

struct InvarianceReport {
    bool asserted = false;   // false when I_omega(u0) >= d (outside the theorem's scope)
    int first_violation = -1;
    int records_checked = 0;
    bool clean() const { return asserted && first_violation < 0; }
};

/// Sign persistence of S_omega and Q along a trajectory while I_omega(u0) < d.
/// theorem3_mode monitors Q only (the Theorem 3 sets are defined by Q alone).
InvarianceReport monitor_invariance(const TrajectoryLog& traj, double d_level,
                                    bool theorem3_mode);

struct DichotomyRow {
    double c = 0.0;
    double I_omega = 0.0, S_omega = 0.0, Q = 0.0;
    SetLabel set_label = SetLabel::None;
    Prediction prediction = Prediction::Indeterminate;
    std::string observed; // outcome name, "" when not evolved
    double t_end = 0.0;
    bool agreement = true; // non-indeterminate rows: prediction vs observed
    InvarianceReport invariance;
};

struct DichotomyOptions {
    std::vector<double> amplitudes;
    double quad_phase_sigma = 0.0;  // applied for c >= quad_phase_min_c
    double quad_phase_min_c = 1.0;
    EvolveOptions evolve;
    bool run_evolution = true;
};

std::vector<DichotomyRow> dichotomy_experiment(const ComplexField& base, const ModelOnGrid& mog,
                                               double omega, const ThresholdSet& thresholds,
                                               const DichotomyOptions& opts);

std::string dichotomy_csv(const std::vector<DichotomyRow>& rows);
std::string classification_csv_header();
std::string classification_csv_row(double c, const ClassificationReport& r);

} // namespace nls
