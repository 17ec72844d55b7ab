#include "nls/classify.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "nls/reduce.hpp"

namespace nls {

const char* set_label_name(SetLabel s) {
    switch (s) {
        case SetLabel::None: return "none";
        case SetLabel::K: return "K";
        case SetLabel::KPlus: return "K_plus";
        case SetLabel::RPlus: return "R_plus";
        case SetLabel::Thm3KPlus: return "Thm3_K_plus";
        case SetLabel::Thm3KMinus: return "Thm3_K_minus";
        case SetLabel::OutsideScope: return "outside_scope";
    }
    return "?";
}

const char* prediction_name(Prediction p) {
    switch (p) {
        case Prediction::Global: return "global";
        case Prediction::Blowup: return "blowup";
        case Prediction::Indeterminate: return "indeterminate";
    }
    return "?";
}

std::optional<double> ThresholdSet::d_I_value() const {
    if (d_I && d_I->converged) return d_I->value;
    return std::nullopt;
}

std::optional<double> ThresholdSet::d_II_value() const {
    if (d_N && d_M && d_N->converged && d_M->converged)
        return std::min(d_N->value, d_M->value);
    return std::nullopt;
}

bool ThresholdSet::d_II_converged() const { return d_II_value().has_value(); }

ClassificationReport classify_initial_data(const ComplexField& u0, const ModelOnGrid& mog,
                                           double omega, const ThresholdSet& thresholds) {
    ClassificationReport rep;
    const HypothesisReport hyp = check_hypotheses(mog.model());
    rep.theorems = {hyp.thm1, hyp.thm2, hyp.thm3, hyp.thm4};

    const DiagnosticsRecord d = diagnostics(u0, mog, omega, 0.0);
    rep.I_omega = d.I_omega;
    rep.S_omega = d.S_omega;
    rep.Q = d.Q;
    rep.Q1 = d.Q1;
    rep.E = d.energy;
    rep.J0 = d.J;
    rep.J_prime0 = d.J_prime;
    rep.d_I = thresholds.d_I_value();
    rep.d_II = thresholds.d_II_value();

    std::ostringstream why;
    Prediction pred = Prediction::Indeterminate;

    // Routes are evaluated in order; the first applicable one fixes the
    // prediction. Set labels are assigned by the live threshold routes
    // regardless, so the K/K_plus/R_plus partition is independent of which
    // theorem spoke first.

    // Route 1: Theorem 1 — hypotheses alone give global existence.
    if (hyp.thm1.holds) {
        pred = Prediction::Global;
        why << "Theorem 1: hypotheses hold ((V2), W+ growth, F <= c1 s + c2 s^{p+1}, p < 2/N); ";
    } else {
        why << "Theorem 1 inapplicable; ";
    }

    // Route 2: Theorem 2 — E(u0) < 0 (or E = 0 with J'(0) < 0).
    if (hyp.thm2.holds) {
        if (pred == Prediction::Indeterminate && rep.E < 0.0) {
            pred = Prediction::Blowup;
            why << "Theorem 2: hypotheses hold and E(u0) < 0; ";
        } else if (pred == Prediction::Indeterminate && rep.E == 0.0 && rep.J_prime0 < 0.0) {
            pred = Prediction::Blowup;
            why << "Theorem 2: hypotheses hold, E(u0) = 0 and J'(0) < 0; ";
        } else if (pred == Prediction::Indeterminate) {
            why << "Theorem 2 hypotheses hold but E(u0) >= 0; ";
        }
    } else {
        why << "Theorem 2 inapplicable; ";
    }

    // Route 3: Theorem 3 (V == 0) / Corollary 4.1 (V == W == 0, Q1 threshold).
    const bool v_zero = mog.model().potential.is_zero();
    const bool w_zero = mog.model().kernel.is_zero();
    const bool thm3_ok = v_zero && (hyp.thm3.holds || (w_zero && hyp.cor41.holds));
    if (thm3_ok) {
        if (!rep.d_I) {
            why << "Theorem 3 route skipped: threshold report missing or non-converged; ";
        } else if (rep.I_omega < *rep.d_I) {
            const double Qc = w_zero && !hyp.thm3.holds ? rep.Q1 : rep.Q; // Q == Q1 when V=W=0
            if (Qc > 0.0) {
                rep.set_label = SetLabel::Thm3KPlus;
                if (pred == Prediction::Indeterminate) {
                    pred = Prediction::Global;
                    why << "Theorem 3(1): I_omega < d_I and Q(u0) > 0; ";
                }
            } else if (Qc < 0.0) {
                rep.set_label = SetLabel::Thm3KMinus;
                if (pred == Prediction::Indeterminate) {
                    if (rep.J_prime0 < 0.0) {
                        pred = Prediction::Blowup;
                        why << "Theorem 3(2): I_omega < d_I, Q(u0) < 0 and J'(0) < 0; ";
                    } else {
                        why << "Theorem 3(2) needs J'(0) < 0 (got " << rep.J_prime0
                            << "); theorem silent; ";
                    }
                }
            }
        } else {
            why << "Theorem 3 route: I_omega >= d_I (outside scope); ";
        }
    } else if (v_zero) {
        why << "Theorem 3 hypotheses fail; ";
    }

    // Route 4: Theorem 4 (or its Hartree-only Corollary 5.1 slice) — the K /
    // K_plus / R_plus partition below d_II.
    if (hyp.thm4.holds || (mog.model().local.is_zero() && v_zero && hyp.cor51.holds)) {
        if (!rep.d_II) {
            why << "Theorem 4 route skipped: d_II report missing or non-converged; ";
        } else if (rep.I_omega < *rep.d_II) {
            if (rep.S_omega > 0.0) {
                rep.set_label = SetLabel::RPlus;
                if (pred == Prediction::Indeterminate) {
                    pred = Prediction::Global;
                    why << "Theorem 4 / Lemma 5.2.2: u0 in R_plus; ";
                }
            } else if (rep.Q > 0.0) {
                rep.set_label = SetLabel::KPlus;
                if (pred == Prediction::Indeterminate) {
                    pred = Prediction::Global;
                    why << "Theorem 4 / Lemma 5.2.2: u0 in K_plus; ";
                }
            } else {
                rep.set_label = SetLabel::K;
                // roundoff guard: real initial data has J'(0) = 0 up to noise
                if (!(rep.J_prime0 < -1e-9 * std::max(1.0, rep.J0))) {
                    rep.j_prime_premise_flag = true;
                    why << "[K, but Prop 2.2 premise unmet: J'(0) = " << rep.J_prime0
                        << " >= 0 - prediction retained per Theorem 4, evidence flagged] ";
                }
                if (pred == Prediction::Indeterminate) {
                    pred = Prediction::Blowup;
                    why << "Theorem 4 / Lemma 5.2.1: u0 in K (S_omega < 0, Q < 0); ";
                }
            }
        } else {
            if (rep.set_label == SetLabel::None) rep.set_label = SetLabel::OutsideScope;
            why << "Theorem 4 route: I_omega >= d_II (outside scope); ";
        }
    }

    if (pred == Prediction::Indeterminate) why << "no route concludes";
    if (rep.set_label == SetLabel::None && pred == Prediction::Indeterminate)
        rep.set_label = SetLabel::OutsideScope;
    rep.prediction = pred;
    rep.reasons = why.str();
    return rep;
}

InvarianceReport monitor_invariance(const TrajectoryLog& traj, double d_level,
                                    bool theorem3_mode) {
    InvarianceReport rep;
    if (traj.records.size() < 2) return rep;
    const DiagnosticsRecord& r0 = traj.records.front();
    if (!(r0.I_omega < d_level)) return rep; // outside the theorem's hypothesis
    rep.asserted = true;
    const bool s0 = r0.S_omega > 0.0;
    const bool q0 = r0.Q > 0.0;
    for (std::size_t i = 1; i < traj.records.size(); ++i) {
        const DiagnosticsRecord& r = traj.records[i];
        ++rep.records_checked;
        const bool q_flip = (r.Q > 0.0) != q0;
        const bool s_flip = !theorem3_mode && ((r.S_omega > 0.0) != s0);
        if (q_flip || s_flip) {
            rep.first_violation = static_cast<int>(i);
            return rep;
        }
    }
    return rep;
}

std::vector<DichotomyRow> dichotomy_experiment(const ComplexField& base, const ModelOnGrid& mog,
                                               double omega, const ThresholdSet& thresholds,
                                               const DichotomyOptions& opts) {
    std::vector<DichotomyRow> rows;
    const std::optional<double> dII = thresholds.d_II_value();
    const std::optional<double> dI = thresholds.d_I_value();
    for (double c : opts.amplitudes) {
        DichotomyRow row;
        row.c = c;
        ComplexField u0 = scale_amplitude(base, c);
        if (opts.quad_phase_sigma != 0.0 && c >= opts.quad_phase_min_c)
            u0 = apply_quadratic_phase(u0, opts.quad_phase_sigma);
        const ClassificationReport rep = classify_initial_data(u0, mog, omega, thresholds);
        row.I_omega = rep.I_omega;
        row.S_omega = rep.S_omega;
        row.Q = rep.Q;
        row.set_label = rep.set_label;
        row.prediction = rep.prediction;
        if (opts.run_evolution) {
            const TrajectoryLog traj = evolve(u0, mog, omega, opts.evolve);
            row.observed = outcome_name(traj.outcome);
            row.t_end = traj.t_end;
            if (rep.prediction == Prediction::Global)
                row.agreement = traj.outcome == RunOutcome::Completed;
            else if (rep.prediction == Prediction::Blowup)
                row.agreement = traj.outcome == RunOutcome::BlowupDetected;
            else
                row.agreement = true; // indeterminate rows are recorded without judgment
            const double level = dII ? *dII : (dI ? *dI : -1.0);
            if (level > 0.0)
                row.invariance = monitor_invariance(traj, level, !dII.has_value());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string classification_csv_header() {
    return "c,I_omega,S_omega,Q,set_label,prediction,observed,t_end";
}

std::string dichotomy_csv(const std::vector<DichotomyRow>& rows) {
    std::ostringstream os;
    os << classification_csv_header() << "\n";
    for (const auto& r : rows) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g", r.c, r.I_omega, r.S_omega,
                      r.Q);
        os << buf << "," << set_label_name(r.set_label) << "," << prediction_name(r.prediction)
           << "," << (r.observed.empty() ? "-" : r.observed);
        std::snprintf(buf, sizeof buf, ",%.17g", r.t_end);
        os << buf << "\n";
    }
    return os.str();
}

std::string classification_csv_row(double c, const ClassificationReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g", c, r.I_omega, r.S_omega, r.Q);
    std::string row(buf);
    row += std::string(",") + set_label_name(r.set_label) + "," + prediction_name(r.prediction);
    row += ",";
    row += r.observed ? outcome_name(*r.observed) : "-";
    std::snprintf(buf, sizeof buf, ",%.17g", r.t_end);
    row += buf;
    return row;
}

} // namespace nls
