#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nls/model.hpp"

// Closed-form hypothesis checks for the built-in (V, f, W) families. The
// conditions are quantified over all s >= 0 (and all x), so they are decided
// by exponent/sign algebra rather than sampling; rational exponents make the
// boundary cases (p = 2/N, p = 1) exact.

namespace nls {

namespace {

struct ExpTerm {
    double coef;
    Rational p;
};

std::vector<ExpTerm> local_terms(const LocalSpec& f) {
    switch (f.kind) {
        case LocalKind::Zero: return {};
        case LocalKind::Power: return {{f.b, f.p}};
        case LocalKind::TwoPower: return {{f.mu, f.p1}, {f.nu, f.p2}};
        case LocalKind::LogPower: return {{f.b, f.p}}; // log factor handled per check
    }
    return {};
}

bool rational_gt(const Rational& p, long long num, long long den) {
    return Rational(num, den) < p;
}
bool rational_ge(const Rational& p, long long num, long long den) {
    return Rational(num, den) <= p;
}

/// p < 2/(N-2)+ (always true for N = 1, 2).
bool below_energy_critical(const Rational& p, int N) {
    if (N < 3) return true;
    return p < Rational(2, N - 2);
}

void note(TheoremCheck& c, const std::string& s) { c.reasons.push_back(s); }

void fail(TheoremCheck& c, const std::string& s) {
    c.holds = false;
    c.reasons.push_back("FAIL: " + s);
}

// Admissible l for the (4.1)-type sandwich l*F <= s*f - F <= c1 s^{p1+1} + c2 s^{p2+1}.
// Returns the closed upper bounds and lower bounds contributed by f (on top of
// the structural 2/N < l < 2/(N-2)+), or nullopt when no l can be certified.
struct LInterval {
    double lo;      // strict lower bound
    double hi;      // upper bound (closed unless hi_strict)
    bool hi_strict;
    bool ok;
    std::string why;
};

LInterval l_interval_for_f(const LocalSpec& f, int N) {
    LInterval iv;
    iv.lo = 2.0 / N;
    iv.hi = N >= 3 ? 2.0 / (N - 2) : std::numeric_limits<double>::infinity();
    iv.hi_strict = true;
    iv.ok = true;

    if (f.is_zero()) {
        iv.why = "f == 0: condition (4.1) is vacuous";
        return iv;
    }
    if (f.kind == LocalKind::LogPower) {
        if (f.b > 0) {
            // l <= p certifies l*F <= s*f - F; the upper bound absorbs the log
            // into a slightly larger exponent, which needs p strictly below
            // the energy-critical exponent.
            if (!rational_gt(f.p, 2, N) || !below_energy_critical(f.p, N)) {
                iv.ok = false;
                iv.why = "log-power exponent p outside (2/N, 2/(N-2)+)";
                return iv;
            }
            iv.hi = std::min(iv.hi, f.p.value());
            iv.hi_strict = false;
            iv.why = "log-power b>0: l <= p";
            return iv;
        }
        iv.ok = false;
        iv.why = "no closed-form certificate for (4.1) with b<0 log-power";
        return iv;
    }

    // Pure power sums: s*f - F = sum_i coef_i * p_i/(p_i+1) * s^{p_i+1}.
    //   lower: per term, sign(coef_i) * (p_i - l) >= 0
    //   upper: every positive-coefficient exponent must lie in (2/N, 2/(N-2)+)
    for (const ExpTerm& t : local_terms(f)) {
        if (t.coef == 0.0) continue;
        if (t.coef > 0.0) {
            if (!rational_gt(t.p, 2, N) || !below_energy_critical(t.p, N)) {
                iv.ok = false;
                iv.why = "positive-coefficient exponent " + t.p.str() +
                         " outside (2/N, 2/(N-2)+)";
                return iv;
            }
            iv.hi = std::min(iv.hi, t.p.value());
            iv.hi_strict = false;
        } else {
            iv.lo = std::max(iv.lo, t.p.value()); // l >= p_i, closed; keep strict lo for safety
        }
    }
    iv.why = "power-sum sandwich";
    return iv;
}

// W-side constraint N*l*W + x.grad W <= 0 as an upper bound on l.
bool l_upper_from_kernel(const KernelSpec& w, int N, double* hi, std::string* why) {
    switch (w.kind) {
        case KernelKind::Zero: *why = "W == 0"; return true;
        case KernelKind::InversePower:
            if (w.a < 0) { *why = "inverse-power kernel with a<0 breaks W>=0 side"; return false; }
            *hi = std::min(*hi, w.K / N);
            *why = "N*l <= K for |x|^-K";
            return true;
        case KernelKind::BridgedInversePower:
            if (w.a < 0) { *why = "bridged kernel with a<0"; return false; }
            *hi = std::min(*hi, w.K_inner / N);
            *why = "N*l <= K_inner for the bridged kernel";
            return true;
        case KernelKind::Gaussian:
            if (w.a == 0) { *why = "W == 0"; return true; }
            *why = "N*l*W + x.grad W changes sign for the Gaussian kernel";
            return false;
        case KernelKind::Saturating:
            if (w.a == 0) { *why = "W == 0"; return true; }
            *why = "x.grad W >= 0 for the saturating kernel";
            return false;
    }
    return false;
}

// Pick a concrete l in (lo, hi]; honor the model-supplied l when present.
bool choose_l(const ModelSpec& m, double lo, double hi, bool hi_strict, double* out,
              std::string* why) {
    if (m.l) {
        const double lv = m.l->value();
        const bool ok = lv > lo && (hi_strict ? lv < hi : lv <= hi);
        if (!ok) {
            *why = "model-supplied l = " + m.l->str() + " outside the admissible interval";
            return false;
        }
        *out = lv;
        return true;
    }
    if (!(hi > lo)) {
        *why = "admissible l interval is empty";
        return false;
    }
    if (std::isinf(hi)) {
        *out = 1.5 * lo + 1.0;
    } else if (hi_strict) {
        *out = 0.5 * (lo + hi);
    } else {
        *out = hi;
    }
    return true;
}

// (W1): W in L^q + L^inf for some q > N/4.
bool kernel_w1(const KernelSpec& w, int N, std::string* why) {
    (void)N; // feasibility below reduces to K < 4 for every N in {1,2,3}
    switch (w.kind) {
        case KernelKind::Zero: *why = "W == 0"; return true;
        case KernelKind::Gaussian: *why = "Gaussian kernel lies in every L^q"; return true;
        case KernelKind::Saturating: *why = "bounded kernel, L^inf part"; return true;
        case KernelKind::InversePower:
            // singular part in L^q needs q*K < N; q > N/4 leaves room iff K < 4.
            if (w.K < 4.0) { *why = "q in (N/4, N/K) nonempty since K < 4"; return true; }
            *why = "inverse-power K >= 4";
            return false;
        case KernelKind::BridgedInversePower:
            if (w.K_inner < 4.0) { *why = "q in (N/4, N/K_inner) nonempty"; return true; }
            *why = "bridged inner exponent >= 4";
            return false;
    }
    return false;
}

// Theorem-3 membership: W in L^q alone with N/4 < q < N/2.
bool kernel_lq_alone(const KernelSpec& w, int N, std::string* why) {
    switch (w.kind) {
        case KernelKind::Zero: *why = "W == 0 lies in every L^q"; return true;
        case KernelKind::Gaussian: *why = "Gaussian lies in every L^q"; return true;
        case KernelKind::Saturating:
            *why = "saturating kernel is bounded away from zero at infinity, not in any L^q";
            return false;
        case KernelKind::InversePower:
            *why = "global |x|^-K is in no single L^q (tail needs qK>N, origin qK<N)";
            return false;
        case KernelKind::BridgedInversePower: {
            // q must satisfy q*K_inner < N (origin) and q*K > N (tail),
            // intersected with (N/4, N/2).
            const double lo = std::max(N / 4.0, N / w.K);
            const double hi = std::min(N / 2.0, N / w.K_inner);
            if (lo < hi) {
                *why = "q in (" + std::to_string(lo) + ", " + std::to_string(hi) + ")";
                return true;
            }
            *why = "no q in (N/4, N/2) fits the bridged exponents";
            return false;
        }
    }
    return false;
}

} // namespace

HypothesisReport check_hypotheses(const ModelSpec& m) {
    HypothesisReport rep;
    const int N = m.dims;
    const LocalSpec& f = m.local;
    const KernelSpec& w = m.kernel;
    const PotentialSpec& v = m.potential;
    std::string why;

    const bool v2_class = v.kind == PotentialKind::Harmonic && v.a > 0;

    // ---- Theorem 1 (global existence) ----
    {
        TheoremCheck& c = rep.thm1;
        c.holds = true;
        if (v2_class)
            note(c, "(V2): harmonic potential, smooth with bounded D^a V for |a|>=2");
        else
            fail(c, "Theorem 1 assumes (V2); potential is (V1)-class or zero");

        // W+ in L^q + L^inf, q >= N/2 (q > 1 if N = 2)
        bool wplus = false;
        switch (w.kind) {
            case KernelKind::Zero: wplus = true; why = "W == 0"; break;
            case KernelKind::Gaussian: wplus = true; why = "Gaussian in every L^q"; break;
            case KernelKind::Saturating: wplus = true; why = "bounded, L^inf part"; break;
            case KernelKind::InversePower:
                if (w.a <= 0) { wplus = true; why = "W+ == 0"; }
                else if (w.K < 2.0 && !(N == 2 && w.K >= 2.0)) {
                    // need q >= N/2 (q>1 if N=2) with q*K < N: possible iff K < 2
                    wplus = true;
                    why = "q in [N/2, N/K) nonempty since K < 2";
                } else { why = "inverse-power with K >= 2: no q >= N/2 integrates the origin"; }
                break;
            case KernelKind::BridgedInversePower:
                if (w.a <= 0) { wplus = true; why = "W+ == 0"; }
                else { why = "bridged inner singularity too strong for q >= N/2"; }
                break;
        }
        if (wplus) note(c, "(1.14)-type W+ condition: " + why);
        else fail(c, "W+ condition: " + why);

        // F(x,s) <= c1 s + c2 s^{p+1}, 0 < p < 2/N
        bool growth = true;
        std::string gwhy = "F <= 0";
        if (!f.is_zero()) {
            for (const ExpTerm& t : local_terms(f)) {
                if (t.coef <= 0.0) continue;
                const bool strict_ok =
                    f.kind == LocalKind::LogPower ? t.p < Rational(2, N) : t.p < Rational(2, N);
                if (!strict_ok) {
                    growth = false;
                    gwhy = "positive term with exponent " + t.p.str() + " >= 2/N";
                    break;
                }
                gwhy = "positive exponents below 2/N";
            }
        }
        if (growth) note(c, "F-growth: " + gwhy);
        else fail(c, "F-growth: " + gwhy);
    }

    // ---- Theorem 2 (blowup) ----
    {
        TheoremCheck& c = rep.thm2;
        c.holds = true;
        note(c, "local well-posedness: catalog potentials satisfy (V1) or (V2)");

        if (kernel_w1(w, N, &why)) note(c, "(W1): " + why);
        else fail(c, "(W1): " + why);

        // (N+2)F - N s f <= 0 for all s
        bool fcond = true;
        std::string fwhy = "f == 0";
        if (!f.is_zero()) {
            if (f.kind == LocalKind::LogPower) {
                if (f.b > 0) {
                    fcond = rational_ge(f.p, 2, N);
                    fwhy = fcond ? "b>0 and p >= 2/N (log family)" : "b>0 but p < 2/N";
                } else {
                    fcond = f.p < Rational(2, N);
                    fwhy = fcond ? "b<0 and p < 2/N (log family)" : "b<0 but p >= 2/N";
                }
            } else {
                for (const ExpTerm& t : local_terms(f)) {
                    if (t.coef == 0.0) continue;
                    // coef * (2 - N p) <= 0
                    const bool term_ok =
                        t.coef > 0 ? rational_ge(t.p, 2, N) : t.p <= Rational(2, N);
                    if (!term_ok) {
                        fcond = false;
                        fwhy = "term coef=" + std::to_string(t.coef) + ", p=" + t.p.str() +
                               " has coef*(2-Np) > 0";
                        break;
                    }
                }
                if (fcond) fwhy = "each term satisfies coef*(2-Np) <= 0";
            }
        }
        if (fcond) note(c, "(N+2)F - N s f <= 0: " + fwhy);
        else fail(c, "(N+2)F - N s f <= 0: " + fwhy);

        // 2V + x.grad V >= 0
        if (v.is_zero() || v.a >= 0) note(c, "2V + x.grad V >= 0 for the catalog potential");
        else fail(c, "2V + x.grad V >= 0 needs a >= 0");

        // 2W + x.grad W <= 0
        bool wcond = false;
        switch (w.kind) {
            case KernelKind::Zero: wcond = true; why = "W == 0"; break;
            case KernelKind::InversePower:
                wcond = w.a == 0.0 || (w.a > 0 ? w.K >= 2.0 : w.K <= 2.0);
                why = "a(2-K)|x|^-K <= 0";
                break;
            case KernelKind::Gaussian:
                wcond = w.a == 0.0;
                why = "(2 - 2 pi |x|^2) e^{-pi|x|^2} changes sign";
                break;
            case KernelKind::Saturating:
                wcond = w.a <= 0.0;
                why = "2W + x.grad W has the sign of a";
                break;
            case KernelKind::BridgedInversePower:
                wcond = w.a >= 0.0; // inner and outer exponents exceed 2 by validation
                why = "piecewise exponents exceed 2";
                break;
        }
        if (wcond) note(c, "2W + x.grad W <= 0: " + why);
        else fail(c, "2W + x.grad W <= 0: " + why);
    }

    // ---- Theorem 3 (sharp threshold I, V == 0) ----
    {
        TheoremCheck& c = rep.thm3;
        c.holds = true;
        if (v.is_zero()) note(c, "V == 0");
        else fail(c, "Theorem 3 requires V == 0");

        if (kernel_lq_alone(w, N, &why)) note(c, "W in L^q, N/4 < q < N/2: " + why);
        else fail(c, "W in L^q, N/4 < q < N/2: " + why);

        LInterval iv = l_interval_for_f(f, N);
        double hi = iv.hi;
        std::string wwhy;
        const bool wl_ok = l_upper_from_kernel(w, N, &hi, &wwhy);
        double l = 0.0;
        if (!iv.ok) {
            fail(c, "(4.1): " + iv.why);
        } else if (!wl_ok) {
            fail(c, "(4.2): " + wwhy);
        } else if (!choose_l(m, iv.lo, hi, iv.hi_strict, &l, &why)) {
            fail(c, "no admissible l: " + why);
        } else {
            note(c, "(4.1): " + iv.why + "; (4.2): " + wwhy);
            c.witness["l"] = l;
            // smallest admissible c3 per family
            double c3 = 0.0;
            if (w.kind == KernelKind::InversePower) c3 = w.K;
            if (w.kind == KernelKind::BridgedInversePower) c3 = w.K;
            c.witness["c3"] = c3;
        }
    }

    // ---- Corollary 4.1 (V == W == 0, Q1 threshold) ----
    {
        TheoremCheck& c = rep.cor41;
        c.holds = true;
        if (!v.is_zero()) fail(c, "Corollary 4.1 requires V == 0");
        if (!w.is_zero()) fail(c, "Corollary 4.1 requires W == 0");
        LInterval iv = l_interval_for_f(f, N);
        double l = 0.0;
        if (!iv.ok) fail(c, "(4.1): " + iv.why);
        else if (!choose_l(m, iv.lo, iv.hi, iv.hi_strict, &l, &why)) fail(c, "no admissible l: " + why);
        else {
            note(c, "(4.1): " + iv.why);
            c.witness["l"] = l;
        }
    }

    // ---- Theorem 4 (sharp threshold II) ----
    {
        TheoremCheck& c = rep.thm4;
        c.holds = true;

        if (kernel_w1(w, N, &why)) note(c, "(W1): " + why);
        else fail(c, "(W1): " + why);

        // W >= 0 and N l W + x.grad W <= 0
        bool wsign = false;
        switch (w.kind) {
            case KernelKind::Zero: wsign = true; break;
            case KernelKind::InversePower:
            case KernelKind::BridgedInversePower: wsign = w.a >= 0; break;
            case KernelKind::Gaussian: wsign = w.a == 0; break; // a>0 fails the l-condition below anyway
            case KernelKind::Saturating: wsign = w.a == 0; break;
        }
        if (wsign) note(c, "W >= 0");
        else fail(c, "W >= 0 fails for this kernel/coefficient");

        LInterval iv = l_interval_for_f(f, N);
        double hi = iv.hi;
        std::string wwhy;
        const bool wl_ok = l_upper_from_kernel(w, N, &hi, &wwhy);
        double l = 0.0;
        if (!iv.ok) fail(c, "(4.1): " + iv.why);
        else if (!wl_ok) fail(c, "N l W + x.grad W <= 0: " + wwhy);
        else if (!choose_l(m, iv.lo, hi, iv.hi_strict, &l, &why)) fail(c, "no admissible l: " + why);
        else {
            note(c, "(4.1) and N l W + x.grad W <= 0 with l = " + std::to_string(l));
            c.witness["l"] = l;
            // (5.18): N l V + x.grad V >= c V >= 0 with the largest safe c recorded
            double cc = 1.0;
            bool vok = true;
            switch (v.kind) {
                case PotentialKind::Zero: cc = 1.0; break;
                case PotentialKind::Harmonic:
                    vok = v.a >= 0;
                    cc = N * l + 2.0;
                    break;
                case PotentialKind::Saturating:
                    vok = v.a >= 0;
                    cc = N * l;
                    break;
            }
            if (vok) {
                note(c, "(5.18) holds with c = " + std::to_string(cc));
                c.witness["c"] = cc;
            } else {
                fail(c, "(5.18) requires a nonnegative potential coefficient");
            }
        }

        // (5.19): f nondecreasing and f'_s nonincreasing along s -> k^2 s, k > 1
        bool mono = true, monop = true;
        std::string mwhy = "f == 0";
        if (!f.is_zero()) {
            switch (f.kind) {
                case LocalKind::Power:
                    mono = f.b >= 0;
                    monop = f.b == 0 || f.p <= Rational(1, 1);
                    mwhy = "single power: b >= 0 and p <= 1";
                    break;
                case LocalKind::TwoPower:
                    mono = f.mu >= 0 && f.nu >= 0;
                    monop = (f.mu == 0 || f.p1 <= Rational(1, 1)) &&
                            (f.nu == 0 || f.p2 <= Rational(1, 1));
                    mwhy = "two powers: coefficients >= 0 and exponents <= 1";
                    break;
                case LocalKind::LogPower:
                    mono = f.b >= 0;
                    monop = f.b == 0; // f'_s rises from 0 near s = 0 whenever b != 0
                    mwhy = "log family: f'_s is not monotone nonincreasing";
                    break;
                default: break;
            }
        }
        if (mono && monop) note(c, "(5.19): " + mwhy);
        else fail(c, "(5.19): " + mwhy);

        // (5.20): F(k^2 s) - k^2 s f(k^2 s) <= k^2 [F(s) - s f(s)] — holds for the
        // admitted nonnegative power families; log family with b>0 also satisfies it.
        if (f.is_zero() || f.kind == LocalKind::Power || f.kind == LocalKind::TwoPower) {
            if (mono) note(c, "(5.20): power families with nonnegative coefficients");
            else fail(c, "(5.20): needs nonnegative coefficients");
        } else if (f.kind == LocalKind::LogPower && f.b >= 0) {
            note(c, "(5.20): log family with b >= 0");
        } else {
            fail(c, "(5.20): no closed-form certificate");
        }
    }

    // ---- Corollary 5.1 (Hartree-only threshold) ----
    {
        TheoremCheck& c = rep.cor51;
        c.holds = true;
        if (!f.is_zero()) fail(c, "Corollary 5.1 requires f == 0");
        if (!v.is_zero()) fail(c, "Corollary 5.1 requires V == 0");
        bool wpos = false;
        switch (w.kind) {
            case KernelKind::InversePower:
            case KernelKind::BridgedInversePower:
            case KernelKind::Gaussian: wpos = w.a > 0; break;
            default: wpos = false; break;
        }
        if (wpos) note(c, "W > 0 everywhere");
        else fail(c, "W > 0 everywhere fails");
        if (kernel_w1(w, N, &why)) note(c, "W in L^inf + L^q, q > N/4: " + why);
        else fail(c, "W in L^inf + L^q: " + why);
        // exists l with N l > 2 and N l W + x.grad W <= 0
        double hi = std::numeric_limits<double>::infinity();
        std::string wwhy;
        if (l_upper_from_kernel(w, N, &hi, &wwhy) && hi * N > 2.0) {
            const double l = m.l ? m.l->value() : 0.5 * (2.0 / N + hi);
            if (l * N > 2.0 && l <= hi) {
                note(c, "N l in (2, " + std::to_string(hi * N) + "]");
                c.witness["l"] = l;
            } else {
                fail(c, "model l outside (2/N, " + std::to_string(hi) + "]");
            }
        } else {
            fail(c, "no l with N l > 2 and N l W + x.grad W <= 0: " + wwhy);
        }
    }

    return rep;
}

std::string HypothesisReport::serialize() const {
    std::ostringstream os;
    auto emit = [&os](const char* name, const TheoremCheck& c) {
        os << name << ".holds=" << (c.holds ? 1 : 0) << "\n";
        for (std::size_t i = 0; i < c.reasons.size(); ++i)
            os << name << ".reason." << i << "=" << c.reasons[i] << "\n";
        for (const auto& [k, val] : c.witness) os << name << "." << k << "=" << val << "\n";
    };
    emit("thm1", thm1);
    emit("thm2", thm2);
    emit("thm3", thm3);
    emit("thm4", thm4);
    emit("cor41", cor41);
    emit("cor51", cor51);
    return os.str();
}

} // namespace nls
