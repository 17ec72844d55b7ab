#include "nls/functionals.hpp"

#include <cmath>
#include <cstdio>

#include "nls/reduce.hpp"

namespace nls {

bool DiagnosticsRecord::finite() const {
    for (double v : {t, mass_sq, kinetic, potential_term, F_integral, hartree_G, energy,
                     sigma_norm_sq, Q, Q1, S_omega, I_omega, J, J_prime})
        if (!std::isfinite(v)) return false;
    return true;
}

std::string DiagnosticsRecord::csv_header() {
    return "t,mass_sq,kinetic,potential_term,F_integral,hartree_G,energy,sigma_norm_sq,Q,Q1,"
           "S_omega,I_omega,J,J_prime";
}

std::string DiagnosticsRecord::csv_row() const {
    char buf[640];
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%.17g",
                  t, mass_sq, kinetic, potential_term, F_integral, hartree_G, energy,
                  sigma_norm_sq, Q, Q1, S_omega, I_omega, J, J_prime);
    return buf;
}

FunctionalBreakdown functional_breakdown(const ComplexField& u, const ModelOnGrid& mog) {
    const Grid& g = *u.grid;
    const std::size_t n = u.size();
    const double w = g.cell_volume();
    const LocalSpec& f = mog.model().local;

    FunctionalBreakdown b;

    std::vector<double> rho(n);
    par_for(n, [&](std::size_t i) { rho[i] = std::norm(u.values[i]); });

    b.mass_sq = w * det_sum(n, [&](std::size_t i) { return rho[i]; });
    b.kinetic = spectral_gradient_norm_sq(u);

    if (mog.has_potential()) {
        const auto& V = mog.V();
        const auto& xdV = mog.x_dot_gradV();
        b.potential_term = w * det_sum(n, [&](std::size_t i) { return V[i] * rho[i]; });
        b.xdV_term = w * det_sum(n, [&](std::size_t i) { return xdV[i] * rho[i]; });
    }

    if (!f.is_zero()) {
        b.F_integral = w * det_sum(n, [&](std::size_t i) { return f.F(rho[i]); });
        b.sf_integral = w * det_sum(n, [&](std::size_t i) { return rho[i] * f.f(rho[i]); });
    }

    if (mog.has_kernel()) {
        std::vector<double> conv = mog.convolve(rho, false);
        b.WG = w * det_sum(n, [&](std::size_t i) { return conv[i] * rho[i]; });
        conv = mog.convolve(rho, true);
        b.xdWG = w * det_sum(n, [&](std::size_t i) { return conv[i] * rho[i]; });
    }
    return b;
}

DiagnosticsRecord assemble_diagnostics(const FunctionalBreakdown& b, int dims, double omega) {
    DiagnosticsRecord r;
    r.omega = omega;
    r.mass_sq = b.mass_sq;
    r.kinetic = b.kinetic;
    r.potential_term = b.potential_term;
    r.F_integral = b.F_integral;
    r.hartree_G = 0.25 * b.WG;
    r.energy = 0.5 * (b.kinetic + b.potential_term) - 0.5 * b.F_integral - r.hartree_G;
    r.sigma_norm_sq = b.mass_sq + b.kinetic + b.potential_term;
    r.Q = 2.0 * b.kinetic - b.xdV_term + dims * (b.F_integral - b.sf_integral) + 0.5 * b.xdWG;
    r.Q1 = 2.0 * b.kinetic + dims * (b.F_integral - b.sf_integral);
    r.S_omega = 2.0 * omega * b.mass_sq + b.kinetic + b.potential_term - b.sf_integral - b.WG;
    r.I_omega = omega * b.mass_sq + r.energy;
    return r;
}

DiagnosticsRecord diagnostics(const ComplexField& u, const ModelOnGrid& mog, double omega,
                              double t) {
    if (!u.finite()) throw NumericalError("corrupt field: non-finite amplitude");
    FunctionalBreakdown b = functional_breakdown(u, mog);
    DiagnosticsRecord r = assemble_diagnostics(b, mog.grid().dims(), omega);
    r.t = t;
    const MomentNorms mn = moment_weighted_norms(u);
    r.J = mn.J;
    r.J_prime = mn.J_prime;
    return r;
}

double virial_rhs(const ComplexField& u, const ModelOnGrid& mog) {
    FunctionalBreakdown b = functional_breakdown(u, mog);
    return 4.0 * assemble_diagnostics(b, mog.grid().dims(), 0.0).Q;
}

double uncertainty_ratio(const ComplexField& u) {
    const double m = norm_sq(u);
    if (m <= 0.0) throw NumericalError("uncertainty ratio of the zero field");
    const double kin = spectral_gradient_norm_sq(u);
    const double J = moment_weighted_norms(u).J;
    return m / ((2.0 / u.grid->dims()) * std::sqrt(kin) * std::sqrt(J));
}

} // namespace nls
