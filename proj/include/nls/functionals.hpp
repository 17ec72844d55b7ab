#pragma once

#include <string>

#include "nls/model.hpp"

namespace nls {

/// Every scalar functional of the model at one time.
/// CSV column order is fixed:
/// t, mass_sq, kinetic, potential_term, F_integral, hartree_G, energy,
/// sigma_norm_sq, Q, Q1, S_omega, I_omega, J, J_prime
struct DiagnosticsRecord {
    double t = 0.0;
    double mass_sq = 0.0;        // ||u||_2^2
    double kinetic = 0.0;        // ||grad u||_2^2
    double potential_term = 0.0; // int V |u|^2
    double F_integral = 0.0;     // int F(x,|u|^2)
    double hartree_G = 0.0;      // (1/4) int (W*|u|^2)|u|^2
    double energy = 0.0;
    double sigma_norm_sq = 0.0;
    double Q = 0.0;
    double Q1 = 0.0;
    double S_omega = 0.0;
    double I_omega = 0.0;
    double J = 0.0;
    double J_prime = 0.0;
    double omega = 0.0;

    bool finite() const;
    static std::string csv_header();
    std::string csv_row() const;
};

/// Raw quadrature ingredients shared by diagnostics, the stationary solver and
/// the threshold machinery.
struct FunctionalBreakdown {
    double mass_sq = 0.0;
    double kinetic = 0.0;
    double potential_term = 0.0;
    double xdV_term = 0.0;    // int (x.grad V) |u|^2
    double F_integral = 0.0;
    double sf_integral = 0.0; // int |u|^2 f(x,|u|^2)
    double WG = 0.0;          // int (W*|u|^2)|u|^2
    double xdWG = 0.0;        // int ((x.grad W)*|u|^2)|u|^2
};

FunctionalBreakdown functional_breakdown(const ComplexField& u, const ModelOnGrid& mog);

DiagnosticsRecord diagnostics(const ComplexField& u, const ModelOnGrid& mog, double omega,
                              double t);

/// Assemble the paper's scalars from a breakdown (shared by every evaluator).
DiagnosticsRecord assemble_diagnostics(const FunctionalBreakdown& b, int dims, double omega);

/// J''(t) = 4 Q(u).
double virial_rhs(const ComplexField& u, const ModelOnGrid& mog);

/// ||u||_2^2 / ((2/N) ||grad u|| ||x u||); <= 1 + 1e-9 on every field.
double uncertainty_ratio(const ComplexField& u);

} // namespace nls
