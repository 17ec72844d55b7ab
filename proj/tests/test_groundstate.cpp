#include <doctest.h>

#include <cmath>

#include "nls/groundstate.hpp"
#include "nls/rng.hpp"
#include "nls/scaling.hpp"
#include "reference.hpp"

using namespace nls;

namespace {

ModelSpec power_model(int dims, double b, Rational p) {
    ModelSpec m;
    m.dims = dims;
    m.local.kind = LocalKind::Power;
    m.local.b = b;
    m.local.p = p;
    return m;
}

} // namespace

TEST_CASE("soliton oracle: shooting profile matches the closed form") {
    for (double p : {1.0, 2.0, 3.0}) {
        double A = 0.0;
        const std::vector<double> xs = {0.0, 0.5, 1.0, 2.0};
        const std::vector<double> w = nlsref::shoot_soliton(1.0, p, xs, &A);
        CHECK(A == doctest::Approx(nlsref::soliton_closed_form(1.0, p, 0.0)).epsilon(1e-7));
        for (std::size_t i = 0; i < xs.size(); ++i)
            CHECK(w[i] == doctest::Approx(nlsref::soliton_closed_form(1.0, p, xs[i]))
                              .epsilon(1e-6));
    }
}

TEST_CASE("solve_stationary: 1D solitons for p in {1,2,3} at omega = 1") {
    for (double pv : {1.0, 2.0, 3.0}) {
        const ModelSpec m = power_model(1, 1.0, Rational(static_cast<long long>(pv), 1));
        auto g = make_grid(1, 40.0, 1024);
        const ModelOnGrid mog = ModelOnGrid::build(g, m);
        GroundstateOptions opts;
        const StationaryState st = solve_stationary(mog, 1.0, nullptr, opts);
        REQUIRE(st.converged);

        // L^2 distance to the shooting-oracle profile
        std::vector<double> xs(g->cell_count());
        for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = g->axis_x()[i];
        const std::vector<double> oracle = nlsref::shoot_soliton(1.0, pv, xs);
        double err2 = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            err2 += sq(std::abs(st.field.values[i]) - oracle[i]);
        err2 *= g->cell_volume();
        CHECK(std::sqrt(err2) < 1e-6);

        const IdentityReport rep = verify_stationary_identities(st, mog);
        CHECK(std::abs(rep.s_omega) <= 1e-6);
        CHECK(std::abs(rep.q) <= 1e-6);
        CHECK(std::abs(rep.pohozaev_residual) <= 1e-6);
    }
}

TEST_CASE("solve_stationary: linear oscillator has no nonzero state (mass collapse)") {
    ModelSpec m;
    m.dims = 1;
    m.potential = {PotentialKind::Harmonic, 1.0};
    auto g = make_grid(1, 20.0, 256);
    const ModelOnGrid mog = ModelOnGrid::build(g, m);
    GroundstateOptions opts;
    opts.max_iter = 500;
    const StationaryState st = solve_stationary(mog, 1.0, nullptr, opts);
    CHECK_FALSE(st.converged);
    CHECK(st.failure == "mass_collapse");
}

TEST_CASE("solve_stationary: Hartree-only model with Gaussian kernel") {
    ModelSpec m;
    m.dims = 1;
    m.kernel = {KernelKind::Gaussian, 2.0, 0.0, 0.0};
    auto g = make_grid(1, 30.0, 512);
    const ModelOnGrid mog = ModelOnGrid::build(g, m);
    GroundstateOptions opts;
    const StationaryState st = solve_stationary(mog, 0.5, nullptr, opts);
    REQUIRE(st.converged);
    CHECK(st.residual_norm <= opts.tol);
    CHECK(std::abs(st.s_omega_value) <= 1e-6); // S_omega(w*) ~ 0 self-consistency
}

TEST_CASE("Pohozaev residual decreases monotonically under box doubling") {
    const ModelSpec m = power_model(1, 1.0, Rational(2, 1));
    double prev = 1e9;
    for (double L : {10.0, 20.0, 40.0}) {
        auto g = make_grid(1, L, static_cast<std::size_t>(L * 25.6)); // fixed h
        const ModelOnGrid mog = ModelOnGrid::build(g, m);
        GroundstateOptions opts;
        const StationaryState st = solve_stationary(mog, 1.0, nullptr, opts);
        REQUIRE(st.converged);
        const double res = std::abs(st.pohozaev_residual);
        CHECK(res < prev + 1e-12);
        prev = res;
    }
}

TEST_CASE("gradient check: w* is a critical point of I_omega") {
    const ModelSpec m = power_model(1, 1.0, Rational(1, 1));
    auto g = make_grid(1, 40.0, 512);
    const ModelOnGrid mog = ModelOnGrid::build(g, m);
    const StationaryState st = solve_stationary(mog, 1.0, nullptr, GroundstateOptions{});
    REQUIRE(st.converged);

    FamilyEvaluator ev0(st.field, mog, 1.0);
    Rng rng(77);
    for (int dir = 0; dir < 5; ++dir) {
        ComplexField v(g);
        for (auto& z : v.values) z = cd{rng.normal(), 0.0};
        const double vn = std::sqrt(norm_sq(v));
        const double h = 1e-4;
        auto I_at = [&](double eps) {
            ComplexField w = st.field;
            for (std::size_t i = 0; i < w.size(); ++i)
                w.values[i] += eps / vn * v.values[i];
            return diagnostics(w, mog, 1.0, 0.0).I_omega;
        };
        const double deriv = (I_at(h) - I_at(-h)) / (2.0 * h);
        const double scale = std::abs(ev0.at(1.0, 1.0).I_omega) + 1.0;
        CHECK(std::abs(deriv) <= 1e-5 * scale);
    }
}

TEST_CASE("scaling probe: the paper's amplitude sign pattern at the ground state") {
    const ModelSpec m = power_model(1, 1.0, Rational(1, 1));
    auto g = make_grid(1, 40.0, 512);
    const ModelOnGrid mog = ModelOnGrid::build(g, m);
    const StationaryState st = solve_stationary(mog, 1.0, nullptr, GroundstateOptions{});
    REQUIRE(st.converged);

    const auto probe = scaling_probe_amplitude(st, mog, {0.9, 1.0, 1.1});
    CHECK(probe[1].S_omega == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(probe[1].Q == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(probe[2].S_omega < 0.0); // rho > 1
    CHECK(probe[2].Q < 0.0);
    CHECK(probe[0].S_omega > 0.0); // rho < 1

    // dilation probe: some (k, lambda) in [1,1.5]x[0.5,1.5] has S<0 with a Q
    // sign change along lambda
    std::vector<double> ks, lams;
    for (double k = 1.05; k <= 1.5; k += 0.05) ks.push_back(k);
    for (double l = 0.5; l <= 1.5; l += 0.1) lams.push_back(l);
    const auto lattice = scaling_probe_dilation(st, mog, ks, lams);
    bool found = false;
    for (std::size_t i = 0; i + 1 < lattice.size(); ++i) {
        if (lattice[i].k != lattice[i + 1].k) continue;
        if (lattice[i].S_omega < 0 && lattice[i + 1].S_omega < 0 &&
            lattice[i].Q * lattice[i + 1].Q < 0)
            found = true;
    }
    CHECK(found);
}

TEST_CASE("verify_stationary_identities rejects a zero field") {
    const ModelSpec m = power_model(1, 1.0, Rational(1, 1));
    auto g = make_grid(1, 20.0, 128);
    const ModelOnGrid mog = ModelOnGrid::build(g, m);
    StationaryState fake;
    fake.converged = true;
    fake.omega = 1.0;
    fake.field = ComplexField(g); // identically zero
    CHECK_THROWS_AS(verify_stationary_identities(fake, mog), NumericalError);
}
