#include <doctest.h>

#include <cmath>

#include "nls/classify.hpp"
#include "nls/rng.hpp"
#include "reference.hpp"

using namespace nls;

namespace {

ModelSpec quintic_1d() {
    ModelSpec m;
    m.dims = 1;
    m.local.kind = LocalKind::Power;
    m.local.b = 1.0;
    m.local.p = Rational(2, 1);
    return m;
}

ComplexField gaussian(const std::shared_ptr<const Grid>& g, double A, double width) {
    ComplexField u(g);
    for (std::size_t i = 0; i < u.size(); ++i)
        u.values[i] = cd{A * std::exp(-0.5 * g->radius_sq(i) / (width * width)), 0.0};
    return u;
}

struct Thm4Setup {
    std::shared_ptr<const Grid> grid;
    ModelOnGrid mog;
    StationaryState state;
    ThresholdSet thresholds;
};

const Thm4Setup& thm4_setup() {
    static Thm4Setup* s = [] {
        auto* out = new Thm4Setup{nullptr, ModelOnGrid{}, {}, {}};
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
        out->grid = make_grid(3, 10.0, 32);
        out->mog = ModelOnGrid::build(out->grid, m);
        out->state = solve_stationary(out->mog, 1.0, nullptr, GroundstateOptions{});
        SearchOptions so;
        so.restarts = 3;
        so.descent_steps = 80;
        out->thresholds.d_N = estimate_d_N(out->mog, 1.0, so);
        out->thresholds.d_M = estimate_d_M(out->mog, 1.0, so);
        return out;
    }();
    return *s;
}

} // namespace

TEST_CASE("Theorem 2 route: quintic 2 e^{-x^2} has negative energy, predicts blowup") {
    const ModelSpec m = quintic_1d();
    auto g = make_grid(1, 20.0, 512);
    const ModelOnGrid mog = ModelOnGrid::build(g, m);
    ComplexField u0(g);
    for (std::size_t i = 0; i < u0.size(); ++i)
        u0.values[i] = cd{2.0 * std::exp(-g->radius_sq(i)), 0.0};

    // E(u0) < 0 by independent quadrature of the analytic integrand
    const double kin = nlsref::integrate(
        [](double x) { return sq(-4.0 * x * std::exp(-x * x)); }, -9.0, 9.0, 1e-12);
    const double f6 = nlsref::integrate(
        [](double x) { return std::pow(2.0 * std::exp(-x * x), 6.0); }, -9.0, 9.0, 1e-12);
    const double E_oracle = 0.5 * kin - f6 / 6.0;
    CHECK(E_oracle < 0.0);

    const ClassificationReport rep = classify_initial_data(u0, mog, 1.0, ThresholdSet{});
    CHECK(rep.E == doctest::Approx(E_oracle).epsilon(1e-8));
    CHECK(rep.prediction == Prediction::Blowup);
    CHECK(rep.reasons.find("Theorem 2") != std::string::npos);
}

TEST_CASE("Theorem 1 route: N=2 harmonic + Gaussian kernel + subcritical power") {
    ModelSpec m;
    m.dims = 2;
    m.potential = {PotentialKind::Harmonic, 1.0};
    m.kernel = {KernelKind::Gaussian, 1.0, 0.0, 0.0};
    m.local.kind = LocalKind::Power;
    m.local.b = 1.0;
    m.local.p = Rational(2, 5);
    auto g = make_grid(2, 16.0, 64);
    const ModelOnGrid mog = ModelOnGrid::build(g, m);
    const ClassificationReport rep =
        classify_initial_data(gaussian(g, 2.0, 1.0), mog, 1.0, ThresholdSet{});
    CHECK(rep.prediction == Prediction::Global);
    CHECK(rep.reasons.find("Theorem 1") != std::string::npos);
}

TEST_CASE("Theorem 3 route: septic amplitude ray around the soliton") {
    // p = 3 > 2/N keeps the (4.1) l-interval nonempty (mass-supercritical)
    ModelSpec m = quintic_1d();
    m.local.p = Rational(3, 1);
    auto g = make_grid(1, 40.0, 1024);
    const ModelOnGrid mog = ModelOnGrid::build(g, m);
    const StationaryState st = solve_stationary(mog, 1.0, nullptr, GroundstateOptions{});
    REQUIRE(st.converged);

    ThresholdSet ts;
    SearchOptions so;
    so.restarts = 3;
    so.descent_steps = 100;
    ts.d_I = estimate_d_prime_I(mog, 1.0, so);

    // c < 1: inside the threshold with Q > 0 -> global
    const ClassificationReport below =
        classify_initial_data(scale_amplitude(st.field, 0.9), mog, 1.0, ts);
    CHECK(below.set_label == SetLabel::Thm3KPlus);
    CHECK(below.prediction == Prediction::Global);

    // c > 1 with a focusing quadratic phase: Q < 0 and J'(0) < 0 -> blowup
    const ComplexField up =
        apply_quadratic_phase(scale_amplitude(st.field, 1.1), 0.5);
    const ClassificationReport above = classify_initial_data(up, mog, 1.0, ts);
    CHECK(above.set_label == SetLabel::Thm3KMinus);
    CHECK(above.prediction == Prediction::Blowup);
    CHECK(above.J_prime0 < 0.0);

    // c slightly above the Q sign change, E(u0) still positive, no phase:
    // J'(0) = 0, Theorem 3(2) is silent and no other route concludes
    const ClassificationReport silent =
        classify_initial_data(scale_amplitude(st.field, 1.03), mog, 1.0, ts);
    CHECK(silent.E > 0.0);
    CHECK(silent.Q < 0.0);
    CHECK(silent.set_label == SetLabel::Thm3KMinus);
    CHECK(silent.prediction == Prediction::Indeterminate);
}

TEST_CASE("Theorem 4 route: K / K_plus / R_plus labels along the ground-state ray") {
    const Thm4Setup& s = thm4_setup();
    REQUIRE(s.state.converged);
    REQUIRE(s.thresholds.d_II_converged());

    const ClassificationReport low =
        classify_initial_data(scale_amplitude(s.state.field, 0.5), s.mog, 1.0, s.thresholds);
    CHECK(low.set_label == SetLabel::RPlus);
    CHECK(low.prediction == Prediction::Global);

    const ClassificationReport high =
        classify_initial_data(scale_amplitude(s.state.field, 1.2), s.mog, 1.0, s.thresholds);
    CHECK(high.set_label == SetLabel::K);
    CHECK(high.prediction == Prediction::Blowup);
    CHECK(high.j_prime_premise_flag); // real data: J'(0) = 0, flagged, prediction retained

    // amplitudes far above the ray maximum drive I_omega negative, which is
    // still inside {I < d_II}: the label stays K and Theorem 2 also fires
    const ClassificationReport big =
        classify_initial_data(scale_amplitude(s.state.field, 3.5), s.mog, 1.0, s.thresholds);
    CHECK(big.set_label == SetLabel::K);
    CHECK(big.E < 0.0);
    CHECK(big.prediction == Prediction::Blowup);

    // a wide, heavy field has I_omega >= d_II: outside the theorem's scope
    ComplexField wide(s.grid);
    for (std::size_t i = 0; i < wide.size(); ++i)
        wide.values[i] = cd{0.6 * std::exp(-0.125 * s.grid->radius_sq(i)), 0.0};
    const ClassificationReport out = classify_initial_data(wide, s.mog, 1.0, s.thresholds);
    CHECK(out.I_omega >= *s.thresholds.d_II_value());
    CHECK(out.set_label == SetLabel::OutsideScope);
}

TEST_CASE("partition property: every sampled field below d_II gets exactly one label") {
    const Thm4Setup& s = thm4_setup();
    const double dII = *s.thresholds.d_II_value();
    Rng rng(123);
    int labelled = 0;
    for (int trial = 0; trial < 20; ++trial) {
        ComplexField u(s.grid);
        const double w = 0.7 + rng.uniform();
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double x = s.grid->axis_x()[s.grid->axis_index(i, 0)];
            u.values[i] = cd{std::exp(-0.5 * s.grid->radius_sq(i) / (w * w)) *
                                 (1.0 + 0.3 * std::cos(x + rng.uniform())),
                             0.0};
        }
        // scale into I_omega < d_II (smallest positive root of the target level)
        double rho = 1.0;
        FamilyEvaluator ev(u, s.mog, 1.0);
        const double target = (0.15 + 0.8 * rng.uniform()) * dII;
        double lo = 0.0, hi = 1.0;
        while (ev.at(hi, 1.0).I_omega < target && hi < 64.0) hi *= 2.0;
        for (int it = 0; it < 100; ++it) {
            rho = 0.5 * (lo + hi);
            (ev.at(rho, 1.0).I_omega < target ? lo : hi) = rho;
        }
        const ClassificationReport rep =
            classify_initial_data(scale_amplitude(u, rho), s.mog, 1.0, s.thresholds);
        if (rep.I_omega >= dII) continue; // root-landing tolerance
        const bool k = rep.set_label == SetLabel::K;
        const bool kp = rep.set_label == SetLabel::KPlus;
        const bool rp = rep.set_label == SetLabel::RPlus;
        CHECK((k ? 1 : 0) + (kp ? 1 : 0) + (rp ? 1 : 0) == 1);
        ++labelled;
    }
    CHECK(labelled >= 15);
}

TEST_CASE("monitor_invariance declines outside the threshold hypothesis") {
    TrajectoryLog traj;
    DiagnosticsRecord r;
    r.I_omega = 5.0;
    r.S_omega = -1.0;
    r.Q = -1.0;
    traj.records = {r, r};
    const InvarianceReport rep = monitor_invariance(traj, 1.0, false);
    CHECK_FALSE(rep.asserted);

    // below the level: flips are found
    traj.records[0].I_omega = 0.5;
    DiagnosticsRecord flip = traj.records[1];
    flip.Q = +1.0;
    traj.records[1] = flip;
    const InvarianceReport rep2 = monitor_invariance(traj, 1.0, false);
    CHECK(rep2.asserted);
    CHECK(rep2.first_violation == 1);
}

TEST_CASE("route soundness: blowup predictions always carry a named theorem") {
    const ModelSpec m = quintic_1d();
    auto g = make_grid(1, 24.0, 256);
    const ModelOnGrid mog = ModelOnGrid::build(g, m);
    Rng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexField u = gaussian(g, 0.3 + 2.0 * rng.uniform(), 0.7 + rng.uniform());
        const ClassificationReport rep = classify_initial_data(u, mog, 1.0, ThresholdSet{});
        if (rep.prediction == Prediction::Blowup) {
            CHECK(rep.reasons.find("Theorem") != std::string::npos);
        }
        CHECK(!rep.reasons.empty());
    }
}
