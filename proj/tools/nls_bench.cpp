// Benchmark of the OpenMP kernels against the single-thread path: FFT,
// Strang step, diagnostics reduction and Hartree convolution. Results also
// cross-check that thread count does not change the output bits.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include <omp.h>

#include "nls/dynamics.hpp"
#include "nls/scaling.hpp"

using namespace nls;

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

ComplexField test_field(const std::shared_ptr<const Grid>& g) {
    ComplexField u(g);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r2 = g->radius_sq(i);
        u.values[i] = cd{std::exp(-0.5 * r2), 0.3 * std::exp(-r2)};
    }
    return u;
}

template <class Fn>
double time_best_of(int reps, Fn fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now_ms();
        fn();
        best = std::min(best, now_ms() - t0);
    }
    return best;
}

double checksum(const ComplexField& u) {
    double s = 0;
    for (const auto& v : u.values) s += v.real() + 0.7 * v.imag();
    return s;
}

struct Case {
    int dims;
    std::size_t points;
    double extent;
};

} // namespace

int main() {
    const int max_threads = omp_get_max_threads();
    std::printf("nls-bench: serial (1 thread) vs OpenMP (%d threads)\n", max_threads);
    std::printf("%-28s %12s %12s %8s %s\n", "kernel", "serial[ms]", "parallel[ms]", "speedup",
                "bit-identical");

    const Case cases[] = {{1, 1 << 18, 200.0}, {2, 512, 40.0}, {3, 64, 16.0}};
    for (const Case& c : cases) {
        auto g = make_grid(c.dims, c.extent, c.points);
        ModelSpec model;
        model.dims = c.dims;
        model.potential = {PotentialKind::Harmonic, 1.0};
        model.local = {LocalKind::Power, 1.0, 0, 0, Rational(1, 1)};
        model.kernel.kind = KernelKind::Gaussian;
        model.kernel.a = 0.5;
        const ModelOnGrid mog = ModelOnGrid::build(g, model);
        ComplexField u = test_field(g);

        struct Bench {
            const char* name;
            std::function<ComplexField()> run;
        };
        std::vector<double> rho(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) rho[i] = std::norm(u.values[i]);

        const Bench benches[] = {
            {"fft roundtrip", [&] { return from_spectral(g, to_spectral(u)); }},
            {"strang step", [&] { return step_strang(u, mog, 1e-3); }},
            {"hartree convolve",
             [&] {
                 ComplexField out(g);
                 const auto conv = mog.convolve(rho, false);
                 for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = conv[i];
                 return out;
             }},
            {"diagnostics", [&] {
                 const DiagnosticsRecord d = diagnostics(u, mog, 1.0, 0.0);
                 ComplexField out(g);
                 out.values[0] = cd{d.energy, d.Q};
                 return out;
             }},
        };

        std::printf("-- %dD, M = %zu\n", c.dims, c.points);
        for (const Bench& b : benches) {
            omp_set_num_threads(1);
            ComplexField serial_out = b.run();
            const double ts = time_best_of(3, [&] { b.run(); });
            omp_set_num_threads(max_threads);
            ComplexField par_out = b.run();
            const double tp = time_best_of(3, [&] { b.run(); });
            const bool same = checksum(serial_out) == checksum(par_out);
            std::printf("%-28s %12.3f %12.3f %7.2fx %s\n", b.name, ts, tp, ts / tp,
                        same ? "yes" : "NO");
        }
    }
    return 0;
}
