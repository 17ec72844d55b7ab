#pragma once

#include <cstddef>
#include <vector>

#include "nls/common.hpp"

namespace nls {

// Deterministic parallel reductions. Sums are accumulated per fixed-size chunk
// (independent of thread count and schedule) and the chunk partials are added
// in index order, so a run with 1 thread and a run with 16 threads produce
// bit-identical results. All quadrature sums in the library go through these.

inline constexpr std::size_t kReduceChunk = 4096;

template <class Term>
double det_sum(std::size_t n, Term term) {
    if (n == 0) return 0.0;
    const std::size_t nchunks = (n + kReduceChunk - 1) / kReduceChunk;
    std::vector<double> partial(nchunks);
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < static_cast<long long>(nchunks); ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * kReduceChunk;
        const std::size_t hi = lo + kReduceChunk < n ? lo + kReduceChunk : n;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[static_cast<std::size_t>(c)] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

template <class Term>
cd det_sum_complex(std::size_t n, Term term) {
    if (n == 0) return {0.0, 0.0};
    const std::size_t nchunks = (n + kReduceChunk - 1) / kReduceChunk;
    std::vector<cd> partial(nchunks);
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < static_cast<long long>(nchunks); ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * kReduceChunk;
        const std::size_t hi = lo + kReduceChunk < n ? lo + kReduceChunk : n;
        cd s{0.0, 0.0};
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[static_cast<std::size_t>(c)] = s;
    }
    cd total{0.0, 0.0};
    for (const cd& p : partial) total += p;
    return total;
}

/// Elementwise transform, parallel, no reduction.
template <class Fn>
void par_for(std::size_t n, Fn fn) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        fn(static_cast<std::size_t>(i));
}

} // namespace nls
