#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nls/common.hpp"

namespace nls {

// Iterative radix-2 complex FFT, power-of-two lengths only. Tables are built
// once per length and are immutable afterwards, so a plan can be shared
// read-only across threads; transforms write only the caller's buffer.
//
// Conventions (index space, no geometry):
//   forward:  c[m] = sum_j u[j] exp(-2*pi*i*m*j/M)
//   inverse:  u[j] = (1/M) sum_m c[m] exp(+2*pi*i*m*j/M)
class FftPlan {
  public:
    explicit FftPlan(std::size_t length);

    std::size_t length() const { return m_; }

    /// Transform one contiguous line in place (serial).
    void line(cd* data, bool inverse) const;

    /// Same butterflies as line(), with the per-stage butterfly loop shared
    /// across the calling OpenMP team. Bit-identical to line().
    void line_parallel(cd* data, bool inverse) const;

  private:
    std::size_t m_ = 0;
    int log2m_ = 0;
    std::vector<std::uint32_t> bitrev_;
    std::vector<cd> twiddle_; // stages concatenated: half-sizes 1,2,4,...,m/2

    void permute(cd* data) const;
};

/// Full N-dimensional transform of a row-major field with `points` cells per
/// axis. `inverse` applies the 1/M normalization once per axis (folded into a
/// single final scale). Parallel over lines; deterministic for any thread count.
void fft_nd(const FftPlan& plan, int dims, cd* data, bool inverse);

} // namespace nls
