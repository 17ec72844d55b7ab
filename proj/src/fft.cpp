#include "nls/fft.hpp"

#include <cmath>

#include "nls/reduce.hpp"

namespace nls {

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;

bool is_pow2(std::size_t m) { return m >= 1 && (m & (m - 1)) == 0; }
} // namespace

FftPlan::FftPlan(std::size_t length) : m_(length) {
    if (!is_pow2(m_))
        throw ConfigError("FFT length must be a power of two, got " + std::to_string(m_));
    while ((std::size_t{1} << log2m_) < m_) ++log2m_;

    bitrev_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
        std::uint32_t r = 0;
        std::size_t x = i;
        for (int b = 0; b < log2m_; ++b) {
            r = (r << 1) | static_cast<std::uint32_t>(x & 1);
            x >>= 1;
        }
        bitrev_[i] = r;
    }

    twiddle_.resize(m_ > 1 ? m_ - 1 : 0);
    std::size_t off = 0;
    for (std::size_t half = 1; half < m_; half *= 2) {
        for (std::size_t j = 0; j < half; ++j) {
            const double ang = -kTwoPi * static_cast<double>(j) / static_cast<double>(2 * half);
            twiddle_[off + j] = cd{std::cos(ang), std::sin(ang)};
        }
        off += half;
    }
}

void FftPlan::permute(cd* a) const {
    for (std::size_t i = 0; i < m_; ++i) {
        const std::size_t r = bitrev_[i];
        if (i < r) std::swap(a[i], a[r]);
    }
}

void FftPlan::line(cd* a, bool inverse) const {
    permute(a);
    std::size_t off = 0;
    for (std::size_t half = 1; half < m_; half *= 2) {
        const cd* tw = twiddle_.data() + off;
        for (std::size_t k = 0; k < m_; k += 2 * half) {
            for (std::size_t j = 0; j < half; ++j) {
                const cd w = inverse ? std::conj(tw[j]) : tw[j];
                const cd t = w * a[k + j + half];
                a[k + j + half] = a[k + j] - t;
                a[k + j] += t;
            }
        }
        off += half;
    }
}

void FftPlan::line_parallel(cd* a, bool inverse) const {
    permute(a);
    std::size_t off = 0;
    const long long nbf = static_cast<long long>(m_ / 2);
    for (std::size_t half = 1; half < m_; half *= 2) {
        const cd* tw = twiddle_.data() + off;
#pragma omp parallel for schedule(static)
        for (long long b = 0; b < nbf; ++b) {
            const std::size_t j = static_cast<std::size_t>(b) % half;
            const std::size_t k = (static_cast<std::size_t>(b) / half) * 2 * half;
            const cd w = inverse ? std::conj(tw[j]) : tw[j];
            const cd t = w * a[k + j + half];
            a[k + j + half] = a[k + j] - t;
            a[k + j] += t;
        }
        off += half;
    }
}

void fft_nd(const FftPlan& plan, int dims, cd* data, bool inverse) {
    const std::size_t m = plan.length();
    std::size_t total = 1;
    for (int d = 0; d < dims; ++d) total *= m;

    // Axis a (row-major, axis 0 slowest) has stride m^(dims-1-a).
    for (int axis = dims - 1; axis >= 0; --axis) {
        std::size_t stride = 1;
        for (int d = axis + 1; d < dims; ++d) stride *= m;
        const std::size_t nlines = total / m;

        if (stride == 1) {
            if (nlines == 1) {
                plan.line_parallel(data, inverse);
            } else {
#pragma omp parallel for schedule(static)
                for (long long l = 0; l < static_cast<long long>(nlines); ++l)
                    plan.line(data + static_cast<std::size_t>(l) * m, inverse);
            }
        } else {
            const std::size_t block = stride * m;
            const std::size_t nblocks = total / block;
#pragma omp parallel
            {
                std::vector<cd> scratch(m);
#pragma omp for schedule(static) collapse(2)
                for (long long bl = 0; bl < static_cast<long long>(nblocks); ++bl)
                    for (long long offl = 0; offl < static_cast<long long>(stride); ++offl) {
                        cd* base = data + static_cast<std::size_t>(bl) * block +
                                   static_cast<std::size_t>(offl);
                        for (std::size_t t = 0; t < m; ++t) scratch[t] = base[t * stride];
                        plan.line(scratch.data(), inverse);
                        for (std::size_t t = 0; t < m; ++t) base[t * stride] = scratch[t];
                    }
            }
        }
    }

    if (inverse) {
        const double scale = 1.0 / static_cast<double>(total);
        par_for(total, [&](std::size_t i) { data[i] *= scale; });
    }
}

} // namespace nls
