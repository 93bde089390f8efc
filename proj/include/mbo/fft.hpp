#pragma once

// Radix-2 FFT and a direct DFT fallback, both unscaled. The FFT keeps a
// per-thread twiddle/bit-reversal cache so repeated transforms of the same
// size (the hot path in dealiased products) do no trig work.

#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace mbo {

using cplx = std::complex<double>;

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

struct FftPlan {
    std::vector<cplx> roots;         // e^{-2*pi*i*j/n}, j < n/2
    std::vector<std::size_t> rev;    // bit-reversal permutation
};

inline const FftPlan& fft_plan(std::size_t n) {
    thread_local std::map<std::size_t, FftPlan> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    FftPlan plan;
    plan.roots.resize(n / 2);
    for (std::size_t j = 0; j < n / 2; ++j) {
        const double ang = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
        plan.roots[j] = cplx(std::cos(ang), std::sin(ang));
    }
    plan.rev.resize(n);
    std::size_t log2n = 0;
    while ((std::size_t{1} << log2n) < n) ++log2n;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < log2n; ++b)
            if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
        plan.rev[i] = r;
    }
    return cache.emplace(n, std::move(plan)).first->second;
}

// In-place unscaled transform: forward uses e^{-2pi i jm/n}, inverse e^{+...}.
inline void fft_pow2(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft_pow2: size must be a power of two");
    if (n == 1) return;
    const FftPlan& plan = fft_plan(n);
    for (std::size_t i = 0; i < n; ++i)
        if (plan.rev[i] > i) std::swap(a[i], a[plan.rev[i]]);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t blk = 0; blk < n; blk += len) {
            for (std::size_t j = 0; j < len / 2; ++j) {
                cplx w = plan.roots[j * stride];
                if (inverse) w = std::conj(w);
                const cplx t = a[blk + j + len / 2] * w;
                a[blk + j + len / 2] = a[blk + j] - t;
                a[blk + j] += t;
            }
        }
    }
}

// Direct O(n^2) DFT, unscaled; sign = -1 forward, +1 inverse. Used for the
// temporal transform when the sample count is not a power of two.
inline std::vector<cplx> dft_direct(std::span<const cplx> a, int sign) {
    const std::size_t n = a.size();
    std::vector<cplx> out(n, cplx{0.0, 0.0});
    for (std::size_t m = 0; m < n; ++m) {
        const double base = sign * 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
        cplx acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = base * static_cast<double>(j);
            acc += a[j] * cplx(std::cos(ang), std::sin(ang));
        }
        out[m] = acc;
    }
    return out;
}

inline std::vector<cplx> dft(std::span<const cplx> a, int sign) {
    if (is_pow2(a.size())) {
        std::vector<cplx> out(a.begin(), a.end());
        fft_pow2(out, sign > 0);
        return out;
    }
    return dft_direct(a, sign);
}

}  // namespace detail
}  // namespace mbo
