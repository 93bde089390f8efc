#pragma once

// Fourier-side operator calculus on periodic fields: transforms, Hilbert
// transform, derivative/antiderivative, Szego and Littlewood-Paley
// projections, dealiased products and exponential multipliers.
//
// Convention notes that apply everywhere:
//  - The Nyquist mode -N/2 has no conjugate partner, so every odd-symbol
//    multiplier (Hilbert, derivative, antiderivative) zeroes it.
//  - Products are computed on a zero-padded 2N grid and truncated back,
//    which makes every binary product of band-limited factors an exact
//    convolution within the resolved band.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "mbo/field.hpp"
#include "mbo/fft.hpp"

namespace mbo::spectral {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------------------
// Transforms

// Samples phi(x_j) at x_j = 2*pi*j/N, j = 0..N-1.
inline std::vector<cplx> synthesize(const PeriodicField& f) {
    const int n = f.n();
    std::vector<cplx> a(static_cast<std::size_t>(n));
    // place ascending-k storage into FFT bin order (bin m = k mod N)
    for (int k = f.grid().min_freq(); k <= f.grid().max_freq(); ++k) {
        const int m = k >= 0 ? k : k + n;
        a[static_cast<std::size_t>(m)] = f.at(k);
    }
    detail::fft_pow2(a, /*inverse=*/true);
    return a;
}

inline std::vector<double> synthesize_real(const PeriodicField& f) {
    if (!f.is_real()) throw std::invalid_argument("synthesize_real: field is not real-flagged");
    std::vector<cplx> a = synthesize(f);
    std::vector<double> out(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j].real();
    return out;
}

inline PeriodicField analyze(const Grid& grid, std::span<const cplx> samples, bool is_real) {
    if (static_cast<int>(samples.size()) != grid.n)
        throw std::invalid_argument("analyze: sample count != grid modes");
    std::vector<cplx> a(samples.begin(), samples.end());
    detail::fft_pow2(a, /*inverse=*/false);
    const double inv_n = 1.0 / static_cast<double>(grid.n);
    std::vector<cplx> c(static_cast<std::size_t>(grid.n));
    for (int k = grid.min_freq(); k <= grid.max_freq(); ++k) {
        const int m = k >= 0 ? k : k + grid.n;
        c[static_cast<std::size_t>(k - grid.min_freq())] = a[static_cast<std::size_t>(m)] * inv_n;
    }
    return PeriodicField(grid, std::move(c), is_real);
}

inline PeriodicField analyze(const Grid& grid, std::span<const double> samples) {
    std::vector<cplx> a(samples.size());
    for (std::size_t j = 0; j < samples.size(); ++j) a[j] = cplx(samples[j], 0.0);
    return analyze(grid, a, /*is_real=*/true);
}

// ---------------------------------------------------------------------------
// Pointwise-in-frequency operators

// H: c_k -> -i*sgn(k)*c_k, mean and Nyquist annihilated.
inline PeriodicField hilbert(const PeriodicField& f) {
    std::vector<cplx> c(f.coeffs());
    const int n = f.n();
    for (int k = f.grid().min_freq(); k <= f.grid().max_freq(); ++k) {
        auto& z = c[static_cast<std::size_t>(k + n / 2)];
        if (k == 0 || k == -n / 2)
            z = cplx{0.0, 0.0};
        else
            z *= cplx(0.0, k > 0 ? -1.0 : 1.0);
    }
    return PeriodicField(f.grid(), std::move(c), f.is_real());
}

inline PeriodicField derivative(const PeriodicField& f) {
    std::vector<cplx> c(f.coeffs());
    const int n = f.n();
    for (int k = f.grid().min_freq(); k <= f.grid().max_freq(); ++k) {
        auto& z = c[static_cast<std::size_t>(k + n / 2)];
        z = (k == -n / 2) ? cplx{0.0, 0.0} : z * cplx(0.0, static_cast<double>(k));
    }
    return PeriodicField(f.grid(), std::move(c), f.is_real());
}

// Zero-mean primitive; requires the input mean to vanish (relative 1e-12).
inline PeriodicField antiderivative_zero_mean(const PeriodicField& f) {
    const double scale = std::max(f.coeff_l2(), 1e-300);
    if (std::abs(f.mean()) > 1e-12 * scale)
        throw NonZeroMeanError("antiderivative_zero_mean: input has non-vanishing mean");
    std::vector<cplx> c(f.coeffs());
    const int n = f.n();
    for (int k = f.grid().min_freq(); k <= f.grid().max_freq(); ++k) {
        auto& z = c[static_cast<std::size_t>(k + n / 2)];
        if (k == 0 || k == -n / 2)
            z = cplx{0.0, 0.0};
        else
            z /= cplx(0.0, static_cast<double>(k));
    }
    return PeriodicField(f.grid(), std::move(c), f.is_real());
}

enum class Projection { plus, minus, mean, nonconstant };

inline PeriodicField project(const PeriodicField& f, Projection which) {
    std::vector<cplx> c(f.coeffs());
    const int n = f.n();
    bool real_out = f.is_real();
    for (int k = f.grid().min_freq(); k <= f.grid().max_freq(); ++k) {
        bool keep = false;
        switch (which) {
            case Projection::plus: keep = k > 0; break;
            case Projection::minus: keep = k < 0; break;
            case Projection::mean: keep = k == 0; break;
            case Projection::nonconstant: keep = k != 0; break;
        }
        if (!keep) c[static_cast<std::size_t>(k + n / 2)] = cplx{0.0, 0.0};
    }
    if (which == Projection::plus || which == Projection::minus) real_out = false;
    return PeriodicField(f.grid(), std::move(c), real_out);
}

// ---------------------------------------------------------------------------
// Littlewood-Paley machinery

// Even C-infinity bump: 1 on [-5/4, 5/4], 0 outside [-8/5, 8/5], exp-based
// smoothstep on the transition.
inline double bump_eta0(double xi) {
    const double a = std::abs(xi);
    if (a <= 1.25) return 1.0;
    if (a >= 1.6) return 0.0;
    const double r = (a - 1.25) / 0.35;
    const auto g = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    const double gr = g(r), g1r = g(1.0 - r);
    return g1r / (gr + g1r);
}

// chi_k(xi) = eta0(xi/2^{k-1}) - eta0(xi/2^{k-2}); k = 0 is the P_1 cutoff
// with multiplier eta0(2 xi).
inline double dyadic_multiplier(int k, double xi) {
    if (k < 0) throw std::invalid_argument("dyadic_multiplier: k must be >= 0");
    if (k == 0) return bump_eta0(2.0 * xi);
    return bump_eta0(xi / std::ldexp(1.0, k - 1)) - bump_eta0(xi / std::ldexp(1.0, k - 2));
}

inline double low_multiplier(int k, double xi) {
    if (k < 0) throw std::invalid_argument("low_multiplier: k must be >= 0");
    return bump_eta0(xi / std::ldexp(1.0, k - 1));
}

inline PeriodicField apply_real_even_multiplier(const PeriodicField& f,
                                                const std::function<double(double)>& m) {
    std::vector<cplx> c(f.coeffs());
    const int n = f.n();
    for (int k = f.grid().min_freq(); k <= f.grid().max_freq(); ++k)
        c[static_cast<std::size_t>(k + n / 2)] *= m(static_cast<double>(k));
    return PeriodicField(f.grid(), std::move(c), f.is_real());
}

inline PeriodicField dyadic_project(const PeriodicField& f, int k) {
    return apply_real_even_multiplier(f, [k](double xi) { return dyadic_multiplier(k, xi); });
}

inline PeriodicField low_project(const PeriodicField& f, int k) {
    return apply_real_even_multiplier(f, [k](double xi) { return low_multiplier(k, xi); });
}

// Largest block index with any support inside the grid band.
inline int dyadic_block_count(const Grid& grid) {
    int kmax = 0;
    while (1.25 * std::ldexp(1.0, kmax - 1) < static_cast<double>(grid.n / 2)) ++kmax;
    return kmax + 1;
}

// ---------------------------------------------------------------------------
// Products and propagators

// Embed into a grid with more modes (zero fill) or fewer (sharp truncation).
// The target Nyquist mode is zeroed on truncation (its positive partner is
// cut, so keeping it would break reality symmetry); on expansion a real
// field's Nyquist content is split evenly between +/- N/2.
inline PeriodicField regrid(const PeriodicField& f, const Grid& target) {
    std::vector<cplx> c(static_cast<std::size_t>(target.n), cplx{0.0, 0.0});
    const int lo = std::max(f.grid().min_freq(), target.min_freq());
    const int hi = std::min(f.grid().max_freq(), target.max_freq());
    for (int k = lo; k <= hi; ++k) c[static_cast<std::size_t>(k - target.min_freq())] = f.at(k);
    if (target.n < f.n()) {
        c[0] = cplx{0.0, 0.0};
    } else if (target.n > f.n()) {
        const cplx nyq = f.at(f.grid().min_freq());
        if (f.is_real() && nyq != cplx{0.0, 0.0}) {
            c[static_cast<std::size_t>(f.grid().min_freq() - target.min_freq())] = 0.5 * nyq;
            c[static_cast<std::size_t>(-f.grid().min_freq() - target.min_freq())] = 0.5 * nyq;
        }
    }
    return PeriodicField(target, std::move(c), f.is_real());
}

// Dealiased pointwise product: both factors are synthesized on a 2N grid,
// multiplied, analyzed, and truncated back to N modes.
inline PeriodicField multiply(const PeriodicField& f, const PeriodicField& g) {
    f.check_grid(g);
    const Grid fine(2 * f.n());
    const PeriodicField fp = regrid(f, fine);
    const PeriodicField gp = regrid(g, fine);
    std::vector<cplx> a = synthesize(fp);
    const std::vector<cplx> b = synthesize(gp);
    for (std::size_t j = 0; j < a.size(); ++j) a[j] *= b[j];
    const bool real_out = f.is_real() && g.is_real();
    PeriodicField prod = analyze(fine, a, real_out);
    return regrid(prod, f.grid());
}

// c_k -> e^{-i t sigma(k)} c_k. With sigma(k) = |k| k this is the free
// propagator W(t) of the linearized equation.
inline PeriodicField apply_exp_multiplier(const PeriodicField& f, double t,
                                          const std::function<double(int)>& sigma) {
    if (!std::isfinite(t)) throw std::invalid_argument("apply_exp_multiplier: non-finite time");
    std::vector<cplx> c(f.coeffs());
    const int n = f.n();
    for (int k = f.grid().min_freq(); k <= f.grid().max_freq(); ++k) {
        const double phase = -t * sigma(k);
        c[static_cast<std::size_t>(k + n / 2)] *= cplx(std::cos(phase), std::sin(phase));
    }
    return PeriodicField(f.grid(), std::move(c), f.is_real());
}

inline double dispersion_symbol(int k) { return std::abs(static_cast<double>(k)) * k; }

// ---------------------------------------------------------------------------
// Small helpers used throughout the gauge and norm machinery

// Complex conjugate as a function: c_k -> conj(c_{-k}). The Nyquist mode has
// no partner and is dropped.
inline PeriodicField conj_field(const PeriodicField& f) {
    const Grid& g = f.grid();
    std::vector<cplx> c(static_cast<std::size_t>(g.n), cplx{0.0, 0.0});
    for (int k = g.min_freq() + 1; k <= g.max_freq(); ++k)
        c[static_cast<std::size_t>(-k - g.min_freq())] = std::conj(f.at(k));
    return PeriodicField(g, std::move(c), f.is_real());
}

// Spatial reflection x -> -x: c_k -> c_{-k} (Nyquist dropped).
inline PeriodicField reflect(const PeriodicField& f) {
    const Grid& g = f.grid();
    std::vector<cplx> c(static_cast<std::size_t>(g.n), cplx{0.0, 0.0});
    for (int k = g.min_freq() + 1; k <= g.max_freq(); ++k)
        c[static_cast<std::size_t>(-k - g.min_freq())] = f.at(k);
    return PeriodicField(g, std::move(c), f.is_real());
}

inline PeriodicField constant_field(const Grid& grid, cplx value, bool is_real) {
    PeriodicField f = PeriodicField::zero(grid, is_real);
    f.at(0) = is_real ? cplx(value.real(), 0.0) : value;
    return f;
}

// Trapezoid quadrature of a pointwise function of the synthesized samples on
// a pad*N grid; exact for trigonometric-polynomial integrands of band < pad*N.
inline double quadrature_integral(const PeriodicField& f,
                                  const std::function<double(cplx)>& integrand, int pad = 4) {
    const Grid fine(pad * f.n());
    const std::vector<cplx> samples = synthesize(regrid(f, fine));
    double acc = 0.0;
    for (const cplx& z : samples) acc += integrand(z);
    return acc * two_pi / static_cast<double>(fine.n);
}

}  // namespace mbo::spectral
