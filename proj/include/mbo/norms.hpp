#pragma once

// Norm evaluation on discretized data: Sobolev H^s and H^s_q, space-time
// Lebesgue L^p_t L^q_x, the modulation-weighted X^{s,b} / Z^{s,b} / Y^s
// family on tapered time windows, and dyadic-block l^2 ("tilde") norms.
//
// Every transform-side norm uses the unnormalized convention
// phi_hat(k) = 2*pi*c_k, and the space-time transform carries both Jacobians,
// so a pure free mode lands on modulation weight <tau + |xi|xi> = 1 up to
// window leakage.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "mbo/equations.hpp"
#include "mbo/field.hpp"
#include "mbo/fft.hpp"
#include "mbo/spectral.hpp"

namespace mbo::norms {

using equations::Trajectory;
using spectral::two_pi;

inline double bracket(double x) { return std::sqrt(1.0 + x * x); }  // <x>

// ---------------------------------------------------------------------------
// Static (single-snapshot) norms

// H^s: ( sum_k <k>^{2s} |2*pi*c_k|^2 )^{1/2}.
inline double sobolev_norm(const PeriodicField& f, double s) {
    double acc = 0.0;
    for (int k = f.grid().min_freq(); k <= f.grid().max_freq(); ++k)
        acc += std::pow(1.0 + static_cast<double>(k) * k, s) * std::norm(f.at(k));
    return two_pi * std::sqrt(acc);
}

// Physical-space L^q by padded trapezoid quadrature; exact for even integer
// q with q*band(f) inside the padded band, spectrally accurate otherwise.
// q = infinity is the max over padded samples.
inline double lq_norm(const PeriodicField& f, double q, int pad = 4) {
    const Grid fine(pad * f.n());
    const std::vector<cplx> samples = spectral::synthesize(spectral::regrid(f, fine));
    if (std::isinf(q)) {
        double m = 0.0;
        for (const cplx& z : samples) m = std::max(m, std::abs(z));
        return m;
    }
    if (!(q > 0.0)) throw std::invalid_argument("lq_norm: q must be positive");
    double acc = 0.0;
    for (const cplx& z : samples) acc += std::pow(std::abs(z), q);
    return std::pow(acc * two_pi / static_cast<double>(fine.n), 1.0 / q);
}

// J^s: c_k -> <k>^s c_k.
inline PeriodicField bessel_potential(const PeriodicField& f, double s) {
    std::vector<cplx> c(f.coeffs());
    for (int k = f.grid().min_freq(); k <= f.grid().max_freq(); ++k)
        c[static_cast<std::size_t>(k - f.grid().min_freq())] *=
            std::pow(1.0 + static_cast<double>(k) * k, 0.5 * s);
    return PeriodicField(f.grid(), std::move(c), f.is_real());
}

// H^s_q = || J^s f ||_{L^q}, 2 < q < infinity.
inline double sobolev_q_norm(const PeriodicField& f, double s, double q) {
    if (!(q > 2.0)) throw std::invalid_argument("sobolev_q_norm: requires q > 2");
    return lq_norm(bessel_potential(f, s), q);
}

// ---------------------------------------------------------------------------
// Time windows

// Window taper: the same exp-based bump as the frequency cutoff, rescaled so
// it is 1 on the middle ~78% of [t_a, t_b] and vanishes at both ends with all
// derivatives.
inline double taper_value(double t, double t_a, double t_b) {
    if (!(t_b > t_a)) throw std::invalid_argument("taper_value: empty window");
    const double mid = 0.5 * (t_a + t_b);
    return spectral::bump_eta0(3.2 * (t - mid) / (t_b - t_a));
}

// A trajectory window prepared for the space-time transform. The window is
// the half-open period [t_a, t_a + M dt): M snapshots starting at index i0,
// dual grid tau_j = 2*pi*j / (M dt), j in [-M/2, M/2).
struct SpaceTimeBlock {
    Grid grid;
    double t_a = 0.0;
    double dt = 0.0;
    std::vector<PeriodicField> snapshots;
    std::vector<double> taper;

    static SpaceTimeBlock from_trajectory(const Trajectory& traj, std::size_t i0,
                                          std::size_t count) {
        if (count < 8) throw std::invalid_argument("SpaceTimeBlock: needs at least 8 snapshots");
        if (i0 + count > traj.size())
            throw std::invalid_argument("SpaceTimeBlock: window exceeds trajectory");
        SpaceTimeBlock b;
        b.grid = traj.grid;
        b.t_a = traj.time_at(i0);
        b.dt = traj.dt;
        const double t_b = b.t_a + traj.dt * static_cast<double>(count);
        b.snapshots.assign(traj.snapshots.begin() + static_cast<std::ptrdiff_t>(i0),
                           traj.snapshots.begin() + static_cast<std::ptrdiff_t>(i0 + count));
        b.taper.resize(count);
        for (std::size_t m = 0; m < count; ++m)
            b.taper[m] = taper_value(b.t_a + b.dt * static_cast<double>(m), b.t_a, t_b);
        return b;
    }

    static SpaceTimeBlock whole(const Trajectory& traj) {
        return from_trajectory(traj, 0, traj.size());
    }

    std::size_t size() const { return snapshots.size(); }
    double t_len() const { return dt * static_cast<double>(size()); }
};

// Space-time transform of the tapered window: u_hat(tau_j, xi) for all
// represented xi and tau_j, including both transform Jacobians. Row-major:
// out[j_index * n + xi_index], tau ascending (j = -M/2 .. M/2-1), xi ascending.
inline std::vector<cplx> spacetime_transform(const SpaceTimeBlock& block,
                                             std::vector<double>* tau_out = nullptr) {
    const std::size_t m = block.size();
    const int n = block.grid.n;
    const double d_tau = two_pi / block.t_len();
    const int j_lo = -static_cast<int>(m) / 2;

    std::vector<cplx> out(m * static_cast<std::size_t>(n));
    std::vector<cplx> series(m);
    for (int xi = block.grid.min_freq(); xi <= block.grid.max_freq(); ++xi) {
        for (std::size_t mm = 0; mm < m; ++mm)
            series[mm] = block.taper[mm] * two_pi * block.snapshots[mm].at(xi) * block.dt;
        const std::vector<cplx> spec = detail::dft(series, -1);
        for (int j = j_lo; j < j_lo + static_cast<int>(m); ++j) {
            const std::size_t bin = static_cast<std::size_t>(j >= 0 ? j : j + static_cast<int>(m));
            // carry the absolute-time phase so u_hat is the transform of the
            // window at its true location, not at the origin
            const double tau = d_tau * static_cast<double>(j);
            const cplx phase(std::cos(-tau * block.t_a), std::sin(-tau * block.t_a));
            out[static_cast<std::size_t>(j - j_lo) * static_cast<std::size_t>(n) +
                static_cast<std::size_t>(xi - block.grid.min_freq())] = spec[bin] * phase;
        }
    }
    if (tau_out) {
        tau_out->resize(m);
        for (std::size_t j = 0; j < m; ++j)
            (*tau_out)[j] = d_tau * static_cast<double>(j_lo + static_cast<int>(j));
    }
    return out;
}

enum class ModulationVariant { X, Z };

// X^{s,b}: || <xi>^s <tau+|xi|xi>^b u_hat ||_{L^2_{tau,xi}};
// Z^{s,b}: same weight in L^2_tau l^1_xi (inner sum over xi, outer over tau).
inline double xsb_norm(const SpaceTimeBlock& block, double s, double b,
                       ModulationVariant variant) {
    std::vector<double> tau;
    const std::vector<cplx> hat = spacetime_transform(block, &tau);
    const int n = block.grid.n;
    const double d_tau = two_pi / block.t_len();

    double acc = 0.0;
    for (std::size_t j = 0; j < tau.size(); ++j) {
        double row = 0.0;
        for (int xi = block.grid.min_freq(); xi <= block.grid.max_freq(); ++xi) {
            const double w = std::pow(bracket(static_cast<double>(xi)), s) *
                             std::pow(bracket(tau[j] + spectral::dispersion_symbol(xi)), b);
            const cplx z = hat[j * static_cast<std::size_t>(n) +
                               static_cast<std::size_t>(xi - block.grid.min_freq())];
            if (variant == ModulationVariant::X)
                row += w * w * std::norm(z);
            else
                row += w * std::abs(z);
        }
        acc += (variant == ModulationVariant::X) ? row : row * row;
    }
    return std::sqrt(acc * d_tau);
}

// Y^s = X^{s,1/2} + Z^{s,0}.
inline double y_norm(const SpaceTimeBlock& block, double s) {
    return xsb_norm(block, s, 0.5, ModulationVariant::X) +
           xsb_norm(block, s, 0.0, ModulationVariant::Z);
}

// ---------------------------------------------------------------------------
// Lebesgue-in-time norms over whole trajectories (trapezoid in t, endpoints
// included; p = infinity is the max over snapshots).

inline double lp_time(const std::vector<double>& values, double p, double dt) {
    if (std::isinf(p)) return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
    if (!(p > 0.0)) throw std::invalid_argument("lp_time: p must be positive");
    if (values.size() < 2) throw std::invalid_argument("lp_time: needs at least 2 snapshots");
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double w = (i == 0 || i + 1 == values.size()) ? 0.5 : 1.0;
        acc += w * std::pow(values[i], p);
    }
    return std::pow(acc * dt, 1.0 / p);
}

inline double lp_lq_norm(const Trajectory& traj, double p, double q) {
    std::vector<double> vals(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) vals[i] = lq_norm(traj[i], q);
    return lp_time(vals, p, traj.dt);
}

// Inner space for the dyadic-block norms: either L^q_x or H^s_q.
struct TildeInner {
    enum class Kind { LqX, HsQ } kind = Kind::LqX;
    double s = 0.0;
    double q = 2.0;

    static TildeInner lq(double q) { return {Kind::LqX, 0.0, q}; }
    static TildeInner hsq(double s, double q) { return {Kind::HsQ, s, q}; }

    double eval(const PeriodicField& f) const {
        return kind == Kind::LqX ? lq_norm(f, q) : sobolev_q_norm(f, s, q);
    }
};

// || u ||_{tilde L^p_t B} = ( sum_k || P_{2^k} u ||^2_{L^p_t B} )^{1/2}.
inline double tilde_norm(const Trajectory& traj, double p, const TildeInner& inner) {
    const int blocks = spectral::dyadic_block_count(traj.grid);
    double acc = 0.0;
    for (int k = 0; k < blocks; ++k) {
        std::vector<double> vals(traj.size());
        for (std::size_t i = 0; i < traj.size(); ++i)
            vals[i] = inner.eval(spectral::dyadic_project(traj[i], k));
        const double block_norm = lp_time(vals, p, traj.dt);
        acc += block_norm * block_norm;
    }
    return std::sqrt(acc);
}

// Windowed space-time L^2 of the tapered block by quadrature (rectangle rule
// on the window period; the transform-side X^{0,0} equals 2*pi times this).
inline double windowed_l2(const SpaceTimeBlock& block) {
    double acc = 0.0;
    for (std::size_t m = 0; m < block.size(); ++m) {
        double sp = 0.0;
        for (const cplx& z : block.snapshots[m].coeffs()) sp += std::norm(z);
        acc += block.taper[m] * block.taper[m] * sp * two_pi;
    }
    return std::sqrt(acc * block.dt);
}

// L^4 over the tapered window by quadrature, padded 4x in space.
inline double windowed_l4(const SpaceTimeBlock& block) {
    double acc = 0.0;
    for (std::size_t m = 0; m < block.size(); ++m) {
        const double l4 = lq_norm(block.snapshots[m], 4.0);
        const double t4 = block.taper[m];
        acc += (t4 * t4 * t4 * t4) * (l4 * l4 * l4 * l4);
    }
    return std::pow(acc * block.dt, 0.25);
}

}  // namespace mbo::norms
