#pragma once

// Deterministic random-field ensembles. The generator derives Gaussians from
// explicit mt19937_64 bit manipulation (not std::normal_distribution) so that
// reports reproduce to the last digit on any platform.
//
// Default ensemble: independent complex Gaussian c_k with standard deviation
// <k>^{-decay} on 1 <= |k| <= bandwidth, conjugate-symmetrized for real
// fields, then rescaled to a target H^{1/2} norm.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "mbo/field.hpp"
#include "mbo/norms.hpp"

namespace mbo::ensemble {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform on (0, 1]
    double uniform01() {
        return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    }

    // standard normal via Box-Muller, pairing two uniforms
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform01()));
        const double theta = 2.0 * std::numbers::pi * uniform01();
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // complex Gaussian with E|z|^2 = 1
    cplx cnormal() {
        const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
        return cplx(normal() * inv_sqrt2, normal() * inv_sqrt2);
    }

    std::uint64_t raw() { return gen_(); }

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct FieldEnsemble {
    int bandwidth = 8;       // |k| <= bandwidth get mass
    double decay = 1.0;      // coefficient sd <k>^{-decay}
    double target_h_half = 1.0;  // rescale to this H^{1/2} norm (0 = no rescale)
    bool include_mean = false;
};

inline PeriodicField random_real_field(const Grid& grid, const FieldEnsemble& ens, Rng& rng) {
    std::vector<cplx> c(static_cast<std::size_t>(grid.n), cplx{0.0, 0.0});
    const int b = std::min(ens.bandwidth, grid.max_freq());
    for (int k = 1; k <= b; ++k) {
        const double sd = std::pow(1.0 + static_cast<double>(k) * k, -0.5 * ens.decay);
        const cplx z = sd * rng.cnormal();
        c[static_cast<std::size_t>(k - grid.min_freq())] = z;
        c[static_cast<std::size_t>(-k - grid.min_freq())] = std::conj(z);
    }
    if (ens.include_mean) c[static_cast<std::size_t>(-grid.min_freq())] = rng.normal();
    PeriodicField f(grid, std::move(c), /*is_real=*/true);
    if (ens.target_h_half > 0.0) {
        const double norm = norms::sobolev_norm(f, 0.5);
        if (norm > 0.0) f *= ens.target_h_half / norm;
    }
    return f;
}

inline PeriodicField random_complex_field(const Grid& grid, const FieldEnsemble& ens, Rng& rng) {
    std::vector<cplx> c(static_cast<std::size_t>(grid.n), cplx{0.0, 0.0});
    const int b = std::min(ens.bandwidth, grid.max_freq());
    for (int k = -b; k <= b; ++k) {
        if (k == 0 && !ens.include_mean) continue;
        const double sd = std::pow(1.0 + static_cast<double>(k) * k, -0.5 * ens.decay);
        c[static_cast<std::size_t>(k - grid.min_freq())] = sd * rng.cnormal();
    }
    PeriodicField f(grid, std::move(c), /*is_real=*/false);
    if (ens.target_h_half > 0.0) {
        const double norm = norms::sobolev_norm(f, 0.5);
        if (norm > 0.0) f *= ens.target_h_half / norm;
    }
    return f;
}

}  // namespace mbo::ensemble
