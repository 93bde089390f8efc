#pragma once

// Grid and PeriodicField: one 2*pi-periodic snapshot stored as complex
// Fourier coefficients c_k with phi(x) = sum_k c_k e^{ikx},
// k in {-N/2, ..., N/2-1} stored ascending. Norm routines apply the
// unnormalized-transform convention phi_hat(k) = 2*pi*c_k; everything else
// works on the unit-normalized c_k directly.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mbo/fft.hpp"

namespace mbo {

struct NonZeroMeanError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Grid {
    int n = 0;  // Fourier modes; power of two, >= 8; domain length fixed 2*pi

    Grid() = default;
    explicit Grid(int n_modes) : n(n_modes) {
        if (n < 8 || !detail::is_pow2(static_cast<std::size_t>(n)))
            throw std::invalid_argument("Grid: n_modes must be a power of two >= 8");
    }

    int min_freq() const { return -n / 2; }
    int max_freq() const { return n / 2 - 1; }
    bool operator==(const Grid& o) const { return n == o.n; }
};

class PeriodicField {
  public:
    PeriodicField() = default;

    PeriodicField(Grid grid, std::vector<cplx> coeffs, bool is_real)
        : grid_(grid), c_(std::move(coeffs)), is_real_(is_real) {
        if (static_cast<int>(c_.size()) != grid_.n)
            throw std::invalid_argument("PeriodicField: coefficient count != grid modes");
        if (is_real_) enforce_reality();
    }

    static PeriodicField zero(Grid grid, bool is_real = true) {
        return PeriodicField(grid, std::vector<cplx>(grid.n, cplx{0.0, 0.0}), is_real);
    }

    // Builds a field from a sparse list of (frequency, coefficient) pairs.
    static PeriodicField from_modes(Grid grid, const std::vector<std::pair<int, cplx>>& modes,
                                    bool is_real) {
        std::vector<cplx> c(grid.n, cplx{0.0, 0.0});
        for (const auto& [k, v] : modes) {
            if (k < grid.min_freq() || k > grid.max_freq())
                throw std::invalid_argument("from_modes: frequency outside grid band");
            c[static_cast<std::size_t>(k - grid.min_freq())] += v;
        }
        return PeriodicField(grid, std::move(c), is_real);
    }

    const Grid& grid() const { return grid_; }
    int n() const { return grid_.n; }
    bool is_real() const { return is_real_; }
    const std::vector<cplx>& coeffs() const { return c_; }

    const cplx& at(int k) const { return c_[index_of(k)]; }
    cplx& at(int k) { return c_[index_of(k)]; }

    int freq_of_index(std::size_t i) const { return grid_.min_freq() + static_cast<int>(i); }

    cplx mean() const { return at(0); }

    double coeff_l2() const {
        double s = 0.0;
        for (const cplx& z : c_) s += std::norm(z);
        return std::sqrt(s);
    }

    double coeff_linf() const {
        double m = 0.0;
        for (const cplx& z : c_) m = std::max(m, std::abs(z));
        return m;
    }

    PeriodicField& operator+=(const PeriodicField& o) {
        check_grid(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        is_real_ = is_real_ && o.is_real_;
        return *this;
    }
    PeriodicField& operator-=(const PeriodicField& o) {
        check_grid(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        is_real_ = is_real_ && o.is_real_;
        return *this;
    }
    PeriodicField& operator*=(double a) {
        for (cplx& z : c_) z *= a;
        return *this;
    }
    PeriodicField& operator*=(cplx a) {
        for (cplx& z : c_) z *= a;
        is_real_ = is_real_ && a.imag() == 0.0;
        return *this;
    }

    friend PeriodicField operator+(PeriodicField a, const PeriodicField& b) { return a += b; }
    friend PeriodicField operator-(PeriodicField a, const PeriodicField& b) { return a -= b; }
    friend PeriodicField operator*(double a, PeriodicField f) { return f *= a; }
    friend PeriodicField operator*(cplx a, PeriodicField f) { return f *= a; }
    friend PeriodicField operator-(PeriodicField f) { return f *= -1.0; }

    void check_grid(const PeriodicField& o) const {
        if (!(grid_ == o.grid_)) throw std::invalid_argument("PeriodicField: grid mismatch");
    }

  private:
    std::size_t index_of(int k) const {
        if (k < grid_.min_freq() || k > grid_.max_freq())
            throw std::out_of_range("PeriodicField: frequency outside band");
        return static_cast<std::size_t>(k - grid_.min_freq());
    }

    // Reality invariant: c_{-k} = conj(c_k), Nyquist and mean real.
    // Checked to 1e-13 relative on construction, then symmetrized exactly.
    void enforce_reality() {
        const double scale = std::max(coeff_linf(), 1e-300);
        double worst = 0.0;
        for (int k = 1; k <= grid_.max_freq(); ++k)
            worst = std::max(worst, std::abs(at(-k) - std::conj(at(k))));
        worst = std::max(worst, std::abs(at(0).imag()));
        worst = std::max(worst, std::abs(at(grid_.min_freq()).imag()));
        if (worst > 1e-13 * scale)
            throw std::invalid_argument("PeriodicField: coefficients violate reality symmetry (" +
                                        std::to_string(worst / scale) + " relative)");
        for (int k = 1; k <= grid_.max_freq(); ++k) {
            const cplx avg = 0.5 * (at(k) + std::conj(at(-k)));
            at(k) = avg;
            at(-k) = std::conj(avg);
        }
        at(0) = cplx(at(0).real(), 0.0);
        at(grid_.min_freq()) = cplx(at(grid_.min_freq()).real(), 0.0);
    }

    Grid grid_;
    std::vector<cplx> c_;
    bool is_real_ = false;
};

}  // namespace mbo
