#pragma once

// Integrating-factor RK4: substitute g = W(-t) f so the dispersive part is
// propagated exactly by the unitary group and classical RK4 only sees the
// nonlinearity. CFL-free for purely imaginary symbols; with the nonlinearity
// off a step reduces to W(dt) bit-for-bit up to the propagator phases.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "mbo/equations.hpp"
#include "mbo/field.hpp"
#include "mbo/spectral.hpp"

namespace mbo::integrator {

enum class Scheme { ifrk4 };

struct IntegratorConfig {
    // guidance, not enforced: dt <= 1/(N/2)^2 keeps the nonlinear phase
    // rotation per step below one radian at the highest mode
    double dt = 1e-3;
    double t_end = 1.0;
    Scheme scheme = Scheme::ifrk4;
    double blowup_threshold = 1e6;  // on max |f| over the synthesis grid
    int snapshot_stride = 1;

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("IntegratorConfig: dt must be positive");
        if (t_end < 0.0) throw std::invalid_argument("IntegratorConfig: t_end must be >= 0");
        if (snapshot_stride < 1)
            throw std::invalid_argument("IntegratorConfig: snapshot_stride must be >= 1");
        const double steps = t_end / dt;
        if (std::abs(steps - std::round(steps)) > 4.0 * steps * 2.2e-16 + 1e-12)
            throw std::invalid_argument("IntegratorConfig: t_end must be an integer multiple of dt");
    }

    std::size_t step_count() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }
};

struct BlowUpError : std::runtime_error {
    double time;
    equations::Trajectory partial;
    BlowUpError(double t, equations::Trajectory traj)
        : std::runtime_error("solution exceeded blow-up threshold at t = " + std::to_string(t)),
          time(t),
          partial(std::move(traj)) {}
};

using NonlinearFn = std::function<PeriodicField(const PeriodicField&)>;

// One IFRK4 step with an arbitrary nonlinearity. Stage values are expressed
// through the relative propagators W(dt/2), W(dt) only:
//   K1 = NL(u)
//   K2 = NL(W(h/2)(u + h/2 K1))
//   K3 = NL(W(h/2)u + h/2 K2)
//   K4 = NL(W(h)u + h W(h/2) K3)
//   u' = W(h)u + h/6 (W(h)K1 + 2 W(h/2)(K2 + K3) + K4)
inline PeriodicField step_with(const NonlinearFn& nl, const PeriodicField& u, double dt) {
    using equations::propagate_free;
    const double h = dt;
    const PeriodicField k1 = nl(u);
    const PeriodicField k2 = nl(propagate_free(u + (h / 2.0) * k1, h / 2.0));
    const PeriodicField half_u = propagate_free(u, h / 2.0);
    const PeriodicField k3 = nl(half_u + (h / 2.0) * k2);
    const PeriodicField full_u = propagate_free(u, h);
    const PeriodicField k4 = nl(full_u + h * propagate_free(k3, h / 2.0));
    return full_u +
           (h / 6.0) * (propagate_free(k1, h) + 2.0 * propagate_free(k2 + k3, h / 2.0) + k4);
}

inline PeriodicField step(const equations::EquationSpec& spec, const PeriodicField& u, double dt) {
    return step_with([&spec](const PeriodicField& f) { return equations::nonlinear_rhs(spec, f); },
                     u, dt);
}

// Extended-precision carrier for the simulation state. Stage values are
// still evaluated in double; only the state update (the exact propagator
// phases and the accumulated sum) runs in long double, which keeps the
// roundoff floor of conserved-quantity drifts a few orders below the
// scheme's genuine O(dt^4) drift so convergence studies can observe it.
namespace detail_ld {

using lcplx = std::complex<long double>;

inline std::vector<lcplx> widen(const PeriodicField& f) {
    std::vector<lcplx> out(f.coeffs().size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = lcplx(f.coeffs()[i].real(), f.coeffs()[i].imag());
    return out;
}

inline PeriodicField narrow(const std::vector<lcplx>& c, const Grid& grid, bool is_real) {
    std::vector<cplx> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        out[i] = cplx(static_cast<double>(c[i].real()), static_cast<double>(c[i].imag()));
    return PeriodicField(grid, std::move(out), is_real);
}

// state <- W(dt) state, phases evaluated in long double
inline void propagate_inplace(std::vector<lcplx>& state, const Grid& grid, long double t) {
    for (int k = grid.min_freq(); k <= grid.max_freq(); ++k) {
        const long double phase = -t * std::abs(static_cast<long double>(k)) * k;
        state[static_cast<std::size_t>(k - grid.min_freq())] *= lcplx(cosl(phase), sinl(phase));
    }
}

inline void add_scaled(std::vector<lcplx>& state, const PeriodicField& f, long double a) {
    for (std::size_t i = 0; i < state.size(); ++i)
        state[i] += a * lcplx(f.coeffs()[i].real(), f.coeffs()[i].imag());
}

}  // namespace detail_ld

inline double max_abs_on_grid(const PeriodicField& f) {
    double m = 0.0;
    for (const cplx& z : spectral::synthesize(f)) m = std::max(m, std::abs(z));
    return m;
}

inline equations::Trajectory simulate(const equations::EquationSpec& spec, const PeriodicField& u0,
                                      const IntegratorConfig& config) {
    spec.validate();
    config.validate();
    const std::size_t steps = config.step_count();
    const std::size_t stride = static_cast<std::size_t>(config.snapshot_stride);
    if (steps % stride != 0)
        throw std::invalid_argument("simulate: step count must be divisible by snapshot_stride");

    equations::Trajectory traj{u0.grid(), 0.0, config.dt * static_cast<double>(stride), {}};
    traj.snapshots.reserve(steps / stride + 1);
    traj.snapshots.push_back(u0);

    const auto nl = [&spec](const PeriodicField& f) { return equations::nonlinear_rhs(spec, f); };
    const Grid grid = u0.grid();
    const double h = config.dt;
    std::vector<detail_ld::lcplx> state = detail_ld::widen(u0);

    for (std::size_t s = 1; s <= steps; ++s) {
        // stages in double from the rounded state
        const PeriodicField u = detail_ld::narrow(state, grid, u0.is_real());
        const PeriodicField k1 = nl(u);
        const PeriodicField k2 = nl(equations::propagate_free(u + (h / 2.0) * k1, h / 2.0));
        const PeriodicField half_u = equations::propagate_free(u, h / 2.0);
        const PeriodicField k3 = nl(half_u + (h / 2.0) * k2);
        const PeriodicField full_u = equations::propagate_free(u, h);
        const PeriodicField k4 = nl(full_u + h * equations::propagate_free(k3, h / 2.0));
        const PeriodicField combo = equations::propagate_free(k1, h) +
                                    2.0 * equations::propagate_free(k2 + k3, h / 2.0) + k4;
        // state update in long double
        detail_ld::propagate_inplace(state, grid, static_cast<long double>(h));
        detail_ld::add_scaled(state, combo, static_cast<long double>(h) / 6.0L);

        const PeriodicField next = detail_ld::narrow(state, grid, u0.is_real());
        // cheap screen first: max|f| <= sum |c_k|
        double coeff_sum = 0.0;
        for (const cplx& z : next.coeffs()) coeff_sum += std::abs(z);
        if (coeff_sum > config.blowup_threshold &&
            max_abs_on_grid(next) > config.blowup_threshold) {
            throw BlowUpError(config.dt * static_cast<double>(s), std::move(traj));
        }
        if (s % stride == 0) traj.snapshots.push_back(next);
    }
    return traj;
}

}  // namespace mbo::integrator
