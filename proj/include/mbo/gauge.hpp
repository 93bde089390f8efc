#pragma once

// The gauge machinery: zero-mean primitive F of the renormalized square,
// unimodular factors e^{ikF}, the transform v = P_+(e^{-iF} u), the
// commutator R(u) = [P_+, e^{-iF}]u, the symmetric bilinear form B, the
// closed form for F_t, the gauged evolution operators N^nu and source G(u),
// and the recovery identities for P_+u / P_-u.
//
// e^{ikF} is transcendental in the coefficients, so it is evaluated
// pointwise on a 2x-refined grid and truncated back to N modes; the
// discarded tail fraction is the discretization's sole modeling error and
// is reported wherever a gauge state is assembled.

#include <cmath>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mbo/equations.hpp"
#include "mbo/field.hpp"
#include "mbo/spectral.hpp"

namespace mbo::gauge {

using spectral::Projection;

// F = dx^{-1} P_{!=c}(u^2): the zero-mean periodic primitive of the
// renormalized square.
inline PeriodicField primitive_f(const PeriodicField& u) {
    if (!u.is_real()) throw std::invalid_argument("primitive_f: u must be real");
    using namespace spectral;
    return antiderivative_zero_mean(project(multiply(u, u), Projection::nonconstant));
}

struct GaugeExp {
    PeriodicField field;
    double tail_fraction = 0.0;  // discarded coefficient mass / total, on the 2x grid
};

// e^{ikF} for |k| <= 10, via pointwise exponential on a 2x synthesis grid.
inline GaugeExp gauge_exp_with_tail(const PeriodicField& f_primitive, int k) {
    if (std::abs(k) > 10) throw std::invalid_argument("gauge_exp: |k| must be <= 10");
    const Grid& grid = f_primitive.grid();
    if (k == 0) return {spectral::constant_field(grid, 1.0, false), 0.0};
    if (!f_primitive.is_real()) throw std::invalid_argument("gauge_exp: F must be real");

    using namespace spectral;
    const Grid fine(2 * grid.n);
    const std::vector<double> fv = synthesize_real(regrid(f_primitive, fine));
    std::vector<cplx> ev(fv.size());
    for (std::size_t j = 0; j < fv.size(); ++j) {
        const double phase = static_cast<double>(k) * fv[j];
        ev[j] = cplx(std::cos(phase), std::sin(phase));
    }
    const PeriodicField wide = analyze(fine, ev, /*is_real=*/false);

    double total = 0.0, cut = 0.0;
    for (int kk = fine.min_freq(); kk <= fine.max_freq(); ++kk) {
        const double m = std::norm(wide.at(kk));
        total += m;
        if (kk < grid.min_freq() || kk > grid.max_freq()) cut += m;
    }
    const double tail = total > 0.0 ? std::sqrt(cut / total) : 0.0;
    return {regrid(wide, grid), tail};
}

inline PeriodicField gauge_exp(const PeriodicField& f_primitive, int k) {
    return gauge_exp_with_tail(f_primitive, k).field;
}

struct GaugeState {
    PeriodicField u;          // real snapshot
    PeriodicField f_prim;     // F(u), real, zero mean
    PeriodicField exp_plus;   // e^{+iF}
    PeriodicField exp_minus;  // e^{-iF}
    PeriodicField v;          // P_+(e^{-iF} u)
    double exp_tail_fraction = 0.0;
    double unimodularity_residual = 0.0;  // max | |e^{-iF}| - 1 | on the grid
};

// R(u) = [P_+, e^{-iF}]u = P_+(e^{-iF}u) - e^{-iF} P_+u.
inline PeriodicField commutator_r_with(const PeriodicField& u, const PeriodicField& exp_minus) {
    using namespace spectral;
    return project(multiply(exp_minus, u), Projection::plus) -
           multiply(exp_minus, project(u, Projection::plus));
}

inline PeriodicField commutator_r(const PeriodicField& u, const PeriodicField& f_primitive) {
    return commutator_r_with(u, gauge_exp(f_primitive, -1));
}

inline GaugeState gauge_transform(const PeriodicField& u) {
    using namespace spectral;
    GaugeState st;
    st.u = u;
    st.f_prim = primitive_f(u);
    const GaugeExp em = gauge_exp_with_tail(st.f_prim, -1);
    st.exp_minus = em.field;
    st.exp_tail_fraction = em.tail_fraction;
    st.exp_plus = gauge_exp(st.f_prim, +1);
    st.v = project(multiply(st.exp_minus, u), Projection::plus);
    double worst = 0.0;
    for (const cplx& z : synthesize(st.exp_minus)) worst = std::max(worst, std::abs(std::abs(z) - 1.0));
    st.unimodularity_residual = worst;
    return st;
}

// B(f,g) = -i dx^{-1}(P_+f_x P_+g_x) + i dx^{-1}(P_-f_x P_-g_x). One-signed
// products carry no mean mode; anything above 1e-10 there signals aliasing.
inline PeriodicField bilinear_b(const PeriodicField& f, const PeriodicField& g) {
    using namespace spectral;
    const PeriodicField fx = derivative(f);
    const PeriodicField gx = derivative(g);
    const PeriodicField pp = multiply(project(fx, Projection::plus), project(gx, Projection::plus));
    const PeriodicField mm =
        multiply(project(fx, Projection::minus), project(gx, Projection::minus));
    const double scale = std::max({pp.coeff_l2(), mm.coeff_l2(), 1e-300});
    if (std::abs(pp.mean()) > 1e-10 * scale || std::abs(mm.mean()) > 1e-10 * scale)
        throw NonZeroMeanError("bilinear_b: one-signed product acquired a mean mode");
    const PeriodicField ipp = antiderivative_zero_mean(project(pp, Projection::nonconstant));
    const PeriodicField imm = antiderivative_zero_mean(project(mm, Projection::nonconstant));
    return cplx(0.0, -1.0) * ipp + cplx(0.0, 1.0) * imm;
}

// Closed form (no time derivative) for d_t F along the Wicked flow:
//   F_t = P_{!=c}((P_{!=c}u^2)^2) - 2 u H u_x + 2 P_c(u H u_x) + 2 B(u,u).
inline PeriodicField f_t_formula(const PeriodicField& u) {
    if (!u.is_real()) throw std::invalid_argument("f_t_formula: u must be real");
    using namespace spectral;
    const PeriodicField usq_nc = project(multiply(u, u), Projection::nonconstant);
    const PeriodicField term1 = project(multiply(usq_nc, usq_nc), Projection::nonconstant);
    const PeriodicField uhux = multiply(u, hilbert(derivative(u)));
    const PeriodicField term2 = -2.0 * uhux;
    const PeriodicField term3 = 2.0 * project(uhux, Projection::mean);
    return term1 + term2 + term3 + 2.0 * bilinear_b(u, u);
}

// N^nu(u,v) = -dx^nu P_+( dx^{-nu} P_+(e^{-iF}u^2) * dx P_-(e^{-iF} vbar) ).
inline PeriodicField n_operator_with(const PeriodicField& u, const PeriodicField& v,
                                     const PeriodicField& exp_minus, int nu) {
    if (nu != 0 && nu != 1) throw std::invalid_argument("n_operator: nu must be 0 or 1");
    using namespace spectral;
    PeriodicField left = project(multiply(exp_minus, multiply(u, u)), Projection::plus);
    if (nu == 1) left = antiderivative_zero_mean(left);  // P_+ output has no mean mode
    const PeriodicField right =
        derivative(project(multiply(exp_minus, conj_field(v)), Projection::minus));
    PeriodicField out = -1.0 * project(multiply(left, right), Projection::plus);
    if (nu == 1) out = derivative(out);
    return out;
}

inline PeriodicField n_operator(const PeriodicField& u, const PeriodicField& v,
                                const PeriodicField& f_primitive, int nu) {
    return n_operator_with(u, v, gauge_exp(f_primitive, -1), nu);
}

// Two assemblies of the source G(u) are kept. `derived` is the grouping the
// gauged-equation residual study certifies (it closes the evolution identity
// to centered-difference accuracy). `alternative` is a rival grouping
// that differs in two places -- the quartic mean group enters with a real
// instead of an imaginary factor, and the low-frequency commutator group is
// replaced by a bare transport term -- and is retained so the arbitration
// test can demonstrate that it does not close the identity.
enum class SourceVariant { derived, alternative };

inline PeriodicField source_g_with(const PeriodicField& u, const PeriodicField& exp_minus,
                                   const PeriodicField& r_commutator,
                                   SourceVariant variant = SourceVariant::derived) {
    using namespace spectral;
    const PeriodicField usq = multiply(u, u);
    const PeriodicField uhux = multiply(u, hilbert(derivative(u)));
    const PeriodicField usq_nc = project(usq, Projection::nonconstant);
    const double pc_usq = usq.mean().real();
    const double pc_uhux = uhux.mean().real();
    const double pc_usq_nc_sq = multiply(usq_nc, usq_nc).mean().real();

    const PeriodicField pminus_ux = project(derivative(u), Projection::minus);
    // dx P_-(e^{-iF} conj(R)) appears in two groups
    const PeriodicField dressed_r = derivative(
        project(multiply(exp_minus, conj_field(r_commutator)), Projection::minus));
    // dx^{-1} P_+(e^{-iF}): strictly positive frequencies, primitive unambiguous
    const PeriodicField int_pplus_exp =
        antiderivative_zero_mean(project(exp_minus, Projection::plus));

    // group 1: P_+( e^{-iF} ( -2i u P_c(uHu_x) + i u P_c((P_{!=c}u^2)^2)
    //                         + 2 u^2 dx P_-(e^{-iF} conj R) ) )
    const cplx quartic_factor = (variant == SourceVariant::derived)
                                    ? cplx(0.0, pc_usq_nc_sq)
                                    : cplx(pc_usq_nc_sq, 0.0);
    PeriodicField inner = cplx(0.0, -2.0 * pc_uhux) * u + quartic_factor * u +
                          2.0 * multiply(usq, dressed_r);
    const PeriodicField group1 = project(multiply(exp_minus, inner), Projection::plus);

    // group 2: 2i dx P_+( e^{-iF} dx P_-(e^{-iF} conj R) )
    const PeriodicField group2 =
        cplx(0.0, 2.0) * derivative(project(multiply(exp_minus, dressed_r), Projection::plus));

    // group 3 (derived): 2 P_c(u^2) dx P_+( dx^{-1}P_+(e^{-iF}) dx P_-(e^{-iF} conj R) )
    // group 3 (alternative): -2 dx P_+( dx^{-1}P_+(e^{-iF}) P_-u_x )
    PeriodicField group3 = (variant == SourceVariant::derived)
        ? 2.0 * pc_usq *
              derivative(project(multiply(int_pplus_exp, dressed_r), Projection::plus))
        : -2.0 * derivative(project(multiply(int_pplus_exp, pminus_ux), Projection::plus));

    // group 4: 2 P_c(u^2) ( dx P_+( dx^{-1}P_+(e^{-iF}) P_-u_x )
    //                       - P_+(e^{-iF} P_-u_x) )
    const PeriodicField group4 =
        (2.0 * pc_usq) *
        (derivative(project(multiply(int_pplus_exp, pminus_ux), Projection::plus)) -
         project(multiply(exp_minus, pminus_ux), Projection::plus));

    return group1 + group2 + group3 + group4;
}

inline PeriodicField source_g(const PeriodicField& u, const PeriodicField& f_primitive,
                              const PeriodicField& r_commutator,
                              SourceVariant variant = SourceVariant::derived) {
    return source_g_with(u, gauge_exp(f_primitive, -1), r_commutator, variant);
}

// Full d_t v per the gauged equation:
//   v_t = i v_xx + 2 N^0(u,v) + 2 N^1(u,v) - 2i P_+(e^{-iF} u B(u,u)) + G(u).
inline PeriodicField gauged_rhs_with(const PeriodicField& u, const PeriodicField& v,
                                     const PeriodicField& exp_minus,
                                     const PeriodicField& r_commutator,
                                     SourceVariant variant = SourceVariant::derived) {
    using namespace spectral;
    const PeriodicField v_xx = derivative(derivative(v));
    const PeriodicField ub = multiply(u, bilinear_b(u, u));
    return cplx(0.0, 1.0) * v_xx + 2.0 * n_operator_with(u, v, exp_minus, 0) +
           2.0 * n_operator_with(u, v, exp_minus, 1) +
           cplx(0.0, -2.0) * project(multiply(exp_minus, ub), Projection::plus) +
           source_g_with(u, exp_minus, r_commutator, variant);
}

inline PeriodicField gauged_rhs(const PeriodicField& u, const PeriodicField& v,
                                const PeriodicField& f_primitive,
                                const PeriodicField& r_commutator,
                                SourceVariant variant = SourceVariant::derived) {
    return gauged_rhs_with(u, v, gauge_exp(f_primitive, -1), r_commutator, variant);
}

// Recovery identities: plus returns e^{iF}v - e^{iF}R(u) (= P_+u),
// minus returns P_-(e^{-iF} vbar) - P_-(e^{-iF} conj(R(u))) (= P_-u).
inline PeriodicField recover(const PeriodicField& u, const PeriodicField& v,
                             const PeriodicField& f_primitive,
                             const PeriodicField& r_commutator, Projection which) {
    using namespace spectral;
    if (which == Projection::plus) {
        const PeriodicField ep = gauge_exp(f_primitive, +1);
        return multiply(ep, v) - multiply(ep, r_commutator);
    }
    if (which == Projection::minus) {
        if (!u.is_real()) throw std::invalid_argument("recover(minus): requires real u");
        const PeriodicField em = gauge_exp(f_primitive, -1);
        return project(multiply(em, conj_field(v)), Projection::minus) -
               project(multiply(em, conj_field(r_commutator)), Projection::minus);
    }
    throw std::invalid_argument("recover: which must be plus or minus");
}

// Both sides of the rewrite of the first two terms of the pre-gauged
// equation: lhs = P_+[e^{-iF}(-4u^2 P_-u_x)] - 2i P_+(e^{-iF} P_-u_xx),
// rhs = the integrated-by-parts expansion. Agreement certifies the algebra.
inline std::pair<PeriodicField, PeriodicField> rewrite_check(const PeriodicField& u,
                                                             const PeriodicField& f_primitive) {
    using namespace spectral;
    const PeriodicField em = gauge_exp(f_primitive, -1);
    const PeriodicField usq = multiply(u, u);
    const PeriodicField pminus_ux = project(derivative(u), Projection::minus);
    const PeriodicField pminus_uxx = project(derivative(derivative(u)), Projection::minus);

    const PeriodicField lhs =
        -4.0 * project(multiply(em, multiply(usq, pminus_ux)), Projection::plus) +
        cplx(0.0, -2.0) * project(multiply(em, pminus_uxx), Projection::plus);

    const PeriodicField int_pplus_em_usq =
        antiderivative_zero_mean(project(multiply(em, usq), Projection::plus));
    const PeriodicField int_pplus_em = antiderivative_zero_mean(project(em, Projection::plus));
    const double pc_usq = usq.mean().real();

    const PeriodicField rhs =
        -2.0 * project(multiply(em, multiply(usq, pminus_ux)), Projection::plus) -
        2.0 * derivative(project(multiply(int_pplus_em_usq, pminus_ux), Projection::plus)) +
        (2.0 * pc_usq) *
            (derivative(project(multiply(int_pplus_em, pminus_ux), Projection::plus)) -
             project(multiply(em, pminus_ux), Projection::plus));
    return {lhs, rhs};
}

struct GaugedTrajectory {
    equations::Trajectory base;
    std::vector<GaugeState> states;
};

inline GaugedTrajectory gauge_trajectory(const equations::Trajectory& traj) {
    GaugedTrajectory out{traj, {}};
    out.states.reserve(traj.size());
    for (const PeriodicField& u : traj.snapshots) out.states.push_back(gauge_transform(u));
    return out;
}

}  // namespace mbo::gauge
