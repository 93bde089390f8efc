#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "mbo/ensemble.hpp"
#include "mbo/gauge.hpp"
#include "mbo/integrator.hpp"
#include "mbo/norms.hpp"
#include "support/sparse_oracle.hpp"

using namespace mbo;
using namespace mbo::gauge;
using namespace mbo::spectral;
using Catch::Approx;

namespace {

PeriodicField cosine(const Grid& g, int k, double amp = 1.0) {
    return PeriodicField::from_modes(g, {{k, 0.5 * amp}, {-k, 0.5 * amp}}, true);
}

PeriodicField sine(const Grid& g, int k, double amp = 1.0) {
    return PeriodicField::from_modes(
        g, {{k, cplx(0.0, -0.5 * amp)}, {-k, cplx(0.0, 0.5 * amp)}}, true);
}

double coeff_distance(const PeriodicField& a, const PeriodicField& b) {
    double worst = 0.0;
    for (int k = a.grid().min_freq(); k <= a.grid().max_freq(); ++k)
        worst = std::max(worst, std::abs(a.at(k) - b.at(k)));
    return worst;
}

double rel_l2(const PeriodicField& err, const PeriodicField& ref) {
    return err.coeff_l2() / std::max(ref.coeff_l2(), 1e-300);
}

const ensemble::FieldEnsemble kIdentityEnsemble{
    .bandwidth = 6, .decay = 1.0, .target_h_half = 0.35, .include_mean = true};

}  // namespace

TEST_CASE("primitive of the renormalized square") {
    const Grid g(64);
    // u = cos x: P_{!=c}(cos^2 x) = cos(2x)/2, primitive sin(2x)/4
    const auto F = primitive_f(cosine(g, 1));
    CHECK(coeff_distance(F, sine(g, 2, 0.25)) < 1e-15);

    CHECK(primitive_f(constant_field(g, 1.7, true)).coeff_l2() == 0.0);

    ensemble::Rng rng(2);
    const auto u = ensemble::random_real_field(g, {.bandwidth = 16, .include_mean = true}, rng);
    const auto Fu = primitive_f(u);
    CHECK(std::abs(Fu.mean()) == 0.0);
    const auto dv = derivative(Fu) - project(multiply(u, u), Projection::nonconstant);
    CHECK(dv.coeff_l2() < 1e-12 * multiply(u, u).coeff_l2());
}

TEST_CASE("gauge exponential basics") {
    const Grid g(64);
    const auto one = constant_field(g, 1.0, false);

    CHECK(coeff_distance(gauge_exp(PeriodicField::zero(g), -1), one) < 1e-15);
    CHECK(coeff_distance(gauge_exp(sine(g, 2, 0.25), 0), one) == 0.0);
    CHECK_THROWS_AS(gauge_exp(PeriodicField::zero(g), 11), std::invalid_argument);

    // derivative identity for u = cos x, k = -1, F = sin(2x)/4:
    // d_x e^{-iF} + i e^{-iF} cos(2x)/2 should vanish
    const auto F = sine(g, 2, 0.25);
    const auto em = gauge_exp(F, -1);
    const auto resid = derivative(em) + cplx(0.0, 1.0) * multiply(em, cosine(g, 2, 0.5));
    CHECK(resid.coeff_l2() < 1e-10 * em.coeff_l2());

    // unimodular pointwise, and e^{ikF} e^{-ikF} = 1
    for (const cplx& z : synthesize(em)) CHECK(std::abs(std::abs(z) - 1.0) < 1e-13);
    const auto prod = multiply(gauge_exp(F, 2), gauge_exp(F, -2));
    CHECK(coeff_distance(prod, one) < 1e-12);
}

TEST_CASE("gauge transform states") {
    const Grid g(64);
    const auto st0 = gauge_transform(PeriodicField::zero(g));
    CHECK(st0.v.coeff_l2() == 0.0);

    const auto stc = gauge_transform(constant_field(g, 2.0, true));
    CHECK(stc.f_prim.coeff_l2() == 0.0);
    CHECK(stc.v.coeff_l2() == 0.0);

    // small-amplitude expansion: v = eps e^{ix}/2 + O(eps^3)
    const double eps = 1e-3;
    const auto st = gauge_transform(cosine(g, 1, eps));
    auto expected = PeriodicField::from_modes(g, {{1, 0.5 * eps}}, false);
    CHECK(coeff_distance(st.v, expected) < 1e-8);

    // state invariants
    CHECK(std::abs(st.f_prim.mean()) == 0.0);
    CHECK(st.unimodularity_residual < 1e-11);
    const auto fx = derivative(st.f_prim) - project(multiply(st.u, st.u), Projection::nonconstant);
    CHECK(fx.coeff_l2() < 1e-11);
}

TEST_CASE("commutator: trivial kernels and quintic-order leading term") {
    const Grid g(64);
    // F = 0 makes the commutator vanish identically
    ensemble::Rng rng(5);
    const auto u = ensemble::random_real_field(g, {.bandwidth = 10}, rng);
    const auto em1 = constant_field(g, 1.0, false);
    CHECK(commutator_r_with(u, em1).coeff_l2() < 1e-16);
    CHECK(commutator_r(constant_field(g, 3.0, true), PeriodicField::zero(g)).coeff_l2() == 0.0);

    // leading order: R(u) ~ -i (P_+(F u) - F P_+ u), error O(eps^5)
    const auto leading = [&](double eps) {
        const auto ue = cosine(g, 1, eps);
        const auto F = primitive_f(ue);
        const auto R = commutator_r(ue, F);
        const auto lead =
            cplx(0.0, -1.0) *
            (project(multiply(F, ue), Projection::plus) - multiply(F, project(ue, Projection::plus)));
        return (R - lead).coeff_l2();
    };
    const double r1 = leading(0.1);
    const double r2 = leading(0.05);
    CHECK(r1 < 1e-6);
    // quintic scaling: halving eps shrinks the defect by ~2^5
    CHECK(r1 / r2 == Approx(32.0).epsilon(0.25));
}

TEST_CASE("bilinear form B") {
    const Grid g(64);
    CHECK(coeff_distance(bilinear_b(cosine(g, 1), cosine(g, 1)), cosine(g, 2, 0.25)) < 1e-15);
    CHECK(bilinear_b(cosine(g, 3), PeriodicField::zero(g)).coeff_l2() == 0.0);

    ensemble::Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto f = ensemble::random_real_field(g, {.bandwidth = 12, .include_mean = true}, rng);
        const auto h = ensemble::random_real_field(g, {.bandwidth = 12, .include_mean = true}, rng);
        // symmetry is exact
        CHECK(coeff_distance(bilinear_b(f, h), bilinear_b(h, f)) == 0.0);
        // B(f,f) = dx^{-1}(f_x H f_x), right side built independently
        const auto fx = derivative(f);
        const auto ref = antiderivative_zero_mean(
            project(multiply(fx, hilbert(fx)), Projection::nonconstant));
        CHECK(rel_l2(bilinear_b(f, f) - ref, ref) < 1e-12);
    }
}

TEST_CASE("closed-form F_t vanishes on constants") {
    const Grid g(64);
    CHECK(f_t_formula(PeriodicField::zero(g)).coeff_l2() == 0.0);
    CHECK(f_t_formula(constant_field(g, 1.3, true)).coeff_l2() < 1e-15);
}

TEST_CASE("closed-form F_t matches centered time differences along the flow") {
    const Grid g(64);
    const auto u0 = cosine(g, 1, 0.5);
    const auto traj = integrator::simulate(equations::EquationSpec::wicked_spec(), u0,
                                           {5e-4, 0.1, integrator::Scheme::ifrk4, 1e6, 10});
    const double dts = traj.dt;
    std::vector<PeriodicField> F;
    for (const auto& s : traj.snapshots) F.push_back(primitive_f(s));
    auto residual = [&](std::size_t m) {
        const auto fd = (1.0 / (2.0 * dts)) * (F[m + 1] - F[m - 1]);
        return (fd - f_t_formula(traj.snapshots[m])).coeff_l2();
    };
    // second-order in snapshot spacing: compare strides 1 and 2
    const double r1 = residual(10);
    const auto fd2 = (1.0 / (4.0 * dts)) * (F[12] - F[8]);
    const double r2 = (fd2 - f_t_formula(traj.snapshots[10])).coeff_l2();
    CHECK(r2 / r1 == Approx(4.0).epsilon(0.1));
}

TEST_CASE("N^nu operators against the sparse symbolic oracle") {
    const Grid g(64);
    const auto u = cosine(g, 1);
    const auto v = PeriodicField::from_modes(g, {{1, 1.0}}, false);
    const auto F = primitive_f(u);  // sin(2x)/4

    CHECK(n_operator(u, PeriodicField::zero(g), F, 0).coeff_l2() == 0.0);
    CHECK(n_operator(u, PeriodicField::zero(g), F, 1).coeff_l2() == 0.0);
    const auto stc = gauge_transform(constant_field(g, 2.0, true));
    CHECK(n_operator_with(stc.u, v, stc.exp_minus, 0).coeff_l2() == 0.0);

    // oracle: exact sparse algebra with Taylor e^{-iF}
    using namespace oracle;
    const Modes Fo = from_field(F);
    const Modes em = exp_taylor(scale(Fo, cplx(0.0, -1.0)));
    const Modes uo = from_field(u);
    const Modes vo = from_field(v);
    for (int nu : {0, 1}) {
        Modes left = project_plus(conv(em, conv(uo, uo)));
        if (nu == 1) left = antiderivative(left);
        const Modes right = derivative(project_minus(conv(em, conj_fn(vo))));
        Modes expect = scale(project_plus(conv(left, right)), -1.0);
        if (nu == 1) expect = derivative(expect);
        for (auto it = expect.begin(); it != expect.end();)
            it = (it->first <= g.min_freq() || it->first > g.max_freq()) ? expect.erase(it) : ++it;

        const auto got = n_operator(u, v, F, nu);
        CHECK(oracle::max_coeff_distance(expect, got) < 1e-10);
    }
}

TEST_CASE("source term: trivial kernels, oracle value, refinement stability") {
    const Grid g(64);
    const auto zero = PeriodicField::zero(g);
    {
        const auto st = gauge_transform(zero);
        const auto R = commutator_r_with(zero, st.exp_minus);
        CHECK(source_g_with(zero, st.exp_minus, R).coeff_l2() == 0.0);
    }
    {
        const auto c = constant_field(g, 2.0, true);
        const auto st = gauge_transform(c);
        const auto R = commutator_r_with(c, st.exp_minus);
        CHECK(source_g_with(c, st.exp_minus, R).coeff_l2() < 1e-14);
    }

    // u = cos x against the sparse oracle
    const auto u = cosine(g, 1);
    const auto F = primitive_f(u);
    const auto st = gauge_transform(u);
    const auto R = commutator_r_with(u, st.exp_minus);
    const auto g64 = source_g_with(u, st.exp_minus, R);
    {
        using namespace oracle;
        const Modes Fo = from_field(F);
        const Modes em = exp_taylor(scale(Fo, cplx(0.0, -1.0)));
        const Modes uo = from_field(u);
        const Modes usq = conv(uo, uo);
        const Modes uhux = conv(uo, hilbert(derivative(uo)));
        const Modes usq_nc = project_nonconstant(usq);
        const cplx pc_usq = usq.count(0) ? usq.at(0) : 0.0;
        const cplx pc_uhux = uhux.count(0) ? uhux.at(0) : 0.0;
        const Modes usq_nc_sq = conv(usq_nc, usq_nc);
        const cplx pc_usq_nc_sq = usq_nc_sq.count(0) ? usq_nc_sq.at(0) : 0.0;

        const Modes Ro = add(project_plus(conv(em, uo)),
                             scale(conv(em, project_plus(uo)), -1.0));
        const Modes dressed_r = derivative(project_minus(conv(em, conj_fn(Ro))));
        const Modes int_pplus_em = antiderivative(project_plus(em));
        const Modes pminus_ux = project_minus(derivative(uo));

        Modes inner = add(add(scale(uo, cplx(0.0, -2.0) * pc_uhux),
                              scale(uo, cplx(0.0, 1.0) * pc_usq_nc_sq)),
                          scale(conv(usq, dressed_r), 2.0));
        Modes expect = project_plus(conv(em, inner));
        expect = add(expect, scale(derivative(project_plus(conv(em, dressed_r))), cplx(0.0, 2.0)));
        expect = add(expect, scale(derivative(project_plus(conv(int_pplus_em, dressed_r))),
                                   2.0 * pc_usq));
        expect = add(expect,
                     scale(add(derivative(project_plus(conv(int_pplus_em, pminus_ux))),
                               scale(project_plus(conv(em, pminus_ux)), -1.0)),
                           2.0 * pc_usq));
        for (auto it = expect.begin(); it != expect.end();)
            it = (it->first <= g.min_freq() || it->first > g.max_freq()) ? expect.erase(it) : ++it;
        CHECK(oracle::max_coeff_distance(expect, g64) < 1e-10);
    }

    // refinement stability: same u on a 128-mode grid
    const Grid g2(128);
    const auto u2 = regrid(u, g2);
    const auto st2 = gauge_transform(u2);
    const auto R2 = commutator_r_with(u2, st2.exp_minus);
    const auto g128 = source_g_with(u2, st2.exp_minus, R2);
    double worst = 0.0;
    for (int k = g.min_freq() + 1; k <= g.max_freq(); ++k)
        worst = std::max(worst, std::abs(g64.at(k) - g128.at(k)));
    CHECK(worst < 1e-10);
}

TEST_CASE("recovery identities") {
    const Grid g(64);
    {
        const auto zero = PeriodicField::zero(g);
        const auto st = gauge_transform(zero);
        const auto R = commutator_r_with(zero, st.exp_minus);
        CHECK(recover(zero, st.v, st.f_prim, R, Projection::plus).coeff_l2() == 0.0);
        CHECK(recover(zero, st.v, st.f_prim, R, Projection::minus).coeff_l2() == 0.0);
    }
    {
        const auto u = cosine(g, 1);
        const auto st = gauge_transform(u);
        const auto R = commutator_r_with(u, st.exp_minus);
        const auto rp = recover(u, st.v, st.f_prim, R, Projection::plus);
        const auto rm = recover(u, st.v, st.f_prim, R, Projection::minus);
        CHECK((rp - project(u, Projection::plus)).coeff_l2() < 1e-11);
        CHECK((rm - project(u, Projection::minus)).coeff_l2() < 1e-11);
    }
    // 50-trial property sweep
    ensemble::Rng rng(3);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto u = ensemble::random_real_field(g, kIdentityEnsemble, rng);
        const auto st = gauge_transform(u);
        const auto R = commutator_r_with(u, st.exp_minus);
        const auto rp = recover(u, st.v, st.f_prim, R, Projection::plus);
        const auto rm = recover(u, st.v, st.f_prim, R, Projection::minus);
        worst = std::max(worst, rel_l2(rp - project(u, Projection::plus),
                                       project(u, Projection::plus)));
        worst = std::max(worst, rel_l2(rm - project(u, Projection::minus),
                                       project(u, Projection::minus)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("rewrite of the minus-frequency transport terms") {
    const Grid g(64);
    {
        const auto zero = PeriodicField::zero(g);
        const auto [lhs, rhs] = rewrite_check(zero, primitive_f(zero));
        CHECK(lhs.coeff_l2() == 0.0);
        CHECK(rhs.coeff_l2() == 0.0);
    }
    {
        const auto c = constant_field(g, 1.5, true);
        const auto [lhs, rhs] = rewrite_check(c, primitive_f(c));
        CHECK(lhs.coeff_l2() < 1e-14);
        CHECK(rhs.coeff_l2() < 1e-14);
    }
    ensemble::Rng rng(9);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto u = ensemble::random_real_field(g, kIdentityEnsemble, rng);
        const auto [lhs, rhs] = rewrite_check(u, primitive_f(u));
        worst = std::max(worst, rel_l2(lhs - rhs, lhs));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("gauged evolution: trivial kernels and source-variant arbitration") {
    const Grid g(64);
    {
        const auto zero = PeriodicField::zero(g);
        const auto st = gauge_transform(zero);
        const auto R = commutator_r_with(zero, st.exp_minus);
        CHECK(gauged_rhs_with(zero, st.v, st.exp_minus, R).coeff_l2() == 0.0);
    }
    {
        const auto c = constant_field(g, 2.0, true);
        const auto st = gauge_transform(c);
        const auto R = commutator_r_with(c, st.exp_minus);
        CHECK(gauged_rhs_with(c, st.v, st.exp_minus, R).coeff_l2() < 1e-14);
    }

    // Along a simulated flow the derived source closes the evolution identity
    // at second order in the snapshot spacing; the alternative grouping leaves
    // an O(1) defect. This is the arbitration test for the source variants.
    const auto u0 = cosine(g, 1, 0.5);
    const auto traj = integrator::simulate(equations::EquationSpec::wicked_spec(), u0,
                                           {5e-4, 0.05, integrator::Scheme::ifrk4, 1e6, 10});
    const auto gtraj = gauge_trajectory(traj);
    const double dts = traj.dt;
    auto residual_at = [&](std::size_t m, SourceVariant variant) {
        const auto& st = gtraj.states[m];
        const auto vdot = (1.0 / (2.0 * dts)) * (gtraj.states[m + 1].v - gtraj.states[m - 1].v);
        const auto R = commutator_r_with(st.u, st.exp_minus);
        return norms::sobolev_norm(vdot - gauged_rhs_with(st.u, st.v, st.exp_minus, R, variant),
                                   0.5);
    };
    const double derived = residual_at(5, SourceVariant::derived);
    const double alternative = residual_at(5, SourceVariant::alternative);
    CHECK(derived < 1e-3);
    CHECK(alternative > 1e-2);  // does not close the identity
}
