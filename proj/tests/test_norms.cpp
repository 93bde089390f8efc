#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "mbo/ensemble.hpp"
#include "mbo/norms.hpp"

using namespace mbo;
using namespace mbo::norms;
using namespace mbo::equations;
using Catch::Approx;
namespace sp = mbo::spectral;

namespace {

PeriodicField cosine(const Grid& g, int k, double amp = 1.0) {
    return PeriodicField::from_modes(g, {{k, 0.5 * amp}, {-k, 0.5 * amp}}, true);
}

Trajectory free_mode_trajectory(const Grid& g, int k, double t_len, int m_snapshots,
                                double rate = 1.0) {
    Trajectory tr{g, 0.0, t_len / m_snapshots, {}};
    const auto e = PeriodicField::from_modes(g, {{k, 1.0}}, false);
    for (int m = 0; m < m_snapshots; ++m)
        tr.snapshots.push_back(propagate_free(e, tr.dt * m * rate));
    return tr;
}

}  // namespace

TEST_CASE("Sobolev norm of pure modes is 2 pi <k>^s") {
    const Grid g(64);
    for (int k : {0, 1, 3, 7, 20}) {
        const auto e = PeriodicField::from_modes(g, {{k, 1.0}}, false);
        for (double s : {-0.5, 0.0, 0.5, 1.0, 1.3}) {
            const double expect =
                2.0 * std::numbers::pi * std::pow(1.0 + static_cast<double>(k) * k, 0.5 * s);
            CHECK(sobolev_norm(e, s) == Approx(expect).epsilon(1e-14));
        }
    }
    CHECK(sobolev_norm(PeriodicField::zero(g), 0.7) == 0.0);
    // cos x at s = 0: pi sqrt 2
    CHECK(sobolev_norm(cosine(g, 1), 0.0) ==
          Approx(std::numbers::pi * std::numbers::sqrt2).epsilon(1e-14));
}

TEST_CASE("Sobolev monotonicity in s") {
    const Grid g(64);
    ensemble::Rng rng(13);
    const auto f = ensemble::random_real_field(g, {.bandwidth = 20, .include_mean = true}, rng);
    double prev = sobolev_norm(f, -1.0);
    for (double s : {-0.5, 0.0, 0.25, 0.5, 1.0, 1.5}) {
        const double cur = sobolev_norm(f, s);
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("L^q sobolev variant") {
    const Grid g(64);
    // constants: |c| (2 pi)^{1/q} for any s
    for (double q : {2.5, 4.0, 6.0})
        CHECK(sobolev_q_norm(sp::constant_field(g, -2.0, true), 1.3, q) ==
              Approx(2.0 * std::pow(2.0 * std::numbers::pi, 1.0 / q)).epsilon(1e-13));
    CHECK(sobolev_q_norm(PeriodicField::zero(g), 0.5, 4.0) == 0.0);

    // cos x, s=0, q=4: (int cos^4)^{1/4} = (3 pi / 4)^{1/4}, against the
    // N = 4096 quadrature oracle
    const Grid fine(4096);
    const auto samples = sp::synthesize_real(sp::regrid(cosine(g, 1), fine));
    double acc = 0.0;
    for (double v : samples) acc += v * v * v * v;
    const double oracle = std::pow(acc * 2.0 * std::numbers::pi / 4096.0, 0.25);
    CHECK(sobolev_q_norm(cosine(g, 1), 0.0, 4.0) == Approx(oracle).epsilon(1e-13));
    CHECK(oracle == Approx(std::pow(0.75 * std::numbers::pi, 0.25)).epsilon(1e-13));
}

TEST_CASE("taper vanishes at window ends and is 1 in the plateau") {
    CHECK(taper_value(0.0, 0.0, 1.0) == 0.0);
    CHECK(taper_value(1.0, 0.0, 1.0) == 0.0);
    CHECK(taper_value(0.5, 0.0, 1.0) == 1.0);
    CHECK(taper_value(0.35, 0.0, 1.0) == 1.0);
}

TEST_CASE("block construction guards") {
    const Grid g(16);
    Trajectory tr = free_mode_trajectory(g, 1, 1.0, 16);
    CHECK_NOTHROW(SpaceTimeBlock::whole(tr));
    CHECK_THROWS_AS(SpaceTimeBlock::from_trajectory(tr, 0, 4), std::invalid_argument);
    CHECK_THROWS_AS(SpaceTimeBlock::from_trajectory(tr, 10, 8), std::invalid_argument);
}

TEST_CASE("X^{0,0} equals the windowed space-time L2 (Plancherel)") {
    const Grid g(32);
    ensemble::Rng rng(5);
    for (int rep = 0; rep < 5; ++rep) {
        Trajectory tr{g, 0.0, 1.0 / 65, {}};
        const auto f = PeriodicField::from_modes(g,
                                                 {{-3, rng.cnormal()},
                                                  {1, rng.cnormal()},
                                                  {2, rng.cnormal()},
                                                  {5, rng.cnormal()}},
                                                 false);
        for (int m = 0; m < 65; ++m) tr.snapshots.push_back(propagate_free(f, tr.dt * m * 0.3));
        const auto block = SpaceTimeBlock::whole(tr);
        const double lhs = xsb_norm(block, 0.0, 0.0, ModulationVariant::X);
        const double rhs = 2.0 * std::numbers::pi * windowed_l2(block);
        CHECK(std::abs(lhs / rhs - 1.0) < 1e-10);
    }
    CHECK(xsb_norm(SpaceTimeBlock::whole(free_mode_trajectory(g, 1, 1.0, 16)), 0.0, 0.5,
                   ModulationVariant::X) > 0.0);
    // zero trajectory
    Trajectory zr{g, 0.0, 1.0 / 16, std::vector<PeriodicField>(16, PeriodicField::zero(g))};
    CHECK(xsb_norm(SpaceTimeBlock::whole(zr), 0.5, 0.5, ModulationVariant::X) == 0.0);
}

TEST_CASE("conjugation is an isometry of X^{s,b} and Z^{s,b}") {
    const Grid g(32);
    ensemble::Rng rng(7);
    Trajectory tr{g, 0.0, 1.0 / 65, {}};
    const auto f = PeriodicField::from_modes(
        g, {{-4, rng.cnormal()}, {1, rng.cnormal()}, {3, rng.cnormal()}, {6, rng.cnormal()}},
        false);
    for (int m = 0; m < 65; ++m) tr.snapshots.push_back(propagate_free(f, tr.dt * m * 0.4));
    Trajectory trc{g, 0.0, tr.dt, {}};
    for (const auto& s : tr.snapshots) trc.snapshots.push_back(sp::conj_field(s));

    const auto b1 = SpaceTimeBlock::whole(tr);
    const auto b2 = SpaceTimeBlock::whole(trc);
    for (double b : {0.0, 0.375, 0.5}) {
        const double x1 = xsb_norm(b1, 0.5, b, ModulationVariant::X);
        const double x2 = xsb_norm(b2, 0.5, b, ModulationVariant::X);
        CHECK(std::abs(x1 / x2 - 1.0) < 1e-10);
        const double z1 = xsb_norm(b1, 0.5, b, ModulationVariant::Z);
        const double z2 = xsb_norm(b2, 0.5, b, ModulationVariant::Z);
        CHECK(std::abs(z1 / z2 - 1.0) < 1e-10);
    }
}

TEST_CASE("free single mode concentrates at zero modulation") {
    // long aligned window so the b-weight acts as 1 up to window leakage
    const Grid g(16);
    const double t_len = 32.0 * std::numbers::pi;
    Trajectory tr = free_mode_trajectory(g, 1, t_len, 256);
    const auto block = SpaceTimeBlock::whole(tr);
    const double x00 = xsb_norm(block, 0.0, 0.0, ModulationVariant::X);
    CHECK(std::abs(x00 / (2.0 * std::numbers::pi * windowed_l2(block)) - 1.0) < 1e-12);
    for (double s : {0.0, 0.5})
        for (double b : {0.375, 0.5}) {
            const double x = xsb_norm(block, s, b, ModulationVariant::X);
            const double expect = std::pow(2.0, 0.5 * s) * x00;  // <1>^s = sqrt(2)^s
            CHECK(std::abs(x / expect - 1.0) < 1e-3);
        }
}

TEST_CASE("Z variant: inner l1 over xi, outer L2 over tau") {
    const Grid g(32);
    // single-mode fields make Z and X coincide
    Trajectory tr = free_mode_trajectory(g, 2, 1.0, 64);
    const auto block = SpaceTimeBlock::whole(tr);
    CHECK(xsb_norm(block, 0.3, 0.25, ModulationVariant::Z) ==
          Approx(xsb_norm(block, 0.3, 0.25, ModulationVariant::X)).epsilon(1e-13));

    // two x-modes sharing each tau row: l1 beats l2 by the row structure;
    // cross-check against a directly assembled reference
    ensemble::Rng rng(3);
    Trajectory tr2{g, 0.0, 1.0 / 64, {}};
    const auto f =
        PeriodicField::from_modes(g, {{1, rng.cnormal()}, {4, rng.cnormal()}}, false);
    for (int m = 0; m < 64; ++m) tr2.snapshots.push_back(propagate_free(f, tr2.dt * m));
    const auto b2 = SpaceTimeBlock::whole(tr2);
    const double z = xsb_norm(b2, 0.0, 0.0, ModulationVariant::Z);
    const double x = xsb_norm(b2, 0.0, 0.0, ModulationVariant::X);
    CHECK(z >= x);

    std::vector<double> tau;
    const auto hat = spacetime_transform(b2, &tau);
    const double d_tau = 2.0 * std::numbers::pi / b2.t_len();
    double acc = 0.0;
    for (std::size_t j = 0; j < tau.size(); ++j) {
        double row = 0.0;
        for (int xi = g.min_freq(); xi <= g.max_freq(); ++xi)
            row += std::abs(hat[j * 32 + static_cast<std::size_t>(xi + 16)]);
        acc += row * row;
    }
    CHECK(z == Approx(std::sqrt(acc * d_tau)).epsilon(1e-13));
}

TEST_CASE("Y norm is the sum of its two parts") {
    const Grid g(32);
    Trajectory tr = free_mode_trajectory(g, 3, 1.0, 64, 0.7);
    const auto block = SpaceTimeBlock::whole(tr);
    const double y = y_norm(block, 0.5);
    CHECK(y == xsb_norm(block, 0.5, 0.5, ModulationVariant::X) +
                   xsb_norm(block, 0.5, 0.0, ModulationVariant::Z));
    Trajectory zr{g, 0.0, 1.0 / 16, std::vector<PeriodicField>(16, PeriodicField::zero(g))};
    CHECK(y_norm(SpaceTimeBlock::whole(zr), 0.5) == 0.0);
}

TEST_CASE("Lebesgue-in-time norms") {
    const Grid g(32);
    Trajectory zr{g, 0.0, 0.1, std::vector<PeriodicField>(11, PeriodicField::zero(g))};
    CHECK(lp_lq_norm(zr, 4.0, 4.0) == 0.0);
    CHECK(lp_lq_norm(zr, std::numeric_limits<double>::infinity(), 2.0) == 0.0);

    // static field: L^p_t over [0,1] contributes T^{1/p} = 1
    Trajectory st{g, 0.0, 0.1, std::vector<PeriodicField>(11, cosine(g, 1))};
    const double l2x = std::sqrt(std::numbers::pi);  // ||cos||_{L^2}
    CHECK(lp_lq_norm(st, 2.0, 2.0) == Approx(l2x).epsilon(1e-12));
    CHECK(lp_lq_norm(st, std::numeric_limits<double>::infinity(), 2.0) ==
          Approx(l2x).epsilon(1e-12));
}

TEST_CASE("square-function sanity: L4 vs dyadic-block L4 ratio stays bounded") {
    // record the ratio ||u||_{L4_tx} / ||u||_{tilde L4_t L4_x} over random
    // modulated samples and check the sample stays in a tight band
    const Grid g(64);
    ensemble::Rng rng(21);
    std::vector<double> ratios;
    for (int trial = 0; trial < 20; ++trial) {
        Trajectory tr{g, 0.0, 1.0 / 32, {}};
        auto f = ensemble::random_complex_field(g, {.bandwidth = 8}, rng);
        for (int m = 0; m < 33; ++m) tr.snapshots.push_back(propagate_free(f, tr.dt * m));
        const double plain = lp_lq_norm(tr, 4.0, 4.0);
        const double tilde = tilde_norm(tr, 4.0, TildeInner::lq(4.0));
        ratios.push_back(plain / tilde);
    }
    std::sort(ratios.begin(), ratios.end());
    const double median = ratios[ratios.size() / 2];
    CHECK(ratios.back() <= 10.0 * median);
    CHECK(ratios.front() > 0.0);
}

TEST_CASE("dyadic tilde norms: single block and two separated blocks") {
    const Grid g(128);
    // mode 4 sits purely in block 3, mode 32 purely in block 6
    CHECK(sp::dyadic_multiplier(3, 4.0) == 1.0);
    CHECK(sp::dyadic_multiplier(6, 32.0) == 1.0);
    for (int k = 0; k <= 8; ++k) {
        if (k != 3) CHECK(sp::dyadic_multiplier(k, 4.0) == 0.0);
        if (k != 6) CHECK(sp::dyadic_multiplier(k, 32.0) == 0.0);
    }

    const double a = 0.7, b = 0.4;
    Trajectory single{g, 0.0, 0.1, std::vector<PeriodicField>(11, cosine(g, 4, a))};
    const auto inner = TildeInner::lq(2.0);
    CHECK(tilde_norm(single, std::numeric_limits<double>::infinity(), inner) ==
          Approx(lp_lq_norm(single, std::numeric_limits<double>::infinity(), 2.0))
              .epsilon(1e-12));

    Trajectory both{g, 0.0, 0.1,
                    std::vector<PeriodicField>(11, cosine(g, 4, a) + cosine(g, 32, b))};
    const double na = a * std::sqrt(std::numbers::pi);
    const double nb = b * std::sqrt(std::numbers::pi);
    CHECK(tilde_norm(both, std::numeric_limits<double>::infinity(), inner) ==
          Approx(std::sqrt(na * na + nb * nb)).epsilon(1e-12));
}
