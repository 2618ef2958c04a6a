#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nlai/analytic.hpp"
#include "nlai/errors.hpp"
#include "nlai/interferometer.hpp"
#include "nlai/optimize.hpp"
#include "support.hpp"

using namespace nlai;
using oracle::cplx;

namespace {
constexpr double pi = std::numbers::pi;

SequenceConfig make(int n, double tau, double tt, double alpha, double beta, double theta = 0) {
    SequenceConfig c;
    c.n_atoms = n;
    c.tau = tau;
    c.tau_tilde = tt;
    c.alpha = alpha;
    c.beta = beta;
    c.theta = theta;
    return c;
}

oracle::Vec dense_sequence(const SequenceConfig &c) {
    const auto sp = oracle::spin_matrices(c.n_atoms);
    const oracle::Mat gen = c.tau_tilde * sp.sy * sp.sy + c.theta * sp.sy;
    return oracle::expi(sp.sx, c.beta) * (cplx(0, -1) * gen).exp() * oracle::expi(sp.sx, c.alpha) *
           oracle::oat_state(c.n_atoms, c.tau);
}

SequenceConfig random_config(std::mt19937_64 &rng, int max_n) {
    std::uniform_int_distribution<int> n(2, max_n);
    std::uniform_real_distribution<double> u(-1, 1);
    return make(n(rng), 0.2 * std::abs(u(rng)), 0.05 * std::abs(u(rng)), pi * u(rng),
                pi / 2 * u(rng), pi * u(rng));
}
} // namespace

TEST(SequenceConfig, Validation) {
    EXPECT_THROW(make(1, 0, 0, 0, 0).validate(), InvalidInput);
    EXPECT_THROW(make(10, NAN, 0, 0, 0).validate(), InvalidInput);
    EXPECT_THROW(make(10, 0, 0, 0, INFINITY).validate(), InvalidInput);
    EXPECT_NO_THROW(make(2, 0, 0, 0, 0).validate());
}

TEST(RunSequence, TrivialIsCoherentState) {
    const auto out = run_sequence(make(25, 0, 0, 0, 0));
    const auto css = make_css(25, pi / 2, 0);
    for (std::size_t k = 0; k < out.dim(); ++k)
        EXPECT_LT(std::abs(out[k] - css[k]), 1e-12);
}

TEST(RunSequence, PhaseSignAtTwoAtoms) {
    for (double phi : {0.3, -1.2, 2.5}) {
        const auto c = make(2, 0, 0, 0, 0, phi);
        const auto out = run_sequence(c);
        EXPECT_NEAR(expectation_real(out, SpinOp::Sz), -std::sin(phi), 1e-12);
        EXPECT_LT(oracle::max_abs_diff(oracle::to_vec(out), dense_sequence(c)), 1e-12);
    }
    EXPECT_NEAR(expectation_real(run_sequence(make(40, 0, 0, 0, 0, 0.7)), SpinOp::Sz),
                -20 * std::sin(0.7), 1e-10);
}

TEST(RunSequence, MatchesDenseReference) {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 20; ++i) {
        const auto c = random_config(rng, 20);
        EXPECT_LT(oracle::max_abs_diff(oracle::to_vec(run_sequence(c)), dense_sequence(c)), 1e-10);
        EXPECT_NEAR(run_sequence(c).norm_squared(), 1.0, 1e-10);
    }
}

TEST(RunSequence, PulseAndConjugatedPathsAgree) {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 50; ++i) {
        const auto c = random_config(rng, 100);
        const auto a = run_sequence(c), b = run_sequence_pulses(c);
        double err = 0;
        for (std::size_t k = 0; k < a.dim(); ++k)
            err = std::max(err, std::abs(a[k] - b[k]));
        EXPECT_LT(err, 1e-10) << "n=" << c.n_atoms;
    }
}

TEST(RunSequence, ConjugationIdentityDense) {
    for (int n = 1; n <= 20; ++n) {
        const auto sp = oracle::spin_matrices(n);
        const double tt = 0.37, th = -1.1;
        const oracle::Mat rx = oracle::expi(sp.sx, pi / 2);
        const oracle::Mat lhs =
            rx.adjoint() * (cplx(0, -1) * (tt * sp.sz * sp.sz + th * sp.sz)).exp() * rx;
        const oracle::Mat rhs = (cplx(0, -1) * (tt * sp.sy * sp.sy + th * sp.sy)).exp();
        EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12) << n;
    }
}

TEST(GainAtZero, ShotNoiseReference) {
    const auto g = gain_at_zero(make(100, 0, 0, 0, 0));
    EXPECT_NEAR(g.gain, 1.0, 1e-12);
    EXPECT_NEAR(g.xi, 1.0, 1e-12);
    EXPECT_NEAR(g.delta_theta, 0.1, 1e-12);
}

TEST(GainAtZero, LinearOptimumNearCubeRoot) {
    const double a = alpha_H(1000, 0.012);
    const auto g = gain_at_zero(make(1000, 0.012, 0, a, 0));
    EXPECT_NEAR(g.gain, 10.0, 1.5);
    EXPECT_NEAR(g.gain, 1 / std::sqrt(xi2_closed(1000, 0.012)), 1e-6);
    EXPECT_NEAR(g.xi * g.gain, 1.0, 1e-6);
}

TEST(GainAtZero, WeakRegimeSecondOrder) {
    double prev = 0;
    for (int i = 0; i < 3; ++i) {
        const double tau = 1e-4 / std::pow(2.0, i);
        const double g = gain_at_zero(make(100, tau, tau, 0, 0.3)).gain;
        const double r = std::abs(g * g - weak_gain_squared(100, tau, tau, 0, 0.3));
        if (i > 0)
            EXPECT_GE(prev / r, 3.5);
        prev = r;
    }
}

TEST(GainAtZero, DegenerateOutput) {
    EXPECT_THROW(gain_at_zero(make(10, 0, 0, 0, pi / 2)), DegenerateStateError);
}

TEST(GainAtZero, ConsistencyWithSensitivity) {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 10; ++i) {
        auto c = random_config(rng, 200);
        c.beta = 0.5 * c.beta;
        c.theta = 0;
        const auto g = gain_at_zero(c);
        const auto s = sensitivity(c);
        EXPECT_NEAR(s.delta_theta * std::sqrt(c.n_atoms) * g.gain, 1.0, 1e-10);
        EXPECT_NEAR(g.delta_theta * std::sqrt(c.n_atoms) * g.gain, 1.0, 1e-12);
    }
}

TEST(Sensitivity, Examples) {
    EXPECT_NEAR(sensitivity(make(64, 0, 0, 0, 0)).delta_theta, 0.125, 1e-12);
    EXPECT_THROW(sensitivity(make(64, 0, 0, 0, 0, pi / 2)), NumericalError);
    OptimizationSpec spec;
    spec.alpha_mode = AlphaMode::scan;
    spec.alpha_grid = 30;
    const auto best = optimize_alpha_beta(make(500, 0.01, 0.002, 0, 0), spec).best;
    const auto s = sensitivity(make(500, 0.01, 0.002, best.alpha, best.beta));
    EXPECT_LT(s.delta_theta, 1 / std::sqrt(500.0));
    // Direct variance over squared slope.
    const auto out = run_sequence(make(500, 0.01, 0.002, best.alpha, best.beta));
    const double var = expectation_real(out, SpinOp::Sz2) - std::pow(expectation_real(out, SpinOp::Sz), 2);
    const double slope = slope_finite_difference(make(500, 0.01, 0.002, best.alpha, best.beta));
    EXPECT_NEAR(s.delta_theta, std::sqrt(var) / std::abs(slope), 1e-8);
}

TEST(Sensitivity, AwayFromZeroUsesFiniteDifference) {
    const auto c = make(30, 0, 0, 0, 0, 0.4);
    const auto s = sensitivity(c);
    // Coherent state: Delta theta stays at shot noise for any phase.
    EXPECT_NEAR(s.delta_theta, 1 / std::sqrt(30.0), 1e-8);
    EXPECT_NEAR(s.d_sz_d_theta, -15 * std::cos(0.4), 1e-8);
}

TEST(Slope, FiniteDifferenceMatchesAnalytic) {
    std::mt19937_64 rng(44);
    for (int i = 0; i < 10; ++i) {
        auto c = random_config(rng, 500);
        c.theta = 0;
        c.beta *= 0.5;
        const auto g = gain_at_zero(c);
        const double fd = slope_finite_difference(c);
        EXPECT_NEAR(fd / g.d_sz_d_theta, 1.0, 1e-6) << c.n_atoms;
        EXPECT_NEAR(g.d_sz_d_theta, -std::cos(c.beta) * g.sx_out, 1e-12 * c.n_atoms);
    }
}

TEST(SignalCurve, CoherentFringe) {
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i)
        grid.push_back(-pi + 2 * pi * i / 40);
    const auto pts = signal_curve(make(2, 0, 0, 0, 0), grid);
    ASSERT_EQ(pts.size(), grid.size());
    for (const auto &p : pts) {
        EXPECT_NEAR(p.sz_mean, -std::sin(p.theta), 1e-9);
        EXPECT_LE(std::abs(p.sz_mean), 1.0 + 1e-12);
    }
    EXPECT_THROW(signal_curve(make(2, 0, 0, 0, 0), std::vector<double>{}), InvalidInput);
}

TEST(SignalCurve, PeriodicAndBounded) {
    const auto c = make(60, 0.03, 0, 0.4, 0.2);
    std::vector<double> a, b;
    for (int i = 0; i < 25; ++i) {
        a.push_back(-3 + 0.25 * i);
        b.push_back(-3 + 0.25 * i + 2 * pi);
    }
    const auto pa = signal_curve(c, a), pb = signal_curve(c, b);
    for (std::size_t i = 0; i < pa.size(); ++i) {
        EXPECT_NEAR(pa[i].sz_mean, pb[i].sz_mean, 1e-10);
        EXPECT_NEAR(pa[i].sz_var, pb[i].sz_var, 1e-9);
        EXPECT_LE(std::abs(pa[i].sz_mean), 30.0);
        const auto out = run_sequence(make(60, 0.03, 0, 0.4, 0.2, a[i]));
        EXPECT_NEAR(pa[i].sz_mean, expectation_real(out, SpinOp::Sz), 1e-10);
    }
}

TEST(Engine, MatchesGainAtZero) {
    const SequenceEngine e(300, 0.02, 0.004);
    for (auto [a, b] : {std::pair{0.0, 0.0}, {0.7, -0.3}, {2.5, 1.2}}) {
        const auto x = e.evaluate(a, b);
        const auto y = gain_at_zero(make(300, 0.02, 0.004, a, b));
        EXPECT_NEAR(x.gain, y.gain, 1e-10 * y.gain);
        EXPECT_NEAR(x.xi, y.xi, 1e-10);
        EXPECT_NEAR(x.sx_out, y.sx_out, 1e-9);
    }
    const SequenceEngine s(120, 0.05, 0.01, KernelBackend::serial), p(120, 0.05, 0.01);
    EXPECT_EQ(s.evaluate(0.3, 0.1).gain, p.evaluate(0.3, 0.1).gain);
}

// Equal twisting and alpha = 0: the first-order term cancels.
TEST(WeakRegime, EqualTwistingCancelsFirstOrder) {
    const double beta = 0.3, c2 = std::cos(beta) * std::cos(beta);
    double prev = 0;
    for (int i = 0; i < 3; ++i) {
        const double tau = 1e-3 / std::pow(2.0, i);
        const double g = gain_at_zero(make(100, tau, tau, 0, beta)).gain;
        const double excess = std::abs(g * g - c2) / tau;
        if (i > 0)
            EXPECT_LT(excess, 0.6 * prev);
        prev = excess;
    }
}

TEST(TrapBuilder, DefaultTrap) {
    auto t = AtomTrapConfig::rb87_default();
    const auto c = sequence_from_trap(t, DensityModel::gaussian);
    const double half = tau_accumulated(t, DensityModel::gaussian, t.period() / 2);
    EXPECT_EQ(c.n_atoms, 1000);
    EXPECT_NEAR(c.tau, 2 * half, 1e-12);
    EXPECT_NEAR(c.tau_tilde, half, 1e-12);
    EXPECT_EQ(c.theta, 0.0);
    t.omega_z_tilde = 2 * pi * 80;
    EXPECT_NEAR(sequence_from_trap(t, DensityModel::gaussian).theta, gravity_phase(t), 1e-12);
}

TEST(GainCeiling, SampledConfigurations) {
    std::mt19937_64 rng(45);
    for (int i = 0; i < 30; ++i) {
        const auto c = random_config(rng, 300);
        const double g = gain_at_zero(c).gain;
        EXPECT_LE(g, std::cbrt(c.n_atoms) * 1.05);
    }
}
