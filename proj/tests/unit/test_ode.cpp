#include <gtest/gtest.h>

#include <cmath>

#include "mendel/error.hpp"
#include "mendel/ode.hpp"

using namespace mendel;

TEST(Ode, HermiteSegmentIsExactForCubics) {
    // x(t) = t^3 - 2t on [1, 2]
    auto x = [](double t) { return t * t * t - 2 * t; };
    auto dx = [](double t) { return 3 * t * t - 2; };
    Segment s;
    s.t0 = 1;
    s.t1 = 2;
    s.n0.fill(x(1));
    s.dn0.fill(dx(1));
    s.n1.fill(x(2));
    s.dn1.fill(dx(2));
    for (double t = 1; t <= 2; t += 0.125) EXPECT_NEAR(s.at(t)[3], x(t), 1e-13);
}

TEST(Ode, MonomorphicLogisticMatchesClosedForm) {
    // A single AA population follows dn/dt = (f - D) n - c n^2.
    const ModelParams p;
    const double r = p.f - p.D;
    const double n0 = 0.5;
    const auto traj = integrate(p, monomorphic_start(Genotype::AA, n0), 10.0, 1e-10);
    auto exact = [&](double t) { return r * n0 * std::exp(r * t) / (r + p.c * n0 * (std::exp(r * t) - 1.0)); };
    for (std::size_t i = 0; i < traj.size(); ++i)
        EXPECT_NEAR(traj.state(i)[index(Genotype::AA)], exact(traj.time(i)), 1e-8 * exact(traj.time(i)));
    // between nodes the cubic interpolant is fourth-order accurate
    for (const double t : {0.3, 1.05, 2.5, 9.99})
        EXPECT_NEAR(traj.at(t)[index(Genotype::AA)], exact(t), 1e-6 * exact(t));
    for (const auto& n : traj.states()) {
        EXPECT_EQ(n[0], 0.0);
        EXPECT_EQ(n[5], 0.0);
    }
}

TEST(Ode, ToleranceRefinementConverges) {
    const ModelParams p;
    const auto ic = second_mutation_preset(p, 0.01);
    const auto coarse = integrate(p, ic, 200.0, 1e-7);
    const auto fine = integrate(p, ic, 200.0, 1e-11);
    const auto a = coarse.at(200.0);
    const auto b = fine.at(200.0);
    for (std::size_t i = 0; i < kNumGenotypes; ++i) EXPECT_NEAR(a[i], b[i], 1e-5 * std::max(1e-3, b[i]));
}

TEST(Ode, StaysNonnegative) {
    const ModelParams p;
    const auto traj = integrate(p, second_mutation_preset(p, 0.001), 500.0, 1e-9);
    for (const auto& n : traj.states())
        for (const double x : n) EXPECT_GE(x, -1e-9 * 6.0);
}

TEST(Ode, PresetLayout) {
    const ModelParams p;
    const auto ic = second_mutation_preset(p, 0.01);
    EXPECT_DOUBLE_EQ(ic.n[0], 1e-4);
    EXPECT_DOUBLE_EQ(ic.n[1], 0.01);
    EXPECT_DOUBLE_EQ(ic.n[2], 5.29);
    EXPECT_EQ(ic.n[3], 0.0);
    EXPECT_DOUBLE_EQ(ic.n[4], 1e-6);
    EXPECT_EQ(ic.n[5], 0.0);
    EXPECT_THROW(second_mutation_preset(p, 0.0), ConfigError);
    EXPECT_THROW(second_mutation_preset(p, 6.0), ConfigError);
}

TEST(Ode, RejectsBadArguments) {
    const ModelParams p;
    const auto ic = monomorphic_start(Genotype::aa, 1.0);
    EXPECT_THROW(integrate(p, ic, -1.0, 1e-8), ConfigError);
    EXPECT_THROW(integrate(p, ic, 1.0, 1e-2), ConfigError);
    EXPECT_THROW(integrate(p, ic, 1.0, 1e-14), ConfigError);
    InitialCondition neg;
    neg.n[0] = -1.0;
    EXPECT_THROW(integrate(p, neg, 1.0, 1e-8), ConfigError);
}

TEST(Ode, ObserverCanStopEarly) {
    const ModelParams p;
    int calls = 0;
    const auto stats = integrate(p, monomorphic_start(Genotype::AA, 1.0).n, 100.0, IntegratorOptions{},
                                 [&](const Segment&) { return ++calls < 10; });
    EXPECT_TRUE(stats.stopped_by_observer);
    EXPECT_EQ(calls, 10);
    EXPECT_LT(stats.t_final, 100.0);
}

TEST(Ode, StepBudgetExhaustionIsNumericError) {
    const ModelParams p;
    IntegratorOptions o;
    o.max_steps = 5;
    EXPECT_THROW(integrate(p, monomorphic_start(Genotype::AA, 1.0).n, 100.0, o, nullptr), NumericError);
}
