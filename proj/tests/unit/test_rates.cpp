#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "mendel/rates.hpp"

using namespace mendel;

namespace {

State random_state(std::mt19937_64& rng, double scale = 6.0) {
    std::uniform_real_distribution<double> u(0.0, scale);
    std::bernoulli_distribution zero(0.15);
    State n;
    for (auto& x : n) x = zero(rng) ? 0.0 : u(rng);
    return n;
}

double sum(const State& n) { return std::accumulate(n.begin(), n.end(), 0.0); }

}  // namespace

TEST(Rates, Pools) {
    const State n{1, 2, 3, 4, 5, 6};
    const auto s = pools(n);
    EXPECT_EQ(s.sigma3, 6);
    EXPECT_EQ(s.sigma5, 20);
    EXPECT_EQ(s.sigma6, 21);
}

TEST(Rates, ClosedFormsMatchMatingEnumeration) {
    std::mt19937_64 rng(7);
    for (const auto mode : {Compatibility::no_reproduction_a_B, Compatibility::all_with_all}) {
        ModelParams p;
        p.compat = mode;
        for (int trial = 0; trial < 2000; ++trial) {
            p.f = 1.0 + 10.0 * (trial % 7);
            const auto n = random_state(rng);
            const auto closed = birth_rates(n, p);
            const auto oracle = birth_rates_oracle(n, p);
            for (std::size_t i = 0; i < kNumGenotypes; ++i)
                ASSERT_NEAR(closed[i], oracle[i], 1e-12 * std::max(1.0, std::fabs(oracle[i])))
                    << "genotype " << name(kGenotypes[i]) << " trial " << trial;
        }
    }
}

TEST(Rates, TotalBirthsEqualFertilityTimesInitiators) {
    std::mt19937_64 rng(11);
    const ModelParams p;
    for (int trial = 0; trial < 500; ++trial) {
        auto n = random_state(rng);
        n[index(Genotype::AA)] += 0.1;  // every pool nonempty
        EXPECT_NEAR(sum(birth_rates(n, p)), p.f * sum(n), 1e-11 * sum(n));
    }
}

TEST(Rates, EmptyPoolsContributeNothing) {
    const ModelParams p;
    const State zero{};
    for (const double x : birth_rates(zero, p)) EXPECT_EQ(x, 0.0);
    for (const double x : vector_field(zero, p)) EXPECT_EQ(x, 0.0);

    // aa alone next to B-phenotypes: no a-B matings, so no aB offspring.
    const State n{2.0, 0, 0, 0, 0, 3.0};
    const auto b = birth_rates(n, p);
    EXPECT_NEAR(b[index(Genotype::aa)], p.f * 2.0, 1e-14);
    EXPECT_NEAR(b[index(Genotype::BB)], p.f * 3.0, 1e-14);
    EXPECT_EQ(b[index(Genotype::aB)], 0.0);
}

TEST(Rates, NoBAllelesMeansNoBOffspring) {
    std::mt19937_64 rng(3);
    const ModelParams p;
    for (int trial = 0; trial < 200; ++trial) {
        auto n = random_state(rng);
        n[3] = n[4] = n[5] = 0.0;
        const auto b = birth_rates(n, p);
        EXPECT_EQ(b[3], 0.0);
        EXPECT_EQ(b[4], 0.0);
        EXPECT_EQ(b[5], 0.0);
    }
}

TEST(Rates, HomozygousEquilibriaAreFixedPoints) {
    ModelParams p;
    p.eta = 0.3;
    const auto eq = equilibria(p);
    for (const auto u : kAlleles) {
        State n{};
        n[index(make_genotype(u, u))] = eq.of(u);
        for (const double x : vector_field(n, p)) EXPECT_NEAR(x, 0.0, 1e-13);
    }
}

TEST(Rates, DeathRatesFollowCompetitionMatrix) {
    ModelParams p;
    p.eta = 0.25;
    const State n{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    const auto d = death_rates(n, p);
    // aA competes with everything at c except BB at c - eta.
    const double pressure_aA = p.D + p.c * (sum(n) - n[5]) + (p.c - p.eta) * n[5];
    EXPECT_NEAR(d[1], n[1] * pressure_aA, 1e-13);
    // aa ignores the B phenotype when c_aB = 0.
    EXPECT_NEAR(d[0], n[0] * (p.D + p.delta + p.c * (n[0] + n[1] + n[2])), 1e-13);
    EXPECT_NEAR(d[5], n[5] * (p.D - p.delta + p.c * (n[2] + n[3] + n[4] + n[5]) + (p.c - p.eta) * n[1]), 1e-13);
}
