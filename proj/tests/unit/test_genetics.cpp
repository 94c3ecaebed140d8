#include <gtest/gtest.h>

#include "mendel/error.hpp"
#include "mendel/genetics.hpp"
#include "mendel/keyvalue.hpp"

using namespace mendel;

TEST(Genetics, GenotypeOrderAndNames) {
    const char* expected[] = {"aa", "aA", "AA", "aB", "AB", "BB"};
    for (std::size_t i = 0; i < kNumGenotypes; ++i) {
        EXPECT_EQ(index(kGenotypes[i]), i);
        EXPECT_EQ(name(kGenotypes[i]), expected[i]);
        EXPECT_EQ(parse_genotype(expected[i]), kGenotypes[i]);
    }
    EXPECT_EQ(parse_genotype("Aa"), Genotype::aA);
    EXPECT_EQ(parse_genotype("BA"), Genotype::AB);
    EXPECT_FALSE(parse_genotype("ab").has_value());
    EXPECT_FALSE(parse_genotype("aaa").has_value());
}

TEST(Genetics, MakeGenotypeIsSymmetric) {
    for (const auto u : kAlleles)
        for (const auto v : kAlleles) {
            const auto g = make_genotype(u, v);
            EXPECT_EQ(g, make_genotype(v, u));
            const auto [x, y] = alleles(g);
            EXPECT_TRUE((x == u && y == v) || (x == v && y == u));
        }
}

TEST(Genetics, DominanceGivesPhenotype) {
    EXPECT_EQ(phenotype_of(Genotype::aa), Allele::a);
    EXPECT_EQ(phenotype_of(Genotype::aA), Allele::A);
    EXPECT_EQ(phenotype_of(Genotype::AA), Allele::A);
    EXPECT_EQ(phenotype_of(Genotype::aB), Allele::B);
    EXPECT_EQ(phenotype_of(Genotype::AB), Allele::B);
    EXPECT_EQ(phenotype_of(Genotype::BB), Allele::B);
}

TEST(Genetics, OffspringDistributionsAreQuarters) {
    for (const auto g1 : kGenotypes)
        for (const auto g2 : kGenotypes) {
            const auto d = mendel_offspring_dist(g1, g2);
            EXPECT_EQ(d.total_quarters(), 4);
            EXPECT_EQ(d, mendel_offspring_dist(g2, g1));
            // every offspring carries one allele of each parent
            for (const auto child : kGenotypes) {
                if (d.quarters[index(child)] == 0) continue;
                const auto [c1, c2] = alleles(child);
                const auto [p1, p2] = alleles(g1);
                const auto [q1, q2] = alleles(g2);
                const bool from1 = c1 == p1 || c1 == p2;
                const bool from2 = c2 == q1 || c2 == q2;
                const bool swapped1 = c2 == p1 || c2 == p2;
                const bool swapped2 = c1 == q1 || c1 == q2;
                EXPECT_TRUE((from1 && from2) || (swapped1 && swapped2));
            }
        }
    const auto d = mendel_offspring_dist(Genotype::aA, Genotype::aB);
    EXPECT_EQ(d.quarters[index(Genotype::aa)], 1);
    EXPECT_EQ(d.quarters[index(Genotype::aB)], 1);
    EXPECT_EQ(d.quarters[index(Genotype::aA)], 1);
    EXPECT_EQ(d.quarters[index(Genotype::AB)], 1);
    EXPECT_EQ(mendel_offspring_dist(Genotype::AA, Genotype::BB).quarters[index(Genotype::AB)], 4);
}

TEST(Genetics, DeathAndCompetitionRates) {
    ModelParams p;
    p.eta = 0.2;
    EXPECT_DOUBLE_EQ(natural_death_rate(Genotype::aa, p), 0.8);
    EXPECT_DOUBLE_EQ(natural_death_rate(Genotype::aA, p), 0.7);
    EXPECT_DOUBLE_EQ(natural_death_rate(Genotype::AB, p), 0.6);
    for (const auto g : kGenotypes)
        for (const auto h : kGenotypes) EXPECT_EQ(competition_rate(g, h, p), competition_rate(h, g, p));
    EXPECT_EQ(competition_rate(Genotype::aa, Genotype::BB, p), 0.0);
    EXPECT_EQ(competition_rate(Genotype::aa, Genotype::aB, p), 0.0);
    EXPECT_DOUBLE_EQ(competition_rate(Genotype::aA, Genotype::BB, p), 0.8);
    EXPECT_EQ(competition_rate(Genotype::aA, Genotype::AB, p), 1.0);
    p.c_aB = 0.3;
    EXPECT_EQ(competition_rate(Genotype::aa, Genotype::AB, p), 0.3);
}

TEST(Genetics, Compatibility) {
    ModelParams p;
    EXPECT_FALSE(compatible(Genotype::aa, Genotype::aB, p));
    EXPECT_FALSE(compatible(Genotype::BB, Genotype::aa, p));
    EXPECT_TRUE(compatible(Genotype::aA, Genotype::BB, p));
    EXPECT_TRUE(compatible(Genotype::aa, Genotype::aA, p));
    p.compat = Compatibility::all_with_all;
    EXPECT_TRUE(compatible(Genotype::aa, Genotype::BB, p));
}

TEST(Genetics, EquilibriaAndInvasionFitness) {
    const ModelParams p;
    const auto eq = equilibria(p);
    EXPECT_NEAR(eq.a, 5.2, 1e-14);
    EXPECT_NEAR(eq.A, 5.3, 1e-14);
    EXPECT_NEAR(eq.B, 5.4, 1e-14);
    EXPECT_NEAR(invasion_fitness(Genotype::aA, Allele::a, p), p.delta, 1e-14);
    EXPECT_NEAR(invasion_fitness(Genotype::AB, Allele::A, p), p.delta, 1e-14);
    EXPECT_NEAR(invasion_fitness(Genotype::aa, Allele::A, p), -p.delta, 1e-14);
    EXPECT_THROW(invasion_fitness(Genotype::aa, Genotype::aA, p), ConfigError);
}

TEST(Genetics, ValidateRejectsOutOfRange) {
    ModelParams p;
    EXPECT_NO_THROW(p.validate());
    auto bad = [](auto mutate) {
        ModelParams q;
        mutate(q);
        EXPECT_THROW(q.validate(), ConfigError);
    };
    bad([](ModelParams& q) { q.delta = 0.0; });
    bad([](ModelParams& q) { q.delta = 0.8; });
    bad([](ModelParams& q) { q.D = 7.0; });
    bad([](ModelParams& q) { q.eta = 1.0; });
    bad([](ModelParams& q) { q.eta = -0.1; });
    bad([](ModelParams& q) { q.c_aB = -1.0; });
    bad([](ModelParams& q) { q.mu = 1.5; });
    bad([](ModelParams& q) { q.K = 0; });
    bad([](ModelParams& q) { q.f = std::numeric_limits<double>::quiet_NaN(); });
}

TEST(Genetics, ConfigRoundTrip) {
    ModelParams p;
    p.f = 200;
    p.eta = 0.1 + 0.2;
    p.c_aB = 1.0 / 3.0;
    p.compat = Compatibility::all_with_all;
    p.K = 12345;
    const auto q = params_from_config(params_to_config(p));
    EXPECT_EQ(q.f, p.f);
    EXPECT_EQ(q.eta, p.eta);
    EXPECT_EQ(q.c_aB, p.c_aB);
    EXPECT_EQ(q.compat, p.compat);
    EXPECT_EQ(q.K, p.K);
    EXPECT_THROW(params_from_config("bogus = 1\n"), ConfigError);
    EXPECT_THROW(params_from_config("f = x\n"), ConfigError);
    EXPECT_THROW(params_from_config("f = 1\nf = 2\n"), ConfigError);
    EXPECT_THROW(params_from_config("compat = sometimes\n"), ConfigError);
}

TEST(KeyValue, ParsesCommentsAndWhitespace) {
    const auto kv = parse_key_values("# header\n  a = 1 \n\nb=two # trailing\n");
    ASSERT_EQ(kv.size(), 2u);
    EXPECT_EQ(kv.at("a"), "1");
    EXPECT_EQ(kv.at("b"), "two");
    EXPECT_THROW(parse_key_values("no equals sign\n"), ConfigError);
    EXPECT_EQ(parse_integer("K", "1e5"), 100000);
    EXPECT_THROW(parse_integer("K", "1.5"), ConfigError);
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}
