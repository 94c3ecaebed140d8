#pragma once

// Allele / genotype / phenotype algebra for the three-allele diploid model,
// demographic parameters and the closed-form quantities derived from them.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace mendel {

/// Alleles in ascending order of dominance: a < A < B.
enum class Allele : std::uint8_t { a = 0, A = 1, B = 2 };

/// Unordered allele pairs, indexed in the fixed order used by every state
/// vector in the library: (aa, aA, AA, aB, AB, BB).
enum class Genotype : std::uint8_t { aa = 0, aA = 1, AA = 2, aB = 3, AB = 4, BB = 5 };

inline constexpr std::size_t kNumGenotypes = 6;

inline constexpr std::array<Genotype, kNumGenotypes> kGenotypes{
    Genotype::aa, Genotype::aA, Genotype::AA, Genotype::aB, Genotype::AB, Genotype::BB};

inline constexpr std::array<Allele, 3> kAlleles{Allele::a, Allele::A, Allele::B};

constexpr std::size_t index(Genotype g) noexcept { return static_cast<std::size_t>(g); }
constexpr int rank(Allele u) noexcept { return static_cast<int>(u); }

/// Canonical genotype of an (ordered) allele pair; u1u2 and u2u1 are identified.
constexpr Genotype make_genotype(Allele u1, Allele u2) noexcept {
    const int lo = rank(u1) < rank(u2) ? rank(u1) : rank(u2);
    const int hi = rank(u1) < rank(u2) ? rank(u2) : rank(u1);
    // aa aA AA aB AB BB  <->  (0,0) (0,1) (1,1) (0,2) (1,2) (2,2)
    return static_cast<Genotype>(hi * (hi + 1) / 2 + lo);
}

/// Allele pair of a genotype, lower rank first.
constexpr std::pair<Allele, Allele> alleles(Genotype g) noexcept {
    constexpr std::array<std::pair<Allele, Allele>, kNumGenotypes> table{{
        {Allele::a, Allele::a},
        {Allele::a, Allele::A},
        {Allele::A, Allele::A},
        {Allele::a, Allele::B},
        {Allele::A, Allele::B},
        {Allele::B, Allele::B},
    }};
    return table[index(g)];
}

/// Dominance class: the highest-ranked allele carried.
constexpr Allele phenotype_of(Genotype g) noexcept { return alleles(g).second; }

constexpr bool is_homozygous(Genotype g) noexcept {
    const auto [u1, u2] = alleles(g);
    return u1 == u2;
}

std::string_view name(Genotype g) noexcept;
std::string_view name(Allele u) noexcept;
std::optional<Genotype> parse_genotype(std::string_view text) noexcept;

/// Offspring distribution of one mating, in exact quarters: entry g holds the
/// number of the four equally likely allele draws that produce genotype g.
struct OffspringDist {
    std::array<std::uint8_t, kNumGenotypes> quarters{};

    double probability(Genotype g) const noexcept { return quarters[index(g)] / 4.0; }
    int total_quarters() const noexcept;
    friend bool operator==(const OffspringDist&, const OffspringDist&) = default;
};

/// Mendelian segregation: one allele drawn uniformly from each parent.
OffspringDist mendel_offspring_dist(Genotype g1, Genotype g2) noexcept;

enum class Compatibility {
    no_reproduction_a_B,  ///< phenotypes a and B never mate
    all_with_all,         ///< every pair of genotypes may mate
};

std::string_view name(Compatibility mode) noexcept;
std::optional<Compatibility> parse_compatibility(std::string_view text) noexcept;

/// Demographic parameters. Rates are per unit time; competition acts on
/// densities (counts divided by K).
struct ModelParams {
    double f = 6.0;       ///< fertility, identical for all genotypes
    double D = 0.7;       ///< natural death rate of phenotype A
    double delta = 0.1;   ///< death-rate increment: a dies at D+delta, B at D-delta
    double c = 1.0;       ///< competition rate
    double eta = 0.0;     ///< competition reduction between aA and BB
    double c_aB = 0.0;    ///< competition between phenotypes a and B
    Compatibility compat = Compatibility::no_reproduction_a_B;
    std::int64_t K = 1000;  ///< carrying capacity (stochastic runs only)
    double mu = 0.0;        ///< mutation probability per birth (stochastic runs only)

    /// Throws ConfigError unless 0 < delta < D < f, 0 <= eta < c, c_aB >= 0,
    /// 0 <= mu <= 1 and K >= 1.
    void validate() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

double natural_death_rate(Genotype g, const ModelParams& p) noexcept;

/// Competition felt by g1 from g2.
double competition_rate(Genotype g1, Genotype g2, const ModelParams& p) noexcept;

/// Reproductive compatibility R_{g1}(g2).
bool compatible(Genotype g1, Genotype g2, const ModelParams& p) noexcept;

/// Monomorphic equilibrium densities (f - D_uu) / c_uu,uu.
struct Equilibria {
    double a = 0.0;
    double A = 0.0;
    double B = 0.0;

    double of(Allele u) const noexcept;
};

Equilibria equilibria(const ModelParams& p) noexcept;

/// Initial growth rate of a rare `mutant` in a resident homozygous population at
/// its monomorphic equilibrium. Throws ConfigError for a heterozygous resident.
double invasion_fitness(Genotype mutant, Genotype resident, const ModelParams& p);
double invasion_fitness(Genotype mutant, Allele resident, const ModelParams& p);

/// Plain-text `key = value` serialization of ModelParams. Unknown keys are
/// rejected by `params_from_config`.
std::string params_to_config(const ModelParams& p);
ModelParams params_from_config(std::string_view text);

}  // namespace mendel
