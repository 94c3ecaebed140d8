#pragma once

// Birth and death rate vectors of the six-genotype system and the
// deterministic vector field F = b - d.
//
// The closed forms are templates over the scalar type so the analysis module can
// evaluate them on truncated Taylor jets; `double` is the everyday instantiation.

#include <array>

#include "mendel/genetics.hpp"

namespace mendel {

/// Genotype densities in canonical order (aa, aA, AA, aB, AB, BB).
template <class T>
using StateT = std::array<T, kNumGenotypes>;
using State = StateT<double>;

struct Pools {
    double sigma3 = 0.0;  ///< partners of phenotype a: aa + aA + AA
    double sigma5 = 0.0;  ///< partners of phenotype B: everything except aa
    double sigma6 = 0.0;  ///< partners of phenotype A: everything
};

Pools pools(const State& n) noexcept;

/// Nonnegative and finite in every coordinate.
bool is_valid_state(const State& n) noexcept;

namespace detail {

inline double scalar_value(double x) noexcept { return x; }

/// num / den, with an empty pool (den == 0) contributing nothing.
template <class T>
T pool_fraction(const T& num, const T& den) {
    if (scalar_value(den) == 0.0) return T(0.0);
    return num / den;
}

template <class T>
StateT<T> birth_rates_pooled(const StateT<T>& n, const ModelParams& p) {
    const T& aa = n[0];
    const T& aA = n[1];
    const T& AA = n[2];
    const T& aB = n[3];
    const T& AB = n[4];
    const T& BB = n[5];
    const double f = p.f;

    const T s3 = aa + aA + AA;
    const T s5 = aA + AA + aB + AB + BB;
    const T s6 = aa + aA + AA + aB + AB + BB;

    // Gametes contributed by each class of partners.
    const T half_aA = 0.5 * aA;
    const T half_aB = 0.5 * aB;
    const T half_AB = 0.5 * AB;
    const T B_gametes = half_aB + half_AB + BB;  // B alleles offered by the B phenotype

    StateT<T> b;
    b[0] = f * pool_fraction(aa * (aa + half_aA), s3) +
           f * pool_fraction(half_aB * (half_aA + half_aB), s5) +
           f * pool_fraction(half_aA * (aa + half_aA + half_aB), s6);
    b[1] = f * pool_fraction(aa * (half_aA + AA), s3) +
           f * pool_fraction(half_aA * (half_aB + half_AB) + half_aB * (AA + AB), s5) +
           f * pool_fraction((half_aA + AA) * (aa + aA + half_aB) + 0.25 * aA * AB, s6);
    b[2] = f * pool_fraction(half_AB * (half_aA + AA + half_AB), s5) +
           f * pool_fraction((half_aA + AA) * (half_aA + AA + half_AB), s6);
    b[3] = f * pool_fraction((half_aA + aB) * B_gametes, s5) +
           f * pool_fraction(half_aA * B_gametes, s6);
    b[4] = f * pool_fraction((half_aA + AA + AB) * B_gametes, s5) +
           f * pool_fraction((half_aA + AA) * B_gametes, s6);
    const T all_B = aB + AB + 2.0 * BB;
    b[5] = f * pool_fraction(0.25 * all_B * all_B, s5);
    return b;
}

/// Single mating pool: offspring follow Hardy-Weinberg proportions of the
/// population's gamete pool, scaled by the total birth rate f * Sigma6.
template <class T>
StateT<T> birth_rates_panmictic(const StateT<T>& n, const ModelParams& p) {
    const T s6 = n[0] + n[1] + n[2] + n[3] + n[4] + n[5];
    const T ga = n[0] + 0.5 * n[1] + 0.5 * n[3];
    const T gA = n[2] + 0.5 * n[1] + 0.5 * n[4];
    const T gB = n[5] + 0.5 * n[3] + 0.5 * n[4];
    const double f = p.f;
    StateT<T> b;
    b[0] = f * pool_fraction(ga * ga, s6);
    b[1] = f * pool_fraction(2.0 * ga * gA, s6);
    b[2] = f * pool_fraction(gA * gA, s6);
    b[3] = f * pool_fraction(2.0 * ga * gB, s6);
    b[4] = f * pool_fraction(2.0 * gA * gB, s6);
    b[5] = f * pool_fraction(gB * gB, s6);
    return b;
}

}  // namespace detail

template <class T>
StateT<T> birth_rates(const StateT<T>& n, const ModelParams& p) {
    return p.compat == Compatibility::all_with_all ? detail::birth_rates_panmictic(n, p)
                                                   : detail::birth_rates_pooled(n, p);
}

/// d_i = n_i (D_i + sum_j c_ij n_j).
template <class T>
StateT<T> death_rates(const StateT<T>& n, const ModelParams& p) {
    StateT<T> d;
    for (const auto gi : kGenotypes) {
        T pressure(natural_death_rate(gi, p));
        for (const auto gj : kGenotypes) {
            const double cij = competition_rate(gi, gj, p);
            if (cij != 0.0) pressure = pressure + cij * n[index(gj)];
        }
        d[index(gi)] = n[index(gi)] * pressure;
    }
    return d;
}

template <class T>
StateT<T> vector_field(const StateT<T>& n, const ModelParams& p) {
    const auto b = birth_rates(n, p);
    const auto d = death_rates(n, p);
    StateT<T> out;
    for (std::size_t i = 0; i < kNumGenotypes; ++i) out[i] = b[i] - d[i];
    return out;
}

/// Offspring production by direct enumeration of matings: each genotype
/// initiates at rate f n_i, picks a partner in its compatible pool with weight
/// proportional to fertility, and the offspring follows Mendelian segregation.
/// Independent of the closed forms above; used to validate them.
State birth_rates_oracle(const State& n, const ModelParams& p);

}  // namespace mendel
