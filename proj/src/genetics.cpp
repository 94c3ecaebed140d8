#include "mendel/genetics.hpp"

#include <cmath>
#include <sstream>

#include "mendel/error.hpp"
#include "mendel/keyvalue.hpp"

namespace mendel {

std::string_view name(Genotype g) noexcept {
    constexpr std::array<std::string_view, kNumGenotypes> names{"aa", "aA", "AA", "aB", "AB", "BB"};
    return names[index(g)];
}

std::string_view name(Allele u) noexcept {
    constexpr std::array<std::string_view, 3> names{"a", "A", "B"};
    return names[static_cast<std::size_t>(rank(u))];
}

std::optional<Genotype> parse_genotype(std::string_view text) noexcept {
    for (const auto g : kGenotypes)
        if (name(g) == text) return g;
    // Accept the reversed spelling of heterozygotes ("Aa", "Ba", "BA").
    if (text.size() == 2) {
        std::optional<Allele> u1, u2;
        for (const auto u : kAlleles) {
            if (name(u)[0] == text[0]) u1 = u;
            if (name(u)[0] == text[1]) u2 = u;
        }
        if (u1 && u2) return make_genotype(*u1, *u2);
    }
    return std::nullopt;
}

int OffspringDist::total_quarters() const noexcept {
    int sum = 0;
    for (const auto q : quarters) sum += q;
    return sum;
}

OffspringDist mendel_offspring_dist(Genotype g1, Genotype g2) noexcept {
    OffspringDist dist;
    const auto [u1, u2] = alleles(g1);
    const auto [v1, v2] = alleles(g2);
    for (const auto u : {u1, u2})
        for (const auto v : {v1, v2}) ++dist.quarters[index(make_genotype(u, v))];
    return dist;
}

std::string_view name(Compatibility mode) noexcept {
    switch (mode) {
        case Compatibility::no_reproduction_a_B: return "no-reproduction-a-B";
        case Compatibility::all_with_all: return "all-with-all";
    }
    return "?";
}

std::optional<Compatibility> parse_compatibility(std::string_view text) noexcept {
    if (text == "no-reproduction-a-B" || text == "no-reproduction") return Compatibility::no_reproduction_a_B;
    if (text == "all-with-all") return Compatibility::all_with_all;
    return std::nullopt;
}

void ModelParams::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError("invalid parameters: " + what);
    };
    for (const double v : {f, D, delta, c, eta, c_aB, mu})
        require(std::isfinite(v), "all parameters must be finite");
    require(delta > 0.0, "delta > 0 required");
    require(delta < D, "delta < D required");
    require(D < f, "D < f required");
    require(eta >= 0.0, "eta >= 0 required");
    require(eta < c, "eta < c required");
    require(c_aB >= 0.0, "c_aB >= 0 required");
    require(mu >= 0.0 && mu <= 1.0, "0 <= mu <= 1 required");
    require(K >= 1, "K >= 1 required");
}

double natural_death_rate(Genotype g, const ModelParams& p) noexcept {
    switch (phenotype_of(g)) {
        case Allele::a: return p.D + p.delta;
        case Allele::A: return p.D;
        case Allele::B: return p.D - p.delta;
    }
    return p.D;
}

double competition_rate(Genotype g1, Genotype g2, const ModelParams& p) noexcept {
    const auto ph1 = phenotype_of(g1);
    const auto ph2 = phenotype_of(g2);
    if ((ph1 == Allele::a && ph2 == Allele::B) || (ph1 == Allele::B && ph2 == Allele::a)) return p.c_aB;
    if ((g1 == Genotype::aA && g2 == Genotype::BB) || (g1 == Genotype::BB && g2 == Genotype::aA))
        return p.c - p.eta;
    return p.c;
}

bool compatible(Genotype g1, Genotype g2, const ModelParams& p) noexcept {
    if (p.compat == Compatibility::all_with_all) return true;
    const auto ph1 = phenotype_of(g1);
    const auto ph2 = phenotype_of(g2);
    return !((ph1 == Allele::a && ph2 == Allele::B) || (ph1 == Allele::B && ph2 == Allele::a));
}

double Equilibria::of(Allele u) const noexcept {
    switch (u) {
        case Allele::a: return a;
        case Allele::A: return A;
        case Allele::B: return B;
    }
    return 0.0;
}

Equilibria equilibria(const ModelParams& p) noexcept {
    auto level = [&](Allele u) {
        const auto g = make_genotype(u, u);
        return (p.f - natural_death_rate(g, p)) / competition_rate(g, g, p);
    };
    return {level(Allele::a), level(Allele::A), level(Allele::B)};
}

double invasion_fitness(Genotype mutant, Genotype resident, const ModelParams& p) {
    if (!is_homozygous(resident))
        throw ConfigError("invasion fitness needs a monomorphic (homozygous) resident, got " +
                          std::string(name(resident)));
    const double resident_density = equilibria(p).of(alleles(resident).first);
    return p.f - natural_death_rate(mutant, p) - competition_rate(mutant, resident, p) * resident_density;
}

double invasion_fitness(Genotype mutant, Allele resident, const ModelParams& p) {
    return invasion_fitness(mutant, make_genotype(resident, resident), p);
}

std::string params_to_config(const ModelParams& p) {
    std::ostringstream out;
    out << "f = " << format_double(p.f) << '\n'
        << "D = " << format_double(p.D) << '\n'
        << "delta = " << format_double(p.delta) << '\n'
        << "c = " << format_double(p.c) << '\n'
        << "eta = " << format_double(p.eta) << '\n'
        << "c_aB = " << format_double(p.c_aB) << '\n'
        << "compat = " << name(p.compat) << '\n'
        << "K = " << p.K << '\n'
        << "mu = " << format_double(p.mu) << '\n';
    return out.str();
}

ModelParams params_from_config(std::string_view text) {
    ModelParams p;
    for (const auto& [key, value] : parse_key_values(text)) {
        if (key == "f") p.f = parse_double(key, value);
        else if (key == "D") p.D = parse_double(key, value);
        else if (key == "delta") p.delta = parse_double(key, value);
        else if (key == "c") p.c = parse_double(key, value);
        else if (key == "eta") p.eta = parse_double(key, value);
        else if (key == "c_aB") p.c_aB = parse_double(key, value);
        else if (key == "K") p.K = parse_integer(key, value);
        else if (key == "mu") p.mu = parse_double(key, value);
        else if (key == "compat") {
            const auto mode = parse_compatibility(value);
            if (!mode) throw ConfigError("unknown compatibility mode '" + value + "'");
            p.compat = *mode;
        } else {
            throw ConfigError("unknown parameter key '" + key + "'");
        }
    }
    return p;
}

}  // namespace mendel
