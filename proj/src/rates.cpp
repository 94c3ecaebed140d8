#include "mendel/rates.hpp"

#include <cmath>

namespace mendel {

Pools pools(const State& n) noexcept {
    const double s3 = n[0] + n[1] + n[2];
    const double s5 = n[1] + n[2] + n[3] + n[4] + n[5];
    return {s3, s5, s3 + n[3] + n[4] + n[5]};
}

bool is_valid_state(const State& n) noexcept {
    for (const double x : n)
        if (!std::isfinite(x) || x < 0.0) return false;
    return true;
}

State birth_rates_oracle(const State& n, const ModelParams& p) {
    State b{};
    for (const auto initiator : kGenotypes) {
        const double n_i = n[index(initiator)];
        if (n_i == 0.0) continue;

        // Fertility-weighted mass of the initiator's pool of potential partners.
        double pool_mass = 0.0;
        for (const auto partner : kGenotypes)
            if (compatible(initiator, partner, p)) pool_mass += p.f * n[index(partner)];
        if (pool_mass == 0.0) continue;

        const double initiation_rate = p.f * n_i;
        for (const auto partner : kGenotypes) {
            if (!compatible(initiator, partner, p)) continue;
            const double choice = p.f * n[index(partner)] / pool_mass;
            if (choice == 0.0) continue;
            const auto dist = mendel_offspring_dist(initiator, partner);
            for (const auto child : kGenotypes)
                b[index(child)] += initiation_rate * choice * dist.probability(child);
        }
    }
    return b;
}

}  // namespace mendel
