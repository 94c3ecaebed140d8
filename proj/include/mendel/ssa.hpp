#pragma once

// Exact stochastic simulation of the individual-based process at scale K.
//
// Twelve channels: each genotype initiates a mating at rate f N_i and dies at
// rate N_i (D_i + sum_j c_ij N_j / K). A mating picks a partner uniformly among
// the compatible individuals (the initiator included) and the offspring
// follows Mendelian segregation, optionally mutated one step upward.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "mendel/rates.hpp"

namespace mendel {

using Counts = std::array<std::int64_t, kNumGenotypes>;

/// Rounds K * n componentwise (half away from zero). Throws ConfigError on
/// negative or non-finite densities.
Counts counts_from_densities(const State& n, std::int64_t K);
State densities(const Counts& N, std::int64_t K);
std::int64_t total(const Counts& N);

struct EventRates {
    State initiation{};  ///< mating initiations by genotype of the initiator
    State offspring{};   ///< expected births by offspring genotype, mutation ignored
    State death{};
    double total() const noexcept;  ///< initiation + death, the jump rate
};

/// Rates at scale K; offspring / K equals birth_rates(N / K) and death / K
/// equals death_rates(N / K).
EventRates event_rates(const Counts& N, const ModelParams& p);

enum class SsaEventKind : std::uint8_t { birth, death, mutant_birth };
std::string_view name(SsaEventKind k) noexcept;

struct LoggedEvent {
    double t = 0.0;
    SsaEventKind kind = SsaEventKind::birth;
    Genotype genotype = Genotype::aa;  ///< individual born or removed
    Genotype source = Genotype::aa;    ///< pre-mutation genotype for mutant births
};

enum class SimulationStatus { completed, absorbed, capped, stopped };
std::string_view name(SimulationStatus s) noexcept;

struct SimulationOptions {
    std::uint64_t seed = 1;
    /// Sorted sample times in [0, t_max]; the state in force at each time is recorded.
    std::vector<double> sample_times;
    bool log_events = false;
    /// Total population that aborts the run; 0 selects 100 * K * nbar_B.
    double population_cap = 0.0;
    /// Scan order of the 12 channels (0-5 initiation, 6-11 death). Does not
    /// change the law of the process.
    std::array<int, 12> channel_order{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
    /// Evaluated after every event; returning true ends the run.
    std::function<bool(double, const Counts&)> stop;
    std::uint64_t max_events = 0;  ///< 0 means unlimited
};

struct SimulationResult {
    std::vector<double> sample_times;
    std::vector<Counts> samples;
    std::vector<LoggedEvent> log;
    SimulationStatus status = SimulationStatus::completed;
    double t_final = 0.0;
    std::uint64_t events = 0;
    Counts final_counts{};
};

/// Throws ConfigError on invalid parameters, t_max <= 0, unsorted sample times
/// or a channel order that is not a permutation.
SimulationResult simulate(const ModelParams& p, const Counts& init, double t_max, const SimulationOptions& options);

/// Evenly spaced grid 0, dt, 2 dt, ... up to t_max inclusive.
std::vector<double> uniform_grid(double t_max, double dt);

struct GapQuantiles {
    std::int64_t K = 0;
    std::vector<double> gaps;  ///< one sup-norm gap per seed
    double q10 = 0.0, median = 0.0, q90 = 0.0;
};

struct LlnOptions {
    std::uint64_t base_seed = 1;
    int seeds = 16;
    double grid_dt = 0.01;
    unsigned threads = 0;  ///< 0 selects std::thread::hardware_concurrency
};

/// sup over the sampling grid in [0, t_horizon] of |N(t)/K - n(t)|_inf, with
/// n the ODE solution from x0 and N started at round(K x0); one value per seed,
/// seeds base_seed, base_seed + 1, ...
std::vector<GapQuantiles> lln_gap(const ModelParams& p, const State& x0, double t_horizon,
                                  const std::vector<std::int64_t>& Ks, const LlnOptions& options);

/// Count version of the second-mutation preset, K * (eps^2, eps, nbar_A - eps, 0, eps^3, 0)
/// rounded, with the AB count raised to at least `min_AB_founders`.
Counts second_mutation_counts(const ModelParams& p, double eps, std::int64_t min_AB_founders = 0);

enum class InvasionOutcome { recovered, lost_a, lost_B, undecided };
std::string_view name(InvasionOutcome o) noexcept;

struct InvasionTrial {
    InvasionOutcome outcome = InvasionOutcome::undecided;
    SimulationResult result;
};

/// Runs until N_aa exceeds K nbar_a / 2 (recovered), allele a is gone from
/// aa, aA and aB (lost_a), phenotype B is gone (lost_B), or t_max. Any `stop`
/// already set in `options` is replaced.
InvasionTrial invasion_trial(const ModelParams& p, const Counts& init, double t_max, SimulationOptions options);

/// Runs `count` jobs on up to `threads` worker threads (0: hardware concurrency).
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& job);

}  // namespace mendel
