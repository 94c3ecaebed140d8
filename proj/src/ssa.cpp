#include "mendel/ssa.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "mendel/error.hpp"
#include "mendel/ode.hpp"

namespace mendel {

Counts counts_from_densities(const State& n, std::int64_t K) {
    Counts N{};
    for (std::size_t i = 0; i < kNumGenotypes; ++i) {
        if (!std::isfinite(n[i]) || n[i] < 0.0) throw ConfigError("densities must be finite and nonnegative");
        N[i] = std::llround(static_cast<double>(K) * n[i]);
    }
    return N;
}

State densities(const Counts& N, std::int64_t K) {
    State n;
    for (std::size_t i = 0; i < kNumGenotypes; ++i) n[i] = static_cast<double>(N[i]) / static_cast<double>(K);
    return n;
}

std::int64_t total(const Counts& N) { return std::accumulate(N.begin(), N.end(), std::int64_t{0}); }

double EventRates::total() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < kNumGenotypes; ++i) s += initiation[i] + death[i];
    return s;
}

namespace {

double partner_pool(const Counts& N, Genotype g, const ModelParams& p) {
    double pool = 0.0;
    for (const auto h : kGenotypes)
        if (compatible(g, h, p)) pool += static_cast<double>(N[index(h)]);
    return pool;
}

}  // namespace

EventRates event_rates(const Counts& N, const ModelParams& p) {
    EventRates r;
    const double K = static_cast<double>(p.K);
    for (const auto gi : kGenotypes) {
        const double Ni = static_cast<double>(N[index(gi)]);
        if (Ni == 0.0) continue;
        r.initiation[index(gi)] = p.f * Ni;

        const double pool = partner_pool(N, gi, p);
        for (const auto gj : kGenotypes) {
            if (!compatible(gi, gj, p) || N[index(gj)] == 0) continue;
            const double choice = static_cast<double>(N[index(gj)]) / pool;
            const auto dist = mendel_offspring_dist(gi, gj);
            for (const auto child : kGenotypes)
                r.offspring[index(child)] += p.f * Ni * choice * dist.probability(child);
        }

        double pressure = natural_death_rate(gi, p);
        for (const auto gj : kGenotypes)
            pressure += competition_rate(gi, gj, p) * static_cast<double>(N[index(gj)]) / K;
        r.death[index(gi)] = Ni * pressure;
    }
    return r;
}

std::string_view name(SsaEventKind k) noexcept {
    switch (k) {
        case SsaEventKind::birth: return "birth";
        case SsaEventKind::death: return "death";
        case SsaEventKind::mutant_birth: return "mutant-birth";
    }
    return "?";
}

std::string_view name(SimulationStatus s) noexcept {
    switch (s) {
        case SimulationStatus::completed: return "completed";
        case SimulationStatus::absorbed: return "absorbed";
        case SimulationStatus::capped: return "capped";
        case SimulationStatus::stopped: return "stopped";
    }
    return "?";
}

SimulationResult simulate(const ModelParams& p, const Counts& init, double t_max, const SimulationOptions& options) {
    p.validate();
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("simulate: t_max must be positive and finite");
    for (const auto x : init)
        if (x < 0) throw ConfigError("simulate: counts must be nonnegative");
    if (!std::is_sorted(options.sample_times.begin(), options.sample_times.end()))
        throw ConfigError("simulate: sample times must be sorted");
    for (const double t : options.sample_times)
        if (!(t >= 0.0 && t <= t_max)) throw ConfigError("simulate: sample times must lie in [0, t_max]");
    {
        auto order = options.channel_order;
        std::sort(order.begin(), order.end());
        for (int i = 0; i < 12; ++i)
            if (order[static_cast<std::size_t>(i)] != i)
                throw ConfigError("simulate: channel order must be a permutation of 0..11");
    }

    const double K = static_cast<double>(p.K);
    const double cap = options.population_cap > 0.0 ? options.population_cap : 100.0 * K * equilibria(p).B;

    // Per-genotype tables that do not depend on the state.
    std::array<std::array<double, kNumGenotypes>, kNumGenotypes> c{};
    std::array<std::array<bool, kNumGenotypes>, kNumGenotypes> compat{};
    std::array<double, kNumGenotypes> natural{};
    for (const auto gi : kGenotypes) {
        natural[index(gi)] = natural_death_rate(gi, p);
        for (const auto gj : kGenotypes) {
            c[index(gi)][index(gj)] = competition_rate(gi, gj, p);
            compat[index(gi)][index(gj)] = compatible(gi, gj, p);
        }
    }

    SimulationResult res;
    Counts N = init;
    std::int64_t population = total(N);
    // Competition felt by each genotype, sum_j c_ij N_j, maintained incrementally.
    std::array<double, kNumGenotypes> comp{};
    auto recompute_competition = [&] {
        for (std::size_t i = 0; i < kNumGenotypes; ++i) {
            comp[i] = 0.0;
            for (std::size_t j = 0; j < kNumGenotypes; ++j) comp[i] += c[i][j] * static_cast<double>(N[j]);
        }
    };
    recompute_competition();
    auto change = [&](std::size_t g, int delta) {
        N[g] += delta;
        population += delta;
        for (std::size_t i = 0; i < kNumGenotypes; ++i) comp[i] += c[i][g] * delta;
    };

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform_open = [&] {
        double u;
        do u = unit(rng);
        while (u <= 0.0);
        return u;
    };

    std::size_t next_sample = 0;
    auto record_until = [&](double t) {
        // state N holds on [previous event, t)
        while (next_sample < options.sample_times.size() && options.sample_times[next_sample] < t) {
            res.sample_times.push_back(options.sample_times[next_sample]);
            res.samples.push_back(N);
            ++next_sample;
        }
    };

    std::array<double, 12> rate{};
    double t = 0.0;
    std::uint64_t since_refresh = 0;
    for (;;) {
        double total_rate = 0.0;
        for (std::size_t i = 0; i < kNumGenotypes; ++i) {
            const double Ni = static_cast<double>(N[i]);
            rate[i] = p.f * Ni;
            rate[6 + i] = N[i] > 0 ? Ni * (natural[i] + comp[i] / K) : 0.0;
            total_rate += rate[i] + rate[6 + i];
        }
        if (total_rate <= 0.0) {
            res.status = SimulationStatus::absorbed;
            t = t_max;
            break;
        }
        const double t_next = t - std::log(uniform_open()) / total_rate;
        if (t_next > t_max) {
            t = t_max;
            break;
        }
        record_until(t_next);
        t = t_next;

        // Pick a channel by inverse transform over the configured scan order.
        double target = unit(rng) * total_rate;
        int channel = -1;
        for (const int ch : options.channel_order) {
            const double r = rate[static_cast<std::size_t>(ch)];
            if (r <= 0.0) continue;
            channel = ch;
            if (target < r) break;
            target -= r;
        }

        if (channel >= 6) {
            const auto g = static_cast<std::size_t>(channel - 6);
            change(g, -1);
            if (options.log_events) res.log.push_back({t, SsaEventKind::death, kGenotypes[g], kGenotypes[g]});
        } else {
            const auto gi = static_cast<std::size_t>(channel);
            double pool = 0.0;
            for (std::size_t j = 0; j < kNumGenotypes; ++j)
                if (compat[gi][j]) pool += static_cast<double>(N[j]);
            double pick = unit(rng) * pool;
            std::size_t gj = gi;
            for (std::size_t j = 0; j < kNumGenotypes; ++j) {
                if (!compat[gi][j] || N[j] == 0) continue;
                gj = j;
                if (pick < static_cast<double>(N[j])) break;
                pick -= static_cast<double>(N[j]);
            }
            const auto [u1, u2] = alleles(kGenotypes[gi]);
            const auto [v1, v2] = alleles(kGenotypes[gj]);
            const std::uint64_t bits = rng();
            Allele from_i = (bits & 1u) ? u2 : u1;
            Allele from_j = (bits & 2u) ? v2 : v1;
            const Genotype inherited = make_genotype(from_i, from_j);
            Genotype child = inherited;
            if (p.mu > 0.0 && unit(rng) < p.mu) {
                Allele& target_allele = (bits & 4u) ? from_j : from_i;
                if (target_allele != Allele::B) target_allele = static_cast<Allele>(rank(target_allele) + 1);
                child = make_genotype(from_i, from_j);
            }
            change(index(child), +1);
            if (options.log_events)
                res.log.push_back({t, child == inherited ? SsaEventKind::birth : SsaEventKind::mutant_birth, child,
                                   inherited});
        }
        ++res.events;

        if (++since_refresh == 1u << 20) {
            // bound drift of the incremental competition sums
            recompute_competition();
            since_refresh = 0;
        }
        if (static_cast<double>(population) > cap) {
            res.status = SimulationStatus::capped;
            break;
        }
        if (options.stop && options.stop(t, N)) {
            res.status = SimulationStatus::stopped;
            break;
        }
        if (options.max_events && res.events >= options.max_events) {
            res.status = SimulationStatus::stopped;
            break;
        }
    }
    if (res.status == SimulationStatus::completed || res.status == SimulationStatus::absorbed) {
        // the last state holds through t_max
        while (next_sample < options.sample_times.size()) {
            res.sample_times.push_back(options.sample_times[next_sample]);
            res.samples.push_back(N);
            ++next_sample;
        }
    }
    res.t_final = t;
    res.final_counts = N;
    return res;
}

std::vector<double> uniform_grid(double t_max, double dt) {
    if (!(dt > 0.0) || !(t_max >= 0.0)) throw ConfigError("grid needs dt > 0 and t_max >= 0");
    std::vector<double> grid;
    const auto n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
    grid.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) grid.push_back(std::min(t_max, static_cast<double>(i) * dt));
    return grid;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& job) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
            try {
                job(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
}

namespace {

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

std::vector<GapQuantiles> lln_gap(const ModelParams& p, const State& x0, double t_horizon,
                                  const std::vector<std::int64_t>& Ks, const LlnOptions& options) {
    if (options.seeds < 1) throw ConfigError("lln_gap needs at least one seed");
    const auto grid = uniform_grid(t_horizon, options.grid_dt);
    InitialCondition ic;
    ic.n = x0;
    const auto ode = integrate(p, ic, t_horizon, 1e-10);
    std::vector<State> reference;
    reference.reserve(grid.size());
    for (const double t : grid) reference.push_back(ode.at(t));

    std::vector<GapQuantiles> out;
    for (const auto K : Ks) {
        ModelParams pk = p;
        pk.K = K;
        const auto init = counts_from_densities(x0, K);
        GapQuantiles g;
        g.K = K;
        g.gaps.assign(static_cast<std::size_t>(options.seeds), 0.0);
        parallel_for(g.gaps.size(), options.threads, [&](std::size_t s) {
            SimulationOptions so;
            so.seed = options.base_seed + s;
            so.sample_times = grid;
            const auto run = simulate(pk, init, t_horizon, so);
            double sup = 0.0;
            for (std::size_t k = 0; k < run.samples.size(); ++k) {
                const auto n = densities(run.samples[k], K);
                for (std::size_t i = 0; i < kNumGenotypes; ++i) sup = std::max(sup, std::fabs(n[i] - reference[k][i]));
            }
            g.gaps[s] = sup;
        });
        g.q10 = quantile(g.gaps, 0.1);
        g.median = quantile(g.gaps, 0.5);
        g.q90 = quantile(g.gaps, 0.9);
        out.push_back(std::move(g));
    }
    return out;
}

Counts second_mutation_counts(const ModelParams& p, double eps, std::int64_t min_AB_founders) {
    auto N = counts_from_densities(second_mutation_preset(p, eps).n, p.K);
    N[index(Genotype::AB)] = std::max(N[index(Genotype::AB)], min_AB_founders);
    return N;
}

std::string_view name(InvasionOutcome o) noexcept {
    switch (o) {
        case InvasionOutcome::recovered: return "recovered";
        case InvasionOutcome::lost_a: return "lost_a";
        case InvasionOutcome::lost_B: return "lost_B";
        case InvasionOutcome::undecided: return "undecided";
    }
    return "?";
}

namespace {

InvasionOutcome classify(const Counts& N, double recovery_level) {
    if (static_cast<double>(N[0]) > recovery_level) return InvasionOutcome::recovered;
    if (N[0] + N[1] + N[3] == 0) return InvasionOutcome::lost_a;
    if (N[3] + N[4] + N[5] == 0) return InvasionOutcome::lost_B;
    return InvasionOutcome::undecided;
}

}  // namespace

InvasionTrial invasion_trial(const ModelParams& p, const Counts& init, double t_max, SimulationOptions options) {
    const double level = 0.5 * equilibria(p).a * static_cast<double>(p.K);
    options.stop = [level](double, const Counts& N) { return classify(N, level) != InvasionOutcome::undecided; };
    InvasionTrial trial;
    trial.result = simulate(p, init, t_max, options);
    trial.outcome = classify(trial.result.final_counts, level);
    return trial;
}

}  // namespace mendel
