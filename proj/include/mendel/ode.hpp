#pragma once

// Deterministic large-population dynamics: adaptive Dormand-Prince 5(4)
// integration of dn/dt = F(n) with cubic Hermite dense output.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mendel/rates.hpp"

namespace mendel {

struct IntegratorOptions {
    double rel_tol = 1e-10;
    /// Absolute floor of the error scale; 0 selects 1e-12 * rel_tol so that
    /// populations many orders below unity are still resolved relatively.
    double abs_tol = 0.0;
    /// Step cap; keeps sign-change bracketing of events reliable.
    double max_step = 0.1;
    double initial_step = 0.0;  ///< 0 selects an automatic first step
    std::size_t max_steps = 100'000'000;
};

/// One accepted step [t0, t1] together with the end-point derivatives, which
/// determine the cubic Hermite interpolant used for dense output.
struct Segment {
    double t0 = 0.0;
    double t1 = 0.0;
    State n0{}, dn0{}, n1{}, dn1{};

    State at(double t) const noexcept;
};

/// Time-ordered states with stored derivatives. Read-only once built.
class Trajectory {
public:
    void append(double t, const State& n, const State& dn);
    void reserve(std::size_t count);

    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }
    double time(std::size_t i) const { return times_.at(i); }
    const State& state(std::size_t i) const { return states_.at(i); }
    const State& derivative(std::size_t i) const { return derivatives_.at(i); }
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<State>& states() const noexcept { return states_; }

    double t_begin() const;
    double t_end() const;

    /// Segment between stored points i and i+1.
    Segment segment(std::size_t i) const;

    /// Dense output; throws std::out_of_range outside [t_begin, t_end].
    State at(double t) const;

private:
    std::vector<double> times_;
    std::vector<State> states_;
    std::vector<State> derivatives_;
};

struct InitialCondition {
    State n{};
    std::string label = "custom";
};

/// Long-time state of the (aa, aA, AA) system right after a B mutation:
/// n_aA = eps, n_aa = eps^2, n_AB = eps^3, n_AA = nbar_A - eps, aB = BB = 0.
/// Throws ConfigError unless 0 < eps < nbar_A.
InitialCondition second_mutation_preset(const ModelParams& p, double eps);

/// A single genotype at the given density.
InitialCondition monomorphic_start(Genotype g, double density);

struct IntegrationStats {
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    std::size_t evaluations = 0;
    std::size_t clamp_events = 0;
    double t_final = 0.0;
    bool stopped_by_observer = false;
};

/// Called after each accepted step; returning false ends the integration.
using StepObserver = std::function<bool(const Segment&)>;

/// Streaming integration from t = 0 to t_end. Throws NumericError on step-size
/// underflow, a non-finite state or an exhausted step budget, and ConfigError
/// on invalid arguments.
IntegrationStats integrate(const ModelParams& p, const State& n0, double t_end,
                           const IntegratorOptions& options, const StepObserver& observer);

/// Integrates and stores every accepted step.
Trajectory integrate(const ModelParams& p, const InitialCondition& ic, double t_end,
                     const IntegratorOptions& options);

/// Convenience form with the default step cap; `tol` must lie in (1e-13, 1e-3).
Trajectory integrate(const ModelParams& p, const InitialCondition& ic, double t_end, double tol);

}  // namespace mendel
