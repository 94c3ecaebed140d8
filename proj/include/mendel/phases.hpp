#pragma once

// Phase boundaries of the invasion of B after a second mutation, and the
// allele-a functionals tracked along the way.

#include <limits>
#include <optional>
#include <string>

#include "mendel/events.hpp"
#include "mendel/ode.hpp"

namespace mendel {

struct PhaseSettings {
    double eps = 0.01;           ///< initial condition scale
    double eps0 = 0.03;          ///< B phenotype threshold for T1
    double delta = 0.05;         ///< proportionality factor for T2
    double entry_radius = 0.01;  ///< sup-norm radius around p_aB for T_entry
    /// aa level defining T3; unset means the aa coordinate of the
    /// coexistence point minus eps0 (nbar_a - eps0 when c_aB = 0).
    std::optional<double> t3_level;

    /// Requires 0 < eps < eps0 < delta < Delta and a positive entry radius.
    void validate(const ModelParams& p) const;
    double t3_threshold(const ModelParams& p) const;
};

struct FunctionalMin {
    double value = 0.0;
    double time = 0.0;
};

struct PhaseReport {
    PhaseSettings settings;
    double t3_level = 0.0;
    std::optional<double> T1, T_eq, T2, T2_aA, T2_aB, T3, T_entry;
    /// Minima over [0, T3], or over the whole run when T3 is absent.
    FunctionalMin sigma_aA_aB;  ///< n_aA + n_aB
    FunctionalMin weighted_a;   ///< 2 n_aa + n_aA + n_aB
    double functional_window_end = 0.0;
    std::optional<double> sigma_at_T2;
    double t_end = 0.0;
};

/// The aa-BB coexistence point; (nbar_a, 0, 0, 0, 0, nbar_B) when c_aB = 0.
/// ConfigError if it does not lie in the open orthant.
State coexistence_point(const ModelParams& p);

/// Event list behind the report: T1, T_eq, T2_aA, T2_aB, T3, T_entry.
std::vector<EventRule> phase_event_rules(const ModelParams& p, const PhaseSettings& s);

/// Streaming form of phase_report, to be fed every accepted segment in order.
class PhaseTracker {
public:
    PhaseTracker(const ModelParams& p, const PhaseSettings& s, double time_tol);

    void observe(const Segment& seg);
    PhaseReport report() const;
    bool entered() const { return detector_.time("T_entry").has_value(); }

private:
    void consider(double t, const State& n);

    PhaseSettings settings_;
    double t3_level_;
    EventDetector detector_;
    FunctionalMin sigma_{}, weighted_{};
    bool started_ = false;
    bool window_closed_ = false;
    double window_end_ = 0.0;
    double t_last_ = 0.0;
};

PhaseReport phase_report(const Trajectory& traj, const ModelParams& p, const PhaseSettings& s);

/// 20 * eps^(-1 / (1 + eta nbar_B - Delta)): the run length used by `t-end auto`.
double auto_horizon(const ModelParams& p, double eps);

struct HorizonPolicy {
    /// Fixed horizon; unset selects auto_horizon and keeps integrating past it
    /// until T_entry is seen or `extension_cap` times the horizon is reached.
    std::optional<double> t_end;
    double extension_cap = 10.0;
};

struct PhaseRun {
    PhaseReport report;
    IntegrationStats stats;
    double horizon = 0.0;
};

/// Integrates the second-mutation preset and tracks phases without storing
/// the trajectory. `extra` (optional) sees every accepted segment too.
PhaseRun run_phases(const ModelParams& p, const PhaseSettings& s, const HorizonPolicy& horizon,
                    const IntegratorOptions& options, const StepObserver& extra = nullptr);

/// Tracks d/dt (n_aA + n_aB) along a run.
class SigmaMonotonicity {
public:
    /// A decrease counts when the derivative falls below -rel_tol * sigma.
    explicit SigmaMonotonicity(double rel_tol) : rel_tol_(rel_tol) {}
    void observe(const Segment& seg);

    /// Last node time at which sigma was decreasing, if ever.
    std::optional<double> last_decrease() const { return last_decrease_; }
    /// Most negative relative rate sigma'/sigma at nodes in [t_from, t_to];
    /// +inf if there are none.
    double min_relative_rate(double t_from, double t_to = std::numeric_limits<double>::infinity()) const;
    double tolerance() const noexcept { return rel_tol_; }

private:
    double rel_tol_;
    std::optional<double> last_decrease_;
    std::vector<std::pair<double, double>> rates_;  // (t, sigma'/sigma)
};

}  // namespace mendel
