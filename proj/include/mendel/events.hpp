#pragma once

// Hitting times of threshold, equality and neighbourhood events along a
// trajectory, located on the dense output by bracketing and bisection.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mendel/ode.hpp"

namespace mendel {

enum class EventKind {
    sum_threshold,       ///< sum of n_x over `subset` rises above `level`
    equality,            ///< n_x - n_y changes sign
    proportional,        ///< n_x - level * n_y changes sign
    neighborhood_entry,  ///< sup-norm distance to `point` drops below `level`
};

struct EventRule {
    std::string name;
    EventKind kind = EventKind::sum_threshold;
    std::vector<Genotype> subset;
    Genotype x = Genotype::aa;
    Genotype y = Genotype::aa;
    double level = 0.0;
    State point{};
    /// Names of prerequisite events; this one is armed from the earliest of
    /// them. Empty means armed from the start.
    std::vector<std::string> after;

    static EventRule threshold(std::string name, Genotype x, double h);
    static EventRule sum_threshold(std::string name, std::vector<Genotype> subset, double h);
    static EventRule equality(std::string name, Genotype x, Genotype y);
    static EventRule proportional(std::string name, Genotype x, Genotype y, double delta);
    static EventRule entry(std::string name, const State& point, double radius);

    EventRule& armed_after(std::vector<std::string> names);

    /// Signed indicator; the event is "on" when positive (threshold, entry).
    double indicator(const State& n) const noexcept;

    /// Throws ConfigError on nonpositive levels, empty subsets or x == y.
    void validate() const;
};

using EventTimes = std::map<std::string, std::optional<double>>;

/// Streaming detector fed one accepted segment at a time. An event fires at
/// the first crossing strictly after it is armed: states already past the
/// threshold when armed do not count until they return and cross again.
class EventDetector {
public:
    EventDetector(std::vector<EventRule> rules, double time_tol);

    void observe(const Segment& seg);

    const EventTimes& times() const noexcept { return times_; }
    std::optional<double> time(const std::string& name) const;
    bool all_fired() const noexcept;

private:
    struct Slot {
        EventRule rule;
        std::optional<double> armed_at;
        bool fired = false;
    };

    std::optional<double> arming_time(const Slot& slot) const;
    std::optional<double> locate(const EventRule& rule, const Segment& seg, double from) const;

    std::vector<Slot> slots_;
    EventTimes times_;
    double time_tol_;
};

/// First hitting times over a stored trajectory; time tolerance 1e-10 * t_end.
EventTimes detect_events(const Trajectory& traj, const std::vector<EventRule>& rules);

}  // namespace mendel
