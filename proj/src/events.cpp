#include "mendel/events.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mendel/error.hpp"

namespace mendel {

EventRule EventRule::threshold(std::string name, Genotype x, double h) {
    return sum_threshold(std::move(name), {x}, h);
}

EventRule EventRule::sum_threshold(std::string name, std::vector<Genotype> subset, double h) {
    EventRule s;
    s.name = std::move(name);
    s.kind = EventKind::sum_threshold;
    s.subset = std::move(subset);
    s.level = h;
    return s;
}

EventRule EventRule::equality(std::string name, Genotype x, Genotype y) {
    EventRule s;
    s.name = std::move(name);
    s.kind = EventKind::equality;
    s.x = x;
    s.y = y;
    s.level = 1.0;
    return s;
}

EventRule EventRule::proportional(std::string name, Genotype x, Genotype y, double delta) {
    EventRule s = equality(std::move(name), x, y);
    s.kind = EventKind::proportional;
    s.level = delta;
    return s;
}

EventRule EventRule::entry(std::string name, const State& point, double radius) {
    EventRule s;
    s.name = std::move(name);
    s.kind = EventKind::neighborhood_entry;
    s.point = point;
    s.level = radius;
    return s;
}

EventRule& EventRule::armed_after(std::vector<std::string> names) {
    after = std::move(names);
    return *this;
}

double EventRule::indicator(const State& n) const noexcept {
    switch (kind) {
        case EventKind::sum_threshold: {
            double s = 0.0;
            for (const auto g : subset) s += n[index(g)];
            return s - level;
        }
        case EventKind::equality: return n[index(x)] - n[index(y)];
        case EventKind::proportional: return n[index(x)] - level * n[index(y)];
        case EventKind::neighborhood_entry: {
            double d = 0.0;
            for (std::size_t i = 0; i < kNumGenotypes; ++i) d = std::max(d, std::fabs(n[i] - point[i]));
            return level - d;
        }
    }
    return 0.0;
}

void EventRule::validate() const {
    if (name.empty()) throw ConfigError("event needs a name");
    if (!(level > 0.0) || !std::isfinite(level)) throw ConfigError("event '" + name + "': level must be positive");
    if (kind == EventKind::sum_threshold && subset.empty())
        throw ConfigError("event '" + name + "': empty genotype subset");
    if ((kind == EventKind::equality || kind == EventKind::proportional) && x == y)
        throw ConfigError("event '" + name + "': x and y must differ");
}

namespace {

bool two_sided(EventKind k) { return k == EventKind::equality || k == EventKind::proportional; }

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

EventDetector::EventDetector(std::vector<EventRule> rules, double time_tol) : time_tol_(time_tol) {
    if (!(time_tol > 0.0)) throw ConfigError("event time tolerance must be positive");
    std::set<std::string> names;
    for (auto& s : rules) {
        s.validate();
        if (!names.insert(s.name).second) throw ConfigError("duplicate event name '" + s.name + "'");
    }
    for (const auto& s : rules)
        for (const auto& prereq : s.after)
            if (!names.count(prereq))
                throw ConfigError("event '" + s.name + "' waits for unknown event '" + prereq + "'");
    for (auto& s : rules) {
        times_[s.name] = std::nullopt;
        slots_.push_back({std::move(s), std::nullopt, false});
    }
}

std::optional<double> EventDetector::arming_time(const Slot& slot) const {
    std::optional<double> earliest;
    for (const auto& prereq : slot.rule.after) {
        const auto& t = times_.at(prereq);
        if (t && (!earliest || *t < *earliest)) earliest = t;
    }
    return earliest;
}

std::optional<double> EventDetector::locate(const EventRule& rule, const Segment& seg, double from) const {
    const double ga = rule.indicator(seg.at(from));
    const double gb = rule.indicator(seg.n1);
    bool crossed;
    if (two_sided(rule.kind)) crossed = sign(ga) != 0 && sign(gb) != sign(ga);
    else crossed = ga <= 0.0 && gb > 0.0;
    if (!crossed) return std::nullopt;

    // Invariant: the event has not happened at lo and has happened at hi.
    double lo = from, hi = seg.t1;
    const int s0 = sign(ga);
    auto happened = [&](double g) { return two_sided(rule.kind) ? sign(g) != s0 : g > 0.0; };
    while (hi - lo > time_tol_) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (happened(rule.indicator(seg.at(mid)))) hi = mid;
        else lo = mid;
    }
    return hi;
}

void EventDetector::observe(const Segment& seg) {
    // Prerequisites may fire inside this segment and arm dependents within it,
    // so sweep until nothing changes.
    for (bool changed = true; changed;) {
        changed = false;
        for (auto& slot : slots_) {
            if (slot.fired) continue;
            if (!slot.armed_at) {
                if (slot.rule.after.empty()) slot.armed_at = seg.t0;
                else slot.armed_at = arming_time(slot);
                if (!slot.armed_at) continue;
            }
            const double from = std::max(*slot.armed_at, seg.t0);
            if (from >= seg.t1) continue;
            if (const auto t = locate(slot.rule, seg, from)) {
                slot.fired = true;
                times_[slot.rule.name] = t;
                changed = true;
            }
        }
    }
}

std::optional<double> EventDetector::time(const std::string& name) const {
    const auto it = times_.find(name);
    return it == times_.end() ? std::nullopt : it->second;
}

bool EventDetector::all_fired() const noexcept {
    return std::all_of(slots_.begin(), slots_.end(), [](const Slot& s) { return s.fired; });
}

EventTimes detect_events(const Trajectory& traj, const std::vector<EventRule>& rules) {
    if (traj.size() < 2) {
        EventDetector detector(rules, 1.0);
        return detector.times();
    }
    EventDetector detector(rules, 1e-10 * std::max(1.0, traj.t_end()));
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        detector.observe(traj.segment(i));
        if (detector.all_fired()) break;
    }
    return detector.times();
}

}  // namespace mendel
