#include "mendel/phases.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mendel/error.hpp"
#include "mendel/keyvalue.hpp"

namespace mendel {
namespace {

double sigma(const State& n) { return n[index(Genotype::aA)] + n[index(Genotype::aB)]; }
double weighted(const State& n) { return 2.0 * n[index(Genotype::aa)] + sigma(n); }

}  // namespace

void PhaseSettings::validate(const ModelParams& p) const {
    if (!(0.0 < eps && eps < eps0 && eps0 < delta && delta < p.delta))
        throw ConfigError("phase settings need 0 < eps < eps0 < delta < Delta (eps=" + format_double(eps) +
                          ", eps0=" + format_double(eps0) + ", delta=" + format_double(delta) +
                          ", Delta=" + format_double(p.delta) + ")");
    if (!(entry_radius > 0.0)) throw ConfigError("entry radius must be positive");
    if (t3_level && !(*t3_level > 0.0)) throw ConfigError("T3 level must be positive");
}

double PhaseSettings::t3_threshold(const ModelParams& p) const {
    return t3_level ? *t3_level : coexistence_point(p)[index(Genotype::aa)] - eps0;
}

State coexistence_point(const ModelParams& p) {
    // aa and BB only: c aa + c_aB BB = f - D_a, c_aB aa + c BB = f - D_B.
    const double ra = p.f - natural_death_rate(Genotype::aa, p);
    const double rb = p.f - natural_death_rate(Genotype::BB, p);
    const double det = p.c * p.c - p.c_aB * p.c_aB;
    if (!(det > 0.0)) throw ConfigError("no aa-BB coexistence point: c_aB must be below c");
    const double aa = (p.c * ra - p.c_aB * rb) / det;
    const double bb = (p.c * rb - p.c_aB * ra) / det;
    if (!(aa > 0.0) || !(bb > 0.0)) throw ConfigError("aa-BB coexistence point leaves the orthant");
    return {aa, 0.0, 0.0, 0.0, 0.0, bb};
}

std::vector<EventRule> phase_event_rules(const ModelParams& p, const PhaseSettings& s) {
    using G = Genotype;
    std::vector<EventRule> rules;
    rules.push_back(EventRule::sum_threshold("T1", {G::aB, G::AB, G::BB}, s.eps0));
    rules.push_back(EventRule::equality("T_eq", G::aA, G::aB).armed_after({"T1"}));
    rules.push_back(EventRule::proportional("T2_aA", G::aA, G::AA, s.delta).armed_after({"T1"}));
    rules.push_back(EventRule::proportional("T2_aB", G::aB, G::AB, s.delta).armed_after({"T1"}));
    rules.push_back(EventRule::threshold("T3", G::aa, s.t3_threshold(p)).armed_after({"T2_aA", "T2_aB"}));
    rules.push_back(EventRule::entry("T_entry", coexistence_point(p), s.entry_radius).armed_after({"T3"}));
    return rules;
}

PhaseTracker::PhaseTracker(const ModelParams& p, const PhaseSettings& s, double time_tol)
    : settings_(s), t3_level_(s.t3_threshold(p)), detector_(phase_event_rules(p, s), time_tol) {
    s.validate(p);
}

void PhaseTracker::consider(double t, const State& n) {
    const double sv = sigma(n);
    const double wv = weighted(n);
    if (!started_ || sv < sigma_.value) sigma_ = {sv, t};
    if (!started_ || wv < weighted_.value) weighted_ = {wv, t};
    started_ = true;
    window_end_ = t;
}

void PhaseTracker::observe(const Segment& seg) {
    detector_.observe(seg);
    t_last_ = seg.t1;
    if (window_closed_) return;
    if (!started_) consider(seg.t0, seg.n0);
    if (const auto t3 = detector_.time("T3"); t3 && *t3 <= seg.t1) {
        consider(*t3, seg.at(*t3));
        window_closed_ = true;
        return;
    }
    consider(seg.t1, seg.n1);
}

PhaseReport PhaseTracker::report() const {
    PhaseReport r;
    r.settings = settings_;
    r.t3_level = t3_level_;
    r.T1 = detector_.time("T1");
    r.T_eq = detector_.time("T_eq");
    r.T2_aA = detector_.time("T2_aA");
    r.T2_aB = detector_.time("T2_aB");
    if (r.T2_aA && r.T2_aB) r.T2 = std::min(*r.T2_aA, *r.T2_aB);
    else r.T2 = r.T2_aA ? r.T2_aA : r.T2_aB;
    r.T3 = detector_.time("T3");
    r.T_entry = detector_.time("T_entry");
    r.sigma_aA_aB = sigma_;
    r.weighted_a = weighted_;
    r.functional_window_end = window_end_;
    r.t_end = t_last_;
    return r;
}

PhaseReport phase_report(const Trajectory& traj, const ModelParams& p, const PhaseSettings& s) {
    PhaseTracker tracker(p, s, 1e-10 * std::max(1.0, traj.empty() ? 1.0 : traj.t_end()));
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) tracker.observe(traj.segment(i));
    auto r = tracker.report();
    if (r.T2) r.sigma_at_T2 = sigma(traj.at(*r.T2));
    return r;
}

double auto_horizon(const ModelParams& p, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("auto horizon needs 0 < eps < 1");
    const double denom = 1.0 + p.eta * equilibria(p).B - p.delta;
    return 20.0 * std::pow(eps, -1.0 / denom);
}

PhaseRun run_phases(const ModelParams& p, const PhaseSettings& s, const HorizonPolicy& horizon,
                    const IntegratorOptions& options, const StepObserver& extra) {
    p.validate();
    s.validate(p);
    PhaseRun run;
    run.horizon = horizon.t_end ? *horizon.t_end : auto_horizon(p, s.eps);
    const double t_stop = horizon.t_end ? run.horizon : run.horizon * horizon.extension_cap;

    PhaseTracker tracker(p, s, 1e-10 * run.horizon);
    std::optional<double> sigma_t2;
    const auto ic = second_mutation_preset(p, s.eps);
    run.stats = integrate(p, ic.n, t_stop, options, [&](const Segment& seg) {
        tracker.observe(seg);
        if (!sigma_t2) {
            const auto r = tracker.report();
            if (r.T2 && *r.T2 <= seg.t1) sigma_t2 = sigma(seg.at(*r.T2));
        }
        if (extra && !extra(seg)) return false;
        // past the nominal horizon, stop as soon as convergence has been seen
        return !(seg.t1 >= run.horizon && tracker.entered());
    });
    run.report = tracker.report();
    run.report.sigma_at_T2 = sigma_t2;
    return run;
}

void SigmaMonotonicity::observe(const Segment& seg) {
    auto add = [&](double t, const State& n, const State& dn) {
        const double s = sigma(n);
        const double rate = dn[index(Genotype::aA)] + dn[index(Genotype::aB)];
        if (rate < -rel_tol_ * s) last_decrease_ = t;
        rates_.emplace_back(t, s > 0.0 ? rate / s : 0.0);
    };
    if (rates_.empty()) add(seg.t0, seg.n0, seg.dn0);
    add(seg.t1, seg.n1, seg.dn1);
}

double SigmaMonotonicity::min_relative_rate(double t_from, double t_to) const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& [t, r] : rates_)
        if (t >= t_from && t <= t_to) m = std::min(m, r);
    return m;
}

}  // namespace mendel
