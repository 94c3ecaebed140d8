// One PASS/FAIL line per acceptance criterion. Arguments select criteria by
// number; no arguments runs all thirteen. Exit status is 1 if any failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mendel/analysis.hpp"
#include "mendel/phases.hpp"
#include "mendel/ssa.hpp"

using namespace mendel;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    double budget_seconds;
    std::function<Outcome()> check;
};

std::string fmt(const char* format, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, x);
    return buf;
}

State random_state(std::mt19937_64& rng, double zero_probability) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    State n{};
    for (auto& x : n) x = u(rng) < zero_probability ? 0.0 : std::pow(10.0, -3.0 + 4.0 * u(rng));
    return n;
}

double sup_norm(const State& a) {
    double m = 0.0;
    for (const double x : a) m = std::max(m, std::fabs(x));
    return m;
}

double sup_distance(const State& a, const State& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

std::vector<double> sorted_real_parts(const SpectrumReport& s) {
    std::vector<double> v;
    for (const auto& e : s.eigenvalues) v.push_back(e.real());
    std::sort(v.begin(), v.end());
    return v;
}

std::vector<double> eps_grid() { return geometric_grid(1e-2, std::pow(10.0, -0.5), 4); }

ModelParams with_eta(double eta) {
    ModelParams p;
    p.eta = eta;
    return p;
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
    std::mt19937_64 rng(101);
    double worst = 0.0;
    int states = 0;
    for (const auto mode : {Compatibility::no_reproduction_a_B, Compatibility::all_with_all})
        for (const double eta : {0.0, 0.02, 0.3})
            for (const double c_aB : {0.0, 0.1}) {
                ModelParams p = with_eta(eta);
                p.compat = mode;
                p.c_aB = c_aB;
                for (int k = 0; k < 1000; ++k, ++states) {
                    const State n = random_state(rng, 0.15);
                    const State b = birth_rates(n, p);
                    const State o = birth_rates_oracle(n, p);
                    double diff = 0.0;
                    for (std::size_t i = 0; i < 6; ++i) diff = std::max(diff, std::fabs(b[i] - o[i]));
                    worst = std::max(worst, diff / (1.0 + sup_norm(b)));
                }
            }
    return {worst < 1e-12, std::to_string(states) + " states, max relative error " + fmt("%.2e", worst)};
}

Outcome birth_conservation() {
    std::mt19937_64 rng(202);
    double worst = 0.0;
    for (const auto mode : {Compatibility::no_reproduction_a_B, Compatibility::all_with_all}) {
        ModelParams p = with_eta(0.02);
        p.compat = mode;
        for (int k = 0; k < 1000; ++k) {
            const State n = random_state(rng, 0.0);
            const State b = birth_rates(n, p);
            double sum = 0.0, s6 = 0.0;
            for (std::size_t i = 0; i < 6; ++i) {
                sum += b[i];
                s6 += n[i];
            }
            worst = std::max(worst, std::fabs(sum - p.f * s6) / (p.f * s6));
        }
    }
    return {worst < 1e-12, "2000 states, max relative error " + fmt("%.2e", worst)};
}

Outcome fixed_point_residuals() {
    double worst = 0.0;
    std::string detail;
    for (const double eta : {0.0, 0.02}) {
        const auto fp = fixed_points(with_eta(eta));
        for (const auto& x : fp.all)
            if (x.label != "p_a") worst = std::max(worst, x.residual);
    }
    return {worst < 1e-12, "max |F| over p_A, p_B, p_aB (eta 0 and 0.02) = " + fmt("%.2e", worst)};
}

Outcome eigenvalues() {
    const ModelParams p = with_eta(0.02);
    const auto fp = fixed_points(p);
    const std::vector<double> want_A{-6.1, -5.9, -5.9, -5.3, 0.0, 0.1};
    const std::vector<double> want_aB{-11.3, -6.7937, -5.4, -5.2, 0.0, 0.0};
    auto compare = [](const SpectrumReport& s, const std::vector<double>& want, std::string& detail) {
        const auto got = sorted_real_parts(s);
        double worst = 0.0;
        for (std::size_t i = 0; i < 6; ++i) {
            const double err = std::max(std::fabs(got[i] - want[i]), std::fabs(s.eigenvalues[i].imag()));
            if (err > 1e-5) detail += " " + s.label + ": got " + fmt("%.6f", got[i]) + " want " + fmt("%.6f", want[i]) + ";";
            worst = std::max(worst, err);
        }
        return worst;
    };
    std::string detail;
    const double eA = compare(spectrum("p_A", fp.p_A, p), want_A, detail);
    const double eaB = compare(spectrum("p_aB", fp.p_aB, p), want_aB, detail);
    const bool pass = eA <= 1e-5 && eaB <= 1e-5;
    return {pass, "max error p_A " + fmt("%.1e", eA) + ", p_aB " + fmt("%.1e", eaB) + (pass ? "" : ";" + detail)};
}

Outcome r_max() {
    const auto e = r_extremum();
    return {std::fabs(e.value - 0.593644) <= 1e-5,
            "r_max = " + fmt("%.9f", e.value) + " at lambda = " + fmt("%.6f", e.argument)};
}

Outcome centre_manifold() {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    std::set<std::string> mismatched;
    for (int k = 0; k < 20; ++k) {
        ModelParams p;
        p.f = 5.0 + 195.0 * u(rng);
        p.D = 0.2 + 1.3 * u(rng);
        p.delta = 0.01 + 0.14 * u(rng);
        p.c = 0.5 + 1.5 * u(rng);
        p.eta = p.c * 0.5 * u(rng);
        const auto cm = center_manifold(p);
        worst = std::max(worst, cm.max_relative_mismatch);
        for (const auto& c : cm.checks)
            if (c.relative_error > 1e-8) mismatched.insert(c.name);
    }
    ModelParams p;
    p.f = 200;
    p.eta = 0.02;
    const auto low = center_manifold(p);
    p.eta = 0.6;
    const auto high = center_manifold(p);
    const bool verdicts = low.verdict.attracting && !high.verdict.attracting;
    std::string names;
    for (const auto& n : mismatched) names += (names.empty() ? "" : ", ") + n;
    std::string detail = "closed-form match: max relative mismatch " + fmt("%.2e", worst);
    if (!names.empty()) detail += " (" + names + ")";
    detail += std::string("; f=200: eta 0.02 ") + (low.verdict.attracting ? "attracting" : "repelling") + ", eta 0.6 " +
              (high.verdict.attracting ? "attracting" : "repelling");
    return {worst <= 1e-8 && verdicts, detail};
}

Outcome phase_choreography() {
    const ModelParams p = with_eta(0.02);
    PhaseSettings s;
    s.eps = 0.01;
    s.entry_radius = 0.01;
    const auto eq = equilibria(p);
    double worst_aB = -1e300, worst_AA = -1e300, worst_BB = -1e300;
    auto check = [&](const State& n) {
        worst_aB = std::max(worst_aB, n[3] - n[4]);
        worst_AA = std::max(worst_AA, n[2] - eq.A);
        worst_BB = std::max(worst_BB, n[5] - eq.B);
    };
    check(second_mutation_preset(p, s.eps).n);
    const auto run = run_phases(p, s, {}, {}, [&](const Segment& seg) {
        check(seg.n1);
        return true;
    });
    const auto& r = run.report;
    const bool all = r.T1 && r.T_eq && r.T2 && r.T3 && r.T_entry;
    const bool ordered = all && *r.T1 < *r.T_eq && *r.T_eq < *r.T2 && *r.T2 < *r.T3 && *r.T3 < *r.T_entry;
    const bool bounds = worst_aB <= 0.0 && worst_AA <= 0.0 && worst_BB <= 0.0;
    std::string detail;
    if (all)
        detail = "T1 " + fmt("%.2f", *r.T1) + " < T_eq " + fmt("%.2f", *r.T_eq) + " < T2 " + fmt("%.2f", *r.T2) +
                 " < T3 " + fmt("%.2f", *r.T3) + " < T_entry " + fmt("%.2f", *r.T_entry);
    else
        detail = "missing phase times";
    detail += "; max(aB-AB) " + fmt("%.2e", worst_aB) + ", max(AA-nbar_A) " + fmt("%.2e", worst_AA) +
              ", max(BB-nbar_B) " + fmt("%.2e", worst_BB);
    return {ordered && bounds, detail};
}

std::vector<PhaseRun> eps_sweep(const ModelParams& p) {
    std::vector<PhaseRun> runs;
    for (const double e : eps_grid()) {
        PhaseSettings s;
        s.eps = e;
        runs.push_back(run_phases(p, s, {}, {}));
    }
    return runs;
}

Outcome t2_scaling() {
    const ModelParams p = with_eta(0.02);
    std::vector<double> x, y;
    std::string values;
    for (const auto& r : eps_sweep(p)) {
        if (!r.report.T2) return {false, "T2 missing at eps = " + fmt("%.3g", r.report.settings.eps)};
        x.push_back(r.report.settings.eps);
        y.push_back(*r.report.T2);
        values += (values.empty() ? "" : ", ") + fmt("%.1f", *r.report.T2);
    }
    const auto fit = fit_scaling(x, y, ScalingAxes::log_log);
    const double theory = -1.0 / (1.0 + p.eta * equilibria(p).B - p.delta);
    const bool pass = std::fabs(fit.slope - theory) <= 0.1 * std::fabs(theory);
    return {pass, "T2 = {" + values + "}, slope " + fmt("%.4f", fit.slope) + " +/- " + fmt("%.4f", fit.slope_se) +
                      ", target " + fmt("%.4f", theory) + " +/- 10%"};
}

Outcome dip_exponent() {
    const ModelParams p = with_eta(0.0);
    std::vector<double> x, y;
    std::string values;
    for (const auto& r : eps_sweep(p)) {
        x.push_back(r.report.settings.eps);
        y.push_back(r.report.sigma_aA_aB.value);
        values += (values.empty() ? "" : ", ") + fmt("%.3g", r.report.sigma_aA_aB.value);
        if (!r.report.T3) values += " (no recovery by t=" + fmt("%.0f", r.report.t_end) + ")";
    }
    const auto fit = fit_scaling(x, y, ScalingAxes::log_log);
    return {fit.slope >= 1.05 && fit.slope <= 1.17,
            "min sigma = {" + values + "}, slope " + fmt("%.4f", fit.slope) + ", band [1.05, 1.17]"};
}

Outcome monotone_recovery() {
    auto window_rate = [](double eta, std::string& detail) {
        const ModelParams p = with_eta(eta);
        SigmaMonotonicity mono(1e-9);
        const auto run = run_phases(p, PhaseSettings{}, {}, {}, [&](const Segment& seg) {
            mono.observe(seg);
            return true;
        });
        const auto& r = run.report;
        if (!r.T_eq || !r.T2) {
            detail += " eta " + fmt("%.2g", eta) + ": T_eq or T2 missing;";
            return -std::numeric_limits<double>::infinity();
        }
        const double m = mono.min_relative_rate(*r.T_eq, *r.T2);
        detail += " eta " + fmt("%.2g", eta) + ": min sigma'/sigma on [T_eq, T2] = [" + fmt("%.1f", *r.T_eq) + ", " +
                  fmt("%.1f", *r.T2) + "] is " + fmt("%.3e", m) + ";";
        return m;
    };
    std::string detail;
    const double tol = 1e-9;
    const double high = window_rate(0.1, detail);
    const double zero = window_rate(0.0, detail);
    return {high >= -tol && zero < -tol, "eta* = " + fmt("%.4f", 4 * 0.1 / 5.4) + ";" + detail};
}

Outcome inverse_t_approach() {
    const ModelParams p = with_eta(0.02);
    const double T = 5e4;
    const auto traj = integrate(p, second_mutation_preset(p, 0.01), T, 1e-10);
    const State target = coexistence_point(p);
    std::vector<double> x, y;
    for (int k = 0; k <= 40; ++k) {
        const double t = std::min(T, T / 10.0 * std::pow(10.0, k / 40.0));
        x.push_back(t);
        y.push_back(sup_distance(traj.at(t), target));
    }
    const auto fit = fit_scaling(x, y, ScalingAxes::log_log);
    return {std::fabs(fit.slope + 1.0) <= 0.2,
            "eta 0.02, eps 0.01, window [5e3, 5e4]: slope " + fmt("%.4f", fit.slope) + " +/- " +
                fmt("%.4f", fit.slope_se) + ", dist(T) = " + fmt("%.3e", y.back())};
}

Outcome stochastic_consistency() {
    std::string detail;
    // (a) rates at scale K against the deterministic vectors
    std::mt19937_64 rng(1212);
    std::uniform_int_distribution<int> count(0, 5000);
    double worst = 0.0;
    for (const auto mode : {Compatibility::no_reproduction_a_B, Compatibility::all_with_all}) {
        ModelParams p = with_eta(0.02);
        p.compat = mode;
        p.K = 1000;
        for (int k = 0; k < 500; ++k) {
            Counts N;
            for (auto& c : N) c = count(rng);
            const auto rates = event_rates(N, p);
            const State n = densities(N, p.K);
            const auto b = birth_rates(n, p);
            const auto d = death_rates(n, p);
            const double scale = 1.0 + std::max(sup_norm(b), sup_norm(d));
            for (std::size_t i = 0; i < 6; ++i) {
                worst = std::max(worst, std::fabs(rates.offspring[i] / p.K - b[i]) / scale);
                worst = std::max(worst, std::fabs(rates.death[i] / p.K - d[i]) / scale);
            }
        }
    }
    const bool a = worst < 1e-12;
    detail += "(a) max relative error " + fmt("%.2e", worst);

    // (b) law of large numbers over [0, 5]
    const ModelParams p = with_eta(0.02);
    const State x0{0.5, 1.0, 2.0, 0.5, 1.0, 1.5};
    LlnOptions lln;
    lln.seeds = 16;
    const auto gaps = lln_gap(p, x0, 5.0, {10'000, 100'000}, lln);
    const bool b = gaps[1].median < gaps[0].median;
    detail += "; (b) median gap K=1e4 " + fmt("%.4f", gaps[0].median) + ", K=1e5 " + fmt("%.4f", gaps[1].median);

    // (c) stochastic recovery of aa
    ModelParams q = with_eta(0.02);
    q.K = 7000;
    const std::int64_t founders = 60;
    const Counts init = second_mutation_counts(q, 0.014, founders);
    int recovered = 0, lost_a = 0, lost_B = 0, undecided = 0;
    const int seeds = 32;
    std::vector<InvasionOutcome> outcomes(seeds);
    parallel_for(seeds, 0, [&](std::size_t i) {
        SimulationOptions o;
        o.seed = 1 + i;
        outcomes[i] = invasion_trial(q, init, 2000.0, o).outcome;
    });
    for (const auto o : outcomes) {
        recovered += o == InvasionOutcome::recovered;
        lost_a += o == InvasionOutcome::lost_a;
        lost_B += o == InvasionOutcome::lost_B;
        undecided += o == InvasionOutcome::undecided;
    }
    const bool c = recovered >= 1;
    detail += "; (c) K=7000, eps=0.014, " + std::to_string(founders) + " AB founders: " + std::to_string(recovered) +
              "/32 recovered, " + std::to_string(lost_a) + " lost a, " + std::to_string(lost_B) + " lost B, " +
              std::to_string(undecided) + " undecided";
    return {a && b && c, detail};
}

Outcome cross_competition_variant() {
    const double eps = 0.025;
    PhaseSettings s;
    s.eps = eps;
    ModelParams base = with_eta(0.0);
    ModelParams variant = base;
    variant.c_aB = 0.1;

    State last{};
    const auto rv = run_phases(variant, s, {}, {}, [&](const Segment& seg) {
        last = seg.n1;
        return true;
    });
    const auto rb = run_phases(base, s, {}, {});
    const State shifted = coexistence_point(variant);
    const auto eq = equilibria(base);
    const bool below = shifted[0] < eq.a && shifted[5] < eq.B;
    // keep going past entry: the distance must keep shrinking, not just touch the radius
    double late = std::numeric_limits<double>::infinity();
    if (rv.report.T_entry) {
        const double horizon = 2.0 * *rv.report.T_entry;
        late = sup_distance(integrate(variant, second_mutation_preset(variant, eps), horizon, 1e-10).at(horizon), shifted);
    }
    const bool converged = late < 0.5 * sup_distance(last, shifted);
    const bool slower = rv.report.T_entry && rb.report.T_entry && *rv.report.T_entry > *rb.report.T_entry;
    std::string detail = "eps " + fmt("%.3g", eps) + ": shifted point (" + fmt("%.4f", shifted[0]) + ", " +
                         fmt("%.4f", shifted[5]) + "), distance at T_entry " + fmt("%.2e", sup_distance(last, shifted)) +
                         ", at 2 T_entry " + fmt("%.2e", late) +
                         "; T_entry variant " + (rv.report.T_entry ? fmt("%.1f", *rv.report.T_entry) : "absent") +
                         " vs base " + (rb.report.T_entry ? fmt("%.1f", *rb.report.T_entry) : "absent");
    return {below && converged && slower, detail};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "birth-rate oracle equivalence", 5, oracle_equivalence},
        {2, "total-birth conservation", 1, birth_conservation},
        {3, "fixed-point residuals", 1, fixed_point_residuals},
        {4, "eigenvalues at p_A and p_aB", 1, eigenvalues},
        {5, "r_max", 1, r_max},
        {6, "centre-manifold coefficients and verdicts", 10, centre_manifold},
        {7, "phase choreography and ordering bounds", 30, phase_choreography},
        {8, "T2 scaling", 600, t2_scaling},
        {9, "eta = 0 dip exponent", 600, dip_exponent},
        {10, "monotone-recovery threshold", 60, monotone_recovery},
        {11, "1/t approach to p_aB", 60, inverse_t_approach},
        {12, "stochastic consistency", 900, stochastic_consistency},
        {13, "cross-competition variant", 120, cross_competition_variant},
    };

    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0, ran = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.check();
        } catch (const std::exception& e) {
            outcome = {false, std::string("error: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = seconds <= c.budget_seconds;
        const bool pass = outcome.pass && in_time;
        ++ran;
        failures += !pass;
        std::printf("criterion %2d %s  %s | %s | %.2f s (budget %.0f s)%s\n", c.id, pass ? "PASS" : "FAIL",
                    c.title.c_str(), outcome.detail.c_str(), seconds, c.budget_seconds,
                    in_time ? "" : " over budget");
        std::fflush(stdout);
    }
    std::printf("acceptance: %d/%d passed\n", ran - failures, ran);
    return failures == 0 ? 0 : 1;
}
