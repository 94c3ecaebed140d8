#include "mendel/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include "mendel/error.hpp"
#include "mendel/io.hpp"
#include "mendel/report.hpp"

#ifndef MENDEL_VERSION
#define MENDEL_VERSION "0.0.0"
#endif

namespace mendel {
namespace fs = std::filesystem;
using nlohmann::json;

std::string_view tool_version() noexcept { return MENDEL_VERSION; }

std::string_view name(Mode m) noexcept {
    switch (m) {
        case Mode::ode_run: return "ode-run";
        case Mode::ssa_run: return "ssa-run";
        case Mode::sweep: return "sweep";
        case Mode::analyze: return "analyze";
        case Mode::phases: return "phases";
        case Mode::manifold: return "manifold";
    }
    return "?";
}

std::optional<Mode> parse_mode(std::string_view text) noexcept {
    for (const auto m : {Mode::ode_run, Mode::ssa_run, Mode::sweep, Mode::analyze, Mode::phases, Mode::manifold})
        if (name(m) == text) return m;
    return std::nullopt;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "mode",     "f",         "D",          "delta",       "c",         "eta",          "c_aB",
        "compat",   "K",         "mu",         "preset",      "init",      "eps",          "eps0",
        "t2-delta", "entry-radius", "t3-level", "t-end",      "extension-cap", "tol",      "max-step",
        "sample-dt", "seed",     "seeds",      "founders",    "log-events", "population-cap", "threads",
        "eps-grid", "over",      "target",     "strict",      "flip",      "name"};
    return keys;
}

namespace {

bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("'" + std::string(key) + "': expected true or false, got '" + std::string(v) + "'");
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::string current;
    for (const char ch : text) {
        if (ch == sep) {
            parts.push_back(current);
            current.clear();
        } else if (ch != ' ' && ch != '\t') {
            current += ch;
        }
    }
    parts.push_back(current);
    return parts;
}

State parse_init(std::string_view text) {
    State n{};
    for (const auto& item : split(text, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("init: expected genotype=density, got '" + item + "'");
        const auto g = parse_genotype(item.substr(0, eq));
        if (!g) throw ConfigError("init: unknown genotype '" + item.substr(0, eq) + "'");
        n[index(*g)] = parse_double("init", item.substr(eq + 1));
    }
    return n;
}

std::string join_doubles(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += format_double(xs[i]);
    }
    return out;
}

std::string utc_timestamp(std::chrono::system_clock::time_point tp) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
    const std::string v(value);
    if (key == "mode") {
        const auto m = parse_mode(v);
        if (!m) throw ConfigError("unknown mode '" + v + "'");
        mode = *m;
    } else if (key == "f" || key == "D" || key == "delta" || key == "c" || key == "eta" || key == "c_aB" ||
               key == "compat" || key == "K" || key == "mu") {
        // Round-trip through the parameter file format so parsing stays in one place.
        KeyValues kv = parse_key_values(params_to_config(params));
        kv[std::string(key)] = v;
        std::string rebuilt;
        for (const auto& [k, val] : kv) rebuilt += k + " = " + val + "\n";
        params = params_from_config(rebuilt);
    } else if (key == "preset") {
        if (v != "second-mutation" && v != "custom" && v != "p_A" && v != "p_B" && v != "p_aB")
            throw ConfigError("unknown preset '" + v + "' (second-mutation, custom, p_A, p_B, p_aB)");
        preset = v;
    } else if (key == "init") {
        custom_init = parse_init(v);
    } else if (key == "eps") {
        phase.eps = parse_double(key, v);
    } else if (key == "eps0") {
        phase.eps0 = parse_double(key, v);
    } else if (key == "t2-delta") {
        phase.delta = parse_double(key, v);
    } else if (key == "entry-radius") {
        phase.entry_radius = parse_double(key, v);
    } else if (key == "t3-level") {
        phase.t3_level = v == "auto" ? std::nullopt : std::optional<double>(parse_double(key, v));
    } else if (key == "t-end") {
        t_end = v == "auto" ? std::nullopt : std::optional<double>(parse_double(key, v));
    } else if (key == "extension-cap") {
        extension_cap = parse_double(key, v);
    } else if (key == "tol") {
        tol = parse_double(key, v);
    } else if (key == "max-step") {
        max_step = parse_double(key, v);
    } else if (key == "sample-dt") {
        sample_dt = parse_double(key, v);
    } else if (key == "seed") {
        const auto s = parse_integer(key, v);
        if (s < 0) throw ConfigError("seed must be nonnegative");
        seed = static_cast<std::uint64_t>(s);
    } else if (key == "seeds") {
        const auto s = parse_integer(key, v);
        if (s < 1 || s > 1'000'000) throw ConfigError("seeds must lie in [1, 1e6]");
        seeds = static_cast<int>(s);
    } else if (key == "founders") {
        founders = parse_integer(key, v);
    } else if (key == "log-events") {
        log_events = parse_bool(key, v);
    } else if (key == "population-cap") {
        population_cap = parse_double(key, v);
    } else if (key == "threads") {
        const auto t = parse_integer(key, v);
        if (t < 0 || t > 4096) throw ConfigError("threads must lie in [0, 4096]");
        threads = static_cast<unsigned>(t);
    } else if (key == "eps-grid") {
        if (v == "auto") {
            eps_grid.reset();
        } else {
            std::vector<double> grid;
            for (const auto& item : split(v, ','))
                if (!item.empty()) grid.push_back(parse_double(key, item));
            eps_grid = std::move(grid);
        }
    } else if (key == "over") {
        if (v != "eps" && v != "seed") throw ConfigError("over must be eps or seed");
        over = v;
    } else if (key == "target") {
        if (v != "fixed-points" && v != "spectra" && v != "threshold" && v != "all")
            throw ConfigError("unknown analysis target '" + v + "' (fixed-points, spectra, threshold, all)");
        target = v;
    } else if (key == "strict") {
        strict = parse_bool(key, v);
    } else if (key == "flip") {
        flip = parse_bool(key, v);
    } else if (key == "name") {
        if (v.find('/') != std::string::npos || v == "." || v == "..")
            throw ConfigError("name must be a plain directory name");
        name = v;
    } else {
        throw ConfigError("unknown setting '" + std::string(key) + "'");
    }
}

void RunConfig::apply(const KeyValues& values) {
    for (const auto& [key, value] : values) set(key, value);
}

KeyValues RunConfig::snapshot() const {
    KeyValues kv = parse_key_values(params_to_config(params));
    std::string init;
    for (const auto g : kGenotypes) {
        if (!init.empty()) init += ',';
        init += std::string(mendel::name(g)) + "=" + format_double(custom_init[index(g)]);
    }
    kv["mode"] = std::string(mendel::name(mode));
    kv["preset"] = preset;
    kv["init"] = init;
    kv["eps"] = format_double(phase.eps);
    kv["eps0"] = format_double(phase.eps0);
    kv["t2-delta"] = format_double(phase.delta);
    kv["entry-radius"] = format_double(phase.entry_radius);
    kv["t3-level"] = phase.t3_level ? format_double(*phase.t3_level) : "auto";
    kv["t-end"] = t_end ? format_double(*t_end) : "auto";
    kv["extension-cap"] = format_double(extension_cap);
    kv["tol"] = format_double(tol);
    kv["max-step"] = format_double(max_step);
    kv["sample-dt"] = format_double(sample_dt);
    kv["seed"] = std::to_string(seed);
    kv["seeds"] = std::to_string(seeds);
    kv["founders"] = std::to_string(founders);
    kv["log-events"] = log_events ? "true" : "false";
    kv["population-cap"] = format_double(population_cap);
    kv["threads"] = std::to_string(threads);
    kv["eps-grid"] = eps_grid ? join_doubles(*eps_grid) : "auto";
    kv["over"] = over;
    kv["target"] = target;
    kv["strict"] = strict ? "true" : "false";
    kv["flip"] = flip ? "true" : "false";
    if (!name.empty()) kv["name"] = name;
    return kv;
}

std::string RunConfig::snapshot_text() const {
    const auto kv = snapshot();
    std::string out;
    for (const auto& key : config_keys()) {
        const auto it = kv.find(key);
        if (it != kv.end()) out += key + " = " + it->second + "\n";
    }
    return out;
}

std::vector<double> RunConfig::resolved_eps_grid() const {
    if (eps_grid) return *eps_grid;
    return geometric_grid(1e-2, std::pow(10.0, -0.5), 4);
}

State RunConfig::initial_state() const {
    if (preset == "second-mutation") return second_mutation_preset(params, phase.eps).n;
    if (preset == "custom") return custom_init;
    const auto eq = equilibria(params);
    State n{};
    if (preset == "p_A") n[index(Genotype::AA)] = eq.A;
    if (preset == "p_B") n[index(Genotype::BB)] = eq.B;
    if (preset == "p_aB") n = fixed_points(params).p_aB;
    return n;
}

void RunConfig::validate() const {
    params.validate();
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError(what);
    };
    require(tol > 1e-13 && tol < 1e-3, "tol must lie in (1e-13, 1e-3)");
    require(max_step > 0.0 && std::isfinite(max_step), "max-step must be positive");
    require(sample_dt >= 0.0 && std::isfinite(sample_dt), "sample-dt must be nonnegative");
    require(!t_end || (*t_end > 0.0 && std::isfinite(*t_end)), "t-end must be positive or auto");
    require(extension_cap >= 1.0 && std::isfinite(extension_cap), "extension-cap must be >= 1");
    require(population_cap >= 0.0, "population-cap must be nonnegative");
    require(founders >= 0, "founders must be nonnegative");
    require(is_valid_state(custom_init), "init densities must be finite and nonnegative");

    const bool phase_run = mode == Mode::phases || (mode == Mode::sweep && over == "eps") ||
                           (mode == Mode::ode_run && preset == "second-mutation");
    if (phase_run) {
        if (mode == Mode::sweep) {
            const auto grid = resolved_eps_grid();
            require(!grid.empty(), "eps-grid is empty");
            for (const double e : grid) {
                PhaseSettings s = phase;
                s.eps = e;
                s.validate(params);
            }
        } else {
            phase.validate(params);
        }
    }
    if (mode == Mode::phases)
        require(preset == "second-mutation", "phases runs start from the second-mutation preset");
    if (mode == Mode::ode_run && preset != "second-mutation")
        require(t_end.has_value(), "t-end auto is only defined for the second-mutation preset");
    const bool stochastic = mode == Mode::ssa_run || (mode == Mode::sweep && over == "seed");
    if (stochastic) {
        require(t_end.has_value(), "stochastic runs need a numeric t-end");
        if (preset == "second-mutation") second_mutation_preset(params, phase.eps);
    }
    if (mode == Mode::ode_run && preset == "second-mutation") second_mutation_preset(params, phase.eps);
    if (mode == Mode::manifold)
        require(params.c_aB == 0.0 && params.compat == Compatibility::no_reproduction_a_B,
                "the centre-manifold reduction needs c_aB = 0 and the default compatibility mode");
}

KeyValues read_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_key_values(buffer.str());
}

fs::path default_run_dir(const RunConfig& config) {
    const fs::path root = output_root();
    std::string base = config.name;
    if (base.empty()) {
        RunConfig anonymous = config;
        anonymous.name.clear();
        anonymous.threads = 0;
        base = std::string(name(config.mode)) + "-" + sha256_hex(anonymous.snapshot_text()).substr(0, 12);
    }
    fs::path dir = root / base;
    for (int k = 2; fs::exists(dir / "manifest.json"); ++k) dir = root / (base + "-" + std::to_string(k));
    return dir;
}

namespace {

IntegratorOptions integrator_options(const RunConfig& cfg) {
    IntegratorOptions o;
    o.rel_tol = cfg.tol;
    o.max_step = cfg.max_step;
    return o;
}

/// Writes rows either at every accepted step or on a uniform grid.
class TrajectorySampler {
public:
    TrajectorySampler(CsvTrajectoryWriter& csv, double dt, const State& n0) : csv_(csv), dt_(dt) {
        csv_.row(0.0, n0);
        last_ = n0;
    }
    bool operator()(const Segment& seg) {
        if (dt_ > 0.0) {
            for (double t = static_cast<double>(next_) * dt_; t <= seg.t1; t = static_cast<double>(++next_) * dt_)
                csv_.row(t, seg.at(t));
        } else {
            csv_.row(seg.t1, seg.n1);
        }
        t_last_ = seg.t1;
        last_ = seg.n1;
        return true;
    }
    const State& last() const { return last_; }
    double t_last() const { return t_last_; }

private:
    CsvTrajectoryWriter& csv_;
    double dt_;
    std::uint64_t next_ = 1;
    State last_{};
    double t_last_ = 0.0;
};

json init_json(const RunConfig& cfg, const State& n0) {
    json j{{"preset", cfg.preset}, {"n", state_json(n0)}};
    if (cfg.preset == "second-mutation") j["eps"] = cfg.phase.eps;
    return j;
}

json run_ode(const RunConfig& cfg, OutputDir& out) {
    const State n0 = cfg.initial_state();
    CsvTrajectoryWriter csv(out.file("trajectory.csv"));
    TrajectorySampler sampler(csv, cfg.sample_dt, n0);
    json report{{"mode", "ode-run"}, {"params", to_json(cfg.params)}, {"init", init_json(cfg, n0)}};
    if (cfg.preset == "second-mutation") {
        const PhaseRun pr = run_phases(cfg.params, cfg.phase, {cfg.t_end, cfg.extension_cap}, integrator_options(cfg),
                                       [&](const Segment& s) { return sampler(s); });
        report["horizon"] = pr.horizon;
        report["stats"] = to_json(pr.stats);
        report["phases"] = to_json(pr.report);
    } else {
        const auto stats = integrate(cfg.params, n0, *cfg.t_end, integrator_options(cfg),
                                     [&](const Segment& s) { return sampler(s); });
        report["horizon"] = *cfg.t_end;
        report["stats"] = to_json(stats);
        report["phases"] = nullptr;
    }
    csv.close();
    out.add("trajectory.csv");
    report["final_state"] = state_json(sampler.last());
    report["trajectory"] = {{"file", "trajectory.csv"}, {"rows", csv.rows()}, {"sample_dt", cfg.sample_dt}};
    return report;
}

json run_phase_mode(const RunConfig& cfg) {
    SigmaMonotonicity mono(1e-9);
    const PhaseRun pr = run_phases(cfg.params, cfg.phase, {cfg.t_end, cfg.extension_cap}, integrator_options(cfg),
                                   [&](const Segment& s) {
                                       mono.observe(s);
                                       return true;
                                   });
    const auto last = mono.last_decrease();
    // Between T_eq and T2 the aA + aB sum grows once eta exceeds eta*.
    json window = nullptr;
    const auto& r = pr.report;
    if (r.T_eq && r.T2 && *r.T_eq < *r.T2) {
        const double m = mono.min_relative_rate(*r.T_eq, *r.T2);
        window = {{"from", *r.T_eq}, {"to", *r.T2}, {"min_relative_rate", m},
                  {"nondecreasing", m >= -mono.tolerance()}};
    }
    return {{"mode", "phases"},
            {"params", to_json(cfg.params)},
            {"horizon", pr.horizon},
            {"stats", to_json(pr.stats)},
            {"phases", to_json(r)},
            {"sigma_last_decrease", last ? json(*last) : json(nullptr)},
            {"sigma_window", window},
            {"eta_star", 4.0 * cfg.params.delta / equilibria(cfg.params).B}};
}

std::string csv_cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

json fit_entry(const std::string& response, const std::string& regressor, const std::vector<double>& x,
               const std::vector<double>& y, ScalingAxes axes, json theory) {
    json j{{"response", response}, {"regressor", regressor}, {"theory", std::move(theory)}};
    try {
        j["fit"] = to_json(fit_scaling(x, y, axes));
    } catch (const ConfigError& e) {
        j["fit"] = nullptr;
        j["reason"] = e.what();
    }
    return j;
}

json run_eps_sweep(const RunConfig& cfg, OutputDir& out, ExitCode& code) {
    const auto grid = cfg.resolved_eps_grid();
    std::vector<std::optional<PhaseRun>> runs(grid.size());
    std::vector<std::string> errors(grid.size());
    parallel_for(grid.size(), cfg.threads, [&](std::size_t i) {
        PhaseSettings s = cfg.phase;
        s.eps = grid[i];
        try {
            runs[i] = run_phases(cfg.params, s, {cfg.t_end, cfg.extension_cap}, integrator_options(cfg));
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    std::string table =
        "eps,status,T1,T_eq,T2,T2_aA,T2_aB,T3,T_entry,min_sigma_aA_aB,min_sigma_time,min_weighted_a,t_end,"
        "accepted_steps\n";
    json members = json::array();
    std::vector<double> x_t2, y_t2, x_sig, y_sig, x_t1, y_t1;
    std::size_t successes = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::string file = "members/eps-" + std::to_string(i) + ".json";
        json member{{"eps", grid[i]}, {"file", file}};
        table += format_double(grid[i]);
        if (!runs[i]) {
            member["status"] = "failed";
            member["error"] = errors[i];
            table += ",failed,,,,,,,,,,,,\n";
            out.write_json(file, member);
            members.push_back(member);
            continue;
        }
        ++successes;
        const auto& r = runs[i]->report;
        member["status"] = "ok";
        out.write_json(file, {{"eps", grid[i]},
                              {"horizon", runs[i]->horizon},
                              {"stats", to_json(runs[i]->stats)},
                              {"phases", to_json(r)}});
        members.push_back(member);
        table += ",ok," + csv_cell(r.T1) + "," + csv_cell(r.T_eq) + "," + csv_cell(r.T2) + "," + csv_cell(r.T2_aA) +
                 "," + csv_cell(r.T2_aB) + "," + csv_cell(r.T3) + "," + csv_cell(r.T_entry) + "," +
                 format_double(r.sigma_aA_aB.value) + "," + format_double(r.sigma_aA_aB.time) + "," +
                 format_double(r.weighted_a.value) + "," + format_double(r.t_end) + "," +
                 std::to_string(runs[i]->stats.accepted_steps) + "\n";
        if (r.T2) {
            x_t2.push_back(grid[i]);
            y_t2.push_back(*r.T2);
        }
        x_sig.push_back(grid[i]);
        y_sig.push_back(r.sigma_aA_aB.value);
        if (r.T1) {
            x_t1.push_back(std::pow(grid[i], -3.0));
            y_t1.push_back(*r.T1);
        }
    }
    out.write_text("sweep.csv", table);

    const auto& p = cfg.params;
    const double nbar_B = equilibria(p).B;
    json fits = json::array();
    fits.push_back(fit_entry("T2", "eps", x_t2, y_t2, ScalingAxes::log_log,
                             {{"slope", -1.0 / (1.0 + p.eta * nbar_B - p.delta)}}));
    fits.push_back(fit_entry("min_sigma_aA_aB", "eps", x_sig, y_sig, ScalingAxes::log_log,
                             {{"slope_low", 1.0 + p.delta / (1.0 + p.delta)},
                              {"slope_high", 1.0 + p.delta / (1.0 - p.delta)}}));
    fits.push_back(fit_entry("T1", "eps^-3", x_t1, y_t1, ScalingAxes::log_x, {{"slope", 1.0 / p.delta}}));

    if (successes == 0) code = ExitCode::numeric;
    return {{"mode", "sweep"},
            {"over", "eps"},
            {"params", to_json(p)},
            {"settings", to_json(cfg.phase)},
            {"eps_grid", grid},
            {"members", members},
            {"successes", successes},
            {"table", "sweep.csv"},
            {"fits", fits}};
}

Counts stochastic_init(const RunConfig& cfg) {
    if (cfg.preset == "second-mutation") return second_mutation_counts(cfg.params, cfg.phase.eps, cfg.founders);
    return counts_from_densities(cfg.initial_state(), cfg.params.K);
}

SimulationOptions stochastic_options(const RunConfig& cfg, std::uint64_t seed) {
    SimulationOptions o;
    o.seed = seed;
    o.sample_times = uniform_grid(*cfg.t_end, cfg.sample_dt > 0.0 ? cfg.sample_dt : *cfg.t_end / 1000.0);
    o.population_cap = cfg.population_cap;
    return o;
}

void write_samples(OutputDir& out, const std::string& file, const SimulationResult& r, std::int64_t K) {
    CsvTrajectoryWriter csv(out.file(file));
    for (std::size_t i = 0; i < r.samples.size(); ++i) csv.row(r.sample_times[i], densities(r.samples[i], K));
    csv.close();
    out.add(file);
}

json run_ssa(const RunConfig& cfg, OutputDir& out) {
    const Counts init = stochastic_init(cfg);
    SimulationOptions o = stochastic_options(cfg, cfg.seed);
    o.log_events = cfg.log_events;
    const auto result = simulate(cfg.params, init, *cfg.t_end, o);
    write_samples(out, "trajectory.csv", result, cfg.params.K);
    json report{{"mode", "ssa-run"},
                {"params", to_json(cfg.params)},
                {"init", {{"preset", cfg.preset}, {"counts", counts_json(init)}}},
                {"seed", cfg.seed},
                {"t_end", *cfg.t_end},
                {"result", summary_json(result)},
                {"trajectory", {{"file", "trajectory.csv"}, {"rows", result.samples.size()}}},
                {"event_log", nullptr}};
    if (cfg.log_events) {
        std::string log = "t,kind,genotype,source\n";
        for (const auto& e : result.log)
            log += format_double(e.t) + "," + std::string(name(e.kind)) + "," + std::string(name(e.genotype)) + "," +
                   std::string(name(e.source)) + "\n";
        out.write_text("events.csv", log);
        report["event_log"] = {{"file", "events.csv"}, {"events", result.log.size()}};
    }
    return report;
}

json run_seed_sweep(const RunConfig& cfg, OutputDir& out, ExitCode& code) {
    const Counts init = stochastic_init(cfg);
    const auto n = static_cast<std::size_t>(cfg.seeds);
    std::vector<std::optional<InvasionTrial>> trials(n);
    std::vector<std::string> errors(n);
    parallel_for(n, cfg.threads, [&](std::size_t i) {
        try {
            trials[i] = invasion_trial(cfg.params, init, *cfg.t_end, stochastic_options(cfg, cfg.seed + i));
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    std::string table = "seed,outcome,status,t_final,events,aa,aA,AA,aB,AB,BB\n";
    json members = json::array();
    std::map<std::string, int> tally{{"recovered", 0}, {"lost_a", 0}, {"lost_B", 0}, {"undecided", 0}, {"failed", 0}};
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t seed = cfg.seed + i;
        if (!trials[i]) {
            ++tally["failed"];
            members.push_back({{"seed", seed}, {"outcome", "failed"}, {"error", errors[i]}});
            table += std::to_string(seed) + ",failed,,,,,,,,,\n";
            continue;
        }
        const auto& t = *trials[i];
        const std::string outcome(name(t.outcome));
        ++tally[outcome];
        const std::string file = "members/seed-" + std::to_string(seed) + ".csv";
        write_samples(out, file, t.result, cfg.params.K);
        members.push_back({{"seed", seed}, {"outcome", outcome}, {"file", file}, {"result", summary_json(t.result)}});
        table += std::to_string(seed) + "," + outcome + "," + std::string(name(t.result.status)) + "," +
                 format_double(t.result.t_final) + "," + std::to_string(t.result.events);
        for (const auto c : t.result.final_counts) table += "," + std::to_string(c);
        table += "\n";
    }
    out.write_text("sweep.csv", table);
    const int completed = cfg.seeds - tally["failed"];
    if (completed == 0) code = ExitCode::numeric;
    json summary = json(tally);
    summary["total"] = cfg.seeds;
    summary["recovery_fraction"] = completed > 0 ? json(static_cast<double>(tally["recovered"]) / completed) : json(nullptr);
    return {{"mode", "sweep"},
            {"over", "seed"},
            {"params", to_json(cfg.params)},
            {"init", {{"preset", cfg.preset}, {"counts", counts_json(init)}}},
            {"t_end", *cfg.t_end},
            {"first_seed", cfg.seed},
            {"members", members},
            {"recovery", summary},
            {"table", "sweep.csv"}};
}

json run_analyze(const RunConfig& cfg) {
    const auto& p = cfg.params;
    json report{{"mode", "analyze"}, {"params", to_json(p)}, {"target", cfg.target}};
    const bool all = cfg.target == "all";
    const auto fp = fixed_points(p);
    if (all || cfg.target == "fixed-points") report["fixed_points"] = to_json(fp);
    if (all || cfg.target == "spectra") {
        json spectra = json::array();
        for (const auto& x : fp.all) spectra.push_back(to_json(spectrum(x.label, x.n, p)));
        report["spectra"] = spectra;
        report["aA_eigenvalue_at_p_aB"] = {{"printed_form", printed_aA_eigenvalue(p)},
                                           {"exact", exact_aA_eigenvalue(p)}};
    }
    if (all || cfg.target == "threshold") {
        const auto e = r_extremum();
        report["threshold"] = {{"r_max", e.value},
                               {"argmax_lambda", e.argument},
                               {"eta_threshold", stability_threshold(p)},
                               {"eta_star", 4.0 * p.delta / equilibria(p).B}};
    }
    return report;
}

json run_manifold(const RunConfig& cfg, std::vector<std::string>& warnings, ExitCode& code) {
    const auto cm = center_manifold(cfg.params);
    json report{{"mode", "manifold"},
                {"params", to_json(cfg.params)},
                {"verdict", cm.verdict.attracting ? "attracting" : "repelling"},
                {"stability_threshold", stability_threshold(cfg.params)},
                {"reduction", to_json(cm)},
                {"flip_eta", nullptr}};
    if (cfg.flip) {
        try {
            report["flip_eta"] = verdict_flip_eta(cfg.params, 0.0, cfg.params.c * (1.0 - 1e-6), 1e-8);
        } catch (const ConfigError& e) {
            warnings.push_back(std::string("no verdict flip found: ") + e.what());
        }
    }
    if (!cm.closed_form_agrees) {
        warnings.push_back("closed-form reduced-flow coefficients disagree with the numeric solve (max relative "
                           "mismatch " + format_double(cm.max_relative_mismatch) +
                           "); the verdict uses the numeric coefficients");
        if (cfg.strict) code = ExitCode::numeric;
    }
    return report;
}

}  // namespace

RunOutcome run(const RunConfig& config, const fs::path& dir) {
    config.validate();
    const auto started = std::chrono::system_clock::now();
    const auto clock0 = std::chrono::steady_clock::now();

    RunOutcome outcome;
    outcome.dir = dir;
    OutputDir out(dir);
    out.write_text("config.txt", config.snapshot_text());

    json seeds = json::array();
    switch (config.mode) {
        case Mode::ode_run: outcome.report = run_ode(config, out); break;
        case Mode::phases: outcome.report = run_phase_mode(config); break;
        case Mode::sweep:
            if (config.over == "seed") {
                outcome.report = run_seed_sweep(config, out, outcome.exit_code);
                for (int i = 0; i < config.seeds; ++i) seeds.push_back(config.seed + static_cast<std::uint64_t>(i));
            } else {
                outcome.report = run_eps_sweep(config, out, outcome.exit_code);
            }
            break;
        case Mode::ssa_run:
            outcome.report = run_ssa(config, out);
            seeds.push_back(config.seed);
            break;
        case Mode::analyze: outcome.report = run_analyze(config); break;
        case Mode::manifold: outcome.report = run_manifold(config, outcome.warnings, outcome.exit_code); break;
    }
    outcome.report["warnings"] = outcome.warnings;
    out.write_json("report.json", outcome.report);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock0).count();
    json config_json = json::object();
    for (const auto& [k, v] : config.snapshot()) config_json[k] = v;
    out.write_manifest({{"tool", "mendel"},
                        {"version", std::string(tool_version())},
                        {"mode", std::string(name(config.mode))},
                        {"config", config_json},
                        {"seeds", seeds},
                        {"started_utc", utc_timestamp(started)},
                        {"wall_seconds", wall},
                        {"exit_code", static_cast<int>(outcome.exit_code)}});
    return outcome;
}

ExitCode exit_code_for(const std::exception_ptr& error) noexcept {
    try {
        std::rethrow_exception(error);
    } catch (const ConfigError&) {
        return ExitCode::config;
    } catch (const NumericError&) {
        return ExitCode::numeric;
    } catch (const IoError&) {
        return ExitCode::io;
    } catch (const fs::filesystem_error&) {
        return ExitCode::io;
    } catch (...) {
        return ExitCode::internal;
    }
}

}  // namespace mendel
