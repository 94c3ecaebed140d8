#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "mendel/error.hpp"
#include "mendel/run.hpp"

namespace {

using mendel::Mode;

const std::vector<std::string> kModelKeys{"f", "D", "delta", "c", "eta", "c_aB", "compat"};
const std::vector<std::string> kPhaseKeys{"eps", "eps0", "t2-delta", "entry-radius", "t3-level"};
const std::vector<std::string> kOdeKeys{"t-end", "extension-cap", "tol", "max-step"};

struct Subcommand {
    Mode mode;
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;
    std::map<std::string, bool> flags;
    std::string config_file;
    std::string out;
};

const char* describe(const std::string& key) {
    static const std::map<std::string, const char*> help{
        {"f", "fertility"},
        {"D", "natural death rate of phenotype A"},
        {"delta", "death-rate increment Delta (a dies at D+Delta, B at D-Delta)"},
        {"c", "competition rate"},
        {"eta", "competition reduction between aA and BB"},
        {"c_aB", "competition between phenotypes a and B"},
        {"compat", "no-reproduction-a-B | all-with-all"},
        {"K", "carrying capacity"},
        {"mu", "mutation probability per birth"},
        {"preset", "initial state: second-mutation | custom | p_A | p_B | p_aB"},
        {"init", "custom initial densities, e.g. aa=0.1,BB=2"},
        {"eps", "second-mutation scale"},
        {"eps0", "B-phenotype level defining T1"},
        {"t2-delta", "proportionality factor defining T2"},
        {"entry-radius", "sup-norm radius of the p_aB neighbourhood"},
        {"t3-level", "aa level defining T3 (auto: nbar_a - eps0)"},
        {"t-end", "horizon, or auto"},
        {"extension-cap", "auto horizon may grow to this multiple while waiting for p_aB entry"},
        {"tol", "relative integration tolerance"},
        {"max-step", "integrator step cap"},
        {"sample-dt", "output grid spacing (0: every step / t-end/1000 for SSA)"},
        {"seed", "random seed (first seed for a seed sweep)"},
        {"seeds", "number of seeds in a seed sweep"},
        {"founders", "minimum AB count in the stochastic second-mutation preset"},
        {"population-cap", "population that aborts a stochastic run (0: 100 K nbar_B)"},
        {"threads", "worker threads (0: all cores)"},
        {"eps-grid", "comma-separated eps values, or auto"},
        {"over", "sweep axis: eps | seed"},
        {"name", "run directory name under the output root"},
        {"log-events", "write events.csv"},
        {"strict", "exit 3 when closed-form and numeric coefficients disagree"},
        {"flip", "bisect the eta at which the verdict flips"},
    };
    const auto it = help.find(key);
    return it == help.end() ? "" : it->second;
}

void add_values(Subcommand& sub, const std::vector<std::string>& keys) {
    for (const auto& key : keys) sub.app->add_option("--" + key, sub.values[key], describe(key));
}

void add_flags(Subcommand& sub, const std::vector<std::string>& keys) {
    for (const auto& key : keys) sub.app->add_flag("--" + key, sub.flags[key], describe(key));
}

std::string message_of(const std::exception_ptr& error) {
    try {
        std::rethrow_exception(error);
    } catch (const std::exception& e) {
        return e.what();
    } catch (...) {
        return "unknown error";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Three-allele Mendelian population model: simulation and analysis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(mendel::tool_version()));

    std::vector<Subcommand> subs;
    subs.reserve(6);
    auto make = [&](Mode mode, const std::string& description) -> Subcommand& {
        subs.push_back({mode});
        auto& sub = subs.back();
        sub.app = app.add_subcommand(std::string(mendel::name(mode)), description);
        sub.app->add_option("--config", sub.config_file, "key = value settings file")->check(CLI::ExistingFile);
        sub.app->add_option("--out", sub.out, "output directory (default: output root / derived name)");
        add_values(sub, kModelKeys);
        add_values(sub, {"name"});
        return sub;
    };

    auto& ode = make(Mode::ode_run, "integrate the deterministic system, write trajectory and phase report");
    ode.app->alias("ode");
    add_values(ode, {"preset", "init"});
    add_values(ode, kPhaseKeys);
    add_values(ode, kOdeKeys);
    add_values(ode, {"sample-dt"});

    auto& ssa = make(Mode::ssa_run, "exact stochastic simulation at carrying capacity K");
    ssa.app->alias("ssa");
    add_values(ssa, {"K", "mu", "preset", "init", "eps", "founders", "t-end", "sample-dt", "seed", "population-cap"});
    add_flags(ssa, {"log-events"});

    auto& sweep = make(Mode::sweep, "phase runs over an eps grid, or stochastic invasion trials over seeds");
    add_values(sweep, {"over", "eps-grid", "threads"});
    add_values(sweep, kPhaseKeys);
    add_values(sweep, kOdeKeys);
    add_values(sweep,
               {"K", "mu", "preset", "init", "founders", "seed", "seeds", "sample-dt", "population-cap"});

    auto& analyze = make(Mode::analyze, "fixed points, spectra and the stability threshold");
    analyze.app->add_option("target", analyze.values["target"], "fixed-points | spectra | threshold | all");

    auto& phases = make(Mode::phases, "phase times and allele-a functionals without a trajectory file");
    add_values(phases, kPhaseKeys);
    add_values(phases, kOdeKeys);

    auto& manifold = make(Mode::manifold, "second-order centre-manifold reduction at p_aB");
    add_flags(manifold, {"strict", "flip"});

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(mendel::ExitCode::config);
    }

    Subcommand* chosen = nullptr;
    for (auto& sub : subs)
        if (sub.app->parsed()) chosen = &sub;

    try {
        mendel::RunConfig config;
        config.mode = chosen->mode;
        if (!chosen->config_file.empty()) {
            auto values = mendel::read_config_file(chosen->config_file);
            if (const auto it = values.find("mode"); it != values.end()) {
                if (it->second != mendel::name(chosen->mode))
                    throw mendel::ConfigError("config file is for mode '" + it->second + "'");
                values.erase(it);
            }
            config.apply(values);
        }
        for (const auto& [key, value] : chosen->values)
            if (chosen->app->count(key == "target" ? "target" : "--" + key) > 0) config.set(key, value);
        for (const auto& [key, on] : chosen->flags)
            if (on) config.set(key, "true");

        config.validate();
        const auto dir = chosen->out.empty() ? mendel::default_run_dir(config) : std::filesystem::path(chosen->out);
        const auto outcome = mendel::run(config, dir);
        for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << '\n';
        if (outcome.report.contains("verdict")) std::cout << "verdict: " << outcome.report["verdict"].get<std::string>() << '\n';
        std::cout << outcome.dir.string() << '\n';
        return static_cast<int>(outcome.exit_code);
    } catch (...) {
        const auto error = std::current_exception();
        std::cerr << "error: " << message_of(error) << '\n';
        return static_cast<int>(mendel::exit_code_for(error));
    }
}
