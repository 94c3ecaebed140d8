#pragma once

// Run configuration and the six run modes behind the command-line tool.
//
// Settings come from defaults, then an optional key = value file, then
// command-line flags. Every run writes into its own directory: data files,
// report.json, config.txt (the resolved settings) and finally manifest.json.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mendel/keyvalue.hpp"
#include "mendel/phases.hpp"

namespace mendel {

enum class Mode { ode_run, ssa_run, sweep, analyze, phases, manifold };
std::string_view name(Mode m) noexcept;
std::optional<Mode> parse_mode(std::string_view text) noexcept;

enum class ExitCode : int { ok = 0, internal = 1, config = 2, numeric = 3, io = 4 };

struct RunConfig {
    Mode mode = Mode::ode_run;
    ModelParams params;

    /// second-mutation | custom | p_A | p_B | p_aB
    std::string preset = "second-mutation";
    State custom_init{};
    PhaseSettings phase;

    std::optional<double> t_end;  ///< unset means auto (phase runs only)
    double extension_cap = 10.0;
    double tol = 1e-10;
    double max_step = 0.1;
    /// Output grid spacing; 0 writes every accepted ODE step, or t_end / 1000 for SSA.
    double sample_dt = 0.0;

    std::uint64_t seed = 1;
    int seeds = 32;
    std::int64_t founders = 0;  ///< minimum AB count in the stochastic preset
    bool log_events = false;
    double population_cap = 0.0;
    unsigned threads = 0;

    std::optional<std::vector<double>> eps_grid;  ///< unset: 1e-2 * 10^(-k/2), k = 0..3
    std::string over = "eps";                      ///< sweep axis: eps (ODE) or seed (SSA)
    std::string target = "all";                    ///< analyze: fixed-points | spectra | threshold | all
    bool strict = false;                           ///< manifold: closed-form mismatch is an error
    bool flip = false;                             ///< manifold: bisect the verdict flip in eta
    std::string name;                              ///< run directory name; empty derives one

    /// Applies one setting. Throws ConfigError for unknown keys or bad values.
    void set(std::string_view key, std::string_view value);
    void apply(const KeyValues& values);
    /// Every setting in `set` form; feeding it back reproduces the run.
    KeyValues snapshot() const;
    std::string snapshot_text() const;
    /// Throws ConfigError on any violated constraint, including the
    /// Delta > t2-delta > eps0 > eps ordering for phase runs.
    void validate() const;

    std::vector<double> resolved_eps_grid() const;
    State initial_state() const;
};

/// Keys accepted by RunConfig::set, in snapshot order.
const std::vector<std::string>& config_keys();

/// Reads a key = value file; IoError if unreadable, ConfigError if malformed.
KeyValues read_config_file(const std::filesystem::path& path);

/// output_root() / name, or a name derived from the mode and a hash of the
/// settings; a numeric suffix avoids directories holding a finished run.
std::filesystem::path default_run_dir(const RunConfig& config);

struct RunOutcome {
    ExitCode exit_code = ExitCode::ok;
    std::filesystem::path dir;
    nlohmann::json report;
    std::vector<std::string> warnings;
};

/// Validates, runs, writes artifacts into `dir` and seals them with the
/// manifest. Throws ConfigError / NumericError / IoError.
RunOutcome run(const RunConfig& config, const std::filesystem::path& dir);

/// Exit code for an exception escaping `run`.
ExitCode exit_code_for(const std::exception_ptr& error) noexcept;

std::string_view tool_version() noexcept;

}  // namespace mendel
