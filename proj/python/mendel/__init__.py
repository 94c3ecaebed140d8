"""Three-allele Mendelian population model.

Thin layer over the compiled core. Structured reports come back as dicts with
the same layout as the JSON files written by the `mendel` command line tool.
"""

import json

from . import _core
from ._core import (
    CSV_HEADER,
    ConfigError,
    IoError,
    ModelParams,
    NumericError,
    __version__,
    birth_rates,
    birth_rates_oracle,
    coexistence_point,
    death_rates,
    equilibria,
    integrate,
    r_max,
    second_mutation_state,
    stability_threshold,
    vector_field,
)

GENOTYPES = ("aa", "aA", "AA", "aB", "AB", "BB")


def phases(params, eps=0.01, eps0=0.03, t2_delta=0.05, entry_radius=0.01):
    """Phase times and allele-a functionals of the second-mutation run."""
    return json.loads(_core.phases(params, eps, eps0, t2_delta, entry_radius))


def simulate(params, init, t_max, seed=1, sample_dt=0.0):
    """Exact stochastic run from integer counts. Returns (times, samples, summary)."""
    times, samples, summary = _core.simulate(params, list(init), t_max, seed, sample_dt)
    return times, samples, json.loads(summary)


def fixed_points(params):
    return json.loads(_core.fixed_points(params))


def spectrum(label, state, params):
    return json.loads(_core.spectrum(label, list(state), params))


def center_manifold(params):
    return json.loads(_core.center_manifold(params))


def run(mode, settings=None, out=""):
    """Runs one CLI mode into a directory; settings use the config-file keys.

    Returns (exit_code, directory, report, warnings).
    """
    values = {k: _setting(v) for k, v in (settings or {}).items()}
    code, directory, report, warnings = _core.run(mode, values, str(out))
    return code, directory, json.loads(report), warnings


def _setting(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_setting(v) for v in value)
    return str(value)


__all__ = [
    "CSV_HEADER",
    "ConfigError",
    "GENOTYPES",
    "IoError",
    "ModelParams",
    "NumericError",
    "__version__",
    "birth_rates",
    "birth_rates_oracle",
    "center_manifold",
    "coexistence_point",
    "death_rates",
    "equilibria",
    "fixed_points",
    "integrate",
    "phases",
    "r_max",
    "run",
    "second_mutation_state",
    "simulate",
    "spectrum",
    "stability_threshold",
    "vector_field",
]
