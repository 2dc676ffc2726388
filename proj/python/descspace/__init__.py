"""Description-space analysis of small discrete systems.

Thin convenience layer over the compiled core: objectives and training
configs are plain dicts here and serialized JSON at the boundary.
"""

import json as _json

from descspace._core import (
    DescspaceError,
    Encoder,
    Table,
    __version__,
    bell_number,
    build_ising,
    build_sudoku,
    build_table,
    component_entropies,
    description_joint,
    description_o,
    description_tc,
    entropy,
    enumerate_partitions,
    generate_boards,
    harden,
    load_ngrams,
    load_system,
    mc_mutual_information,
    o_information,
    pointwise_o,
    pointwise_tc,
    random_bsc_survey,
    rejection_sample_hard,
    subsystem_points,
    total_correlation,
)
from descspace import _core


def tc_objective(n_components, direction, iin_bits):
    """Total-correlation objective as a dict (terms, weights, direction)."""
    return _json.loads(_core.tc_objective_json(n_components, direction, iin_bits))


def o_objective(n_components, direction, iin_bits):
    """O-information objective as a dict."""
    return _json.loads(_core.o_objective_json(n_components, direction, iin_bits))


def evaluate(table, objective, encoders, n_samples=200000, seed=0):
    return _core.evaluate(table, _json.dumps(objective), encoders, n_samples, seed)


def run_point(table, objective, config=None):
    return _core.run_point(table, _json.dumps(objective), _json.dumps(config or {}))


def run_scan(table, objective, config=None):
    return _core.run_scan(table, _json.dumps(objective), _json.dumps(config or {}))


def best_of_points(table, objective, config=None, repeats=1):
    return _core.best_of_points(
        table, _json.dumps(objective), _json.dumps(config or {}), repeats
    )


__all__ = [
    "DescspaceError",
    "Encoder",
    "Table",
    "__version__",
    "bell_number",
    "best_of_points",
    "build_ising",
    "build_sudoku",
    "build_table",
    "component_entropies",
    "description_joint",
    "description_o",
    "description_tc",
    "entropy",
    "enumerate_partitions",
    "evaluate",
    "generate_boards",
    "harden",
    "load_ngrams",
    "load_system",
    "mc_mutual_information",
    "o_information",
    "o_objective",
    "pointwise_o",
    "pointwise_tc",
    "random_bsc_survey",
    "rejection_sample_hard",
    "run_point",
    "run_scan",
    "subsystem_points",
    "tc_objective",
    "total_correlation",
]
