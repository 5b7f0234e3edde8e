"""Hierarchical circuit architectures: motif algebra, digraph lowering,
statevector simulation, training and evolutionary search."""

from ._motiq import (
    ConfigError,
    Motif,
    NumericError,
    Program,
    Registry,
    compile,
    draw,
    encode,
    enumerate_sweep_size,
    evaluate,
    expand_filter,
    expectation_z,
    fit,
    ground_state,
    parse,
    qconv,
    qdense,
    qfree,
    qpool,
    readout_probability,
    resolve_graphs,
    reverse_binary_tree,
    run,
    run_search,
    sample_complexity,
    to_expr,
    unitary_counts,
    zero_state,
)

__all__ = [
    "ConfigError",
    "Motif",
    "NumericError",
    "Program",
    "Registry",
    "compile",
    "draw",
    "encode",
    "enumerate_sweep_size",
    "evaluate",
    "expand_filter",
    "expectation_z",
    "fit",
    "ground_state",
    "parse",
    "qconv",
    "qdense",
    "qfree",
    "qpool",
    "readout_probability",
    "resolve_graphs",
    "reverse_binary_tree",
    "run",
    "run_search",
    "sample_complexity",
    "to_expr",
    "unitary_counts",
    "zero_state",
]

__version__ = "0.1.0"
