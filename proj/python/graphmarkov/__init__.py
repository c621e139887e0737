"""Graph Markov network forecasting for sensor graphs with missing data.

Thin Python layer over the C++ core. Arrays are float64 numpy arrays; series
are laid out T x S (time by sensor).
"""

from ._core import (
    Graph,
    Model,
    fit,
    inject_missing,
    metrics,
    random_ring_graph,
    read_series,
    simulate,
    spectral_basis,
)

try:
    from ._core import run_cli
except ImportError:  # built without the command-line tool
    run_cli = None

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "Model",
    "fit",
    "inject_missing",
    "metrics",
    "random_ring_graph",
    "read_series",
    "run_cli",
    "simulate",
    "spectral_basis",
]
