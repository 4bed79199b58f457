"""Mixing of the exclusion process on regular graphs: graphs, spectra,
graphical constructions, the chameleon process, exact small-chain oracles
and round diagnostics."""

from .graph_core import (
    Graph,
    GraphSpec,
    ModifiedGraph,
    build_graph,
    complete_graph,
    cycle_graph,
    degree_inflate,
    hypercube,
    path_graph,
    torus,
)
from .spectral import SpectralData, eigendecompose, heat_kernel

__all__ = [
    "Graph",
    "GraphSpec",
    "ModifiedGraph",
    "SpectralData",
    "build_graph",
    "complete_graph",
    "cycle_graph",
    "degree_inflate",
    "eigendecompose",
    "heat_kernel",
    "hypercube",
    "path_graph",
    "torus",
]

__version__ = "0.1.0"
