"""Inhomogeneous long-range percolation on finite boxes of Z^d.

Vertices carry i.i.d. Pareto weights and each pair (x, y) is joined
independently with probability 1 - exp(-lam W_x W_y / |x-y|^alpha).
The package provides exact and truncated samplers, a monotone coupling
across intensities, cluster/degree/distance estimators, a multiscale
box renormalization, and an exhaustive-enumeration oracle for tiny
instances.
"""

from .edges import (
    CoupledEdgeField,
    EdgeList,
    edge_probability,
    open_edges_at,
    sample_coupled_field,
    sample_graph,
    truncation_error_bound,
)
from .kernels import BACKEND
from .params import (
    BoxSpec,
    ModelParams,
    PhaseClass,
    WeightField,
    classify_phase,
    make_params,
    sample_weights,
)

__all__ = [
    "BACKEND",
    "BoxSpec",
    "CoupledEdgeField",
    "EdgeList",
    "ModelParams",
    "PhaseClass",
    "WeightField",
    "classify_phase",
    "edge_probability",
    "make_params",
    "open_edges_at",
    "sample_coupled_field",
    "sample_graph",
    "sample_weights",
    "truncation_error_bound",
]

__version__ = "0.1.0"
