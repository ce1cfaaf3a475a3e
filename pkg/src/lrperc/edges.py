"""Edge probabilities, graph sampling, and the monotone intensity coupling.

The sampler realizes each pair's coupled exponential
phi = -ln(u) |x-y|^alpha / (W_x W_y) from one uniform per pair, so the
occupied graph at intensity lam is exactly the set of pairs with
phi < lam.  Slicing the same realization at increasing thresholds gives
nested edge sets, which is what the monotone sweeps in the metrics
module rely on.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .params import BoxSpec, ModelParams, WeightField, sample_weights
from .rng import TAG_EDGE, stream_key, uniform01

__all__ = [
    "EdgeList",
    "CoupledEdgeField",
    "TailBoundParams",
    "edge_probability",
    "phi_from_uniform",
    "sample_graph",
    "open_edges_at",
    "pair_connection_expectation",
    "truncation_error_bound",
    "tail_edge_bound",
    "calibrate_tail_bound",
]


@dataclass(frozen=True)
class EdgeList:
    """Occupied unordered pairs on a box, as vertex-index arrays i < j."""

    box: BoxSpec
    i: np.ndarray = field(repr=False)
    j: np.ndarray = field(repr=False)
    lambda_used: float = 0.0
    truncation_radius: Optional[float] = None
    truncation_error_bound: Optional[float] = None

    @property
    def n_edges(self) -> int:
        return len(self.i)

    def pairs(self) -> set:
        return set(zip(self.i.tolist(), self.j.tolist()))

    def lengths_sq(self) -> np.ndarray:
        c = self.box.coords()
        diff = c[self.i] - c[self.j]
        return np.einsum("ij,ij->i", diff, diff)


@dataclass(frozen=True)
class CoupledEdgeField:
    """One realization of the coupled exponentials, materialized below ell_max.

    Only pairs with phi < ell_max are stored; any other pair's phi can be
    recomputed lazily from the seeds via ``phi_at``.
    """

    box: BoxSpec
    params: ModelParams
    weight_field: WeightField
    weights_seed: int
    edge_seed: int
    ell_max: float
    i: np.ndarray = field(repr=False)
    j: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    truncation_radius: Optional[float] = None

    def phi_at(self, x, y) -> float:
        """Coupled exponential of an arbitrary in-box pair."""
        a, b = self.box.index_of(x), self.box.index_of(y)
        if a == b:
            raise ValueError("no self-edges")
        if a > b:
            a, b = b, a
        n = self.box.n_vertices
        k = a * (2 * n - a - 1) // 2 + (b - a - 1)
        u = uniform01(stream_key(self.edge_seed, TAG_EDGE), k)
        w = self.weight_field.weights
        cx = np.asarray(self.box.vertex(a)) - np.asarray(self.box.vertex(b))
        r = math.sqrt(float((cx * cx).sum()))
        return phi_from_uniform(u, float(w[a]), float(w[b]), r, self.params.alpha)


def edge_probability(params: ModelParams, w_x: float, w_y: float, r: float) -> float:
    """Occupation probability 1 - exp(-lam w_x w_y r^-alpha)."""
    if r <= 0:
        raise ValueError("pair distance must be positive (no self-edges)")
    if w_x < 1 or w_y < 1:
        raise ValueError("weights are >= 1 by construction")
    rate = params.lam * w_x * w_y * r**-params.alpha
    return -math.expm1(-rate)


def phi_from_uniform(u: float, w_x: float, w_y: float, r: float, alpha: float) -> float:
    """Map one uniform to the pair's coupled exponential variable."""
    if not 0 < u < 1:
        raise ValueError(f"u must lie strictly in (0,1), got {u}")
    if r <= 0:
        raise ValueError("pair distance must be positive")
    if w_x < 1 or w_y < 1:
        raise ValueError("weights are >= 1 by construction")
    return -math.log(u) * r**alpha / (w_x * w_y)


def sample_graph(
    box: BoxSpec,
    weight_field: WeightField,
    params: ModelParams,
    seed: int,
    mode: str = "exact",
    radius: Optional[float] = None,
) -> EdgeList:
    """Sample the occupied-edge set on a box.

    ``exact`` visits every unordered pair; ``truncated`` only pairs with
    |x-y| <= radius and attaches the expected number of missed edges as
    ``truncation_error_bound``.
    """
    if weight_field.box != box:
        raise ValueError("weight field does not cover the requested box")
    if mode == "exact":
        rmax = -1.0
    elif mode == "truncated":
        if radius is None or radius <= 0:
            raise ValueError("truncated mode needs a positive radius")
        rmax = float(radius)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    coords = box.coords()
    ei, ej = kernels.sample_edges(
        coords, weight_field.weights, params.lam, params.alpha, seed, rmax
    )
    bound = None
    if mode == "truncated":
        bound = truncation_error_bound(box, params, radius)
    return EdgeList(
        box=box,
        i=ei,
        j=ej,
        lambda_used=params.lam,
        truncation_radius=radius if mode == "truncated" else None,
        truncation_error_bound=bound,
    )


def sample_coupled_field(
    box: BoxSpec,
    params: ModelParams,
    ell_max: float,
    weights_seed: int,
    edge_seed: int,
    radius: Optional[float] = None,
) -> CoupledEdgeField:
    """Sample weights plus all coupled exponentials below ``ell_max``."""
    if ell_max <= 0:
        raise ValueError("ell_max must be positive")
    wf = sample_weights(box, params.beta, weights_seed)
    rmax = float(radius) if radius is not None else -1.0
    coords = box.coords()
    ei, ej, phi = kernels.sample_phi_edges(
        coords, wf.weights, params.alpha, edge_seed, ell_max, rmax
    )
    return CoupledEdgeField(
        box=box,
        params=params,
        weight_field=wf,
        weights_seed=weights_seed,
        edge_seed=edge_seed,
        ell_max=ell_max,
        i=ei,
        j=ej,
        phi=phi,
        truncation_radius=radius,
    )


def open_edges_at(field: CoupledEdgeField, ell: float) -> EdgeList:
    """Edges with phi < ell; nested across increasing ell by construction."""
    if ell <= 0:
        raise ValueError("ell must be positive")
    if ell > field.ell_max:
        raise ValueError(f"ell={ell} exceeds the materialized ell_max={field.ell_max}")
    keep = field.phi < ell
    return EdgeList(box=field.box, i=field.i[keep], j=field.j[keep], lambda_used=ell)


def pair_connection_expectation(u: float, beta: float) -> float:
    """E[min(W1 W2 / u, 1)] for independent unit-scale Pareto weights.

    Closed form via (1/u)(1 + int_1^u v^-beta (1 + beta ln v) dv); the
    beta=1 antiderivative is ln v + (ln v)^2 / 2.
    """
    if u <= 0 or beta <= 0:
        raise ValueError("u and beta must be positive")
    if u <= 1.0:
        return 1.0
    lu = math.log(u)
    if beta == 1.0:
        integral = lu + 0.5 * lu * lu
    else:
        b1 = 1.0 - beta
        integral = (u**b1 - 1.0) / b1 + beta * (u**b1 * (b1 * lu - 1.0) + 1.0) / (b1 * b1)
    return (1.0 + integral) / u


def _pair_connection_expectation_vec(u: np.ndarray, beta: float) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    out = np.ones_like(u)
    big = u > 1.0
    if big.any():
        ub = u[big]
        lu = np.log(ub)
        if beta == 1.0:
            integral = lu + 0.5 * lu * lu
        else:
            b1 = 1.0 - beta
            integral = (ub**b1 - 1.0) / b1 + beta * (ub**b1 * (b1 * lu - 1.0) + 1.0) / (b1 * b1)
        out[big] = (1.0 + integral) / ub
    return out


def _displacement_counts(side: int, d: int):
    """Unordered in-box pair counts per squared displacement length.

    Returns (rsq, counts) arrays over all displacement classes of the
    side^d box.
    """
    rng = np.arange(-(side - 1), side, dtype=np.int64)
    grids = np.meshgrid(*([rng] * d), indexing="ij")
    counts = np.ones_like(grids[0])
    rsq = np.zeros_like(grids[0])
    for g in grids:
        counts = counts * (side - np.abs(g))
        rsq = rsq + g * g
    rsq = rsq.ravel()
    counts = counts.ravel()
    keep = rsq > 0
    rsq, counts = rsq[keep], counts[keep]
    # aggregate ordered pairs per rsq class, then halve
    order = np.argsort(rsq, kind="stable")
    rsq, counts = rsq[order], counts[order]
    uniq, start = np.unique(rsq, return_index=True)
    sums = np.add.reduceat(counts, start)
    return uniq, sums // 2


def truncation_error_bound(box: BoxSpec, params: ModelParams, radius: float) -> float:
    """Expected number of occupied edges longer than ``radius`` in the box.

    Union bound: sum over unordered pairs with |x-y| > radius of
    E[min(lam W_x W_y |x-y|^-alpha, 1)].
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if params.lam == 0:
        return 0.0
    rsq, counts = _displacement_counts(box.side, box.d)
    far = rsq.astype(np.float64) > radius * radius
    if not far.any():
        return 0.0
    r_alpha = rsq[far].astype(np.float64) ** (0.5 * params.alpha)
    e = _pair_connection_expectation_vec(r_alpha / params.lam, params.beta)
    return float(np.sum(counts[far].astype(np.float64) * e))


@dataclass(frozen=True)
class TailBoundParams:
    """Calibrated constants (c1, t0, delta) of the long-edge tail bound."""

    delta: float
    c1: float
    t0: float
    d: int
    alpha: float
    beta: float

    def __post_init__(self):
        limit = self.alpha * min(self.beta, 1.0) - self.d
        if not 0 < self.delta < limit:
            raise ValueError(f"delta must lie in (0, {limit}), got {self.delta}")
        if self.c1 <= 0 or self.t0 < 1:
            raise ValueError("need c1 > 0 and t0 >= 1")

    @property
    def exponent(self) -> float:
        return self.d - self.alpha * min(self.beta, 1.0) + self.delta


def tail_edge_bound(s: float, t: float, tail_params: TailBoundParams, params: ModelParams) -> float:
    """Power-law bound min(1, c1 s^d t^(d - alpha(beta^1) + delta))."""
    if t < tail_params.t0:
        raise ValueError(f"t={t} below calibrated t0={tail_params.t0}")
    if s < 1:
        raise ValueError("s must be >= 1")
    if tail_params.exponent >= 0:
        raise ValueError("tail exponent must be negative")
    return min(1.0, tail_params.c1 * s**params.d * t**tail_params.exponent)


def calibrate_tail_bound(
    params: ModelParams,
    s: int,
    t0: float,
    delta: Optional[float] = None,
) -> TailBoundParams:
    """Instantiate (c1, t0, delta) so the bound matches the exact pair sum at t0.

    The constants are existential in the underlying estimate; this picks
    the smallest c1 that dominates the union bound at the anchor point,
    with delta defaulting to half the admissible interval.
    """
    limit = params.alpha * min(params.beta, 1.0) - params.d
    if limit <= 0:
        raise ValueError("requires alpha * min(beta,1) > d")
    if delta is None:
        delta = limit / 2.0
    box = BoxSpec.corner((0,) * params.d, int(s))
    exact = truncation_error_bound(box, params, t0)
    exponent = params.d - params.alpha * min(params.beta, 1.0) + delta
    c1 = max(exact, 1e-300) / (float(s) ** params.d * float(t0) ** exponent)
    return TailBoundParams(
        delta=delta, c1=c1, t0=max(1.0, float(t0)), d=params.d,
        alpha=params.alpha, beta=params.beta,
    )
