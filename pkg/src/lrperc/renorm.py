"""Multiscale good-box recursion and bad-box probability estimates."""

import math
import warnings
from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Tuple

import numpy as np

from .edges import EdgeList, sample_graph
from .metrics import _pmap, wilson_interval
from .params import BoxSpec, ModelParams, sample_weights
from .rng import substream
from .runio import ResourceBudgetError

__all__ = [
    "RenormSchedule",
    "GoodBoxVerdict",
    "PsiEstimate",
    "renorm_schedule",
    "required_margin",
    "is_good_box",
    "estimate_psi",
    "psi_bound",
]

_SCALE_CAP = 1 << 53  # keep scales exactly representable and boxes addressable


@dataclass(frozen=True)
class RenormSchedule:
    """Scale hierarchy m_n = a0 (n!)^2, i.e. m_n = m_{n-1} n^2."""

    a0: int
    m: Tuple[int, ...]

    @property
    def n_max(self) -> int:
        return len(self.m) - 1

    def branching(self, n: int) -> int:
        if n < 1:
            raise ValueError("levels below 1 have no children")
        return n * n if n > 1 else self.m[1] // self.m[0]


def renorm_schedule(a0: int, n_max: int) -> RenormSchedule:
    if a0 < 1 or n_max < 0:
        raise ValueError("need a0 >= 1 and n_max >= 0")
    m = [a0]
    for n in range(1, n_max + 1):
        nxt = m[-1] * n * n
        if nxt > _SCALE_CAP:
            raise ValueError(
                f"scale m_{n} = {nxt} exceeds the addressable cap {_SCALE_CAP}"
            )
        m.append(nxt)
    # m_1 = m_0: level 1 would have a single child, so require a0 paired
    # with n_max >= 1 to still make sense; the recursion handles it.
    return RenormSchedule(a0=a0, m=tuple(m))


def required_margin(schedule: RenormSchedule, n: int) -> int:
    """Region padding needed around a level-n box for all shifted checks."""
    total = schedule.m[0] // 2  # the level-0 checks shift by m_0 / 2 themselves
    for k in range(1, n + 1):
        total += schedule.m[k - 1] // 2
    return total


@dataclass(frozen=True)
class GoodBoxVerdict:
    level: int
    anchor: Tuple[int, ...]
    good: bool
    failure: Optional[str] = None


def _edges_in(box_origin, side, coords_i, coords_j) -> np.ndarray:
    lo = np.asarray(box_origin, dtype=np.int64)
    in_i = ((coords_i >= lo) & (coords_i < lo + side)).all(axis=1)
    in_j = ((coords_j >= lo) & (coords_j < lo + side)).all(axis=1)
    return in_i & in_j


def _has_long_edge(origin, side, threshold_scale, ci, cj, lsq) -> bool:
    """Any edge inside the box with 100 |e| > threshold_scale (exact integers)."""
    inside = _edges_in(origin, side, ci, cj)
    if not inside.any():
        return False
    return bool((10000 * lsq[inside] > threshold_scale * threshold_scale).any())


def is_good_box(edge_field: EdgeList, schedule: RenormSchedule, n: int, x) -> GoodBoxVerdict:
    """Recursive good-box predicate at level n anchored at x.

    Level 0: the box [x, x + m_0)^d and its half-scale shifts contain no
    occupied edge longer than m_0 / 100.  Level n: same long-edge check
    at scale m_n with threshold m_{n-1} / 100, plus at most 3^d bad
    level-(n-1) children among the m_n / m_{n-1} per-axis grid.
    """
    if not 0 <= n <= schedule.n_max:
        raise ValueError(f"level {n} outside schedule (n_max={schedule.n_max})")
    region = edge_field.box
    d = region.d
    coords = region.coords()
    ci, cj = coords[edge_field.i], coords[edge_field.j]
    diff = ci - cj
    lsq = np.einsum("ab,ab->a", diff, diff)
    return _good_recursive(schedule, n, tuple(int(v) for v in x), region, ci, cj, lsq, d)


def _good_recursive(schedule, n, x, region, ci, cj, lsq, d) -> GoodBoxVerdict:
    m_n = schedule.m[n]
    thresh = schedule.m[n - 1] if n >= 1 else schedule.m[0]
    shift = thresh // 2
    for jvec in product((-1, 0, 1), repeat=d):
        origin = tuple(x[a] + jvec[a] * shift for a in range(d))
        sub = BoxSpec.corner(origin, m_n)
        if not region.contains_box(sub):
            raise ValueError(
                f"shifted box at {origin} side {m_n} leaves the sampled region; "
                f"pad the region by required_margin(schedule, {n})"
            )
        if _has_long_edge(origin, m_n, thresh, ci, cj, lsq):
            return GoodBoxVerdict(n, x, False, failure=f"long_edge@shift{jvec}")
    if n == 0:
        return GoodBoxVerdict(0, x, True)
    m_child = schedule.m[n - 1]
    per_axis = m_n // m_child
    bad = 0
    for yvec in product(range(per_axis), repeat=d):
        anchor = tuple(x[a] + yvec[a] * m_child for a in range(d))
        verdict = _good_recursive(schedule, n - 1, anchor, region, ci, cj, lsq, d)
        if not verdict.good:
            bad += 1
            if bad > 3**d:
                return GoodBoxVerdict(n, x, False, failure=f"bad_children>{3**d}")
    return GoodBoxVerdict(n, x, True)


@dataclass(frozen=True)
class PsiEstimate:
    level: int
    a0: int
    psi_hat: float
    ci_low: float
    ci_high: float
    replicates: int


def estimate_psi(
    params: ModelParams,
    schedule: RenormSchedule,
    n: int,
    replicates: int,
    base_seed: int = 0,
    max_pairs: float = 5e8,
    threads: int = 1,
) -> PsiEstimate:
    """Monte Carlo estimate of P[the level-n box at the origin is bad].

    The sampled region pads the level-n box by required_margin so every
    shifted sub-box of the recursion lies inside it.  Refuses regions
    whose pair count exceeds ``max_pairs``, suggesting the largest a0
    that fits.
    """
    if n > schedule.n_max:
        raise ValueError("level beyond schedule")
    d = params.d
    if min(params.alpha, params.alpha * params.beta) <= 2 * d:
        warnings.warn(
            "long-edge decay needs min(alpha, beta*alpha) > 2d; "
            "the bad-box probability will not vanish with scale",
            stacklevel=2,
        )
    margin = required_margin(schedule, n)
    side = schedule.m[n] + 2 * margin
    n_vertices = side**d
    pairs = n_vertices * (n_vertices - 1) // 2
    if pairs > max_pairs:
        # invert side^d ~ sqrt(2 max_pairs) for a usable suggestion
        max_side = int((2 * max_pairs) ** (0.5 / d))
        scale = schedule.m[n] // schedule.a0
        suggestion = max(1, max_side // (scale + 2 * (margin // max(1, schedule.a0))))
        raise ResourceBudgetError(
            f"region of side {side} needs {pairs:.2e} pair evaluations "
            f"(budget {max_pairs:.0e}); try a0 <= {suggestion}"
        )
    origin = tuple(-margin for _ in range(d))
    region = BoxSpec.corner(origin, side)

    def one(rep):
        wf = sample_weights(region, params.beta, substream(base_seed, rep, 1))
        el = sample_graph(region, wf, params, seed=substream(base_seed, rep, 2))
        return not is_good_box(el, schedule, n, (0,) * d).good

    hits = int(sum(_pmap(one, replicates, threads)))
    lo, hi = wilson_interval(hits, replicates)
    return PsiEstimate(
        level=n, a0=schedule.a0, psi_hat=hits / replicates,
        ci_low=lo, ci_high=hi, replicates=replicates,
    )


def psi_bound(n: int, d: int) -> float:
    """Target decay 3^-d 2^(-4d-1) e^-2 (n+1)^(-4d) e^(-2n) for bad boxes."""
    if n < 0 or d < 1:
        raise ValueError("need n >= 0 and d >= 1")
    return (
        3.0**-d * 2.0 ** (-4 * d - 1) * math.exp(-2.0)
        * float(n + 1) ** (-4 * d) * math.exp(-2.0 * n)
    )
