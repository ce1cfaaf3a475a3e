"""Monte Carlo estimators for percolation, degree and distance statistics."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from . import kernels
from .clusters import components, largest_component
from .edges import EdgeList, open_edges_at, sample_coupled_field, sample_graph
from .params import BoxSpec, ModelParams, PhaseClass, classify_phase, sample_weights
from .rng import substream

__all__ = [
    "ThetaEstimate",
    "DegreeTailEstimate",
    "DistanceScalingReport",
    "LambdaCReport",
    "estimate_theta",
    "theta_curve",
    "estimate_lambda_c",
    "degree_histogram",
    "tail_exponent",
    "graph_distance",
    "distance_scaling_report",
    "box_theorem_check",
    "wilson_interval",
]

UNREACHABLE = math.inf


def wilson_interval(hits: int, n: int, z: float = 1.96) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise ValueError("need n >= 1")
    phat = hits / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if hits == 0 else max(0.0, center - half)
    hi = 1.0 if hits == n else min(1.0, center + half)
    return lo, hi


def _pmap(fn, count: int, threads: int) -> list:
    """Run fn(0..count-1), optionally on a thread pool; order-stable."""
    if threads <= 1:
        return [fn(r) for r in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))


@dataclass(frozen=True)
class ThetaEstimate:
    lam: float
    proxy: str
    estimate: float
    ci_low: float
    ci_high: float
    replicates: int
    box_radius: int


def _proxy_indicator(box: BoxSpec, edge_list: EdgeList, proxy: str, rho0: float) -> bool:
    labels = kernels.union_find(box.n_vertices, edge_list.i, edge_list.j)
    center = box.index_of(box.center)
    if proxy == "BoundaryReach":
        boundary = np.nonzero(box.boundary_mask())[0]
        return bool((labels[boundary] == labels[center]).any())
    if proxy == "LargestClusterMembership":
        roots, counts = np.unique(labels, return_counts=True)
        best = counts.max()
        winner = roots[counts == best].min()
        return bool(labels[center] == winner and best >= rho0 * box.n_vertices)
    raise ValueError(f"unknown proxy {proxy!r}")


def theta_curve(
    params: ModelParams,
    lambda_grid: Sequence[float],
    box_radius: int,
    replicates: int,
    base_seed: int,
    proxy: str = "BoundaryReach",
    rho0: float = 0.05,
    threads: int = 1,
) -> List[ThetaEstimate]:
    """Percolation-proxy frequencies on a shared coupled realization per replicate.

    Each replicate is sampled once at the top of the grid and sliced at
    every lambda, so the returned estimates are non-decreasing on every
    run, not merely on average.
    """
    grid = [float(x) for x in lambda_grid]
    if not grid or any(x <= 0 for x in grid) or sorted(grid) != grid or len(set(grid)) != len(grid):
        raise ValueError("lambda grid must be strictly increasing and positive")
    if box_radius < 1:
        raise ValueError("box radius must be >= 1 (single-vertex box has no boundary)")
    if replicates < 1:
        raise ValueError("need at least one replicate")
    box = BoxSpec.centered_at((0,) * params.d, box_radius)
    ell_max = grid[-1] * (1.0 + 1e-12)  # strict phi < lam comparisons stay inside

    def one(rep: int) -> np.ndarray:
        fld = sample_coupled_field(
            box, params, ell_max,
            weights_seed=substream(base_seed, rep, 1),
            edge_seed=substream(base_seed, rep, 2),
        )
        return np.array(
            [_proxy_indicator(box, open_edges_at(fld, lam), proxy, rho0) for lam in grid]
        )

    ind = np.array(_pmap(one, replicates, threads))
    out = []
    for col, lam in enumerate(grid):
        hits = int(ind[:, col].sum())
        lo, hi = wilson_interval(hits, replicates)
        out.append(
            ThetaEstimate(lam, proxy, hits / replicates, lo, hi, replicates, box_radius)
        )
    return out


def estimate_theta(
    params: ModelParams,
    box_radius: int,
    replicates: int,
    proxy: str = "BoundaryReach",
    base_seed: int = 0,
    rho0: float = 0.05,
    threads: int = 1,
) -> ThetaEstimate:
    """Single-intensity percolation proxy; lam = 0 is exactly 0."""
    if params.lam == 0:
        if box_radius < 1:
            raise ValueError("box radius must be >= 1")
        return ThetaEstimate(0.0, proxy, 0.0, 0.0, 0.0, replicates, box_radius)
    return theta_curve(
        params, [params.lam], box_radius, replicates, base_seed, proxy, rho0, threads
    )[0]


@dataclass(frozen=True)
class LambdaCReport:
    radii: Tuple[int, ...]
    brackets: Tuple[Tuple[float, float], ...]
    crossing_level: float
    replicates: int

    @property
    def final_bracket(self) -> Tuple[float, float]:
        return self.brackets[-1]


def estimate_lambda_c(
    params: ModelParams,
    box_radii: Sequence[int],
    crossing_level: float = 0.5,
    tol: float = 0.05,
    replicates: int = 200,
    base_seed: int = 0,
    lam_cap: float = 1024.0,
    threads: int = 1,
) -> LambdaCReport:
    """Finite-size surrogate for the critical intensity by bisection.

    Per radius, the boundary-reach frequency is computed on a fixed set
    of coupled replicates, so it is exactly non-decreasing in lambda and
    the crossing of ``crossing_level`` is bracketed to width <= tol.
    Only meaningful in the positive-finite phase; other phases have
    analytic answers and are refused.
    """
    phase = classify_phase(params)
    if phase is not PhaseClass.LAMBDA_C_POSITIVE_FINITE:
        analytic = {
            PhaseClass.TRIVIAL: "0 (trivial phase)",
            PhaseClass.LAMBDA_C_ZERO: "0",
            PhaseClass.LAMBDA_C_INFINITE: "infinity",
        }.get(phase, "undetermined (boundary parameters)")
        raise ValueError(
            f"phase {phase.value} has analytic critical intensity {analytic}; bisection refused"
        )
    radii = [int(r) for r in box_radii]
    if radii != sorted(radii) or len(radii) < 1:
        raise ValueError("box radii must be increasing")
    brackets = []
    for radius in radii:
        seed_r = substream(base_seed, radius)
        box = BoxSpec.centered_at((0,) * params.d, radius)
        center = box.index_of(box.center)
        boundary = None
        ell_max = 1.0

        def sample_fields(ell):
            def one(rep):
                return sample_coupled_field(
                    box, params.with_lambda(ell), ell * (1.0 + 1e-12),
                    weights_seed=substream(seed_r, rep, 1),
                    edge_seed=substream(seed_r, rep, 2),
                )
            return _pmap(one, replicates, threads)

        fields = sample_fields(ell_max)
        boundary = np.nonzero(box.boundary_mask())[0]

        def freq(lam):
            hits = 0
            for fld in fields:
                el = open_edges_at(fld, lam)
                labels = kernels.union_find(box.n_vertices, el.i, el.j)
                hits += int((labels[boundary] == labels[center]).any())
            return hits / replicates

        while freq(ell_max) <= crossing_level:
            ell_max *= 2.0
            if ell_max > lam_cap:
                raise ValueError(f"no crossing below lambda = {lam_cap}")
            fields = sample_fields(ell_max)
        lo, hi = 0.0, ell_max
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if freq(mid) > crossing_level:
                hi = mid
            else:
                lo = mid
        brackets.append((lo, hi))
    return LambdaCReport(
        radii=tuple(radii), brackets=tuple(brackets),
        crossing_level=crossing_level, replicates=replicates,
    )


def degree_histogram(edge_list: EdgeList, interior_margin: int = 0) -> np.ndarray:
    """Per-vertex direct-edge degrees, optionally restricted to interior vertices."""
    box = edge_list.box
    deg = np.bincount(edge_list.i, minlength=box.n_vertices) + np.bincount(
        edge_list.j, minlength=box.n_vertices
    )
    if interior_margin > 0:
        c = box.coords()
        lo = np.asarray(box.origin, dtype=np.int64)
        interior = (
            (c >= lo + interior_margin) & (c <= lo + box.side - 1 - interior_margin)
        ).all(axis=1)
        return deg[interior]
    return deg


@dataclass(frozen=True)
class DegreeTailEstimate:
    tau_hat: float
    k_top: int
    ci_low: float
    ci_high: float
    theoretical_tau: Optional[float] = None


def tail_exponent(
    degrees: np.ndarray, k_top: Optional[int] = None, theoretical_tau: Optional[float] = None
) -> DegreeTailEstimate:
    """Hill estimator of the degree-tail exponent on the top order statistics."""
    x = np.sort(np.asarray(degrees, dtype=np.float64))[::-1]
    x = x[x > 0]
    if k_top is None:
        k_top = math.ceil(math.sqrt(len(x)))
    if k_top < 10:
        raise ValueError("need k_top >= 10")
    if len(x) < k_top + 1:
        raise ValueError("not enough positive degrees for the requested k_top")
    threshold = x[k_top]
    if x[0] == threshold:
        raise ValueError("degenerate sample: no spread above the threshold")
    logs = np.log(x[:k_top]) - math.log(threshold)
    tau_hat = k_top / float(logs.sum())
    z = 1.96
    half = z / math.sqrt(k_top)
    return DegreeTailEstimate(
        tau_hat=tau_hat, k_top=k_top,
        ci_low=tau_hat * (1.0 - half), ci_high=tau_hat * (1.0 + half),
        theoretical_tau=theoretical_tau,
    )


def _distance_matrix_sources(edge_list: EdgeList, sources: Sequence[int]) -> np.ndarray:
    n = edge_list.box.n_vertices
    data = np.ones(2 * edge_list.n_edges)
    rows = np.concatenate([edge_list.i, edge_list.j])
    cols = np.concatenate([edge_list.j, edge_list.i])
    g = csr_matrix((data, (rows, cols)), shape=(n, n))
    return shortest_path(g, method="D", unweighted=True, indices=list(sources))


def graph_distance(edge_list: EdgeList, x, y) -> float:
    """Minimal number of occupied edges between x and y; inf if disconnected."""
    a = edge_list.box.index_of(x)
    b = edge_list.box.index_of(y)
    if a == b:
        return 0
    dist = _distance_matrix_sources(edge_list, [a])[0, b]
    return UNREACHABLE if math.isinf(dist) else int(dist)


_REGIMES = {
    "InfiniteVariance": "d(0,x)/loglog|x|",
    "FiniteVarianceSmallAlpha": "log d(0,x)/loglog|x|",
    "Linear": "d(0,x)/|x|",
}


def classify_distance_regime(params: ModelParams) -> str:
    """Map parameters to their distance-scaling regime; boundaries are refused."""
    d, a, ba = params.d, params.alpha, params.alpha * params.beta
    if min(a, ba) <= d:
        raise ValueError("trivial phase: distances degenerate")
    tau = params.tau
    if tau < 2:
        return "InfiniteVariance"
    if tau > 2 and d < a < 2 * d:
        return "FiniteVarianceSmallAlpha"
    if min(a, ba) > 2 * d:
        return "Linear"
    raise ValueError("parameters sit on a regime boundary; no scaling claim applies")


def distance_theory_upper(params: ModelParams) -> Optional[float]:
    regime = classify_distance_regime(params)
    if regime == "InfiniteVariance":
        return 2.0 / abs(math.log(params.tau - 1.0))
    if regime == "FiniteVarianceSmallAlpha":
        return params.delta_exponent
    return None


@dataclass(frozen=True)
class DistanceRow:
    radius: int
    q25: float
    median: float
    q75: float
    n_conditioned: int
    median_raw: float


@dataclass(frozen=True)
class DistanceScalingReport:
    regime: str
    rows: Tuple[DistanceRow, ...]
    theory_upper: Optional[float]
    statistic: str


def distance_scaling_report(
    params: ModelParams,
    radii: Sequence[int],
    replicates: int,
    base_seed: int,
    threads: int = 1,
) -> DistanceScalingReport:
    """Quartiles of the regime-normalized distance statistic per radius.

    For each radius r a box of radius 2r is sampled, and d(0, x) for a
    vertex x at Euclidean distance r is recorded whenever both endpoints
    fall in the box's largest cluster (the finite-volume stand-in for
    membership in the unbounded cluster).
    """
    regime = classify_distance_regime(params)
    radii = [int(r) for r in radii]
    if radii != sorted(radii):
        raise ValueError("radii must be increasing")

    def normalize(dist: float, r: int) -> float:
        if regime == "InfiniteVariance":
            return dist / math.log(math.log(r))
        if regime == "FiniteVarianceSmallAlpha":
            return math.log(dist) / math.log(math.log(r)) if dist > 0 else 0.0
        return dist / r

    rows = []
    for r in radii:
        box = BoxSpec.centered_at((0,) * params.d, 2 * r)
        center = box.index_of(box.center)
        target_vertex = tuple(
            c + (r if axis == 0 else 0) for axis, c in enumerate(box.center)
        )
        target = box.index_of(target_vertex)
        seed_r = substream(base_seed, r)

        def one(rep):
            wf = sample_weights(box, params.beta, substream(seed_r, rep, 1))
            el = sample_graph(box, wf, params, seed=substream(seed_r, rep, 2))
            labels = kernels.union_find(box.n_vertices, el.i, el.j)
            roots, counts = np.unique(labels, return_counts=True)
            winner = roots[counts == counts.max()].min()
            if labels[center] != winner or labels[target] != winner:
                return None
            return _distance_matrix_sources(el, [center])[0, target]

        dists = [x for x in _pmap(one, replicates, threads) if x is not None and math.isfinite(x)]
        if dists:
            stats = sorted(normalize(float(x), r) for x in dists)
            q25, med, q75 = np.quantile(stats, [0.25, 0.5, 0.75])
            med_raw = float(np.median([float(x) for x in dists]))
        else:
            q25 = med = q75 = math.nan
            med_raw = math.nan
        rows.append(DistanceRow(r, float(q25), float(med), float(q75), len(dists), med_raw))
    return DistanceScalingReport(
        regime=regime, rows=tuple(rows),
        theory_upper=distance_theory_upper(params),
        statistic=_REGIMES[regime],
    )


@dataclass(frozen=True)
class BoxTheoremRow:
    m: int
    rho: float
    frequency: float
    ci_low: float
    ci_high: float
    bound: float
    flagged: bool


def box_theorem_check(
    params: ModelParams,
    alpha_prime: float,
    rho: float,
    m_list: Sequence[int],
    replicates: int,
    base_seed: int = 0,
    threads: int = 1,
) -> List[BoxTheoremRow]:
    """Empirical giant-fraction frequencies against the finite-box lower bound.

    Flags any box size where the Wilson upper limit of
    P[|C_m| >= rho m^d] falls below 1 - exp(-rho m^(2d - alpha')).
    """
    d = params.d
    if not d < params.alpha < 2 * d:
        raise ValueError("requires alpha in (d, 2d)")
    if not params.alpha < alpha_prime < 2 * d:
        raise ValueError("requires alpha' in (alpha, 2d)")
    if not 0 < rho <= 1:
        raise ValueError("rho must lie in (0, 1]")
    out = []
    for m in m_list:
        box = BoxSpec.corner((0,) * d, int(m))
        seed_m = substream(base_seed, m)
        cutoff = rho * box.n_vertices

        def one(rep):
            wf = sample_weights(box, params.beta, substream(seed_m, rep, 1))
            el = sample_graph(box, wf, params, seed=substream(seed_m, rep, 2))
            _, size = largest_component(components(box, el))
            return size >= cutoff

        hits = int(sum(_pmap(one, replicates, threads)))
        lo, hi = wilson_interval(hits, replicates)
        bound = -math.expm1(-rho * float(m) ** (2 * d - alpha_prime))
        out.append(
            BoxTheoremRow(
                m=int(m), rho=rho, frequency=hits / replicates,
                ci_low=lo, ci_high=hi, bound=bound, flagged=hi < bound,
            )
        )
    return out
