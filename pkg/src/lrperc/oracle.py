"""Exact probabilities on tiny instances by exhaustive enumeration.

Everything here conditions on a fixed weight assignment: with weights
given, edges are independent and the law of any graph functional is a
sum over the 2^P edge configurations.  Deliberately brute force; the
pair cap keeps worst-case enumeration around 10^6 terms.
"""

import math
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from .edges import EdgeList, edge_probability, sample_graph
from .params import BoxSpec, ModelParams, WeightField
from .rng import substream

PAIR_CAP = 20

__all__ = [
    "TinyInstance",
    "exact_connection_prob",
    "exact_component_size_law",
    "exact_event_prob",
    "oracle_vs_mc",
    "standard_suite",
]


@dataclass(frozen=True)
class TinyInstance:
    """A box small enough to enumerate, with frozen weights."""

    box: BoxSpec
    params: ModelParams
    weights: np.ndarray = field(repr=False)
    name: str = ""

    def __post_init__(self):
        n = self.box.n_vertices
        if n * (n - 1) // 2 > PAIR_CAP:
            raise ValueError(f"instance exceeds the {PAIR_CAP}-pair enumeration cap")
        if len(self.weights) != n or (np.asarray(self.weights) < 1).any():
            raise ValueError("need one weight >= 1 per vertex")

    @classmethod
    def from_weight_map(cls, box, params, weight_map: Dict, name=""):
        w = np.empty(box.n_vertices)
        for v, wv in weight_map.items():
            w[box.index_of(v)] = wv
        return cls(box=box, params=params, weights=w, name=name)

    def weight_field(self) -> WeightField:
        return WeightField(box=self.box, beta=self.params.beta, seed=0, weights=self.weights)

    def pair_table(self):
        """(i, j, p, length_sq) arrays over all unordered pairs."""
        c = self.box.coords()
        n = self.box.n_vertices
        ii, jj, pp, ll = [], [], [], []
        for a in range(n - 1):
            for b in range(a + 1, n):
                d = c[a] - c[b]
                rsq = int((d * d).sum())
                p = edge_probability(
                    self.params, float(self.weights[a]), float(self.weights[b]),
                    math.sqrt(rsq),
                )
                ii.append(a)
                jj.append(b)
                pp.append(p)
                ll.append(rsq)
        return ii, jj, pp, ll


def _enumerate_outcomes(instance: TinyInstance, statistic):
    """Exact law of ``statistic(labels, mask)`` over all edge configurations.

    ``labels`` is the component label list of the configuration and
    ``mask`` its edge bitmask.  Per-outcome masses are compensated sums,
    so enumeration order is immaterial to ~1e-15.
    """
    ii, jj, pp, _ = instance.pair_table()
    npairs = len(pp)
    n = instance.box.n_vertices
    # vectorized per-configuration probabilities
    masks = np.arange(1 << npairs, dtype=np.int64)
    prob = np.ones(1 << npairs)
    for e in range(npairs):
        present = (masks >> e) & 1
        prob *= np.where(present == 1, pp[e], 1.0 - pp[e])
    buckets: Dict = {}
    for mask in range(1 << npairs):
        parent = list(range(n))
        m = mask
        e = 0
        while m:
            if m & 1:
                ra = ii[e]
                while parent[ra] != ra:
                    ra = parent[ra]
                rb = jj[e]
                while parent[rb] != rb:
                    rb = parent[rb]
                if ra != rb:
                    if ra < rb:
                        parent[rb] = ra
                    else:
                        parent[ra] = rb
            m >>= 1
            e += 1
        labels = [0] * n
        for v in range(n):
            r = v
            while parent[r] != r:
                r = parent[r]
            labels[v] = r
        key = statistic(labels, mask)
        buckets.setdefault(key, []).append(prob[mask])
    law = {k: math.fsum(v) for k, v in buckets.items()}
    return {k: v for k, v in law.items() if v != 0.0}


def exact_connection_prob(instance: TinyInstance, s, t) -> float:
    """P[s and t connected], conditional on the instance's weights."""
    a, b = instance.box.index_of(s), instance.box.index_of(t)
    if a == b:
        return 1.0
    law = _enumerate_outcomes(instance, lambda lab, m: lab[a] == lab[b])
    return law.get(True, 0.0)


def exact_component_size_law(instance: TinyInstance, x) -> Dict[int, float]:
    """Exact pmf of |C(x)| within the box, conditional on the weights."""
    a = instance.box.index_of(x)
    law = _enumerate_outcomes(instance, lambda lab, m: lab.count(lab[a]))
    total = math.fsum(law.values())
    if abs(total - 1.0) > 1e-12:
        raise AssertionError(f"component-law masses sum to {total}")
    return law


def exact_long_edge_prob(instance: TinyInstance, threshold: float) -> float:
    """P[some occupied edge is longer than ``threshold``]."""
    _, _, _, lsq = instance.pair_table()
    long_bits = [e for e, l in enumerate(lsq) if l > threshold * threshold]
    if not long_bits:
        return 0.0
    sel = sum(1 << e for e in long_bits)
    law = _enumerate_outcomes(instance, lambda lab, m: bool(m & sel))
    return law.get(True, 0.0)


def exact_boundary_reach_prob(instance: TinyInstance) -> float:
    """P[the center's in-box component touches the box surface]."""
    box = instance.box
    center = box.index_of(box.center)
    boundary = np.nonzero(box.boundary_mask())[0].tolist()
    law = _enumerate_outcomes(
        instance, lambda lab, m: any(lab[b] == lab[center] for b in boundary)
    )
    return law.get(True, 0.0)


def exact_event_prob(instance: TinyInstance, target) -> float:
    """Dispatch on a target tuple; see ``oracle_vs_mc`` for the forms."""
    kind = target[0]
    if kind == "connection":
        return exact_connection_prob(instance, target[1], target[2])
    if kind == "psi0":
        return exact_long_edge_prob(instance, instance.box.side / 100.0)
    if kind == "theta_boundary_reach":
        return exact_boundary_reach_prob(instance)
    raise ValueError(f"unknown target {target!r}")


@dataclass(frozen=True)
class ZReport:
    instance: str
    target: tuple
    exact: float
    mc: float
    sigma: float
    z: float


def _mc_indicator(instance: TinyInstance, target, replicates: int, seed: int) -> float:
    """Monte Carlo frequency of the target event using the main sampler."""
    box = instance.box
    wf = instance.weight_field()
    kind = target[0]
    if kind == "connection":
        a, b = box.index_of(target[1]), box.index_of(target[2])
    elif kind == "theta_boundary_reach":
        center = box.index_of(box.center)
        boundary = np.nonzero(box.boundary_mask())[0]
    thr_sq = None
    if kind == "psi0":
        thr_sq = (box.side / 100.0) ** 2
        coords = box.coords()
    from . import kernels

    hits = 0
    for rep in range(replicates):
        el = sample_graph(box, wf, instance.params, seed=substream(seed, rep))
        if kind == "psi0":
            if el.n_edges:
                diff = coords[el.i] - coords[el.j]
                if (np.einsum("ij,ij->i", diff, diff) > thr_sq).any():
                    hits += 1
            continue
        labels = kernels.union_find(box.n_vertices, el.i, el.j)
        if kind == "connection":
            hits += int(labels[a] == labels[b])
        else:
            hits += int((labels[boundary] == labels[center]).any())
    return hits / replicates


def oracle_vs_mc(instance: TinyInstance, target, mc_replicates: int, seed: int) -> ZReport:
    """Compare the main engine against the exact law on shared weights.

    For the pmf target the z score is the worst bin; binomial sigma uses
    the exact probability, so deterministic cases give z = 0 exactly.
    """
    if target[0] == "component_law":
        law = exact_component_size_law(instance, target[1])
        emp = _mc_component_law(instance, target[1], mc_replicates, seed)
        worst = ZReport(instance.name, target, 0.0, 0.0, 0.0, 0.0)
        for size in range(1, instance.box.n_vertices + 1):
            p = law.get(size, 0.0)
            phat = emp.get(size, 0.0)
            if p in (0.0, 1.0):
                z = 0.0 if phat == p else math.inf
                sigma = 0.0
            else:
                sigma = math.sqrt(p * (1.0 - p) / mc_replicates)
                z = (phat - p) / sigma
            if abs(z) >= abs(worst.z):
                worst = ZReport(instance.name, target, p, phat, sigma, z)
        return worst
    p = exact_event_prob(instance, target)
    phat = _mc_indicator(instance, target, mc_replicates, seed)
    if p in (0.0, 1.0):
        sigma = 0.0
        z = 0.0 if phat == p else math.inf
    else:
        sigma = math.sqrt(p * (1.0 - p) / mc_replicates)
        z = (phat - p) / sigma
    return ZReport(instance.name, target, p, phat, sigma, z)


def _mc_component_law(instance, x, replicates, seed):
    from . import kernels

    box = instance.box
    wf = instance.weight_field()
    a = box.index_of(x)
    counts: Dict[int, int] = {}
    for rep in range(replicates):
        el = sample_graph(box, wf, instance.params, seed=substream(seed, rep))
        labels = kernels.union_find(box.n_vertices, el.i, el.j)
        size = int((labels == labels[a]).sum())
        counts[size] = counts.get(size, 0) + 1
    return {k: v / replicates for k, v in counts.items()}


def standard_suite():
    """The bundled (instance, target) pairs used by the oracle-check command."""
    out = []

    p1 = ModelParams(1, 2.0, 2.0, 1.0)
    b3 = BoxSpec.corner((0,), 3)
    tri = TinyInstance(box=b3, params=p1, weights=np.ones(3), name="path3-unit")
    out.append((tri, ("connection", (0,), (2,))))
    out.append((tri, ("component_law", (0,))))

    b2 = BoxSpec.corner((0,), 2)
    out.append(
        (TinyInstance(box=b2, params=ModelParams(1, 2.0, 2.0, 0.7), weights=np.ones(2),
                      name="pair"), ("connection", (0,), (1,)))
    )

    p4 = ModelParams(1, 1.5, 2.0, 0.5)
    b4 = BoxSpec.corner((0,), 4)
    out.append(
        (TinyInstance(box=b4, params=p4, weights=np.array([1.0, 2.0, 1.5, 3.0]),
                      name="mixed4"), ("connection", (0,), (3,)))
    )
    out.append(
        (TinyInstance(box=b4, params=p4, weights=np.array([1.0, 2.0, 1.5, 3.0]),
                      name="mixed4"), ("component_law", (1,)))
    )

    b5c = BoxSpec.centered_at((0,), 2)
    out.append(
        (TinyInstance(box=b5c, params=ModelParams(1, 2.5, 1.0, 0.8),
                      weights=np.array([1.0, 4.0, 1.0, 1.0, 2.0]),
                      name="reach5"), ("theta_boundary_reach",))
    )
    b3c = BoxSpec.centered_at((0,), 1)
    out.append(
        (TinyInstance(box=b3c, params=ModelParams(1, 3.0, 1.5, 1.2), weights=np.ones(3),
                      name="reach3"), ("theta_boundary_reach",))
    )

    b6 = BoxSpec.corner((0,), 6)
    out.append(
        (TinyInstance(box=b6, params=ModelParams(1, 3.0, 1.5, 0.4),
                      weights=np.array([1.0, 1.0, 5.0, 1.0, 2.0, 1.0]),
                      name="longedge6"), ("psi0",))
    )

    p2d = ModelParams(2, 2.5, 1.5, 0.6)
    b22 = BoxSpec.corner((0, 0), 2)
    out.append(
        (TinyInstance(box=b22, params=p2d, weights=np.array([1.0, 2.0, 1.0, 3.0]),
                      name="square2x2"), ("connection", (0, 0), (1, 1)))
    )
    out.append(
        (TinyInstance(box=b22, params=p2d, weights=np.ones(4), name="square2x2-unit"),
         ("component_law", (0, 0)))
    )

    out.append(
        (TinyInstance(box=b3, params=ModelParams(1, 2.0, 2.0, 0.0), weights=np.ones(3),
                      name="lam0"), ("connection", (0,), (2,)))
    )
    out.append(
        (TinyInstance(box=b4, params=ModelParams(1, 1.2, 1.0, 2.0),
                      weights=np.array([10.0, 1.0, 1.0, 1.0]),
                      name="hub4"), ("connection", (1,), (3,)))
    )
    return out
