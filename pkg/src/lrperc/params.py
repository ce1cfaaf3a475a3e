"""Model parameters, phase classification and finite-box geometry."""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .rng import TAG_WEIGHT, stream_key, uniform01_array


class PhaseClass(Enum):
    TRIVIAL = "Trivial"
    LAMBDA_C_ZERO = "LambdaCZero"
    LAMBDA_C_POSITIVE_FINITE = "LambdaCPositiveFinite"
    LAMBDA_C_INFINITE = "LambdaCInfinite"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class ModelParams:
    """Parameter tuple (d, alpha, beta, lam) of the edge law.

    ``alpha`` is the edge-decay exponent, ``beta`` the weight-tail
    exponent and ``lam`` the percolation intensity.  ``tau`` and
    ``delta_exponent`` are derived on demand, never stored.
    """

    d: int
    alpha: float
    beta: float
    lam: float

    def __post_init__(self):
        if not (isinstance(self.d, int) and self.d >= 1):
            raise ValueError(f"dimension d must be a positive integer, got {self.d!r}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.lam < 0:
            raise ValueError(f"lambda must be non-negative, got {self.lam}")

    @property
    def tau(self) -> float:
        """Degree-tail exponent beta*alpha/d."""
        return self.beta * self.alpha / self.d

    @property
    def delta_exponent(self) -> float:
        """log 2 / log(2d/alpha); only defined for alpha in (d, 2d)."""
        if not (self.d < self.alpha < 2 * self.d):
            raise ValueError(
                f"delta exponent requires alpha in ({self.d}, {2 * self.d}), got {self.alpha}"
            )
        return math.log(2.0) / math.log(2.0 * self.d / self.alpha)

    def with_lambda(self, lam: float) -> "ModelParams":
        return ModelParams(self.d, self.alpha, self.beta, lam)


def make_params(d: int, alpha: float, beta: float, lam: float) -> ModelParams:
    return ModelParams(d, alpha, beta, lam)


def classify_phase(params: ModelParams) -> PhaseClass:
    """Classify the phase from (d, alpha, beta); lambda plays no role.

    Equality cases the classification theorems leave open are reported
    as BOUNDARY rather than guessed.  The one deliberate edge ruling:
    d=1, alpha=2 with beta*alpha > 2 counts as a finite positive
    critical value (alpha=2 sits inside the (1,2] clause).
    """
    d, a, ba = params.d, params.alpha, params.beta * params.alpha
    m = min(a, ba)
    if m <= d:
        return PhaseClass.TRIVIAL
    if ba < 2 * d:
        return PhaseClass.LAMBDA_C_ZERO
    if d == 1 and m > 2:
        return PhaseClass.LAMBDA_C_INFINITE
    if ba > 2 * d and (d >= 2 or 1 < a <= 2):
        return PhaseClass.LAMBDA_C_POSITIVE_FINITE
    return PhaseClass.BOUNDARY


@dataclass(frozen=True)
class BoxSpec:
    """Axis-aligned box of Z^d: origin + [0, side-1]^d.

    ``centered`` marks boxes built as x + [-n, n]^d; they carry the
    radius so boundary queries stay exact.  Vertices are enumerated in a
    fixed lexicographic order (last coordinate fastest).
    """

    d: int
    origin: tuple
    side: int
    centered: bool = False

    def __post_init__(self):
        if self.side < 1:
            raise ValueError(f"box side must be >= 1, got {self.side}")
        if len(self.origin) != self.d:
            raise ValueError("origin length must equal dimension")
        if self.centered and self.side % 2 == 0:
            raise ValueError("centered boxes have odd side 2n+1")

    @classmethod
    def corner(cls, origin, side: int) -> "BoxSpec":
        origin = tuple(int(c) for c in origin)
        return cls(len(origin), origin, int(side))

    @classmethod
    def centered_at(cls, center, radius: int) -> "BoxSpec":
        """The box center + [-radius, radius]^d."""
        center = tuple(int(c) for c in center)
        if radius < 0:
            raise ValueError("radius must be >= 0")
        origin = tuple(c - radius for c in center)
        return cls(len(center), origin, 2 * radius + 1, centered=True)

    @property
    def radius(self) -> int:
        if not self.centered:
            raise ValueError("radius only defined for centered boxes")
        return (self.side - 1) // 2

    @property
    def center(self) -> tuple:
        r = self.radius
        return tuple(c + r for c in self.origin)

    @property
    def n_vertices(self) -> int:
        return self.side**self.d

    def coords(self) -> np.ndarray:
        """All vertices, shape (n_vertices, d), lexicographic order."""
        axes = [np.arange(o, o + self.side, dtype=np.int64) for o in self.origin]
        grid = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grid], axis=1)

    def index_of(self, vertex) -> int:
        idx = 0
        for c, o in zip(vertex, self.origin):
            off = int(c) - o
            if not 0 <= off < self.side:
                raise ValueError(f"vertex {tuple(vertex)} outside box")
            idx = idx * self.side + off
        return idx

    def vertex(self, index: int) -> tuple:
        if not 0 <= index < self.n_vertices:
            raise IndexError(index)
        offs = []
        for _ in range(self.d):
            offs.append(index % self.side)
            index //= self.side
        return tuple(o + off for o, off in zip(self.origin, reversed(offs)))

    def contains(self, vertex) -> bool:
        return all(0 <= int(c) - o < self.side for c, o in zip(vertex, self.origin))

    def contains_box(self, other: "BoxSpec") -> bool:
        return all(
            so >= o and so + other.side <= o + self.side
            for so, o in zip(other.origin, self.origin)
        )

    def boundary_mask(self) -> np.ndarray:
        """Boolean mask of vertices on the box surface."""
        c = self.coords()
        lo = np.asarray(self.origin, dtype=np.int64)
        return ((c == lo) | (c == lo + self.side - 1)).any(axis=1)


def pareto_quantile(u: float, beta: float) -> float:
    """Quantile transform u -> u^(-1/beta) of the unit-scale Pareto law."""
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if not 0 < u <= 1:
        raise ValueError(f"u must lie in (0, 1], got {u}")
    return u ** (-1.0 / beta)


@dataclass(frozen=True)
class WeightField:
    """Realized vertex weights on a box; regenerable from (box, beta, seed)."""

    box: BoxSpec
    beta: float
    seed: int
    weights: np.ndarray = field(repr=False)

    def weight_of(self, vertex) -> float:
        return float(self.weights[self.box.index_of(vertex)])


def sample_weights(box: BoxSpec, beta: float, seed: int) -> WeightField:
    """I.i.d. Pareto weights, one per vertex, from the weight stream of ``seed``."""
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    key = stream_key(seed, TAG_WEIGHT)
    u = uniform01_array(key, np.arange(box.n_vertices, dtype=np.uint64))
    w = u ** (-1.0 / beta)
    w.setflags(write=False)
    return WeightField(box=box, beta=beta, seed=seed, weights=w)
