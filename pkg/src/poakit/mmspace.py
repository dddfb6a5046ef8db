"""Finite metric-measure spaces: distance matrices, graph metrics and measures."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra, floyd_warshall

from .errors import AllZeroMass, DisconnectedGraph, NegativeMass, NonPositiveWeight, SizeMismatch

TRIANGLE_TOL = 1e-9


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class FiniteMetricSpace:
    dist: np.ndarray
    labels: Optional[tuple] = None
    diameter: float = field(init=False)

    def __post_init__(self):
        d = _frozen(self.dist)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
            raise SizeMismatch(f"distance matrix must be square and non-empty, got {d.shape}")
        if self.labels is not None and len(self.labels) != d.shape[0]:
            raise SizeMismatch("labels length does not match matrix size")
        object.__setattr__(self, "dist", d)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "diameter", float(d.max()))

    @property
    def n(self) -> int:
        return self.dist.shape[0]


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected simple graph with positive edge lengths."""

    n: int
    edges: tuple

    def __post_init__(self):
        seen = set()
        clean = []
        for i, j, w in self.edges:
            i, j, w = int(i), int(j), float(w)
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={self.n}")
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if not w > 0:
                raise NonPositiveWeight(f"edge ({i}, {j}) has weight {w}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            clean.append((i, j, w))
        object.__setattr__(self, "edges", tuple(clean))

    def adjacency(self) -> csr_matrix:
        if not self.edges:
            return csr_matrix((self.n, self.n))
        i, j, w = map(np.asarray, zip(*self.edges))
        rows = np.concatenate([i, j])
        cols = np.concatenate([j, i])
        return csr_matrix((np.concatenate([w, w]), (rows, cols)), shape=(self.n, self.n))

    @property
    def connected(self) -> bool:
        ncomp, _ = connected_components(self.adjacency(), directed=False)
        return ncomp == 1

    def edge_array(self):
        """(pairs, weights) with pairs an (m, 2) int array."""
        if not self.edges:
            return np.zeros((0, 2), dtype=int), np.zeros(0)
        pairs = np.array([(i, j) for i, j, _ in self.edges], dtype=int)
        return pairs, np.array([w for *_, w in self.edges])


@dataclass(frozen=True)
class ProbabilityMeasure:
    weights: np.ndarray

    def __post_init__(self):
        w = _frozen(self.weights)
        if w.ndim != 1:
            raise SizeMismatch("measure weights must be a vector")
        if (w < 0).any():
            raise NegativeMass(f"negative weight {w.min()}")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {w.sum()}, expected 1")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.weights > 0)


def uniform_measure(n: int) -> ProbabilityMeasure:
    return ProbabilityMeasure(np.full(n, 1.0 / n))


def dirac(n: int, i: int) -> ProbabilityMeasure:
    w = np.zeros(n)
    w[i] = 1.0
    return ProbabilityMeasure(w)


def normalize_measure(raw: Sequence[float]) -> ProbabilityMeasure:
    raw = np.asarray(raw, dtype=np.float64)
    if (raw < 0).any():
        raise NegativeMass(f"negative mass {raw.min()}")
    total = raw.sum()
    if not total > 0:
        raise AllZeroMass("measure has no positive mass")
    return ProbabilityMeasure(raw / total)


@dataclass
class ValidationReport:
    symmetry: list = field(default_factory=list)  # (i, j, d[i,j] - d[j,i])
    diagonal: list = field(default_factory=list)  # (i, d[i,i])
    negative: list = field(default_factory=list)  # (i, j, d[i,j])
    triangle: Optional[tuple] = None  # worst (i, j, k, slack): d[i,k] - d[i,j] - d[j,k]

    @property
    def ok(self) -> bool:
        return not (self.symmetry or self.diagonal or self.negative or self.triangle)

    def __bool__(self):
        # truthy when there is something to report
        return not self.ok

    def summary(self) -> str:
        if self.ok:
            return "valid"
        parts = []
        if self.symmetry:
            parts.append(f"{len(self.symmetry)} asymmetric entries")
        if self.diagonal:
            parts.append(f"{len(self.diagonal)} nonzero diagonal entries")
        if self.negative:
            parts.append(f"{len(self.negative)} negative entries")
        if self.triangle:
            i, j, k, s = self.triangle
            parts.append(f"triangle violation {s:.3g} at ({i}, {j}, {k})")
        return "; ".join(parts)


def validate_metric(dist, tol: float = TRIANGLE_TOL) -> ValidationReport:
    """Check symmetry, zero diagonal, nonnegativity and the triangle inequality.

    O(n^3); the triangle scan loops over the intermediate point and keeps
    only the single worst violation.
    """
    d = np.asarray(dist, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise SizeMismatch(f"matrix must be square, got {d.shape}")
    rep = ValidationReport()
    n = d.shape[0]
    iu, ju = np.triu_indices(n, 1)
    asym = d[iu, ju] - d[ju, iu]
    for idx in np.flatnonzero(np.abs(asym) > tol):
        rep.symmetry.append((int(iu[idx]), int(ju[idx]), float(asym[idx])))
    for i in np.flatnonzero(np.abs(np.diag(d)) > tol):
        rep.diagonal.append((int(i), float(d[i, i])))
    for i, j in zip(*np.nonzero(d < -tol)):
        rep.negative.append((int(i), int(j), float(d[i, j])))

    worst = (None, tol)
    for j in range(n):
        slack = d - (d[:, j][:, None] + d[j, :][None, :])
        flat = int(np.argmax(slack))
        if slack.flat[flat] > worst[1]:
            i, k = divmod(flat, n)
            worst = ((i, j, k), float(slack.flat[flat]))
    if worst[0] is not None:
        rep.triangle = (*worst[0], worst[1])
    return rep


def build_graph_metric(g: WeightedGraph, method: str = "dijkstra", labels=None) -> FiniteMetricSpace:
    """Shortest-path metric of a connected weighted graph."""
    adj = g.adjacency()
    if method == "dijkstra":
        dist = dijkstra(adj, directed=False)
    elif method == "floyd-warshall":
        if g.n > 512:
            raise ValueError("floyd-warshall is limited to n <= 512")
        dist = floyd_warshall(adj, directed=False)
    else:
        raise ValueError(f"unknown shortest-path method {method!r}")
    if not np.isfinite(dist).all():
        raise DisconnectedGraph("graph has unreachable pairs")
    return FiniteMetricSpace(dist, labels=labels)


def path_graph(n: int, length: float = 1.0) -> WeightedGraph:
    return WeightedGraph(n, tuple((i, i + 1, length) for i in range(n - 1)))


def cycle_graph(n: int, length: float = 1.0) -> WeightedGraph:
    return WeightedGraph(n, tuple((i, (i + 1) % n, length) for i in range(n)))


def random_tree(n: int, rng: np.random.Generator, weights: tuple = (1.0, 1.0)) -> WeightedGraph:
    """Random recursive tree: node i attaches to a uniform earlier node."""
    lo, hi = weights
    edges = []
    for i in range(1, n):
        w = lo if lo == hi else float(rng.uniform(lo, hi))
        edges.append((int(rng.integers(i)), i, w))
    return WeightedGraph(n, tuple(edges))


def random_connected_graph(n: int, extra_edges: int, rng: np.random.Generator,
                           weights: tuple = (0.5, 2.0)) -> WeightedGraph:
    """Random tree plus `extra_edges` random chords (duplicates skipped)."""
    tree = random_tree(n, rng, weights)
    present = {(min(i, j), max(i, j)) for i, j, _ in tree.edges}
    edges = list(tree.edges)
    for _ in range(extra_edges):
        i, j = rng.choice(n, size=2, replace=False)
        key = (int(min(i, j)), int(max(i, j)))
        if key in present:
            continue
        present.add(key)
        edges.append((*key, float(rng.uniform(*weights))))
    return WeightedGraph(n, tuple(edges))
