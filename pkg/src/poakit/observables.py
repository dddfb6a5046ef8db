"""Observable statistics on a finite metric-measure space.

Observables are plain float vectors indexed like the space's points. The
correlation here is the raw centered covariance, *not* the Pearson
coefficient: no division by standard deviations takes place.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import LengthMismatch, ModeMismatch, NotCentered
from .mmspace import FiniteMetricSpace, ProbabilityMeasure, WeightedGraph

LIPSCHITZ_TOL = 1e-8
CENTERING_TOL = 1e-9


def weights_of(mu) -> np.ndarray:
    if isinstance(mu, ProbabilityMeasure):
        return mu.weights
    return np.asarray(mu, dtype=np.float64)


def _pair(mu, f):
    w = weights_of(mu)
    f = np.asarray(f, dtype=np.float64)
    if f.shape[-1] != w.shape[0]:
        raise LengthMismatch(f"observable has length {f.shape[-1]}, measure has {w.shape[0]}")
    return w, f


def mean(mu, f) -> float:
    w, f = _pair(mu, f)
    return float(w @ f)


def center(mu, f) -> np.ndarray:
    w, f = _pair(mu, f)
    return f - w @ f


def covariance(mu, f, g) -> float:
    """Covariance of two centered observables; refuses uncentered input."""
    w, f = _pair(mu, f)
    _, g = _pair(mu, g)
    for h in (f, g):
        m = float(w @ h)
        if abs(m) > CENTERING_TOL:
            raise NotCentered(m)
    return float(np.sum(w * f * g))


def variance(mu, f) -> float:
    w, f = _pair(mu, f)
    fc = f - w @ f
    return float(np.sum(w * fc * fc))


def correlation(mu, f, g) -> float:
    w, f = _pair(mu, f)
    _, g = _pair(mu, g)
    return float(np.sum(w * (f - w @ f) * (g - w @ g)))


def inner(mu, f, g) -> float:
    w, f = _pair(mu, f)
    return float(np.sum(w * f * np.asarray(g, dtype=np.float64)))


@dataclass(frozen=True)
class CertReport:
    max_violation: float
    worst_pair: Optional[tuple]
    checked_pairs: int
    mode: str

    @property
    def certified(self) -> bool:
        return self.max_violation <= LIPSCHITZ_TOL


def check_lipschitz(space: FiniteMetricSpace, f, K: float = 1.0, mode: str = "pairwise",
                    graph: Optional[WeightedGraph] = None) -> CertReport:
    """Largest violation of |f_i - f_j| <= K d_ij over the checked pairs.

    In ``edges`` mode only the graph's edges are examined, which suffices
    when the space's metric is that graph's shortest-path metric.
    """
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (space.n,):
        raise LengthMismatch(f"observable has shape {f.shape}, space has {space.n} points")
    if mode == "pairwise":
        i, j = np.triu_indices(space.n, 1)
        bound = space.dist[i, j]
    elif mode == "edges":
        if graph is None:
            raise ModeMismatch("edges mode needs the source graph")
        pairs, bound = graph.edge_array()
        i, j = pairs[:, 0], pairs[:, 1]
    else:
        raise ModeMismatch(f"unknown mode {mode!r}")
    if len(i) == 0:
        return CertReport(-np.inf, None, 0, mode)
    viol = np.abs(f[i] - f[j]) - K * bound
    k = int(np.argmax(viol))
    return CertReport(float(viol[k]), (int(i[k]), int(j[k])), len(i), mode)


def distance_observable(space: FiniteMetricSpace, point: int) -> np.ndarray:
    """x -> d(x, point); always 1-Lipschitz."""
    return np.array(space.dist[point], dtype=np.float64)


def sup_norm(f) -> float:
    return float(np.max(np.abs(f))) if np.size(f) else 0.0
