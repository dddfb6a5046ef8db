"""McShane-Whitney extension of observables to points outside the sample."""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .errors import EmptySample, SizeMismatch
from .mmspace import FiniteMetricSpace, normalize_measure
from .observables import weights_of
from .solver import SolverConfig, solve_poa

MODES = ("upper", "lower", "balanced")


def extend_many(values, query_dists, mode: str = "balanced") -> np.ndarray:
    """Extend sample values to each row of a (queries, n) distance matrix.

    upper: min_i phi_i + d_i, the largest 1-Lipschitz extension;
    lower: max_i phi_i - d_i, the smallest; balanced: their average.
    """
    phi = np.asarray(values, dtype=np.float64)
    if phi.size == 0:
        raise EmptySample("cannot extend from an empty sample")
    Q = np.atleast_2d(np.asarray(query_dists, dtype=np.float64))
    if Q.shape[1] != phi.size:
        raise SizeMismatch(f"query rows have {Q.shape[1]} distances, sample has {phi.size} points")
    if (Q < 0).any():
        raise ValueError("query distances must be nonnegative")
    if mode not in MODES:
        raise ValueError(f"unknown extension mode {mode!r}")
    up = (phi + Q).min(axis=1)
    # lo <= up for exactly 1-Lipschitz phi; the clamp only absorbs round-off
    lo = np.minimum((phi - Q).max(axis=1), up)
    out = {"upper": up, "lower": lo}.get(mode)
    if out is None:
        out = 0.5 * (up + lo)
    # queries sitting on a sample point return its value exactly (no rounding from tight pairs)
    hit = Q == 0
    rows = np.flatnonzero(hit.any(axis=1))
    out[rows] = phi[hit[rows].argmax(axis=1)]
    return out


def extend(values, query_dists, mode: str = "balanced") -> float:
    return float(extend_many(values, np.asarray(query_dists)[None, :], mode)[0])


def leave_k_out(space: FiniteMetricSpace, mu, holdout: Sequence[int], k: int,
                cfg: SolverConfig = SolverConfig(), full=None, mode: str = "balanced") -> dict:
    """Re-solve POA without the held-out points and extend back to them.

    Deviations from the full-data observables are reported, not judged: the
    subsample problem is a different optimization. Each observable is
    compared up to sign.
    """
    w = weights_of(mu)
    holdout = np.asarray(sorted(set(int(h) for h in holdout)))
    keep = np.setdiff1d(np.arange(space.n), holdout)
    if keep.size == 0:
        raise EmptySample("every point was held out")
    sub = FiniteMetricSpace(space.dist[np.ix_(keep, keep)])
    sub_mu = normalize_measure(w[keep])
    if full is None:
        full = solve_poa(space, w, k, cfg)
    part = solve_poa(sub, sub_mu, k, cfg)
    Q = space.dist[np.ix_(holdout, keep)]
    rows = []
    for m in range(min(part.k, full.k)):
        ext = extend_many(part.observables[m], Q, mode)
        ref = full.observables[m][holdout]
        dev = min(np.abs(ext - ref).max(), np.abs(ext + ref).max())
        rows.append({"observable": m + 1, "max_abs_deviation": float(dev),
                     "extended": ext.tolist(), "full": ref.tolist()})
    return {"holdout": holdout.tolist(), "mode": mode, "observables": rows}
