"""POA embeddings, classical MDS baseline and metric distortion statistics.

POA coordinates live in R^k with the L-infinity norm (the map is then
1-Lipschitz); MDS coordinates use the Euclidean norm. Distortions of the
two are not directly comparable, so reports always carry the norm used.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NotEnoughObservables, SizeMismatch
from .mmspace import FiniteMetricSpace, WeightedGraph
from .solver import PrincipalObservableSet, SolverConfig, solve_poa

LINF = "linf"
L2 = "l2"


@dataclass(frozen=True)
class Embedding:
    coords: np.ndarray  # (n, k)
    norm: str

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def k(self) -> int:
        return self.coords.shape[1]

    def pairwise(self) -> np.ndarray:
        diff = self.coords[:, None, :] - self.coords[None, :, :]
        if self.norm == LINF:
            return np.abs(diff).max(axis=-1, initial=0.0)
        return np.sqrt((diff ** 2).sum(axis=-1))


def embed(pos: PrincipalObservableSet, k: int) -> Embedding:
    if k < 1 or k > pos.k:
        raise NotEnoughObservables(f"asked for {k} coordinates, {pos.k} observables available")
    return Embedding(pos.observables[:k].T.copy(), LINF)


@dataclass
class DistortionReport:
    deltas: np.ndarray  # per pair, upper-triangle order
    pairs: np.ndarray
    counts: np.ndarray
    bin_edges: np.ndarray
    norm: str

    @property
    def summary(self) -> dict:
        d = self.deltas
        if d.size == 0:
            return {"mean": 0.0, "median": 0.0, "max": 0.0, "frac_below_0.1": 1.0}
        return {
            "mean": float(d.mean()),
            "median": float(np.median(d)),
            "max": float(d.max()),
            "frac_below_0.1": float(np.mean(d < 0.1)),
        }

    def to_dict(self) -> dict:
        return {
            "norm": self.norm,
            "n_pairs": int(self.deltas.size),
            "bins": self.bin_edges.tolist(),
            "counts": self.counts.tolist(),
            "summary": self.summary,
        }


def distortion_report(space: FiniteMetricSpace, emb: Embedding, bins: int = 30,
                      log_max: Optional[float] = None) -> DistortionReport:
    """delta(i, j) = |d(i, j) - ||row_i - row_j|| | with a histogram of ln(1 + delta).

    The histogram spans [0, log_max]; by default log_max is the largest
    observed ln(1 + delta).
    """
    if emb.n != space.n:
        raise SizeMismatch(f"embedding has {emb.n} rows, space has {space.n} points")
    i, j = np.triu_indices(space.n, 1)
    deltas = np.abs(space.dist[i, j] - emb.pairwise()[i, j])
    logs = np.log1p(deltas)
    top = float(logs.max(initial=0.0)) if log_max is None else float(log_max)
    counts, edges = np.histogram(logs, bins=bins, range=(0.0, top if top > 0 else 1.0))
    return DistortionReport(deltas, np.stack([i, j], axis=1), counts, edges, emb.norm)


def _sign_fix_columns(V: np.ndarray) -> np.ndarray:
    V = V.copy()
    for c in range(V.shape[1]):
        k = int(np.argmax(np.abs(V[:, c])))
        if V[k, c] < 0:
            V[:, c] *= -1
    return V


def classical_mds(space: FiniteMetricSpace, k: int) -> Embedding:
    n = space.n
    if not 1 <= k <= max(n - 1, 1):
        raise SizeMismatch(f"k must be in [1, n-1], got {k} for n={n}")
    J = np.eye(n) - 1.0 / n
    B = -0.5 * J @ (space.dist ** 2) @ J
    vals, vecs = np.linalg.eigh((B + B.T) / 2)
    order = np.argsort(vals)[::-1][:k]
    vals = np.clip(vals[order], 0.0, None)
    vecs = _sign_fix_columns(vecs[:, order])
    return Embedding(vecs * np.sqrt(vals), L2)


def compare_poa_mds(space: FiniteMetricSpace, mu, k: int = 3, cfg: SolverConfig = SolverConfig(),
                    graph: Optional[WeightedGraph] = None, bins: int = 30,
                    pos: Optional[PrincipalObservableSet] = None) -> dict:
    """POA (L-inf) vs MDS (L2) distortion histograms on shared bins."""
    if pos is None:
        pos = solve_poa(space, mu, k, cfg, graph)
    poa_emb = embed(pos, min(k, pos.k))
    mds_emb = classical_mds(space, min(k, space.n - 1))
    raw = [distortion_report(space, e, bins) for e in (poa_emb, mds_emb)]
    top = max(float(np.log1p(r.deltas).max(initial=0.0)) for r in raw)
    poa_rep, mds_rep = (distortion_report(space, e, bins, log_max=top) for e in (poa_emb, mds_emb))
    return {
        "poa": poa_rep,
        "mds": mds_rep,
        "poa_embedding": poa_emb,
        "mds_embedding": mds_emb,
        "truncated": pos.truncated,
    }


def write_svg(path, emb: Embedding, title: str = "", edges=None) -> None:
    """Static scatter of the first two coordinates, third (if any) as color."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "poakit"}):
        fig, ax = plt.subplots(figsize=(5, 5))
        X = emb.coords
        x = X[:, 0]
        y = X[:, 1] if emb.k > 1 else np.zeros_like(x)
        if edges is not None:
            for i, j in edges:
                ax.plot([x[i], x[j]], [y[i], y[j]], color="0.8", lw=0.5, zorder=0)
        if emb.k > 2:
            ax.scatter(x, y, c=X[:, 2], s=12, cmap="viridis")
        else:
            ax.scatter(x, y, color="tab:blue", s=12)
        ax.set_title(title)
        ax.set_aspect("equal", adjustable="datalim")
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
