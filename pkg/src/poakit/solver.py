"""Principal observables by variance maximization over the Lipschitz polytope.

The variance of a centered observable is the convex quadratic sum_i mu_i f_i^2,
so its maximum over the (bounded) polytope of centered 1-Lipschitz functions
sits at a vertex. The search is a convex-concave procedure: repeatedly
maximize the linearization 2 mu * f_t over the polytope (one LP per step).
Restarts from several starting points reduce the risk of ending in a poor
local maximum; the result is a heuristic, not a certified global optimum.
"""
from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix

from .errors import DegenerateVariance, ModeMismatch, SolverFailure, TooLarge
from .mmspace import FiniteMetricSpace, ProbabilityMeasure, WeightedGraph
from .observables import LIPSCHITZ_TOL, check_lipschitz, weights_of

log = logging.getLogger(__name__)

_HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
    "presolve": True,
}


@dataclass(frozen=True)
class SolverConfig:
    restarts: int = 16
    max_ccp_iters: int = 100
    rel_improvement_tol: float = 1e-7
    variance_floor: float = 1e-10
    seed: int = 0
    constraint_mode: str = "pairwise"
    workers: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_ccp_iters < 1:
            raise ValueError("max_ccp_iters must be >= 1")
        if not (self.rel_improvement_tol > 0 and self.variance_floor > 0):
            raise ValueError("tolerances must be positive")
        if self.constraint_mode not in ("pairwise", "edges"):
            raise ModeMismatch(f"unknown constraint mode {self.constraint_mode!r}")


@dataclass
class LipschitzPolytope:
    """{f : |f_i - f_j| <= d_ij on listed pairs, eq_rows @ f = 0}."""

    n: int
    pairs: np.ndarray
    pair_bounds: np.ndarray
    eq_rows: np.ndarray
    box: float
    mode: str

    def __post_init__(self):
        m = len(self.pairs)
        rows = np.repeat(np.arange(2 * m), 2)
        i, j = self.pairs[:, 0], self.pairs[:, 1]
        # row 2k: f_i - f_j <= d ; row 2k+1: f_j - f_i <= d
        cols = np.stack([i, j, j, i], axis=1).reshape(-1)
        vals = np.tile([1.0, -1.0, 1.0, -1.0], m)
        self.A_ub = csr_matrix((vals, (rows, cols)), shape=(2 * m, self.n))
        self.b_ub = np.repeat(self.pair_bounds, 2)

    @property
    def n_pairs(self) -> int:
        return len(self.pairs)

    @property
    def n_equalities(self) -> int:
        return self.eq_rows.shape[0]

    def residuals(self, f):
        """(max inequality violation, max |equality residual|)."""
        f = np.asarray(f)
        ineq = np.abs(f[self.pairs[:, 0]] - f[self.pairs[:, 1]]) - self.pair_bounds
        eq = self.eq_rows @ f
        return float(ineq.max(initial=-np.inf)), float(np.abs(eq).max(initial=0.0))

    def contains(self, f, tol: float = 1e-9) -> bool:
        ineq, eq = self.residuals(f)
        return ineq <= tol and eq <= tol


def build_polytope(space: FiniteMetricSpace, mu, priors: Sequence = (), mode: str = "pairwise",
                   graph: Optional[WeightedGraph] = None) -> LipschitzPolytope:
    w = weights_of(mu)
    if mode == "pairwise":
        i, j = np.triu_indices(space.n, 1)
        pairs = np.stack([i, j], axis=1)
        bounds = space.dist[i, j].copy()
    elif mode == "edges":
        if graph is None:
            raise ModeMismatch("edges mode needs the source graph")
        if graph.n != space.n:
            raise ModeMismatch("graph and space sizes differ")
        pairs, bounds = graph.edge_array()
    else:
        raise ModeMismatch(f"unknown mode {mode!r}")
    rows = [w] + [w * np.asarray(p, dtype=np.float64) for p in priors]
    return LipschitzPolytope(space.n, pairs, bounds, np.vstack(rows), space.diameter, mode)


def lp_maximize(c, P: LipschitzPolytope) -> np.ndarray:
    """A maximizer of <c, f> over the polytope (a vertex, via dual simplex)."""
    c = np.asarray(c, dtype=np.float64)
    if not np.any(c):
        return np.zeros(P.n)
    # coordinates of a centered observable are bounded by the diameter
    res = linprog(-c, A_ub=P.A_ub, b_ub=P.b_ub, A_eq=P.eq_rows, b_eq=np.zeros(P.n_equalities),
                  bounds=(-P.box, P.box), method="highs-ds", options=_HIGHS_OPTIONS)
    if res.status != 0:
        raise SolverFailure(f"LP subproblem failed: {res.message}")
    return res.x


def sign_normalize(f, tol: float = 1e-9) -> np.ndarray:
    """Flip f so that its largest-magnitude entry (lowest index on ties) is positive."""
    f = np.asarray(f, dtype=np.float64)
    a = np.abs(f)
    if a.max(initial=0.0) == 0:
        return f.copy()
    k = int(np.flatnonzero(a >= a.max() - tol)[0])
    return -f if f[k] < 0 else f.copy()


def _variance(w, f) -> float:
    fc = f - w @ f
    return float(np.sum(w * fc * fc))


def barycenter_start(space: FiniteMetricSpace, w) -> tuple:
    """Centered distance-to-x* where x* minimizes sum_i w_i d(x, x_i)^2."""
    star = int(np.argmin((space.dist ** 2) @ w))
    f = space.dist[star]
    return star, f - w @ f


@dataclass
class RunResult:
    values: np.ndarray
    variance: float
    iterations: int
    trace: list


def _ccp_run(P: LipschitzPolytope, w, start, cfg: SolverConfig) -> RunResult:
    trace = []
    f = np.asarray(start, dtype=np.float64)
    var = -np.inf
    if P.contains(f):
        var = _variance(w, f)
        trace.append(var)
    iters = 0
    for iters in range(1, cfg.max_ccp_iters + 1):
        f_new = lp_maximize(2.0 * w * f, P)
        v_new = _variance(w, f_new)
        if v_new < var:
            # linearization bound guarantees ascent; a drop is LP round-off
            if var - v_new > 1e-9 * max(var, 1.0):
                log.warning("CCP variance decreased by %.3e", var - v_new)
            break
        gain = v_new - var
        f, var = f_new, v_new
        trace.append(var)
        if gain <= cfg.rel_improvement_tol * max(var, 1e-300):
            break
    return RunResult(f, var, iters, trace)


@dataclass
class PrincipalObservable:
    values: np.ndarray
    variance: float
    diagnostics: dict = field(default_factory=dict)


def _starts(space, w, P, cfg: SolverConfig, n_priors: int, extra_starts):
    """Deterministic starts first, then seeded random LP vertices."""
    _, f0 = barycenter_start(space, w)
    starts = [("barycenter", f0)]
    if cfg.restarts >= 2:
        star = int(np.argmin((space.dist ** 2) @ w))
        far = int(np.argmax(space.dist[star]))
        g = space.dist[far]
        starts.append(("eccentric", g - w @ g))
    for s in extra_starts:
        starts.append(("supplied", np.asarray(s, dtype=np.float64)))
    children = np.random.SeedSequence([cfg.seed, n_priors]).spawn(max(cfg.restarts - 2, 0))
    for child in children:
        u = np.random.default_rng(child).standard_normal(space.n)
        starts.append(("random", lp_maximize(u / np.linalg.norm(u), P)))
    return starts


def solve_principal_observable(space: FiniteMetricSpace, mu, priors: Sequence = (),
                               cfg: SolverConfig = SolverConfig(),
                               graph: Optional[WeightedGraph] = None,
                               extra_starts: Sequence = ()) -> PrincipalObservable:
    w = weights_of(mu)
    P = build_polytope(space, w, priors, cfg.constraint_mode, graph)
    starts = _starts(space, w, P, cfg, len(priors), extra_starts)

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as ex:
            runs = list(ex.map(lambda s: _ccp_run(P, w, s[1], cfg), starts))
    else:
        runs = [_ccp_run(P, w, s, cfg) for _, s in starts]

    best = 0
    for r, run in enumerate(runs):
        if run.variance > runs[best].variance + 1e-12:
            best = r
    run = runs[best]
    if run.variance < cfg.variance_floor:
        raise DegenerateVariance(max(run.variance, 0.0), cfg.variance_floor)

    f = run.values - w @ run.values
    f = sign_normalize(f)
    cert = check_lipschitz(space, f, 1.0, cfg.constraint_mode, graph)
    if not cert.certified:
        raise SolverFailure(f"solver output violates Lipschitz bound by {cert.max_violation:.3e}")
    diag = {
        "restarts_used": len(runs),
        "best_restart": best,
        "best_start_kind": starts[best][0],
        "iterations": run.iterations,
        "total_iterations": int(sum(r.iterations for r in runs)),
        "trace": run.trace,
        "run_variances": [r.variance for r in runs],
        "lipschitz_slack": cert.max_violation,
    }
    return PrincipalObservable(f, _variance(w, f), diag)


@dataclass
class PrincipalObservableSet:
    observables: np.ndarray  # shape (k, n), row m is the (m+1)-th observable
    variances: np.ndarray
    diagnostics: list
    truncated: bool
    requested: int

    @property
    def k(self) -> int:
        return len(self.variances)

    def __len__(self):
        return self.k


def solve_poa(space: FiniteMetricSpace, mu, k: int, cfg: SolverConfig = SolverConfig(),
              graph: Optional[WeightedGraph] = None, max_backtracks: Optional[int] = None
              ) -> PrincipalObservableSet:
    """First k principal observables, stopping early once variance degenerates.

    If a later observable beats an earlier one, the earlier solve was stuck in
    a local maximum; the better function is still feasible for the earlier
    problem, so that slot is re-solved from it and later slots are redone.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    w = weights_of(mu)
    found: list = []
    truncated = False
    backtracks = 0
    limit = 4 * k if max_backtracks is None else max_backtracks
    hint: dict = {}
    while len(found) < k:
        m = len(found)
        priors = [p.values for p in found]
        try:
            po = solve_principal_observable(space, w, priors, cfg, graph, hint.pop(m, ()))
        except DegenerateVariance:
            truncated = True
            break
        if m > 0 and po.variance > found[-1].variance * (1 + 1e-9) + 1e-12 and backtracks < limit:
            backtracks += 1
            log.info("observable %d beats observable %d; re-solving", m + 1, m)
            found.pop()
            hint = {m - 1: (po.values,)}
            continue
        found.append(po)
    if not found:
        return PrincipalObservableSet(np.zeros((0, space.n)), np.zeros(0), [], truncated, k)
    return PrincipalObservableSet(
        np.vstack([p.values for p in found]),
        np.array([p.variance for p in found]),
        [p.diagnostics for p in found],
        truncated,
        k,
    )


def brute_force_po(space: FiniteMetricSpace, mu, priors: Sequence = ()) -> tuple:
    """Exhaustive vertex enumeration of the pairwise polytope (n <= 6).

    Each vertex is pinned by n - (#equalities) tight pair constraints
    f_i - f_j = +-d_ij together with the equality rows. Returns the feasible
    vertex of largest variance as (values, variance).
    """
    n = space.n
    if n > 6:
        raise TooLarge(f"brute force limited to n <= 6, got {n}")
    w = weights_of(mu)
    P = build_polytope(space, w, priors, "pairwise")
    E = P.eq_rows
    r = n - E.shape[0]
    if r <= 0:
        return np.zeros(n), 0.0
    best_f, best_v = np.zeros(n), 0.0
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=r))).T  # (r, 2^r)
    for combo in itertools.combinations(range(P.n_pairs), r):
        A = np.zeros((n, n))
        for row, p in enumerate(combo):
            i, j = P.pairs[p]
            A[row, i], A[row, j] = 1.0, -1.0
        A[r:] = E
        if abs(np.linalg.det(A)) < 1e-12 or np.linalg.cond(A) > 1e12:
            continue
        rhs = np.zeros((n, signs.shape[1]))
        rhs[:r] = signs * P.pair_bounds[list(combo)][:, None]
        X = np.linalg.solve(A, rhs)  # (n, 2^r)
        viol = np.abs(X[P.pairs[:, 0]] - X[P.pairs[:, 1]]) - P.pair_bounds[:, None]
        ok = viol.max(axis=0) <= 1e-9
        if not ok.any():
            continue
        Xf = X[:, ok]
        Xc = Xf - w @ Xf
        v = (w[:, None] * Xc * Xc).sum(axis=0)
        a = int(np.argmax(v))
        if v[a] > best_v + 1e-15:
            best_v, best_f = float(v[a]), Xc[:, a]
    return sign_normalize(best_f), best_v


def random_vertex_observables(space: FiniteMetricSpace, mu, count: int, seed: int = 0,
                              mode: str = "pairwise", graph: Optional[WeightedGraph] = None):
    """Seeded random vertices of the centered Lipschitz polytope."""
    P = build_polytope(space, mu, (), mode, graph)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        u = rng.standard_normal(space.n)
        out.append(lp_maximize(u, P))
    return out
