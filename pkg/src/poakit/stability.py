"""Wasserstein-1 on finite spaces and empirical audits of the stability bounds.

The bounds hold for every 1-Lipschitz observable, so an audit over any
finite family must pass; a failure beyond tolerance means a bug upstream.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix

from .errors import MissingDistance, NotSurjective, SizeMismatch, SolverFailure, UncertifiedObservable
from .mmspace import FiniteMetricSpace, ProbabilityMeasure, uniform_measure
from .observables import check_lipschitz, distance_observable, weights_of
from .solver import build_polytope, lp_maximize, random_vertex_observables

AUDIT_TOL = 1e-8


@dataclass
class TransportPlan:
    plan: np.ndarray
    cost: float


def wasserstein1(space: FiniteMetricSpace, mu, nu) -> tuple:
    """Exact optimal-transport cost as an LP over couplings of the two supports."""
    a, b = weights_of(mu), weights_of(nu)
    if a.size != space.n or b.size != space.n:
        raise SizeMismatch("measures must live on the space's points")
    I, J = np.flatnonzero(a > 0), np.flatnonzero(b > 0)
    p, q = len(I), len(J)
    cost = space.dist[np.ix_(I, J)].ravel()
    var = np.arange(p * q)
    rows = np.concatenate([var // q, p + var % q])
    A_eq = coo_matrix((np.ones(2 * p * q), (rows, np.tile(var, 2))), shape=(p + q, p * q)).tocsr()
    b_eq = np.concatenate([a[I], b[J]])
    res = linprog(cost, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs-ds",
                  options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10})
    if res.status != 0:
        raise SolverFailure(f"transport LP failed: {res.message}")
    plan = np.zeros((space.n, space.n))
    plan[np.ix_(I, J)] = np.clip(res.x, 0.0, None).reshape(p, q)
    value = float(np.sum(plan * space.dist))
    return value, TransportPlan(plan, value)


def wasserstein1_dual(space: FiniteMetricSpace, mu, nu) -> float:
    """Kantorovich-Rubinstein form: max over 1-Lipschitz f of M_mu f - M_nu f."""
    a, b = weights_of(mu), weights_of(nu)
    P = build_polytope(space, uniform_measure(space.n))
    f = lp_maximize(a - b, P)
    return float((a - b) @ f)


@dataclass
class AuditReport:
    kind: str
    passed: bool
    w1: float
    checks: dict
    n_checked: int
    tolerance: float = AUDIT_TOL
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "status": "PASS" if self.passed else "FAIL",
            "w1": self.w1,
            "n_checked": self.n_checked,
            "tolerance": self.tolerance,
            "checks": self.checks,
            "failures": self.failures,
        }


def _require_certified(space, fs):
    for idx, f in enumerate(fs):
        cert = check_lipschitz(space, f)
        if not cert.certified:
            raise UncertifiedObservable(
                f"observable {idx} violates the 1-Lipschitz bound by {cert.max_violation:.3e}")


def mean_stability_audit(space: FiniteMetricSpace, mu, nu, observables: Sequence,
                         w1: Optional[float] = None) -> AuditReport:
    """Check |M_mu f - M_nu f| <= w1(mu, nu) for every supplied observable."""
    fs = [np.asarray(f, dtype=np.float64) for f in observables]
    _require_certified(space, fs)
    a, b = weights_of(mu), weights_of(nu)
    if w1 is None:
        w1, _ = wasserstein1(space, a, b)
    gaps = np.array([abs(a @ f - b @ f) for f in fs])
    bad = np.flatnonzero(gaps > w1 + AUDIT_TOL)
    return AuditReport(
        "mean",
        bad.size == 0,
        w1,
        {"max_mean_gap": float(gaps.max(initial=0.0)), "bound": w1},
        len(fs),
        failures=[{"index": int(i), "gap": float(gaps[i])} for i in bad],
    )


def covariance_stability_audit(space: FiniteMetricSpace, mu, nu, pairs: Sequence,
                               w1: Optional[float] = None) -> AuditReport:
    """Certificate that C_X * w1 is admissible for the two covariance tensors.

    Each (f, g) is centered under both measures. The mu- and nu-centered
    pairs must lie within w1 in sup norm, and their covariances within
    4 * D_X * w1 of each other.
    """
    a, b = weights_of(mu), weights_of(nu)
    pairs = [(np.asarray(f, dtype=np.float64), np.asarray(g, dtype=np.float64)) for f, g in pairs]
    _require_certified(space, [h for p in pairs for h in p])
    if w1 is None:
        w1, _ = wasserstein1(space, a, b)
    D = space.diameter
    cov_bound = 4.0 * D * w1
    sup_gaps, cov_gaps, failures = [], [], []
    for idx, (f, g) in enumerate(pairs):
        fm, gm = f - a @ f, g - a @ g
        fn, gn = f - b @ f, g - b @ g
        sup_gap = max(np.abs(fm - fn).max(), np.abs(gm - gn).max())
        cov_gap = abs(np.sum(a * fm * gm) - np.sum(b * fn * gn))
        sup_gaps.append(sup_gap)
        cov_gaps.append(cov_gap)
        if sup_gap > w1 + AUDIT_TOL or cov_gap > cov_bound + AUDIT_TOL:
            failures.append({"index": idx, "sup_gap": float(sup_gap), "cov_gap": float(cov_gap)})
    return AuditReport(
        "covariance",
        not failures,
        w1,
        {
            "max_sup_gap": float(max(sup_gaps, default=0.0)),
            "sup_bound": w1,
            "max_cov_gap": float(max(cov_gaps, default=0.0)),
            "cov_bound": cov_bound,
            "epsilon": max(1.0, 4.0 * D) * w1,
            "diameter": D,
        },
        len(pairs),
        failures=failures,
    )


def functional_hausdorff(phi, psi, cross) -> float:
    """Hausdorff distance between the graphs of phi and psi in Z x R (max metric).

    `cross[a, b]` is d_Z between point a of phi's domain and point b of
    psi's domain.
    """
    phi = np.asarray(phi, dtype=np.float64)
    psi = np.asarray(psi, dtype=np.float64)
    C = np.asarray(cross, dtype=np.float64)
    if C.shape != (phi.size, psi.size):
        raise MissingDistance(f"cross distances must have shape {(phi.size, psi.size)}, got {C.shape}")
    if not np.isfinite(C).all():
        raise MissingDistance("cross distance table has missing entries")
    M = np.maximum(C, np.abs(phi[:, None] - psi[None, :]))
    return float(max(M.min(axis=1).max(), M.min(axis=0).max()))


class CorrespondenceDistortion(NamedTuple):
    dis: float
    fdis: float
    score: float  # 0.5 * max(dis, 2 * fdis)


def correspondence_distortion(R, d, d2, f, f2) -> CorrespondenceDistortion:
    R = np.asarray(R, dtype=int).reshape(-1, 2)
    d, d2 = np.asarray(d, dtype=np.float64), np.asarray(d2, dtype=np.float64)
    f, f2 = np.asarray(f, dtype=np.float64), np.asarray(f2, dtype=np.float64)
    if set(R[:, 0]) != set(range(d.shape[0])) or set(R[:, 1]) != set(range(d2.shape[0])):
        raise NotSurjective("relation does not cover both sides")
    z, zp = R[:, 0], R[:, 1]
    dis = float(np.abs(d[np.ix_(z, z)] - d2[np.ix_(zp, zp)]).max())
    fdis = float(np.abs(f[z] - f2[zp]).max())
    return CorrespondenceDistortion(dis, fdis, 0.5 * max(dis, 2.0 * fdis))


def empirical_sample(space: FiniteMetricSpace, mu, m: int, seed: int = 0) -> ProbabilityMeasure:
    """Normalized counting measure of m i.i.d. draws from mu."""
    if m < 1:
        raise ValueError("m must be >= 1")
    w = weights_of(mu)
    draws = np.random.default_rng(seed).choice(space.n, size=m, p=w)
    return ProbabilityMeasure(np.bincount(draws, minlength=space.n) / m)


def default_family(space: FiniteMetricSpace, mu, pos=None, n_random: int = 50, seed: int = 0) -> list:
    """Principal observables, all distance-to-point observables, random polytope vertices."""
    fam = [] if pos is None else list(pos.observables)
    fam += [distance_observable(space, i) for i in range(space.n)]
    fam += random_vertex_observables(space, mu, n_random, seed)
    return fam


def consistency_trend(space: FiniteMetricSpace, mu, observables, sizes=(25, 50, 100, 200),
                      seeds: int = 20) -> dict:
    """Median over seeds of sup_f |M_mu f - M_mu_m f| for each sample size m."""
    w = weights_of(mu)
    F = np.vstack(observables)
    medians = []
    for m in sizes:
        gaps = [np.abs(F @ (w - empirical_sample(space, w, m, s).weights)).max() for s in range(seeds)]
        medians.append(float(np.median(gaps)))
    return {
        "sizes": list(sizes),
        "medians": medians,
        "nonincreasing": all(b <= a for a, b in zip(medians, medians[1:])),
    }
