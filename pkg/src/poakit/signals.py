"""Signals in the observable domain: mu-orthonormal basis, analysis, synthesis."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch, SizeMismatch, ZeroNormObservable
from .observables import weights_of

NORM_FLOOR = 1e-12


@dataclass(frozen=True)
class ObservableBasis:
    vectors: np.ndarray  # (k + 1, n); row 0 is the constant function 1
    norms: np.ndarray  # mu-norms of the raw observables (1.0 for the constant)
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.vectors.shape[0]

    def gram(self) -> np.ndarray:
        return (self.vectors * self.weights) @ self.vectors.T


def orthonormalize(observables, mu) -> ObservableBasis:
    """u_0 = 1 followed by u_i = phi_i / ||phi_i||_{2,mu}.

    Accepts a PrincipalObservableSet or a (k, n) array. No Gram-Schmidt is
    applied: principal observables are already centered and mutually
    mu-orthogonal.
    """
    phis = getattr(observables, "observables", observables)
    phis = np.atleast_2d(np.asarray(phis, dtype=np.float64))
    w = weights_of(mu)
    if phis.size and phis.shape[1] != w.size:
        raise LengthMismatch("observables and measure have different lengths")
    norms = np.sqrt((phis * phis) @ w) if phis.size else np.zeros(0)
    if (norms <= NORM_FLOOR).any():
        raise ZeroNormObservable(f"observable {int(np.argmin(norms)) + 1} has zero mu-norm")
    U = np.vstack([np.ones((1, w.size)), phis / norms[:, None]]) if phis.size else np.ones((1, w.size))
    return ObservableBasis(U, np.concatenate([[1.0], norms]), w.copy())


def analyze(f, basis: ObservableBasis, mu=None) -> np.ndarray:
    w = basis.weights if mu is None else weights_of(mu)
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (basis.vectors.shape[1],):
        raise LengthMismatch(f"signal has shape {f.shape}, basis expects {basis.vectors.shape[1]}")
    return basis.vectors @ (w * f)


def synthesize(spectrum, basis: ObservableBasis) -> np.ndarray:
    a = np.asarray(spectrum, dtype=np.float64)
    if a.ndim != 1 or a.size > basis.size:
        raise SizeMismatch(f"spectrum of length {a.size} exceeds basis size {basis.size}")
    return a @ basis.vectors[: a.size]


def reconstruction_errors(f, basis: ObservableBasis) -> np.ndarray:
    """||f - f_k||_{2,mu} for k = 0 .. basis.size - 1."""
    a = analyze(f, basis)
    f = np.asarray(f, dtype=np.float64)
    partial = np.cumsum(a[:, None] * basis.vectors, axis=0)
    resid = f[None, :] - partial
    return np.sqrt((resid ** 2) @ basis.weights)


def sign_changes(u, tol: float = 1e-9) -> int:
    """Sign changes along the index order, skipping entries below tol * max|u|."""
    u = np.asarray(u, dtype=np.float64)
    a = np.abs(u)
    s = np.sign(u[a > tol * a.max(initial=0.0)])
    return int(np.count_nonzero(s[1:] != s[:-1]))
