"""Lowest eigenpairs of sparse Hermitian operators, with certification.

Two routes: a dense direct solve (LAPACK Hermitian eigendecomposition)
for reference accuracy at small dimension, and Lanczos with full
reorthogonalization of the Krylov basis for larger problems.  Full
rather than selective reorthogonalization is deliberate: problem sizes
here are desk scale and ghost eigenvalues would poison the
quantization-minima detection downstream.

Residuals ||H v - lambda v|| are always recomputed from the returned
pairs, never trusted from solver bookkeeping.  Degenerate eigenvalues
(routine at half-integer flux) are handled by judging convergence on
values and residuals only; eigenvectors are degeneracy ambiguous and no
claim is made about them beyond orthonormality.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .hamiltonian import SparseHermitian

_DENSE_MAX_N = 4096
_AUTO_DENSE_N = 1024

METHODS = ("dense", "lanczos", "auto")


class NoConvergenceError(RuntimeError):
    """Iteration budget exhausted; carries the best pairs found so far."""

    def __init__(self, message: str, best: Optional["EigenResult"] = None):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class SolverConfig:
    k: int = 6
    tol: float = 1e-10
    max_iter: Optional[int] = None  # None -> 10 * n
    seed: int = 2024
    method: str = "auto"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")
        if not self.tol > 0:
            raise ValueError(f"tol must be > 0, got {self.tol}")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError(f"max_iter must be positive, got {self.max_iter}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class EigenResult:
    """Ascending eigenvalues, unit-norm eigenvectors (columns), residuals."""

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray

    @property
    def k(self) -> int:
        return len(self.values)


def _finalize(h: SparseHermitian, values: np.ndarray, vectors: np.ndarray) -> EigenResult:
    norms = np.linalg.norm(vectors, axis=0)
    vectors = vectors / norms
    residuals = np.linalg.norm(h.csr @ vectors - vectors * values, axis=0)
    for arr in (values, vectors, residuals):
        arr.setflags(write=False)
    return EigenResult(values=values, vectors=vectors, residuals=residuals)


def dense_eigh(h: SparseHermitian) -> EigenResult:
    """Full spectral decomposition; reference path, n <= 4096."""
    if h.n > _DENSE_MAX_N:
        raise ValueError(f"dense path limited to n <= {_DENSE_MAX_N}, got {h.n}")
    values, vectors = np.linalg.eigh(h.toarray())
    return _finalize(h, values, vectors)


def residual_report(h: SparseHermitian, res: EigenResult) -> np.ndarray:
    """Recompute ||H v - lambda v||_2 independently of the solver."""
    if res.vectors.shape[0] != h.n:
        raise ValueError(f"vectors have dimension {res.vectors.shape[0]}, operator has {h.n}")
    return np.linalg.norm(h.csr @ res.vectors - res.vectors * res.values, axis=0)


def _random_unit(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def _reorthogonalize(w: np.ndarray, basis: np.ndarray) -> np.ndarray:
    # two classical Gram-Schmidt passes against the whole Krylov basis
    for _ in range(2):
        w = w - basis @ (basis.conj().T @ w)
    return w


def lanczos_lowest(h: SparseHermitian, cfg: SolverConfig) -> EigenResult:
    """k lowest eigenpairs by Lanczos with full reorthogonalization.

    The Krylov basis is reorthogonalized at every step; on breakdown
    (invariant subspace found) a fresh random direction restarts the
    recurrence with a zero coupling, so degenerate multiplets are still
    captured.  Iteration stops once the k lowest Ritz residual bounds and
    then the recomputed true residuals meet tol * max(1, |lambda|_max).
    Deterministic for a fixed seed.
    """
    n = h.n
    k = cfg.k
    if k > n:
        raise ValueError(f"k={k} exceeds dimension n={n}")
    rng = np.random.default_rng(cfg.seed)
    max_iter = cfg.max_iter if cfg.max_iter is not None else 10 * n

    basis = np.zeros((n, min(n, max_iter) + 1), dtype=complex)
    basis[:, 0] = _random_unit(rng, n)
    alphas: list[float] = []
    betas: list[float] = []
    best: Optional[EigenResult] = None

    def extract(m: int):
        vals, s = eigh_tridiagonal(np.array(alphas[:m]), np.array(betas[: m - 1]))
        return vals, s

    m = 0
    for _ in range(max_iter):
        if m == n:
            break
        v = basis[:, m]
        w = h.matvec(v)
        alpha = float(np.real(np.vdot(v, w)))
        alphas.append(alpha)
        m += 1
        w = w - alpha * v
        if m > 1 and betas[m - 2] != 0.0:
            w = w - betas[m - 2] * basis[:, m - 2]
        w = _reorthogonalize(w, basis[:, :m])
        beta = float(np.linalg.norm(w))

        if m >= k:
            vals, s = extract(m)
            scale = max(1.0, float(np.max(np.abs(vals))))
            bounds = abs(beta) * np.abs(s[m - 1, :k])
            if np.all(bounds <= cfg.tol * scale) or m == n:
                vectors = basis[:, :m] @ s[:, :k]
                candidate = _finalize(h, vals[:k].copy(), vectors)
                best = candidate
                if np.all(candidate.residuals <= cfg.tol * scale):
                    return candidate

        if m == n:
            break
        breakdown = beta <= 1e-13 * max(1.0, abs(alpha))
        if breakdown:
            fresh = _reorthogonalize(_random_unit(rng, n), basis[:, :m])
            norm = np.linalg.norm(fresh)
            if norm < 1e-8:  # space exhausted numerically
                break
            basis[:, m] = fresh / norm
            betas.append(0.0)
        else:
            basis[:, m] = w / beta
            betas.append(beta)

    if m >= k:
        vals, s = extract(m)
        best = _finalize(h, vals[:k].copy(), basis[:, :m] @ s[:, :k])
        scale = max(1.0, float(np.max(np.abs(vals))))
        if np.all(best.residuals <= cfg.tol * scale):
            return best
    raise NoConvergenceError(
        f"Lanczos did not reach tol={cfg.tol} within {max_iter} iterations", best=best
    )


def solve(h: SparseHermitian, cfg: SolverConfig) -> EigenResult:
    """Dispatch on cfg.method; auto picks dense for n <= 1024."""
    if cfg.k > h.n:
        raise ValueError(f"k={cfg.k} exceeds dimension n={h.n}")
    method = cfg.method
    if method == "auto":
        method = "dense" if h.n <= _AUTO_DENSE_N else "lanczos"
    if method == "dense":
        full = dense_eigh(h)
        k = cfg.k
        return EigenResult(
            values=full.values[:k], vectors=full.vectors[:, :k], residuals=full.residuals[:k]
        )
    return lanczos_lowest(h, cfg)
