"""Smallest-eigenvalue solvers: dense for small operators, matrix-free
Lanczos with full reorthogonalization for large sparse patches.

The Lanczos result carries an explicitly recomputed residual; `value` is a
Rayleigh quotient (an upper bound on the smallest eigenvalue) and
`value - residual` is the lower edge used for certified bounds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

DENSE_CAP = 1 << 12


@dataclass(frozen=True)
class EigResult:
    value: float
    residual: float
    iterations: int
    converged: bool

    @property
    def lower_edge(self) -> float:
        """Certified lower edge value - residual."""
        return self.value - self.residual


def min_eig_dense(m) -> float:
    """Full-accuracy smallest eigenvalue of a Hermitian matrix (dim <= 4096)."""
    if hasattr(m, "toarray"):
        m = m.toarray()
    m = np.asarray(m)
    if m.shape[0] > DENSE_CAP:
        raise ValueError(f"dense path capped at dimension {DENSE_CAP}")
    return float(np.linalg.eigvalsh(m)[0])


def min_eig_dense_certified(m) -> EigResult:
    """Dense smallest eigenpair with an explicit residual for certification."""
    if hasattr(m, "toarray"):
        m = m.toarray()
    m = np.asarray(m)
    if m.shape[0] > DENSE_CAP:
        raise ValueError(f"dense path capped at dimension {DENSE_CAP}")
    w, v = np.linalg.eigh(m)
    vec = v[:, 0]
    mv = m @ vec
    val = float(np.real(np.vdot(vec, mv)))
    res = float(np.linalg.norm(mv - val * vec))
    return EigResult(val, res, 1, True)


def min_eig_lanczos(apply, dim: int, tol: float = 1e-8, seed: int = 0,
                    max_iter: int = 500) -> EigResult:
    """Smallest eigenvalue of a Hermitian operator given by its matvec.

    Full reorthogonalization (two classical Gram-Schmidt passes per step)
    keeps the basis orthonormal; convergence is decided on the tridiagonal
    Ritz pair and certified by recomputing the residual with a final matvec.
    Deterministic for a fixed seed. `apply` may be a callable or anything
    supporting `@` (e.g. a scipy sparse matrix).
    """
    if not callable(apply):
        op = apply
        apply = lambda v: op @ v
    if tol <= 0:
        raise ValueError("tol must be positive")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    w0 = apply(v)
    dtype = np.result_type(w0.dtype, np.float64)
    q = np.zeros((dim, min(max_iter, dim) + 1), dtype=dtype)
    q[:, 0] = v
    alphas: list[float] = []
    betas: list[float] = []
    kmax = min(max_iter, dim)
    w = np.asarray(w0, dtype=dtype)
    exhausted = False

    for j in range(kmax):
        if j > 0:
            w = apply(q[:, j])
        a = float(np.real(np.vdot(q[:, j], w)))
        alphas.append(a)
        w = w - a * q[:, j]
        if j > 0:
            w = w - betas[-1] * q[:, j - 1]
        for _ in range(2):  # full reorthogonalization
            w = w - q[:, : j + 1] @ (q[:, : j + 1].conj().T @ w)
        beta = float(np.linalg.norm(w))
        theta, u = _smallest_ritz(alphas, betas)
        est = beta * abs(u[-1])
        if est <= 0.1 * tol or beta <= 1e-14 or j == kmax - 1:
            vec = q[:, : j + 1] @ u
            vec /= np.linalg.norm(vec)
            mv = apply(vec)
            val = float(np.real(np.vdot(vec, mv)))
            res = float(np.linalg.norm(mv - val * vec))
            if res <= tol or beta <= 1e-14:
                return EigResult(val, res, j + 1, True)
            if j == kmax - 1:
                return EigResult(val, res, j + 1, False)
        betas.append(beta)
        q[:, j + 1] = w / beta

    raise AssertionError("unreachable")  # loop always returns


def _smallest_ritz(alphas, betas):
    w, v = scipy.linalg.eigh_tridiagonal(np.asarray(alphas), np.asarray(betas[: len(alphas) - 1]))
    return float(w[0]), v[:, 0]
