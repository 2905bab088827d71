"""Self-contained block-diagonal semidefinite programming.

Primal standard form over symmetric blocks X_k >= 0:

    minimize    sum_k tr(C_k X_k)
    subject to  sum_k tr(A_{i,k} X_k) = b_i,   i = 1..m

solved by a dense symmetric primal-dual path-following method with a
Mehrotra predictor-corrector step (HKM direction); the Schur complement
normal equations are assembled densely and solved by Cholesky. The dual
objective b^T y is a certified lower bound on the optimum whenever the
dual residual is small; `dual_lower_bound` turns it into a rigorous one
for trace-bounded problems. Complex Hermitian data enters through
`real_embed` upstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

_SYM_TOL = 1e-12


@dataclass
class SdpProblem:
    """Block-diagonal SDP data.

    blocks: block sizes.
    C: one symmetric matrix per block.
    A: one array of shape (m, n_k, n_k) per block holding the constraint
       matrices (stacked over constraints).
    b: right-hand sides, length m.
    """

    blocks: list
    C: list
    A: list
    b: np.ndarray

    def __post_init__(self):
        self.b = np.asarray(self.b, dtype=float)
        if len(self.blocks) != len(self.C) or len(self.blocks) != len(self.A):
            raise ValueError("blocks, C and A must align")
        if self.b.ndim != 1 or self.b.size < 1:
            raise ValueError("need at least one constraint")
        for n, c, a in zip(self.blocks, self.C, self.A):
            if n < 1:
                raise ValueError("block sizes must be >= 1")
            if c.shape != (n, n) or a.shape != (self.b.size, n, n):
                raise ValueError("matrix shapes inconsistent with block sizes")
            if np.max(np.abs(c - c.T)) > _SYM_TOL * max(1, np.max(np.abs(c))):
                raise ValueError("objective block is not symmetric")
            dev = np.max(np.abs(a - a.transpose(0, 2, 1)))
            if dev > _SYM_TOL * max(1, np.max(np.abs(a))):
                raise ValueError("constraint block is not symmetric")

    @property
    def n_constraints(self) -> int:
        return self.b.size

    @classmethod
    def from_constraint_list(cls, blocks, C, constraints, b) -> "SdpProblem":
        """Build from per-constraint lists of per-block matrices."""
        m = len(constraints)
        A = [np.zeros((m, n, n)) for n in blocks]
        for i, blks in enumerate(constraints):
            for k, mat in enumerate(blks):
                if mat is not None:
                    A[k][i] = mat
        return cls(list(blocks), [np.asarray(c, dtype=float) for c in C], A,
                   np.asarray(b, dtype=float))


@dataclass
class SdpSolution:
    status: str                 # optimal | infeasible | max_iter
    X: list
    y: np.ndarray
    S: list
    primal_obj: float
    dual_obj: float
    gap: float                  # normalized duality gap
    feas_primal: float
    feas_dual: float
    iterations: int
    diagnostics: dict = field(default_factory=dict)


def real_embed(h: np.ndarray) -> np.ndarray:
    """Real embedding [[Re h, -Im h], [Im h, Re h]] of a Hermitian matrix.

    The embedding is PSD iff h is, and its trace is 2 tr(h).
    """
    h = np.asarray(h, dtype=complex)
    if np.max(np.abs(h - h.conj().T)) > 1e-10 * max(1, np.max(np.abs(h))):
        raise ValueError("matrix is not Hermitian")
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def _sym(m: np.ndarray) -> np.ndarray:
    return (m + m.T) / 2.0


def _max_step(m_psd: np.ndarray, direction: np.ndarray) -> float:
    """Largest alpha with m_psd + alpha*direction staying PSD (m_psd > 0)."""
    try:
        L = np.linalg.cholesky(m_psd)
    except np.linalg.LinAlgError:
        L = np.linalg.cholesky(m_psd + 1e-12 * np.trace(m_psd) * np.eye(m_psd.shape[0]))
    w = scipy.linalg.solve_triangular(L, direction, lower=True)
    w = scipy.linalg.solve_triangular(L, w.T, lower=True)
    lam = float(np.min(np.linalg.eigvalsh(_sym(w))))
    if lam >= -1e-14:
        return np.inf
    return -1.0 / lam


def _independent_rows(A, m: int, tol: float = 1e-11) -> np.ndarray:
    """Indices of a maximal linearly independent subset of the constraints."""
    K = np.hstack([a.reshape(m, -1) for a in A])
    _, R, piv = scipy.linalg.qr(K.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > tol * max(diag[0], 1.0))) if diag.size else 0
    return np.sort(piv[:rank])


def solve(problem: SdpProblem, gap_tol: float = 1e-9, feas_tol: float = 1e-9,
          max_iter: int = 100, _assume_independent: bool = False) -> SdpSolution:
    """Primal-dual path-following solve with a certified duality gap.

    On numerical breakdown or stalling the current iterate is returned with
    status 'max_iter' (never a fabricated optimum); divergence is reported
    as 'infeasible'.
    """
    nb = len(problem.blocks)
    m = problem.n_constraints
    b = problem.b
    C = [np.asarray(c, dtype=float) for c in problem.C]
    A = [np.asarray(a, dtype=float) for a in problem.A]
    n_tot = sum(problem.blocks)

    norm_b = max(1.0, float(np.linalg.norm(b)))
    norm_data = max(1.0, max(float(np.max(np.abs(c))) for c in C),
                    max(float(np.max(np.abs(a))) if a.size else 1.0 for a in A))

    tau_p = max(1.0, float(np.max(np.abs(b)))) * np.sqrt(max(n_tot, 1))
    tau_d = norm_data
    X = [tau_p * np.eye(n) for n in problem.blocks]
    S = [tau_d * np.eye(n) for n in problem.blocks]
    y = np.zeros(m)

    def op_A(Xs):
        out = np.zeros(m)
        for k in range(nb):
            out += A[k].reshape(m, -1) @ Xs[k].ravel()
        return out

    def op_At(yv):
        return [np.tensordot(yv, A[k], axes=1) for k in range(nb)]

    status = "max_iter"
    it = 0
    diagnostics = {}
    best = None        # (score, X, y, S) snapshot; roundoff can undo progress
    best_score = np.inf
    stall = 0
    for it in range(1, max_iter + 1):
        mu = sum(float(np.sum(X[k] * S[k])) for k in range(nb)) / n_tot
        r_p = b - op_A(X)
        Aty = op_At(y)
        R_d = [C[k] - S[k] - Aty[k] for k in range(nb)]

        p_obj = sum(float(np.sum(C[k] * X[k])) for k in range(nb))
        d_obj = float(b @ y)
        feas_p = float(np.linalg.norm(r_p)) / norm_b
        feas_d = max(float(np.max(np.abs(R_d[k]))) for k in range(nb)) / norm_data
        gap = abs(p_obj - d_obj) / (1.0 + abs(p_obj) + abs(d_obj))

        score = max(gap / gap_tol, feas_p / feas_tol, feas_d / feas_tol)
        if score < best_score:
            best_score = score
            best = ([x.copy() for x in X], y.copy(), [s.copy() for s in S])
            stall = 0
        else:
            stall += 1

        if gap <= gap_tol and feas_p <= feas_tol and feas_d <= feas_tol:
            status = "optimal"
            break
        if not np.isfinite(mu) or mu > 1e14 or max(abs(p_obj), abs(d_obj)) > 1e14:
            status = "infeasible"
            diagnostics["divergence"] = True
            break
        if stall >= 5:
            diagnostics["stalled"] = True
            break

        # factor S, X
        Sinv = []
        ok = True
        for k in range(nb):
            try:
                cf = scipy.linalg.cho_factor(S[k], lower=True)
                Sinv.append(scipy.linalg.cho_solve(cf, np.eye(problem.blocks[k])))
            except np.linalg.LinAlgError:
                ok = False
                break
        if not ok:
            diagnostics["breakdown"] = "S factorization failed"
            break

        # Schur complement M_ij = tr(A_i X A_j S^{-1}).  Symmetric positive
        # definite by cyclicity; note the G factor must hold S^{-1} A_j, not
        # A_j S^{-1}, or the product assembles tr(A_i X S^{-1} A_j) instead.
        M = np.zeros((m, m))
        for k in range(nb):
            n = problem.blocks[k]
            Fk = (A[k].reshape(m * n, n) @ X[k]).reshape(m, n * n)
            Gk = (A[k].reshape(m * n, n) @ Sinv[k]).reshape(m, n, n)
            M += Fk @ Gk.transpose(0, 2, 1).reshape(m, n * n).T
        M = _sym(M)

        try:
            Mf = scipy.linalg.cho_factor(M, lower=True)

            def solve_M(rhs, _Mf=Mf):
                # iterative refinement; the Schur complement gets severely
                # ill-conditioned as mu -> 0
                dy = scipy.linalg.cho_solve(_Mf, rhs)
                for _ in range(2):
                    dy += scipy.linalg.cho_solve(_Mf, rhs - M @ dy)
                return dy
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
            if not _assume_independent:
                # exactly dependent (consistent) constraints: prune and restart
                keep = _independent_rows(A, m)
                if len(keep) < m:
                    sub = SdpProblem([n for n in problem.blocks],
                                     C, [a[keep] for a in A], b[keep])
                    sol = solve(sub, gap_tol=gap_tol, feas_tol=feas_tol,
                                max_iter=max_iter, _assume_independent=True)
                    y_full = np.zeros(m)
                    y_full[keep] = sol.y
                    sol.y = y_full
                    sol.diagnostics["pruned_constraints"] = m - len(keep)
                    return sol
                _assume_independent = True
            # near-singular Schur complement: ridge-lifted factorization with
            # refinement against the unlifted matrix
            diagnostics["schur_fallback"] = True
            lift = 1e-13 * max(float(np.max(np.diag(M))), 1.0)
            Mf = None
            for _ in range(20):
                try:
                    Mf = scipy.linalg.cho_factor(M + lift * np.eye(m), lower=True)
                    break
                except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
                    lift *= 100.0
            if Mf is None:
                diagnostics["breakdown"] = "Schur factorization failed"
                break

            def solve_M(rhs, _Mf=Mf):
                dy = scipy.linalg.cho_solve(_Mf, rhs)
                for _ in range(3):
                    dy += scipy.linalg.cho_solve(_Mf, rhs - M @ dy)
                return dy

        XRS = [X[k] @ R_d[k] @ Sinv[k] for k in range(nb)]

        def newton(sigma_mu, cross=None):
            rhs = b.copy()
            for k in range(nb):
                n = problem.blocks[k]
                rhs -= sigma_mu * A[k].reshape(m, -1) @ Sinv[k].ravel()
                rhs += A[k].reshape(m, -1) @ XRS[k].ravel()
                if cross is not None:
                    rhs += A[k].reshape(m, -1) @ (cross[k] @ Sinv[k]).ravel()
            dy = solve_M(rhs)
            dS = [R_d[k] - np.tensordot(dy, A[k], axes=1) for k in range(nb)]
            dX = []
            for k in range(nb):
                t = sigma_mu * Sinv[k] - X[k] - X[k] @ dS[k] @ Sinv[k]
                if cross is not None:
                    t = t - cross[k] @ Sinv[k]
                dX.append(_sym(t))
            return dX, dy, dS

        # predictor
        dXa, dya, dSa = newton(0.0)
        ap = min(1.0, 0.98 * min(_max_step(X[k], dXa[k]) for k in range(nb)))
        ad = min(1.0, 0.98 * min(_max_step(S[k], dSa[k]) for k in range(nb)))
        mu_aff = sum(float(np.sum((X[k] + ap * dXa[k]) * (S[k] + ad * dSa[k])))
                     for k in range(nb)) / n_tot
        sigma = min(1.0, max(1e-8, (max(mu_aff, 0.0) / mu) ** 3))

        # corrector
        cross = [dXa[k] @ dSa[k] for k in range(nb)]
        dX, dy, dS = newton(sigma * mu, cross)
        ap = min(1.0, 0.98 * min(_max_step(X[k], dX[k]) for k in range(nb)))
        ad = min(1.0, 0.98 * min(_max_step(S[k], dS[k]) for k in range(nb)))
        if ap < 1e-10 and ad < 1e-10:
            diagnostics["breakdown"] = "step length collapsed"
            break

        for k in range(nb):
            X[k] = _sym(X[k] + ap * dX[k])
            S[k] = _sym(S[k] + ad * dS[k])
        y = y + ad * dy

    if status != "infeasible" and best is not None:
        # report the best iterate seen; late iterations can lose accuracy
        X, y, S = best
    p_obj = sum(float(np.sum(C[k] * X[k])) for k in range(nb))
    d_obj = float(b @ y)
    r_p = b - op_A(X)
    Aty = op_At(y)
    R_d = [C[k] - S[k] - Aty[k] for k in range(nb)]
    feas_p = float(np.linalg.norm(r_p)) / norm_b
    feas_d = max(float(np.max(np.abs(R_d[k]))) for k in range(nb)) / norm_data
    gap = abs(p_obj - d_obj) / (1.0 + abs(p_obj) + abs(d_obj))
    if status != "infeasible" and gap <= gap_tol and feas_p <= feas_tol and feas_d <= feas_tol:
        status = "optimal"
    diagnostics.setdefault("mu", sum(float(np.sum(X[k] * S[k])) for k in range(nb)) / n_tot)
    return SdpSolution(status=status, X=X, y=y, S=S, primal_obj=p_obj, dual_obj=d_obj,
                       gap=gap, feas_primal=feas_p, feas_dual=feas_d,
                       iterations=it, diagnostics=diagnostics)


def dual_residual_matrices(problem: SdpProblem, solution: SdpSolution) -> list:
    """C_k - S_k - (A^T y)_k per block, recomputed from scratch."""
    out = []
    for k in range(len(problem.blocks)):
        Aty = np.tensordot(solution.y, problem.A[k], axes=1)
        out.append(problem.C[k] - solution.S[k] - Aty)
    return out


def dual_lower_bound(problem: SdpProblem, solution: SdpSolution,
                     trace_bounds) -> float:
    """Rigorous lower bound on the SDP optimum from the dual iterate.

    For any primal-feasible X, tr(C X) - b^T y = tr((S + R_d) X) >= -sum_k
    ||R_d,k||_2 tr(X_k) when S >= 0; `trace_bounds` are per-block bounds on
    tr(X_k) over the feasible set (1 for state blocks). The returned value
    subtracts that worst case, and additionally any negative part of S.
    """
    correction = 0.0
    for k, tb in enumerate(trace_bounds):
        Aty = np.tensordot(solution.y, problem.A[k], axes=1)
        R = problem.C[k] - solution.S[k] - Aty
        s_min = float(np.min(np.linalg.eigvalsh(_sym(solution.S[k]))))
        r_norm = float(np.max(np.abs(np.linalg.eigvalsh(_sym(R)))))
        correction += (r_norm + max(0.0, -s_min)) * tb
    return solution.dual_obj - correction


def validate_certificate(problem: SdpProblem, solution: SdpSolution,
                         gap_tol: float = 1e-9, feas_tol: float = 1e-9) -> dict:
    """Recompute residuals and gap from scratch; flag discrepancies > 10x tolerance."""
    nb = len(problem.blocks)
    m = problem.n_constraints
    p_obj = sum(float(np.sum(problem.C[k] * solution.X[k])) for k in range(nb))
    d_obj = float(problem.b @ solution.y)
    ax = np.zeros(m)
    for k in range(nb):
        ax += problem.A[k].reshape(m, -1) @ solution.X[k].ravel()
    norm_b = max(1.0, float(np.linalg.norm(problem.b)))
    feas_p = float(np.linalg.norm(problem.b - ax)) / norm_b
    R_d = dual_residual_matrices(problem, solution)
    norm_data = max(1.0, max(float(np.max(np.abs(c))) for c in problem.C))
    feas_d = max(float(np.max(np.abs(r))) for r in R_d) / norm_data
    gap = abs(p_obj - d_obj) / (1.0 + abs(p_obj) + abs(d_obj))
    x_min = min(float(np.min(np.linalg.eigvalsh(_sym(x)))) for x in solution.X)
    s_min = min(float(np.min(np.linalg.eigvalsh(_sym(s)))) for s in solution.S)
    report = {
        "primal_obj": p_obj, "dual_obj": d_obj, "gap": gap,
        "feas_primal": feas_p, "feas_dual": feas_d,
        "min_eig_X": x_min, "min_eig_S": s_min,
        "primal_flag": feas_p > 10 * feas_tol,
        "dual_flag": feas_d > 10 * feas_tol,
        "gap_flag": gap > 10 * gap_tol,
        "psd_flag": x_min < -10 * feas_tol or s_min < -10 * feas_tol,
    }
    report["all_clear"] = not (report["primal_flag"] or report["dual_flag"]
                               or report["gap_flag"] or report["psd_flag"])
    return report


def write_sdpa(problem: SdpProblem, path: str) -> None:
    """Dump the problem in a sparse SDPA-like text format for cross-checks.

    Line format (1-based indices, upper triangle only):
        m            number of constraints
        nblocks      number of blocks
        s1 s2 ...    block sizes
        b1 b2 ...    right-hand sides
        k blk i j v  one entry per line; k = 0 is the objective, k >= 1 the
                     k-th constraint matrix.
    """
    lines = [str(problem.n_constraints), str(len(problem.blocks)),
             " ".join(str(n) for n in problem.blocks),
             " ".join(repr(float(v)) for v in problem.b)]

    def emit(k, blk, mat):
        n = mat.shape[0]
        for i in range(n):
            for j in range(i, n):
                if mat[i, j] != 0.0:
                    lines.append(f"{k} {blk + 1} {i + 1} {j + 1} {float(mat[i, j])!r}")

    for blk, c in enumerate(problem.C):
        emit(0, blk, np.asarray(c))
    for k in range(problem.n_constraints):
        for blk in range(len(problem.blocks)):
            emit(k + 1, blk, problem.A[blk][k])
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
