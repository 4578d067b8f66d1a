"""Filtered subspace iteration with Rayleigh-Ritz extraction (contFEAST).

One iteration: apply the rational filter to the current quasimatrix through
shifted solves, orthonormalize the filtered columns in the problem's Hilbert
space, project the operator onto that basis, solve the small dense eigenvalue
problem, and reseed with the Ritz (or Schur) functions.  The loop stops when
the operator residual of the Ritz pairs drops below the tolerance, measured
column-wise and scaled by the spectral radius of the Ritz values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .chebfun import ChebFun, inner_product, norm, random_bandlimited
from .errors import RankCollapseError, StagnationError
from .filters import RationalFilter, apply_filter
from .operators import LinDiffOp, Pencil
from .quasimatrix import Quasimatrix, gram, householder_qr, trim_by_rank

_TINY = 1e-300


@dataclass
class FeastConfig:
    """Knobs of the contFEAST loop."""

    m: int
    filter: RationalFilter
    tol: float = 1e-10
    max_iters: int = 10
    seed: int = 0
    adapt_rank: bool = False
    rank_tol: float = 1e-13
    reseed_mode: str = "ritz"            # "ritz" | "schur"
    rand_cutoff: Optional[int] = None    # band limit of the random seed columns
    ode_tol: Optional[float] = None      # defaults to tol / 100
    max_n: int = 2**15

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("subspace dimension m must be >= 1")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        if self.reseed_mode not in ("ritz", "schur"):
            raise ValueError("reseed_mode must be 'ritz' or 'schur'")

    def effective_ode_tol(self) -> float:
        return self.ode_tol if self.ode_tol is not None else self.tol / 100.0

    def effective_cutoff(self, domain) -> int:
        if self.rand_cutoff is not None:
            return self.rand_cutoff
        hw = 0.5 * (domain[1] - domain[0])
        f = self.filter
        if f.kind == "disk":
            freq = np.sqrt(abs(f.center) + f.radius)
        else:
            freq = np.sqrt(10.0 * max(f.a, 1.0))
        return int(np.ceil(1.2 * hw * freq / np.pi)) + 10


@dataclass
class EigResult:
    """Ritz data and diagnostics of one contFEAST run."""

    ritz_values: np.ndarray
    ritz_functions: Optional[Quasimatrix]
    residual_history: list
    iterations: int
    condition_numbers: np.ndarray
    converged: bool
    in_region: np.ndarray
    boundary_flags: np.ndarray
    rank_history: list = field(default_factory=list)

    def in_region_values(self) -> np.ndarray:
        return self.ritz_values[self.in_region]

    def multiplicities(self, rel_tol: float = 1e-8):
        """Cluster repeated Ritz values within rel_tol (relative)."""
        out = []
        for lam in sorted(self.ritz_values, key=lambda z: (z.real, z.imag)):
            scale = max(abs(lam), 1.0)
            if out and abs(lam - out[-1][0]) <= rel_tol * scale:
                out[-1] = (out[-1][0], out[-1][1] + 1)
            else:
                out.append((lam, 1))
        return out

    def to_json(self) -> dict:
        return {
            "ritz_values": [[z.real, z.imag] for z in self.ritz_values],
            "residual_history": list(map(float, self.residual_history)),
            "iterations": self.iterations,
            "condition_numbers": list(map(float, self.condition_numbers)),
            "converged": bool(self.converged),
            "in_region": [bool(b) for b in self.in_region],
            "boundary_flags": [bool(b) for b in self.boundary_flags],
            "rank_history": self.rank_history,
        }


# ---------------------------------------------------------------------------
# projection, dense solve, residuals, condition numbers
# ---------------------------------------------------------------------------

def rayleigh_ritz(Q: Quasimatrix, problem):
    """Project the operator onto span(Q): L_ij = (q_i, L q_j)_H.

    Standard problems use Q's attached inner product.  Pencils return the
    pair (L, B) with L_ij = (q_i, L1 q_j) and B_ij = (q_i, L2 q_j) in the
    unweighted inner product, so that B reduces to the identity whenever L2
    is multiplication by the weight that orthonormalized Q.
    """
    if isinstance(problem, Pencil):
        Lq = Quasimatrix([problem.op1.apply(q) for q in Q.columns])
        Bq = Quasimatrix([problem.op2.apply(q) for q in Q.columns])
        Qu = Quasimatrix(Q.columns)      # unit weight
        return gram(Qu, Lq), gram(Qu, Bq)
    Lq = Quasimatrix([problem.apply(q) for q in Q.columns])
    return gram(Q, Lq), None


def dense_eig(M: np.ndarray, B: Optional[np.ndarray] = None,
              hermitian: Optional[bool] = None):
    """Eigen-decomposition of the small projected matrix plus Schur vectors.

    Values and vectors come back sorted by (real, imag); Schur vectors give a
    robust orthonormal reseeding basis for non-normal problems.
    """
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    scale = max(np.linalg.norm(M), _TINY)
    if hermitian is None:
        hermitian = np.linalg.norm(M - M.conj().T) <= 1e-10 * scale and (
            B is None or np.linalg.norm(B - B.conj().T) <= 1e-10 * np.linalg.norm(B))
    if B is None:
        if hermitian:
            vals, vecs = np.linalg.eigh(M)
            vals = vals.astype(complex)
            schur = vecs
        else:
            vals, vecs = np.linalg.eig(M)
            _, schur = sla.schur(M, output="complex")
    else:
        vals, vecs = sla.eig(M, B)
        _, schur = sla.schur(np.linalg.solve(B, M), output="complex")
    order = np.lexsort((vals.imag, vals.real))
    return vals[order], vecs[:, order], schur


def residual_norm(problem, F: Quasimatrix, lams, weight=None) -> float:
    """max_i ||L F_i - lam_i F_i||_H (pencils: ||L1 F_i - lam_i L2 F_i||_H)
    divided by the spectral radius max_i |lam_i|; 0 for the empty problem."""
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    radius = np.abs(lams).max() if len(lams) else 0.0
    worst = 0.0
    for lam, f in zip(lams, F.columns):
        if isinstance(problem, Pencil):
            r = problem.op1.apply(f) - lam * problem.op2.apply(f)
        else:
            r = problem.apply(f) - lam * f
        worst = max(worst, norm(r, weight))
    if worst == 0.0:
        return 0.0
    if radius == 0.0:
        return float("inf")
    return worst / radius


def eigenvalue_condition_number(u: ChebFun, w: ChebFun, weight=None) -> float:
    """kappa = ||u|| ||w|| / |(w, u)| for a right/left eigenfunction pair.

    Numerically orthogonal pairs (overlap below 1e-14 relative) raise: the
    condition number is infinite to working precision.
    """
    denom = abs(inner_product(w, u, weight))
    nu, nw = norm(u, weight), norm(w, weight)
    if denom <= 1e-14 * max(nu * nw, 1e-300):
        raise ZeroDivisionError("left and right eigenfunctions are orthogonal "
                                "(infinite condition number)")
    return max(1.0, nu * nw / denom)


def matrix_condition_numbers(M: np.ndarray, B: Optional[np.ndarray] = None) -> np.ndarray:
    """Eigenvalue condition numbers of the projected matrix, kappa_i =
    ||x_i|| ||y_i|| / |y_i* x_i| from matched left/right eigenvectors."""
    A = np.linalg.solve(B, M) if B is not None else np.asarray(M, dtype=complex)
    vals, vl, vr = sla.eig(A, left=True, right=True)
    order = np.lexsort((vals.imag, vals.real))
    vl, vr = vl[:, order], vr[:, order]
    out = np.empty(len(vals))
    for i in range(len(vals)):
        denom = abs(vl[:, i].conj() @ vr[:, i])
        out[i] = np.inf if denom == 0 else max(
            1.0, np.linalg.norm(vl[:, i]) * np.linalg.norm(vr[:, i]) / denom)
    return out


def adapt_rank(V: Quasimatrix, rel_tol: float = 1e-13):
    """Trim near-dependent filtered columns; returns (V_kept, report)."""
    kept_qm, kept, dropped = trim_by_rank(V, rel_tol)
    report = {"kept": kept, "dropped_indices": list(dropped)}
    return kept_qm, report


# ---------------------------------------------------------------------------
# the contFEAST loop
# ---------------------------------------------------------------------------

def contfeast(problem, bcs, config: FeastConfig, weight=None,
              initial=None, executor=None) -> EigResult:
    """Compute the eigenvalues of problem inside the filter's region.

    problem is a LinDiffOp or a Pencil; weight fixes the Hilbert-space inner
    product (None for plain L2).  All Ritz values are reported, flagged by
    region membership; boundary-grazing values are flagged, never dropped.
    """
    domain = problem.domain
    ode_tol = config.effective_ode_tol()
    if initial is not None:
        F = initial if isinstance(initial, Quasimatrix) else Quasimatrix(initial)
        F = F.with_weight(weight)
    else:
        cols = random_bandlimited(config.m, domain,
                                  config.effective_cutoff(domain), config.seed)
        F = Quasimatrix(cols, weight)

    history: list = []
    rank_history: list = []
    vals = np.zeros(0, dtype=complex)
    ritz = None
    conds = np.zeros(0)
    converged = False

    for _ in range(config.max_iters):
        V = apply_filter(config.filter, problem, F, bcs, tol=ode_tol,
                         max_n=config.max_n, executor=executor)
        if config.adapt_rank:
            V, report = adapt_rank(V, config.rank_tol)
            rank_history.append(report)
            if report["kept"] < 1:
                raise RankCollapseError("rank adaptation removed all columns")
        Q, _ = householder_qr(V)
        L, B = rayleigh_ritz(Q, problem)
        vals, vecs, schur = dense_eig(L, B)
        ritz = Q.matmul(vecs)
        ritz = _normalize_columns(ritz, weight)
        res = residual_norm(problem, ritz, vals, weight)
        history.append(res)
        conds = matrix_condition_numbers(L, B)
        if res <= config.tol:
            converged = True
            break
        if len(history) >= 4 and history[-4] < 2.0 * max(history[-1], _TINY):
            partial = _build_result(config, vals, ritz, history, conds, False,
                                    rank_history)
            raise StagnationError(
                f"residual stalled at {res:.3e} over three iterations; "
                "increase the filter degree ell or the subspace dimension m",
                result=partial)
        F = Q.matmul(schur if config.reseed_mode == "schur" else vecs)
        F = F.with_weight(weight)

    return _build_result(config, vals, ritz, history, conds, converged, rank_history)


def _build_result(config, vals, ritz, history, conds, converged, rank_history):
    in_region = np.array([config.filter.in_region(complex(z)) for z in vals], dtype=bool)
    boundary = np.array([config.filter.on_boundary(complex(z)) for z in vals], dtype=bool)
    return EigResult(
        ritz_values=vals,
        ritz_functions=ritz,
        residual_history=list(history),
        iterations=len(history),
        condition_numbers=conds,
        converged=converged,
        in_region=in_region,
        boundary_flags=boundary,
        rank_history=list(rank_history),
    )


def _normalize_columns(F: Quasimatrix, weight) -> Quasimatrix:
    cols = []
    for c in F.columns:
        n = norm(c, weight)
        cols.append(c * (1.0 / n) if n > 0 else c)
    return Quasimatrix(cols, weight)
