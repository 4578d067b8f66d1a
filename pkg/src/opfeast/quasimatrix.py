"""Quasimatrices: ordered function columns with weighted inner-product algebra.

The linear algebra (Householder QR, SVD, Gram matrices) runs on a discrete
proxy: column values on a Clenshaw-Curtis grid sized so the quadrature is
exact for every polynomial integrand that appears, with the weight folded
into the quadrature weights.  Coefficient vectors are updated alongside the
value vectors, so results come back as exactly-trimmed ChebFuns with no
inverse transform.  Split weights (e.g. |x|^3) use one grid per smooth piece.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chebfun import (ChebFun, SplitWeight, clenshaw_curtis_rule,
                      coeffs2vals, gauss_legendre_rule)
from .errors import DomainMismatchError

RANK_TOL = 1e-13


class Quasimatrix:
    """Columns of ChebFuns on one interval, with an attached inner product.

    weight is None (unit Lebesgue weight), a ChebFun, or a SplitWeight; it
    defines the Hilbert space every factorization is orthonormal in.
    """

    __slots__ = ("columns", "domain", "weight")

    def __init__(self, columns, weight=None):
        columns = list(columns)
        if not columns:
            raise ValueError("a quasimatrix needs at least one column")
        dom = columns[0].domain
        for c in columns:
            if not np.allclose(c.domain, dom, rtol=0, atol=1e-14):
                raise DomainMismatchError("columns on mixed intervals")
        self.columns = columns
        self.domain = dom
        self.weight = weight

    @property
    def shape(self):
        return (len(self.columns),)

    def __len__(self):
        return len(self.columns)

    def __getitem__(self, j):
        return self.columns[j]

    @property
    def max_degree(self) -> int:
        return max(c.degree for c in self.columns)

    def with_weight(self, weight) -> "Quasimatrix":
        return Quasimatrix(self.columns, weight)

    def coeff_matrix(self) -> np.ndarray:
        """Zero-padded (maxdeg+1) x m coefficient array."""
        n = self.max_degree + 1
        out = np.zeros((n, len(self.columns)), dtype=complex)
        for j, c in enumerate(self.columns):
            out[: len(c.coeffs), j] = c.coeffs
        return out

    def matmul(self, X: np.ndarray) -> "Quasimatrix":
        """Right-multiply by a dense matrix: columns become combinations."""
        X = np.atleast_2d(np.asarray(X, dtype=complex))
        C = self.coeff_matrix() @ X
        cols = [ChebFun(C[:, j], self.domain) for j in range(C.shape[1])]
        return Quasimatrix(cols, self.weight)

    def __matmul__(self, X):
        return self.matmul(X)

    def to_json(self):
        w = self.weight
        if w is None:
            wj = "unit"
        elif isinstance(w, SplitWeight):
            wj = w.to_json()
        else:
            wj = w.to_json()
        return {"columns": [c.to_json() for c in self.columns], "weight": wj}


# ---------------------------------------------------------------------------
# discrete inner-product context (exact quadrature on values)
# ---------------------------------------------------------------------------

class _DiscreteIP:
    """Values of the columns on quadrature grids exact for the working degree."""

    def __init__(self, qm: Quasimatrix, extra_cols=(), degree_pad: int = 0):
        cols = list(qm.columns) + list(extra_cols)
        D = max(c.degree for c in cols) + degree_pad
        weight = qm.weight
        a, b = qm.domain
        if isinstance(weight, SplitWeight):
            xs, ws = [], []
            for piece in weight.pieces():
                ng = 2 * D + piece.degree + 4
                rule = clenshaw_curtis_rule(ng)
                x, w = rule.mapped(piece.domain)
                xs.append(x)
                ws.append(w * piece(x).real)
            self.x = np.concatenate(xs)
            self.w = np.concatenate(ws)
            self.V = np.column_stack([c(self.x) for c in cols])
        else:
            dw = 0 if weight is None else weight.degree
            ng = 2 * D + dw + 4
            rule = clenshaw_curtis_rule(ng)
            x, w = rule.mapped((a, b))
            if weight is not None:
                w = w * weight(x).real
            self.x, self.w = x, w
            pad = np.zeros((ng + 1, len(cols)), dtype=complex)
            for j, c in enumerate(cols):
                pad[: len(c.coeffs), j] = c.coeffs
            self.V = coeffs2vals(pad)

    def ip_matrix(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        if A.ndim == 1:
            A = A[:, None]
        if B.ndim == 1:
            B = B[:, None]
        return (np.conj(A) * self.w[:, None]).T @ B

    def ip(self, a: np.ndarray, b: np.ndarray) -> complex:
        return complex(np.sum(np.conj(a) * self.w * b))

    def nrm(self, a: np.ndarray) -> float:
        return float(np.sqrt(max(self.ip(a, a).real, 0.0)))


def gram(V: Quasimatrix, W: Quasimatrix | None = None) -> np.ndarray:
    """Pairwise weighted inner products (V_i, W_j); V's weight applies."""
    if W is None:
        ctx = _DiscreteIP(V)
        m = len(V)
        return ctx.ip_matrix(ctx.V[:, :m], ctx.V[:, :m])
    if not np.allclose(V.domain, W.domain, rtol=0, atol=1e-14):
        raise DomainMismatchError("quasimatrices on different intervals")
    ctx = _DiscreteIP(V, extra_cols=W.columns)
    m = len(V)
    return ctx.ip_matrix(ctx.V[:, :m], ctx.V[:, m:])


# ---------------------------------------------------------------------------
# Householder QR (Trefethen's quasimatrix triangularization, weighted)
# ---------------------------------------------------------------------------

@dataclass
class QRFactorization:
    q: Quasimatrix
    r: np.ndarray
    deficient_columns: tuple

    def __iter__(self):
        return iter((self.q, self.r))


def _orthonormal_polynomial_basis(ctx: _DiscreteIP, domain, m: int,
                                  maxlen: int) -> tuple:
    """T_0..T_{m-1} orthonormalized in the discrete weighted inner product."""
    a, b = domain
    t = np.clip((2.0 * ctx.x - (a + b)) / (b - a), -1.0, 1.0)
    Tv = np.cos(np.arange(m)[None, :] * np.arccos(t)[:, None]).astype(complex)
    G = ctx.ip_matrix(Tv, Tv)
    L = np.linalg.cholesky(G)
    Linv_h = np.linalg.inv(L).conj().T
    Ev = Tv @ Linv_h
    Ec = np.zeros((maxlen, m), dtype=complex)
    Ec[:m, :m] = np.eye(m)
    Ec = Ec @ Linv_h
    return Ev, Ec


def householder_qr(V: Quasimatrix, rank_tol: float = RANK_TOL) -> QRFactorization:
    """V = Q R with H-orthonormal Q and real nonnegative diag(R).

    Rank deficiency (R_jj <= rank_tol * R_00) is reported through
    deficient_columns rather than raised.
    """
    m = len(V)
    ctx = _DiscreteIP(V, degree_pad=max(0, m - 1 - V.max_degree))
    maxlen = max(V.max_degree + 1, m)
    A = np.zeros((ctx.V.shape[0], m), dtype=complex)
    A[:] = ctx.V[:, :m]
    Ac = np.zeros((maxlen, m), dtype=complex)
    Ac[: V.max_degree + 1] = V.coeff_matrix()

    Ev, Ec = _orthonormal_polynomial_basis(ctx, V.domain, m, maxlen)
    R = np.zeros((m, m), dtype=complex)
    Hv = np.zeros_like(A)
    Hc = np.zeros_like(Ac)
    tiny = 1e-15

    for k in range(m):
        scl = max(ctx.nrm(Ev[:, k]), ctx.nrm(A[:, k]), tiny)
        ex = ctx.ip(Ev[:, k], A[:, k])
        s = 1.0 if abs(ex) < tiny * scl else -ex / abs(ex)
        Ev[:, k] *= s
        Ec[:, k] *= s

        r = ctx.nrm(A[:, k])
        R[k, k] = r
        vv = r * Ev[:, k] - A[:, k]
        vc = r * Ec[:, k] - Ac[:, k]
        if k:
            proj = ctx.ip_matrix(Ev[:, :k], vv)[:, 0]
            vv -= Ev[:, :k] @ proj
            vc -= Ec[:, :k] @ proj
        nv = ctx.nrm(vv)
        if nv < tiny * scl:
            vv, vc = Ev[:, k].copy(), Ec[:, k].copy()
        else:
            vv, vc = vv / nv, vc / nv
        Hv[:, k], Hc[:, k] = vv, vc

        if k + 1 < m:
            av = ctx.ip_matrix(vv, A[:, k + 1:])[0]
            A[:, k + 1:] -= 2.0 * np.outer(vv, av)
            Ac[:, k + 1:] -= 2.0 * np.outer(vc, av)
            rr = ctx.ip_matrix(Ev[:, k], A[:, k + 1:])[0]
            R[k, k + 1:] = rr
            A[:, k + 1:] -= np.outer(Ev[:, k], rr)
            Ac[:, k + 1:] -= np.outer(Ec[:, k], rr)

    Qv, Qc = Ev, Ec
    for k in range(m - 1, -1, -1):
        vq = ctx.ip_matrix(Hv[:, k], Qv[:, k:])[0]
        Qv[:, k:] -= 2.0 * np.outer(Hv[:, k], vq)
        Qc[:, k:] -= 2.0 * np.outer(Hc[:, k], vq)

    cols = [ChebFun(Qc[:, j], V.domain) for j in range(m)]
    Q = Quasimatrix(cols, V.weight)
    diag = np.abs(np.diag(R))
    deficient = tuple(int(j) for j in np.nonzero(diag <= rank_tol * max(diag[0], tiny))[0])
    return QRFactorization(Q, R, deficient)


# ---------------------------------------------------------------------------
# SVD and rank trimming
# ---------------------------------------------------------------------------

def svd(V: Quasimatrix):
    """V = U diag(sigma) W*: QR of V, then a dense SVD of R."""
    Q, R = householder_qr(V)
    Ur, s, Wh = np.linalg.svd(R)
    U = Q.matmul(Ur)
    return U, s, Wh.conj().T


def trim_by_rank(V: Quasimatrix, rel_tol: float = RANK_TOL):
    """Drop right-singular directions with sigma_i <= rel_tol * sigma_1.

    Returns (U Sigma restricted to kept directions, kept count, dropped indices).
    """
    U, s, W = svd(V)
    if s[0] == 0.0:
        return V, len(V), tuple()
    keep = np.nonzero(s > rel_tol * s[0])[0]
    if len(keep) == len(s):
        return V, len(s), tuple()
    kept = U.matmul(np.diag(s)[:, keep])
    dropped = tuple(int(j) for j in np.nonzero(s <= rel_tol * s[0])[0])
    return kept, len(keep), dropped


def oversampled_gram(V: Quasimatrix, W: Quasimatrix | None = None,
                     oversample: int = 2) -> np.ndarray:
    """Independent Gram oracle: direct Gauss-Legendre summation, oversampled.

    Deliberately avoids the Clenshaw-Curtis machinery used by gram() so the
    two paths can cross-check each other.
    """
    W = V if W is None else W
    weight = V.weight
    D = max(V.max_degree, W.max_degree)
    out = np.zeros((len(V), len(W)), dtype=complex)
    pieces = (weight.pieces() if isinstance(weight, SplitWeight)
              else [weight if weight is not None else None])
    for piece in pieces:
        dom = piece.domain if piece is not None else V.domain
        dw = piece.degree if piece is not None else 0
        p = oversample * (D + dw // 2 + 8)
        x, w = gauss_legendre_rule(p).mapped(dom)
        if piece is not None:
            w = w * piece(x).real
        Va = np.column_stack([c(x) for c in V.columns])
        Wa = np.column_stack([c(x) for c in W.columns])
        out += (np.conj(Va) * w[:, None]).T @ Wa
    return out
