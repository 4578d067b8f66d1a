"""Rational spectral filters and their application through shifted solves.

A filter is the scalar rational function s(z) = sum_k c_k / (z_k - z) induced
by a quadrature rule on a contour (disk kind) or on the imaginary axis after
a tangent change of variables (halfplane kind).  Applying the filter to an
operator replaces each pole term by a shifted solve, so s(L) acts on a
quasimatrix of functions without the operator ever being discretized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chebfun import gauss_legendre_rule
from .errors import IllConditionedShiftError, PoleProximityError
from .quasimatrix import Quasimatrix
from .ultraspherical import solve_pencil_shifted

DEFAULT_DISK_ELL = 16
DEFAULT_HALFPLANE_ELL = 40


@dataclass(frozen=True)
class RationalFilter:
    """Poles z_k and residues c_k of s(z) = sum c_k / (z_k - z)."""

    poles: np.ndarray
    residues: np.ndarray
    kind: str                       # "disk" | "halfplane"
    center: complex = 0.0 + 0.0j    # disk metadata
    radius: float = 0.0
    a: float = 0.0                  # halfplane decay parameter

    def __post_init__(self):
        if len(self.poles) < 2:
            raise ValueError("a rational filter needs at least two poles")
        if len(np.unique(np.round(self.poles, 14))) != len(self.poles):
            raise ValueError("repeated filter poles")

    @property
    def ell(self) -> int:
        return len(self.poles)

    def value(self, lam) -> complex | np.ndarray:
        """Evaluate s at one point or an array; error within 1e-12 of a pole."""
        lam_arr = np.atleast_1d(np.asarray(lam, dtype=complex))
        dist = np.abs(lam_arr[:, None] - self.poles[None, :])
        scale = max(1.0, float(np.abs(self.poles).max()))
        if np.any(dist < 1e-12 * scale):
            raise PoleProximityError("filter evaluated within 1e-12 of a pole")
        out = (self.residues[None, :] / (self.poles[None, :] - lam_arr[:, None])).sum(axis=1)
        return complex(out[0]) if np.ndim(lam) == 0 else out

    def grid_values(self, re_lo, re_hi, im_lo, im_hi, n_re=80, n_im=80):
        """|s| sampled over a complex-plane window (for heatmap dumps)."""
        re = np.linspace(re_lo, re_hi, n_re)
        im = np.linspace(im_lo, im_hi, n_im)
        Z = re[None, :] + 1j * im[:, None]
        S = (self.residues[None, None, :]
             / (self.poles[None, None, :] - Z[:, :, None])).sum(axis=2)
        return re, im, np.abs(S)

    def in_region(self, lam: complex) -> bool:
        if self.kind == "disk":
            return bool(abs(lam - self.center) < self.radius * (1.0 - 1e-8))
        return bool(lam.real > 0.0)

    def on_boundary(self, lam: complex) -> bool:
        if self.kind == "disk":
            return bool(abs(abs(lam - self.center) - self.radius) <= 1e-8 * self.radius)
        return bool(abs(lam.real) <= 1e-8 * max(1.0, abs(lam.imag)))

    def conjugate_symmetric(self, tol: float = 1e-13) -> bool:
        """Pole/residue set closed under conjugation (real-operator shortcut)."""
        pr = sorted(zip(self.poles, self.residues), key=lambda t: (t[0].real, t[0].imag))
        cr = sorted(zip(np.conj(self.poles), np.conj(self.residues)),
                    key=lambda t: (t[0].real, t[0].imag))
        scale = max(1.0, float(np.abs(self.poles).max()))
        return all(abs(p1 - p2) <= tol * scale and abs(c1 - c2) <= tol * scale
                   for (p1, c1), (p2, c2) in zip(pr, cr))

    def to_json(self):
        if self.kind == "disk":
            return {"kind": "disk", "center": [self.center.real, self.center.imag],
                    "radius": self.radius, "ell": self.ell}
        return {"kind": "halfplane", "a": self.a, "ell": self.ell}


def disk_filter(center, radius: float, ell: int = DEFAULT_DISK_ELL) -> RationalFilter:
    """Trapezoid rule on the circle: s(lam) = 1 / (1 - ((lam-center)/radius)^ell).

    Equispaced nodes starting on the positive real axis of the circle; the
    closed form above is exact off the contour and drives the filter tests.
    """
    if ell < 2:
        raise ValueError("disk filter needs ell >= 2")
    if radius <= 0:
        raise ValueError("disk filter needs a positive radius")
    center = complex(center)
    theta = 2.0 * np.pi * np.arange(ell) / ell
    unit = np.exp(1j * theta)
    poles = center + radius * unit
    residues = radius * unit / ell       # trapezoid weights folded with 1/(2*pi*i)
    return RationalFilter(poles, residues, "disk", center=center, radius=float(radius))


def halfplane_filter(a: float, ell: int = DEFAULT_HALFPLANE_ELL) -> RationalFilter:
    """Right-half-plane filter: s(lam) ~ 1/(lam+a) for Re lam > 0, ~ 0 otherwise.

    Gauss-Legendre nodes x_k on [-1, 1] map to purely imaginary poles
    z_k = i tan(pi x_k / 2); residues carry the sec^2 Jacobian, the 1/(z+a)
    decay factor and the downward orientation of the boundary's vertical
    segment, i.e. c_k = -(1/4) w_k (1 - z_k^2) / (z_k + a).
    """
    if a <= 0:
        raise ValueError("halfplane filter needs a > 0")
    if ell < 4:
        raise ValueError("halfplane filter needs ell >= 4")
    rule = gauss_legendre_rule(ell)
    zk = 1j * np.tan(0.5 * np.pi * rule.nodes)
    ck = -0.25 * rule.weights * (1.0 - zk**2) / (zk + a)
    return RationalFilter(zk, ck, "halfplane", a=float(a))


def filter_value(filt: RationalFilter, lam) -> complex:
    return filt.value(lam)


def apply_filter(filt: RationalFilter, problem, F: Quasimatrix, bcs,
                 tol: float = 1e-12, max_n: int = 2**15,
                 executor=None) -> Quasimatrix:
    """V = s(problem) F = sum_k c_k G_k, each G_k one shifted solve.

    For conjugate-symmetric filters on real problems with real data, only the
    upper half of the poles is solved and the rest comes by conjugation.
    Accumulation always runs in ascending node order, so results do not
    depend on any parallel scheduling of the solves.
    """
    is_real = (problem.isreal(1e-15) and
               all(c.isreal(1e-15) for c in F.columns) and
               filt.conjugate_symmetric())

    def solve_node(k):
        try:
            return solve_pencil_shifted(problem, complex(filt.poles[k]), F, bcs,
                                        tol=tol, max_n=max_n)
        except IllConditionedShiftError as exc:
            raise IllConditionedShiftError(str(exc), exc.condition_estimate,
                                           node_index=k) from exc

    if is_real:
        solve_idx = [k for k, p in enumerate(filt.poles) if p.imag > 1e-14]
        real_idx = [k for k, p in enumerate(filt.poles) if abs(p.imag) <= 1e-14]
    else:
        solve_idx = list(range(filt.ell))
        real_idx = []

    todo = sorted(solve_idx + real_idx)
    if executor is not None:
        solved = dict(zip(todo, executor.map(solve_node, todo)))
    else:
        solved = {k: solve_node(k) for k in todo}

    m = len(F)
    width = max(g.max_degree for g in solved.values()) + 1
    acc = np.zeros((width, m), dtype=complex)
    for k in sorted(solved):
        Gc = solved[k].coeff_matrix()
        c = filt.residues[k]
        if is_real and k in solve_idx:
            acc[: Gc.shape[0]] += 2.0 * np.real(c * Gc)
        else:
            acc[: Gc.shape[0]] += c * Gc
    from .chebfun import ChebFun
    cols = [ChebFun(acc[:, j], F.domain) for j in range(m)]
    return Quasimatrix(cols, F.weight)
