"""Adaptive Chebyshev representation of functions on an interval.

A ChebFun stores a function on [a, b] as a finite, adaptively trimmed
Chebyshev-T coefficient sequence (first-kind basis, affinely mapped from
[a, b] to [-1, 1]).  Coefficients are complex throughout: downstream code
feeds complex shifts through every code path, so there is no real/complex
split.  Values are immutable after construction and all operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.fft import dct
from scipy.special import roots_legendre

from .errors import DomainError, DomainMismatchError, ResolutionFailureError

DEFAULT_TOL = 1e-14
MAX_FIT_DEGREE = 2**17


# ---------------------------------------------------------------------------
# transforms between values on second-kind points and T-coefficients
# ---------------------------------------------------------------------------

def chebpts(n: int, domain=(-1.0, 1.0)) -> np.ndarray:
    """n+1 Chebyshev points of the second kind, ascending, mapped to domain."""
    a, b = domain
    if n == 0:
        return np.array([0.5 * (a + b)])
    t = -np.cos(np.pi * np.arange(n + 1) / n)
    return 0.5 * (a + b) + 0.5 * (b - a) * t


def vals2coeffs(vals: np.ndarray) -> np.ndarray:
    """T-coefficients from values at ascending second-kind points."""
    vals = np.asarray(vals)
    n = vals.shape[0] - 1
    if n == 0:
        return vals.astype(complex)
    c = dct(vals, type=1, axis=0) / n
    c[0] /= 2.0
    c[-1] /= 2.0
    # ascending points absorb a parity flip relative to the classical grid
    signs = (-1.0) ** np.arange(n + 1)
    return (c.T * signs).T.astype(complex)


def coeffs2vals(coeffs: np.ndarray) -> np.ndarray:
    """Values at ascending second-kind points from T-coefficients."""
    coeffs = np.asarray(coeffs, dtype=complex)
    n = coeffs.shape[0] - 1
    if n == 0:
        return coeffs.copy()
    signs = (-1.0) ** np.arange(n + 1)
    u = (coeffs.T * signs).T.copy()
    u[0] *= 2.0
    u[-1] *= 2.0
    return dct(u, type=1, axis=0) / 2.0


def _clenshaw(t: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Clenshaw recurrence on [-1, 1]; t may be any array of points."""
    b1 = np.zeros_like(t, dtype=complex)
    b2 = np.zeros_like(t, dtype=complex)
    t2 = 2.0 * t
    for c in coeffs[:0:-1]:
        b1, b2 = t2 * b1 - b2 + c, b1
    return t * b1 - b2 + coeffs[0]


# ---------------------------------------------------------------------------
# quadrature rules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadRule:
    """Nodes and weights on the reference interval [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray
    kind: str  # "gauss-legendre" | "clenshaw-curtis"

    def mapped(self, domain):
        """Nodes/weights transplanted to an arbitrary interval."""
        a, b = domain
        mid, hw = 0.5 * (a + b), 0.5 * (b - a)
        return mid + hw * self.nodes, hw * self.weights


@lru_cache(maxsize=512)
def gauss_legendre_rule(p: int) -> QuadRule:
    """p-point Gauss-Legendre rule; exact for polynomials of degree 2p-1."""
    if p < 1:
        raise ValueError("quadrature size must be >= 1")
    nodes, weights = roots_legendre(p)
    return QuadRule(nodes, weights, "gauss-legendre")


@lru_cache(maxsize=128)
def clenshaw_curtis_rule(n: int) -> QuadRule:
    """(n+1)-point Clenshaw-Curtis rule on second-kind points; exact to degree n.

    weight_j = (M^T I)_j with M the vals->coeffs map and I_k the exact T_k
    integrals; M = A * DCT1 with DCT1 symmetric, so one more DCT suffices.
    """
    if n < 1:
        raise ValueError("rule needs at least two points")
    k = np.arange(n + 1)
    ik = np.where(k % 2 == 0, 2.0 / (1.0 - k**2 + (k == 1)), 0.0)
    ik[1] = 0.0
    u = ik / n
    u[0] /= 2.0
    u[-1] /= 2.0
    s = dct(np.concatenate([2.0 * u[:1], u[1:-1], 2.0 * u[-1:]]), type=1) / 2.0
    tau = np.full(n + 1, 2.0)
    tau[0] = tau[-1] = 1.0
    weights = tau * s
    return QuadRule(chebpts(n), weights, "clenshaw-curtis")


# ---------------------------------------------------------------------------
# ChebFun
# ---------------------------------------------------------------------------

def _trim(coeffs: np.ndarray, tol: float) -> np.ndarray:
    """Drop the trailing block below tol * max|c| (keeping at least c_0)."""
    absc = np.abs(coeffs)
    vscale = absc.max() if absc.size else 0.0
    if vscale == 0.0:
        return coeffs[:1]
    keep = np.nonzero(absc > tol * vscale)[0]
    return coeffs[: keep[-1] + 1]


class ChebFun:
    """A function on [a, b] held as a trimmed Chebyshev-T series."""

    __slots__ = ("coeffs", "domain")

    def __init__(self, coeffs, domain=(-1.0, 1.0), tol: float = DEFAULT_TOL):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        self.coeffs = _trim(c, tol)
        self.domain = (float(domain[0]), float(domain[1]))
        self.coeffs.setflags(write=False)

    # -- constructors -------------------------------------------------------

    @classmethod
    def fit(cls, f, domain=(-1.0, 1.0), tol: float = DEFAULT_TOL,
            max_degree: int = MAX_FIT_DEGREE) -> "ChebFun":
        """Adaptively sample f until the coefficient tail drops below tol.

        Resolution doubles through 2^k+1 point grids; convergence is declared
        once the last max(3, 5%) coefficients fall below tol * max|c|.
        """
        n = 16
        while n <= max_degree:
            x = chebpts(n, domain)
            vals = np.asarray(f(x), dtype=complex)
            if vals.shape != x.shape:
                vals = np.full_like(x, complex(f(x[0]))) if np.ndim(vals) == 0 else vals
            if not np.all(np.isfinite(vals)):
                raise ResolutionFailureError(
                    "function returned non-finite values during fitting", max_degree)
            c = vals2coeffs(vals)
            vscale = np.abs(c).max()
            tail = max(3, int(np.ceil(0.05 * (n + 1))))
            if vscale == 0.0 or np.all(np.abs(c[-tail:]) <= tol * vscale):
                return cls(c, domain, tol=tol)
            n *= 2
        raise ResolutionFailureError("adaptive fit did not converge", max_degree)

    @classmethod
    def from_values(cls, vals, domain=(-1.0, 1.0), tol: float = DEFAULT_TOL):
        return cls(vals2coeffs(np.asarray(vals, dtype=complex)), domain, tol=tol)

    @classmethod
    def constant(cls, value, domain=(-1.0, 1.0)):
        return cls([value], domain)

    @classmethod
    def identity(cls, domain=(-1.0, 1.0)):
        a, b = domain
        return cls([0.5 * (a + b), 0.5 * (b - a)], domain)

    # -- basic queries -------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def vscale(self) -> float:
        return float(np.abs(self.coeffs).max())

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= tol))

    def isreal(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs.imag) <= tol * max(1.0, self.vscale)))

    def _map_to_unit(self, x):
        a, b = self.domain
        return (2.0 * np.asarray(x, dtype=float) - (a + b)) / (b - a)

    def __call__(self, x):
        """Evaluate by the Clenshaw recurrence; x must lie in the domain."""
        a, b = self.domain
        xa = np.asarray(x)
        slack = 1e-12 * max(1.0, abs(a), abs(b))
        if np.any(xa < a - slack) or np.any(xa > b + slack):
            raise DomainError(f"evaluation point outside [{a}, {b}]")
        t = np.clip(self._map_to_unit(xa), -1.0, 1.0)
        out = _clenshaw(np.atleast_1d(t), self.coeffs)
        return out[0] if np.ndim(x) == 0 else out

    # -- algebra -------------------------------------------------------------

    def _check_domain(self, other: "ChebFun"):
        if not np.allclose(self.domain, other.domain, rtol=0, atol=1e-14):
            raise DomainMismatchError(f"domains differ: {self.domain} vs {other.domain}")

    def __add__(self, other):
        if np.isscalar(other):
            c = self.coeffs.copy()
            c = np.concatenate([c[:1] + other, c[1:]])
            return ChebFun(c, self.domain, tol=0.0)
        self._check_domain(other)
        n = max(len(self.coeffs), len(other.coeffs))
        c = np.zeros(n, dtype=complex)
        c[: len(self.coeffs)] = self.coeffs
        c[: len(other.coeffs)] += other.coeffs
        return ChebFun(c, self.domain)

    __radd__ = __add__

    def __neg__(self):
        return ChebFun(-self.coeffs, self.domain, tol=0.0)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return ChebFun(self.coeffs * other, self.domain, tol=0.0)
        self._check_domain(other)
        n = self.degree + other.degree
        if n == 0:
            return ChebFun(self.coeffs * other.coeffs, self.domain)
        va = coeffs2vals(_pad(self.coeffs, n + 1))
        vb = coeffs2vals(_pad(other.coeffs, n + 1))
        return ChebFun(vals2coeffs(va * vb), self.domain)

    __rmul__ = __mul__

    def conj(self):
        return ChebFun(np.conj(self.coeffs), self.domain, tol=0.0)

    def differentiate(self) -> "ChebFun":
        """Derivative, exact up to rounding (chain rule for the affine map)."""
        a, b = self.domain
        dc = np.polynomial.chebyshev.chebder(self.coeffs) * (2.0 / (b - a))
        if dc.size == 0:
            dc = np.zeros(1, dtype=complex)
        return ChebFun(dc, self.domain, tol=0.0)

    def definite_integral(self) -> complex:
        """Integral over the domain via coefficient-space (Clenshaw-Curtis) form."""
        a, b = self.domain
        k = np.arange(len(self.coeffs))
        ik = np.where(k % 2 == 0, 2.0 / (1.0 - k**2 + (k == 1)), 0.0)
        if len(ik) > 1:
            ik[1] = 0.0
        return complex(np.dot(self.coeffs, ik) * 0.5 * (b - a))

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "domain": [self.domain[0], self.domain[1]],
            "coeffs_re": self.coeffs.real.tolist(),
            "coeffs_im": self.coeffs.imag.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ChebFun":
        c = np.asarray(obj["coeffs_re"], dtype=float) + 1j * np.asarray(obj["coeffs_im"], dtype=float)
        return cls(c, tuple(obj["domain"]), tol=0.0)

    def dump_coefficient_csv(self, path):
        """Two-column decay file (index, |c_k|) for coefficient plots."""
        with open(path, "w") as fh:
            fh.write("index,abs_coeff\n")
            for k, c in enumerate(self.coeffs):
                fh.write(f"{k},{abs(c):.17g}\n")

    def __repr__(self):
        return f"ChebFun(degree={self.degree}, domain={self.domain})"


def _pad(c: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=complex)
    out[: len(c)] = c
    return out


# ---------------------------------------------------------------------------
# weights and inner products
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitWeight:
    """A weight given piecewise on [a, s] and [s, b] (e.g. |x|^3 split at 0).

    Keeps quadrature spectrally accurate when the weight has a kink; each
    piece must be smooth on its own subinterval.
    """

    left: ChebFun
    right: ChebFun

    @property
    def split_point(self) -> float:
        return self.left.domain[1]

    @property
    def domain(self):
        return (self.left.domain[0], self.right.domain[1])

    def pieces(self):
        return (self.left, self.right)

    def to_json(self):
        return {"split": [self.left.to_json(), self.right.to_json()]}


def abs_power_weight(power: int, domain=(-1.0, 1.0)) -> SplitWeight:
    """|x|^power as a SplitWeight with the kink at 0."""
    a, b = domain
    left = ChebFun.fit(lambda x: np.abs(x) ** power, (a, 0.0))
    right = ChebFun.fit(lambda x: np.abs(x) ** power, (0.0, b))
    return SplitWeight(left, right)


def _weight_degree(weight) -> int:
    if weight is None:
        return 0
    if isinstance(weight, SplitWeight):
        return max(weight.left.degree, weight.right.degree)
    return weight.degree


def inner_product(g: ChebFun, h: ChebFun, weight=None) -> complex:
    """Weighted inner product (g, h)_w = integral of conj(g) h w.

    Conjugate-linear in the first argument.  Uses a Gauss-Legendre rule of
    p = ceil((deg g + deg h + deg w) / 2) + 2 points, exact for the
    polynomial integrand (per piece for split weights).
    """
    g._check_domain(h)
    if isinstance(weight, SplitWeight):
        total = 0.0 + 0.0j
        for piece in weight.pieces():
            p = int(np.ceil((g.degree + h.degree + piece.degree) / 2)) + 2
            x, w = gauss_legendre_rule(p).mapped(piece.domain)
            total += np.sum(w * np.conj(g(x)) * h(x) * piece(x))
        return complex(total)
    dw = _weight_degree(weight)
    p = int(np.ceil((g.degree + h.degree + dw) / 2)) + 2
    x, w = gauss_legendre_rule(p).mapped(g.domain)
    integ = np.conj(g(x)) * h(x)
    if weight is not None:
        integ = integ * weight(x)
    return complex(np.sum(w * integ))


def norm(g: ChebFun, weight=None) -> float:
    """sqrt of the self inner product; >= 0, zero only for the zero function."""
    val = inner_product(g, g, weight).real
    return float(np.sqrt(max(val, 0.0)))


def random_bandlimited(count: int, domain=(-1.0, 1.0), cutoff_degree: int = 20,
                       seed: int = 0) -> list:
    """Smooth random functions: truncated Fourier series on a 1.2x-enlarged
    interval with standard-normal coefficients, restricted to the domain and
    normalized to unit (unweighted) L2 norm.  Deterministic for a fixed seed.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    a, b = domain
    mid, hw = 0.5 * (a + b), 0.5 * (b - a)
    hw_big = 1.2 * hw
    rng = np.random.default_rng(seed)
    out = []
    ks = np.arange(cutoff_degree + 1)
    for _ in range(count):
        ck = rng.standard_normal(cutoff_degree + 1)
        sk = rng.standard_normal(cutoff_degree + 1)

        def f(x, ck=ck, sk=sk):
            arg = np.outer(x - mid, ks) * (np.pi / hw_big)
            return np.cos(arg) @ ck + np.sin(arg) @ sk

        g = ChebFun.fit(f, domain)
        out.append(g * (1.0 / norm(g)))
    return out
