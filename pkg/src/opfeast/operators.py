"""Linear differential operators with ChebFun coefficients, plus boundary data."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chebfun import ChebFun
from .errors import DomainMismatchError


@dataclass(frozen=True)
class BoundaryCondition:
    """One endpoint functional: u^(deriv)(endpoint) = value."""

    end: str                    # "a" (left) or "b" (right)
    deriv: int = 0
    value: complex = 0.0

    def __post_init__(self):
        if self.end not in ("a", "b"):
            raise ValueError("end must be 'a' or 'b'")
        if self.deriv < 0:
            raise ValueError("derivative order must be >= 0")

    def to_json(self):
        return {"end": self.end, "deriv": self.deriv,
                "value": [self.value.real, self.value.imag]}

    @classmethod
    def from_json(cls, obj):
        v = obj.get("value", 0.0)
        if isinstance(v, (list, tuple)):
            v = complex(v[0], v[1])
        return cls(obj["end"], int(obj.get("deriv", 0)), complex(v))


def dirichlet(order: int) -> tuple:
    """u = u' = ... = u^(order/2 - 1) = 0 at both ends (the default closure)."""
    half = order // 2
    return tuple(BoundaryCondition(e, d) for d in range(half) for e in ("a", "b"))


def clamped_free(length_end: str = "b") -> tuple:
    """Beam closure: u = u' = 0 at one end, u'' = u''' = 0 at the other."""
    other = "a" if length_end == "b" else "b"
    return (BoundaryCondition(other, 0), BoundaryCondition(other, 1),
            BoundaryCondition(length_end, 2), BoundaryCondition(length_end, 3))


def pinned_ends() -> tuple:
    """u = u'' = 0 at both ends (fourth-order hinged closure)."""
    return tuple(BoundaryCondition(e, d) for d in (0, 2) for e in ("a", "b"))


class LinDiffOp:
    """Sum a_j(x) d^j/dx^j with ChebFun coefficients a_0..a_N on one interval.

    The leading coefficient must not be identically zero; order 0 operators
    (pure multiplication) are allowed and serve as the right-hand side of
    generalized pencils.
    """

    __slots__ = ("coeffs", "domain", "_key")

    def __init__(self, coeffs):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise ValueError("need at least one coefficient")
        dom = coeffs[0].domain
        for c in coeffs:
            if not np.allclose(c.domain, dom, rtol=0, atol=1e-14):
                raise DomainMismatchError("operator coefficients on mixed intervals")
        if coeffs[-1].is_zero():
            raise ValueError("leading coefficient is identically zero")
        self.coeffs = coeffs
        self.domain = dom
        self._key = (dom, tuple(c.coeffs.tobytes() for c in coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def cache_key(self):
        return self._key

    def isreal(self, tol: float = 0.0) -> bool:
        return all(c.isreal(tol) for c in self.coeffs)

    @classmethod
    def from_scalars(cls, scalars, domain=(-1.0, 1.0)):
        """Constant-coefficient operator from plain numbers a_0..a_N."""
        return cls([ChebFun.constant(s, domain) for s in scalars])

    def apply(self, g: ChebFun) -> ChebFun:
        """Apply the operator: sum a_j * g^(j), via ChebFun calculus."""
        if not np.allclose(g.domain, self.domain, rtol=0, atol=1e-14):
            raise DomainMismatchError("function and operator on different intervals")
        out = self.coeffs[0] * g
        d = g
        for a in self.coeffs[1:]:
            d = d.differentiate()
            if not a.is_zero():
                out = out + a * d
        return out

    __call__ = apply

    def to_json(self):
        return {
            "order": self.order,
            "domain": [self.domain[0], self.domain[1]],
            "coeffs": [c.to_json() for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, obj):
        return cls([ChebFun.from_json(c) for c in obj["coeffs"]])

    def __repr__(self):
        return f"LinDiffOp(order={self.order}, domain={self.domain})"


@dataclass(frozen=True)
class Pencil:
    """Generalized problem op1 u = lambda op2 u; op2 is a multiplication operator."""

    op1: LinDiffOp
    op2: LinDiffOp

    def __post_init__(self):
        if not np.allclose(self.op1.domain, self.op2.domain, rtol=0, atol=1e-14):
            raise DomainMismatchError("pencil operators on different intervals")
        if self.op2.order >= self.op1.order:
            raise ValueError("op2 must have lower order than op1")

    @property
    def domain(self):
        return self.op1.domain

    @property
    def order(self):
        return self.op1.order

    def isreal(self, tol: float = 0.0) -> bool:
        return self.op1.isreal(tol) and self.op2.isreal(tol)

