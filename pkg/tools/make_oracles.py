#!/usr/bin/env python3
"""Generate the frozen oracle fixtures used by the test suite.

Every derived expected value asserted by the tests is computed here by an
independent route (closed forms, oversampled quadrature, brute-force
summation, shooting on characteristic determinants, adaptive integration),
never by the code path under test, and written to tests/fixtures/oracles.json.
Rerun after editing and commit the result:

    python tools/make_oracles.py
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq
from scipy.special import roots_legendre

FIXTURE = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "oracles.json"

BEAM_LENGTH = 1.421245785196186


def closed_forms() -> dict:
    return {
        "exp_at_0p3": math.exp(0.3),
        "sqrt_2_3": math.sqrt(2.0 / 3.0),
        "two_sinh_1": 2.0 * math.sinh(1.0),
        "x22_integral": 2.0 / 23.0,
        "thin_film_delta1_at_1": math.sqrt(2.0) * math.tanh(1.0 / math.sqrt(2.0)),
        "disk_ell16_at_2r": 1.0 / (1.0 - 2.0**16),
    }


def shifted_solve_samples() -> dict:
    """(1 I - (-d2/dx2)) g = 1, Dirichlet: g = 1 - cos(x)/cos(1)."""
    xs = [-0.9, -0.4, 0.0, 0.3, 0.8]
    return {"points": xs, "values": [1.0 - math.cos(x) / math.cos(1.0) for x in xs]}


def oscillator_modes(count: int = 10) -> dict:
    return {"eigenvalues": [(k * math.pi / 2.0) ** 2 for k in range(1, count + 1)]}


def halfplane_filter_oracle(a: float = 1.0) -> dict:
    """Adaptive integration of the half-plane projector integrand.

    The boundary's vertical segment runs downward, so the correctly oriented
    limit is -(1/2 pi) * integral (i y + a)^-1 (i y - lam)^-1 dy, which equals
    1/(lam + a) on the right half-plane and 0 on the left.
    """
    def value(lam):
        f = lambda y: (-((1j * y + a) ** -1) * ((1j * y - lam) ** -1) / (2 * np.pi))
        re = quad(lambda y: f(y).real, -np.inf, np.inf, limit=600)[0]
        im = quad(lambda y: f(y).imag, -np.inf, np.inf, limit=600)[0]
        return re, im

    s1 = value(1.0)
    sm1 = value(-1.0)
    return {"a": a, "s_at_plus1": list(s1), "s_at_minus1": list(sm1)}


def gram_matrix_oracle() -> dict:
    """cosh-weighted Gram of 4 seeded band-limited functions, by direct
    oversampled Gauss-Legendre summation (no coefficient-space machinery)."""
    rng = np.random.default_rng(11)
    cutoff = 8
    hw_big = 1.2
    ks = np.arange(cutoff + 1)
    funcs = []
    for _ in range(4):
        ck = rng.standard_normal(cutoff + 1)
        sk = rng.standard_normal(cutoff + 1)
        funcs.append((ck, sk))

    def f(i, x):
        ck, sk = funcs[i]
        arg = np.outer(x, ks) * (np.pi / hw_big)
        return np.cos(arg) @ ck + np.sin(arg) @ sk

    x, w = roots_legendre(600)
    vals = np.column_stack([f(i, x) for i in range(4)])
    norms = np.sqrt((w[:, None] * vals**2).sum(axis=0))
    vals = vals / norms
    wc = w * np.cosh(x)
    G = (vals * wc[:, None]).T @ vals
    return {"seed": 11, "cutoff": cutoff, "gram": G.tolist()}


def hermitian_eig_oracle() -> dict:
    """8x8 Hermitian eigenvalues by characteristic-polynomial roots.

    Coefficients come from the Faddeev-LeVerrier trace recurrence and the
    roots from the companion matrix, independent of any Hermitian eigensolver.
    """
    rng = np.random.default_rng(42)
    A = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    A = 0.5 * (A + A.conj().T)
    n = A.shape[0]
    coeffs = [1.0 + 0.0j]
    M = np.zeros_like(A)
    for k in range(1, n + 1):
        M = A @ M + coeffs[-1] * np.eye(n)
        coeffs.append(-(A @ M).trace() / k)
    roots = np.roots(np.array(coeffs))
    roots = np.sort_complex(roots)
    return {"seed": 42,
            "matrix_re": A.real.tolist(), "matrix_im": A.imag.tolist(),
            "roots_re": roots.real.tolist(),
            "max_root_imag": float(np.abs(roots.imag).max())}


def beam_oracle() -> dict:
    """Clamped-free tapered-beam modes by shooting on the free-end determinant.

    Also records the cantilever frequency roots beta_n L via brentq (the
    library uses plain bisection, so this is an independent root-finder).
    """
    def det_free_end(lam, L):
        def rhs(x, y):
            return [y[1], y[2], y[3], (lam * y[0] - 2 * y[3]) / (1 + x)]
        cols = []
        for ic in ([0, 0, 1, 0], [0, 0, 0, 1]):
            s = solve_ivp(rhs, [0, L], ic, rtol=1e-13, atol=1e-15)
            cols.append([s.y[2, -1], s.y[3, -1]])
        M = np.array(cols).T
        return M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]

    L = BEAM_LENGTH
    guesses = [3.759, 181.1, 1496.0, 5820.0]
    modes = [brentq(lambda l: det_free_end(l, L), g * 0.9, g * 1.1,
                    xtol=1e-10 * g) for g in guesses]
    g = lambda b: math.cosh(b) * math.cos(b) + 1.0
    betas = [brentq(g, (n - 0.75) * math.pi, (n - 0.25) * math.pi, xtol=1e-14)
             for n in (1, 2, 3, 4)]
    return {"length": L, "modes": modes, "beta_times_length": betas,
            "reported_figure_labels": [3.759, 178.4, 1470.0, 5712.0]}


def slep_constants() -> dict:
    """Asymptotic denominators by oversampled quadrature (p = 400)."""
    x, w = roots_legendre(400)
    integral = float(np.sum(w * np.sqrt(np.cosh(x))))
    return {"sqrt_cosh_integral": integral, "indefinite_denominator": 0.4}


def condition_number_pair(theta: float = 0.7) -> dict:
    """u, w at angle theta in the L2 plane spanned by normalized T0, T1."""
    return {"theta": theta, "kappa": 1.0 / math.cos(theta)}


def bandlimited_degree_probe() -> dict:
    """Fit-and-inspect: Chebyshev degree needed for a cutoff-20 band-limited
    sample, measured on a plain cosine of the top frequency (20 pi / 1.2)."""
    freq = 20 * np.pi / 1.2
    n = 16
    while True:
        j = np.arange(n + 1)
        x = -np.cos(np.pi * j / n)
        v = np.cos(freq * x)
        c = np.fft.fft(np.concatenate([v[::-1], v[1:-1]])).real[: n + 1] / n
        c[0] /= 2
        c[-1] /= 2
        tail = max(3, int(np.ceil(0.05 * (n + 1))))
        if np.abs(c[-tail:]).max() <= 1e-14 * np.abs(c).max():
            break
        n *= 2
        if n > 2**14:
            break
    keep = np.nonzero(np.abs(c) > 1e-14 * np.abs(c).max())[0]
    return {"cutoff": 20, "top_frequency": freq, "trimmed_degree": int(keep[-1])}


def main():
    data = {
        "_note": "Frozen oracle values; regenerate with tools/make_oracles.py.",
        "closed_forms": closed_forms(),
        "shifted_solve_z1": shifted_solve_samples(),
        "oscillator": oscillator_modes(),
        "halfplane_filter": halfplane_filter_oracle(),
        "gram_cosh": gram_matrix_oracle(),
        "hermitian_eig": hermitian_eig_oracle(),
        "beam": beam_oracle(),
        "slep": slep_constants(),
        "condition_number": condition_number_pair(),
        "bandlimited": bandlimited_degree_probe(),
    }
    FIXTURE.parent.mkdir(parents=True, exist_ok=True)
    FIXTURE.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
    print(f"wrote {FIXTURE}")


if __name__ == "__main__":
    main()
