"""Rayleigh Quotient Iteration and the cantilever initial guesses."""

import numpy as np
import pytest

from opfeast import (ChebFun, LinDiffOp, beam_initial_guess, cantilever_root,
                     dirichlet, inner_product, norm, rayleigh_quotient,
                     rqi_iterate)
from opfeast.problems import (BEAM_LENGTH, beam_problem,
                              oscillator_eigenfunction, oscillator_eigenvalue)

NEG_D2 = LinDiffOp.from_scalars([0.0, 0.0, -1.0])


class TestRayleighQuotient:
    def test_exact_eigenfunction(self):
        u = oscillator_eigenfunction(1)
        got = rayleigh_quotient(NEG_D2, u)
        assert abs(got - oscillator_eigenvalue(1)) <= 1e-11

    def test_real_for_self_adjoint(self):
        f = oscillator_eigenfunction(2) + 0.3 * oscillator_eigenfunction(3)
        assert abs(rayleigh_quotient(NEG_D2, f).imag) <= 1e-12

    def test_quadratic_accuracy_sweep(self):
        """beta = lambda + O(eps^2) for self-adjoint perturbations."""
        u, v = oscillator_eigenfunction(1), oscillator_eigenfunction(2)
        lam = oscillator_eigenvalue(1)
        errs = []
        epss = [1e-2, 1e-3, 1e-4]
        for eps in epss:
            f = u + eps * v
            errs.append(abs(rayleigh_quotient(NEG_D2, f) - lam))
        # error must scale like eps^2: two decades per decade of eps
        assert errs[1] / errs[0] == pytest.approx(1e-2, rel=0.2)
        assert errs[2] / errs[1] == pytest.approx(1e-2, rel=0.2)


class TestRqiIterate:
    def test_oscillator_from_perturbed_mode(self):
        f0 = ChebFun.fit(lambda x: np.sin(np.pi * (x + 1) / 2)
                         + 0.1 * np.sin(np.pi * (x + 1)))
        tr = rqi_iterate(NEG_D2, f0, dirichlet(2), tol=1e-10)
        assert tr.converged and tr.iterations <= 4
        assert abs(tr.eigenvalue.real - oscillator_eigenvalue(1)) <= 1e-10

    def test_cubic_convergence_tail(self):
        """r_{k+1} <= C r_k^2.5 with C < 1e3 near convergence (self-adjoint)."""
        f0 = ChebFun.fit(lambda x: np.sin(np.pi * (x + 1) / 2)
                         + 0.2 * np.sin(np.pi * (x + 1))
                         + 0.1 * np.sin(3 * np.pi * (x + 1) / 2))
        tr = rqi_iterate(NEG_D2, f0, dirichlet(2), tol=1e-12)
        rs = [r for r in tr.residuals if r > 1e-14]
        assert len(rs) >= 2
        for a, b in zip(rs, rs[1:]):
            assert b <= 1e3 * a**2.5

    def test_final_pair_satisfies_bcs(self):
        f0 = ChebFun.fit(lambda x: np.sin(np.pi * (x + 1) / 2)
                         + 0.1 * np.sin(np.pi * (x + 1)))
        tr = rqi_iterate(NEG_D2, f0, dirichlet(2), tol=1e-10)
        u = tr.eigenfunction
        assert abs(u(-1.0)) <= 1e-11 and abs(u(1.0)) <= 1e-11

    def test_trace_shape(self):
        f0 = oscillator_eigenfunction(2)
        tr = rqi_iterate(NEG_D2, f0, dirichlet(2), tol=1e-10)
        assert len(tr.shifts) == tr.iterations == len(tr.residuals)
        doc = tr.to_json()
        assert doc["converged"] and len(doc["shifts"]) == tr.iterations

    def test_beam_modes_converge_fast(self, oracles):
        """Each wing mode lands on the shooting-oracle value in <= 6 solves."""
        spec = beam_problem()
        modes = oracles["beam"]["modes"]
        for n in (1, 2, 3, 4):
            tr = rqi_iterate(spec.operator, beam_initial_guess(n, BEAM_LENGTH),
                             spec.bcs, tol=1e-10)
            assert tr.converged and tr.iterations <= 6
            assert abs(tr.eigenvalue.real - modes[n - 1]) <= 1e-8 * modes[n - 1]


class TestBeamInitialGuess:
    def test_beta_roots_match_brentq_oracle(self, oracles):
        for n, expect in enumerate(oracles["beam"]["beta_times_length"], start=1):
            got = cantilever_root(n, 1.0)
            assert abs(got - expect) <= 1e-10

    def test_beta1_classic_value(self):
        assert cantilever_root(1, 1.0) == pytest.approx(1.87510406871196, abs=1e-10)

    def test_clamped_end_by_construction(self):
        for n in (1, 2, 3, 4):
            w = beam_initial_guess(n, BEAM_LENGTH)
            assert abs(w(0.0)) <= 1e-10
            assert abs(w.differentiate()(0.0)) <= 1e-10

    def test_root_contract(self):
        for n in (1, 2, 3):
            b = cantilever_root(n, BEAM_LENGTH)
            g = np.cosh(b * BEAM_LENGTH) * np.cos(b * BEAM_LENGTH) + 1.0
            assert abs(g) <= 1e-12 * np.cosh(b * BEAM_LENGTH)

    def test_mode_index_validated(self):
        with pytest.raises(ValueError):
            beam_initial_guess(0, 1.0)
