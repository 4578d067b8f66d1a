"""Function core: adaptive fitting, calculus, quadrature, inner products."""

import numpy as np
import pytest

from opfeast import (ChebFun, DomainError, DomainMismatchError,
                     ResolutionFailureError, abs_power_weight,
                     clenshaw_curtis_rule, gauss_legendre_rule, inner_product,
                     norm, random_bandlimited)


class TestAdaptiveFit:
    def test_square_coefficients(self):
        f = ChebFun.fit(lambda x: x**2)
        assert np.allclose(f.coeffs.real, [0.5, 0.0, 0.5], atol=1e-15)
        assert f.degree == 2

    def test_basis_reproduction(self):
        t5 = ChebFun.fit(lambda x: np.cos(5 * np.arccos(np.clip(x, -1, 1))))
        expect = np.zeros(6)
        expect[5] = 1.0
        assert np.allclose(t5.coeffs.real, expect, atol=1e-14)

    def test_sin50_accuracy(self, oracles):
        """Direct-evaluation oracle at 1000 seeded random points."""
        f = ChebFun.fit(lambda x: np.sin(50 * x))
        rng = np.random.default_rng(1)
        xs = rng.uniform(-1, 1, 1000)
        assert np.abs(f(xs) - np.sin(50 * xs)).max() <= 1e-12
        assert 50 <= f.degree <= 120

    def test_round_trip_corpus(self):
        corpus = [np.exp, np.cos, lambda x: 1 / (1 + 25 * x**2),
                  lambda x: np.tanh(3 * x), lambda x: np.exp(-x**2) * np.sin(7 * x)]
        rng = np.random.default_rng(3)
        xs = rng.uniform(-1, 1, 1000)
        for fn in corpus:
            g = ChebFun.fit(fn)
            assert np.abs(g(xs) - fn(xs)).max() <= 1e-12 * max(1, g.vscale)

    def test_resolution_failure_names_cap(self):
        with pytest.raises(ResolutionFailureError) as err:
            ChebFun.fit(lambda x: np.sign(x), max_degree=256)
        assert err.value.max_degree == 256
        assert "256" in str(err.value)

    def test_nonstandard_domain(self):
        f = ChebFun.fit(lambda x: x**2, domain=(0.0, 2.0))
        assert abs(f(1.3) - 1.69) < 1e-14


class TestEvaluate:
    def test_tk_at_one(self):
        assert ChebFun([0, 0, 0, 1])(1.0) == pytest.approx(1.0)

    def test_square_at_half(self):
        assert ChebFun.fit(lambda x: x**2)(0.5) == pytest.approx(0.25, abs=1e-15)

    def test_exp_fit(self, oracles):
        g = ChebFun.fit(np.exp)
        assert abs(g(0.3) - oracles["closed_forms"]["exp_at_0p3"]) <= 1e-13

    def test_outside_domain(self):
        with pytest.raises(DomainError):
            ChebFun([1.0])(1.5)


class TestCalculus:
    def test_differentiate_t2(self):
        d = ChebFun([0, 0, 1]).differentiate()
        assert np.allclose(d.coeffs.real, [0, 4], atol=1e-15)

    def test_multiply_t1_t1(self):
        t1 = ChebFun([0, 1])
        assert np.allclose((t1 * t1).coeffs.real, [0.5, 0, 0.5], atol=1e-15)

    def test_differentiate_sin_vs_cos(self):
        s = ChebFun.fit(np.sin)
        c = ChebFun.fit(np.cos)
        xs = np.linspace(-1, 1, 400)
        assert np.abs(s.differentiate()(xs) - c(xs)).max() <= 1e-11

    def test_differentiate_vs_finite_differences(self):
        g = ChebFun.fit(lambda x: np.exp(-x) * np.sin(4 * x))
        xs = np.linspace(-0.9, 0.9, 101)
        h = 1e-5
        fd = (g(xs + h) - g(xs - h)) / (2 * h)
        assert np.abs(g.differentiate()(xs) - fd).max() <= 1e-7

    def test_domain_mismatch(self):
        with pytest.raises(DomainMismatchError):
            ChebFun([1.0]) * ChebFun([1.0], domain=(0, 2))


class TestInnerProduct:
    def test_cosh_weight_closed_form(self, oracles):
        one = ChebFun.constant(1.0)
        w = ChebFun.fit(np.cosh)
        got = inner_product(one, one, w).real
        assert got == pytest.approx(oracles["closed_forms"]["two_sinh_1"], abs=1e-13)

    def test_odd_integrand(self):
        assert abs(inner_product(ChebFun([0, 1]), ChebFun([1]))) <= 1e-15

    def test_sin_pi_normalized(self):
        s = ChebFun.fit(lambda x: np.sin(np.pi * x))
        assert inner_product(s, s).real == pytest.approx(1.0, abs=1e-13)

    def test_conjugate_linearity_first_argument(self):
        rng = np.random.default_rng(5)
        g, h, u = random_bandlimited(3, cutoff_degree=6, seed=9)
        alpha = complex(*rng.standard_normal(2))
        w = ChebFun.fit(np.cosh)
        lhs = inner_product(alpha * g + h, u, w)
        rhs = np.conj(alpha) * inner_product(g, u, w) + inner_product(h, u, w)
        assert abs(lhs - rhs) <= 1e-13

    def test_parseval_gl_vs_coefficient_integration(self):
        """Gauss-Legendre inner product against Clenshaw-Curtis coefficient
        integration of the explicit product function."""
        for seed in (0, 1):
            g, h = random_bandlimited(2, cutoff_degree=10, seed=seed)
            direct = inner_product(g, h)
            cc = (g.conj() * h).definite_integral()
            assert abs(direct - cc) <= 1e-12

    def test_split_weight_kink(self):
        one = ChebFun.constant(1.0)
        w3 = abs_power_weight(3)
        assert inner_product(one, one, w3).real == pytest.approx(0.5, abs=1e-14)


class TestNorm:
    def test_t0(self):
        assert norm(ChebFun([1.0])) == pytest.approx(np.sqrt(2), abs=1e-14)

    def test_zero(self):
        assert norm(ChebFun([0.0])) == 0.0

    def test_x(self, oracles):
        assert norm(ChebFun([0, 1])) == pytest.approx(
            oracles["closed_forms"]["sqrt_2_3"], abs=1e-14)


class TestQuadRules:
    def test_gl1(self):
        r = gauss_legendre_rule(1)
        assert np.allclose(r.nodes, [0.0]) and np.allclose(r.weights, [2.0])

    def test_gl2(self):
        r = gauss_legendre_rule(2)
        assert np.allclose(sorted(r.nodes), [-1 / np.sqrt(3), 1 / np.sqrt(3)])
        assert np.allclose(r.weights, [1.0, 1.0])

    def test_gl12_degree22(self, oracles):
        r = gauss_legendre_rule(12)
        got = float(np.sum(r.weights * r.nodes**22))
        assert got == pytest.approx(oracles["closed_forms"]["x22_integral"], abs=1e-14)

    @pytest.mark.parametrize("p", [1, 2, 5, 9, 16])
    def test_weights_sum_to_interval_length(self, p):
        assert gauss_legendre_rule(p).weights.sum() == pytest.approx(2.0, abs=1e-13)

    @pytest.mark.parametrize("p", [2, 5, 9])
    def test_gl_exactness_degree(self, p):
        """A p-point rule integrates x^(2p-1) and x^(2p-2) exactly."""
        r = gauss_legendre_rule(p)
        assert np.sum(r.weights * r.nodes ** (2 * p - 1)) == pytest.approx(0.0, abs=1e-14)
        exact = 2.0 / (2 * p - 1)
        assert np.sum(r.weights * r.nodes ** (2 * p - 2)) == pytest.approx(exact, abs=1e-14)

    def test_clenshaw_curtis(self):
        r = clenshaw_curtis_rule(10)
        assert r.weights.sum() == pytest.approx(2.0, abs=1e-14)
        assert np.sum(r.weights * r.nodes**10) == pytest.approx(2.0 / 11.0, abs=1e-13)


class TestRandomBandlimited:
    def test_deterministic(self):
        a = random_bandlimited(4, cutoff_degree=20, seed=7)
        b = random_bandlimited(4, cutoff_degree=20, seed=7)
        assert all(np.array_equal(x.coeffs, y.coeffs) for x, y in zip(a, b))

    def test_unit_norm(self):
        for f in random_bandlimited(4, cutoff_degree=20, seed=7):
            assert norm(f) == pytest.approx(1.0, abs=1e-12)

    def test_degree_bound(self, oracles):
        """Fit-and-inspect oracle: degree tracks the top Fourier frequency."""
        cap = oracles["bandlimited"]["trimmed_degree"] + 10
        for f in random_bandlimited(4, cutoff_degree=20, seed=7):
            assert f.degree <= cap

    def test_count_validated(self):
        with pytest.raises(ValueError):
            random_bandlimited(0)


class TestSerialization:
    def test_json_round_trip(self):
        f = ChebFun.fit(lambda x: np.exp(x) * np.sin(3 * x), domain=(0.0, 2.0))
        g = ChebFun.from_json(f.to_json())
        assert g.domain == f.domain
        assert np.array_equal(g.coeffs, f.coeffs)

    def test_coefficient_csv(self, tmp_path):
        f = ChebFun.fit(np.exp)
        path = tmp_path / "c.csv"
        f.dump_coefficient_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "index,abs_coeff"
        assert len(lines) == f.degree + 2
