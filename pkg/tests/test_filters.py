"""Rational filters: closed forms, the half-plane construction, operator application."""

import numpy as np
import pytest

from opfeast import (ChebFun, LinDiffOp, PoleProximityError, Quasimatrix,
                     apply_filter, dirichlet, disk_filter, filter_value,
                     halfplane_filter, norm)
from opfeast.problems import oscillator_eigenfunction, oscillator_eigenvalue

NEG_D2 = LinDiffOp.from_scalars([0.0, 0.0, -1.0])


class TestDiskFilter:
    def test_value_at_center(self):
        f = disk_filter(2.5 + 0.5j, 2.0, 16)
        assert abs(f.value(2.5 + 0.5j) - 1.0) <= 1e-13

    def test_closed_form_at_2r(self, oracles):
        f = disk_filter(2.5, 2.0, 16)
        expect = oracles["closed_forms"]["disk_ell16_at_2r"]
        # the value itself is ~ -1.5e-5; the summation is exact to rounding
        assert abs(f.value(2.5 + 4.0) - expect) <= 1e-15

    def test_closed_form_generic_points(self):
        c, r, ell = 1.0 + 0.3j, 1.7, 12
        f = disk_filter(c, r, ell)
        rng = np.random.default_rng(4)
        for _ in range(20):
            lam = c + (rng.uniform(0.1, 3) * np.exp(1j * rng.uniform(0, 2 * np.pi))) * r
            if abs(abs(lam - c) - r) < 0.05 * r:
                continue
            expect = 1.0 / (1.0 - ((lam - c) / r) ** ell)
            assert abs(f.value(lam) - expect) <= 1e-12 * max(1, abs(expect))

    def test_brute_force_summation(self):
        """Direct pole-sum oracle at an arbitrary point."""
        f = disk_filter(2.5, 2.0, 16)
        z0 = 1.1 + 0.7j
        brute = sum(c / (p - z0) for p, c in zip(f.poles, f.residues))
        assert abs(f.value(z0) - brute) <= 1e-15

    def test_conjugate_symmetry(self):
        f = disk_filter(1.5, 1.0, 16)
        z0 = 0.4 + 0.9j
        assert abs(f.value(np.conj(z0)) - np.conj(f.value(z0))) <= 1e-14

    def test_decay_beyond_3r(self):
        """|s| decreases monotonically along the real axis past 3 radii."""
        f = disk_filter(0.0, 1.0, 16)
        xs = np.linspace(3.0, 12.0, 25)
        mags = np.abs(f.value(xs + 0j * xs))
        assert np.all(np.diff(mags) < 0)

    def test_interior_exterior_separation(self):
        """min interior |s| at 10 sample points >= 100x max at distance 2r."""
        for ell in (8, 12, 16):
            f = disk_filter(0.5, 1.5, ell)
            rng = np.random.default_rng(7)
            inside = 0.5 + 0.8 * 1.5 * rng.uniform(-1, 1, 10)
            outside = 0.5 + 2.0 * 1.5 * np.exp(1j * rng.uniform(0, 2 * np.pi, 10))
            min_in = np.abs(f.value(inside + 0j)).min()
            max_out = np.abs(f.value(outside)).max()
            assert min_in >= 100 * max_out

    def test_increasing_ell_geometric_improvement(self):
        """Interior filter error vs the indicator decays geometrically in ell."""
        lam = 0.3 + 0.2j
        errs = []
        for ell in (8, 12, 16, 20, 24):
            f = disk_filter(0.0, 1.0, ell)
            errs.append(abs(f.value(lam) - 1.0))
        ratios = [errs[i + 1] / errs[i] for i in range(len(errs) - 1)]
        assert max(ratios) < 0.9

    def test_pole_proximity_error(self):
        f = disk_filter(0.0, 1.0, 8)
        with pytest.raises(PoleProximityError):
            f.value(complex(f.poles[0]))

    def test_validation(self):
        with pytest.raises(ValueError):
            disk_filter(0.0, 1.0, 1)
        with pytest.raises(ValueError):
            disk_filter(0.0, -1.0, 8)


class TestHalfplaneFilter:
    def test_poles_imaginary_conjugate_symmetric(self):
        f = halfplane_filter(1.0, 40)
        assert np.abs(f.poles.real).max() == 0.0
        assert f.conjugate_symmetric()

    def test_right_halfplane_value_vs_integral_oracle(self, oracles):
        """Adaptive integration of the (orientation-corrected) projector
        integrand gives 1/(lam + a) on the right half-plane."""
        f = halfplane_filter(1.0, 40)
        s1 = complex(*oracles["halfplane_filter"]["s_at_plus1"])
        assert abs(s1 - 0.5) <= 1e-12          # oracle self-check
        assert abs(f.value(1.0) - s1) <= 1e-6

    def test_left_halfplane_decay(self, oracles):
        f = halfplane_filter(1.0, 40)
        sm1 = complex(*oracles["halfplane_filter"]["s_at_minus1"])
        assert abs(sm1) <= 1e-12
        assert abs(f.value(-1.0) - sm1) <= 1e-6

    def test_validation(self):
        with pytest.raises(ValueError):
            halfplane_filter(-1.0, 40)
        with pytest.raises(ValueError):
            halfplane_filter(1.0, 2)


class TestApplyFilter:
    def test_functional_calculus_disk(self):
        """apply_filter on exact eigenfunctions equals s(lambda) times them."""
        filt = disk_filter(30.0, 40.0, 16)
        F = Quasimatrix([oscillator_eigenfunction(k) for k in range(1, 11)])
        V = apply_filter(filt, NEG_D2, F, dirichlet(2), tol=1e-13)
        for i, k in enumerate(range(1, 11)):
            s = filter_value(filt, oscillator_eigenvalue(k))
            assert norm(V[i] - s * F[i]) <= 1e-10

    def test_functional_calculus_halfplane(self):
        filt = halfplane_filter(1.0, 40)
        F = Quasimatrix([oscillator_eigenfunction(k) for k in range(1, 11)])
        V = apply_filter(filt, NEG_D2, F, dirichlet(2), tol=1e-13)
        for i, k in enumerate(range(1, 11)):
            s = filter_value(filt, oscillator_eigenvalue(k))
            assert norm(V[i] - s * F[i]) <= 1e-10

    def test_zero_input(self):
        filt = disk_filter(2.0, 1.0, 8)
        F = Quasimatrix([ChebFun.constant(0.0)])
        V = apply_filter(filt, NEG_D2, F, dirichlet(2))
        assert V[0].vscale == 0.0

    def test_doubling_ell_converges(self):
        """Output settles as the quadrature refines (convergence study).

        A mixed-mode input is needed: on an exact eigenfunction at the disk
        center the trapezoid filter is exact for every ell.
        """
        from opfeast import random_bandlimited
        F = Quasimatrix(random_bandlimited(1, cutoff_degree=6, seed=12))
        lam = oscillator_eigenvalue(1)
        vals = {}
        for ell in (8, 16, 32):
            filt = disk_filter(lam, 1.0, ell)
            vals[ell] = apply_filter(filt, NEG_D2, F, dirichlet(2), tol=1e-13)[0]
        d1 = norm(vals[16] - vals[8])
        d2 = norm(vals[32] - vals[16])
        assert d2 <= d1 and d2 <= 1e-10

    def test_conjugate_pair_reduction_matches_full(self):
        """Real-data shortcut must agree with the all-node path (complex F
        column forces the full path)."""
        filt = disk_filter(2.4, 1.0, 8)
        u = oscillator_eigenfunction(1)
        F_real = Quasimatrix([u])
        F_cplx = Quasimatrix([u * (1.0 + 0.0j) + 1e-30j * u])
        a = apply_filter(filt, NEG_D2, F_real, dirichlet(2), tol=1e-13)[0]
        b = apply_filter(filt, NEG_D2, F_cplx, dirichlet(2), tol=1e-13)[0]
        assert norm(a - b) <= 1e-12 * max(1.0, norm(a))

    def test_grid_values_shape(self):
        filt = halfplane_filter(1.0, 20)
        re, im, mag = filt.grid_values(-5, 5, -5, 5, n_re=11, n_im=7)
        assert mag.shape == (7, 11)
        assert np.all(np.isfinite(mag))


class TestFilterInvariants:
    def test_repeated_poles_rejected(self):
        from opfeast import RationalFilter
        with pytest.raises(ValueError):
            RationalFilter(np.array([1j, 1j]), np.array([1.0, 1.0]), "disk")

    def test_disk_poles_on_circle(self):
        f = disk_filter(2.0 + 1.0j, 3.0, 12)
        assert np.abs(np.abs(f.poles - (2.0 + 1.0j)) - 3.0).max() <= 1e-13
