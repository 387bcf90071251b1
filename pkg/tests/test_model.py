import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kappa_isotonic.model import (DOMAIN_MARGIN, Domain, DomainError,
                                  SystemParams, half_line_domain,
                                  nondimensionalize, params_for_dimensionless,
                                  potential)


class TestSystemParams:
    def test_rejects_nonpositive_scales(self):
        for bad in (dict(mass=0.0), dict(alpha=-1.0), dict(hbar=0.0),
                    dict(k_g=-0.5)):
            with pytest.raises(ValueError):
                SystemParams(**bad)

    def test_barrier_only_for_positive_kappa(self):
        assert SystemParams(kappa=0.25).barrier == 2.0
        assert SystemParams(kappa=0.0).barrier is None
        assert SystemParams(kappa=-1.0).barrier is None


class TestNondimensionalize:
    def test_unit_parameters(self):
        dp = nondimensionalize(SystemParams(kappa=0.1, k_g=0.0))
        assert dp.mu == 1.0
        assert dp.kappa_prime == pytest.approx(0.1, rel=1e-15)
        assert dp.g == 0.0

    def test_isotonic_index_from_quadratic(self):
        # g*(g+1) = 2 has positive root 1
        dp = nondimensionalize(SystemParams(k_g=2.0))
        assert dp.g == pytest.approx(1.0, rel=1e-14)

    def test_derived_case(self):
        # independent oracle: positive root of g^2 + g - 1.5 via numpy
        p = SystemParams(mass=2.0, alpha=3.0, hbar=1.0, kappa=-0.5, k_g=0.75)
        dp = nondimensionalize(p)
        assert dp.mu**2 == pytest.approx(6.0, rel=1e-14)
        assert dp.kappa_prime == pytest.approx(-0.5 / 6.0, rel=1e-14)
        roots = np.roots([1.0, 1.0, -p.mass * p.k_g / p.hbar**2])
        g_ref = float(np.max(roots))
        assert dp.g == pytest.approx(g_ref, rel=1e-12)
        # back-substitution closes the loop
        assert dp.g * (dp.g + 1.0) == pytest.approx(1.5, rel=1e-13)

    def test_energy_maps_are_inverse(self):
        dp = nondimensionalize(SystemParams(mass=3.0, alpha=0.7, hbar=2.0))
        assert dp.to_physical_energy(dp.to_dimensionless_energy(5.3)) == \
            pytest.approx(5.3, rel=1e-15)
        assert dp.to_physical_energy(1.0) == pytest.approx(1.4, rel=1e-15)

    @given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.1, 10),
           st.floats(-2, 2), st.floats(0, 10))
    @settings(max_examples=60, deadline=None)
    def test_invariants_hold(self, mass, alpha, hbar, kappa, k_g):
        p = SystemParams(mass=mass, alpha=alpha, kappa=kappa, k_g=k_g, hbar=hbar)
        dp = nondimensionalize(p)
        assert dp.mu**2 * hbar == pytest.approx(mass * alpha, rel=1e-12)
        assert dp.kappa_prime * dp.mu**2 == pytest.approx(kappa, rel=1e-12, abs=1e-15)
        assert dp.g >= 0.0
        assert dp.g * (dp.g + 1.0) == pytest.approx(mass * k_g / hbar**2,
                                                    rel=1e-10, abs=1e-12)

    def test_round_trip_with_dimensionless_builder(self):
        pars = params_for_dimensionless(-0.3, 2.5, mass=2.0, alpha=1.5, hbar=0.5)
        dp = nondimensionalize(pars)
        assert dp.kappa_prime == pytest.approx(-0.3, rel=1e-13)
        assert dp.g == pytest.approx(2.5, rel=1e-13)


class TestPotential:
    def test_undeformed_isotonic_value(self):
        assert potential(1.0, SystemParams(k_g=1.0)) == pytest.approx(1.0)

    def test_hand_computed_negative_kappa(self):
        # 0.5*4/2 + 0.5*(1/4); the two summands evaluated separately
        p = SystemParams(kappa=-0.25, k_g=1.0)
        osc = 0.5 * 4.0 / (1.0 + 0.25 * 4.0)
        core = 0.5 * 1.0 / 4.0
        assert potential(2.0, p) == pytest.approx(osc + core, rel=1e-15)
        assert potential(2.0, p) == pytest.approx(1.125)

    def test_monotone_divergence_near_barrier(self):
        p = SystemParams(kappa=0.5, k_g=1.0)
        xs = p.barrier * (1.0 - np.logspace(-1, -9, 9))
        vals = potential(xs, p)
        assert np.all(np.diff(vals) > 0)
        assert vals[-1] > 1e7

    def test_rejects_origin_and_barrier(self):
        p = SystemParams(kappa=0.5, k_g=1.0)
        with pytest.raises(DomainError):
            potential(0.0, p)
        with pytest.raises(DomainError):
            potential(p.barrier, p)
        with pytest.raises(DomainError):
            potential(p.barrier * (1.0 + 1e-12), p)

    @given(st.floats(0.01, 5), st.floats(-0.03, 0.03), st.floats(0, 4))
    @settings(max_examples=60, deadline=None)
    def test_even_in_x(self, x, kappa, k_g):
        p = SystemParams(kappa=kappa, k_g=k_g)
        assert potential(x, p) == potential(-x, p)

    @pytest.mark.parametrize("kappa", [1e-3, -1e-3, 1e-6, -1e-6])
    def test_small_kappa_limit_is_linear(self, kappa):
        # |V_kappa - V_0| <= C*|kappa| uniformly on a compact away from 0
        p0 = SystemParams(k_g=1.0)
        pk = SystemParams(kappa=kappa, k_g=1.0)
        xs = np.linspace(0.1, 3.0, 200)
        diff = np.max(np.abs(potential(xs, pk) - potential(xs, p0)))
        # C = max of 0.5*alpha^2*x^4/(1-kappa*x^2) ~ 0.5*81/(1-9|kappa|)
        assert diff <= 0.5 * 3.0**4 / (1 - 9.0 * abs(kappa)) * abs(kappa) * 1.01

    def test_flattening_asymptote_for_negative_kappa(self):
        p = SystemParams(mass=2.0, kappa=-0.4, k_g=1.0)
        plateau = p.mass * p.alpha**2 / (2.0 * abs(p.kappa))
        assert potential(1e6, p) == pytest.approx(plateau, rel=1e-6)

    def test_array_evaluation_matches_scalars(self):
        p = SystemParams(kappa=-0.2, k_g=0.5)
        xs = np.array([0.3, 1.0, 2.5])
        np.testing.assert_allclose(potential(xs, p),
                                   [potential(float(x), p) for x in xs],
                                   rtol=1e-15)


class TestDomain:
    def test_half_line_positive_kappa(self):
        d = half_line_domain(0.25)
        assert d.upper == 2.0
        assert d.singular_point == 2.0
        assert d.contains(1.9)
        assert not d.contains(2.0)
        assert not d.contains(0.0)

    def test_half_line_nonpositive_kappa(self):
        d = half_line_domain(-1.0)
        assert math.isinf(d.upper)
        assert d.contains(1e9)

    def test_margin_excludes_near_singular(self):
        d = Domain(0.0, 2.0, singular_point=2.0)
        assert not d.contains(2.0 * (1.0 - DOMAIN_MARGIN / 10))
        assert d.contains(2.0 * (1.0 - 1e-6))
