import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from kappa_isotonic.classical import (AdmissibilityError,
                                      MeasurementError, MotionKind,
                                      bound_energy, classify, energy_of,
                                      integrate_el, measure_period,
                                      potential_floor, solve_border,
                                      solve_hyperbolic, solve_trig)
from kappa_isotonic.model import DomainError, SystemParams


class TestSolveTrig:
    def test_undeformed_bare_oscillator(self):
        traj = solve_trig(1.0, 0.5, SystemParams())
        assert traj.omega == pytest.approx(1.0, rel=1e-15)
        ts = np.linspace(0, 10, 50)
        np.testing.assert_allclose(traj.position(ts),
                                   np.abs(np.sin(ts + 0.5)), rtol=1e-12)

    def test_undeformed_with_core(self):
        traj = solve_trig(2.0, 0.0, SystemParams(k_g=1.0))
        assert traj.omega == pytest.approx(1.0, rel=1e-15)
        assert traj.turning_points() == pytest.approx((0.5, 2.0), rel=1e-15)
        assert traj.energy == pytest.approx(2.0 + 1.0 / 8.0, rel=1e-15)

    def test_deformed_frequency_and_constraint(self):
        p = SystemParams(kappa=0.1, k_g=1.0)
        traj = solve_trig(2.0, 0.0, p)
        w2_expected = 1.0 / 0.6 + 0.1 / 4.0
        assert traj.omega**2 == pytest.approx(w2_expected, rel=1e-14)
        # quadratic admissibility constraint has a vanishing residual
        w2, a2 = traj.omega**2, 4.0
        resid = p.kappa * w2 * a2**2 + (1.0 - w2 - p.k_g * p.kappa**2) * a2 \
            + p.k_g * p.kappa
        assert abs(resid) <= 1e-12 * max(1.0, abs(w2 * a2**2))

    def test_frequency_energy_identity(self):
        for kappa in (-0.4, -0.1, 0.0, 0.2, 0.8):
            p = SystemParams(kappa=kappa, k_g=0.5)
            amp = 0.9 if kappa > 0 else 1.7
            traj = solve_trig(amp, 0.0, p)
            assert traj.omega**2 == pytest.approx(
                p.alpha**2 + 2.0 * kappa * traj.energy, rel=1e-12)

    def test_rejects_barrier_amplitude(self):
        with pytest.raises(AdmissibilityError):
            solve_trig(2.0, 0.0, SystemParams(kappa=0.5))

    def test_rejects_overenergetic_negative_kappa(self):
        # omega^2 <= 0 means the energy is at or above the threshold
        with pytest.raises(AdmissibilityError):
            solve_trig(2.0, 0.0, SystemParams(kappa=-1.0, k_g=1.0))

    def test_small_core_degenerates_to_bare_solution(self):
        kappa, amp = 0.2, 1.8
        p = SystemParams(kappa=kappa, k_g=1e-8)
        traj = solve_trig(amp, 0.0, p)
        w_bare = math.sqrt(1.0 / (1.0 - kappa * amp**2))
        assert traj.omega == pytest.approx(w_bare, rel=1e-6)
        assert p.alpha**2 == pytest.approx((1 - kappa * amp**2) * traj.omega**2,
                                           rel=1e-6)
        ts = np.linspace(0.1, math.pi / traj.omega - 0.1, 40)
        np.testing.assert_allclose(traj.position(ts),
                                   amp * np.sin(traj.omega * ts), rtol=1e-6)

    @given(st.floats(-0.9, 0.9), st.floats(0.0, 3.0), st.floats(0.3, 2.0))
    @settings(max_examples=80, deadline=None)
    def test_equation_of_motion_residual(self, kappa, k_g, amp):
        p = SystemParams(kappa=kappa, k_g=k_g)
        try:
            traj = solve_trig(amp, 0.3, p)
        except AdmissibilityError:
            assume(False)
        ts = np.linspace(0.0, 2.5 * 2 * math.pi / traj.omega, 120)
        acc = traj.acceleration(ts)
        resid = traj.el_residual(ts)
        assert np.all(np.abs(resid) <= 1e-9 * (1.0 + np.abs(acc)))

    def test_monotone_frequency_in_kappa(self):
        amp, k_g = 1.2, 1.0
        omegas = []
        for kappa in (-0.5, -0.25, 0.0, 0.25, 0.5):
            omegas.append(solve_trig(amp, 0.0, SystemParams(kappa=kappa,
                                                            k_g=k_g)).omega)
        assert all(a < b for a, b in zip(omegas, omegas[1:]))
        assert omegas[0] < 1.0 < omegas[-1]


class TestSolveHyperbolic:
    def test_bare_growth_case(self):
        traj = solve_hyperbolic(2.0, 0.0, SystemParams(kappa=-1.0))
        assert traj.omega**2 == pytest.approx(1.0 / 3.0, rel=1e-14)
        assert traj.energy == pytest.approx(4.0 / 6.0, rel=1e-14)
        ts = np.linspace(0.3, 3.0, 30)
        np.testing.assert_allclose(traj.position(ts),
                                   2.0 * np.sinh(traj.omega * ts), rtol=1e-12)

    def test_with_core(self):
        traj = solve_hyperbolic(2.0, 0.0, SystemParams(kappa=-1.0, k_g=1.0))
        assert traj.omega**2 == pytest.approx(1.0 / 3.0 - 1.0 / 4.0, rel=1e-13)
        assert traj.omega**2 == pytest.approx(2.0 * traj.energy - 1.0, rel=1e-12)
        assert traj.energy > bound_energy(traj.params)

    def test_near_unit_amplitude_boundary(self):
        traj = solve_hyperbolic(1.01, 0.0, SystemParams(kappa=-1.0, k_g=1.0))
        assert traj.omega**2 == pytest.approx(1.0 / 0.0201 - 1.0 / 1.0201,
                                              rel=1e-12)

    def test_rejections(self):
        with pytest.raises(AdmissibilityError):
            solve_hyperbolic(2.0, 0.0, SystemParams(kappa=0.3))
        with pytest.raises(AdmissibilityError):
            solve_hyperbolic(0.9, 0.0, SystemParams(kappa=-1.0))
        with pytest.raises(AdmissibilityError):
            # rate becomes imaginary: |kappa| A^2 slightly above 1, huge core
            solve_hyperbolic(1.05, 0.0, SystemParams(kappa=-1.0, k_g=40.0))

    def test_constraint_residual(self):
        p = SystemParams(kappa=-0.3, k_g=4.0)
        traj = solve_hyperbolic(2.5, 0.0, p)
        w2, a2 = traj.omega**2, 2.5**2
        resid = p.kappa * w2 * a2**2 + (1.0 + w2 - p.k_g * p.kappa**2) * a2 \
            - p.k_g * p.kappa
        assert abs(resid) <= 1e-11 * max(1.0, abs(w2 * a2**2))


class TestSolveBorder:
    def test_degenerate_coreless_case_is_flagged(self):
        traj = solve_border(0.0, SystemParams(kappa=-1.0))
        assert traj.border_a_coef == pytest.approx(1.0)
        assert traj.border_c_coef == pytest.approx(0.0)
        # x = |t| is singular at the origin; the radicand guard fires
        with pytest.raises(DomainError):
            traj.position(0.0)
        assert traj.position(2.0) == pytest.approx(2.0, rel=1e-14)

    def test_hand_computed_coefficients(self):
        traj = solve_border(2.0, SystemParams(kappa=-1.0, k_g=1.0, alpha=2.0))
        assert traj.border_a_coef == pytest.approx(3.0, rel=1e-15)
        assert traj.border_c_coef == pytest.approx(2.0 / 3.0, rel=1e-15)

    def test_energy_is_the_threshold(self):
        p = SystemParams(kappa=-1.0, k_g=1.0, alpha=2.0)
        traj = solve_border(2.0, p)
        e_b = bound_energy(p)
        assert e_b == pytest.approx(2.0)
        ts = np.linspace(-4.0, 4.0, 100)
        np.testing.assert_allclose(traj.energy_at(ts), e_b, rtol=1e-10)

    def test_equation_of_motion_residual(self):
        traj = solve_border(2.0, SystemParams(kappa=-1.0, k_g=1.0, alpha=2.0))
        ts = np.linspace(-4.0, 4.0, 300)
        acc = traj.acceleration(ts)
        assert np.max(np.abs(traj.el_residual(ts))) <= \
            1e-9 * (1.0 + np.max(np.abs(acc)))

    def test_rejections(self):
        with pytest.raises(AdmissibilityError):
            solve_border(1.0, SystemParams(kappa=0.1, k_g=1.0))
        with pytest.raises(AdmissibilityError):
            # alpha^2 = k_eff * kappa^2 degenerates the coefficients
            solve_border(1.0, SystemParams(kappa=-1.0, k_g=1.0, alpha=1.0))


class TestClassify:
    def test_positive_kappa_always_periodic(self):
        p = SystemParams(kappa=0.3, k_g=1.0)
        for e in (1.2, 5.0, 500.0):
            assert classify(e, p).kind is MotionKind.PERIODIC_POSITIVE_KAPPA

    def test_negative_kappa_three_ways(self):
        p = SystemParams(kappa=-0.5)
        assert bound_energy(p) == pytest.approx(1.0)
        assert classify(0.9, p).kind is MotionKind.PERIODIC_NEGATIVE_KAPPA
        assert classify(1.5, p).kind is MotionKind.UNBOUNDED
        assert classify(1.0 + 1e-12, p).kind is MotionKind.BORDER
        assert classify(0.9, p).e_bound == pytest.approx(1.0)

    def test_rejects_energy_below_floor(self):
        p = SystemParams(kappa=0.2, k_g=1.0)
        floor = potential_floor(p)
        assert floor == pytest.approx(1.0 + 0.1, rel=1e-14)
        with pytest.raises(AdmissibilityError):
            classify(floor - 1e-3, p)

    def test_floor_unattained_when_potential_monotone(self):
        # alpha^2 <= k_eff*kappa^2: everything below the threshold is barred
        p = SystemParams(kappa=-1.0, k_g=4.0)
        assert potential_floor(p) == pytest.approx(bound_energy(p))
        with pytest.raises(AdmissibilityError):
            classify(0.3, p)
        assert classify(0.7, p).kind is MotionKind.UNBOUNDED


class TestIntegrateEl:
    def test_plain_harmonic_cosine(self):
        ts = np.linspace(0, 4 * math.pi, 2000)
        traj = integrate_el(1.0, 0.0, (0, 4 * math.pi), SystemParams(),
                            tol=1e-10, t_eval=ts)
        assert np.max(np.abs(traj.x - np.cos(ts))) < 1e-8

    def test_matches_trig_closed_form(self):
        p = SystemParams(k_g=1.0)
        closed = solve_trig(2.0, 0.0, p)
        t_end = 2 * 2 * math.pi
        ts = np.linspace(0, t_end, 3000)
        traj = integrate_el(closed.position(0.0), closed.velocity(0.0),
                            (0, t_end), p, tol=1e-10, t_eval=ts)
        assert np.max(np.abs(traj.x - closed.position(ts))) < 1e-6

    def test_matches_hyperbolic_closed_form(self):
        p = SystemParams(kappa=-1.0, k_g=1.0)
        closed = solve_hyperbolic(2.0, 0.0, p)
        ts = np.linspace(0, 3, 1000)
        traj = integrate_el(closed.position(0.0), closed.velocity(0.0),
                            (0, 3), p, tol=1e-10, t_eval=ts)
        rel = np.abs(traj.x - closed.position(ts)) / np.abs(closed.position(ts))
        assert np.max(rel) < 1e-6

    def test_energy_drift_within_budget(self):
        p = SystemParams(kappa=0.25, k_g=2.0)
        tol = 1e-9
        traj = integrate_el(1.5, 0.3, (0, 60), p, tol=tol)
        drift = np.max(np.abs(traj.energy - traj.energy[0]))
        assert drift <= 100 * tol * max(1.0, abs(traj.energy[0]))

    def test_tolerance_window_enforced(self):
        with pytest.raises(ValueError):
            integrate_el(1.0, 0.0, (0, 1), SystemParams(), tol=1e-3)
        with pytest.raises(ValueError):
            integrate_el(1.0, 0.0, (0, 1), SystemParams(), tol=1e-13)

    def test_rejects_origin_and_barrier_start(self):
        with pytest.raises(DomainError):
            integrate_el(0.0, 1.0, (0, 1), SystemParams(k_g=1.0))
        with pytest.raises(DomainError):
            integrate_el(2.0, 0.0, (0, 1), SystemParams(kappa=0.25))

    def test_barrier_event_reports_partial_result(self):
        # start inside the admissible sliver next to the barrier: the event
        # zone (1e-10) is wider than the admissibility margin (1e-12)
        p = SystemParams(kappa=1.0)
        x0 = math.sqrt(1.0 - 1e-11)
        traj = integrate_el(x0, 0.0, (0, 5), p, tol=1e-9)
        assert traj.terminated == "barrier"
        assert traj.t[-1] < 5.0


class TestMeasurePeriod:
    def test_harmonic_period(self):
        ts = np.linspace(0, 4 * math.pi, 3000)
        traj = integrate_el(1.0, 0.0, (0, 4 * math.pi), SystemParams(),
                            tol=1e-10, t_eval=ts)
        assert measure_period(traj) == pytest.approx(2 * math.pi, rel=1e-4)

    def test_confined_bounce_recovers_trig_frequency(self):
        p = SystemParams(kappa=0.1, k_g=1.0)
        closed = solve_trig(2.0, 0.0, p)
        t_end = 3.3 * 2 * math.pi / closed.omega
        ts = np.linspace(0, t_end, 4000)
        traj = integrate_el(closed.position(0.0), closed.velocity(0.0),
                            (0, t_end), p, tol=1e-10, t_eval=ts)
        assert 2 * math.pi / measure_period(traj) == \
            pytest.approx(closed.omega, rel=1e-4)

    def test_softened_frequency_for_negative_kappa(self):
        # energy at half the threshold: the measured frequency sits below alpha
        p = SystemParams(kappa=-0.2, k_g=1.0)
        closed = solve_trig(2.0281, 0.0, p)
        assert closed.energy < bound_energy(p)
        t_end = 3.3 * 2 * math.pi / closed.omega
        ts = np.linspace(0, t_end, 4000)
        traj = integrate_el(closed.position(0.0), closed.velocity(0.0),
                            (0, t_end), p, tol=1e-10, t_eval=ts)
        omega_meas = 2 * math.pi / measure_period(traj)
        assert omega_meas == pytest.approx(closed.omega, rel=1e-4)
        assert omega_meas < p.alpha

    def test_rejects_nonperiodic_input(self):
        p = SystemParams(kappa=-1.0, k_g=1.0)
        closed = solve_hyperbolic(2.0, 0.0, p)
        ts = np.linspace(0, 3, 500)
        traj = integrate_el(closed.position(0.0), closed.velocity(0.0),
                            (0, 3), p, tol=1e-9, t_eval=ts)
        with pytest.raises(MeasurementError):
            measure_period(traj)

    def test_rejects_insufficient_span(self):
        p = SystemParams(k_g=1.0)
        closed = solve_trig(2.0, 0.0, p)
        ts = np.linspace(0, 0.8 * math.pi, 300)  # less than one bounce
        traj = integrate_el(closed.position(0.0), closed.velocity(0.0),
                            (0, ts[-1]), p, tol=1e-9, t_eval=ts)
        with pytest.raises(MeasurementError):
            measure_period(traj)


class TestEnergyHelpers:
    def test_energy_of_matches_trajectory_energy(self):
        p = SystemParams(kappa=-0.3, k_g=2.0, mass=2.0)
        traj = solve_trig(1.4, 0.2, p)
        ts = np.linspace(0, 8, 40)
        np.testing.assert_allclose(
            energy_of(traj.position(ts), traj.velocity(ts), p),
            traj.energy, rtol=1e-10)

    def test_turning_points_from_samples(self):
        p = SystemParams(kappa=0.1, k_g=1.0)
        traj = solve_trig(2.0, 0.0, p)
        ts = np.linspace(0, 4 * math.pi / traj.omega, 20001)
        xs = traj.position(ts)
        lo, hi = traj.turning_points()
        assert np.min(xs) == pytest.approx(lo, rel=1e-6)
        assert np.max(xs) == pytest.approx(hi, rel=1e-6)
