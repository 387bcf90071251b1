"""Closed-form trajectories of the deformed oscillator and their ODE oracle.

The equation of motion (per unit mass, with k_eff = k_g/m)

    x'' + kappa*x*x'**2/(1 - kappa*x**2) + alpha**2*x/(1 - kappa*x**2)
        - k_eff*(1 - kappa*x**2)/x**3 = 0

admits three closed-form families on the positive half-line:

* trigonometric, x = sqrt((w^2 A^4 - k_eff) sin^2(w t + phi) + k_eff)/(w A),
  periodic for every admissible energy when kappa >= 0 and for energies
  below E_b = m*alpha^2/(2|kappa|) when kappa < 0;
* hyperbolic (kappa < 0, energies above E_b),
  x = sqrt((W^2 A^4 + k_eff) sinh^2(W t + phi) + k_eff)/(W A);
* an algebraic border trajectory x = sqrt(a*t^2 + B*t + c) exactly at E_b.

The square roots fix the positive branch; x < 0 is the mirror system.
``integrate_el`` integrates the equation of motion directly with an
embedded Runge-Kutta 5(4) pair and is the independent check on every
closed form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .model import DOMAIN_MARGIN, DomainError, SystemParams

__all__ = [
    "AdmissibilityError",
    "MeasurementError",
    "Family",
    "MotionKind",
    "TrajectoryCoeffs",
    "MotionClass",
    "Trajectory",
    "solve_trig",
    "solve_hyperbolic",
    "solve_border",
    "classify",
    "integrate_el",
    "measure_period",
    "energy_of",
    "bound_energy",
    "potential_floor",
]

_IDENTITY_RTOL = 1e-12


class AdmissibilityError(ValueError):
    """Requested parameters admit no solution of the given family."""


class MeasurementError(ValueError):
    """A sampled trajectory does not support the requested measurement."""


class Family(enum.Enum):
    TRIG = "trig"
    HYPERBOLIC = "hyperbolic"
    BORDER = "border"


class MotionKind(enum.Enum):
    PERIODIC_POSITIVE_KAPPA = "periodic_positive_kappa"
    PERIODIC_NEGATIVE_KAPPA = "periodic_negative_kappa"
    UNBOUNDED = "unbounded"
    BORDER = "border"


@dataclass(frozen=True)
class MotionClass:
    kind: MotionKind
    energy: float
    e_bound: float | None = None


def energy_of(x, v, p: SystemParams):
    """Conserved energy m*(v^2 + alpha^2 x^2)/(2(1-kappa x^2)) + k_g/(2 x^2)."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    one_m = 1.0 - p.kappa * x * x
    e = 0.5 * p.mass * (v * v + p.alpha**2 * x * x) / one_m
    if p.k_g != 0.0:
        e = e + 0.5 * p.k_g / (x * x)
    if e.ndim == 0:
        return float(e)
    return e


def bound_energy(p: SystemParams) -> float:
    """Threshold m*alpha^2/(2|kappa|) separating bounded and unbounded motion (kappa < 0)."""
    if p.kappa >= 0:
        raise AdmissibilityError("bounded/unbounded threshold exists only for kappa < 0")
    return p.mass * p.alpha**2 / (2.0 * abs(p.kappa))


def potential_floor(p: SystemParams) -> float:
    """Infimum of the potential on x > 0.

    With k = k_g/m the stationary value is m*(alpha*sqrt(k) + kappa*k/2);
    for kappa < 0 it exists only while alpha^2 > k*kappa^2, otherwise the
    potential decreases monotonically to the threshold energy, which is
    then the (unattained) infimum.
    """
    k = p.k_eff
    if k == 0.0:
        return 0.0
    if p.kappa < 0 and p.alpha**2 <= k * p.kappa**2:
        return bound_energy(p)
    return p.mass * (p.alpha * math.sqrt(k) + 0.5 * p.kappa * k)


@dataclass(frozen=True)
class TrajectoryCoeffs:
    """One closed-form trajectory with its validity data.

    ``omega`` is the trigonometric frequency w or the hyperbolic rate W;
    the border family stores the quadratic coefficients instead.  ``energy``
    is the conserved physical energy.
    """

    family: Family
    params: SystemParams
    amplitude: float
    phase: float
    omega: float
    energy: float
    border_b: float = math.nan
    border_a_coef: float = math.nan
    border_c_coef: float = math.nan

    # -- evaluation ----------------------------------------------------

    def _core(self, t):
        """Radicand y(t) and its first two time derivatives."""
        t = np.asarray(t, dtype=float)
        k = self.params.k_eff
        if self.family is Family.TRIG:
            w, a = self.omega, self.amplitude
            pref = w * w * a**4 - k
            th = w * t + self.phase
            s = np.sin(th)
            y = pref * s * s + k
            yd = pref * w * np.sin(2.0 * th)
            ydd = 2.0 * pref * w * w * np.cos(2.0 * th)
        elif self.family is Family.HYPERBOLIC:
            w, a = self.omega, self.amplitude
            pref = w * w * a**4 + k
            th = w * t + self.phase
            s = np.sinh(th)
            y = pref * s * s + k
            yd = pref * w * np.sinh(2.0 * th)
            ydd = 2.0 * pref * w * w * np.cosh(2.0 * th)
        else:
            y = self.border_a_coef * t * t + self.border_b * t + self.border_c_coef
            yd = 2.0 * self.border_a_coef * t + self.border_b
            ydd = 2.0 * self.border_a_coef * np.ones_like(np.asarray(t, dtype=float))
        return y, yd, ydd

    def _scale(self) -> float:
        if self.family is Family.BORDER:
            return 1.0
        return self.omega * self.amplitude

    def position(self, t):
        y, _, _ = self._core(t)
        if np.any(y <= 0.0):
            raise DomainError("radicand nonpositive at a requested time")
        x = np.sqrt(y) / self._scale()
        return float(x) if np.ndim(t) == 0 else x

    def velocity(self, t):
        y, yd, _ = self._core(t)
        if np.any(y <= 0.0):
            raise DomainError("radicand nonpositive at a requested time")
        v = yd / (2.0 * np.sqrt(y) * self._scale())
        return float(v) if np.ndim(t) == 0 else v

    def acceleration(self, t):
        y, yd, ydd = self._core(t)
        if np.any(y <= 0.0):
            raise DomainError("radicand nonpositive at a requested time")
        acc = (ydd - yd * yd / (2.0 * y)) / (2.0 * np.sqrt(y) * self._scale())
        return float(acc) if np.ndim(t) == 0 else acc

    def energy_at(self, t):
        """Conserved energy evaluated from (x, x') samples; constant up to round-off."""
        return energy_of(self.position(t), self.velocity(t), self.params)

    def turning_points(self):
        """(x_min, x_max) of the oscillation; trigonometric family only."""
        if self.family is not Family.TRIG:
            raise AdmissibilityError("turning points are defined for the periodic family")
        k = self.params.k_eff
        lo = math.sqrt(k) / (self.omega * self.amplitude)
        hi = self.amplitude
        return (min(lo, hi), max(lo, hi))

    def el_residual(self, t):
        """Equation-of-motion residual at times t (same normalization as the RHS)."""
        x = self.position(t)
        v = self.velocity(t)
        acc = self.acceleration(t)
        p = self.params
        one_m = 1.0 - p.kappa * x * x
        r = acc + p.kappa * x * v * v / one_m + p.alpha**2 * x / one_m
        if p.k_eff != 0.0:
            r = r - p.k_eff * one_m / x**3
        return r


def solve_trig(amplitude: float, phase: float, p: SystemParams) -> TrajectoryCoeffs:
    """Periodic trajectory with outer turning point tied to the amplitude A.

    w^2 = alpha^2/(1 - kappa A^2) + k_eff*kappa/A^2 and the motion runs
    between sqrt(k_eff)/(w A) and A; the conserved energy satisfies the
    identity w^2 = alpha^2 + 2*kappa*E/m.
    """
    if amplitude <= 0:
        raise AdmissibilityError("amplitude must be positive")
    a2 = amplitude * amplitude
    k = p.k_eff
    if p.kappa > 0 and p.kappa * a2 >= 1.0 - DOMAIN_MARGIN:
        raise AdmissibilityError(
            "amplitude reaches the barrier: require kappa*A^2 < 1")
    w2 = p.alpha**2 / (1.0 - p.kappa * a2) + k * p.kappa / a2
    if w2 <= 0.0:
        raise AdmissibilityError(
            "no periodic solution at this amplitude: the energy is at or above "
            "the bounded-motion threshold (omega^2 <= 0)")
    energy = 0.5 * p.mass * p.alpha**2 * a2 / (1.0 - p.kappa * a2) \
        + 0.5 * p.k_g / a2
    # Algebraic identity between frequency and energy; failure means NaNs.
    check = p.alpha**2 + 2.0 * p.kappa * energy / p.mass
    if abs(check - w2) > _IDENTITY_RTOL * max(1.0, abs(w2)):
        raise ArithmeticError("frequency-energy identity violated")
    return TrajectoryCoeffs(
        family=Family.TRIG, params=p, amplitude=amplitude, phase=phase,
        omega=math.sqrt(w2), energy=energy,
    )


def solve_hyperbolic(amplitude: float, phase: float, p: SystemParams) -> TrajectoryCoeffs:
    """Unbounded trajectory for kappa < 0 with |kappa|*A^2 > 1.

    W^2 = alpha^2/(|kappa| A^2 - 1) - k_eff*|kappa|/A^2 must be positive;
    the energy then exceeds the threshold and W^2 = 2|kappa|E/m - alpha^2.
    """
    if p.kappa >= 0:
        raise AdmissibilityError("hyperbolic solutions require kappa < 0")
    if amplitude <= 0:
        raise AdmissibilityError("amplitude must be positive")
    a2 = amplitude * amplitude
    ak = abs(p.kappa)
    if ak * a2 <= 1.0:
        raise AdmissibilityError("require |kappa|*A^2 > 1 for the hyperbolic family")
    k = p.k_eff
    w2 = p.alpha**2 / (ak * a2 - 1.0) - k * ak / a2
    if w2 <= 0.0:
        raise AdmissibilityError("hyperbolic rate is imaginary at this amplitude")
    energy = 0.5 * p.mass * p.alpha**2 * a2 / (ak * a2 - 1.0) - 0.5 * p.k_g / a2
    check = 2.0 * ak * energy / p.mass - p.alpha**2
    if abs(check - w2) > _IDENTITY_RTOL * max(1.0, abs(w2)):
        raise ArithmeticError("rate-energy identity violated")
    return TrajectoryCoeffs(
        family=Family.HYPERBOLIC, params=p, amplitude=amplitude, phase=phase,
        omega=math.sqrt(w2), energy=energy,
    )


def solve_border(border_b: float, p: SystemParams) -> TrajectoryCoeffs:
    """Algebraic trajectory x = sqrt(a*t^2 + B*t + c) at exactly the threshold energy.

    a = (k_eff*kappa^2 - alpha^2)/kappa and
    c = -(B^2 + 4*k_eff)*kappa / (4*(alpha^2 - k_eff*kappa^2)); B is free.
    Requires kappa < 0 and alpha^2 != k_eff*kappa^2.
    """
    if p.kappa >= 0:
        raise AdmissibilityError("the border trajectory requires kappa < 0")
    k = p.k_eff
    denom = p.alpha**2 - k * p.kappa**2
    if denom == 0.0:
        raise AdmissibilityError(
            "alpha^2 equals k_eff*kappa^2: the border coefficients degenerate")
    a_coef = (k * p.kappa**2 - p.alpha**2) / p.kappa
    c_coef = -(border_b**2 + 4.0 * k) * p.kappa / (4.0 * denom)
    return TrajectoryCoeffs(
        family=Family.BORDER, params=p, amplitude=0.0, phase=0.0, omega=0.0,
        energy=bound_energy(p),
        border_b=border_b, border_a_coef=a_coef, border_c_coef=c_coef,
    )


def classify(energy: float, p: SystemParams, border_rtol: float = 1e-9) -> MotionClass:
    """Motion class for a given conserved energy.

    kappa >= 0 yields periodic motion for every admissible energy; for
    kappa < 0 the threshold E_b separates periodic from unbounded motion,
    with a measure-zero border assigned inside a relative tolerance.
    """
    floor = potential_floor(p)
    if energy < floor - 1e-12 * max(1.0, abs(floor)):
        raise AdmissibilityError(
            f"energy {energy:.6g} below the potential floor {floor:.6g}: no motion")
    if p.kappa >= 0:
        return MotionClass(kind=MotionKind.PERIODIC_POSITIVE_KAPPA, energy=energy)
    e_b = bound_energy(p)
    if abs(energy - e_b) <= border_rtol * max(1.0, abs(e_b)):
        kind = MotionKind.BORDER
    elif energy < e_b:
        kind = MotionKind.PERIODIC_NEGATIVE_KAPPA
    else:
        kind = MotionKind.UNBOUNDED
    return MotionClass(kind=kind, energy=energy, e_bound=e_b)


@dataclass(frozen=True)
class Trajectory:
    """Sampled (t, x, v) arrays with the conserved-energy track."""

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    energy: np.ndarray
    params: SystemParams
    terminated: str | None = None


def _rhs(p: SystemParams):
    kappa, alpha2, k = p.kappa, p.alpha**2, p.k_eff

    def rhs(t, y):
        x, v = y
        one_m = 1.0 - kappa * x * x
        acc = -(kappa * x * v * v + alpha2 * x) / one_m
        if k != 0.0:
            acc += k * one_m / (x * x * x)
        return (v, acc)

    return rhs


def integrate_el(x0: float, v0: float, t_span, p: SystemParams,
                 tol: float = 1e-9, t_eval=None) -> Trajectory:
    """Adaptive integration of the equation of motion (the oracle route).

    Uses an embedded Runge-Kutta 5(4) pair with the tolerance split 10%
    absolute / 90% relative.  Integration stops early, returning partial
    results, when the state approaches the kinetic barrier
    (1 - kappa*x^2 < 1e-10) or the inverse-square core (|x| < 1e-10).
    """
    if not (1e-12 <= tol <= 1e-4):
        raise ValueError("tol must lie in [1e-12, 1e-4]")
    if x0 == 0.0:
        raise DomainError("x0 = 0 is not an admissible initial condition")
    if p.kappa > 0 and p.kappa * x0 * x0 >= 1.0 - DOMAIN_MARGIN:
        raise DomainError("x0 at or beyond the barrier")
    t0, t1 = float(t_span[0]), float(t_span[1])
    if t_eval is None:
        t_eval = np.linspace(t0, t1, 1001)

    events = []
    labels = []
    if p.kappa > 0:
        def barrier_event(t, y, _k=p.kappa):
            return 1.0 - _k * y[0] * y[0] - 1e-10
        barrier_event.terminal = True
        events.append(barrier_event)
        labels.append("barrier")
    if p.k_g > 0:
        def core_event(t, y):
            return abs(y[0]) - 1e-10
        core_event.terminal = True
        events.append(core_event)
        labels.append("core")

    sol = solve_ivp(_rhs(p), (t0, t1), (x0, v0), method="RK45",
                    rtol=0.9 * tol, atol=0.1 * tol,
                    t_eval=np.asarray(t_eval, dtype=float),
                    events=events or None, dense_output=True)
    if not sol.success and sol.status != 1:
        raise RuntimeError(f"integration failed: {sol.message}")
    terminated = None
    if sol.status == 1:
        for lbl, hits in zip(labels, sol.t_events):
            if len(hits):
                terminated = lbl
                break
    x, v = sol.y
    return Trajectory(t=sol.t, x=x, v=v, energy=energy_of(x, v, p),
                      params=p, terminated=terminated)


def measure_period(traj: Trajectory) -> float:
    """Oscillation period from successive position maxima.

    Each maximum is refined by a parabola through the three neighbouring
    samples.  For motion confined to one side of the core (min x > 0) the
    bounce repeats twice per cycle of the underlying angular variable, so
    the returned period is twice the maxima spacing; 2*pi/T then matches
    the trigonometric frequency of the closed form.
    """
    t, x = traj.t, traj.x
    if traj.terminated is not None:
        raise MeasurementError(f"trajectory terminated early ({traj.terminated})")
    peaks = []
    if len(x) >= 3 and x[0] >= x[1]:
        a, b, _ = np.polyfit(t[:3], x[:3], 2)
        if a < 0 and abs(-b / (2 * a) - t[0]) <= (t[1] - t[0]):
            peaks.append(-b / (2.0 * a))
    for i in range(1, len(x) - 1):
        if x[i] >= x[i - 1] and x[i] > x[i + 1]:
            a, b, c = np.polyfit(t[i - 1:i + 2], x[i - 1:i + 2], 2)
            if a < 0:
                peaks.append(-b / (2.0 * a))
    if len(x) >= 3 and x[-1] >= x[-2]:
        a, b, _ = np.polyfit(t[-3:], x[-3:], 2)
        if a < 0 and abs(-b / (2 * a) - t[-1]) <= (t[-1] - t[-2]):
            peaks.append(-b / (2.0 * a))
    if len(peaks) < 3:
        raise MeasurementError(
            "need at least three maxima (two full oscillations) to measure a period")
    spacings = np.diff(peaks)
    mean = float(np.mean(spacings))
    if np.std(spacings) > 1e-3 * mean:
        raise MeasurementError("maxima are not equally spaced; trajectory not periodic")
    if np.min(x) > 0.0:
        return 2.0 * mean
    return mean
