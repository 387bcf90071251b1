"""Closed-form bound states: energies, wave functions, and normalization.

In dimensionless variables (rho = mu*x, energies in units hbar*alpha) the
bound-state energies are

    eps_n = (m + 1/2 + g) + (kappa'/2) * (m + g)^2,   m = 2n + 1,

valid for every n when kappa' >= 0 and only for n below the
normalizability bound N = (1 - (g+1)|kappa'|) / (2|kappa'|) when
kappa' < 0.  Wave functions factor as

    psi_n(rho) = N_n * rho^(g+1) * (1 - kappa'*rho^2)^(1/(2 kappa'))
                 * P_n(kappa'*rho^2),

where P_n is a terminating hypergeometric polynomial; the kappa' = 0 case
is a dedicated code path with the Gaussian factor exp(-rho^2/2) and the
confluent (Laguerre-type) polynomial, because the generic formulas carry
1/kappa' divergences that make them numerically unusable near zero.

Normalization constants have no closed form here and are computed by
weighted quadrature against the measure d rho / sqrt(1 - kappa'*rho^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import hypergeo, slsolver
from .model import (DOMAIN_MARGIN, DomainError, SystemParams,
                    nondimensionalize)

__all__ = [
    "NormalizabilityViolation",
    "DegenerateLevelError",
    "ComplexRootError",
    "HypergeoParams",
    "BoundState",
    "SpectrumSummary",
    "normalizability_bound",
    "count_bound_states",
    "energy_level",
    "energy_gap",
    "hypergeo_params",
    "quantization_root",
    "companion_b",
    "level_polynomial",
    "radial_series",
    "level_tail_converges",
    "bound_state",
    "wavefunction",
    "normalize",
    "overlap",
    "spectrum_summary",
]


class NormalizabilityViolation(ValueError):
    """Level index at or beyond the finite-spectrum bound for kappa' < 0."""


class DegenerateLevelError(ValueError):
    """Candidate beyond the bound whose series collapses onto a lower level.

    For kappa' < 0 the level energies are symmetric about the
    normalizability bound; when the companion parameter lands on a
    nonpositive integer the series truncates early and the candidate
    reproduces the mirror level instead of a new state.
    """


class ComplexRootError(ValueError):
    """The energy lies in the regime where the indicial roots are complex."""


def normalizability_bound(kappa_prime: float, g: float) -> float:
    """N = (1 - (g+1)|kappa'|) / (2|kappa'|); levels need n < N (kappa' < 0)."""
    if kappa_prime >= 0:
        raise ValueError("the spectrum is infinite for kappa' >= 0")
    ak = abs(kappa_prime)
    return (1.0 - (g + 1.0) * ak) / (2.0 * ak)


def count_bound_states(kappa_prime: float, g: float) -> int:
    """Number of normalizable levels for kappa' < 0 (strict inequality n < N)."""
    n_bound = normalizability_bound(kappa_prime, g)
    n_max = math.ceil(n_bound) - 1
    return max(0, n_max + 1)


def energy_level(n: int, kappa_prime: float, g: float, check: bool = True) -> float:
    """Dimensionless level eps_n; continuous in kappa' including zero.

    With ``check`` enabled (default), indices at or beyond the
    normalizability bound raise for kappa' < 0; ``check=False`` evaluates
    the bare formula, which the divergence-detecting quadrature then
    rejects on its own.
    """
    if n < 0 or n != int(n):
        raise ValueError("level index must be a nonnegative integer")
    if check and kappa_prime < 0 and n >= normalizability_bound(kappa_prime, g):
        raise NormalizabilityViolation(
            f"level n = {n} is not normalizable: need n < "
            f"{normalizability_bound(kappa_prime, g):.6g}")
    m = 2 * n + 1
    return (m + 0.5 + g) + 0.5 * kappa_prime * (m + g) ** 2


def energy_gap(n: int, kappa_prime: float, g: float) -> float:
    """Closed-form dimensionless gap eps_{n+1} - eps_n = 2*(1 + kappa'*(2n+2+g))."""
    return 2.0 * (1.0 + kappa_prime * (2 * n + 2 + g))


@dataclass(frozen=True)
class HypergeoParams:
    """Indicial parameters (a, b, c) of the polynomial equation at one energy.

    a and b carry the principal (nonnegative) square root of
    D = 1 - kappa' + 2*kappa'*eps with the plus and minus sign
    respectively; their sum is 1 + g + 1/kappa' independently of D.
    """

    a: float
    b: float
    c: float
    kappa_prime: float
    energy: float


def hypergeo_params(energy: float, kappa_prime: float, g: float) -> HypergeoParams:
    if kappa_prime == 0.0:
        raise ValueError("indicial parameters are defined for kappa' != 0")
    disc = 1.0 - kappa_prime + 2.0 * kappa_prime * energy
    if disc < -1e-14 * max(1.0, abs(energy)):
        raise ComplexRootError(
            f"1 - kappa' + 2*kappa'*eps = {disc:.6g} < 0: complex-root regime")
    root = math.sqrt(max(disc, 0.0))
    half = 0.5 * (1.0 + g)
    return HypergeoParams(
        a=half + 0.5 * (1.0 + root) / kappa_prime,
        b=half + 0.5 * (1.0 - root) / kappa_prime,
        c=g + 1.5,
        kappa_prime=kappa_prime,
        energy=energy,
    )


def quantization_root(hp: HypergeoParams) -> float:
    """The root that hits -n on quantized levels: the minus-sign branch.

    For kappa' > 0 this holds at every level; for kappa' < 0 it holds for
    every normalizable level (the eigensolver oracle confirms the branch).
    """
    return hp.b


def companion_b(n: int, kappa_prime: float, g: float) -> float:
    """Second parameter of the degree-n polynomial: n + 1 + g + 1/kappa'.

    This is the value forced by the sum rule a + b = 1 + g + 1/kappa' with
    the terminating root at -n; it is the one accepted by the
    hypergeometric-equation residual check.
    """
    if kappa_prime == 0.0:
        raise ValueError("companion parameter is defined for kappa' != 0")
    return n + 1.0 + g + 1.0 / kappa_prime


def level_polynomial(n: int, kappa_prime: float, g: float):
    """Hypergeometric polynomial of level n, or None on the kappa' = 0 path."""
    if kappa_prime == 0.0:
        return None
    return hypergeo.build(n, companion_b(n, kappa_prime, g), g + 1.5)


def radial_series(n: int, kappa_prime: float, g: float) -> tuple:
    """Coefficients of the polynomial factor as a series in z = rho^2.

    For kappa' != 0 these are the hypergeometric coefficients times
    kappa'^k; at kappa' = 0 the confluent (Laguerre-type) limit is built
    directly.  The two agree continuously as kappa' -> 0.
    """
    c = g + 1.5
    if kappa_prime == 0.0:
        coeffs = [1.0]
        for k in range(int(n)):
            coeffs.append(coeffs[-1] * (-n + k) / ((c + k) * (k + 1)))
        return tuple(coeffs)
    poly = level_polynomial(n, kappa_prime, g)
    return tuple(ck * kappa_prime**k for k, ck in enumerate(poly.coeffs))


@dataclass(frozen=True)
class BoundState:
    """One quantum level with its wave-function data.

    ``norm`` makes the state unit-normalized against the deformed measure;
    ``z_coeffs`` is the polynomial factor in z = (mu*x)^2.
    """

    n: int
    m_index: int
    energy_dimless: float
    energy_physical: float
    polynomial: hypergeo.HypergeoPolynomial | None
    z_coeffs: tuple
    norm: float
    kappa_prime: float
    g: float
    mu: float


def _radial_profile(state: BoundState, rho):
    """Unnormalized dimensionless profile rho^(g+1) * algebraic factor * polynomial."""
    rho = np.asarray(rho, dtype=float)
    kp = state.kappa_prime
    if kp == 0.0:
        damp = np.exp(-0.5 * rho * rho)
    else:
        with np.errstate(divide="ignore"):
            damp = np.exp(np.log1p(np.maximum(-kp * rho * rho, -1.0)) / (2.0 * kp))
    return rho ** (state.g + 1.0) * damp * hypergeo.horner(state.z_coeffs, rho * rho)


def normalize(state: BoundState, tol: float = 1e-10) -> float:
    """Constant N_n with unit norm against the physical measure.

    The quadrature inherits the divergence detection: for kappa' < 0 and a
    level beyond the bound it raises rather than returning a number.
    """
    slw = slsolver.sl_weights(state.kappa_prime, state.g)
    profile_sq = lambda rho: float(_radial_profile(state, rho)) ** 2
    integral = slsolver.quad_weighted(slw, profile_sq, weight="measure", tol=tol)
    return math.sqrt(state.mu / integral)


def bound_state(n: int, params: SystemParams, quad_tol: float = 1e-10,
                check_normalizable: bool = True) -> BoundState:
    """Construct level n for a physical parameter set, normalized by quadrature."""
    dp = nondimensionalize(params)
    eps = energy_level(n, dp.kappa_prime, dp.g, check=check_normalizable)
    if dp.kappa_prime < 0:
        b = companion_b(n, dp.kappa_prime, dp.g)
        if b <= 1e-9 and abs(b - round(b)) < 1e-9 and -round(b) < n:
            raise DegenerateLevelError(
                f"candidate level {n} truncates to degree {int(-round(b))} and "
                f"reproduces that lower level (equal energies); no new state")
    state = BoundState(
        n=int(n), m_index=2 * int(n) + 1,
        energy_dimless=eps,
        energy_physical=dp.to_physical_energy(eps),
        polynomial=level_polynomial(n, dp.kappa_prime, dp.g),
        z_coeffs=radial_series(n, dp.kappa_prime, dp.g),
        norm=1.0, kappa_prime=dp.kappa_prime, g=dp.g, mu=dp.mu,
    )
    return replace(state, norm=normalize(state, tol=quad_tol))


def wavefunction(state: BoundState, x, mu: float | None = None):
    """Wave function at physical positions x > 0.

    Positions at the inverse-square core (x = 0) or at/beyond the barrier
    (kappa' > 0) are rejected, matching the potential's domain rule.
    """
    mu = state.mu if mu is None else mu
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0.0):
        raise DomainError("wave functions are defined on x > 0")
    rho = mu * arr
    if state.kappa_prime > 0:
        if np.any(state.kappa_prime * rho * rho >= 1.0 - DOMAIN_MARGIN):
            raise DomainError("x at or beyond the barrier")
    out = state.norm * _radial_profile(state, rho)
    if np.ndim(x) == 0:
        return float(out)
    return out


def level_tail_converges(n: int, kappa_prime: float, g: float,
                         tol: float = 1e-10) -> bool:
    """Dominant-power normalizability probe for a degree-n candidate.

    Integrates the leading large-rho behaviour rho^(2(g+1)+4n) times the
    squared algebraic factor against the measure; the quadrature's own
    divergence detection decides.  This is the convergence condition that
    bounds the level count for kappa' < 0, stated independently of whether
    the candidate's series truncates early.
    """
    if kappa_prime > 0:
        return True
    slw = slsolver.sl_weights(kappa_prime, g)
    expo = 2.0 * (g + 1.0) + 4.0 * n

    def dominant(rho):
        if kappa_prime == 0.0:
            alg = math.exp(-rho * rho)
        else:
            alg = math.exp(math.log1p(-kappa_prime * rho * rho) / kappa_prime)
        return rho**expo * alg

    try:
        slsolver.quad_weighted(slw, dominant, weight="measure", tol=tol)
    except slsolver.DivergentIntegralError:
        return False
    return True


def overlap(sa: BoundState, sb: BoundState, tol: float = 1e-11) -> float:
    """Inner product of two states against the deformed measure."""
    if (sa.kappa_prime, sa.g, sa.mu) != (sb.kappa_prime, sb.g, sb.mu):
        raise ValueError("states belong to different parameter sets")
    slw = slsolver.sl_weights(sa.kappa_prime, sa.g)
    prod = lambda rho: float(_radial_profile(sa, rho)) * float(_radial_profile(sb, rho))
    integral = slsolver.quad_weighted(slw, prod, weight="measure", tol=tol)
    return sa.norm * sb.norm * integral / sa.mu


@dataclass(frozen=True)
class SpectrumSummary:
    """Level table with gap data and the finite/infinite classification.

    ``n_max`` is the largest normalizable index (None when the spectrum is
    infinite); ``e_max_point`` locates the maximum of eps as a function of
    a continuous level index, which coincides with the normalizability
    bound for kappa' < 0.
    """

    params: SystemParams
    kappa_prime: float
    g: float
    levels: tuple
    gaps: tuple
    finite: bool
    n_max: int | None
    n_bound: float | None
    e_max_point: float | None


def spectrum_summary(params: SystemParams, n_request: int,
                     quad_tol: float = 1e-10) -> SpectrumSummary:
    """Lowest levels (at most n_request) with closed-form gaps.

    For kappa' < 0 the table stops at the last normalizable level; the
    gap entries are the physical E_{n+1} - E_n.
    """
    if n_request < 1:
        raise ValueError("n_request must be at least 1")
    dp = nondimensionalize(params)
    if dp.kappa_prime < 0:
        count = count_bound_states(dp.kappa_prime, dp.g)
        finite = True
        n_bound = normalizability_bound(dp.kappa_prime, dp.g)
        n_max = count - 1 if count else None
        e_max_point = n_bound
    else:
        count = n_request
        finite = False
        n_bound = None
        n_max = None
        e_max_point = None
    n_levels = min(n_request, count)
    levels = tuple(bound_state(n, params, quad_tol=quad_tol)
                   for n in range(n_levels))
    gaps = tuple(
        dp.to_physical_energy(energy_gap(n, dp.kappa_prime, dp.g))
        for n in range(n_levels - 1)
    )
    return SpectrumSummary(
        params=params, kappa_prime=dp.kappa_prime, g=dp.g,
        levels=levels, gaps=gaps, finite=finite,
        n_max=n_max, n_bound=n_bound, e_max_point=e_max_point,
    )
