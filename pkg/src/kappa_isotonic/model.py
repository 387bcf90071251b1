"""Parameters, dimensionless reduction, and the deformed oscillator potential.

A deformation parameter ``kappa`` enters both the kinetic factor
``1/(1 - kappa*x**2)`` and the potential, while ``k_g >= 0`` adds an
inverse-square core that keeps trajectories on a half-line.  Everything
here is immutable and side-effect free; all other modules build on these
types.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DOMAIN_MARGIN",
    "DomainError",
    "SystemParams",
    "DimensionlessParams",
    "Domain",
    "nondimensionalize",
    "params_for_dimensionless",
    "potential",
    "half_line_domain",
]

# Relative exclusion margin around the singular points (x = 0 and, for
# kappa > 0, the barrier at |x| = 1/sqrt(kappa)).  Every module applies the
# same rule, so integrators and quadratures agree on admissibility and
# 1 - kappa*x**2 never underflows into catastrophic cancellation.
DOMAIN_MARGIN = 1e-12


class DomainError(ValueError):
    """Coordinate outside the admissible range."""


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the deformed oscillator with a 1/x^2 core.

    ``mass``, ``alpha`` (the frequency-like stiffness) and ``hbar`` must be
    positive; ``k_g`` is the nonnegative inverse-square strength; ``kappa``
    may take either sign (negative values flatten the potential, positive
    values raise a barrier at ``1/sqrt(kappa)``).
    """

    mass: float = 1.0
    alpha: float = 1.0
    kappa: float = 0.0
    k_g: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("mass", "alpha", "kappa", "k_g", "hbar"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.mass <= 0 or self.alpha <= 0 or self.hbar <= 0:
            raise ValueError("mass, alpha and hbar must be positive")
        if self.k_g < 0:
            raise ValueError("k_g must be nonnegative")

    @property
    def barrier(self) -> float | None:
        """Singular point 1/sqrt(kappa) of the kinetic factor, or None."""
        if self.kappa > 0:
            return 1.0 / math.sqrt(self.kappa)
        return None

    @property
    def k_eff(self) -> float:
        """Inverse-square strength per unit mass, k_g / m."""
        return self.k_g / self.mass


@dataclass(frozen=True)
class DimensionlessParams:
    """Scale-free parameters: mu fixes the length scale, hbar*alpha the energy.

    Invariants: ``mu**2 * hbar == mass * alpha``, ``kappa_prime * mu**2 ==
    kappa`` and ``g`` is the nonnegative root of ``g*(g+1) = m*k_g/hbar**2``.
    """

    mu: float
    kappa_prime: float
    g: float
    energy_scale: float

    def to_physical_energy(self, eps):
        """Physical energy for a dimensionless level value."""
        return self.energy_scale * eps

    def to_dimensionless_energy(self, energy):
        return energy / self.energy_scale


def nondimensionalize(p: SystemParams) -> DimensionlessParams:
    """Reduce physical parameters to (mu, kappa', g).

    mu**2 = m*alpha/hbar, kappa' = kappa/mu**2, and g solves
    g*(g+1) = m*k_g/hbar**2 with g >= 0.  Energies map as E = hbar*alpha*eps;
    the inverse map is exposed on the returned object.
    """
    mu_sq = p.mass * p.alpha / p.hbar
    mu = math.sqrt(mu_sq)
    kappa_prime = p.kappa / mu_sq
    q = p.mass * p.k_g / p.hbar**2
    g = 0.5 * (-1.0 + math.sqrt(1.0 + 4.0 * q))
    return DimensionlessParams(
        mu=mu,
        kappa_prime=kappa_prime,
        g=max(g, 0.0),
        energy_scale=p.hbar * p.alpha,
    )


def params_for_dimensionless(kappa_prime: float, g: float,
                             mass: float = 1.0, alpha: float = 1.0,
                             hbar: float = 1.0) -> SystemParams:
    """Physical parameter set whose dimensionless reduction is (kappa', g)."""
    if g < 0:
        raise ValueError("g must be nonnegative")
    mu_sq = mass * alpha / hbar
    return SystemParams(
        mass=mass,
        alpha=alpha,
        kappa=kappa_prime * mu_sq,
        k_g=hbar**2 * g * (g + 1.0) / mass,
        hbar=hbar,
    )


@dataclass(frozen=True)
class Domain:
    """Admissible coordinate interval, with an optional singular endpoint."""

    lower: float
    upper: float
    singular_point: float | None = None

    def contains(self, x):
        """True where x lies strictly inside, margin-guarded at singularities."""
        arr = np.asarray(x, dtype=float)
        inside = (arr > self.lower) & (arr < self.upper)
        if self.singular_point is not None:
            s = self.singular_point
            inside &= (arr / s) ** 2 <= 1.0 - DOMAIN_MARGIN
        if np.ndim(x) == 0:
            return bool(inside)
        return inside


def half_line_domain(kappa_prime: float) -> Domain:
    """Quantum half-line: [0, 1/sqrt(kappa')] for kappa' > 0, else [0, inf)."""
    if kappa_prime > 0:
        b = 1.0 / math.sqrt(kappa_prime)
        return Domain(lower=0.0, upper=b, singular_point=b)
    return Domain(lower=0.0, upper=math.inf)


def potential(x, p: SystemParams):
    """V(x) = m*alpha^2*x^2 / (2*(1 - kappa*x^2)) + k_g / (2*x^2).

    Rejects x = 0 and, for kappa > 0, any point at or beyond the barrier;
    infinities are never returned silently.  Accepts scalars or arrays.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr == 0.0):
        raise DomainError("potential is singular at x = 0")
    kx2 = p.kappa * arr * arr
    if p.kappa > 0 and np.any(kx2 >= 1.0 - DOMAIN_MARGIN):
        raise DomainError(
            "x at or beyond the barrier |x| = 1/sqrt(kappa) = "
            f"{p.barrier:.6g}"
        )
    v = 0.5 * p.mass * p.alpha**2 * arr * arr / (1.0 - kx2) \
        + 0.5 * p.k_g / (arr * arr)
    if np.ndim(x) == 0:
        return float(v)
    return v
