"""Numerical oracle: weighted quadrature and a discretized eigensolver.

The quantum problem lives on the half-line with the measure
d mu = d rho / sqrt(1 - kappa*rho^2).  Two independent discretizations are
provided:

* ``flat_variable`` changes coordinates to u = integral d rho / sqrt(1 -
  kappa*rho^2) (arcsin/arcsinh form), where the kinetic operator becomes a
  plain second derivative, the measure becomes du, and the eigenproblem is
  a standard symmetric tridiagonal one;
* ``direct_sl`` discretizes the self-adjoint form -(p w')' + q r w =
  2 eps r w of the polynomial factor conservatively on a cell-centered
  grid, where p = rho^(2(g+1)) (1-kappa rho^2)^(1/kappa + 1/2) and
  r = rho^(2(g+1)) (1-kappa rho^2)^(1/kappa - 1/2); p vanishes at the
  singular endpoints, so no boundary fluxes are needed there.

Non-integer powers of (1 - kappa*rho^2) are always computed through
exp(log1p(.)/kappa) for accuracy near rho = 0; the kappa -> 0 limits are
the Gaussian weights exp(-rho^2).  Eigenvalues of the lowest levels are
extracted by bisection plus inverse iteration on the tridiagonal matrices
and Richardson-extrapolated over grid refinements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.linalg import eigh_tridiagonal

from .model import Domain, half_line_domain

__all__ = [
    "DivergentIntegralError",
    "QuadratureConvergenceError",
    "SLWeights",
    "SLDiscretization",
    "EigenResult",
    "sl_weights",
    "quad_weighted",
    "discretize",
    "eigen_lowest",
    "suggested_box",
]


class DivergentIntegralError(ArithmeticError):
    """Successive tail refinements grow without bound: the integral diverges."""


class QuadratureConvergenceError(ArithmeticError):
    """The adaptive scheme stalled without reaching the requested tolerance."""


# ---------------------------------------------------------------------------
# weights


def _alg_power(kappa: float, rho, shift: float):
    """(1 - kappa*rho^2)^(1/kappa + shift); exp(-rho^2) at kappa = 0."""
    rho = np.asarray(rho, dtype=float)
    if kappa == 0.0:
        out = np.exp(-rho * rho)
    else:
        # keep 1 - kappa rho^2 >= 0 against round-off at the barrier
        arg = np.maximum(-kappa * rho * rho, -1.0)
        with np.errstate(divide="ignore"):
            base = np.log1p(arg)
        out = np.exp((1.0 / kappa + shift) * base)
    return out


@dataclass(frozen=True)
class SLWeights:
    """Weight functions of the self-adjoint problem for one (kappa', g)."""

    kappa_prime: float
    g: float
    domain: Domain

    def p(self, rho):
        rho = np.asarray(rho, dtype=float)
        return rho ** (2.0 * (self.g + 1.0)) * _alg_power(self.kappa_prime, rho, 0.5)

    def r_weight(self, rho):
        rho = np.asarray(rho, dtype=float)
        return rho ** (2.0 * (self.g + 1.0)) * _alg_power(self.kappa_prime, rho, -0.5)

    def measure(self, rho):
        rho = np.asarray(rho, dtype=float)
        if self.kappa_prime == 0.0:
            return np.ones_like(rho)
        return np.exp(-0.5 * np.log1p(-self.kappa_prime * rho * rho))


def sl_weights(kappa_prime: float, g: float) -> SLWeights:
    if g < 0:
        raise ValueError("g must be nonnegative")
    return SLWeights(kappa_prime=kappa_prime, g=g,
                     domain=half_line_domain(kappa_prime))


# ---------------------------------------------------------------------------
# adaptive weighted quadrature

_TAIL_START = 8.0
_MAX_DOUBLINGS = 60


def _resolve_weight(w, slw: SLWeights):
    if callable(w):
        return w
    table = {
        "measure": slw.measure,
        "r": slw.r_weight,
        "p": slw.p,
        "one": lambda rho: np.ones_like(np.asarray(rho, dtype=float)),
    }
    try:
        return table[w]
    except KeyError:
        raise ValueError(f"unknown weight selector {w!r}") from None


def quad_weighted(slw: SLWeights, f, weight="measure", tol: float = 1e-10,
                  lower: float | None = None, upper: float | None = None) -> float:
    """Adaptive integral of f * weight over the half-line domain.

    For kappa' > 0 the substitution rho = sin(theta)/sqrt(kappa') removes
    the endpoint singularity of the measure; for kappa' <= 0 the infinite
    tail is accumulated over doubling panels [R, 2R].  Panels whose
    increments stop shrinking raise ``DivergentIntegralError`` -- that
    signal is load-bearing for the normalizability checks, which must see
    the divergence rather than a number.
    """
    kp = slw.kappa_prime
    wfun = _resolve_weight(weight, slw)
    lo = slw.domain.lower if lower is None else float(lower)
    hi = slw.domain.upper if upper is None else float(upper)
    if hi <= lo:
        return 0.0

    if kp > 0:
        sq = math.sqrt(kp)
        hi = min(hi, slw.domain.upper)
        th_lo = math.asin(min(1.0, lo * sq))
        th_hi = math.asin(min(1.0, hi * sq))

        named = not callable(weight)
        expo = {"measure": -1.0, "r": 2.0 / kp - 1.0, "p": 2.0 / kp + 1.0,
                "one": 0.0}.get(weight if named else None)

        def integrand(theta):
            rho = math.sin(theta) / sq
            if named:
                # cos^expo * cos jacobian, with exact cos(theta)
                ct = math.cos(theta)
                if ct <= 0.0:
                    return 0.0
                wval = ct ** (expo + 1.0) / sq
                if weight in ("r", "p"):
                    wval *= rho ** (2.0 * (slw.g + 1.0))
            else:
                wval = wfun(rho) * math.cos(theta) / sq
            return f(rho) * wval

        val, _ = quad(integrand, th_lo, th_hi, epsabs=tol, epsrel=tol, limit=200)
        return float(val)

    def piece(a, b):
        v, _ = quad(lambda rho: f(rho) * wfun(rho), a, b,
                    epsabs=tol, epsrel=tol, limit=200)
        return v

    if math.isfinite(hi):
        return float(piece(lo, hi))

    r = max(_TAIL_START, 2.0 * lo if lo > 0 else _TAIL_START)
    total = piece(lo, r)
    prev_inc = None
    growth_streak = 0
    small_count = 0
    for _ in range(_MAX_DOUBLINGS):
        inc = piece(r, 2.0 * r)
        r *= 2.0
        total += inc
        if not math.isfinite(total):
            raise DivergentIntegralError("integral overflowed during tail accumulation")
        scale = max(abs(total), 1e-300)
        if abs(inc) <= tol * scale:
            small_count += 1
            if small_count >= 2:
                return float(total)
        else:
            small_count = 0
            if prev_inc is not None and abs(inc) >= 0.9 * abs(prev_inc):
                growth_streak += 1
                if growth_streak >= 3:
                    raise DivergentIntegralError(
                        "tail increments do not decay: divergent integral")
            else:
                growth_streak = 0
        prev_inc = inc
    raise QuadratureConvergenceError("tail did not converge within the panel budget")


# ---------------------------------------------------------------------------
# discretization


def _effective_potential(kappa_prime: float, g: float, u, osc_coeff: float):
    """W(rho(u)) = osc_coeff*rho^2/(2(1-kappa rho^2)) + g(g+1)/(2 rho^2) in the flat variable."""
    u = np.asarray(u, dtype=float)
    gg = g * (g + 1.0)
    if kappa_prime == 0.0:
        w = 0.5 * osc_coeff * u * u
        if gg != 0.0:
            w = w + 0.5 * gg / (u * u)
        return w
    sq = math.sqrt(abs(kappa_prime))
    th = sq * u
    if kappa_prime > 0:
        ratio = np.tan(th) ** 2 / kappa_prime       # rho^2/(1 - kappa rho^2)
        inv_rho2 = kappa_prime / np.sin(th) ** 2
    else:
        ratio = np.tanh(th) ** 2 / abs(kappa_prime)
        inv_rho2 = abs(kappa_prime) / np.sinh(th) ** 2
    w = 0.5 * osc_coeff * ratio
    if gg != 0.0:
        w = w + 0.5 * gg * inv_rho2
    return w


def _rho_of_u(kappa_prime: float, u):
    u = np.asarray(u, dtype=float)
    if kappa_prime == 0.0:
        return u.copy()
    sq = math.sqrt(abs(kappa_prime))
    if kappa_prime > 0:
        return np.sin(sq * u) / sq
    return np.sinh(sq * u) / sq


def _u_of_rho(kappa_prime: float, rho: float) -> float:
    if kappa_prime == 0.0:
        return float(rho)
    sq = math.sqrt(abs(kappa_prime))
    if kappa_prime > 0:
        return math.asin(min(1.0, rho * sq)) / sq
    return math.asinh(rho * sq) / sq


@dataclass(frozen=True)
class SLDiscretization:
    """Symmetric generalized eigenproblem H v = lambda M v on one grid.

    ``std_diag``/``std_offdiag`` hold the equivalent standard tridiagonal
    problem (M-similarity absorbed); ``eigen_scale`` converts its
    eigenvalues to dimensionless energies.
    """

    kappa_prime: float
    g: float
    formulation: str
    num_nodes: int
    grid: np.ndarray
    step: float
    diag: np.ndarray
    offdiag: np.ndarray
    mass: np.ndarray
    std_diag: np.ndarray
    std_offdiag: np.ndarray
    eigen_scale: float
    extent: float
    boundary: str
    oscillator_coeff: float

    def matrices(self):
        """Dense (H, M) for symmetry checks; use the tridiagonal arrays to solve."""
        n = len(self.diag)
        h = np.zeros((n, n))
        np.fill_diagonal(h, self.diag)
        idx = np.arange(n - 1)
        h[idx, idx + 1] = self.offdiag
        h[idx + 1, idx] = self.offdiag
        return h, np.diag(self.mass)


def suggested_box(kappa_prime: float, g: float, energy_top: float,
                  tail: float = 1e-12) -> float:
    """Flat-variable extent covering states up to ``energy_top``.

    Sized so the measure-weighted tail of the top state is below ``tail``:
    classical turning point plus the asymptotic decay length.  Only needed
    for kappa' <= 0; for kappa' > 0 the domain is finite.
    """
    if kappa_prime > 0:
        return 0.5 * math.pi / math.sqrt(kappa_prime)
    log_tail = -math.log(tail)
    if kappa_prime == 0.0:
        return math.sqrt(2.0 * max(energy_top, 1.0)) + math.sqrt(2.0 * log_tail)
    ak = abs(kappa_prime)
    threshold = (1.0 + ak) / (2.0 * ak)
    gap = threshold - energy_top
    if gap <= 0:
        raise ValueError("energy_top at or above the continuum threshold")
    frac = min(energy_top / threshold, 1.0 - 1e-12)
    u_turn = math.atanh(math.sqrt(max(frac, 0.0))) / math.sqrt(ak)
    return 1.2 * (u_turn + 0.5 * log_tail / math.sqrt(2.0 * gap))


def discretize(kappa_prime: float, g: float, num_nodes: int,
               formulation: str = "flat_variable",
               extent: float | None = None,
               oscillator_coeff: float | None = None) -> SLDiscretization:
    """Build the symmetric eigenproblem for one parameter set.

    ``extent`` is the flat-variable box (or the rho-truncation radius for
    ``direct_sl``); required for kappa' <= 0, ignored for kappa' > 0 where
    the domain is naturally finite.  ``oscillator_coeff`` overrides the
    (1 - kappa') prefactor of the quadratic term; it exists so tests can
    demonstrate that no other prefactor reproduces the closed-form levels.
    """
    if num_nodes < 64:
        raise ValueError("num_nodes must be at least 64")
    if g < 0:
        raise ValueError("g must be nonnegative")
    coeff = (1.0 - kappa_prime) if oscillator_coeff is None else float(oscillator_coeff)

    if formulation == "flat_variable":
        if kappa_prime > 0:
            u_max = 0.5 * math.pi / math.sqrt(kappa_prime)
        else:
            if extent is None:
                raise ValueError("extent (flat-variable box) required for kappa' <= 0")
            u_max = float(extent)
        h = u_max / (num_nodes + 1)
        u = (np.arange(num_nodes) + 1.0) * h
        w = _effective_potential(kappa_prime, g, u, coeff)
        diag = 1.0 / h**2 + w
        off = np.full(num_nodes - 1, -0.5 / h**2)
        mass = np.ones(num_nodes)
        return SLDiscretization(
            kappa_prime=kappa_prime, g=g, formulation=formulation,
            num_nodes=num_nodes, grid=_rho_of_u(kappa_prime, u), step=h,
            diag=diag, offdiag=off, mass=mass,
            std_diag=diag, std_offdiag=off, eigen_scale=1.0,
            extent=u_max, boundary="dirichlet both ends",
            oscillator_coeff=coeff,
        )

    if formulation != "direct_sl":
        raise ValueError(f"unknown formulation {formulation!r}")

    if kappa_prime > 0:
        rho_max = 1.0 / math.sqrt(kappa_prime)
        boundary = "natural (p vanishes at both endpoints)"
    else:
        if extent is None:
            raise ValueError("extent (rho truncation radius) required for kappa' <= 0")
        rho_max = float(extent)
        boundary = "natural at 0, dirichlet at the truncation radius"
    delta = rho_max / num_nodes
    centers = (np.arange(num_nodes) + 0.5) * delta
    faces = np.arange(num_nodes + 1) * delta

    two_g1 = 2.0 * (g + 1.0)
    # log-space evaluation: p and r decay/grow at the same algebraic rate,
    # so the transformed matrix stays well scaled even when r underflows
    with np.errstate(divide="ignore"):
        log_rho_f = np.log(faces, where=faces > 0, out=np.full_like(faces, -np.inf))
    if kappa_prime == 0.0:
        log_alg_f = -faces**2
        log_r = two_g1 * np.log(centers) - centers**2
    else:
        base_f = np.log1p(np.maximum(-kappa_prime * faces**2, -1.0))
        log_alg_f = (1.0 / kappa_prime + 0.5) * base_f
        base_c = np.log1p(-kappa_prime * centers**2)
        log_r = two_g1 * np.log(centers) + (1.0 / kappa_prime - 0.5) * base_c
    log_p_face = two_g1 * log_rho_f + log_alg_f
    if kappa_prime > 0:
        log_p_face[-1] = -np.inf  # p(b) = 0 exactly at the barrier

    q_term = kappa_prime * (1.0 + g) ** 2 + 2.0 * g + 3.0
    r_c = np.exp(log_r)
    p_f = np.exp(log_p_face)
    # the p_f[-1] contribution in the last diagonal entry is the ghost
    # (w = 0) flux at the truncation radius; for kappa' > 0 it vanishes
    # because p is zero at the barrier
    diag = (p_f[:-1] + p_f[1:]) / delta**2 + q_term * r_c
    off = -p_f[1:-1] / delta**2
    # transformed standard problem: D^{-1/2} K D^{-1/2} with D = diag(r)
    std_diag = (np.exp(log_p_face[:-1] - log_r) + np.exp(log_p_face[1:] - log_r)) \
        / delta**2 + q_term
    std_off = -np.exp(log_p_face[1:-1] - 0.5 * (log_r[:-1] + log_r[1:])) / delta**2
    return SLDiscretization(
        kappa_prime=kappa_prime, g=g, formulation=formulation,
        num_nodes=num_nodes, grid=centers, step=delta,
        diag=diag, offdiag=off, mass=r_c,
        std_diag=std_diag, std_offdiag=std_off, eigen_scale=0.5,
        extent=rho_max, boundary=boundary,
        oscillator_coeff=coeff,
    )


# ---------------------------------------------------------------------------
# eigensolver


@dataclass(frozen=True)
class EigenResult:
    """Lowest-k eigenpairs with refinement diagnostics.

    ``energies`` are the Richardson-extrapolated dimensionless energies;
    ``raw_energies`` holds one row per grid (coarsest first).  Vectors
    belong to the finest grid and are normalized in the discrete weighted
    inner product.
    """

    energies: np.ndarray
    raw_energies: np.ndarray
    error_estimates: np.ndarray
    vectors: np.ndarray
    grid: np.ndarray
    mass: np.ndarray
    step: float
    residuals: np.ndarray
    formulation: str


def _solve_tridiag(disc: SLDiscretization, k: int):
    vals, vecs = eigh_tridiagonal(disc.std_diag, disc.std_offdiag,
                                  select="i", select_range=(0, k - 1))
    return vals, vecs


def eigen_lowest(disc: SLDiscretization, k: int, refine: int = 2) -> EigenResult:
    """k lowest levels by bisection/inverse iteration, extrapolated over grids.

    ``refine`` extra grids (each doubling num_nodes) feed Richardson
    extrapolation assuming the second-order stencil; with two refinements
    both the h^2 and h^4 terms are eliminated.  The spread between the
    last two extrapolants is reported as the discretization-error estimate.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if k > disc.num_nodes // 4:
        raise ValueError("k too large for this grid")
    if refine < 0 or refine > 3:
        raise ValueError("refine must be in 0..3")

    discs = [disc]
    for j in range(1, refine + 1):
        discs.append(discretize(
            disc.kappa_prime, disc.g, disc.num_nodes * 2**j,
            formulation=disc.formulation,
            extent=disc.extent if disc.kappa_prime <= 0 else None,
            oscillator_coeff=disc.oscillator_coeff,
        ))

    raw = []
    vecs_fine = None
    for d in discs:
        vals, vecs = _solve_tridiag(d, k)
        raw.append(vals * d.eigen_scale)
        vecs_fine = (d, vecs)
    raw = np.asarray(raw)

    if refine == 0:
        best = raw[0]
        err = np.full(k, np.nan)
    elif refine == 1:
        best = (4.0 * raw[1] - raw[0]) / 3.0
        err = np.abs(raw[1] - raw[0]) / 3.0
    else:
        # fit the observed convergence order from the last three grids; the
        # flat stencil is second order while the conservative cell-centered
        # form converges faster, and a mismatched order would leave residue
        d1 = raw[-2] - raw[-3]
        d2 = raw[-1] - raw[-2]
        scale = np.maximum(np.abs(raw[-1]), 1.0)
        safe = (np.abs(d2) > 1e-13 * scale) & (np.abs(d1) > np.abs(d2))
        orders = np.where(safe, np.log2(np.maximum(np.abs(d1), 1e-300)
                                        / np.maximum(np.abs(d2), 1e-300)), 2.0)
        p = int(np.clip(round(float(np.median(orders[safe])))
                        if np.any(safe) else 2, 2, 4))
        f1 = 2.0**p
        f2 = 2.0**(p + 2)
        r1 = (f1 * raw[-2] - raw[-3]) / (f1 - 1.0)
        r2 = (f1 * raw[-1] - raw[-2]) / (f1 - 1.0)
        best = np.where(safe, (f2 * r2 - r1) / (f2 - 1.0), raw[-1])
        err = np.where(safe, np.abs(r2 - r1) / (f2 - 1.0) + np.abs(d2) / (f1 - 1.0) * 0.05,
                       np.abs(d2)) + np.finfo(float).eps * np.abs(raw[-1])

    d_fine, y = vecs_fine
    # residuals of the standard tridiagonal problem (scaled back to energies)
    n = d_fine.num_nodes
    res = np.empty(k)
    for j in range(k):
        v = y[:, j]
        tv = d_fine.std_diag * v
        tv[:-1] += d_fine.std_offdiag * v[1:]
        tv[1:] += d_fine.std_offdiag * v[:-1]
        lam = raw[-1][j] / d_fine.eigen_scale
        res[j] = np.linalg.norm(tv - lam * v) / np.linalg.norm(v) * d_fine.eigen_scale

    # map back to the generalized problem and normalize against the cell measure
    if d_fine.formulation == "flat_variable":
        vectors = y / math.sqrt(d_fine.step)
    else:
        vectors = y / np.sqrt(d_fine.mass[:, None] * d_fine.step)
    # fix a deterministic sign: first substantial component positive
    for j in range(k):
        col = vectors[:, j]
        lead = col[np.argmax(np.abs(col) > 1e-3 * np.max(np.abs(col)))]
        if lead < 0:
            vectors[:, j] = -col
    return EigenResult(
        energies=best, raw_energies=raw, error_estimates=err,
        vectors=vectors, grid=d_fine.grid, mass=d_fine.mass,
        step=d_fine.step, residuals=res, formulation=d_fine.formulation,
    )
