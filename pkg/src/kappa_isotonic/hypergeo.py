"""Terminating Gauss hypergeometric series as explicit polynomials.

Only the degree-n truncations arising from a nonpositive integer first
parameter are supported; coefficients come from the one-step term ratio,
which avoids factorial overflow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["HypergeoPolynomial", "build", "evaluate", "verify_ode", "horner"]

MAX_DEGREE = 200


@dataclass(frozen=True)
class HypergeoPolynomial:
    """Coefficients of the series with first parameter -degree, in ascending powers."""

    degree: int
    b: float
    c: float
    coeffs: tuple

    def __call__(self, t):
        return horner(self.coeffs, t)


def build(n: int, b: float, c: float) -> HypergeoPolynomial:
    """Degree-n polynomial from the term-ratio recurrence.

    coeffs[k+1]/coeffs[k] = (-n+k)*(b+k) / ((c+k)*(k+1)); the factor
    (-n+n) = 0 terminates the series after n+1 terms.
    """
    if n < 0 or n != int(n):
        raise ValueError("degree must be a nonnegative integer")
    if n > MAX_DEGREE:
        raise ValueError(f"degree {n} beyond the overflow guard {MAX_DEGREE}")
    if c <= 0:
        raise ValueError("third parameter must be positive")
    coeffs = [1.0]
    for k in range(int(n)):
        ratio = (-n + k) * (b + k) / ((c + k) * (k + 1))
        coeffs.append(coeffs[-1] * ratio)
    arr = np.asarray(coeffs)
    if not np.all(np.isfinite(arr)):
        raise ValueError("coefficient overflow; reduce degree or parameters")
    return HypergeoPolynomial(degree=int(n), b=float(b), c=float(c),
                              coeffs=tuple(float(v) for v in coeffs))


def horner(coeffs, t):
    """Evaluate sum(coeffs[k] * t**k) by Horner's rule (scalar or array t)."""
    arr = np.asarray(t, dtype=float)
    out = np.zeros_like(arr)
    for ck in reversed(coeffs):
        out = out * arr + ck
    if np.ndim(t) == 0:
        return float(out)
    return out


def evaluate(p: HypergeoPolynomial, t):
    return horner(p.coeffs, t)


def _derivative(coeffs):
    return tuple(k * coeffs[k] for k in range(1, len(coeffs)))


def verify_ode(p: HypergeoPolynomial, a: float, b: float, c: float, grid):
    """Largest normalized residual of the hypergeometric equation on a grid.

    The residual t*(1-t)*w'' + (c - (1+a+b)*t)*w' - a*b*w is evaluated with
    exact polynomial differentiation (coefficient shifts) and divided by the
    round-off floor of the evaluation (the same terms with all coefficient
    signs dropped), so the result is comparable across parameter scales.  A
    large value is a valid answer: it marks an inconsistent (a, b, c)
    triple.
    """
    d1 = _derivative(p.coeffs)
    d2 = _derivative(d1)
    ts = np.asarray(grid, dtype=float)
    abs_ts = np.abs(ts)
    w = horner(p.coeffs, ts)
    wp = horner(d1, ts) if d1 else np.zeros_like(ts)
    wpp = horner(d2, ts) if d2 else np.zeros_like(ts)
    t1 = ts * (1.0 - ts) * wpp
    t2 = (c - (1.0 + a + b) * ts) * wp
    t3 = -a * b * w
    resid = np.abs(t1 + t2 + t3)
    abs_coeffs = tuple(abs(v) for v in p.coeffs)
    abs_d1 = tuple(abs(v) for v in d1)
    abs_d2 = tuple(abs(v) for v in d2)
    a1 = np.abs(ts * (1.0 - ts)) * (horner(abs_d2, abs_ts) if d2 else 0.0)
    a2 = np.abs(c - (1.0 + a + b) * ts) * (horner(abs_d1, abs_ts) if d1 else 0.0)
    a3 = abs(a * b) * horner(abs_coeffs, abs_ts)
    scale = np.maximum(1.0, np.maximum(a1, np.maximum(a2, a3)))
    return float(np.max(resid / scale))
