"""Property suites shared by the acceptance tests and the CLI verifier.

Each check runs a fixed parameter grid (no randomness, so reports are
reproducible) and returns the worst measured deviation together with the
tolerance it is held to.  The quantum checks pit the closed forms against
the quadrature/eigensolver oracles; the classical checks pit them against
direct integration of the equation of motion.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, asdict

import numpy as np

from . import classical, hypergeo, slsolver, spectrum
from .model import SystemParams, params_for_dimensionless

__all__ = ["CheckResult", "classical_suite", "quantum_suite", "run_suite",
           "CLASSICAL_KAPPAS", "CLASSICAL_KGS", "QUANTUM_KAPPA_PRIMES",
           "QUANTUM_GS", "BORDER_TRIPLES"]

CLASSICAL_KAPPAS = (-1.0, -0.3, 0.3, 1.0)
CLASSICAL_KGS = (0.25, 1.0, 4.0)
QUANTUM_KAPPA_PRIMES = (-0.1, -0.05, 0.1, 0.5)
QUANTUM_GS = (0.0, 1.0, 2.5)
# (kappa, k_g, B) with alpha = 1, all satisfying alpha^2 > k_g*kappa^2
BORDER_TRIPLES = (
    (-1.0, 0.25, 1.0),
    (-0.3, 1.0, 2.0),
    (-0.5, 0.5, -1.5),
    (-2.0, 0.1, 0.7),
    (-0.3, 4.0, 0.0),
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""
    runtime: float = 0.0

    def as_dict(self):
        return asdict(self)


def _result(name, measured, tolerance, detail="", t0=None, invert=False):
    passed = (measured >= tolerance) if invert else (measured <= tolerance)
    return CheckResult(name=name, passed=bool(passed), measured=float(measured),
                       tolerance=float(tolerance), detail=detail,
                       runtime=0.0 if t0 is None else time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# admissible amplitude grids


def trig_amplitudes(kappa: float, k_g: float, alpha: float = 1.0, count: int = 5):
    """Admissible amplitudes for the periodic family; empty if none exist."""
    if kappa > 0:
        fracs = np.linspace(0.08, 0.9, count)
        return list(np.sqrt(fracs / kappa))
    if kappa == 0:
        return list(np.linspace(0.5, 3.0, count))
    ak = abs(kappa)
    if alpha**2 <= k_g * kappa**2:
        return []
    if k_g == 0:
        return list(np.linspace(0.5, 3.0, count))
    a2_min = k_g * ak / (alpha**2 - k_g * kappa**2)
    factors = (1.2, 1.5, 2.0, 4.0, 8.0)[:count]
    return [math.sqrt(a2_min * f) for f in factors]


def hyperbolic_amplitudes(kappa: float, k_g: float, alpha: float = 1.0,
                          count: int = 5):
    """Admissible amplitudes for the unbounded family (kappa < 0 only)."""
    if kappa >= 0:
        return []
    ak = abs(kappa)
    lo = 1.0 / ak
    if k_g * kappa**2 > alpha**2:
        hi = k_g * ak / (k_g * kappa**2 - alpha**2)
        fr = np.linspace(0.1, 0.9, count)
        a2s = lo + fr * (hi - lo)
    else:
        a2s = lo * np.array([1.05, 1.2, 1.5, 2.5, 5.0])[:count]
    return [math.sqrt(a2) for a2 in a2s]


def _residual_window(traj: classical.TrajectoryCoeffs, n_times: int):
    """Sampling times keeping term magnitudes moderate (float-noise control)."""
    if traj.family is classical.Family.TRIG:
        return np.linspace(0.0, 3.0 * 2.0 * math.pi / traj.omega, n_times)
    if traj.family is classical.Family.HYPERBOLIC:
        t_max = min(3.0, math.asinh(30.0) / traj.omega)
        return np.linspace(0.0, t_max, n_times)
    return np.linspace(-5.0, 5.0, n_times)


# ---------------------------------------------------------------------------
# classical checks


def check_closed_form_residuals(n_times: int = 1000) -> CheckResult:
    """Worst equation-of-motion residual over all families on the grid."""
    t0 = time.perf_counter()
    worst = 0.0
    tested = 0
    for kappa in CLASSICAL_KAPPAS:
        for k_g in CLASSICAL_KGS:
            p = SystemParams(kappa=kappa, k_g=k_g)
            trajs = []
            for amp in trig_amplitudes(kappa, k_g):
                trajs.append(classical.solve_trig(amp, 0.0, p))
            for amp in hyperbolic_amplitudes(kappa, k_g):
                trajs.append(classical.solve_hyperbolic(amp, 0.0, p))
            if kappa < 0 and 1.0 != k_g * kappa**2:
                for b in (-2.0, -0.5, 0.0, 1.0, 3.0):
                    try:
                        trajs.append(classical.solve_border(b, p))
                    except classical.AdmissibilityError:
                        pass
            for traj in trajs:
                ts = _residual_window(traj, n_times)
                try:
                    res = np.max(np.abs(traj.el_residual(ts)))
                except classical.DomainError:
                    # border window with a nonpositive radicand: no trajectory
                    continue
                worst = max(worst, float(res))
                tested += 1
    return _result("classical_closed_form_residuals", worst, 1e-9,
                   detail=f"{tested} trajectories, {n_times} times each", t0=t0)


def check_ode_oracle_match(tol: float = 1e-10) -> CheckResult:
    """Closed forms against direct integration: pointwise agreement."""
    t0 = time.perf_counter()
    worst = 0.0
    cases = 0
    for kappa in CLASSICAL_KAPPAS:
        for k_g in CLASSICAL_KGS:
            p = SystemParams(kappa=kappa, k_g=k_g)
            amps = trig_amplitudes(kappa, k_g)
            if amps:
                traj = classical.solve_trig(amps[len(amps) // 2], 0.0, p)
                t_end = 3.2 * 2.0 * math.pi / traj.omega
                ts = np.linspace(0.0, t_end, 3000)
                num = classical.integrate_el(traj.position(0.0), traj.velocity(0.0),
                                             (0.0, t_end), p, tol=tol, t_eval=ts)
                scale = max(1.0, float(np.max(np.abs(num.x))))
                worst = max(worst, float(np.max(np.abs(num.x - traj.position(ts)))) / scale)
                cases += 1
            hamps = hyperbolic_amplitudes(kappa, k_g)
            if hamps:
                traj = classical.solve_hyperbolic(hamps[len(hamps) // 2], 0.0, p)
                ts = np.linspace(0.0, 3.0, 1500)
                num = classical.integrate_el(traj.position(0.0), traj.velocity(0.0),
                                             (0.0, 3.0), p, tol=tol, t_eval=ts)
                ref = traj.position(ts)
                worst = max(worst, float(np.max(np.abs(num.x - ref) / np.abs(ref))))
                cases += 1
    return _result("classical_ode_oracle_match", worst, 1e-6,
                   detail=f"{cases} trajectories integrated", t0=t0)


def check_frequency_measurement() -> CheckResult:
    """Measured 2*pi/T against the closed-form frequency, plus the sign law.

    The deformation shifts the frequency below alpha for kappa < 0 and
    above it for kappa > 0; both the closed-form and the measured
    frequencies must respect that on every grid point.
    """
    t0 = time.perf_counter()
    worst = 0.0
    sign_ok = True
    cases = 0
    for kappa in CLASSICAL_KAPPAS:
        for k_g in CLASSICAL_KGS:
            p = SystemParams(kappa=kappa, k_g=k_g)
            amps = trig_amplitudes(kappa, k_g)
            if not amps:
                continue
            traj = classical.solve_trig(amps[len(amps) // 2], 0.0, p)
            if kappa > 0:
                sign_ok &= traj.omega > p.alpha
            elif kappa < 0:
                sign_ok &= traj.omega < p.alpha
            t_end = 3.2 * 2.0 * math.pi / traj.omega
            num = classical.integrate_el(traj.position(0.0), traj.velocity(0.0),
                                         (0.0, t_end), p, tol=1e-10,
                                         t_eval=np.linspace(0.0, t_end, 4000))
            omega_meas = 2.0 * math.pi / classical.measure_period(num)
            worst = max(worst, abs(omega_meas - traj.omega) / traj.omega)
            if kappa > 0:
                sign_ok &= omega_meas > p.alpha
            elif kappa < 0:
                sign_ok &= omega_meas < p.alpha
            cases += 1
    measured = worst if sign_ok else math.inf
    return _result("classical_frequency_measurement", measured, 1e-4,
                   detail=f"{cases} periodic trajectories; sign law "
                          f"{'held' if sign_ok else 'VIOLATED'}", t0=t0)


def check_border_energy() -> CheckResult:
    """Conserved energy of the algebraic trajectory against the threshold."""
    t0 = time.perf_counter()
    worst = 0.0
    for kappa, k_g, b in BORDER_TRIPLES:
        p = SystemParams(kappa=kappa, k_g=k_g)
        traj = classical.solve_border(b, p)
        e_b = classical.bound_energy(p)
        ts = np.linspace(-4.0, 4.0, 200)
        e = traj.energy_at(ts)
        worst = max(worst, float(np.max(np.abs(e - e_b))) / abs(e_b))
    return _result("classical_border_energy", worst, 1e-10,
                   detail=f"{len(BORDER_TRIPLES)} (kappa, k_g, B) triples", t0=t0)


def classical_suite(quick: bool = False):
    n_times = 200 if quick else 1000
    return [
        check_closed_form_residuals(n_times=n_times),
        check_ode_oracle_match(),
        check_frequency_measurement(),
        check_border_energy(),
    ]


# ---------------------------------------------------------------------------
# quantum checks


def _level_range(kappa_prime: float, g: float, n_top: int = 4):
    if kappa_prime < 0:
        return range(min(n_top + 1, spectrum.count_bound_states(kappa_prime, g)))
    return range(n_top + 1)


def check_quantization_roots() -> CheckResult:
    """Resolved indicial root equals -n on every normalizable grid level."""
    t0 = time.perf_counter()
    worst = 0.0
    for kp in QUANTUM_KAPPA_PRIMES:
        for g in QUANTUM_GS:
            for n in _level_range(kp, g):
                eps = spectrum.energy_level(n, kp, g)
                hp = spectrum.hypergeo_params(eps, kp, g)
                worst = max(worst, abs(spectrum.quantization_root(hp) + n))
    return _result("quantum_quantization_roots", worst, 1e-10, t0=t0)


def check_polynomial_ode() -> CheckResult:
    """Level polynomials satisfy the degree-terminating equation.

    Also confirms the discriminator: doubling the companion parameter (the
    candidate value with a spurious factor of two) must fail the residual
    test by a wide margin, otherwise the check itself proves nothing.
    """
    t0 = time.perf_counter()
    worst = 0.0
    for kp in QUANTUM_KAPPA_PRIMES:
        for g in QUANTUM_GS:
            c = g + 1.5
            ts = kp * np.linspace(0.0, 3.0, 41) ** 2
            for n in _level_range(kp, g):
                eps = spectrum.energy_level(n, kp, g)
                hp = spectrum.hypergeo_params(eps, kp, g)
                a_res = spectrum.quantization_root(hp)
                b_other = hp.a + hp.b - a_res
                poly = hypergeo.build(n, b_other, c)
                worst = max(worst, hypergeo.verify_ode(poly, a_res, b_other, c, ts))
    # discriminator sanity on one representative level
    n, kp, g = 3, 0.5, 1.0
    c = g + 1.5
    ts = kp * np.linspace(0.0, 3.0, 41) ** 2
    b_right = spectrum.companion_b(n, kp, g)
    wrong = hypergeo.verify_ode(hypergeo.build(n, 2.0 * b_right, c),
                                -n, b_right, c, ts)
    discriminates = wrong > 1e-3
    measured = worst if discriminates else math.inf
    return _result("quantum_polynomial_ode", measured, 1e-10,
                   detail=f"doubled-parameter residual {wrong:.3g} "
                          f"({'discriminates' if discriminates else 'FAILS TO DISCRIMINATE'})",
                   t0=t0)


def check_eigen_oracle(num_nodes: int = 4096, refine: int = 2) -> CheckResult:
    """Closed-form levels against the flat-variable eigensolver on the grid."""
    t0 = time.perf_counter()
    worst = 0.0
    for kp in QUANTUM_KAPPA_PRIMES:
        for g in QUANTUM_GS:
            ns = _level_range(kp, g)
            n_lev = len(ns)
            exact = np.array([spectrum.energy_level(n, kp, g) for n in ns])
            if kp < 0:
                ext = slsolver.suggested_box(kp, g, float(exact[-1]))
            else:
                ext = None
            disc = slsolver.discretize(kp, g, num_nodes, extent=ext)
            res = slsolver.eigen_lowest(disc, n_lev, refine=refine)
            worst = max(worst, float(np.max(np.abs(res.energies - exact)
                                            / np.abs(exact))))
    return _result("quantum_eigenvalue_oracle", worst, 1e-6,
                   detail=f"12-point grid, n <= 4, base {num_nodes} nodes", t0=t0)


def check_isotonic_ground_state(num_nodes: int = 2048) -> CheckResult:
    """Undeformed g = 1 ground state: closed form exactly 2.5, oracle agrees."""
    t0 = time.perf_counter()
    closed = spectrum.energy_level(0, 0.0, 1.0)
    if closed != 2.5:
        return _result("quantum_isotonic_ground_state", math.inf, 1e-6,
                       detail=f"closed form returned {closed!r}", t0=t0)
    disc = slsolver.discretize(0.0, 1.0, num_nodes,
                               extent=slsolver.suggested_box(0.0, 1.0, 4.0))
    res = slsolver.eigen_lowest(disc, 1, refine=2)
    measured = abs(res.energies[0] - 2.5) / 2.5
    return _result("quantum_isotonic_ground_state", measured, 1e-6, t0=t0)


def check_formulation_cross(num_nodes: int = 4096) -> CheckResult:
    """flat_variable vs direct_sl eigenvalues after extrapolation.

    For kappa' < 0 only levels whose weighted tail decays at least like
    rho^-5 are compared; closer to the continuum threshold the truncated
    polynomial formulation converges too slowly in the box radius for a
    meaningful 1e-6 comparison (the flat variable, exponentially confined,
    has no such limit).
    """
    t0 = time.perf_counter()
    worst = 0.0
    for kp in QUANTUM_KAPPA_PRIMES:
        for g in QUANTUM_GS:
            ns = list(_level_range(kp, g))
            if kp < 0:
                ns = [n for n in ns
                      if 2.0 * (2 * n + g + 1.0) - 2.0 / abs(kp) - 1.0 <= -5.0]
                ext_flat = slsolver.suggested_box(
                    kp, g, spectrum.energy_level(max(ns), kp, g))
                ext_direct = 1000.0
            else:
                ext_flat = ext_direct = None
            if not ns:
                continue
            k = max(ns) + 1
            flat = slsolver.eigen_lowest(
                slsolver.discretize(kp, g, num_nodes, extent=ext_flat), k, refine=2)
            direct = slsolver.eigen_lowest(
                slsolver.discretize(kp, g, num_nodes, formulation="direct_sl",
                                    extent=ext_direct), k, refine=2)
            rel = np.abs(flat.energies[ns] - direct.energies[ns]) \
                / np.abs(flat.energies[ns])
            worst = max(worst, float(np.max(rel)))
    return _result("quantum_formulation_cross_check", worst, 1e-6, t0=t0)


def check_orthogonality(n_top: int = 4) -> CheckResult:
    """Weighted overlaps: off-diagonal below 1e-8, diagonal within 1e-8 of 1."""
    t0 = time.perf_counter()
    worst = 0.0
    pairs = 0
    for kp in QUANTUM_KAPPA_PRIMES:
        for g in QUANTUM_GS:
            pars = params_for_dimensionless(kp, g)
            ns = list(_level_range(kp, g, n_top))
            states = [spectrum.bound_state(n, pars) for n in ns]
            for i, sa in enumerate(states):
                for sb in states[i:]:
                    val = spectrum.overlap(sa, sb)
                    dev = abs(val - 1.0) if sa.n == sb.n else abs(val)
                    worst = max(worst, dev)
                    pairs += 1
    return _result("quantum_orthogonality", worst, 1e-8,
                   detail=f"{pairs} overlaps on the 12-point grid", t0=t0)


def check_finite_spectrum(num_nodes: int = 2048) -> CheckResult:
    """kappa' = -0.1, g = 0: exactly five normalizable levels.

    Checks all four faces of the claim: the five quadratures converge, the
    sixth diverges, the eigensolver finds exactly five box-stable levels
    below the continuum threshold, and the gap sequence matches the closed
    form to 1e-12.
    """
    t0 = time.perf_counter()
    kp, g = -0.1, 0.0
    count = spectrum.count_bound_states(kp, g)
    problems = []
    pars = params_for_dimensionless(kp, g)
    for n in range(count):
        try:
            spectrum.bound_state(n, pars)
        except slsolver.DivergentIntegralError:
            problems.append(f"level {n} unexpectedly divergent")
        if not spectrum.level_tail_converges(n, kp, g):
            problems.append(f"level {n} fails the dominant-power probe")
    # the candidate just beyond the bound must not furnish a new state: its
    # dominant-power norm integral diverges, and direct construction fails
    # (here by collapsing onto the mirror level of equal energy)
    if spectrum.level_tail_converges(count, kp, g):
        problems.append(f"level {count} dominant-power integral unexpectedly convergent")
    try:
        spectrum.bound_state(count, pars, check_normalizable=False)
        problems.append(f"level {count} unexpectedly constructible")
    except (slsolver.DivergentIntegralError, spectrum.DegenerateLevelError):
        pass
    if count != 5:
        problems.append(f"count = {count} != 5")

    threshold = (1.0 + abs(kp)) / (2.0 * abs(kp))
    exact = np.array([spectrum.energy_level(n, kp, g) for n in range(count)])
    box = slsolver.suggested_box(kp, g, float(exact[-1]))
    stable_sets = []
    for scale in (1.0, 2.0, 4.0):
        disc = slsolver.discretize(kp, g, int(num_nodes * scale),
                                   extent=scale * box)
        stable_sets.append(slsolver.eigen_lowest(disc, count + 3, refine=2).energies)
    lam_a, lam_b, lam_c = stable_sets
    stable = [la for la, lb, lc in zip(lam_a, lam_b, lam_c)
              if abs(la - lb) <= 1e-6 * max(1.0, abs(la))
              and abs(lb - lc) <= 1e-6 * max(1.0, abs(lb))
              and la < threshold]
    if len(stable) != 5:
        problems.append(f"{len(stable)} box-stable levels below threshold, expected 5")
    # no spurious stable level may appear between the top state and the
    # continuum threshold as the box grows
    spurious = [la for la, lb, lc in zip(lam_a, lam_b, lam_c)
                if exact[-1] + 1e-4 < la < threshold
                and abs(la - lb) <= 1e-6 * max(1.0, abs(la))
                and abs(lb - lc) <= 1e-6 * max(1.0, abs(lb))]
    if spurious:
        problems.append(f"spurious stable levels near the threshold: {spurious}")

    gap_dev = max(
        abs((exact[n + 1] - exact[n]) - spectrum.energy_gap(n, kp, g))
        for n in range(count - 1)
    )
    eig_dev = float(np.max(np.abs(np.asarray(stable[:count]) - exact) / exact)) \
        if len(stable) >= count else math.inf
    measured = math.inf if problems else max(gap_dev / 1e-12, eig_dev / 1e-6)
    return _result("quantum_finite_spectrum", measured, 1.0,
                   detail="; ".join(problems) if problems else
                   f"5 levels, gap dev {gap_dev:.2e}, eigen dev {eig_dev:.2e}",
                   t0=t0)


def check_zero_kappa_continuity() -> CheckResult:
    """The dedicated kappa' = 0 path joins the generic path at +-1e-6.

    Energies are compared level by level in relative terms (the states at
    kappa' = +-1e-6 genuinely differ from the limit at order
    kappa'*(2n+1+g)^2, which the relative reading absorbs).  Wave-function
    samples are compared against the two-sided midpoint of the +-kappa'
    evaluations, which cancels that physical first-order shift and leaves
    only implementation discontinuities.
    """
    t0 = time.perf_counter()
    eps_k = 1e-6
    worst = 0.0
    xs = np.linspace(0.05, 4.0, 80)
    for g in QUANTUM_GS:
        pars0 = params_for_dimensionless(0.0, g)
        pars_p = params_for_dimensionless(+eps_k, g)
        pars_m = params_for_dimensionless(-eps_k, g)
        for n in range(6):
            e0 = spectrum.energy_level(n, 0.0, g)
            ep = spectrum.energy_level(n, +eps_k, g)
            em = spectrum.energy_level(n, -eps_k, g)
            worst = max(worst, abs(ep - e0) / e0, abs(em - e0) / e0,
                        abs(0.5 * (ep + em) - e0))
            s0 = spectrum.bound_state(n, pars0)
            sp = spectrum.bound_state(n, pars_p)
            sm = spectrum.bound_state(n, pars_m)
            psi0 = spectrum.wavefunction(s0, xs)
            mid = 0.5 * (spectrum.wavefunction(sp, xs) + spectrum.wavefunction(sm, xs))
            peak = float(np.max(np.abs(psi0)))
            worst = max(worst, float(np.max(np.abs(mid - psi0))) / peak)
    return _result("quantum_zero_kappa_continuity", worst, 1e-5,
                   detail="energies relative, wave functions via the "
                          "two-sided +-1e-6 midpoint, n <= 5", t0=t0)


def quantum_suite(quick: bool = False):
    nodes = 1024 if quick else 4096
    return [
        check_quantization_roots(),
        check_polynomial_ode(),
        check_eigen_oracle(num_nodes=nodes, refine=1 if quick else 2),
        check_isotonic_ground_state(num_nodes=max(512, nodes // 2)),
        check_formulation_cross(num_nodes=nodes),
        check_orthogonality(n_top=2 if quick else 4),
        check_finite_spectrum(num_nodes=max(512, nodes // 2)),
        check_zero_kappa_continuity(),
    ]


def run_suite(which: str, quick: bool = False):
    """Run one of {classical, quantum, all}; returns (results, all_passed)."""
    if which == "classical":
        results = classical_suite(quick=quick)
    elif which == "quantum":
        results = quantum_suite(quick=quick)
    elif which == "all":
        results = classical_suite(quick=quick) + quantum_suite(quick=quick)
    else:
        raise ValueError(f"unknown suite {which!r}")
    return results, all(r.passed for r in results)
