"""Command-line interface: table/CSV emitters and the verification driver.

Outputs are plot-ready data only; every file embeds the tool version and a
full echo of the run configuration, floats are serialized with 17
significant digits, and identical configurations produce byte-identical
files.  The default output directory comes from the KAPPA_ISOTONIC_OUT
environment variable (falling back to the working directory).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__, classical, spectrum, verification
from .model import DomainError, SystemParams, nondimensionalize, potential

__all__ = ["RunConfig", "main", "cmd_potential", "cmd_classical",
           "cmd_spectrum", "cmd_wavefunction", "cmd_verify", "cmd_figures"]

_FMT = "%.17g"


@dataclass
class RunConfig:
    """Everything that determines one run; echoed into every output."""

    command: str
    params: SystemParams
    output_format: str = "csv"
    output_path: str | None = None
    tolerance: float | None = None
    extras: dict = field(default_factory=dict)

    def echo(self) -> dict:
        d = {
            "tool": "kappa-isotonic",
            "version": __version__,
            "command": self.command,
            "mass": self.params.mass,
            "alpha": self.params.alpha,
            "kappa": self.params.kappa,
            "k_g": self.params.k_g,
            "hbar": self.params.hbar,
            "format": self.output_format,
        }
        if self.tolerance is not None:
            d["tolerance"] = self.tolerance
        d.update(self.extras)
        return d


def _default_out(config: RunConfig, suffix: str) -> str:
    if config.output_path:
        return config.output_path
    base = os.environ.get("KAPPA_ISOTONIC_OUT", ".")
    return os.path.join(base, f"{config.command}{suffix}.{config.output_format}")


def _write_table(config: RunConfig, columns, rows, path, notes=()):
    """Serialize a rectangular table with the config echo in the header."""
    if config.output_format == "csv":
        lines = []
        for key, val in sorted(config.echo().items()):
            lines.append(f"# {key} = {val}")
        for note in notes:
            lines.append(f"# {note}")
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(
                _FMT % v if isinstance(v, float) else str(v) for v in row))
        text = "\n".join(lines) + "\n"
    else:
        payload = {
            "meta": config.echo(),
            "notes": list(notes),
            "columns": list(columns),
            "data": [list(row) for row in rows],
        }
        text = json.dumps(payload, indent=1) + "\n"
    with open(path, "w") as fh:
        fh.write(text)
    return path


# ---------------------------------------------------------------------------
# commands


def cmd_potential(config: RunConfig, kappas, x_min, x_max, points) -> str:
    """(x, V) table with one column per kappa; bad kappas are skipped with a note."""
    xs = np.linspace(x_min, x_max, points)
    columns = ["x"]
    series = []
    notes = []
    for kappa in kappas:
        p = SystemParams(mass=config.params.mass, alpha=config.params.alpha,
                         kappa=kappa, k_g=config.params.k_g,
                         hbar=config.params.hbar)
        try:
            series.append(potential(xs, p))
            columns.append(f"V_kappa_{_FMT % kappa}")
        except DomainError as exc:
            notes.append(f"kappa = {_FMT % kappa} skipped: {exc}")
    rows = [[float(x)] + [float(col[i]) for col in series]
            for i, x in enumerate(xs)]
    path = _default_out(config, "")
    return _write_table(config, columns, rows, path, notes=notes)


def cmd_classical(config: RunConfig, family, amplitude, phase, border_b,
                  t_max, points, source) -> str:
    """Sampled trajectory (t, x, v, E), closed form or integrated."""
    p = config.params
    if family == "trig":
        traj = classical.solve_trig(amplitude, phase, p)
    elif family == "hyperbolic":
        traj = classical.solve_hyperbolic(amplitude, phase, p)
    elif family == "border":
        traj = classical.solve_border(border_b, p)
    else:
        raise ValueError(f"unknown family {family!r}")
    ts = np.linspace(0.0, t_max, points)
    if source == "closed-form":
        xs, vs = traj.position(ts), traj.velocity(ts)
        es = classical.energy_of(xs, vs, p)
    else:
        tol = config.tolerance or 1e-9
        num = classical.integrate_el(traj.position(0.0), traj.velocity(0.0),
                                     (0.0, t_max), p, tol=tol, t_eval=ts)
        ts, xs, vs, es = num.t, num.x, num.v, num.energy
    rows = [[float(a), float(b), float(c), float(d)]
            for a, b, c, d in zip(ts, xs, vs, es)]
    notes = [f"family = {family}", f"source = {source}",
             f"energy = {_FMT % traj.energy}"]
    path = _default_out(config, f"_{family}")
    return _write_table(config, ["t", "x", "v", "E"], rows, path, notes=notes)


def cmd_spectrum(config: RunConfig, n_max) -> str:
    """Level table (n, eps_n, E_n, gap, normalizable) with the finiteness flag."""
    summary = spectrum.spectrum_summary(config.params, n_max,
                                        quad_tol=config.tolerance or 1e-10)
    notes = [f"finite = {summary.finite}",
             f"quad_tol = {_FMT % (config.tolerance or 1e-10)}"]
    if summary.finite:
        notes.append(f"normalizability_bound = {_FMT % summary.n_bound}")
        notes.append(f"n_max = {summary.n_max}")
        notes.append(f"energy_peak_index = {_FMT % summary.e_max_point}")
    rows = []
    for i, st in enumerate(summary.levels):
        gap = summary.gaps[i] if i < len(summary.gaps) else math.nan
        rows.append([st.n, float(st.energy_dimless), float(st.energy_physical),
                     float(gap), True])
    path = _default_out(config, "")
    return _write_table(config, ["n", "eps_n", "E_n", "gap_to_next", "normalizable"],
                        rows, path, notes=notes)


def cmd_wavefunction(config: RunConfig, n, x_max, points) -> str:
    """(x, psi_n(x)) samples, unit-normalized against the deformed measure."""
    state = spectrum.bound_state(n, config.params,
                                 quad_tol=config.tolerance or 1e-10)
    dp = nondimensionalize(config.params)
    upper = x_max
    if dp.kappa_prime > 0:
        barrier = 1.0 / (dp.mu * math.sqrt(dp.kappa_prime))
        upper = min(x_max, barrier * (1.0 - 1e-9))
    xs = np.linspace(upper / points, upper, points)
    psi = spectrum.wavefunction(state, xs)
    rows = [[float(x), float(v)] for x, v in zip(xs, psi)]
    coeffs = json.dumps([_FMT % c for c in state.z_coeffs])
    notes = [f"n = {n}", f"energy_dimless = {_FMT % state.energy_dimless}",
             f"norm_constant = {_FMT % state.norm}",
             f"quad_tol = {_FMT % (config.tolerance or 1e-10)}",
             f"series_coefficients_in_(mu*x)^2 = {coeffs}"]
    path = _default_out(config, f"_n{n}")
    return _write_table(config, ["x", "psi"], rows, path, notes=notes)


def cmd_figures(config: RunConfig, points) -> str:
    """Potential data behind the two standard figures (k_g = 1).

    One file per sign family: kappa in {0, 0.2, 0.5} on (0, 1.4] and
    kappa in {0, -0.2, -0.5} on (0, 3].
    """
    base = config.output_path or os.environ.get("KAPPA_ISOTONIC_OUT", ".")
    os.makedirs(base, exist_ok=True)
    paths = []
    for tag, kappas, x_hi in (("figure1", (0.0, 0.2, 0.5), 1.4),
                              ("figure2", (0.0, -0.2, -0.5), 3.0)):
        sub = RunConfig(command=tag, params=SystemParams(
            mass=config.params.mass, alpha=config.params.alpha, kappa=0.0,
            k_g=1.0, hbar=config.params.hbar),
            output_format=config.output_format,
            output_path=os.path.join(base, f"{tag}.{config.output_format}"))
        paths.append(cmd_potential(sub, kappas, x_hi / points, x_hi, points))
    return os.pathsep.join(paths)


def cmd_verify(config: RunConfig, suite, quick) -> int:
    """Run the property suites; nonzero exit on any failure."""
    results, passed = verification.run_suite(suite, quick=quick)
    report = {
        "meta": config.echo(),
        "suite": suite,
        "quick": quick,
        "checks": [r.as_dict() for r in results],
        "passed": passed,
    }
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: measured {r.measured:.3e} vs tol "
              f"{r.tolerance:.0e} ({r.runtime:.1f}s) {r.detail}")
    if config.output_path:
        with open(config.output_path, "w") as fh:
            json.dump(report, fh, indent=1)
            fh.write("\n")
        print(f"report written to {config.output_path}")
    print(f"suite {suite}: {'PASS' if passed else 'FAIL'}")
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kappa-isotonic",
        description="Deformed oscillator with an inverse-square core: "
                    "potential/trajectory/spectrum/wave-function tables and "
                    "verification suites.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, kappa_list=False):
        if kappa_list:
            sp.add_argument("--kappa", type=float, nargs="+", default=[0.0],
                            help="deformation parameter(s)")
        else:
            sp.add_argument("--kappa", type=float, default=0.0)
        sp.add_argument("--kg", type=float, default=0.0,
                        help="inverse-square strength k_g")
        sp.add_argument("--alpha", type=float, default=1.0)
        sp.add_argument("--mass", type=float, default=1.0)
        sp.add_argument("--hbar", type=float, default=1.0)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--out", default=None, help="output path")
        sp.add_argument("--tol", type=float, default=None,
                        help="tolerance override for quadrature/integration")

    sp = sub.add_parser("potential", help="potential samples for a kappa list")
    common(sp, kappa_list=True)
    sp.add_argument("--x-min", type=float, default=0.05)
    sp.add_argument("--x-max", type=float, default=2.0)
    sp.add_argument("--points", type=int, default=200)

    sp = sub.add_parser("classical", help="closed-form or integrated trajectory")
    common(sp)
    sp.add_argument("--family", choices=("trig", "hyperbolic", "border"),
                    default="trig")
    sp.add_argument("--amplitude", type=float, default=1.0)
    sp.add_argument("--phase", type=float, default=0.0)
    sp.add_argument("--border-b", type=float, default=0.0)
    sp.add_argument("--t-max", type=float, default=20.0)
    sp.add_argument("--points", type=int, default=1000)
    sp.add_argument("--source", choices=("closed-form", "integrated"),
                    default="closed-form")

    sp = sub.add_parser("spectrum", help="bound-state level table")
    common(sp)
    sp.add_argument("--n-max", type=int, default=8,
                    help="number of levels requested")

    sp = sub.add_parser("wavefunction", help="wave-function samples for one level")
    common(sp)
    sp.add_argument("--n", type=int, default=0)
    sp.add_argument("--x-max", type=float, default=5.0)
    sp.add_argument("--points", type=int, default=400)

    sp = sub.add_parser("verify", help="run the property suites")
    common(sp)
    sp.add_argument("--suite", choices=("classical", "quantum", "all"),
                    default="all")
    sp.add_argument("--quick", action="store_true",
                    help="reduced grids for a fast smoke run")

    sp = sub.add_parser("figures", help="emit the standard potential figures' data")
    common(sp)
    sp.add_argument("--points", type=int, default=280)
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    kappa = args.kappa[0] if isinstance(args.kappa, list) else args.kappa
    params = SystemParams(mass=args.mass, alpha=args.alpha, kappa=kappa,
                          k_g=args.kg, hbar=args.hbar)
    config = RunConfig(command=args.command, params=params,
                       output_format=args.format, output_path=args.out,
                       tolerance=args.tol)
    try:
        if args.command == "potential":
            path = cmd_potential(config, args.kappa, args.x_min, args.x_max,
                                 args.points)
            print(f"wrote {path}")
        elif args.command == "classical":
            path = cmd_classical(config, args.family, args.amplitude,
                                 args.phase, args.border_b, args.t_max,
                                 args.points, args.source)
            print(f"wrote {path}")
        elif args.command == "spectrum":
            path = cmd_spectrum(config, args.n_max)
            print(f"wrote {path}")
        elif args.command == "wavefunction":
            path = cmd_wavefunction(config, args.n, args.x_max, args.points)
            print(f"wrote {path}")
        elif args.command == "figures":
            paths = cmd_figures(config, args.points)
            print(f"wrote {paths}")
        elif args.command == "verify":
            return cmd_verify(config, args.suite, args.quick)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
