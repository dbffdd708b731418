"""
Command-line entry point.

    qwspdc dispersion --theta1 0.01 --theta2 0.001 --num-k 256 --out disp.csv
    qwspdc zak --theta1 0.4 --theta2 0.001
    qwspdc gamma --fig 2a --out fig2a.csv --pgm fig2a.pgm
    qwspdc walk --theta1 0.785 --theta2 0.785 --steps 200 --classical
"""

from __future__ import annotations

import argparse
import contextlib
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import WalkAngles, bloch_numerators, dispersion, momentum_grid, relative_phase
from .errors import (
    DegenerateOverlap,
    EdgeOverflow,
    GapClosure,
    GridDegenerate,
    InsufficientData,
    InvalidGrid,
    NonQuantized,
    PhaseUndefined,
)
from .evolution import (
    SYMMETRIC_SPIN,
    Boundary,
    Convention,
    Homogeneous,
    classical_baseline,
    evolve,
    localized_state,
    scaling_exponent,
)
from .output import csv_text, fmt, pgm_bytes, sidecar_text, to_u8, write_text
from .spdc import AbsConvention, PhaseSign, PumpEnvelope, SpdcConfig, coupling_grid
from .topology import (
    BOUNDARY,
    phase_diagram,
    phi_difference,
    tangent_ratio,
    winding_number,
    zak_phase,
)

EXIT_USAGE = 1
EXIT_IO = 2
EXIT_DEGENERATE = 3
EXIT_GRID = 4
EXIT_OVERFLOW = 5

EPILOG = """exit status:
  0  success
  1  invalid arguments
  2  output path not writable
  3  degenerate parameters (gap closure, undefined phase, non-quantized winding)
  4  coupling grid has too many invalid cells
  5  walker reaches the lattice edge
"""

FIG_PRESETS = {
    "1a": dict(theta1=0.01, theta2=0.001, phase_sign="+", pump="gaussian", sigma=10.0),
    "1b": dict(theta1=0.01, theta2=0.001, phase_sign="-", pump="gaussian", sigma=10.0),
    "1c": dict(theta1=0.01, theta2=0.001, phase_sign="+", pump="gaussian", sigma=500.0),
    "1d": dict(theta1=0.01, theta2=0.001, phase_sign="-", pump="gaussian", sigma=500.0),
    "2a": dict(theta1=0.01, theta2=9 * math.pi / 20, phase_sign="+", pump="constant", sigma=None),
    "2b": dict(theta1=0.01, theta2=0.001, phase_sign="+", pump="constant", sigma=None),
    "2c": dict(theta1=0.01, theta2=9 * math.pi / 20, phase_sign="-", pump="constant", sigma=None),
    "2d": dict(theta1=0.01, theta2=0.001, phase_sign="-", pump="constant", sigma=None),
}

# grey levels for phase-diagram cells
DIAGRAM_LEVELS = {-1: 64, 0: 128, 1: 192, BOUNDARY: 0}
OTHER_WINDING_LEVEL = 255

GRID_CONVENTION = "row i = k_s index, column j = k_i index, k_j = -pi + 2 pi j / M"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(parser, num_k):
    parser.add_argument("--num-k", type=int, default=num_k, help="momentum samples (default %(default)s)")
    parser.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    parser.add_argument("--pgm", default=None, help="greyscale image path (where supported)")
    parser.add_argument("--seed", type=int, default=0, help="recorded in metadata; computations are deterministic")
    parser.add_argument("--config", default=None, help="key=value file supplying option values")


def _angles(parser, required=True, default=None):
    parser.add_argument("--theta1", type=float, required=required, default=default)
    parser.add_argument("--theta2", type=float, required=required, default=default)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="qwspdc",
        description="Split-step quantum walk topology and SPDC coupling simulator.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dispersion", help="band structure table (k, E, n, phi)", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    _angles(p)
    _common(p, 256)

    p = sub.add_parser("zak", help="Zak phases, phase difference and winding", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    _angles(p)
    p.add_argument("--winding-num-k", type=int, default=512)
    _common(p, 1024)

    p = sub.add_parser("winding", help="winding number of the planar Bloch angle", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    _angles(p)
    _common(p, 512)

    p = sub.add_parser("phase-diagram", help="winding-number map over (theta1, theta2)", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--theta1-range", type=float, nargs=2, default=(-math.pi / 2, math.pi / 2),
                   metavar=("LO", "HI"))
    p.add_argument("--theta2-range", type=float, nargs=2, default=(-math.pi / 2, math.pi / 2),
                   metavar=("LO", "HI"))
    p.add_argument("--grid", type=int, default=33)
    _common(p, 256)

    p = sub.add_parser("gamma", help="|Gamma(k_s, k_i)|^2 coupling grid", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--fig", choices=sorted(FIG_PRESETS), default=None,
                   help="figure preset; cannot be combined with explicit physics flags")
    _angles(p, required=False)
    p.add_argument("--idler-theta1", type=float, default=None, help="defaults to --theta1")
    p.add_argument("--idler-theta2", type=float, default=None, help="defaults to --theta2")
    p.add_argument("--phase-sign", choices=["+", "-"], default=None)
    p.add_argument("--pump", choices=["constant", "gaussian"], default=None)
    p.add_argument("--sigma", type=float, default=None, help="Gaussian width, radians of k_s + k_i")
    p.add_argument("--center", type=float, default=0.0, help="Gaussian centre in k_s + k_i")
    p.add_argument("--e1", type=float, default=1.0, help="sublattice-1 pump amplitude")
    p.add_argument("--e2", type=float, default=1.0, help="sublattice-2 pump amplitude")
    p.add_argument("--gamma0", type=float, default=1.0)
    p.add_argument("--convention", choices=[c.value for c in AbsConvention],
                   default=AbsConvention.ABS_SUM.value)
    _common(p, 256)

    p = sub.add_parser("walk", help="real-space walk spreading statistics", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    _angles(p, required=False)
    p.add_argument("--boundary", type=float, nargs=2, default=None, metavar=("TH1_LEFT", "TH1_RIGHT"),
                   help="theta1 for x < 0 and x >= 0 (theta2 from --theta2)")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--convention", choices=[c.value for c in Convention], default=Convention.HALF.value)
    p.add_argument("--spin", default="sym", help="initial spin: sym, H, V or 're0,im0,re1,im1'")
    p.add_argument("--lattice", type=int, default=None, help="lattice half-width L (default: minimal safe size)")
    p.add_argument("--classical", action="store_true", help="add the classical random-walk sigma column")
    p.add_argument("--fit-min", type=int, default=None)
    p.add_argument("--fit-max", type=int, default=None)
    p.add_argument("--dist-out", default=None, help="companion CSV with P(x) per step")
    _common(p, 256)
    return parser


def _read_config(path):
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def _subparser(parser, name):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def _find_config(argv):
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def _apply_config(parser, command, path):
    """Install config values as subcommand defaults so explicit flags still win."""
    sub = _subparser(parser, command)
    config = _read_config(path)
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in config.items():
        if key not in actions or key in ("config", "help"):
            raise UsageError(f"unknown config key {key!r} for {command}")
        action = actions[key]
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
            continue
        convert = action.type or str
        try:
            if action.nargs not in (None, "?"):
                defaults[key] = [convert(v) for v in raw.replace(",", " ").split()]
            else:
                defaults[key] = convert(raw)
        except ValueError:
            raise UsageError(f"config {key}={raw!r}: invalid value") from None
        if action.choices is not None and defaults[key] not in action.choices:
            raise UsageError(f"config {key}={raw!r} not in {sorted(action.choices)}")
    for action in sub._actions:
        if action.dest in defaults:
            action.required = False
    sub.set_defaults(**defaults)


def _emit(path, text: str, stdout):
    if path is None or path == "-":
        stdout.write(text)
        return
    write_text(path, text)


def _emit_bytes(path, data: bytes):
    Path(path).write_bytes(data)


def _require(condition, message):
    if not condition:
        raise UsageError(message)


def cmd_dispersion(args, stdout):
    _require(args.num_k >= 1, "--num-k must be positive")
    angles = WalkAngles(args.theta1, args.theta2)
    k = momentum_grid(args.num_k)
    energy = dispersion(angles, k)
    x, y, z = bloch_numerators(angles, k)
    # same denominator as bloch_vector
    sin_e = np.sqrt(x * x + y * y + z * z)
    rows = []
    for j in range(args.num_k):
        gap_closed = abs(sin_e[j]) <= 1e-9
        try:
            phi = relative_phase(angles, k[j])
        except PhaseUndefined:
            phi = None
        if gap_closed:
            n = (None, None, None)
        else:
            n = (x[j] / sin_e[j], y[j] / sin_e[j], z[j] / sin_e[j])
        rows.append((k[j], energy[j], *n, phi, bool(gap_closed)))
    _emit(args.out, csv_text(["k", "E", "nx", "ny", "nz", "phi", "gap_closed"], rows), stdout)


def cmd_zak(args, stdout):
    _require(args.num_k >= 64 and args.winding_num_k >= 64, "--num-k and --winding-num-k must be >= 64")
    angles = WalkAngles(args.theta1, args.theta2)
    zak = zak_phase(angles, args.num_k)
    diff = phi_difference(angles)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = tangent_ratio(angles)
    wind = winding_number(angles, args.winding_num_k)
    lines = [
        f"theta1 = {fmt(angles.theta1)}",
        f"theta2 = {fmt(angles.theta2)}",
        f"num_k = {zak.num_k}",
        f"zak_plus = {fmt(zak.zak_plus)}",
        f"zak_minus = {fmt(zak.zak_minus)}",
        f"zak_total = {fmt(zak.zak_total)}",
        f"phi_difference = {fmt(diff)}  # phi(-pi/2) - phi(pi/2)",
        f"tan_ratio = {fmt(ratio)}  # tan(theta2)/tan(theta1), printed for comparison",
        f"winding = {wind.w}",
        f"winding_residual = {fmt(wind.residual)}",
    ]
    _emit(args.out, "\n".join(lines) + "\n", stdout)


def cmd_winding(args, stdout):
    _require(args.num_k >= 64, "--num-k must be >= 64")
    angles = WalkAngles(args.theta1, args.theta2)
    wind = winding_number(angles, args.num_k)
    text = f"winding = {wind.w}\nsamples = {wind.samples}\nresidual = {fmt(wind.residual)}\n"
    _emit(args.out, text, stdout)


def cmd_phase_diagram(args, stdout):
    _require(args.grid >= 1, "--grid must be positive")
    _require(args.num_k >= 64, "--num-k must be >= 64")
    diagram = phase_diagram(tuple(args.theta1_range), tuple(args.theta2_range), args.grid, args.num_k)
    rows = []
    for i, a in enumerate(diagram.theta1):
        for j, b in enumerate(diagram.theta2):
            w = int(diagram.winding[i, j])
            rows.append((i, j, a, b, w, w == BOUNDARY))
    _emit(args.out, csv_text(["i", "j", "theta1", "theta2", "winding", "boundary"], rows), stdout)
    if args.pgm:
        pixels = np.vectorize(lambda w: DIAGRAM_LEVELS.get(int(w), OTHER_WINDING_LEVEL))(diagram.winding)
        _emit_bytes(args.pgm, pgm_bytes(pixels.astype(np.uint8)))
        meta = {
            "command": "phase-diagram",
            "tool_version": __version__,
            "theta1_range": list(args.theta1_range),
            "theta2_range": list(args.theta2_range),
            "grid": args.grid,
            "num_k": args.num_k,
            "seed": args.seed,
            "layout": "row i = theta1 index, column j = theta2 index",
            "grey_levels": {str(k): v for k, v in DIAGRAM_LEVELS.items()},
            "boundary_sentinel": BOUNDARY,
        }
        write_text(args.pgm + ".json", sidecar_text(meta))


def gamma_settings(args) -> dict:
    """Resolve --fig presets and explicit flags into one parameter set."""
    physics = dict(theta1=args.theta1, theta2=args.theta2, phase_sign=args.phase_sign,
                   pump=args.pump, sigma=args.sigma)
    if args.fig is not None:
        clash = [k for k, v in physics.items() if v is not None]
        _require(not clash, f"--fig cannot be combined with --{', --'.join(c.replace('_', '-') for c in clash)}")
        physics = dict(FIG_PRESETS[args.fig])
    else:
        _require(args.theta1 is not None and args.theta2 is not None,
                 "gamma needs --fig or both --theta1 and --theta2")
        physics["phase_sign"] = physics["phase_sign"] or "+"
        physics["pump"] = physics["pump"] or "constant"
    if physics["pump"] == "gaussian":
        _require(physics["sigma"] is not None and physics["sigma"] > 0, "gaussian pump needs --sigma > 0")
    return physics


def cmd_gamma(args, stdout):
    _require(args.num_k >= 16, "--num-k must be >= 16")
    _require(args.gamma0 > 0, "--gamma0 must be positive")
    s = gamma_settings(args)
    signal = WalkAngles(s["theta1"], s["theta2"])
    idler = WalkAngles(s["theta1"] if args.idler_theta1 is None else args.idler_theta1,
                       s["theta2"] if args.idler_theta2 is None else args.idler_theta2)
    sign = PhaseSign.CORRELATED if s["phase_sign"] == "+" else PhaseSign.ANTICORRELATED
    cfg = SpdcConfig(signal, idler, sign, args.gamma0, AbsConvention(args.convention))
    if s["pump"] == "gaussian":
        env = PumpEnvelope.gaussian(s["sigma"], args.e1, args.e2, args.center)
    else:
        env = PumpEnvelope.constant(args.e1, args.e2)
    grid = coupling_grid(cfg, env, args.num_k)
    intensity = grid.intensity()
    header = [f"ki_{j}" for j in range(args.num_k)]
    _emit(args.out, csv_text(header, intensity), stdout)
    if args.pgm:
        pixels, lo, hi = to_u8(intensity)
        _emit_bytes(args.pgm, pgm_bytes(pixels))
        meta = {
            "command": "gamma",
            "tool_version": __version__,
            "fig": args.fig,
            "signal_angles": [signal.theta1, signal.theta2],
            "idler_angles": [idler.theta1, idler.theta2],
            "phase_sign": s["phase_sign"],
            "pump": s["pump"],
            "sigma": s["sigma"],
            "sigma_units": "radians of k_s + k_i",
            "center": args.center if s["pump"] == "gaussian" else None,
            "e1": args.e1,
            "e2": args.e2,
            "gamma0": args.gamma0,
            "convention": args.convention,
            "num_k": args.num_k,
            "grid_convention": GRID_CONVENTION,
            "quantity": "|Gamma|^2",
            "normalization": {"min": lo, "max": hi},
            "invalid_cells": grid.invalid_count,
            "seed": args.seed,
        }
        write_text(args.pgm + ".json", sidecar_text(meta))


def _parse_spin(text):
    named = {"sym": SYMMETRIC_SPIN, "h": (1, 0), "v": (0, 1)}
    if text.lower() in named:
        return named[text.lower()]
    try:
        re0, im0, re1, im1 = (float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--spin must be sym, H, V or 're0,im0,re1,im1', got {text!r}") from None
    _require(re0 or im0 or re1 or im1, "--spin must be non-zero")
    return (complex(re0, im0), complex(re1, im1))


def cmd_walk(args, stdout):
    _require(args.steps >= 0, "--steps must be >= 0")
    _require(args.theta2 is not None, "walk needs --theta2")
    if args.boundary is not None:
        _require(args.theta1 is None, "--boundary replaces --theta1")
        profile = Boundary(args.boundary[0], args.boundary[1], args.theta2)
    else:
        _require(args.theta1 is not None, "walk needs --theta1 or --boundary")
        profile = Homogeneous(args.theta1, args.theta2)
    convention = Convention(args.convention)
    reach = 4 * args.steps + 2 if convention is Convention.FULL else 2 * args.steps + 2
    half_width = reach + 1 if args.lattice is None else args.lattice
    _require(half_width >= 2, "--lattice must be >= 2")
    stats = evolve(localized_state(half_width, _parse_spin(args.spin)), profile, args.steps, convention)

    header = ["N", "mean", "sigma"]
    rows = [[s.step_count, s.mean, s.sigma] for s in stats]
    classical = []
    if args.classical:
        header.append("sigma_classical")
        classical = [classical_baseline(s.step_count) if s.step_count else None for s in stats]
        for row, c in zip(rows, classical):
            row.append(0.0 if c is None else c.sigma)
    _emit(args.out, csv_text(header, rows), stdout)
    if args.dist_out:
        x = stats[0].positions
        dist_rows = [[s.step_count, *s.position_distribution] for s in stats]
        write_text(args.dist_out, csv_text(["N", *[f"x={v}" for v in x]], dist_rows))

    if args.steps >= 2:
        lo = args.fit_min if args.fit_min is not None else max(1, args.steps // 4)
        hi = args.fit_max if args.fit_max is not None else args.steps
        report = sys.stderr if args.out is None else stdout
        try:
            report.write(f"scaling_exponent = {fmt(scaling_exponent(stats, (lo, hi)))}  # N in [{lo}, {hi}]\n")
            if classical:
                report.write(
                    f"classical_exponent = {fmt(scaling_exponent([c for c in classical if c], (lo, hi)))}\n"
                )
        except InsufficientData as exc:
            report.write(f"scaling_exponent unavailable: {exc}\n")


COMMANDS = {
    "dispersion": cmd_dispersion,
    "zak": cmd_zak,
    "winding": cmd_winding,
    "phase-diagram": cmd_phase_diagram,
    "gamma": cmd_gamma,
    "walk": cmd_walk,
}


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    command = next((tok for tok in argv if tok in COMMANDS), None)
    config_path = _find_config(argv)
    if command is not None and config_path is not None:
        try:
            _apply_config(parser, command, config_path)
        except UsageError as exc:
            stderr.write(f"qwspdc {command}: {exc}\n")
            return EXIT_USAGE
        except OSError as exc:
            stderr.write(f"qwspdc {command}: {exc}\n")
            return EXIT_IO
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    def fail(code, exc):
        stderr.write(f"qwspdc {args.command}: {exc}\n")
        return code

    try:
        COMMANDS[args.command](args, stdout)
    except UsageError as exc:
        return fail(EXIT_USAGE, exc)
    except ValueError as exc:
        return fail(EXIT_USAGE, exc)
    except OSError as exc:
        return fail(EXIT_IO, exc)
    except (GapClosure, PhaseUndefined, DegenerateOverlap, NonQuantized) as exc:
        return fail(EXIT_DEGENERATE, exc)
    except (GridDegenerate, InvalidGrid) as exc:
        return fail(EXIT_GRID, exc)
    except EdgeOverflow as exc:
        return fail(EXIT_OVERFLOW, exc)
    return 0


if __name__ == "__main__":
    sys.exit(main())
