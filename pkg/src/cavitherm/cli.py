"""Command-line driver for points, sweeps, slope maps, mode studies, units.

Subcommands: point, sweep, slope, modes, units, verify.  A JSON config
file can seed any option; explicit flags override it.  All computation is
deterministic, so identical invocations produce bit-identical output
regardless of worker count.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .cell import CellConfig, IntegratorConfig, integrate_cavity
from .channels import apply_channel, reduce_channel
from .errors import CavithermError
from .oracles import dyson_channel, fock_vacuum_response
from . import sweep as sw

MODES_HEADER = "# cavitherm-modes 1"
DEFAULT_MODE_LIST = (10, 20, 30, 60, 110, 160, 210)


def _parse_grid(text: str) -> np.ndarray:
    """'min:max:count' to a log-spaced axis; count >= 2, bounds positive."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected min:max:count, got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not (0.0 < lo < hi) or count < 2:
        raise argparse.ArgumentTypeError(
            f"need 0 < min < max and count >= 2, got {text!r}")
    return np.geomspace(lo, hi, count)


def _parse_mode_list(text: str) -> tuple:
    try:
        values = tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if len(values) < 2 or any(b <= a for a, b in zip(values, values[1:])):
        raise argparse.ArgumentTypeError("mode list must be ascending, length >= 2")
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="JSON file of defaults; flags override it")
    common.add_argument("--out", metavar="PATH",
                        help="output file (stdout when omitted)")
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="output format (default csv)")
    common.add_argument("--workers", type=int, default=None, metavar="N",
                        help="parallel worker processes (default 1)")
    common.add_argument("--seedless", action="store_true",
                        help="documents that no randomness is involved; no effect")

    cell = argparse.ArgumentParser(add_help=False)
    cell.add_argument("--lambda0", type=float, default=None,
                      help="probe-field coupling (default 0.01)")
    cell.add_argument("--n-modes", type=int, default=None, metavar="N",
                      help="field modes per cavity (default 20)")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--grid-a0", type=_parse_grid, default=None,
                      metavar="MIN:MAX:COUNT",
                      help="log-spaced acceleration axis (default 1e-2:1e2:40)")
    grid.add_argument("--grid-omega0", type=_parse_grid, default=None,
                      metavar="MIN:MAX:COUNT",
                      help="log-spaced probe-gap axis (default pi/32:4pi:40)")

    parser = argparse.ArgumentParser(
        prog="cavitherm",
        description="Asymptotic temperature of an accelerated probe "
                    "crossing cavity vacua")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("point", parents=[common, cell],
                        help="single (a0, omega0) evaluation")
    p.add_argument("--a0", type=float, default=None, help="proper acceleration")
    p.add_argument("--omega0", type=float, default=None, help="probe gap")

    subs.add_parser("sweep", parents=[common, cell, grid],
                    help="full (a0, omega0) grid")
    subs.add_parser("slope", parents=[common, cell, grid],
                    help="grid plus dT0/da0 column and diagnostic curves")

    m = subs.add_parser("modes", parents=[common, cell, grid],
                        help="mode-count convergence along an a0 range")
    m.add_argument("--omega0", type=float, default=None, help="probe gap")
    m.add_argument("--mode-list", type=_parse_mode_list, default=None,
                   metavar="N1,N2,...", help="ascending mode counts to compare")

    u = subs.add_parser("units", parents=[common],
                        help="dimensionless parameters in SI units")
    u.add_argument("--length", type=float, default=None, metavar="METERS",
                   help="cavity length in meters")
    u.add_argument("--a0", type=float, default=None, help="proper acceleration")
    u.add_argument("--omega0", type=float, default=None, help="probe gap")
    u.add_argument("--t0", type=float, default=None, help="dimensionless temperature")

    subs.add_parser("verify", parents=[common],
                    help="cross-check the pipeline against independent "
                         "reference routes and print a pass/fail table")
    return parser


def _load_config(path) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise SystemExit(f"config file {path} must hold a JSON object")
    return doc


def _setting(args, config: dict, name: str, default=None):
    """Flag if given, else config-file value, else default."""
    value = getattr(args, name, None)
    if value is not None and value is not False:
        return value
    if name in config:
        return config[name]
    return default


def _integrator(config: dict) -> IntegratorConfig:
    return IntegratorConfig(**config.get("integrator", {}))


def _grid_axis(args, config: dict, name: str, fallback) -> np.ndarray:
    value = _setting(args, config, name)
    if value is None:
        return fallback
    if isinstance(value, str):
        return _parse_grid(value)
    return np.asarray(value, dtype=float)


def _emit(text: str, out_path) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)


def _sweep_grid(args, config: dict) -> sw.SweepGrid:
    return sw.SweepGrid(
        a0_values=_grid_axis(args, config, "grid_a0", np.geomspace(1e-2, 1e2, 40)),
        omega0_values=_grid_axis(args, config, "grid_omega0",
                                 np.geomspace(np.pi / 32.0, 4.0 * np.pi, 40)),
        lambda0=float(_setting(args, config, "lambda0", 0.01)),
        n_modes=int(_setting(args, config, "n_modes", 20)),
        integrator=_integrator(config))


def _render(rows, fmt: str, metadata: dict | None = None) -> str:
    if fmt == "json":
        return sw.render_json(rows, metadata=metadata)
    return sw.render_csv(rows)


def _cmd_point(args, config: dict) -> int:
    a0 = _setting(args, config, "a0")
    omega0 = _setting(args, config, "omega0")
    if a0 is None or omega0 is None:
        raise SystemExit("point needs --a0 and --omega0 (flag or config)")
    cell = CellConfig(a0=float(a0), omega0=float(omega0),
                      lambda0=float(_setting(args, config, "lambda0", 0.01)),
                      n_modes=int(_setting(args, config, "n_modes", 20)),
                      integrator=_integrator(config))
    result = sw.run_point(cell)
    rows = sw.result_rows([result])
    fmt = _setting(args, config, "format", "csv")
    _emit(_render(rows, fmt), _setting(args, config, "out"))
    if result.error_code:
        print(f"point failed: {result.error_code}", file=sys.stderr)
        return 1
    return 0


def _cmd_sweep(args, config: dict, with_slope: bool) -> int:
    grid = _sweep_grid(args, config)
    workers = int(_setting(args, config, "workers", 1))
    results = sw.run_sweep(grid, workers=workers)
    metadata = {"a0_count": len(grid.a0_values),
                "omega0_count": len(grid.omega0_values),
                "lambda0": grid.lambda0, "n_modes": grid.n_modes}
    if with_slope:
        table = sw.temperature_slope(grid, results=results)
        rows = sw.result_rows(results, grid=grid, slope_table=table)
        metadata["diagnostics"] = {
            "phase_boundaries": {str(n): c.tolist() for n, c in
                                 table.diagnostics["phase_boundaries"].items()},
            "crossing_ratios": {str(m): float(a) for m, a in
                                table.diagnostics["crossing_ratios"].items()},
            "mode_sweeps": {str(r): c.tolist() for r, c in
                            table.diagnostics["mode_sweeps"].items()},
        }
    else:
        rows = sw.result_rows(results)
    fmt = _setting(args, config, "format", "csv")
    _emit(_render(rows, fmt, metadata=metadata), _setting(args, config, "out"))
    failed = sum(1 for r in results if r.error_code)
    if failed:
        print(f"{failed} of {len(results)} grid points failed; "
              "see the error_code column", file=sys.stderr)
    return 0


def _cmd_modes(args, config: dict) -> int:
    omega0 = _setting(args, config, "omega0")
    if omega0 is None:
        raise SystemExit("modes needs --omega0 (flag or config)")
    a0_values = _grid_axis(args, config, "grid_a0", np.geomspace(1.0, 10.0, 15))
    n_list = _setting(args, config, "mode_list", DEFAULT_MODE_LIST)
    if isinstance(n_list, str):
        n_list = _parse_mode_list(n_list)
    study = sw.mode_convergence(
        a0_values, float(omega0),
        lambda0=float(_setting(args, config, "lambda0", 0.01)),
        n_list=tuple(int(n) for n in n_list),
        workers=int(_setting(args, config, "workers", 1)),
        integrator=_integrator(config))
    fmt = _setting(args, config, "format", "csv")
    if fmt == "json":
        doc = {"schema": MODES_HEADER.lstrip("# "),
               "omega0": float(omega0),
               "tolerance": study.tolerance,
               "a0_values": study.a0_values.tolist(),
               "n_list": list(study.n_list),
               "t0": study.t0.tolist(),
               "dt0_da0": study.dt0_da0.tolist(),
               "agreement_limit": [None if np.isnan(v) else float(v)
                                   for v in study.agreement_limit]}
        text = json.dumps(doc, indent=1) + "\n"
    else:
        lines = [MODES_HEADER, "n_modes,a0,T0,dT0_da0,agreement_a0"]
        for k, n in enumerate(study.n_list):
            limit = study.agreement_limit[k]
            limit_txt = "" if np.isnan(limit) else f"{limit:.17g}"
            for i, a0 in enumerate(study.a0_values):
                lines.append(f"{n},{a0:.17g},{study.t0[k, i]:.17g},"
                             f"{study.dt0_da0[k, i]:.17g},{limit_txt}")
        text = "\n".join(lines) + "\n"
    _emit(text, _setting(args, config, "out"))
    return 0


def _cmd_units(args, config: dict) -> int:
    length = _setting(args, config, "length")
    if length is None:
        raise SystemExit("units needs --length in meters (flag or config)")
    conv = sw.physical_units(float(length),
                             a0=_setting(args, config, "a0"),
                             omega0=_setting(args, config, "omega0"),
                             t0=_setting(args, config, "t0"))
    fmt = _setting(args, config, "format", "csv")
    if fmt == "json":
        doc = {k: v for k, v in vars(conv).items() if v is not None}
        text = json.dumps(doc, indent=1) + "\n"
    else:
        lines = [f"cavity length: {conv.cavity_length_m:g} m"]
        if conv.a0 is not None:
            lines.append(f"a0 = {conv.a0:g}  ->  a = {conv.acceleration_si:.6g} m/s^2"
                         f" = {conv.acceleration_g:.6g} g")
        if conv.omega0 is not None:
            lines.append(f"omega0 = {conv.omega0:g}  ->  Omega = "
                         f"{conv.gap_rad_s:.6g} rad/s = {conv.gap_hz:.6g} Hz")
        if conv.t0 is not None:
            lines.append(f"T0 = {conv.t0:g}  ->  T = {conv.temperature_k:.6g} K")
        text = "\n".join(lines) + "\n"
    _emit(text, _setting(args, config, "out"))
    return 0


def _channel_deviation(reference, channel) -> float:
    return max(float(np.max(np.abs(reference.t_matrix - channel.t_matrix))),
               float(np.max(np.abs(reference.r_matrix - channel.r_matrix))))


def _cmd_verify(args, config: dict) -> int:
    """Every independent reference route against the symplectic pipeline."""
    tight = IntegratorConfig(richardson_tol=1e-13, max_doublings=14)
    checks = []

    base = CellConfig(a0=1.0, omega0=np.pi / 16.0, lambda0=1e-3, n_modes=5,
                      integrator=tight)
    for cavity in (1, 2):
        exact = reduce_channel(integrate_cavity(cavity, base))
        pert = dyson_channel(cavity, base)
        norm = _channel_deviation(exact, pert) / base.lambda0 ** 2
        checks.append((f"second-order residual, cavity {cavity}", norm <= 1e-4,
                       f"|T,R dev|/lambda0^2 = {norm:.2e} (limit 1e-04)"))

    # residual halving ladder sits above the quadrature noise floor
    residuals = []
    for lam in (4e-3, 8e-3, 1.6e-2):
        cfg = CellConfig(a0=1.0, omega0=np.pi / 16.0, lambda0=lam, n_modes=5,
                         integrator=tight)
        residuals.append(_channel_deviation(
            reduce_channel(integrate_cavity(1, cfg)), dyson_channel(1, cfg)))
    ratios = (residuals[1] / residuals[0], residuals[2] / residuals[1])
    checks.append(("residual scaling with coupling",
                   all(13.0 < q < 19.0 for q in ratios),
                   f"doubling ratios {ratios[0]:.1f}, {ratios[1]:.1f} "
                   "(fourth power: ~16)"))

    for a0, om in ((0.5, np.pi / 16), (1.0, np.pi / 16), (2.0, np.pi / 16),
                   (1.0, np.pi / 8), (2.0, np.pi / 8)):
        cfg = CellConfig(a0=a0, omega0=om, lambda0=0.05, n_modes=2,
                         integrator=tight)
        gaussian = apply_channel(reduce_channel(integrate_cavity(1, cfg)),
                                 np.eye(2))
        fock = fock_vacuum_response(1, cfg, cutoff=8)
        dev = float(np.max(np.abs(fock - gaussian)))
        checks.append((f"number-basis check a0={a0:g} omega0={om:.4g}",
                       dev <= 1e-3, f"max entry dev {dev:.2e} (limit 1e-03)"))

    width = max(len(name) for name, _, _ in checks)
    lines = ["reference-route verification"]
    for name, ok, detail in checks:
        lines.append(f"  {'pass' if ok else 'FAIL'}  {name:<{width}}  {detail}")
    failed = sum(1 for _, ok, _ in checks if not ok)
    lines.append(f"{len(checks) - failed} of {len(checks)} checks passed")
    _emit("\n".join(lines) + "\n", _setting(args, config, "out"))
    return 1 if failed else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = _load_config(args.config)
    try:
        if args.command == "point":
            return _cmd_point(args, config)
        if args.command == "sweep":
            return _cmd_sweep(args, config, with_slope=False)
        if args.command == "slope":
            return _cmd_sweep(args, config, with_slope=True)
        if args.command == "modes":
            return _cmd_modes(args, config)
        if args.command == "verify":
            return _cmd_verify(args, config)
        return _cmd_units(args, config)
    except CavithermError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
