"""Parameter sweeps over acceleration and probe gap, with persistence.

A sweep evaluates the asymptotic probe state on an (a0, omega0) grid,
one cell build and fixed point per grid node.  Failed nodes are recorded
with the failure class name instead of aborting the run, temperature
slopes are differenced along the log-spaced a0 axis per omega0 row, and
results serialize to a frozen CSV schema or JSON.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cell import CellConfig, IntegratorConfig, build_cell, cell_kinematics
from .channels import fixed_point, linear_spectral_radius
from .errors import CavithermError
from .thermometry import ThermalityReport, standard_form, thermality_report

__all__ = [
    "CSV_COLUMNS",
    "SCHEMA_HEADER",
    "PointResult",
    "SweepGrid",
    "SlopeTable",
    "ModeConvergence",
    "UnitConversion",
    "run_point",
    "run_sweep",
    "temperature_slope",
    "mode_convergence",
    "physical_units",
    "result_rows",
    "render_csv",
    "render_json",
    "write_csv",
    "write_json",
]

# Frozen output schema; the header comment names the version so golden
# files can detect drift textually.
CSV_COLUMNS = (
    "a0", "omega0", "lambda0", "n_modes", "nu", "r", "theta", "T0",
    "dT0_da0", "delta", "epsilon", "p0", "p1", "p2", "t_edr_01",
    "t_edr_02", "t_edr_12", "theta_phase", "m_ratio", "r_sweep",
    "spectral_gap", "error_code",
)
SCHEMA_HEADER = "# cavitherm-schema 1"

SPEED_OF_LIGHT = 299792458.0          # m/s, exact
STANDARD_GRAVITY = 9.80665            # m/s^2
HBAR = 1.054571817e-34                # J s
BOLTZMANN = 1.380649e-23              # J/K


@dataclass(frozen=True)
class PointResult:
    """Asymptotic-state summary at one (a0, omega0) grid node.

    Numeric fields are None when the node failed; error_code then holds
    the exception class name and the kinematic diagnostics stay filled.
    """

    a0: float
    omega0: float
    lambda0: float
    n_modes: int
    nu: float | None
    r: float | None
    theta: float | None
    t0: float | None
    thermality: ThermalityReport | None
    theta_phase: float
    m_ratio: float
    r_sweep: float
    spectral_gap: float | None
    sigma_infinity: np.ndarray | None
    symplectic_deviation: float | None
    error_code: str = ""


@dataclass(frozen=True)
class SweepGrid:
    """Grid of accelerations and probe gaps to evaluate.

    Axis values must be sorted ascending and strictly positive; the a0
    axis needs at least two nodes so temperature differences exist.
    """

    a0_values: np.ndarray
    omega0_values: np.ndarray
    lambda0: float = 0.01
    n_modes: int = 20
    integrator: IntegratorConfig = field(default=IntegratorConfig())
    output_path: str | None = None

    def __post_init__(self):
        a0 = np.atleast_1d(np.asarray(self.a0_values, dtype=float))
        om = np.atleast_1d(np.asarray(self.omega0_values, dtype=float))
        for name, axis, least in (("a0_values", a0, 2), ("omega0_values", om, 1)):
            if axis.ndim != 1 or len(axis) < least:
                raise ValueError(f"{name} must be 1-D with at least {least} entries")
            if not np.all(np.isfinite(axis)) or np.any(axis <= 0.0):
                raise ValueError(f"{name} must be strictly positive and finite")
            if np.any(np.diff(axis) <= 0.0):
                raise ValueError(f"{name} must be sorted strictly ascending")
        object.__setattr__(self, "a0_values", a0)
        object.__setattr__(self, "omega0_values", om)

    @classmethod
    def default(cls, **overrides):
        """Default map: 40x40 log-spaced, a0 in [1e-2, 1e2], omega0 in [pi/32, 4 pi]."""
        kw = dict(a0_values=np.geomspace(1e-2, 1e2, 40),
                  omega0_values=np.geomspace(np.pi / 32.0, 4.0 * np.pi, 40))
        kw.update(overrides)
        return cls(**kw)

    def configs(self):
        """Cell configs in deterministic row-major (a0, omega0) order."""
        return [CellConfig(a0=float(a0), omega0=float(om), lambda0=self.lambda0,
                           n_modes=self.n_modes, integrator=self.integrator)
                for a0 in self.a0_values for om in self.omega0_values]


def run_point(config: CellConfig) -> PointResult:
    """Build one cell, solve its fixed point, and summarize the state.

    Failures that are part of the physics/numerics contract (no unique
    fixed point, log branch, integrator budget, ...) are captured in
    error_code so sweeps continue past bad nodes.  Everything computed
    before the failing stage is kept: a node whose thermality measures
    diverge still records its integration and fixed-point quality.
    """
    kin = cell_kinematics(config.a0)
    base = dict(a0=config.a0, omega0=config.omega0, lambda0=config.lambda0,
                n_modes=config.n_modes, theta_phase=kin.probe_phase(config.omega0),
                m_ratio=kin.m_ratio, r_sweep=kin.mode_sweep(config.omega0))
    nu = r = theta = t0 = report = gap = sigma = deviation = None
    error = ""
    try:
        build = build_cell(config)
        deviation = build.symplectic_deviation
        gap = 1.0 - linear_spectral_radius(build.channel)
        sigma = fixed_point(build.channel)
        form = standard_form(sigma)
        nu, r, theta = form.nu, form.r, form.theta
        report = thermality_report(form, config.omega0)
        t0 = report.t0
    except CavithermError as exc:
        error = type(exc).__name__
    return PointResult(nu=nu, r=r, theta=theta, t0=t0, thermality=report,
                       spectral_gap=gap, sigma_infinity=sigma,
                       symplectic_deviation=deviation, error_code=error, **base)


def run_sweep(grid: SweepGrid, workers: int = 1) -> list[PointResult]:
    """Evaluate every grid node; deterministic (a0, omega0) row-major order.

    Nodes are independent, so the result is bit-identical for any worker
    count; workers > 1 dispatches to a process pool.
    """
    configs = grid.configs()
    if workers <= 1:
        return [run_point(c) for c in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_point, configs, chunksize=8))


def _slope_row(a0_values, t0_row):
    """Temperature derivative along one omega0 row of the grid.

    Central differences in ln a0 with the chain rule (the grids are
    log-spaced), one-sided at the ends; entries next to failed nodes are
    None.
    """
    n = len(a0_values)
    ln_a = np.log(a0_values)
    out: list[float | None] = [None] * n
    for i in range(n):
        if t0_row[i] is None:
            continue
        if 0 < i < n - 1 and t0_row[i - 1] is not None and t0_row[i + 1] is not None:
            dlna = ln_a[i + 1] - ln_a[i - 1]
            out[i] = (t0_row[i + 1] - t0_row[i - 1]) / dlna / a0_values[i]
        elif i == 0 and n > 1 and t0_row[1] is not None:
            out[i] = (t0_row[1] - t0_row[0]) / (ln_a[1] - ln_a[0]) / a0_values[0]
        elif i == n - 1 and t0_row[i - 1] is not None:
            out[i] = (t0_row[i] - t0_row[i - 1]) / (ln_a[i] - ln_a[i - 1]) / a0_values[i]
    return out


@dataclass(frozen=True)
class SlopeTable:
    """dT0/da0 over the grid plus the diagnostic curves of the map.

    Arrays are indexed [omega0 index, a0 index]; NaN marks nodes where
    the temperature or a differencing neighbor is unavailable.
    diagnostics holds the overlay curves: 'phase_boundaries' maps the
    half-turn count n to the omega0(a0) curve where the per-cavity probe
    phase is n pi/2; 'crossing_ratios' maps M = 3, 4, ... to the constant
    a0 = 2/(M^2 - 1) line; 'mode_sweeps' maps R = 1, 2, 3 to the
    omega0(a0) curve where the Doppler sweep covers R mode spacings.
    """

    a0_values: np.ndarray
    omega0_values: np.ndarray
    t0: np.ndarray
    dt0_da0: np.ndarray
    diagnostics: dict


def temperature_slope(grid: SweepGrid, results: list[PointResult] | None = None,
                      workers: int = 1, phase_harmonics: int = 8,
                      crossing_max: int = 8) -> SlopeTable:
    """Temperature and its a0 derivative per omega0 row, with overlays."""
    if len(grid.a0_values) < 3:
        raise ValueError("slope computation needs at least 3 a0 nodes")
    if results is None:
        results = run_sweep(grid, workers=workers)
    n_a, n_om = len(grid.a0_values), len(grid.omega0_values)
    t0 = np.full((n_om, n_a), np.nan)
    for k, res in enumerate(results):
        i, j = divmod(k, n_om)
        if res.t0 is not None:
            t0[j, i] = res.t0
    slopes = np.full_like(t0, np.nan)
    for j in range(n_om):
        row = [None if math.isnan(v) else float(v) for v in t0[j]]
        slopes[j] = [np.nan if s is None else s for s in _slope_row(grid.a0_values, row)]

    tau_max = np.array([cell_kinematics(float(a)).tau_max for a in grid.a0_values])
    diagnostics = {
        "phase_boundaries": {n: n * np.pi / 2.0 / tau_max
                             for n in range(1, phase_harmonics + 1)},
        "crossing_ratios": {m: 2.0 / (m * m - 1.0) for m in range(3, crossing_max + 1)},
        "mode_sweeps": {r: r * np.pi / grid.a0_values for r in (1, 2, 3)},
    }
    return SlopeTable(a0_values=grid.a0_values, omega0_values=grid.omega0_values,
                      t0=t0, dt0_da0=slopes, diagnostics=diagnostics)


@dataclass(frozen=True)
class ModeConvergence:
    """Temperature and slope curves per mode count, against the largest.

    agreement_limit[k] is the largest a0 up to which the k-th mode count
    tracks the reference (last) one within tolerance on T0; NaN when it
    deviates already at the first node.
    """

    a0_values: np.ndarray
    n_list: tuple
    t0: np.ndarray
    dt0_da0: np.ndarray
    agreement_limit: np.ndarray
    tolerance: float


def mode_convergence(a0_values, omega0: float, lambda0: float = 0.01,
                     n_list=(10, 20, 30, 60, 110, 160, 210), workers: int = 1,
                     tolerance: float = 0.01,
                     integrator: IntegratorConfig = IntegratorConfig()) -> ModeConvergence:
    """Track how many field modes the temperature curve needs vs a0.

    Runs the a0 range once per mode count and reports, for each count,
    the largest a0 below which its T0 curve stays within `tolerance`
    relative deviation of the largest count's curve.
    """
    n_list = tuple(int(n) for n in n_list)
    if len(n_list) < 2 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be ascending with at least two entries")
    curves = []
    slopes = []
    for n in n_list:
        grid = SweepGrid(a0_values=a0_values, omega0_values=np.array([omega0]),
                         lambda0=lambda0, n_modes=n, integrator=integrator)
        table = temperature_slope(grid, workers=workers)
        curves.append(table.t0[0])
        slopes.append(table.dt0_da0[0])
    t0 = np.vstack(curves)
    reference = t0[-1]
    a0_values = np.asarray(a0_values, dtype=float)
    limits = np.empty(len(n_list))
    for k in range(len(n_list)):
        dev = np.abs(t0[k] - reference) > tolerance * np.abs(reference)
        bad = np.flatnonzero(dev | ~np.isfinite(t0[k]) | ~np.isfinite(reference))
        if len(bad) == 0:
            limits[k] = a0_values[-1]
        elif bad[0] == 0:
            limits[k] = np.nan
        else:
            limits[k] = a0_values[bad[0] - 1]
    return ModeConvergence(a0_values=a0_values, n_list=n_list, t0=t0,
                           dt0_da0=np.vstack(slopes), agreement_limit=limits,
                           tolerance=tolerance)


@dataclass(frozen=True)
class UnitConversion:
    """Dimensionless setup parameters restated in SI lab-frame terms."""

    cavity_length_m: float
    a0: float | None = None
    acceleration_si: float | None = None       # m/s^2
    acceleration_g: float | None = None        # multiples of standard gravity
    omega0: float | None = None
    gap_rad_s: float | None = None
    gap_hz: float | None = None
    t0: float | None = None
    temperature_k: float | None = None


def physical_units(cavity_length_m: float, a0: float | None = None,
                   omega0: float | None = None, t0: float | None = None) -> UnitConversion:
    """Convert dimensionless a0 / omega0 / T0 to SI for a given cavity size.

    a = a0 c^2 / L, Omega = omega0 c / L, T = T0 hbar c / (k_B L).
    """
    if not (np.isfinite(cavity_length_m) and cavity_length_m > 0.0):
        raise ValueError(f"cavity length must be positive, got {cavity_length_m}")
    out = dict(cavity_length_m=cavity_length_m)
    if a0 is not None:
        if a0 < 0.0:
            raise ValueError(f"a0 must be nonnegative, got {a0}")
        a_si = a0 * SPEED_OF_LIGHT ** 2 / cavity_length_m
        out.update(a0=a0, acceleration_si=a_si, acceleration_g=a_si / STANDARD_GRAVITY)
    if omega0 is not None:
        if omega0 < 0.0:
            raise ValueError(f"omega0 must be nonnegative, got {omega0}")
        w = omega0 * SPEED_OF_LIGHT / cavity_length_m
        out.update(omega0=omega0, gap_rad_s=w, gap_hz=w / (2.0 * np.pi))
    if t0 is not None:
        if t0 < 0.0:
            raise ValueError(f"t0 must be nonnegative, got {t0}")
        out.update(t0=t0, temperature_k=t0 * HBAR * SPEED_OF_LIGHT
                   / (BOLTZMANN * cavity_length_m))
    return UnitConversion(**out)


def _fmt(value) -> str:
    if value is None:
        return ""
    return f"{value:.17g}"


def result_rows(results: list[PointResult], grid: SweepGrid | None = None,
                slope_table: SlopeTable | None = None) -> list[dict]:
    """Flatten results (plus optional per-node slopes) to CSV-ready dicts."""
    slope_at = {}
    if slope_table is not None and grid is not None:
        n_om = len(grid.omega0_values)
        for k in range(len(results)):
            i, j = divmod(k, n_om)
            s = slope_table.dt0_da0[j, i]
            slope_at[k] = None if math.isnan(s) else float(s)
    rows = []
    for k, res in enumerate(results):
        rep = res.thermality
        rows.append({
            "a0": _fmt(res.a0), "omega0": _fmt(res.omega0),
            "lambda0": _fmt(res.lambda0), "n_modes": str(res.n_modes),
            "nu": _fmt(res.nu), "r": _fmt(res.r), "theta": _fmt(res.theta),
            "T0": _fmt(res.t0), "dT0_da0": _fmt(slope_at.get(k)),
            "delta": _fmt(rep.delta if rep else None),
            "epsilon": _fmt(rep.epsilon if rep else None),
            "p0": _fmt(rep.p0 if rep else None),
            "p1": _fmt(rep.p1 if rep else None),
            "p2": _fmt(rep.p2 if rep else None),
            "t_edr_01": _fmt(rep.t_edr_01 if rep else None),
            "t_edr_02": _fmt(rep.t_edr_02 if rep else None),
            "t_edr_12": _fmt(rep.t_edr_12 if rep else None),
            "theta_phase": _fmt(res.theta_phase), "m_ratio": _fmt(res.m_ratio),
            "r_sweep": _fmt(res.r_sweep), "spectral_gap": _fmt(res.spectral_gap),
            "error_code": res.error_code,
        })
    return rows


def render_csv(rows: list[dict]) -> str:
    """Frozen-schema CSV text with a version header comment."""
    buf = io.StringIO()
    buf.write(SCHEMA_HEADER + "\n")
    writer = csv.DictWriter(buf, fieldnames=list(CSV_COLUMNS), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def render_json(rows: list[dict], metadata: dict | None = None) -> str:
    """Same table as the CSV, as a JSON document with optional metadata."""
    doc = {"schema": SCHEMA_HEADER.lstrip("# "), "metadata": metadata or {},
           "rows": rows}
    return json.dumps(doc, indent=1) + "\n"


def write_csv(path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(render_csv(rows))


def write_json(path, rows: list[dict], metadata: dict | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(render_json(rows, metadata=metadata))
