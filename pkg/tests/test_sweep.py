"""Grid evaluation, slope maps, persistence schema, and unit conversion."""

import json
import math

import numpy as np
import pytest

from cavitherm import (
    CellConfig,
    IntegratorConfig,
    PointResult,
    SweepGrid,
    mode_convergence,
    physical_units,
    result_rows,
    run_point,
    run_sweep,
    temperature_slope,
    write_csv,
    write_json,
)
from cavitherm.sweep import CSV_COLUMNS, SCHEMA_HEADER, render_csv

FAST = IntegratorConfig(initial_steps=64, richardson_tol=1e-9, max_doublings=10)


def _fake_result(a0: float, omega0: float, t0) -> PointResult:
    # synthetic grid node for slope differencing tests
    return PointResult(a0=a0, omega0=omega0, lambda0=0.01, n_modes=4,
                       nu=None, r=None, theta=None, t0=t0, thermality=None,
                       theta_phase=0.0, m_ratio=1.0, r_sweep=0.0,
                       spectral_gap=None, sigma_infinity=None,
                       symplectic_deviation=None,
                       error_code="" if t0 is not None else "NoUniqueFixedPoint")


def _fake_grid(a0_values, omega0=0.5) -> SweepGrid:
    return SweepGrid(a0_values=np.asarray(a0_values, dtype=float),
                     omega0_values=np.array([omega0]), n_modes=4)


def test_grid_validation():
    with pytest.raises(ValueError):
        SweepGrid(a0_values=np.array([1.0]), omega0_values=np.array([1.0]))
    with pytest.raises(ValueError):
        SweepGrid(a0_values=np.array([2.0, 1.0]), omega0_values=np.array([1.0]))
    with pytest.raises(ValueError):
        SweepGrid(a0_values=np.array([0.0, 1.0]), omega0_values=np.array([1.0]))
    with pytest.raises(ValueError):
        SweepGrid(a0_values=np.array([1.0, 2.0]), omega0_values=np.array([-1.0]))
    grid = SweepGrid.default()
    assert len(grid.a0_values) == 40 and len(grid.omega0_values) == 40
    assert grid.a0_values[0] == pytest.approx(1e-2)
    assert grid.omega0_values[-1] == pytest.approx(4.0 * np.pi)


def test_run_point_benchmark_value():
    config = CellConfig(a0=1.0, omega0=np.pi / 16, lambda0=0.01, n_modes=20)
    res = run_point(config)
    assert res.error_code == ""
    # pinned regression value, cross-checked by two independent oracles
    assert res.t0 == pytest.approx(0.8103259271, rel=1e-8)
    assert res.nu is not None and res.nu > 1.0
    assert res.r is not None and res.r < 1e-3
    assert res.symplectic_deviation < 1e-9
    assert 0.0 < res.spectral_gap < 1.0
    assert res.theta_phase == pytest.approx(np.pi / 16 * math.log1p(
        1.0 + math.sqrt(3.0)))


def test_run_point_records_failure():
    config = CellConfig(a0=1.0, omega0=0.5, lambda0=0.0, n_modes=4)
    res = run_point(config)
    assert res.error_code == "NoUniqueFixedPoint"
    assert res.t0 is None and res.nu is None and res.sigma_infinity is None
    # kinematic diagnostics survive the failure
    assert res.theta_phase > 0.0 and res.m_ratio > 1.0
    # so do the stages completed before it: the cell integrated fine
    assert res.symplectic_deviation is not None
    assert res.symplectic_deviation < 1e-9
    assert res.spectral_gap == pytest.approx(0.0, abs=1e-12)


def test_run_sweep_deterministic_across_workers():
    grid = SweepGrid(a0_values=np.geomspace(1.0, 3.0, 3),
                     omega0_values=np.array([0.4, 0.8]),
                     n_modes=4, integrator=FAST)
    serial = run_sweep(grid, workers=1)
    parallel = run_sweep(grid, workers=2)
    rows_serial = result_rows(serial)
    rows_parallel = result_rows(parallel)
    assert render_csv(rows_serial) == render_csv(rows_parallel)
    # row-major (a0, omega0) order
    assert [r.a0 for r in serial] == pytest.approx(
        np.repeat(grid.a0_values, 2))
    assert [r.omega0 for r in serial] == pytest.approx(
        np.tile(grid.omega0_values, 3))


def test_slope_constant_temperature_is_zero():
    a0 = np.geomspace(1.0, 10.0, 6)
    grid = _fake_grid(a0)
    results = [_fake_result(a, 0.5, 2.5) for a in a0]
    table = temperature_slope(grid, results=results)
    assert np.allclose(table.dt0_da0[0], 0.0, atol=1e-14)


def test_slope_exact_for_log_profile():
    # T0 = ln a0 has dT0/da0 = 1/a0; central differences in ln a0 on a
    # log-spaced grid reproduce it exactly (one-sided ends too)
    a0 = np.geomspace(0.5, 8.0, 9)
    grid = _fake_grid(a0)
    results = [_fake_result(a, 0.5, math.log(a)) for a in a0]
    table = temperature_slope(grid, results=results)
    assert table.dt0_da0[0] == pytest.approx(1.0 / a0, rel=1e-12)


def test_slope_skips_failed_neighbors():
    a0 = np.geomspace(1.0, 16.0, 5)
    t0 = [1.0, 2.0, None, 3.0, 4.0]
    results = [_fake_result(a, 0.5, t) for a, t in zip(a0, t0)]
    table = temperature_slope(_fake_grid(a0), results=results)
    slopes = table.dt0_da0[0]
    assert np.isnan(slopes[2])          # failed node itself
    assert np.isnan(slopes[1]) and np.isnan(slopes[3])  # missing neighbor
    assert np.isfinite(slopes[0]) and np.isfinite(slopes[4])


def test_slope_requires_three_nodes():
    grid = SweepGrid(a0_values=np.array([1.0, 2.0]),
                     omega0_values=np.array([0.5]), n_modes=4)
    with pytest.raises(ValueError):
        temperature_slope(grid, results=[])


def test_slope_diagnostic_curves():
    a0 = np.geomspace(1.0, 10.0, 4)
    table = temperature_slope(_fake_grid(a0),
                              results=[_fake_result(a, 0.5, 1.0) for a in a0])
    diag = table.diagnostics
    # phase boundary: omega0 where the per-cavity phase reaches n pi/2
    from cavitherm import cell_kinematics
    tau_max = cell_kinematics(1.0).tau_max
    assert diag["phase_boundaries"][1][0] == pytest.approx(np.pi / 2 / tau_max)
    assert diag["phase_boundaries"][3][0] == pytest.approx(
        3.0 * diag["phase_boundaries"][1][0])
    # crossing-ratio lines: a0 = 2/(M^2 - 1)
    assert diag["crossing_ratios"][3] == pytest.approx(0.25)
    assert diag["crossing_ratios"][5] == pytest.approx(2.0 / 24.0)
    # mode-sweep curves: omega0 = R pi / a0
    assert diag["mode_sweeps"][2][0] == pytest.approx(2.0 * np.pi)


def test_mode_convergence_self_agreement():
    a0 = np.geomspace(1.0, 3.0, 3)
    study = mode_convergence(a0, omega0=np.pi / 16, lambda0=0.01,
                             n_list=(4, 6), integrator=FAST)
    assert study.t0.shape == (2, 3)
    # the reference count always tracks itself over the whole range
    assert study.agreement_limit[-1] == pytest.approx(a0[-1])
    with pytest.raises(ValueError):
        mode_convergence(a0, omega0=0.5, n_list=(8, 4))
    with pytest.raises(ValueError):
        mode_convergence(a0, omega0=0.5, n_list=(8,))


def test_physical_units_exact():
    c = 299792458.0
    conv = physical_units(1.0, a0=0.25, omega0=np.pi, t0=1.0)
    assert conv.acceleration_si == pytest.approx(0.25 * c * c)
    assert conv.acceleration_g == pytest.approx(0.25 * c * c / 9.80665)
    assert conv.gap_rad_s == pytest.approx(np.pi * c)
    assert conv.gap_hz == pytest.approx(0.5 * c)
    assert conv.temperature_k == pytest.approx(
        1.054571817e-34 * c / 1.380649e-23)
    # scaling with cavity size
    km4 = physical_units(4000.0, a0=0.25)
    assert km4.acceleration_g == pytest.approx(conv.acceleration_g / 4000.0)
    with pytest.raises(ValueError):
        physical_units(0.0, a0=1.0)
    with pytest.raises(ValueError):
        physical_units(1.0, a0=-0.1)


def test_csv_schema_golden(tmp_path):
    a0 = np.geomspace(1.0, 2.0, 3)
    grid = _fake_grid(a0)
    results = [_fake_result(a, 0.5, float(i)) for i, a in enumerate(a0)]
    results[1] = _fake_result(a0[1], 0.5, None)
    table = temperature_slope(grid, results=results)
    rows = result_rows(results, grid=grid, slope_table=table)
    path = tmp_path / "out.csv"
    write_csv(path, rows)
    lines = path.read_text().splitlines()
    assert lines[0] == SCHEMA_HEADER
    assert lines[1] == ",".join(CSV_COLUMNS)
    assert len(lines) == 2 + 3
    failed = lines[3].split(",")
    assert failed[CSV_COLUMNS.index("T0")] == ""
    assert failed[CSV_COLUMNS.index("error_code")] == "NoUniqueFixedPoint"
    # 17 significant digits round-trip exactly
    good = lines[2].split(",")
    assert float(good[CSV_COLUMNS.index("a0")]) == a0[0]


def test_json_document(tmp_path):
    a0 = np.geomspace(1.0, 2.0, 3)
    results = [_fake_result(a, 0.5, 1.0) for a in a0]
    path = tmp_path / "out.json"
    write_json(path, result_rows(results), metadata={"note": "test"})
    doc = json.loads(path.read_text())
    assert doc["schema"] == "cavitherm-schema 1"
    assert doc["metadata"] == {"note": "test"}
    assert len(doc["rows"]) == 3
    assert doc["rows"][0]["a0"] == "1"
