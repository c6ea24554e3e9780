"""Gaussian simulation of an accelerated harmonic probe crossing cavities.

A harmonic-oscillator probe accelerates and decelerates through a
periodic array of Dirichlet cavities, coupling to each cavity's field
vacuum.  Every cell acts on the probe as a Gaussian channel; iterating
it drives the probe to an asymptotic state whose temperature and
residual non-thermality this package computes non-perturbatively.
"""

from .cell import (
    CellBuild,
    CellConfig,
    CellKinematics,
    IntegratorConfig,
    build_cell,
    cell_channel,
    cell_kinematics,
    integrate_cavity,
    interaction_generator,
    mode_coupling,
    trajectory,
)
from .channels import (
    GaussianChannel,
    IcmGenerator,
    affine_cell_matrix,
    apply_channel,
    compose_channels,
    convergence_spectrum,
    fixed_point,
    fixed_point_from_spectrum,
    icm_evolve,
    icm_generator,
    reduce_channel,
    rotation_channel,
)
from .oracles import (
    dyson_cell_channel,
    dyson_channel,
    fock_vacuum_response,
)
from .sweep import (
    ModeConvergence,
    PointResult,
    SlopeTable,
    SweepGrid,
    UnitConversion,
    mode_convergence,
    physical_units,
    result_rows,
    run_point,
    run_sweep,
    temperature_slope,
    write_csv,
    write_json,
)
from .phase_space import (
    covariance_deviation,
    devectorize,
    real_matrix_log,
    rotation_matrix,
    symplectic_deviation,
    symplectic_form,
    vectorize,
)
from .thermometry import (
    StandardForm,
    ThermalityReport,
    edr_temperature,
    edr_temperature_spread,
    fock_populations,
    reconstruct,
    squeezing_energy_ratio,
    standard_form,
    temperature,
    thermality_report,
)
from . import errors

__version__ = "0.1.0"
