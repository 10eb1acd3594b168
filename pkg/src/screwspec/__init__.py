"""Bound states of a quantum particle around a screw dislocation.

Series quantisation of the radial problem (with an Aharonov-Bohm flux
line, frame rotation, and either a harmonic trap or a bare inverse-square
potential), closed-form audits, and an independent finite-difference
oracle.  See the README for the command-line interface.
"""

from .operators import Probe, gaussian_probe, radial_lhs, transformed_lhs
from .oracle import (
    GridMode,
    GridSpec,
    OracleAccuracyError,
    OracleReport,
    OracleResult,
    effective_potential,
    flat_exact_spectrum,
    oracle_csv,
    oracle_eigenvalues,
    oracle_vs_closed_form_report,
    separation_residual,
)
from .params import (
    DerivedParams,
    InvalidParameterError,
    Model,
    NegativeFluxWarning,
    PhysicalParams,
    SpectralParameter,
    derive_params,
    energy_to_spectral,
    spectral_to_energy,
)
from .series import (
    ConvergenceWarning,
    RecurrenceTriple,
    ResidualReport,
    SeriesOverflowError,
    SeriesSolution,
    changeofvar_consistency,
    coefficients_csv,
    eval_psi_x,
    eval_psi_x_derivatives,
    recurrence_triple,
    series_coefficients,
    series_residual,
)
from .spectrum import (
    Branch,
    ClosedFormComparison,
    EnergyLevel,
    LambdaPolynomialTable,
    NegativeDiscriminantError,
    PeriodicityCheck,
    WavefunctionAudit,
    ab_periodicity_check,
    compare_closed_form_vs_truncation,
    ground_state_closed_form,
    ground_state_wavefunction,
    lambda_polynomials,
    level_series,
    levels_to_json,
    truncation_solve,
)
from .sweep import SweepRow, SweepSpec, rows_to_csv, rows_to_json, sweep_rows, sweep_values
from .verify import DEFAULT_SEED, CheckResult, VerifyReport, run_verification

__version__ = "0.1.0"

__all__ = [
    "Model",
    "PhysicalParams",
    "DerivedParams",
    "SpectralParameter",
    "InvalidParameterError",
    "NegativeFluxWarning",
    "derive_params",
    "spectral_to_energy",
    "energy_to_spectral",
    "Probe",
    "gaussian_probe",
    "radial_lhs",
    "transformed_lhs",
    "RecurrenceTriple",
    "SeriesSolution",
    "ResidualReport",
    "SeriesOverflowError",
    "ConvergenceWarning",
    "recurrence_triple",
    "series_coefficients",
    "eval_psi_x",
    "eval_psi_x_derivatives",
    "series_residual",
    "changeofvar_consistency",
    "coefficients_csv",
    "Branch",
    "EnergyLevel",
    "LambdaPolynomialTable",
    "NegativeDiscriminantError",
    "WavefunctionAudit",
    "ClosedFormComparison",
    "PeriodicityCheck",
    "lambda_polynomials",
    "truncation_solve",
    "ground_state_closed_form",
    "ground_state_wavefunction",
    "level_series",
    "compare_closed_form_vs_truncation",
    "ab_periodicity_check",
    "levels_to_json",
    "GridMode",
    "GridSpec",
    "OracleResult",
    "OracleReport",
    "OracleAccuracyError",
    "effective_potential",
    "oracle_eigenvalues",
    "flat_exact_spectrum",
    "separation_residual",
    "oracle_vs_closed_form_report",
    "oracle_csv",
    "SweepSpec",
    "SweepRow",
    "sweep_values",
    "sweep_rows",
    "rows_to_csv",
    "rows_to_json",
    "DEFAULT_SEED",
    "CheckResult",
    "VerifyReport",
    "run_verification",
    "__version__",
]
