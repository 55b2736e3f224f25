"""Exact counting and high-precision asymptotics for magic series.

A magic series is an N-element subset of {1..N^alpha} whose sum (and,
for bimagic/trimagic series, higher weighted sums) equals the magic
target.  This package counts them exactly at desk scale, computes the
correction coefficients of their asymptotic expansion as exact
rationals, evaluates the corrected estimates at arbitrary precision,
and builds estimate-vs-exact comparison reports.
"""
from .problem import (Feasibility, ProblemSpec, SamplingModel, TargetVector,
                      check_feasibility, make_problem, sampling_model,
                      target_moments)
from .counting import (CountQuery, PrecisionLossError, ResourceLimitError,
                       count_dft, count_dp, count_exhaustive, count_series,
                       sum_distribution)
from .series import (BetaPoly, CovMatrix, PropagatorMatrix, Rational,
                     SymTensor, covariance_exact_2d, covariance_leading,
                     covariance_raw, propagator, rescaled_vertex_correction,
                     vertex_correction, vertex_tensor)
from .diagrams import (CorrectionCoefficients, DiagramTerm, compute_K1,
                       compute_K2, compute_K3, contract, contract_by_topology,
                       contract_pairing, correction_coefficients,
                       correction_polynomial, generate_terms, pairings,
                       wick_moment)
from .estimates import (AsymptoticFormula, FeasibilityWarning, LeadingConstant,
                        SciNumber, bottomley, canonical_formula,
                        compose_series, corrected_estimate, gaussian_series,
                        gaussian_central_probability, prefactor_exact,
                        prefactor_series)
from .report import (Fixture, ReportRow, build_report, default_fixtures,
                     load_fixtures, rows_to_csv, rows_to_json,
                     rows_to_markdown)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
