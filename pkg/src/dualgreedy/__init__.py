"""Greedy data selection for generalized kernel interpolation.

Interpolates a function from samples of linear functionals (point
evaluations, line integrals) in the native space of a positive definite
kernel, choosing which samples to use by greedy rules driven by the
power function and the residual. Includes exact ellipse-phantom line
integrals and an experiment driver for tomography-style reconstruction.
"""

from .functionals import (CSV_HEADER, ParameterMetric, PointEval, RadonLine,
                          line_point, normalize_line_params,
                          read_functionals_csv, write_functionals_csv)
from .greedy import (BetaRule, GeometricRule, GreedyTrace, RandomRule,
                     beta_indicator, parse_method, run_greedy, select_next)
from .kernels import (FAMILIES, GaussianWeight, Kernel, exponential_kernel,
                      gaussian_kernel, weighted_gaussian_kernel)
from .newton import (CandidateSet, NearDependenceError, NewtonModel,
                     direct_solve, fill_distance)
from .pairings import (GramMatrix, PairingEngine, UnsupportedPairingError,
                       condition_number, read_gram_csv, write_gram_csv)
from .phantom import (Ellipse, EllipsePhantom, SampleSet, cell_centers,
                      phantom_eval, radon_exact, sample_functionals,
                      shepp_logan)
from .quadrature import (AccuracyError, QuadratureSpec, double_line_integral,
                         line_integral)
from .experiment import (ExperimentConfig, ResultRow, ResultsTable,
                         compute_msi, compute_msr, run_experiment, write_pgm,
                         write_png)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "BetaRule", "CSV_HEADER", "CandidateSet", "Ellipse",
    "EllipsePhantom", "ExperimentConfig", "FAMILIES", "GaussianWeight",
    "GeometricRule", "GramMatrix", "GreedyTrace", "Kernel",
    "NearDependenceError", "NewtonModel", "PairingEngine", "ParameterMetric",
    "PointEval", "QuadratureSpec", "RadonLine", "RandomRule", "ResultRow",
    "ResultsTable", "SampleSet", "UnsupportedPairingError", "beta_indicator",
    "cell_centers", "compute_msi", "compute_msr", "condition_number",
    "direct_solve", "double_line_integral", "exponential_kernel",
    "fill_distance", "gaussian_kernel", "line_integral", "line_point",
    "normalize_line_params", "parse_method", "phantom_eval", "radon_exact",
    "read_functionals_csv", "read_gram_csv", "run_experiment", "run_greedy",
    "sample_functionals", "select_next", "shepp_logan",
    "weighted_gaussian_kernel", "write_functionals_csv", "write_gram_csv",
    "write_pgm", "write_png",
]
