"""Numerical toolkit for Liouville conformal field theory.

Special functions and the DOZZ structure constant, the Shapovalov form and
its free-field realization, conformal blocks, the bootstrap four-point
function, and a Gaussian multiplicative chaos Monte Carlo estimator.
"""

from importlib.metadata import PackageNotFoundError, version

from .blocks import BlockParams, block_coefficients, block_eval, beta_n
from .bootstrap import QuadratureConfig, crossing_residual, fourpoint
from .errors import ConditionError, DivergenceWarning, LiouvilleError, NotPositiveDefiniteError, PoleError
from .gmc import GmcConfig, Grid, correlation_mc, mobius_check, sample_gff, seiberg_check
from .partitions import YoungDiagram, partition_count, young_diagrams
from .special import LiouvilleParams, dozz, ell, log_upsilon, upsilon, upsilon_prime_zero
from .virasoro import kac_check, shapovalov_matrix

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

__all__ = [
    "BlockParams",
    "ConditionError",
    "DivergenceWarning",
    "GmcConfig",
    "Grid",
    "LiouvilleError",
    "LiouvilleParams",
    "NotPositiveDefiniteError",
    "PoleError",
    "QuadratureConfig",
    "YoungDiagram",
    "beta_n",
    "block_coefficients",
    "block_eval",
    "correlation_mc",
    "crossing_residual",
    "dozz",
    "ell",
    "fourpoint",
    "kac_check",
    "log_upsilon",
    "mobius_check",
    "partition_count",
    "sample_gff",
    "seiberg_check",
    "shapovalov_matrix",
    "upsilon",
    "upsilon_prime_zero",
    "young_diagrams",
]
