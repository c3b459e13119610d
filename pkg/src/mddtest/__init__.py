"""Martingale-difference-divergence tests for high-dimensional conditional
mean and quantile independence, with normal and wild-bootstrap calibration,
a factorial-design extension, a reproducible Monte Carlo harness, and an
FDR-controlled gene-set screening pipeline.
"""

from .bootstrap import (
    BootstrapPlan,
    bootstrap_mean_test,
    bootstrap_quantile_test,
    bootstrap_statistic,
    multiplier_matrix,
)
from .core import (
    abs_distance_matrix,
    centered_sums,
    dcov_unbiased,
    euclidean_distance_matrix,
    half_squared_distance_matrix,
    mdd_kernel_oracle,
    mdd_unbiased,
    u_center,
    ucentered_inner,
)
from .data import Dataset, GeneSetCollection, read_dataset, read_gene_sets, write_dataset
from .exceptions import (
    DegenerateData,
    DegenerateDraw,
    DuplicateSetId,
    InvalidConfig,
    InvalidData,
    InvalidInput,
    InvalidQuantile,
    MddTestError,
    OracleRangeExceeded,
    ParseError,
    ReplicationFailed,
    SampleTooSmall,
)
from .factorial import CellTable, factorial_mean_test
from .mean import (
    MeanTestResult,
    finite_sample_factor,
    joint_mdd_test,
    mean_independence_test,
    unbiased_variance_oracle,
    variance_estimate,
)
from .quantile import (
    QuantileTestResult,
    empirical_quantile,
    quantile_independence_test,
    quantile_residuals,
)
from .screening import ScreeningReport, SetResult, bh_step_up, screen_gene_sets
from .simulate import (
    SimulationConfig,
    TableRow,
    gen_compound_symmetry_covariates,
    gen_mixture,
    gen_moving_average_covariates,
    gen_response,
    make_beta,
    monte_carlo_table,
    moving_average_params,
    render_table_row,
    table_row_to_dict,
)

__version__ = "0.1.0"

__all__ = [
    "BootstrapPlan",
    "CellTable",
    "Dataset",
    "DegenerateData",
    "DegenerateDraw",
    "DuplicateSetId",
    "GeneSetCollection",
    "InvalidConfig",
    "InvalidData",
    "InvalidInput",
    "InvalidQuantile",
    "MddTestError",
    "MeanTestResult",
    "OracleRangeExceeded",
    "ParseError",
    "QuantileTestResult",
    "ReplicationFailed",
    "SampleTooSmall",
    "ScreeningReport",
    "SetResult",
    "SimulationConfig",
    "TableRow",
    "abs_distance_matrix",
    "bh_step_up",
    "bootstrap_mean_test",
    "bootstrap_quantile_test",
    "bootstrap_statistic",
    "centered_sums",
    "dcov_unbiased",
    "empirical_quantile",
    "euclidean_distance_matrix",
    "factorial_mean_test",
    "finite_sample_factor",
    "gen_compound_symmetry_covariates",
    "gen_mixture",
    "gen_moving_average_covariates",
    "gen_response",
    "half_squared_distance_matrix",
    "joint_mdd_test",
    "make_beta",
    "mdd_kernel_oracle",
    "mdd_unbiased",
    "mean_independence_test",
    "monte_carlo_table",
    "moving_average_params",
    "multiplier_matrix",
    "quantile_independence_test",
    "quantile_residuals",
    "read_dataset",
    "read_gene_sets",
    "render_table_row",
    "screen_gene_sets",
    "table_row_to_dict",
    "u_center",
    "ucentered_inner",
    "unbiased_variance_oracle",
    "variance_estimate",
    "write_dataset",
]
