"""Data-generating processes and the Monte Carlo size/power harness.

Every random quantity is a deterministic function of the configuration and
its root seed.  Replication ``r`` draws covariates from the ``(seed, 1, r)``
stream and errors from ``(seed, 2, r)``; quantities that stay fixed across
replications (the moving-average weights and column means) come from the
disjoint ``(seed, 0)`` stream.  Results are therefore independent of
execution order and thread count, and two runs of the same configuration
are byte-identical.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._streams import child_seed, substream
from .bootstrap import BootstrapPlan, bootstrap_mean_test, bootstrap_quantile_test
from .data import Dataset
from .exceptions import InvalidConfig, MddTestError, ReplicationFailed
from .factorial import CellTable, factorial_mean_test
from .mean import mean_independence_test
from .quantile import quantile_independence_test

__all__ = [
    "SimulationConfig",
    "TableRow",
    "moving_average_params",
    "gen_moving_average_covariates",
    "gen_compound_symmetry_covariates",
    "make_beta",
    "gen_response",
    "gen_mixture",
    "monte_carlo_table",
    "table_row_to_dict",
    "table_row_json_line",
    "render_table_row",
]

_FIXED = 0
_COVARIATES = 1
_ERRORS = 2
_BOOTSTRAP = 3

DGPS = (
    "ma_linear",
    "cs_linear",
    "cs_sqrt_quadratic",
    "cs_inv_sqrt_quadratic",
    "mixture_gamma",
    "cs_heteroscedastic_squared",
    "cs_linear_heteroscedastic",
    "factorial_ma_linear",
    "factorial_nonlinear",
)

# error law -> number of parameters (law name, defaults)
_ERROR_LAWS = {
    "normal": (2, (0.0, 1.0)),  # mean, variance
    "student_t": (1, (3.0,)),
    "chi_sq_centered": (1, (1.0,)),
    "cauchy": (0, ()),
    "gamma_centered": (2, (1.0, 0.5)),  # shape, scale
}

BETA_MODES = ("null", "dense", "sparse", "dense_unit", "sparse_unit")

# Two-factor layouts: four cells, fixed nuisance means, growing MA windows.
_CELL_MEANS = (1.0, 3.0, 3.0, 4.0)
_CELL_WINDOW_STEPS = (0, 5, 10, 15)


@dataclass(frozen=True)
class SimulationConfig:
    """One size/power table cell: design, test, and Monte Carlo settings."""

    dgp: str
    n: int
    p: int
    T: int = 10
    error: str = "normal"
    error_params: tuple = ()
    beta_mode: str = "null"
    beta_norm: float = 0.06
    tau: float | None = None
    replications: int = 1000
    seed: int = 0
    alpha_levels: tuple = (0.05, 0.10)
    calibration: str = "normal"
    bootstrap_draws: int = 500
    multiplier: str = "gaussian"
    factorial_cell_adjustment: bool = False

    def __post_init__(self):
        if self.dgp not in DGPS:
            raise InvalidConfig(f"unknown dgp {self.dgp!r}; choose from {DGPS}")
        if self.n < 4:
            raise InvalidConfig(f"n must be >= 4, got {self.n}")
        if self.p < 1:
            raise InvalidConfig(f"p must be >= 1, got {self.p}")
        if self.T < 1:
            raise InvalidConfig(f"T must be >= 1, got {self.T}")
        if self.replications < 1:
            raise InvalidConfig("replications must be >= 1")
        if self.error not in _ERROR_LAWS:
            raise InvalidConfig(
                f"unknown error law {self.error!r}; choose from {tuple(_ERROR_LAWS)}"
            )
        n_params, _ = _ERROR_LAWS[self.error]
        if self.error_params and len(self.error_params) != n_params:
            raise InvalidConfig(
                f"error law {self.error!r} takes {n_params} parameters, "
                f"got {self.error_params}"
            )
        if self.beta_mode not in BETA_MODES:
            raise InvalidConfig(f"unknown beta mode {self.beta_mode!r}")
        if not all(0.0 < a < 1.0 for a in self.alpha_levels):
            raise InvalidConfig("alpha levels must lie in (0, 1)")
        if self.tau is not None and not 0.0 < self.tau < 1.0:
            raise InvalidConfig(f"tau must lie in (0, 1), got {self.tau}")
        if self.calibration not in ("normal", "bootstrap"):
            raise InvalidConfig(f"unknown calibration {self.calibration!r}")
        if self.dgp.startswith("factorial"):
            if self.tau is not None:
                raise InvalidConfig("factorial designs support the mean test only")
            if self.calibration == "bootstrap":
                raise InvalidConfig("factorial designs support normal calibration only")


@dataclass(frozen=True)
class TableRow:
    """Rejection frequencies for one configuration, one column per level."""

    config: SimulationConfig
    rejection_rates: dict = field(default_factory=dict)
    standard_errors: dict = field(default_factory=dict)
    replications: int = 0
    p_value_histogram: tuple = ()


def moving_average_params(p: int, T: int, seed: int, cell: int | None = None):
    """Weights and column means of the moving-average design.

    Drawn once per configuration from the fixed-parameter stream and reused
    across replications: ``T`` weights uniform on (0, 1) and ``p`` column
    means uniform on (2, 3).
    """
    path = (_FIXED,) if cell is None else (_FIXED, cell)
    rng = substream(seed, *path)
    alphas = rng.uniform(0.0, 1.0, T)
    mus = rng.uniform(2.0, 3.0, p)
    return alphas, mus


def gen_moving_average_covariates(
    n: int, p: int, T: int, seed: int, rep: int = 0, cell: int | None = None
) -> np.ndarray:
    """Columns formed as length-``T`` moving averages of a shared i.i.d. row.

    Column ``j`` is ``sum_k alpha_k z[., j+k-1] + mu_j`` with the latent
    matrix ``z`` of width ``p + T - 1`` drawn fresh per replication, so
    adjacent columns share ``T - 1`` latent coordinates and are banded
    dependent.
    """
    if T < 1:
        raise InvalidConfig(f"T must be >= 1, got {T}")
    alphas, mus = moving_average_params(p, T, seed, cell)
    path = (_COVARIATES, rep) if cell is None else (_COVARIATES, rep, cell)
    rng = substream(seed, *path)
    latent = rng.standard_normal((n, p + T - 1))
    windows = np.lib.stride_tricks.sliding_window_view(latent, T, axis=1)
    return np.einsum("npk,k->np", windows, alphas) + mus


def gen_compound_symmetry_covariates(
    n: int, p: int, seed: int, rep: int = 0, cell: int | None = None
) -> np.ndarray:
    """Standard normal columns with common pairwise correlation one half."""
    path = (_COVARIATES, rep) if cell is None else (_COVARIATES, rep, cell)
    rng = substream(seed, *path)
    latent = rng.standard_normal((n, p + 1))
    return (latent[:, 1:] + latent[:, :1]) / math.sqrt(2.0)


def make_beta(mode: str, p: int, norm_or_n) -> np.ndarray:
    """Coefficient vector for the named alternative.

    ``dense``/``sparse`` spread a fixed Euclidean norm over the first
    ``p // 2`` (respectively first five) coordinates; ``dense_unit`` and
    ``sparse_unit`` are plain indicators of the first ``min(n // 2, p)``
    (respectively five) coordinates, where ``norm_or_n`` is the sample size.
    """
    if mode == "null":
        return np.zeros(p)
    if mode == "dense":
        k = p // 2
        if k < 1:
            raise InvalidConfig("dense mode needs p >= 2")
        beta = np.zeros(p)
        beta[:k] = float(norm_or_n) / math.sqrt(k)
        return beta
    if mode == "sparse":
        if p < 5:
            raise InvalidConfig(f"sparse mode needs p >= 5, got p={p}")
        beta = np.zeros(p)
        beta[:5] = float(norm_or_n) / math.sqrt(5.0)
        return beta
    if mode == "dense_unit":
        k = min(int(norm_or_n) // 2, p)
        if k < 1:
            raise InvalidConfig("dense_unit mode needs n >= 2")
        beta = np.zeros(p)
        beta[:k] = 1.0
        return beta
    if mode == "sparse_unit":
        if p < 5:
            raise InvalidConfig(f"sparse_unit mode needs p >= 5, got p={p}")
        beta = np.zeros(p)
        beta[:5] = 1.0
        return beta
    raise InvalidConfig(f"unknown beta mode {mode!r}")


def _draw_error(name: str, params: tuple, size: int, rng: np.random.Generator) -> np.ndarray:
    n_params, defaults = _ERROR_LAWS[name]
    params = tuple(params) if params else defaults
    if name == "normal":
        mean, variance = params
        return rng.normal(mean, math.sqrt(variance), size)
    if name == "student_t":
        return rng.standard_t(params[0], size)
    if name == "chi_sq_centered":
        df = params[0]
        return rng.chisquare(df, size) - df
    if name == "cauchy":
        return rng.standard_cauchy(size)
    if name == "gamma_centered":
        shape, scale = params
        return rng.gamma(shape, scale, size) - shape * scale
    raise InvalidConfig(f"unknown error law {name!r}")


def gen_response(
    dgp: str,
    X: np.ndarray,
    beta: np.ndarray,
    error: str,
    seed: int,
    rep: int = 0,
    error_params: tuple = (),
    cell: int | None = None,
) -> np.ndarray:
    """Response draw for the named model on given covariates.

    The error vector always comes from the dedicated ``(seed, 2, rep)``
    stream, so two models with the same seed share the same error draw (and
    any model with zero signal returns the bare error vector).
    """
    X = np.asarray(X, dtype=float)
    beta = np.asarray(beta, dtype=float)
    path = (_ERRORS, rep) if cell is None else (_ERRORS, rep, cell)
    rng = substream(seed, *path)
    eps = _draw_error(error, error_params, X.shape[0], rng)
    family = dgp.removeprefix("factorial_")
    if family in ("ma_linear", "cs_linear", "linear"):
        return X @ beta + eps
    if family in ("cs_sqrt_quadratic", "nonlinear", "sqrt_quadratic"):
        return np.sqrt((X * X) @ beta) + eps
    if family in ("cs_inv_sqrt_quadratic", "inv_sqrt_quadratic"):
        if not np.any(beta):
            raise InvalidConfig(
                "inverse-sqrt model is undefined with an all-zero coefficient vector"
            )
        return X.shape[1] / np.sqrt((X * X) @ beta) + eps
    if family in ("cs_heteroscedastic_squared", "heteroscedastic_squared"):
        scale = 1.0 + X @ beta
        return scale * scale * eps
    if family in ("cs_linear_heteroscedastic", "linear_heteroscedastic"):
        shift = X @ beta
        scale = 1.0 + shift
        return shift + scale * scale * eps
    raise InvalidConfig(f"model {dgp!r} has no response equation")


def gen_mixture(n: int, p: int, beta, seed: int, rep: int = 0) -> Dataset:
    """Two-branch mixture: gamma covariates, sign decided by a fair coin.

    ``Y = (1 + Z) B - (1 + X beta)(1 - B)`` with ``B ~ Bernoulli(1/2)``,
    ``Z ~ Gamma(2, 2)`` and i.i.d. ``Gamma(6, 1)`` covariate entries
    (shape-scale parameterization throughout).
    """
    beta = np.asarray(beta, dtype=float)
    rng = substream(seed, _COVARIATES, rep)
    X = rng.gamma(6.0, 1.0, (n, p))
    coin = rng.random(n) < 0.5
    z = rng.gamma(2.0, 2.0, n)
    y = np.where(coin, 1.0 + z, -(1.0 + X @ beta))
    return Dataset(y=y, X=X)


def _beta_for(config: SimulationConfig) -> np.ndarray:
    if config.beta_mode in ("dense", "sparse"):
        return make_beta(config.beta_mode, config.p, config.beta_norm)
    if config.beta_mode == "dense_unit":
        return make_beta("dense_unit", config.p, config.n)
    if config.beta_mode == "sparse_unit":
        return make_beta("sparse_unit", config.p, 0)
    return make_beta("null", config.p, 0.0)


def _factorial_table(config: SimulationConfig, beta: np.ndarray, rep: int) -> CellTable:
    grid = []
    for i in range(2):
        row = []
        for j in range(2):
            cell = 2 * i + j
            window = config.T + _CELL_WINDOW_STEPS[cell]
            X = gen_moving_average_covariates(
                config.n, config.p, window, config.seed, rep=rep, cell=cell
            )
            signal = gen_response(
                config.dgp,
                X,
                beta,
                config.error,
                config.seed,
                rep=rep,
                error_params=config.error_params,
                cell=cell,
            )
            row.append(Dataset(y=_CELL_MEANS[cell] + signal, X=X))
        grid.append(row)
    return CellTable(cells=grid)


def _replicate_p_value(config: SimulationConfig, rep: int) -> float:
    beta = _beta_for(config)
    if config.dgp.startswith("factorial"):
        return factorial_mean_test(
            _factorial_table(config, beta, rep),
            cell_adjustment=config.factorial_cell_adjustment,
        ).p_value

    if config.dgp == "mixture_gamma":
        ds = gen_mixture(config.n, config.p, beta, config.seed, rep=rep)
        X, y = ds.X, ds.y
    elif config.dgp == "ma_linear":
        X = gen_moving_average_covariates(
            config.n, config.p, config.T, config.seed, rep=rep
        )
        y = gen_response(
            config.dgp, X, beta, config.error, config.seed, rep=rep,
            error_params=config.error_params,
        )
    else:
        X = gen_compound_symmetry_covariates(config.n, config.p, config.seed, rep=rep)
        y = gen_response(
            config.dgp, X, beta, config.error, config.seed, rep=rep,
            error_params=config.error_params,
        )

    if config.calibration == "bootstrap":
        plan = BootstrapPlan(
            draws=config.bootstrap_draws,
            multiplier=config.multiplier,
            seed=child_seed(config.seed, _BOOTSTRAP, rep),
        )
        if config.tau is not None:
            return bootstrap_quantile_test(X, y, config.tau, plan).p_value
        return bootstrap_mean_test(X, y, plan).p_value
    if config.tau is not None:
        return quantile_independence_test(X, y, config.tau).p_value
    return mean_independence_test(X, y).p_value


def monte_carlo_table(config: SimulationConfig) -> TableRow:
    """Run the configured test over all replications and tabulate rejections.

    Reports the rejection frequency at each level together with its
    binomial standard error ``sqrt(r(1-r)/R)`` and a 20-bin histogram of
    the p-values.  Deterministic given the configuration.
    """
    reps = config.replications
    p_values = np.empty(reps)
    for r in range(reps):
        try:
            p_values[r] = _replicate_p_value(config, r)
        except MddTestError as exc:
            raise ReplicationFailed(f"replication {r}: {exc}") from exc
    rates = {}
    errors = {}
    for alpha in config.alpha_levels:
        rate = float(np.count_nonzero(p_values <= alpha)) / reps
        rates[alpha] = rate
        errors[alpha] = math.sqrt(rate * (1.0 - rate) / reps)
    hist = np.histogram(p_values, bins=20, range=(0.0, 1.0))[0]
    return TableRow(
        config=config,
        rejection_rates=rates,
        standard_errors=errors,
        replications=reps,
        p_value_histogram=tuple(int(c) for c in hist),
    )


def table_row_to_dict(row: TableRow) -> dict:
    """JSON-ready representation with stable key order."""
    cfg = asdict(row.config)
    cfg["error_params"] = list(cfg["error_params"])
    cfg["alpha_levels"] = list(cfg["alpha_levels"])
    return {
        "config": cfg,
        "replications": row.replications,
        "rejection_rates": {f"{a:g}": r for a, r in row.rejection_rates.items()},
        "standard_errors": {f"{a:g}": s for a, s in row.standard_errors.items()},
        "p_value_histogram": list(row.p_value_histogram),
    }


def render_table_row(row: TableRow) -> str:
    """Aligned text: design columns followed by one rejection column per level."""
    cfg = row.config
    headers = ["dgp", "case", "n", "p", "T", "tau"]
    values = [
        cfg.dgp,
        cfg.beta_mode,
        str(cfg.n),
        str(cfg.p),
        str(cfg.T),
        "-" if cfg.tau is None else f"{cfg.tau:g}",
    ]
    for alpha in cfg.alpha_levels:
        headers.append(f"{100 * alpha:g}%")
        values.append(f"{row.rejection_rates[alpha]:.3f}")
    widths = [max(len(h), len(v)) for h, v in zip(headers, values)]
    head = "  ".join(h.rjust(w) for h, w in zip(headers, widths))
    body = "  ".join(v.rjust(w) for v, w in zip(values, widths))
    return head + "\n" + body


def table_row_json_line(row: TableRow) -> str:
    """One-line JSON (the harness's machine-readable output format)."""
    return json.dumps(table_row_to_dict(row), sort_keys=False, separators=(", ", ": "))
