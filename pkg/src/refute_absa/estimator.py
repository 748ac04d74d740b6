"""Lagged sentiment-return regression with Newey-West HAC standard errors.

Model per specification (ticker i, aspect a, lag l):

    r[i,t] = alpha + beta * z[a,t-l] + gamma' X[t] + eps[i,t]

where X[t] holds the previous day's return and the standardised activity of
the aspect at the treatment lag (both optional). The coefficient covariance
is the HAC sandwich with Bartlett weights up to lag
``h = floor(4 * (T_eff/100)**(2/9))`` computed on the effective sample after
lag alignment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import DegenerateDesignError, InsufficientDataError, InvalidLagError
from .ingest import ReturnPanel
from .signals import SentimentPanel, z_normalize

# Effective sample must exceed parameter count by this margin.
MIN_OBS_MARGIN = 5

# Relative variance below which a column counts as constant.
_CONST_TOL = 1e-24


@dataclass(frozen=True)
class ModelSpec:
    """One (ticker, aspect, lag) regression specification."""

    ticker: str
    aspect: str
    lag: int
    control_lagged_return: bool = True
    control_activity: bool = True

    def key(self) -> tuple[str, str, int]:
        return (self.ticker, self.aspect, self.lag)

    def label(self) -> str:
        return f"{self.ticker}:{self.aspect}:{self.lag}"


@dataclass(frozen=True)
class DesignMatrix:
    """Aligned response/regressor arrays for one spec.

    ``day_index[i]`` is the calendar position of row ``i``; the treatment for
    that row was read from the aspect series at ``day_index[i] - lag``, which
    is what placebo re-derivation needs.
    """

    y: np.ndarray
    X: np.ndarray
    columns: tuple[str, ...]
    day_index: np.ndarray
    lag: int
    treatment_col: int = 1  # const is column 0
    dropped_controls: tuple[str, ...] = ()

    @property
    def n_obs(self) -> int:
        return len(self.y)

    @property
    def n_params(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class EstimationResult:
    spec: ModelSpec
    beta: float
    hac_se: float
    t_stat: float
    p_value: float
    alpha: float
    gamma: dict[str, float]
    n_obs: int
    hac_lag: int
    df: int
    residuals: np.ndarray = field(repr=False)


def hac_lag_length(T: int) -> int:
    """Newey-West rule of thumb: floor(4 * (T/100)**(2/9))."""
    if T < 1:
        raise ValueError("T must be >= 1")
    return math.floor(4.0 * (T / 100.0) ** (2.0 / 9.0))


def bartlett_weights(h: int) -> np.ndarray:
    """Kernel weights 1 - j/(h+1) for j = 1..h."""
    j = np.arange(1, h + 1, dtype=float)
    return 1.0 - j / (h + 1.0)


def first_usable_day(lag: int, lagged_return: bool) -> int:
    """Smallest calendar index with y, treatment and controls all defined.

    Returns exist from day 1; the treatment needs ``t - lag >= 0``; the
    lagged-return control needs the previous day's return, so ``t >= 2``.
    """
    return max(1, lag, 2 if lagged_return else 1)


def build_design(
    spec: ModelSpec, signal: SentimentPanel, returns: ReturnPanel
) -> DesignMatrix:
    """Assemble the aligned design matrix for one spec.

    Raises ``DegenerateDesignError`` for an inactive aspect (constant z) and
    ``InsufficientDataError`` when fewer than ``k + 5`` rows survive
    alignment. A control column that comes out constant is dropped and
    recorded rather than breaking the fit.
    """
    T = len(signal.z)
    if signal.inactive:
        raise DegenerateDesignError(f"{spec.label()}: inactive aspect (constant net ratio)")

    start = first_usable_day(spec.lag, spec.control_lagged_return)
    day_index = np.arange(start, T)
    y = np.array([returns.return_on(t) for t in day_index])

    columns = ["const", "z"]
    cols = [np.ones(len(day_index)), signal.z[day_index - spec.lag]]
    dropped: list[str] = []
    if spec.control_lagged_return:
        cols.append(np.array([returns.return_on(t - 1) for t in day_index]))
        columns.append("ret_lag1")
    if spec.control_activity:
        act_z = z_normalize(signal.activity)
        col = act_z[day_index - spec.lag]
        if col.var() <= _CONST_TOL:
            dropped.append("activity")
        else:
            cols.append(col)
            columns.append("activity")

    X = np.column_stack(cols)
    k = X.shape[1]
    if len(y) < k + MIN_OBS_MARGIN:
        raise InsufficientDataError(
            f"{spec.label()}: {len(y)} usable rows < k + {MIN_OBS_MARGIN} = {k + MIN_OBS_MARGIN}"
        )
    if X[:, 1].var() <= _CONST_TOL:
        raise DegenerateDesignError(f"{spec.label()}: constant treatment column")
    return DesignMatrix(
        y=y,
        X=X,
        columns=tuple(columns),
        day_index=day_index,
        lag=spec.lag,
        dropped_controls=tuple(dropped),
    )


def ols_fit(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares coefficients and residuals via SVD (numerically stable).

    Raises ``DegenerateDesignError`` on rank deficiency.
    """
    coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        raise DegenerateDesignError(f"rank {rank} < {X.shape[1]} parameters")
    return coef, y - X @ coef


def hac_covariance(X: np.ndarray, residuals: np.ndarray, h: int) -> np.ndarray:
    """Newey-West sandwich covariance of the OLS coefficients.

    ``(X'X)^-1 S (X'X)^-1`` with ``S = G0 + sum_j w_j (G_j + G_j')`` where
    ``G_j`` is the lag-j cross product of the score vectors ``x_t e_t`` and
    ``w_j`` the Bartlett weights. ``h = 0`` reduces to the White estimator.
    """
    n, k = X.shape
    if h >= n:
        raise InvalidLagError(f"HAC lag {h} >= {n} observations")
    scores = X * residuals[:, None]
    S = scores.T @ scores
    for j, w in enumerate(bartlett_weights(h), start=1):
        gamma_j = scores[j:].T @ scores[:-j]
        S += w * (gamma_j + gamma_j.T)
    XtX = X.T @ X
    bread = np.linalg.solve(XtX, np.eye(k))
    cov = bread @ S @ bread
    return (cov + cov.T) / 2.0


def estimate(
    spec: ModelSpec, signal: SentimentPanel, returns: ReturnPanel
) -> EstimationResult:
    """Fit one spec end to end: design, OLS, HAC covariance, t and p."""
    design = build_design(spec, signal, returns)
    return estimate_design(spec, design)


def estimate_design(spec: ModelSpec, design: DesignMatrix) -> EstimationResult:
    """Fit a prebuilt design (shared by the refuter, which reuses designs)."""
    coef, resid = ols_fit(design.X, design.y)
    h = hac_lag_length(design.n_obs)
    cov = hac_covariance(design.X, resid, h)
    j = design.treatment_col
    beta = float(coef[j])
    hac_se = float(math.sqrt(max(cov[j, j], 0.0)))
    df = design.n_obs - design.n_params
    if hac_se > 0.0:
        t_stat = beta / hac_se
        p_value = float(2.0 * stats.t.sf(abs(t_stat), df))
    else:
        t_stat = math.inf if beta != 0.0 else 0.0
        p_value = 0.0 if beta != 0.0 else 1.0
    gamma = {
        name: float(c)
        for name, c in zip(design.columns, coef)
        if name not in ("const", "z")
    }
    return EstimationResult(
        spec=spec,
        beta=beta,
        hac_se=hac_se,
        t_stat=float(t_stat),
        p_value=p_value,
        alpha=float(coef[0]),
        gamma=gamma,
        n_obs=design.n_obs,
        hac_lag=h,
        df=df,
        residuals=resid,
    )
