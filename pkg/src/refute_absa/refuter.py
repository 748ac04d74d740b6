"""The four refutation tests and the all-pass validation gate.

Each test re-estimates the spec's regression under a perturbation:

* placebo — treatment series replaced by a uniform permutation (before lag
  alignment); pass iff the 95th percentile of the null |beta| lies strictly
  below the observed |beta|.
* random common cause — one synthetic N(0,1) regressor added; pass iff the
  treatment coefficient keeps its sign (zero counts as a mismatch).
* subset stability — repeated fits on 80% row subsamples; pass iff at least
  80% of the subsample signs agree with the modal sign.
* bootstrap CI — percentile interval over case-resampled fits; pass iff it
  excludes zero.

A spec is validated only if all four pass. Every random draw comes from a
Philox substream keyed by (master seed, ticker, aspect, lag, test,
iteration), so reports are byte-identical for any execution order or worker
count. Re-estimations need coefficients only (never standard errors), which
allows a batched least-squares fast path; its agreement with the one-shot
estimator is pinned by tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng
from .errors import (
    ConfigError,
    DegenerateDesignError,
    RefuteAbsaError,
    UnstableTestError,
)
from .estimator import (
    DesignMatrix,
    EstimationResult,
    ModelSpec,
    hac_lag_length,
    ols_fit,
)
from .ingest import ReturnPanel
from .signals import SentimentPanel

TEST_NAMES = ("placebo", "rcc", "subset", "bootstrap")

# Fraction of resampling iterations that may fail before a test is unstable.
MAX_DROP_FRACTION = 0.10

_DEGENERATE_REL_TOL = 1e-10


@dataclass(frozen=True)
class RefutationConfig:
    placebo_iters: int = 200
    rcc_confounders: int = 1
    subset_fraction: float = 0.8
    subset_iters: int = 50
    subset_threshold: float = 0.8
    bootstrap_iters: int = 500
    ci_level: float = 95.0
    master_seed: int = 42
    block_bootstrap: bool = False

    def __post_init__(self):
        if not (0.0 < self.subset_fraction < 1.0):
            raise ConfigError("subset_fraction must lie in (0, 1)")
        for name in ("placebo_iters", "rcc_confounders", "subset_iters", "bootstrap_iters"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not (0.0 < self.ci_level < 100.0):
            raise ConfigError("ci_level must lie in (0, 100)")
        if not (0.0 < self.subset_threshold <= 1.0):
            raise ConfigError("subset_threshold must lie in (0, 1]")


@dataclass(frozen=True)
class TestResult:
    name: str
    verdict: str  # "pass" | "fail" | "error"
    diagnostics: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


@dataclass(frozen=True)
class RefutationReport:
    spec: ModelSpec
    placebo: TestResult
    rcc: TestResult
    subset: TestResult
    bootstrap: TestResult
    validated: bool
    untestable: bool
    master_seed: int
    stream_keys: dict[str, str]

    def tests(self) -> tuple[TestResult, ...]:
        return (self.placebo, self.rcc, self.subset, self.bootstrap)


def _sign(x: float) -> int:
    if x > 0.0:
        return 1
    if x < 0.0:
        return -1
    return 0


def percentile(values: np.ndarray, q: float) -> float:
    """Linear-interpolation percentile (the convention for all verdicts)."""
    return float(np.percentile(np.asarray(values, dtype=float), q))


def _batched_ols_beta(
    X_stack: np.ndarray, y_stack: np.ndarray, coef_index: int
) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient ``coef_index`` for a stack of designs, with a validity mask.

    Solves the normal equations batch-wise; draws whose Gram matrix is close
    to singular (a constant resampled column, for instance) are masked out
    rather than solved. Precision is pinned against the SVD path by tests.
    """
    XtX = np.einsum("bni,bnj->bij", X_stack, X_stack)
    Xty = np.einsum("bni,bn->bi", X_stack, y_stack)
    eigs = np.linalg.eigvalsh(XtX)
    scale = np.trace(XtX, axis1=1, axis2=2) / XtX.shape[1]
    valid = eigs[:, 0] > _DEGENERATE_REL_TOL * scale
    betas = np.full(len(X_stack), np.nan)
    if valid.any():
        sol = np.linalg.solve(XtX[valid], Xty[valid][..., None])[..., 0]
        betas[valid] = sol[:, coef_index]
    return betas, valid


def _check_drop_rate(name: str, n_dropped: int, n_total: int) -> None:
    if n_dropped > MAX_DROP_FRACTION * n_total:
        raise UnstableTestError(
            f"{name}: {n_dropped}/{n_total} degenerate re-estimations (> {MAX_DROP_FRACTION:.0%})"
        )


def placebo_test(
    spec: ModelSpec,
    signal: SentimentPanel,
    returns: ReturnPanel,
    config: RefutationConfig,
    *,
    design: DesignMatrix | None = None,
    estimation: EstimationResult | None = None,
) -> TestResult:
    """Permutation null for the treatment effect.

    The full aspect series is permuted and the lagged treatment column is
    re-derived from the permuted series, so temporal alignment is destroyed
    wholesale. Uses the Frisch-Waugh identity: with the non-treatment
    columns fixed, each null beta is the residualised cross product, which
    exactly equals the full-OLS treatment coefficient.
    """
    design, estimation = _ensure_fit(spec, signal, returns, design, estimation)
    key = rng.stream_key(config.master_seed, spec.ticker, spec.aspect, spec.lag, "placebo")
    N = config.placebo_iters
    T = len(signal.z)
    source = design.day_index - spec.lag

    perms = np.empty((N, T), dtype=np.intp)
    for k in range(N):
        perms[k] = rng.iteration_stream(key, k).permutation(T)
    treat = signal.z[perms[:, source]]  # (N, n_obs) null treatment columns

    others = np.delete(design.X, design.treatment_col, axis=1)
    Q, _ = np.linalg.qr(others)
    y_res = design.y - Q @ (Q.T @ design.y)
    t_res = treat - (treat @ Q) @ Q.T
    denom = np.einsum("bn,bn->b", t_res, t_res)
    numer = t_res @ y_res
    valid = denom > _DEGENERATE_REL_TOL * design.n_obs
    n_dropped = int((~valid).sum())
    _check_drop_rate("placebo", n_dropped, N)
    null_abs = np.abs(numer[valid] / denom[valid])

    q95 = percentile(null_abs, 95.0)
    beta_obs = estimation.beta
    verdict = "pass" if q95 < abs(beta_obs) else "fail"
    return TestResult(
        "placebo",
        verdict,
        {
            "q95": q95,
            "beta_obs": beta_obs,
            "null_abs_mean": float(null_abs.mean()),
            "null_abs_sd": float(null_abs.std()),
            "null_abs_max": float(null_abs.max()),
            "n_used": int(valid.sum()),
            "n_dropped": n_dropped,
        },
    )


def random_common_cause_test(
    spec: ModelSpec,
    signal: SentimentPanel,
    returns: ReturnPanel,
    config: RefutationConfig,
    *,
    design: DesignMatrix | None = None,
    estimation: EstimationResult | None = None,
) -> TestResult:
    """Re-estimate with a synthetic standard-normal confounder added.

    Pass iff the treatment coefficient keeps the observed sign for every
    confounder draw; a zero sign on either side is a mismatch.
    """
    design, estimation = _ensure_fit(spec, signal, returns, design, estimation)
    key = rng.stream_key(config.master_seed, spec.ticker, spec.aspect, spec.lag, "rcc")
    T = len(signal.z)
    sign_obs = _sign(estimation.beta)
    betas_rcc: list[float] = []
    preserved = True
    for k in range(config.rcc_confounders):
        w = rng.iteration_stream(key, k).standard_normal(T)
        X_aug = np.column_stack([design.X, w[design.day_index]])
        coef, _ = ols_fit(X_aug, design.y)  # raises DegenerateDesignError -> test error
        beta_rcc = float(coef[design.treatment_col])
        betas_rcc.append(beta_rcc)
        if sign_obs == 0 or _sign(beta_rcc) != sign_obs:
            preserved = False
    return TestResult(
        "rcc",
        "pass" if preserved else "fail",
        {
            "beta_rcc": betas_rcc[0],
            "betas_rcc": betas_rcc,
            "sign_obs": sign_obs,
            "beta_obs": estimation.beta,
        },
    )


def subset_stability_test(
    spec: ModelSpec,
    signal: SentimentPanel,
    returns: ReturnPanel,
    config: RefutationConfig,
    *,
    design: DesignMatrix | None = None,
    estimation: EstimationResult | None = None,
) -> TestResult:
    """Sign agreement across repeated subsamples (without replacement)."""
    design, estimation = _ensure_fit(spec, signal, returns, design, estimation)
    n = design.n_obs
    m = int(np.floor(config.subset_fraction * n))
    if m < design.n_params + 5:
        raise ConfigError(
            f"subset size {m} too small for {design.n_params} parameters (need >= k + 5)"
        )
    key = rng.stream_key(config.master_seed, spec.ticker, spec.aspect, spec.lag, "subset")
    N = config.subset_iters
    idx = np.empty((N, m), dtype=np.intp)
    for k in range(N):
        idx[k] = rng.iteration_stream(key, k).permutation(n)[:m]
    betas, valid = _batched_ols_beta(design.X[idx], design.y[idx], design.treatment_col)
    n_dropped = int((~valid).sum())
    _check_drop_rate("subset", n_dropped, N)
    signs = np.sign(betas[valid]).astype(int)

    counts = {s: int((signs == s).sum()) for s in (-1, 0, 1)}
    modal_sign = min(
        (s for s in (-1, 0, 1)), key=lambda s: (-counts[s], s)
    )  # max count, deterministic tie-break
    p_hat = counts[modal_sign] / len(signs) if len(signs) else 0.0
    verdict = "pass" if p_hat >= config.subset_threshold else "fail"
    return TestResult(
        "subset",
        verdict,
        {
            "p_hat": float(p_hat),
            "modal_sign": modal_sign,
            "sign_counts": counts,
            "n_used": int(valid.sum()),
            "n_dropped": n_dropped,
        },
    )


def _bootstrap_indices(
    key: np.ndarray, iteration: int, n: int, block_length: int | None
) -> np.ndarray:
    gen = rng.iteration_stream(key, iteration)
    if block_length is None or block_length <= 1:
        return gen.integers(0, n, size=n)
    n_blocks = -(-n // block_length)
    starts = gen.integers(0, n - block_length + 1, size=n_blocks)
    idx = (starts[:, None] + np.arange(block_length)[None, :]).ravel()
    return idx[:n]


def bootstrap_ci_test(
    spec: ModelSpec,
    signal: SentimentPanel,
    returns: ReturnPanel,
    config: RefutationConfig,
    *,
    design: DesignMatrix | None = None,
    estimation: EstimationResult | None = None,
) -> TestResult:
    """Percentile confidence interval from case (pairs) bootstrap.

    Rows of the aligned design are resampled with replacement; the optional
    block variant resamples contiguous row blocks of length ``h + 1`` to
    respect serial correlation.
    """
    design, estimation = _ensure_fit(spec, signal, returns, design, estimation)
    n = design.n_obs
    key = rng.stream_key(config.master_seed, spec.ticker, spec.aspect, spec.lag, "bootstrap")
    N = config.bootstrap_iters
    block = hac_lag_length(n) + 1 if config.block_bootstrap else None
    idx = np.empty((N, n), dtype=np.intp)
    for k in range(N):
        idx[k] = _bootstrap_indices(key, k, n, block)
    betas, valid = _batched_ols_beta(design.X[idx], design.y[idx], design.treatment_col)
    n_dropped = int((~valid).sum())
    _check_drop_rate("bootstrap", n_dropped, N)
    kept = betas[valid]

    half = (100.0 - config.ci_level) / 2.0
    lo = percentile(kept, half)
    hi = percentile(kept, 100.0 - half)
    excludes_zero = (lo > 0.0) or (hi < 0.0)
    return TestResult(
        "bootstrap",
        "pass" if excludes_zero else "fail",
        {
            "ci_low": lo,
            "ci_high": hi,
            "ci_level": config.ci_level,
            "n_used": int(valid.sum()),
            "n_dropped": n_dropped,
            "block_length": block,
        },
    )


def _ensure_fit(spec, signal, returns, design, estimation):
    if design is None or estimation is None:
        from .estimator import build_design, estimate_design

        design = build_design(spec, signal, returns)
        estimation = estimate_design(spec, design)
    return design, estimation


_TESTS = {
    "placebo": placebo_test,
    "rcc": random_common_cause_test,
    "subset": subset_stability_test,
    "bootstrap": bootstrap_ci_test,
}


def refute_all(
    spec: ModelSpec,
    signal: SentimentPanel,
    returns: ReturnPanel,
    config: RefutationConfig,
) -> tuple[EstimationResult, RefutationReport]:
    """Run the full refutation suite on one spec.

    Tests draw from independent substreams, so the report is a pure function
    of (master seed, spec, data, config). A test that errors (degenerate
    re-estimations past the tolerance, say) marks the spec untestable, which
    is distinct from a fail; diagnostics for the remaining tests are still
    reported.
    """
    from .estimator import build_design, estimate_design

    design = build_design(spec, signal, returns)
    estimation = estimate_design(spec, design)
    results: dict[str, TestResult] = {}
    untestable = False
    for name, func in _TESTS.items():
        try:
            results[name] = func(
                spec, signal, returns, config, design=design, estimation=estimation
            )
        except RefuteAbsaError as exc:
            untestable = True
            results[name] = TestResult(name, "error", {"error": str(exc)})
    validated = all(results[name].passed for name in TEST_NAMES)
    keys = {
        name: rng.stream_key(config.master_seed, spec.ticker, spec.aspect, spec.lag, name)
        .tobytes()
        .hex()
        for name in TEST_NAMES
    }
    report = RefutationReport(
        spec=spec,
        placebo=results["placebo"],
        rcc=results["rcc"],
        subset=results["subset"],
        bootstrap=results["bootstrap"],
        validated=validated,
        untestable=untestable,
        master_seed=config.master_seed,
        stream_keys=keys,
    )
    return estimation, report
