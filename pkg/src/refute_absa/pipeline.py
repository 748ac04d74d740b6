"""Grid orchestration: enumerate ticker x aspect x lag, estimate, refute, report.

Outputs per run: ``matrix.csv`` (the refutation matrix), ``grid.json`` (full
diagnostics; byte-identical for a given seed at any worker count),
``comparison.csv`` (raw correlation vs validated effect size) and
``plots/*.svg``. Wall-clock timings never enter ``grid.json`` so determinism
holds; they go to ``run_info.json``.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__ as _version
from .errors import ConfigError, DegenerateDesignError, InsufficientDataError
from .estimator import ModelSpec, first_usable_day
from .ingest import ReturnPanel, TradingCalendar
from .refuter import RefutationConfig, RefutationReport, TestResult, refute_all
from .signals import SentimentPanel

SCALES = ("raw", "bps")
BPS_FACTOR = 1e4

MATRIX_COLUMNS = [
    "ticker", "aspect", "lag", "rt1", "rt2", "rt3", "rt4",
    "validated", "beta", "hac_se", "p_value", "bh_q",
]

COMPARISON_COLUMNS = ["ticker", "aspect", "lag", "abs_r", "abs_beta", "validated", "flagged"]

_RT_ORDER = ("placebo", "rcc", "subset", "bootstrap")


@dataclass(frozen=True)
class RunConfig:
    lags: tuple[int, ...] = (0, 1, 2, 3)
    tickers: tuple[str, ...] | None = None  # None: every ticker in the panel
    aspects: tuple[str, ...] | None = None  # None: top-k by total activity
    top_k_aspects: int = 20
    refutation: RefutationConfig = field(default_factory=RefutationConfig)
    scale: str = "raw"
    workers: int = 1
    control_lagged_return: bool = True
    control_activity: bool = True
    comparison_r_threshold: float = 0.4
    fill_policy: str = "fold"

    def __post_init__(self):
        if self.scale not in SCALES:
            raise ConfigError(f"scale must be one of {SCALES}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not self.lags or any(l < 0 for l in self.lags):
            raise ConfigError("lags must be non-negative")

    def scale_factor(self) -> float:
        return BPS_FACTOR if self.scale == "bps" else 1.0


@dataclass(frozen=True)
class SpecRow:
    """Outcome for one enumerated spec."""

    ticker: str
    aspect: str
    lag: int
    status: str  # "ok" | "skipped" | "untestable"
    skip_reason: str | None = None
    estimation: dict | None = None
    refutation: dict | None = None
    validated: bool = False
    abs_r: float | None = None

    def key(self):
        return (self.ticker, self.aspect, self.lag)


@dataclass
class GridResult:
    rows: list[SpecRow]
    run: dict
    elapsed_seconds: float | None = None  # not serialised into grid.json

    def row_map(self) -> dict[tuple, SpecRow]:
        return {r.key(): r for r in self.rows}


def select_aspects(panels: dict[str, SentimentPanel], k: int) -> list[str]:
    """Top-k aspects by total activity; ties break lexicographically.

    With fewer than k aspects available, all are used (callers may warn).
    """
    if k < 1:
        raise ConfigError("aspect count must be >= 1")
    ranked = sorted(panels.values(), key=lambda p: (-p.total_activity, p.aspect))
    return [p.aspect for p in ranked[:k]]


def enumerate_specs(
    tickers: list[str], aspects: list[str], lags: tuple[int, ...], config: RunConfig
) -> list[ModelSpec]:
    return [
        ModelSpec(
            ticker=t,
            aspect=a,
            lag=l,
            control_lagged_return=config.control_lagged_return,
            control_activity=config.control_activity,
        )
        for t in tickers
        for a in aspects
        for l in sorted(lags)
    ]


def lagged_correlation(signal: SentimentPanel, returns: ReturnPanel, lag: int) -> float:
    """Plain Pearson correlation between z[t-lag] and r[t] over usable days."""
    T = len(signal.z)
    start = max(1, lag)
    t_idx = np.arange(start, T)
    z = signal.z[t_idx - lag]
    r = np.array([returns.return_on(t) for t in t_idx])
    if z.std() == 0.0 or r.std() == 0.0:
        return 0.0
    return float(np.corrcoef(z, r)[0, 1])


def _estimation_dict(est) -> dict:
    return {
        "beta": est.beta,
        "hac_se": est.hac_se,
        "t_stat": est.t_stat,
        "p_value": est.p_value,
        "alpha": est.alpha,
        "gamma": est.gamma,
        "n_obs": est.n_obs,
        "hac_lag": est.hac_lag,
        "df": est.df,
    }


def _refutation_dict(report: RefutationReport) -> dict:
    return {
        "tests": {t.name: {"verdict": t.verdict, **t.diagnostics} for t in report.tests()},
        "validated": report.validated,
        "untestable": report.untestable,
        "master_seed": report.master_seed,
        "stream_keys": report.stream_keys,
    }


def evaluate_spec(
    spec: ModelSpec,
    signal: SentimentPanel,
    returns: ReturnPanel,
    config: RunConfig,
) -> SpecRow:
    """Estimate and refute one spec, mapping failures to row statuses."""
    base = dict(ticker=spec.ticker, aspect=spec.aspect, lag=spec.lag)
    if signal.inactive:
        return SpecRow(**base, status="skipped", skip_reason="inactive aspect (constant net ratio)")
    try:
        estimation, report = refute_all(spec, signal, returns, config.refutation)
    except (InsufficientDataError, DegenerateDesignError) as exc:
        return SpecRow(**base, status="skipped", skip_reason=str(exc))
    status = "untestable" if report.untestable else "ok"
    return SpecRow(
        **base,
        status=status,
        estimation=_estimation_dict(estimation),
        refutation=_refutation_dict(report),
        validated=report.validated,
        abs_r=abs(lagged_correlation(signal, returns, spec.lag)),
    )


def _eval_batch(payload) -> list[tuple[int, SpecRow]]:
    config, signals, returns_panels, items = payload
    out = []
    for index, spec in items:
        row = evaluate_spec(spec, signals[spec.aspect], returns_panels[spec.ticker], config)
        out.append((index, row))
    return out


def _config_digest(config: RunConfig) -> str:
    canonical = json.dumps(asdict(config), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def run_grid(
    return_panels: dict[str, ReturnPanel],
    calendar: TradingCalendar,
    signal_panels: dict[str, SentimentPanel],
    config: RunConfig,
) -> GridResult:
    """Run the full grid; deterministic w.r.t. the master seed at any worker count.

    Every enumerated spec appears exactly once (estimated, skipped with a
    reason, or untestable). Specs are independent, so they are distributed
    across workers and the report is assembled in canonical order.
    """
    t0 = time.perf_counter()
    tickers = list(config.tickers) if config.tickers else sorted(return_panels)
    missing = [t for t in tickers if t not in return_panels]
    if missing:
        raise ConfigError(f"tickers not in price data: {missing}")
    if config.aspects:
        aspects = list(config.aspects)
        missing = [a for a in aspects if a not in signal_panels]
        if missing:
            raise ConfigError(f"aspects not in sentiment data: {missing}")
    else:
        aspects = select_aspects(signal_panels, config.top_k_aspects)

    specs = enumerate_specs(tickers, aspects, config.lags, config)
    indexed = list(enumerate(specs))
    needed_signals = {a: signal_panels[a] for a in aspects}
    needed_returns = {t: return_panels[t] for t in tickers}

    rows: list[SpecRow | None] = [None] * len(specs)
    if config.workers == 1 or len(specs) < 2:
        for index, spec in indexed:
            rows[index] = evaluate_spec(spec, needed_signals[spec.aspect], needed_returns[spec.ticker], config)
    else:
        n_chunks = min(len(indexed), config.workers * 4)
        bounds = np.linspace(0, len(indexed), n_chunks + 1).astype(int)
        payloads = [
            (config, needed_signals, needed_returns, indexed[lo:hi])
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            for batch in pool.map(_eval_batch, payloads):
                for index, row in batch:
                    rows[index] = row

    elapsed = time.perf_counter() - t0
    run_meta = {
        "package_version": _version,
        "master_seed": config.refutation.master_seed,
        "config": asdict(config),
        "config_hash": _config_digest(config),
        "n_specs": len(specs),
        "tickers": tickers,
        "aspects": aspects,
        "lags": sorted(config.lags),
        "calendar_start": calendar.dates[0].isoformat(),
        "calendar_end": calendar.dates[-1].isoformat(),
        "calendar_days": len(calendar),
    }
    return GridResult(rows=list(rows), run=run_meta, elapsed_seconds=elapsed)


def benjamini_hochberg(p_values: list[float]) -> list[float]:
    """Step-up BH adjusted q-values (supplementary reporting only)."""
    n = len(p_values)
    if n == 0:
        return []
    order = sorted(range(n), key=lambda i: p_values[i])
    q = [0.0] * n
    running = 1.0
    for rank in range(n, 0, -1):
        i = order[rank - 1]
        running = min(running, p_values[i] * n / rank)
        q[i] = running
    return q


def _rt_marks(row: SpecRow) -> list[str]:
    if not row.refutation:
        return [""] * 4
    tests = row.refutation["tests"]
    return [tests[name]["verdict"] for name in _RT_ORDER]


def matrix_rows(result: GridResult, scale: str = "raw") -> list[list]:
    """Rows of the refutation matrix, sorted validated-first then by |t|."""
    factor = BPS_FACTOR if scale == "bps" else 1.0
    estimated = [r for r in result.rows if r.estimation is not None]
    qs = benjamini_hochberg([r.estimation["p_value"] for r in estimated])
    decorated = []
    for row, q in zip(estimated, qs):
        t_abs = abs(row.estimation["t_stat"])
        sort_key = (0 if row.validated else 1, -t_abs, row.ticker, row.aspect, row.lag)
        marks = _rt_marks(row)
        decorated.append(
            (
                sort_key,
                [
                    row.ticker,
                    row.aspect,
                    row.lag,
                    *marks,
                    "true" if row.validated else "false",
                    repr(row.estimation["beta"] * factor),
                    repr(row.estimation["hac_se"] * factor),
                    repr(row.estimation["p_value"]),
                    repr(q),
                ],
            )
        )
    decorated.sort(key=lambda pair: pair[0])
    return [fields for _, fields in decorated]


def emit_matrix(result: GridResult, path, scale: str = "raw") -> None:
    """Write the refutation matrix CSV (header always present)."""
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(MATRIX_COLUMNS)
        writer.writerows(matrix_rows(result, scale))


def comparison_rows(result: GridResult, scale: str = "raw", threshold: float = 0.4) -> list[list]:
    factor = BPS_FACTOR if scale == "bps" else 1.0
    out = []
    for row in result.rows:
        if row.estimation is None or row.abs_r is None:
            continue
        flagged = (row.abs_r >= threshold) and not row.validated
        out.append(
            [
                row.ticker,
                row.aspect,
                row.lag,
                repr(row.abs_r),
                repr(abs(row.estimation["beta"]) * factor),
                "true" if row.validated else "false",
                "true" if flagged else "false",
            ]
        )
    return out


def compare_correlation(result: GridResult, path, scale: str = "raw", threshold: float = 0.4) -> None:
    """Write the correlation-vs-validated-effect comparison CSV.

    High raw correlations that failed refutation are flagged; the contrast
    between ``abs_r`` and ``abs_beta`` is the deflation diagnostic.
    """
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(COMPARISON_COLUMNS)
        writer.writerows(comparison_rows(result, scale, threshold))


def _row_to_dict(row: SpecRow) -> dict:
    return {
        "ticker": row.ticker,
        "aspect": row.aspect,
        "lag": row.lag,
        "status": row.status,
        "skip_reason": row.skip_reason,
        "estimation": row.estimation,
        "refutation": row.refutation,
        "validated": row.validated,
        "abs_r": row.abs_r,
    }


def grid_to_json(result: GridResult) -> str:
    doc = {"run": result.run, "specs": [_row_to_dict(r) for r in result.rows]}
    return json.dumps(doc, indent=2, sort_keys=True)


def save_grid(result: GridResult, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(grid_to_json(result))
        fh.write("\n")


def load_grid(path) -> GridResult:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    rows = [
        SpecRow(
            ticker=d["ticker"],
            aspect=d["aspect"],
            lag=d["lag"],
            status=d["status"],
            skip_reason=d.get("skip_reason"),
            estimation=d.get("estimation"),
            refutation=d.get("refutation"),
            validated=d.get("validated", False),
            abs_r=d.get("abs_r"),
        )
        for d in doc["specs"]
    ]
    return GridResult(rows=rows, run=doc["run"])
