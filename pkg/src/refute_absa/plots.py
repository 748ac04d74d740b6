"""Static SVG figure emission for grid results.

Three figure families accompany the delimited outputs:

* ``ci_whiskers.svg`` — dot-and-whisker bootstrap CIs for the strongest
  specs, validated ones highlighted, zero line dashed red;
* ``lag_profile_<ticker>_<aspect>.svg`` — coefficient stems across lags for
  every pair with at least one validated lag;
* ``heatmap.svg`` — aspect x lag grid of validated coefficients with
  non-validated cells greyed out.

Artists carry stable SVG ids (``gid``) so emitted coordinates can be checked
against the report numerically.
"""

from __future__ import annotations

import re
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib import colors  # noqa: E402

from .pipeline import BPS_FACTOR, GridResult, SpecRow  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "refute-absa"

_VALIDATED_COLOR = "tab:blue"
_FILTERED_COLOR = "0.62"
_ZERO_COLOR = "tab:red"


def _save(fig, path: Path) -> Path:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def _safe_name(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", text)


def _scale_factor(scale: str) -> float:
    return BPS_FACTOR if scale == "bps" else 1.0


def _unit_label(scale: str) -> str:
    return "basis points per s.d." if scale == "bps" else "daily return per s.d."


def _ci_rows(result: GridResult) -> list[SpecRow]:
    rows = []
    for row in result.rows:
        if row.estimation is None or row.refutation is None:
            continue
        boot = row.refutation["tests"]["bootstrap"]
        if "ci_low" in boot and "ci_high" in boot:
            rows.append(row)
    return rows


def plot_ci_whiskers(
    result: GridResult, path, scale: str = "raw", top_k: int = 10
) -> Path | None:
    """Dot-and-whisker plot of bootstrap CIs for the top-|t| specs."""
    rows = _ci_rows(result)
    rows.sort(key=lambda r: (-abs(r.estimation["t_stat"]), r.ticker, r.aspect, r.lag))
    rows = rows[:top_k]
    if not rows:
        return None
    factor = _scale_factor(scale)
    fig, ax = plt.subplots(figsize=(7.0, 0.55 * len(rows) + 1.6))
    zero = ax.axvline(0.0, color=_ZERO_COLOR, linestyle="--", linewidth=1.0)
    zero.set_gid("zero-line")
    for i, row in enumerate(reversed(rows)):
        boot = row.refutation["tests"]["bootstrap"]
        beta = row.estimation["beta"] * factor
        lo = boot["ci_low"] * factor
        hi = boot["ci_high"] * factor
        color = _VALIDATED_COLOR if row.validated else _FILTERED_COLOR
        container = ax.errorbar(
            [beta], [i],
            xerr=[[beta - lo], [hi - beta]],
            fmt="o", color=color, ecolor=color,
            elinewidth=1.6, capsize=3.0, markersize=5.5,
        )
        container.lines[0].set_gid(f"ci-dot-{i}")
        for coll in container.lines[2]:
            coll.set_gid(f"ci-whisker-{i}")
        ax.annotate(
            f"{beta:.3g}", (hi, i), textcoords="offset points",
            xytext=(6, -3), fontsize=8, color="0.3",
        )
    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels(
        [f"{r.ticker} {r.aspect}$_{{{r.lag}}}$" for r in reversed(rows)], fontsize=9
    )
    ax.set_xlabel(f"coefficient ({_unit_label(scale)}), 95% bootstrap CI")
    ax.set_title("Bootstrap confidence intervals (validated in blue)")
    fig.tight_layout()
    return _save(fig, Path(path))


def plot_lag_profile(
    result: GridResult, ticker: str, aspect: str, path, scale: str = "raw"
) -> Path | None:
    """Stem plot of coefficients across lags; validated lags highlighted."""
    rows = [
        r for r in result.rows
        if r.ticker == ticker and r.aspect == aspect and r.estimation is not None
    ]
    if not rows:
        return None
    rows.sort(key=lambda r: r.lag)
    factor = _scale_factor(scale)
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    ax.axhline(0.0, color=_ZERO_COLOR, linestyle="--", linewidth=1.0)
    for row in rows:
        beta = row.estimation["beta"] * factor
        color = _VALIDATED_COLOR if row.validated else _FILTERED_COLOR
        marker = ax.plot([row.lag], [beta], "o", color=color, markersize=7 if row.validated else 5)[0]
        marker.set_gid(f"lag-marker-{row.lag}-{'validated' if row.validated else 'filtered'}")
        ax.vlines(row.lag, 0.0, beta, color=color, linewidth=1.6)
    ax.set_xticks([r.lag for r in rows])
    ax.set_xlabel("lag (trading days)")
    ax.set_ylabel(f"coefficient ({_unit_label(scale)})")
    ax.set_title(f"{ticker} — {aspect} sentiment across lags")
    fig.tight_layout()
    return _save(fig, Path(path))


def heatmap_matrix(result: GridResult, scale: str = "raw") -> tuple[list, list, np.ndarray]:
    """(aspects, lags, matrix) backing the heatmap; NaN marks greyed cells.

    When several tickers validate the same (aspect, lag) cell, the
    largest-|beta| coefficient wins.
    """
    aspects = result.run.get("aspects") or sorted({r.aspect for r in result.rows})
    lags = result.run.get("lags") or sorted({r.lag for r in result.rows})
    factor = _scale_factor(scale)
    grid = np.full((len(aspects), len(lags)), np.nan)
    for row in result.rows:
        if not row.validated or row.estimation is None:
            continue
        i = aspects.index(row.aspect)
        j = lags.index(row.lag)
        beta = row.estimation["beta"] * factor
        if np.isnan(grid[i, j]) or abs(beta) > abs(grid[i, j]):
            grid[i, j] = beta
    return aspects, lags, grid


def plot_heatmap(result: GridResult, path, scale: str = "raw") -> Path | None:
    """Aspect x lag heatmap of validated coefficients; failures greyed."""
    aspects, lags, grid = heatmap_matrix(result, scale)
    if not aspects or not lags:
        return None
    masked = np.ma.masked_invalid(grid)
    vmax = float(np.nanmax(np.abs(grid))) if np.isfinite(grid).any() else 1.0
    cmap = plt.get_cmap("RdYlGn").copy()
    cmap.set_bad("0.85")
    fig, ax = plt.subplots(figsize=(1.1 * len(lags) + 2.8, 0.42 * len(aspects) + 1.8))
    im = ax.imshow(
        masked, cmap=cmap, norm=colors.Normalize(vmin=-vmax, vmax=vmax),
        aspect="auto", interpolation="nearest",
    )
    im.set_gid("heatmap-cells")
    for i in range(len(aspects)):
        for j in range(len(lags)):
            if not np.isnan(grid[i, j]):
                ax.text(j, i, f"{grid[i, j]:.2g}", ha="center", va="center", fontsize=8)
    ax.set_xticks(range(len(lags)))
    ax.set_xticklabels([f"Lag {l}" for l in lags])
    ax.set_yticks(range(len(aspects)))
    ax.set_yticklabels(aspects, fontsize=8)
    ax.set_title("Validated associations (grey: failed a refutation test)")
    fig.colorbar(im, ax=ax, label=f"coefficient ({_unit_label(scale)})")
    fig.tight_layout()
    return _save(fig, Path(path))


def emit_plots(result: GridResult, plots_dir, scale: str = "raw") -> list[Path]:
    """Render all figure families into ``plots_dir``; returns written paths."""
    plots_dir = Path(plots_dir)
    plots_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    p = plot_ci_whiskers(result, plots_dir / "ci_whiskers.svg", scale)
    if p:
        written.append(p)
    p = plot_heatmap(result, plots_dir / "heatmap.svg", scale)
    if p:
        written.append(p)
    validated_pairs = sorted(
        {(r.ticker, r.aspect) for r in result.rows if r.validated}
    )
    for ticker, aspect in validated_pairs:
        name = f"lag_profile_{_safe_name(ticker)}_{_safe_name(aspect)}.svg"
        p = plot_lag_profile(result, ticker, aspect, plots_dir / name, scale)
        if p:
            written.append(p)
    return written
