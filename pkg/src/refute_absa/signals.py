"""Daily sentiment signal construction.

For each aspect-day the raw counts collapse to a bounded net ratio
``(pos - neg) / max(pos + neg, 1)`` and a total activity ``pos + neg + neu``.
The net-ratio series is then z-standardised within the aspect using the
population standard deviation over the full sample; an aspect whose ratio
never varies is marked inactive and yields an all-zero z series.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError
from .ingest import RawSentimentPanel


def net_ratio(pos, neg):
    """Signed sentiment intensity in [-1, 1]; zero-count days map to 0."""
    pos = np.asarray(pos, dtype=float)
    neg = np.asarray(neg, dtype=float)
    return (pos - neg) / np.maximum(pos + neg, 1.0)


def activity(pos, neg, neu):
    """Total mention volume for an aspect-day (exact integer sum)."""
    return np.asarray(pos) + np.asarray(neg) + np.asarray(neu)


def z_normalize(series) -> np.ndarray:
    """Standardise a series to mean 0, population sd 1.

    A constant series (sd exactly 0) maps to all zeros — the degenerate
    rule used to flag inactive aspects downstream.
    """
    series = np.asarray(series, dtype=float)
    if series.size < 2:
        raise InsufficientDataError("z_normalize needs at least 2 observations")
    if series.max() == series.min():  # constant, regardless of fp mean noise
        return np.zeros_like(series)
    mu = series.mean()
    sigma = series.std()  # population convention (divide by T)
    if sigma == 0.0:  # spread too small to resolve in floats
        return np.zeros_like(series)
    return (series - mu) / sigma


@dataclass(frozen=True)
class SentimentPanel:
    """Derived per-aspect signals aligned to the trading calendar."""

    aspect: str
    s: np.ndarray          # net ratio per day
    activity: np.ndarray   # total mentions per day
    z: np.ndarray          # standardised net ratio
    mu: float              # aspect-level mean of s
    sigma: float           # aspect-level population sd of s
    inactive: bool         # True when sigma == 0 (all-zero z)

    @property
    def total_activity(self) -> int:
        return int(self.activity.sum())


def build_panel(raw: RawSentimentPanel) -> SentimentPanel:
    s = net_ratio(raw.pos, raw.neg)
    act = activity(raw.pos, raw.neg, raw.neu)
    z = z_normalize(s)
    constant = bool(s.max() == s.min())
    return SentimentPanel(
        aspect=raw.aspect,
        s=s,
        activity=act,
        z=z,
        mu=float(s.mean()),
        sigma=0.0 if constant else float(s.std()),
        inactive=constant,
    )


def build_panels(raw_panels: dict[str, RawSentimentPanel]) -> dict[str, SentimentPanel]:
    return {aspect: build_panel(raw) for aspect, raw in sorted(raw_panels.items())}


def dump_signals_csv(path, panels: dict[str, SentimentPanel], calendar) -> None:
    """Audit dump: one row per (date, aspect) with s, activity and z."""
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "aspect", "s", "activity", "z"])
        for aspect in sorted(panels):
            panel = panels[aspect]
            for i, d in enumerate(calendar.dates):
                writer.writerow(
                    [
                        d.isoformat(),
                        aspect,
                        repr(float(panel.s[i])),
                        int(panel.activity[i]),
                        repr(float(panel.z[i])),
                    ]
                )
