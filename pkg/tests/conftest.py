"""Shared fixtures: tiny CSV builders and standard synthetic panels."""

from __future__ import annotations

import numpy as np
import pytest

from refute_absa.ingest import RawSentimentPanel, ReturnPanel
from refute_absa.signals import build_panel


def write_csv(path, header, rows):
    lines = [",".join(header)] + [",".join(str(c) for c in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def prices_csv(tmp_path):
    def make(rows, name="prices.csv"):
        return write_csv(tmp_path / name, ["date", "ticker", "adj_close"], rows)

    return make


@pytest.fixture
def sentiment_csv(tmp_path):
    def make(rows, name="sentiment.csv"):
        return write_csv(tmp_path / name, ["date", "aspect", "pos", "neg", "neu"], rows)

    return make


def make_sentiment_panel(seed: int, T: int, aspect: str = "news", volume: int = 200,
                         phi: float = 0.2):
    """AR(1) latent path quantised into counts, returned as a built panel."""
    gen = np.random.default_rng(seed)
    eps = gen.standard_normal(T)
    z = np.empty(T)
    z[0] = eps[0]
    for t in range(1, T):
        z[t] = phi * z[t - 1] + np.sqrt(1 - phi * phi) * eps[t]
    s = np.clip(0.25 * z, -0.99, 0.99)
    pos = np.round(volume * (1 + s) / 2).astype(np.int64)
    neg = np.round(volume * (1 - s) / 2).astype(np.int64)
    neu = gen.poisson(volume, T)
    return build_panel(RawSentimentPanel(aspect, pos, neg, neu)), z


def make_return_panel(seed: int, T: int, ticker: str = "TST", beta: float = 0.0,
                      treatment: np.ndarray | None = None, lag: int = 0,
                      noise: float = 0.01, drift: float = 0.0):
    """Returns driven by optional planted treatment plus Gaussian noise."""
    gen = np.random.default_rng(seed + 10_000)
    r = np.zeros(T)
    r[1:] = drift + noise * gen.standard_normal(T - 1)
    if treatment is not None and beta != 0.0:
        idx = np.arange(max(1, lag), T)
        r[idx] += beta * treatment[idx - lag]
    prices = 100.0 * np.cumprod(np.concatenate([[1.0], 1.0 + r[1:]]))
    return ReturnPanel(ticker, prices)
