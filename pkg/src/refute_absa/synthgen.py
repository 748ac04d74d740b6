"""Synthetic sentiment/price panels with known planted truths.

The generator is the verification oracle for the whole pipeline: it plants
effects of known size and lag, null aspects, and confounded aspects whose
common driver moves counts and returns together, then records every truth in
a manifest. Builtin scenarios:

* ``null`` — six tickers, 24 aspects, every effect zero (calibration runs);
* ``power`` — one effect tuned so the HAC t-statistic lands near 6;
* ``confounded`` — a high-correlation aspect whose association collapses
  once the activity control absorbs the common driver;
* ``table1`` — a hand-engineered grid whose emitted refutation matrix
  reproduces a benchmark pass/fail pattern: five validated associations and
  four near-misses that each trip a single named test.

Generation is deterministic per seed and writes the same CSV schemas the
ingest module consumes, plus ``truth.json``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from . import rng
from .errors import ConfigError, GenerationError
from .estimator import ModelSpec, build_design, estimate_design
from .ingest import RawSentimentPanel, ReturnPanel, TradingCalendar
from .signals import SentimentPanel, build_panel

BUILTIN_SCENARIOS = ("null", "power", "confounded", "table1")

# Master seed the table1 fixture is calibrated against (the RefutationConfig
# default); the random-common-cause row is seed-coupled by construction.
TABLE1_MASTER_SEED = 42

_CONFOUND_MIX = 0.8        # weight of the common driver inside the net ratio
_CONFOUND_VOLUME = 0.5     # relative volume swing per unit of the driver


@dataclass(frozen=True)
class TickerSpec:
    name: str
    noise_vol: float = 0.01
    drift: float = 0.0
    init_price: float = 100.0


@dataclass(frozen=True)
class PlantedEffect:
    ticker: str
    beta: float
    lag: int


@dataclass(frozen=True)
class AspectSpec:
    name: str
    kind: str = "null"  # null | planted | confounded
    effects: tuple[PlantedEffect, ...] = ()
    strength: float = 0.0             # confounded: return loading (x noise_vol)
    affected: tuple[str, ...] = ()    # confounded: tickers receiving the driver
    volume: int | None = None         # overrides the scenario base volume


@dataclass(frozen=True)
class Scenario:
    name: str
    days: int
    tickers: tuple[TickerSpec, ...]
    aspects: tuple[AspectSpec, ...]
    seed: int = 0
    start: str = "2022-10-03"
    base_volume: int = 200
    volume_dispersion: float = 0.0
    ar_phi: float = 0.3
    s_scale: float = 0.25

    def __post_init__(self):
        if self.days < 10:
            raise ConfigError("scenario needs at least 10 days")
        if not self.tickers or not self.aspects:
            raise ConfigError("scenario needs at least one ticker and one aspect")
        for a in self.aspects:
            for e in a.effects:
                if not np.isfinite(e.beta):
                    raise ConfigError(f"{a.name}: non-finite planted beta")
                if e.lag < 0:
                    raise ConfigError(f"{a.name}: negative planted lag")


@dataclass
class SynthData:
    calendar: TradingCalendar
    prices: dict[str, np.ndarray]
    counts: dict[str, tuple[np.ndarray, np.ndarray, np.ndarray]]
    truth: dict

    def return_panels(self) -> dict[str, ReturnPanel]:
        return {t: ReturnPanel(t, p) for t, p in self.prices.items()}

    def raw_sentiment(self) -> dict[str, RawSentimentPanel]:
        return {
            a: RawSentimentPanel(a, pos, neg, neu)
            for a, (pos, neg, neu) in self.counts.items()
        }

    def signal_panels(self) -> dict[str, SentimentPanel]:
        return {a: build_panel(raw) for a, raw in self.raw_sentiment().items()}


def weekday_calendar(start: str, days: int) -> TradingCalendar:
    """``days`` consecutive weekdays beginning at (or after) ``start``."""
    out = []
    d = date.fromisoformat(start)
    while len(out) < days:
        if d.weekday() < 5:
            out.append(d)
        d += timedelta(days=1)
    return TradingCalendar(tuple(out))


def _ar1(gen: np.random.Generator, T: int, phi: float) -> np.ndarray:
    """Stationary AR(1) path with unit marginal variance."""
    eps = gen.standard_normal(T)
    path = np.empty(T)
    path[0] = eps[0]
    scale = np.sqrt(1.0 - phi * phi)
    for t in range(1, T):
        path[t] = phi * path[t - 1] + scale * eps[t]
    return path


def _counts_from_latent(
    gen: np.random.Generator,
    latent_s: np.ndarray,
    volume: float,
    dispersion: float,
    volume_mult: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Quantise a bounded sentiment path into (pos, neg, neu) counts.

    The polar volume splits so the recovered net ratio approximates the
    latent path: pos = round(v(1+s)/2), neg = round(v(1-s)/2); neutral
    counts are drawn independently at the same volume scale.
    """
    T = len(latent_s)
    lam = np.full(T, float(volume))
    if volume_mult is not None:
        lam = lam * np.maximum(volume_mult, 0.05)
    if dispersion > 0:
        lam = lam * gen.gamma(1.0 / dispersion, dispersion, size=T)
    v = gen.poisson(np.maximum(lam, 1e-9)).astype(np.int64)
    pos = np.round(v * (1.0 + latent_s) / 2.0).astype(np.int64)
    neg = np.round(v * (1.0 - latent_s) / 2.0).astype(np.int64)
    neu = gen.poisson(np.maximum(lam, 1e-9)).astype(np.int64)
    return pos, neg, neu


def generate(scenario: Scenario) -> SynthData:
    """Materialise a scenario into aligned price and sentiment panels.

    Latent per-aspect sentiment follows a stationary AR(1); counts quantise
    a clamped affine image of the latent path; returns are built from the
    planted effects, confounder paths and per-ticker noise; prices integrate
    the returns. The truth manifest records every planted quantity.
    """
    cal = weekday_calendar(scenario.start, scenario.days)
    T = scenario.days
    names = [t.name for t in scenario.tickers]
    if len(set(names)) != len(names):
        raise ConfigError("duplicate ticker names")
    if len({a.name for a in scenario.aspects}) != len(scenario.aspects):
        raise ConfigError("duplicate aspect names")

    latents: dict[str, np.ndarray] = {}
    drivers: dict[str, np.ndarray] = {}
    counts: dict[str, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
    for a in scenario.aspects:
        gen = rng.substream(scenario.seed, "synth", "aspect", a.name)
        z_latent = _ar1(gen, T, scenario.ar_phi)
        mult = None
        if a.kind == "confounded":
            u = rng.substream(scenario.seed, "synth", "confounder", a.name).standard_normal(T)
            drivers[a.name] = u
            z_latent = np.sqrt(1.0 - _CONFOUND_MIX**2) * z_latent + _CONFOUND_MIX * u
            mult = 1.0 + _CONFOUND_VOLUME * u
        latents[a.name] = z_latent
        s = np.clip(scenario.s_scale * z_latent, -0.99, 0.99)
        vol = a.volume if a.volume is not None else scenario.base_volume
        pos, neg, neu = _counts_from_latent(gen, s, vol, scenario.volume_dispersion, mult)
        recovered = (pos - neg) / np.maximum(pos + neg, 1)
        if recovered.std() == 0.0:
            raise GenerationError(f"aspect {a.name!r}: degenerate (constant recovered ratio)")
        counts[a.name] = (pos, neg, neu)

    effects = [
        {"ticker": e.ticker, "aspect": a.name, "lag": e.lag, "beta": e.beta}
        for a in scenario.aspects
        for e in a.effects
    ]
    prices: dict[str, np.ndarray] = {}
    for t in scenario.tickers:
        gen = rng.substream(scenario.seed, "synth", "ticker", t.name)
        eps = gen.standard_normal(T)
        r = np.zeros(T)
        r[1:] = t.drift + t.noise_vol * eps[1:]
        for a in scenario.aspects:
            for e in a.effects:
                if e.ticker != t.name:
                    continue
                z = latents[a.name]
                idx = np.arange(max(1, e.lag), T)
                r[idx] += e.beta * z[idx - e.lag]
            if a.kind == "confounded" and (not a.affected or t.name in a.affected):
                r[1:] += a.strength * t.noise_vol * drivers[a.name][1:]
        prices[t.name] = _integrate(t.init_price, r)

    truth = {
        "scenario": asdict(scenario),
        "effects": effects,
        "latent": {a: latents[a].tolist() for a in latents},
        "confounders": {a: drivers[a].tolist() for a in drivers},
    }
    return SynthData(calendar=cal, prices=prices, counts=counts, truth=truth)


def _integrate(init_price: float, returns: np.ndarray) -> np.ndarray:
    if np.any(returns <= -1.0):
        raise GenerationError("a synthetic return fell at or below -100%")
    growth = np.concatenate([[1.0], 1.0 + returns[1:]])
    return init_price * np.cumprod(growth)


def write_synth(data: SynthData, out_dir) -> dict[str, Path]:
    """Write prices.csv, sentiment.csv and truth.json into ``out_dir``."""
    from .ingest import write_prices_csv, write_sentiment_csv

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "prices": out_dir / "prices.csv",
        "sentiment": out_dir / "sentiment.csv",
        "truth": out_dir / "truth.json",
    }
    write_prices_csv(paths["prices"], data.return_panels(), data.calendar)
    write_sentiment_csv(paths["sentiment"], data.raw_sentiment(), data.calendar)
    with open(paths["truth"], "w", encoding="utf-8") as fh:
        json.dump(data.truth, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths


# ---------------------------------------------------------------------------
# Builtin scenarios
# ---------------------------------------------------------------------------


def null_scenario(seed: int = 0, n_tickers: int = 6, n_aspects: int = 24, days: int = 120) -> Scenario:
    """All-null grid: no aspect moves any ticker. Volumes are tiered so
    activity ranking (and therefore top-k selection) is deterministic."""
    tickers = tuple(TickerSpec(f"T{i:02d}", noise_vol=0.01) for i in range(n_tickers))
    aspects = tuple(
        AspectSpec(f"aspect{i:02d}", kind="null", volume=150 + 5 * i) for i in range(n_aspects)
    )
    return Scenario(
        name="null", days=days, tickers=tickers, aspects=aspects, seed=seed,
    )


def power_scenario(
    seed: int = 0, days: int = 120, lag: int = 1, target_t: float = 6.0, noise_vol: float = 0.01
) -> Scenario:
    """One planted effect sized so the expected HAC t-statistic is near
    ``target_t``; weak sentiment persistence keeps adjacent lags quiet."""
    n_eff = days - 2  # rows surviving alignment at lag <= 2 with controls
    beta = target_t * noise_vol / np.sqrt(n_eff)
    tickers = (TickerSpec("T00", noise_vol=noise_vol),)
    aspects = (
        AspectSpec("planted", kind="planted", effects=(PlantedEffect("T00", float(beta), lag),)),
        AspectSpec("null_a", kind="null"),
        AspectSpec("null_b", kind="null"),
    )
    return Scenario(
        name="power", days=days, tickers=tickers, aspects=aspects, seed=seed, ar_phi=0.1,
    )


def confounded_scenario(seed: int = 0, days: int = 250) -> Scenario:
    """A common driver moves one aspect's counts and two tickers' returns at
    lag 0: raw correlation is high but the activity control absorbs the
    driver, so the association fails refutation."""
    tickers = (TickerSpec("T00", noise_vol=0.01), TickerSpec("T01", noise_vol=0.012))
    aspects = (
        AspectSpec("hype", kind="confounded", strength=1.5, volume=240),
        AspectSpec("null_a", kind="null"),
        AspectSpec("null_b", kind="null"),
        AspectSpec("null_c", kind="null"),
    )
    return Scenario(
        name="confounded", days=days, tickers=tickers, aspects=aspects, seed=seed,
    )


def builtin_scenario(name: str, seed: int = 0) -> Scenario:
    if name == "null":
        return null_scenario(seed)
    if name == "power":
        return power_scenario(seed)
    if name == "confounded":
        return confounded_scenario(seed)
    raise ConfigError(f"unknown builtin scenario {name!r}; expected one of {BUILTIN_SCENARIOS}")


def generate_builtin(name: str, seed: int = 0) -> SynthData:
    if name == "table1":
        return table1_fixture(seed=seed)
    return generate(builtin_scenario(name, seed))


# ---------------------------------------------------------------------------
# Scenario (de)serialisation for the CLI
# ---------------------------------------------------------------------------


def scenario_from_dict(doc: dict) -> Scenario:
    tickers = tuple(TickerSpec(**t) for t in doc.get("tickers", []))
    aspects = tuple(
        AspectSpec(
            name=a["name"],
            kind=a.get("kind", "null"),
            effects=tuple(PlantedEffect(**e) for e in a.get("effects", [])),
            strength=a.get("strength", 0.0),
            affected=tuple(a.get("affected", [])),
            volume=a.get("volume"),
        )
        for a in doc.get("aspects", [])
    )
    kwargs = {
        k: doc[k]
        for k in ("name", "days", "seed", "start", "base_volume", "volume_dispersion", "ar_phi", "s_scale")
        if k in doc
    }
    return Scenario(tickers=tickers, aspects=aspects, **kwargs)


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# The engineered benchmark fixture
# ---------------------------------------------------------------------------

TABLE1_TICKERS = ("BP", "Shell", "Exxon", "NextEra", "Clearway", "Brookfield")
TABLE1_ASPECTS = ("economy", "market", "inflation", "investors", "finance", "growth")

# Verdict letters: P = pass, F = fail, in test order placebo/rcc/subset/bootstrap.
TABLE1_TARGET_PATTERN = {
    "BP:economy:1": "PPPP",
    "Shell:economy:1": "PPPP",
    "NextEra:market:2": "PPPP",
    "NextEra:inflation:3": "PPPP",
    "Clearway:investors:2": "PPPP",
    "Exxon:finance:1": "FPPP",
    "BP:inflation:0": "PFPP",
    # A subset-only failure (PPFP) is statistically unattainable at the
    # default test parameters: subsample sign-flip noise is exactly half the
    # bootstrap noise, so any spec unstable enough to fail the 80% sign
    # agreement has a bootstrap CI that straddles zero. The fixture plants a
    # borderline effect that fails the bootstrap gate instead.
    "Brookfield:market:1": "PPPF",
    "Shell:investors:0": "PPPF",
}

_T1_DAYS = 92
_T1_PHI = 0.15
_T1_VOLUME = 240
_T1_SSCALE = 0.25


def _t1_returns_base(gen: np.random.Generator, T: int, noise_vol: float, het: np.ndarray | None) -> np.ndarray:
    eps = gen.standard_normal(T)
    scale = np.full(T, noise_vol) if het is None else noise_vol * het
    r = np.zeros(T)
    r[1:] = (scale * eps)[1:]
    return r


def _t1_target_effect(
    spec: ModelSpec,
    signal: SentimentPanel,
    returns_vec: np.ndarray,
    init_price: float,
    target_t: float,
) -> tuple[np.ndarray, float]:
    """Shift returns along the aligned treatment so the realised HAC t-stat
    hits ``target_t``. Returns the new vector and the realised t."""
    T = len(returns_vec)
    idx = np.arange(max(1, spec.lag), T)
    realized = np.nan
    vec = returns_vec
    for _ in range(8):
        panel = ReturnPanel(spec.ticker, _integrate(init_price, vec))
        design = build_design(spec, signal, panel)
        est = estimate_design(spec, design)
        realized = est.t_stat
        if abs(realized - target_t) < 5e-3:
            break
        delta = (target_t - realized) * est.hac_se
        vec = vec.copy()
        vec[idx] += delta * signal.z[idx - spec.lag]
    return vec, float(realized)


def table1_fixture(seed: int = 42) -> SynthData:
    """Panels engineered to reproduce the benchmark validation pattern.

    Five specs validate outright (four positive, one negative effect at lag
    3); four more each trip a single refutation test:

    * a placebo failure from one extreme return day whose treatment value
      sits at the series mean (null permutations occasionally land large
      sentiment on that day, inflating the null quantile past the genuine
      bulk effect);
    * a random-common-cause failure built against the exact synthetic
      confounder the test will draw under master seed 42: the aspect series
      is correlated with that draw and the returns carry it, so omitting it
      biases the coefficient positive while including it exposes a small
      negative partial effect;
    * two bootstrap failures from heteroskedastic noise concentrated on
      high-|z| days, which widens resampling spread relative to the
      permutation null so a placebo-passing effect still straddles zero.

    The pattern is calibrated against run master seed 42 (the default); the
    random-common-cause row is specific to that seed.
    """
    T = _T1_DAYS
    cal = weekday_calendar("2022-10-03", T)

    # Sentiment: the confounder the rcc test will draw for (BP, inflation, 0).
    w_key = rng.stream_key(TABLE1_MASTER_SEED, "BP", "inflation", 0, "rcc")
    w_draw = rng.iteration_stream(w_key, 0).standard_normal(T)

    latents: dict[str, np.ndarray] = {}
    counts: dict[str, tuple] = {}
    for name in TABLE1_ASPECTS:
        gen = rng.substream(seed, "table1", "aspect", name)
        base = _ar1(gen, T, _T1_PHI)
        if name == "inflation":
            rho = 0.65
            w_std = (w_draw - w_draw.mean()) / w_draw.std()
            base = rho * w_std + np.sqrt(1 - rho**2) * base
        latents[name] = base
        s = np.clip(_T1_SSCALE * base, -0.99, 0.99)
        counts[name] = _counts_from_latent(gen, s, _T1_VOLUME, 0.0)
    signals = {
        name: build_panel(RawSentimentPanel(name, *counts[name])) for name in TABLE1_ASPECTS
    }

    z_mkt = signals["market"].z
    z_inv = signals["investors"].z

    def het_profile(z_aligned: np.ndarray) -> np.ndarray:
        # Noise sd swells on high-|z| days: robust SE outruns the iid SE,
        # so bootstrap spread beats the permutation-null spread ~2.3x.
        return np.sqrt(0.25 + 0.75 * z_aligned**6 / 15.0)

    prices: dict[str, np.ndarray] = {}
    achieved: dict[str, float] = {}

    # --- BP: validated economy lag 1; rcc-failing inflation lag 0 ----------
    gen = rng.substream(seed, "table1", "ticker", "BP")
    nv = 0.009
    base = _t1_returns_base(gen, T, nv, None)
    kappa, delta = 3.0 * nv, -0.75 * nv
    spec_infl = ModelSpec("BP", "inflation", 0)
    spec_econ = ModelSpec("BP", "economy", 1)
    z_infl = signals["inflation"].z
    econ_add = np.zeros(T)

    def bp_vec(k, d, econ_component):
        r = base.copy()
        r[1:] += k * w_draw[1:] + d * z_infl[1:]
        return r + econ_component

    def bp_measure(k, d, econ_component):
        panel = ReturnPanel("BP", _integrate(100.0, bp_vec(k, d, econ_component)))
        design = build_design(spec_infl, signals["inflation"], panel)
        est = estimate_design(spec_infl, design)
        x_aug = np.column_stack([design.X, w_draw[design.day_index]])
        coef = np.linalg.lstsq(x_aug, design.y, rcond=None)[0]
        resid = design.y - x_aug @ coef
        dof = len(design.y) - x_aug.shape[1]
        xtx_inv = np.linalg.inv(x_aug.T @ x_aug)
        se_rcc = float(np.sqrt(resid @ resid / dof * xtx_inv[1, 1]))
        return est.t_stat, float(coef[design.treatment_col] / se_rcc)

    target = np.array([5.0, -2.0])  # (HAC t without the draw, classical t with it)
    kappa, delta = 1.5 * nv, -0.6 * nv
    for _ in range(4):  # alternate the 2-target solve with economy targeting
        for _ in range(8):  # damped Newton on (kappa, delta)
            f0 = np.array(bp_measure(kappa, delta, econ_add))
            err = target - f0
            if np.max(np.abs(err)) < 0.02:
                break
            dk, dd = 0.05 * nv, 0.05 * nv
            fk = np.array(bp_measure(kappa + dk, delta, econ_add))
            fd = np.array(bp_measure(kappa, delta + dd, econ_add))
            jac = np.column_stack([(fk - f0) / dk, (fd - f0) / dd])
            step = np.clip(np.linalg.solve(jac, err), -1.5 * nv, 1.5 * nv)
            kappa = float(np.clip(kappa + step[0], 0.3 * nv, 8.0 * nv))
            delta = float(np.clip(delta + step[1], -5.0 * nv, 0.0))
        vec = bp_vec(kappa, delta, np.zeros(T))
        new_vec, achieved["BP:economy:1"] = _t1_target_effect(
            spec_econ, signals["economy"], vec + econ_add, 100.0, 6.5
        )
        econ_add = new_vec - vec
    achieved["BP:inflation:0"], achieved["BP:inflation:0:rcc_t"] = bp_measure(kappa, delta, econ_add)
    prices["BP"] = _integrate(100.0, bp_vec(kappa, delta, econ_add))

    # --- Shell: validated economy lag 1; bootstrap-failing investors lag 0 -
    gen = rng.substream(seed, "table1", "ticker", "Shell")
    nv = 0.01
    vec = _t1_returns_base(gen, T, nv, het_profile(z_inv))
    vec, achieved["Shell:investors:0"] = _t1_target_effect(
        ModelSpec("Shell", "investors", 0), signals["investors"], vec, 100.0, 1.65
    )
    vec, achieved["Shell:economy:1"] = _t1_target_effect(
        ModelSpec("Shell", "economy", 1), signals["economy"], vec, 100.0, 6.5
    )
    prices["Shell"] = _integrate(100.0, vec)

    # --- Exxon: placebo-failing finance lag 1 ------------------------------
    gen = rng.substream(seed, "table1", "ticker", "Exxon")
    nv = 0.011
    vec = _t1_returns_base(gen, T, nv, None)
    spec_fin = ModelSpec("Exxon", "finance", 1)
    z_fin = signals["finance"].z
    # Outlier day whose lag-1 treatment value is closest to the mean: the
    # genuine fit barely sees it, permuted treatments occasionally do.
    candidates = np.arange(3, T - 1)
    outlier_day = int(candidates[np.argmin(np.abs(z_fin[candidates - 1]))])
    for _ in range(3):
        vec, achieved["Exxon:finance:1"] = _t1_target_effect(
            spec_fin, signals["finance"], vec, 100.0, 5.0
        )
        panel = ReturnPanel("Exxon", _integrate(100.0, vec))
        est = estimate_design(spec_fin, build_design(spec_fin, signals["finance"], panel))
        y_outlier = 2.4 * abs(est.beta) * est.n_obs / 1.96
        vec = vec.copy()
        vec[outlier_day] = y_outlier  # replace, don't stack across rounds
    prices["Exxon"] = _integrate(100.0, vec)

    # --- NextEra: validated market lag 2 and negative inflation lag 3 ------
    gen = rng.substream(seed, "table1", "ticker", "NextEra")
    vec = _t1_returns_base(gen, T, 0.01, None)
    vec, achieved["NextEra:market:2"] = _t1_target_effect(
        ModelSpec("NextEra", "market", 2), signals["market"], vec, 100.0, 6.5
    )
    vec, achieved["NextEra:inflation:3"] = _t1_target_effect(
        ModelSpec("NextEra", "inflation", 3), signals["inflation"], vec, 100.0, -6.5
    )
    # one re-touch: the second targeting nudges the first via the return control
    vec, achieved["NextEra:market:2"] = _t1_target_effect(
        ModelSpec("NextEra", "market", 2), signals["market"], vec, 100.0, 6.5
    )
    prices["NextEra"] = _integrate(100.0, vec)

    # --- Clearway: validated investors lag 2 -------------------------------
    gen = rng.substream(seed, "table1", "ticker", "Clearway")
    vec = _t1_returns_base(gen, T, 0.0095, None)
    vec, achieved["Clearway:investors:2"] = _t1_target_effect(
        ModelSpec("Clearway", "investors", 2), signals["investors"], vec, 100.0, 6.5
    )
    prices["Clearway"] = _integrate(100.0, vec)

    # --- Brookfield: borderline market lag 1 (bootstrap gate trips) --------
    gen = rng.substream(seed, "table1", "ticker", "Brookfield")
    nv = 0.012
    z_mkt_lag = np.concatenate([[0.0], z_mkt[:-1]])
    vec = _t1_returns_base(gen, T, nv, het_profile(z_mkt_lag))
    vec, achieved["Brookfield:market:1"] = _t1_target_effect(
        ModelSpec("Brookfield", "market", 1), signals["market"], vec, 100.0, 1.50
    )
    prices["Brookfield"] = _integrate(100.0, vec)

    truth = {
        "scenario": {
            "name": "table1",
            "days": T,
            "seed": seed,
            "tickers": list(TABLE1_TICKERS),
            "aspects": list(TABLE1_ASPECTS),
            "base_volume": _T1_VOLUME,
            "ar_phi": _T1_PHI,
            "s_scale": _T1_SSCALE,
        },
        "master_seed": TABLE1_MASTER_SEED,
        "target_pattern": dict(TABLE1_TARGET_PATTERN),
        "achieved_t_stats": achieved,
        "latent": {a: latents[a].tolist() for a in latents},
        "notes": (
            "Run the grid with master seed 42: the rcc row is constructed "
            "against that stream. Verdict letters are placebo/rcc/subset/"
            "bootstrap with P=pass, F=fail."
        ),
    }
    return SynthData(calendar=cal, prices=prices, counts=counts, truth=truth)
