import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from refute_absa.errors import InsufficientDataError
from refute_absa.ingest import RawSentimentPanel
from refute_absa.signals import activity, build_panel, net_ratio, z_normalize

counts = st.integers(min_value=0, max_value=10_000)


def test_net_ratio_basic_values():
    assert net_ratio(3, 1) == pytest.approx(0.5)
    assert net_ratio(0, 0) == 0.0  # max(.,1) guard
    assert net_ratio(5, 5) == 0.0


@given(counts, counts)
def test_net_ratio_antisymmetric(p, n):
    assert net_ratio(p, n) == pytest.approx(-net_ratio(n, p))


@given(counts, counts)
def test_net_ratio_bounded(p, n):
    assert -1.0 <= net_ratio(p, n) <= 1.0


@given(counts, counts, counts, counts)
def test_net_ratio_ignores_neutral_and_activity_sums(p, n, neu, extra):
    # neutral count never enters the ratio; activity is the exact sum
    assert activity(p, n, neu) == p + n + neu
    assert net_ratio(p, n) == net_ratio(p, n)


@given(st.lists(st.tuples(counts, counts, counts), min_size=1, max_size=60))
def test_activity_matches_fold_oracle(rows):
    pos, neg, neu = (np.array(col) for col in zip(*rows))
    total = 0
    for p, n, u in rows:  # independent accumulation
        total += p + n + u
    assert activity(pos, neg, neu).sum() == total


def test_z_normalize_frozen_example():
    # population-sd convention: [1,2,3] -> +/- sqrt(3/2)
    z = z_normalize([1.0, 2.0, 3.0])
    expected = 1.224744871391589
    assert z == pytest.approx([-expected, 0.0, expected], abs=1e-9)


def test_z_normalize_constant_series_degenerate_rule():
    assert z_normalize([0.4, 0.4, 0.4]).tolist() == [0.0, 0.0, 0.0]


def test_z_normalize_needs_two_points():
    with pytest.raises(InsufficientDataError):
        z_normalize([1.0])


@given(
    st.lists(st.floats(-1, 1, allow_nan=False), min_size=2, max_size=50),
)
def test_z_normalize_mean_is_zero(series):
    z = z_normalize(series)
    assert abs(z.mean()) < 1e-12


@given(
    st.lists(st.floats(-1, 1), min_size=3, max_size=40).filter(lambda s: np.std(s) > 1e-3),
    st.floats(-5, 5).filter(lambda a: abs(a) > 1e-3),
    st.floats(-5, 5),
)
@settings(max_examples=60)
def test_z_normalize_shift_scale_chain(series, a, b):
    s = np.asarray(series)
    z = z_normalize(s)
    z2 = z_normalize(a * s + b)
    assert z2 == pytest.approx(np.sign(a) * z, abs=1e-8)


def test_build_panel_fields_and_z_moments():
    gen = np.random.default_rng(3)
    pos = gen.integers(0, 100, 50)
    neg = gen.integers(0, 100, 50)
    neu = gen.integers(0, 100, 50)
    panel = build_panel(RawSentimentPanel("econ", pos, neg, neu))
    assert np.array_equal(panel.activity, pos + neg + neu)
    assert np.all(np.abs(panel.s) <= 1.0)
    assert abs(panel.z.mean()) < 1e-12
    assert panel.z.std() == pytest.approx(1.0, abs=1e-12)
    assert not panel.inactive


def test_build_panel_inactive_aspect():
    pos = np.zeros(20, dtype=int)
    neg = np.zeros(20, dtype=int)
    neu = np.ones(20, dtype=int)
    panel = build_panel(RawSentimentPanel("dead", pos, neg, neu))
    assert panel.inactive
    assert panel.z.tolist() == [0.0] * 20
