import re

import numpy as np
import pytest

from test_pipeline import fake_result, fake_row
from refute_absa.plots import (
    emit_plots,
    heatmap_matrix,
    plot_ci_whiskers,
    plot_heatmap,
    plot_lag_profile,
)


def gid_block(svg: str, gid: str) -> str:
    m = re.search(rf'<g id="{gid}"[^>]*>(.*?)</g>', svg, re.S)
    assert m, f"no element with gid {gid}"
    return m.group(1)


def path_coords(block: str) -> list[tuple[float, float]]:
    m = re.search(r'd="M ([0-9.e+-]+) ([0-9.e+-]+)\s+L ([0-9.e+-]+) ([0-9.e+-]+)', block)
    assert m, "no two-point path"
    x1, y1, x2, y2 = map(float, m.groups())
    return [(x1, y1), (x2, y2)]


def use_coords(block: str) -> tuple[float, float]:
    m = re.search(r'<use[^>]*x="([0-9.e+-]+)"[^>]*y="([0-9.e+-]+)"', block)
    assert m, "no marker"
    return float(m.group(1)), float(m.group(2))


def test_whisker_coordinates_match_report_values(tmp_path):
    beta, se = 0.003, 0.001  # CI [0.001, 0.005]
    result = fake_result([fake_row("t0", "a0", 1, (1, 1, 1, 1), beta=beta, se=se)])
    path = tmp_path / "w.svg"
    assert plot_ci_whiskers(result, path) == path
    svg = path.read_text()

    (xz, _), _ = path_coords(gid_block(svg, "zero-line"))
    (x1, y1), (x2, y2) = path_coords(gid_block(svg, "ci-whisker-0"))
    xd, _ = use_coords(gid_block(svg, "ci-dot-0"))
    assert y1 == pytest.approx(y2)  # horizontal whisker

    ci_low, ci_high = beta - 2 * se, beta + 2 * se
    lo_frac = (min(x1, x2) - xz) / (max(x1, x2) - xz)
    dot_frac = (xd - xz) / (max(x1, x2) - xz)
    assert lo_frac == pytest.approx(ci_low / ci_high, abs=1e-3)
    assert dot_frac == pytest.approx(beta / ci_high, abs=1e-3)


def test_heatmap_all_grey_when_nothing_validated(tmp_path):
    rows = [fake_row("t0", "a0", lag, (0, 1, 1, 1)) for lag in range(4)]
    result = fake_result(rows)
    _, _, grid = heatmap_matrix(result)
    assert np.isnan(grid).all()
    path = tmp_path / "h.svg"
    assert plot_heatmap(result, path) == path


def test_heatmap_cell_takes_largest_abs_beta():
    rows = [
        fake_row("t0", "a0", 1, (1, 1, 1, 1), beta=0.0048),
        fake_row("t1", "a0", 1, (1, 1, 1, 1), beta=0.0047),
        fake_row("t0", "a1", 3, (1, 1, 1, 1), beta=-0.0035),
        fake_row("t0", "a2", 2, (0, 1, 1, 1), beta=0.9),  # failed, stays grey
    ]
    aspects, lags, grid = heatmap_matrix(fake_result(rows))
    assert grid[aspects.index("a0"), lags.index(1)] == pytest.approx(0.0048)
    assert grid[aspects.index("a1"), lags.index(3)] == pytest.approx(-0.0035)
    assert np.isnan(grid[aspects.index("a2"), lags.index(2)])


def test_lag_profile_highlights_only_validated_lag(tmp_path):
    rows = [
        fake_row("t0", "a0", lag, (1, 1, 1, 1) if lag == 2 else (0, 1, 1, 1), beta=0.001 * (lag + 1))
        for lag in range(4)
    ]
    path = tmp_path / "lp.svg"
    assert plot_lag_profile(fake_result(rows), "t0", "a0", path) == path
    svg = path.read_text()
    validated = re.findall(r'<g id="lag-marker-(\d)-validated"', svg)
    filtered = re.findall(r'<g id="lag-marker-(\d)-filtered"', svg)
    assert validated == ["2"]
    assert sorted(filtered) == ["0", "1", "3"]


def test_emit_plots_writes_expected_files(tmp_path):
    rows = [
        fake_row("t0", "a0", lag, (1, 1, 1, 1) if lag == 1 else (0, 1, 1, 1))
        for lag in range(4)
    ]
    written = emit_plots(fake_result(rows), tmp_path / "plots")
    names = sorted(p.name for p in written)
    assert "ci_whiskers.svg" in names
    assert "heatmap.svg" in names
    assert "lag_profile_t0_a0.svg" in names


def test_emit_plots_empty_grid_still_renders_heatmap(tmp_path):
    result = fake_result([], aspects=["a0"])
    written = emit_plots(result, tmp_path / "plots")
    assert [p.name for p in written] == ["heatmap.svg"]
