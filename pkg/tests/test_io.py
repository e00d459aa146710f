import numpy as np
import pytest

from proxyzoo import (
    Panel,
    ProxySeries,
    ValidationError,
    align_proxy,
    load_panel,
    load_proxies,
    write_panel,
    write_series,
)


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n")


def test_load_panel_basic(tmp_path):
    p = tmp_path / "panel.csv"
    rows = [f"2000-{1 + i // 28:02d}-{1 + i % 28:02d},{i * 0.5},{100 - i}" for i in range(100)]
    write_lines(p, ["date,a,b", *rows])
    panel = load_panel(p)
    assert panel.n == 2 and panel.T == 100
    assert panel.names == ("a", "b")
    assert panel.values[3, 0] == 1.5


def test_load_panel_missing_value(tmp_path):
    p = tmp_path / "panel.csv"
    write_lines(p, ["date,a,b", "2000-01,1.0,2.0", "2000-02,NaN,2.0", "2000-03,1.0,2.0"])
    with pytest.raises(ValidationError, match="missing observable"):
        load_panel(p)


def test_load_panel_unparseable_number(tmp_path):
    p = tmp_path / "panel.csv"
    write_lines(p, ["date,a,b", "2000-01,1.0,2.0", "2000-02,oops,2.0"])
    with pytest.raises(ValidationError, match="could not parse"):
        load_panel(p)


def test_load_panel_sorts_shuffled_rows(tmp_path):
    rng = np.random.default_rng(0)
    dates = [f"t{i:04d}" for i in range(50)]
    vals = rng.standard_normal((50, 2))
    order = rng.permutation(50)
    p = tmp_path / "panel.csv"
    write_lines(p, ["date,x,y"] + [f"{dates[i]},{float(vals[i, 0])!r},{float(vals[i, 1])!r}" for i in order])
    panel = load_panel(p)
    assert list(panel.dates) == sorted(dates)  # sort oracle on the same keys
    assert np.allclose(panel.values, vals)


def test_load_panel_unparseable_date(tmp_path):
    p = tmp_path / "panel.csv"
    write_lines(p, ["date,a,b", "x1,1,2", "longer-key,3,4"])
    with pytest.raises(ValidationError, match="unparseable date"):
        load_panel(p)


def test_panel_validation():
    with pytest.raises(ValidationError, match="two observables"):
        Panel(("a", "b"), np.ones((2, 1)), ("x",))
    with pytest.raises(ValidationError, match="strictly increasing"):
        Panel(("2000-02", "2000-01"), np.ones((2, 2)), ("x", "y"))
    with pytest.raises(ValidationError, match="strictly increasing"):
        Panel(("2000-01", "2000-01"), np.ones((2, 2)), ("x", "y"))


def test_panel_roundtrip_bit_exact(tmp_path):
    rng = np.random.default_rng(42)
    panel = Panel(
        tuple(f"t{i:03d}" for i in range(40)),
        rng.standard_normal((40, 3)) * np.array([1e-7, 1.0, 1e6]),
        ("u", "v", "w"),
    )
    path = tmp_path / "out.csv"
    write_panel(panel, path)
    back = load_panel(path)
    assert back.names == panel.names
    assert back.dates == panel.dates
    assert np.array_equal(back.values, panel.values)


def make_panel(T=60):
    return Panel(
        tuple(f"t{i:03d}" for i in range(T)),
        np.column_stack([np.arange(T, dtype=float), np.ones(T)]),
        ("a", "b"),
    )


def test_align_zero_policy_fills_and_demeans():
    panel = make_panel(60)
    # proxy only covers the back half
    sub = ProxySeries(panel.dates[30:], np.arange(30, dtype=float), "m")
    aligned = align_proxy(sub, panel, "zero")
    assert aligned.dates == panel.dates
    assert np.all(aligned.values[:30] == 0.0)
    observed = aligned.values[30:]
    assert abs(observed.mean()) < 1e-12
    assert aligned.missing_dates == ()


def test_align_identical_dates_no_fill():
    panel = make_panel(30)
    rng = np.random.default_rng(1)
    vals = rng.standard_normal(30)
    s = ProxySeries(panel.dates, vals - vals.mean(), "m")
    aligned = align_proxy(s, panel, "zero")
    assert np.array_equal(aligned.values, s.values)


def test_align_idempotent():
    panel = make_panel(50)
    s = ProxySeries(panel.dates[10:], np.sin(np.arange(40.0)), "m")
    once = align_proxy(s, panel, "zero")
    twice = align_proxy(once, panel, "zero")
    assert np.array_equal(once.values, twice.values)


def test_align_drop_report_keeps_nan():
    panel = make_panel(40)
    s = ProxySeries(panel.dates[15:], np.cos(np.arange(25.0)), "m")
    aligned = align_proxy(s, panel, "drop-report")
    assert aligned.n_missing == 15
    assert aligned.missing_dates == panel.dates[:15]
    aligned_again = align_proxy(aligned, panel, "drop-report")
    assert np.array_equal(
        np.nan_to_num(aligned_again.values), np.nan_to_num(aligned.values)
    )


def test_insufficient_overlap_names_the_proxy(tmp_path):
    panel = make_panel(40)
    good = tmp_path / "good.csv"
    write_lines(good, ["date,g"] + [f"{d},1.{i}" for i, d in enumerate(panel.dates)])
    bad = tmp_path / "bad.csv"
    write_lines(bad, ["date,shorty"] + [f"{d},2.{i}" for i, d in enumerate(panel.dates[:5])])
    with pytest.raises(ValidationError, match="shorty"):
        load_proxies([good, bad], panel)
    # the good one alone loads
    series = load_proxies([good], panel)
    assert series[0].label == "g"


def test_proxy_file_shape_validation(tmp_path):
    panel = make_panel(20)
    p = tmp_path / "wide.csv"
    write_lines(p, ["date,a,b", "t000,1,2"])
    with pytest.raises(ValidationError, match="one value column"):
        load_proxies([p], panel)


def test_write_series_roundtrip(tmp_path):
    panel = make_panel(25)
    vals = np.sin(np.arange(25.0))
    vals[3] = np.nan
    s = ProxySeries(panel.dates, vals, "m1")
    path = tmp_path / "m1.csv"
    write_series(s, path)
    loaded = load_proxies([path], panel, "drop-report")[0]
    assert loaded.n_missing == 1
    mask = ~np.isnan(vals)
    # loader demeans on the observed entries
    assert np.allclose(loaded.values[mask], vals[mask] - vals[mask].mean())
