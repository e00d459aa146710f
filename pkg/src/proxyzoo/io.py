"""Loading, aligning, and validating observable panels and proxy series.

Dates are opaque ordered keys: they are parsed once (integer, datetime, or
equal-length string) to establish ordering and cross-file alignment, and kept
verbatim otherwise.  No frequency arithmetic is performed; users supplying
mixed-frequency proxies must pre-aggregate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .exceptions import ValidationError

__all__ = [
    "Panel",
    "ProxySeries",
    "load_panel",
    "load_proxies",
    "align_proxy",
    "write_panel",
    "write_series",
]

MIN_PROXY_OVERLAP = 10
MISSING_POLICIES = ("zero", "drop-report")


def _date_keys(dates) -> np.ndarray:
    """Canonical sortable keys for a date column.

    Tries integers, then datetimes, then equal-length strings (lexicographic).
    """
    arr = [str(d) for d in dates]
    try:
        return np.array([int(d) for d in arr], dtype=np.int64)
    except ValueError:
        pass
    try:
        return pd.to_datetime(arr, format="ISO8601").to_numpy()
    except (ValueError, TypeError):
        pass
    try:
        return pd.to_datetime(arr).to_numpy()
    except (ValueError, TypeError):
        pass
    if len({len(d) for d in arr}) == 1:
        return np.array(arr, dtype=object)
    raise ValidationError(
        "unparseable date column: not integers, not datetimes, and strings "
        "of unequal length have no defined order"
    )


@dataclass(frozen=True)
class Panel:
    """Observable panel: T dates by n variables, no missing values."""

    dates: tuple
    values: np.ndarray
    names: tuple

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=float)
        dates = tuple(str(d) for d in self.dates)
        names = tuple(str(c) for c in self.names)
        if values.ndim != 2:
            raise ValidationError("panel values must be a T x n matrix")
        T, n = values.shape
        if n < 2:
            raise ValidationError("panel needs at least two observables")
        if len(dates) != T or len(names) != n:
            raise ValidationError("dates/names do not match the value matrix")
        bad = np.argwhere(~np.isfinite(values))
        if bad.size:
            r, c = bad[0]
            raise ValidationError(
                f"missing observable at date {dates[r]!r}, column {names[c]!r}"
            )
        keys = _date_keys(dates)
        if np.any(keys[1:] <= keys[:-1]):
            raise ValidationError("panel dates must be strictly increasing")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "names", names)

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def index_of(self, variable) -> int:
        """Column index from a name or a 0-based integer index."""
        if isinstance(variable, (int, np.integer)):
            if not 0 <= variable < self.n:
                raise ValidationError(f"variable index {variable} out of range")
            return int(variable)
        try:
            return self.names.index(str(variable))
        except ValueError:
            raise ValidationError(f"unknown variable {variable!r}") from None


@dataclass(frozen=True)
class ProxySeries:
    """One external proxy series; NaN marks missing entries."""

    dates: tuple
    values: np.ndarray
    label: str
    missing_dates: tuple = field(default_factory=tuple)

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=float)
        if values.ndim != 1 or len(self.dates) != values.shape[0]:
            raise ValidationError("proxy values must be one entry per date")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dates", tuple(str(d) for d in self.dates))

    @property
    def n_missing(self) -> int:
        return int(np.isnan(self.values).sum())


def load_panel(path, date_column: str | None = None) -> Panel:
    """Read a delimited text file with a header row into a Panel.

    The date column defaults to the first column.  Rows are sorted by date;
    any missing or non-numeric observable is a hard error.
    """
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"panel file not found: {path}")
    df = pd.read_csv(path, dtype=str, keep_default_na=False)
    if df.shape[1] < 2:
        raise ValidationError("panel file needs a date column plus observables")
    date_col = date_column if date_column is not None else df.columns[0]
    if date_col not in df.columns:
        raise ValidationError(f"date column {date_col!r} not in {path}")
    dates = df[date_col].to_list()
    obs = df.drop(columns=[date_col])
    values = np.empty((len(df), obs.shape[1]))
    for j, name in enumerate(obs.columns):
        col = obs[name].to_numpy()
        parsed = pd.to_numeric(
            pd.Series(col).replace({"": np.nan, "NaN": np.nan, "NA": np.nan, "nan": np.nan}),
            errors="coerce",
        ).to_numpy()
        fresh_nan = np.isnan(parsed) & ~np.isin(col, ("", "NaN", "NA", "nan"))
        if fresh_nan.any():
            r = int(np.argmax(fresh_nan))
            raise ValidationError(
                f"could not parse observable at date {dates[r]!r}, column {name!r}"
            )
        if np.isnan(parsed).any():
            r = int(np.argmax(np.isnan(parsed)))
            raise ValidationError(
                f"missing observable at date {dates[r]!r}, column {name!r}"
            )
        values[:, j] = parsed
    keys = _date_keys(dates)
    order = np.argsort(keys, kind="stable")
    return Panel(
        dates=tuple(dates[i] for i in order),
        values=values[order],
        names=tuple(obs.columns),
    )


def _load_raw_series(path) -> ProxySeries:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"proxy file not found: {path}")
    df = pd.read_csv(path)
    if df.shape[1] != 2:
        raise ValidationError(
            f"proxy file {path} must have exactly a date column and one value column"
        )
    date_col, val_col = df.columns
    raw = pd.read_csv(path, dtype={date_col: str})
    values = pd.to_numeric(raw[val_col], errors="coerce").to_numpy(dtype=float)
    dates = [str(d) for d in raw[date_col].to_list()]
    keys = _date_keys(dates)
    order = np.argsort(keys, kind="stable")
    return ProxySeries(
        dates=tuple(dates[i] for i in order),
        values=values[order],
        label=str(val_col),
    )


def align_proxy(series: ProxySeries, panel: Panel, missing_policy: str = "zero") -> ProxySeries:
    """Align a proxy to the panel dates.

    Under ``zero``, observed entries are demeaned and missing slots become 0
    (preserving the zero-mean convention); under ``drop-report`` missing slots
    stay NaN and are listed in ``missing_dates``.  Aligning an already-aligned
    series is a no-op.
    """
    if missing_policy not in MISSING_POLICIES:
        raise ValidationError(f"unknown missing policy {missing_policy!r}")
    if series.dates == panel.dates and missing_policy == "drop-report":
        return series
    if series.dates == panel.dates and not np.isnan(series.values).any():
        return series

    panel_keys = _date_keys(panel.dates)
    series_keys = _date_keys(series.dates)
    pos = {k: i for i, k in enumerate(panel_keys.tolist())}
    aligned = np.full(panel.T, np.nan)
    for k, v in zip(series_keys.tolist(), series.values):
        i = pos.get(k)
        if i is not None:
            aligned[i] = v

    observed = ~np.isnan(aligned)
    if observed.sum() < MIN_PROXY_OVERLAP:
        raise ValidationError(
            f"insufficient overlap: proxy {series.label!r} has "
            f"{int(observed.sum())} observations on the panel dates "
            f"(need {MIN_PROXY_OVERLAP})"
        )
    aligned[observed] = aligned[observed] - aligned[observed].mean()
    missing = tuple(d for d, ok in zip(panel.dates, observed) if not ok)
    if missing_policy == "zero":
        aligned[~observed] = 0.0
        missing = ()
    return ProxySeries(panel.dates, aligned, series.label, missing_dates=missing)


def load_proxies(paths, panel: Panel, missing_policy: str = "zero") -> list[ProxySeries]:
    """Load and align proxy files to a panel; see :func:`align_proxy`."""
    return [align_proxy(_load_raw_series(p), panel, missing_policy) for p in paths]


def write_panel(panel: Panel, path, date_column: str = "date") -> None:
    """Write a panel back to CSV; values round-trip bit-exactly."""
    path = Path(path)
    with open(path, "w") as fh:
        fh.write(",".join([date_column, *panel.names]) + "\n")
        for d, row in zip(panel.dates, panel.values):
            fh.write(d + "," + ",".join(np.format_float_scientific(x, precision=17) for x in row) + "\n")


def write_series(series: ProxySeries, path, date_column: str = "date") -> None:
    path = Path(path)
    with open(path, "w") as fh:
        fh.write(f"{date_column},{series.label}\n")
        for d, x in zip(series.dates, series.values):
            val = "" if np.isnan(x) else np.format_float_scientific(x, precision=17)
            fh.write(f"{d},{val}\n")
