"""CSV input and output for price and return series.

Files follow RFC 4180 with an optional header row. A first row in which no
cell parses as a number or a date is taken to be a header. Dates must be ISO-8601
calendar dates (``YYYY-MM-DD``).
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from pathlib import Path

import numpy as np

from ecvol.errors import CsvParseError, InputError
from ecvol.series import PriceSeries, ReturnSeries

__all__ = ["load_csv", "log_returns", "write_series_csv"]

RETURN_MODES = ("log", "diff")
_MISSING = {"", "na", "nan", "null", "none"}


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _is_date(cell: str) -> bool:
    try:
        dt.date.fromisoformat(cell.strip())
    except ValueError:
        return False
    return True


def _resolve(selector, header, ncols, what):
    if selector is None:
        return None
    if isinstance(selector, int) or (isinstance(selector, str) and selector.isdigit()):
        idx = int(selector)
        if not 0 <= idx < ncols:
            raise InputError(f"{what} column index {idx} out of range (file has {ncols} columns)")
        return idx
    if header is None:
        raise InputError(f"{what} column {selector!r} named but the file has no header row")
    names = [h.strip() for h in header]
    if selector not in names:
        raise InputError(f"{what} column {selector!r} not found; header is {names}")
    return names.index(selector)


def _read_rows(path: Path):
    try:
        with open(path, newline="", encoding="utf-8-sig") as fh:
            rows = [(i, row) for i, row in enumerate(csv.reader(fh), start=1)]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except csv.Error as exc:
        raise CsvParseError(f"{path}: malformed CSV: {exc}") from exc
    return [(i, row) for i, row in rows if any(cell.strip() for cell in row)]


def load_csv(path, value_column=None, date_column=None, prices: bool | None = None):
    """Read a price or return series.

    Without selectors a single-column file is read as values and a file with
    two or more columns takes its dates from the first column (when it holds
    dates) and values from the last. ``prices=None`` returns a PriceSeries
    when a date column is present and a ReturnSeries otherwise.

    Rows with missing or unparsable values are rejected; the error lists the
    offending line numbers.
    """
    path = Path(path)
    rows = _read_rows(path)
    if not rows:
        raise InputError(f"{path}: file is empty")
    header = None
    if not any(_is_number(c) or _is_date(c) for c in rows[0][1]):
        header = rows[0][1]
        rows = rows[1:]
    if not rows:
        raise InputError(f"{path}: no data rows")
    ncols = len(header) if header is not None else len(rows[0][1])

    v_idx = _resolve(value_column, header, ncols, "value")
    d_idx = _resolve(date_column, header, ncols, "date")
    if v_idx is None:
        v_idx = ncols - 1
    if d_idx is None and value_column is None and ncols >= 2 and _is_date(rows[0][1][0]):
        d_idx = 0
    if d_idx == v_idx:
        raise InputError("date and value columns must differ")

    values, dates = [], []
    missing, bad, short = [], [], []
    for lineno, row in rows:
        needed = max(v_idx, d_idx if d_idx is not None else 0)
        if len(row) <= needed:
            short.append(lineno)
            continue
        cell = row[v_idx].strip()
        if cell.lower() in _MISSING:
            missing.append(lineno)
            continue
        try:
            x = float(cell)
        except ValueError:
            bad.append((lineno, cell))
            continue
        if not math.isfinite(x):
            bad.append((lineno, cell))
            continue
        if d_idx is not None:
            dcell = row[d_idx].strip()
            if not _is_date(dcell):
                bad.append((lineno, dcell))
                continue
            dates.append(dt.date.fromisoformat(dcell))
        values.append(x)

    if short:
        raise CsvParseError(f"{path}: too few columns on line(s) {_lines(short)}", short)
    if missing:
        raise CsvParseError(f"{path}: missing value on line(s) {_lines(missing)}", missing)
    if bad:
        lines = [ln for ln, _ in bad]
        ln, cell = bad[0]
        raise CsvParseError(f"{path}: cannot parse {cell!r} on line {ln} ({len(bad)} bad line(s): {_lines(lines)})", lines)

    diagnostics = {"rows": len(values), "source": path.name}
    iso = None
    if d_idx is not None:
        gaps = [(b - a).days for a, b in zip(dates, dates[1:])]
        for k, g in enumerate(gaps):
            if g <= 0:
                raise InputError(f"{path}: dates are not strictly increasing at line {rows[k + 1][0]}")
        diagnostics["first_date"] = dates[0].isoformat()
        diagnostics["last_date"] = dates[-1].isoformat()
        diagnostics["max_gap_days"] = max(gaps) if gaps else 0
        iso = tuple(d.isoformat() for d in dates)

    as_prices = (d_idx is not None) if prices is None else prices
    if as_prices:
        arr = np.asarray(values)
        nonpos = [rows[i][0] for i in np.flatnonzero(arr <= 0)]
        if nonpos:
            raise CsvParseError(f"{path}: nonpositive price on line(s) {_lines(nonpos)}", nonpos)
        return PriceSeries(arr, iso, diagnostics)
    return ReturnSeries(np.asarray(values), iso, diagnostics)


def _lines(lines, limit: int = 10) -> str:
    shown = ", ".join(str(x) for x in lines[:limit])
    return shown + (", ..." if len(lines) > limit else "")


def log_returns(prices: PriceSeries, mode: str = "log") -> ReturnSeries:
    """Returns ``log p_t - log p_{t-1}`` (``mode='log'``) or ``p_t - p_{t-1}`` (``'diff'``)."""
    if mode not in RETURN_MODES:
        raise InputError(f"unknown return mode {mode!r}; expected one of {RETURN_MODES}")
    p = np.asarray(prices.prices, dtype=float)
    if p.size < 2:
        raise InputError("at least two prices are needed to form a return")
    if mode == "log":
        if np.any(p <= 0):
            raise InputError("log returns need strictly positive prices")
        r = np.diff(np.log(p))
    else:
        r = np.diff(p)
    dates = prices.dates[1:] if prices.dates is not None else None
    diagnostics = {"rows": int(r.size), "mode": mode}
    return ReturnSeries(r, dates, diagnostics)


def write_series_csv(target, series) -> None:
    """Write a ReturnSeries or PriceSeries with a header, floats in round-trip form.

    ``target`` is a path or an open text stream.
    """
    if isinstance(series, PriceSeries):
        values, label = series.prices, "price"
    else:
        values, label = series.values, "return"
    if hasattr(target, "write"):
        _write_rows(target, series.dates, values, label)
    else:
        with open(target, "w", newline="", encoding="utf-8") as fh:
            _write_rows(fh, series.dates, values, label)


def _write_rows(fh, dates, values, label) -> None:
    w = csv.writer(fh, lineterminator="\n")
    if dates is not None:
        w.writerow(["date", label])
        w.writerows([d, repr(float(x))] for d, x in zip(dates, values))
    else:
        w.writerow([label])
        w.writerows([repr(float(x))] for x in values)
