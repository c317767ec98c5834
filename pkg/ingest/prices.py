import logging
from dataclasses import dataclass, field
from datetime import date
from typing import BinaryIO, Tuple

import numpy as np
import pandas as pd

from errors import (
    DomainError,
    EmptySeriesError,
    FormatError,
    InsufficientDataError,
    RowError,
)

logger = logging.getLogger(__name__)

# Yahoo writes "null" for every field on holiday rows
NULL_TOKENS = ["", "null", "NULL", "NaN", "nan", "NA", "N/A", "None"]
YAHOO_COLUMNS = ["Open", "High", "Low", "Close", "Adj Close", "Volume"]


@dataclass(frozen=True)
class PriceRecord:
    date: date
    close: float
    volume: float


@dataclass(frozen=True, eq=False)
class PriceSeries:
    """Date-ordered close/volume observations of one stock (read-only arrays)"""

    ticker: str
    dates: np.ndarray
    close: np.ndarray
    volume: np.ndarray
    dropped_rows: int = field(default=0)

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        close = np.asarray(self.close, dtype=float)
        volume = np.asarray(self.volume, dtype=float)
        if not (dates.shape == close.shape == volume.shape) or dates.ndim != 1:
            raise ValueError("dates, close and volume must be 1-D arrays of equal length")
        for arr in (dates, close, volume):
            arr.setflags(write=False)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "close", close)
        object.__setattr__(self, "volume", volume)

    def __len__(self) -> int:
        return int(self.close.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PriceSeries):
            return NotImplemented
        return (
            self.ticker == other.ticker
            and np.array_equal(self.dates, other.dates)
            and np.array_equal(self.close, other.close, equal_nan=True)
            and np.array_equal(self.volume, other.volume, equal_nan=True)
        )

    @property
    def records(self) -> Tuple[PriceRecord, ...]:
        return tuple(
            PriceRecord(d.astype(object), float(c), float(v))
            for d, c, v in zip(self.dates, self.close, self.volume)
        )


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    """Log returns at a horizon of ``horizon`` trading days"""

    values: np.ndarray
    horizon: int
    overlapping: bool

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)


def _parse_column(raw: pd.Series, kind: str) -> Tuple[pd.Series, pd.Series]:
    """Parse one text column; returns (values, null mask) or raises RowError"""
    text = raw.str.strip()
    is_null = text.isin(NULL_TOKENS)
    if kind == "date":
        values = pd.to_datetime(text.where(~is_null), format="%Y-%m-%d", errors="coerce")
    else:
        values = pd.to_numeric(text.where(~is_null), errors="coerce")

    bad = values.isna() & ~is_null
    if bad.any():
        position = int(np.flatnonzero(bad.to_numpy())[0])
        raise RowError(f"cannot parse {kind} '{text.iloc[position]}' in column {raw.name}", row=position + 1)
    return values, is_null


def parse_price_csv(
    source: BinaryIO, ticker: str = "", use_adjusted_close: bool = False
) -> PriceSeries:
    """
    Parse a Yahoo-style daily OHLCV file into a PriceSeries, rows in file order.

    Rows carrying a null in any standard OHLCV field are kept but get a NaN close
    so that ``clean`` drops them whole.
    """
    try:
        frame = pd.read_csv(source, dtype=str, keep_default_na=False, skipinitialspace=True)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise FormatError(f"not a delimited text file with a header row: {e}") from e

    frame.columns = [str(c).strip() for c in frame.columns]
    columns = set(frame.columns)

    if "Date" not in columns:
        raise FormatError("missing required column 'Date'", column="Date")
    if "Volume" not in columns:
        raise FormatError("missing required column 'Volume'", column="Volume")
    if use_adjusted_close and "Adj Close" in columns:
        price_column = "Adj Close"
    elif "Close" in columns:
        price_column = "Close"
    elif "Adj Close" in columns:
        price_column = "Adj Close"
    else:
        raise FormatError("missing required column 'Close' (or 'Adj Close')", column="Close")

    dates, _ = _parse_column(frame["Date"], "date")
    close, _ = _parse_column(frame[price_column], "number")
    volume, _ = _parse_column(frame["Volume"], "number")

    incomplete = np.zeros(len(frame), dtype=bool)
    for column in YAHOO_COLUMNS:
        if column in columns:
            incomplete |= frame[column].str.strip().isin(NULL_TOKENS).to_numpy()
    close = close.to_numpy(dtype=float).copy()
    close[incomplete] = np.nan

    return PriceSeries(
        ticker=ticker,
        dates=dates.to_numpy(dtype="datetime64[D]"),
        close=close,
        volume=volume.to_numpy(dtype=float),
    )


def clean(series: PriceSeries) -> PriceSeries:
    """Drop null/non-positive rows and duplicate dates (first kept), then sort by date"""
    frame = pd.DataFrame(
        {"date": series.dates, "close": series.close, "volume": series.volume}
    )
    keep = (
        frame["date"].notna()
        & frame["close"].notna()
        & frame["volume"].notna()
        & (frame["close"] > 0)
        & (frame["volume"] >= 0)
    )
    frame = frame[keep].drop_duplicates(subset="date", keep="first")
    frame = frame.sort_values("date", kind="mergesort")

    dropped = len(series) - len(frame)
    if len(frame) < 2:
        raise EmptySeriesError(
            f"{series.ticker or 'series'}: only {len(frame)} usable rows after cleaning"
        )
    if dropped:
        logger.debug(f"{series.ticker}: dropped {dropped} rows while cleaning")

    return PriceSeries(
        ticker=series.ticker,
        dates=frame["date"].to_numpy(dtype="datetime64[D]"),
        close=frame["close"].to_numpy(dtype=float),
        volume=frame["volume"].to_numpy(dtype=float),
        dropped_rows=dropped,
    )


def log_returns(series: PriceSeries, horizon: int = 1, overlapping: bool = True) -> ReturnSeries:
    """
    Log returns ln(p_t / p_{t-h}).

    Overlapping mode gives every t >= h (length n - h); non-overlapping mode
    strides by h from the first observation (length floor((n - 1) / h)).
    """
    if horizon < 1:
        raise DomainError(f"horizon must be a positive integer, got {horizon}")
    prices = series.close
    if prices.size <= horizon:
        raise InsufficientDataError(
            f"series of length {prices.size} too short for horizon {horizon}"
        )
    if not np.all(np.isfinite(prices)) or np.any(prices <= 0):
        raise DomainError("log returns need finite positive prices; clean the series first")

    log_prices = np.log(prices)
    if overlapping:
        values = log_prices[horizon:] - log_prices[:-horizon]
    else:
        values = np.diff(log_prices[::horizon])
    return ReturnSeries(values=values, horizon=horizon, overlapping=overlapping)


def volume_values(series: PriceSeries) -> np.ndarray:
    """Volumes in date order; zero volumes are valid observations"""
    if len(series) == 0:
        raise EmptySeriesError(f"{series.ticker or 'series'} has no records")
    return series.volume.copy()
