"""Price series ingestion and Sharpe-style resilience estimates."""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Sequence

from ..errors import InsufficientData, InvariantViolation, SchemaError, ZeroVolatility

ReturnKind = Literal["simple", "log"]


@dataclass(frozen=True)
class PriceSeries:
    asset_id: str
    observations: tuple[tuple[dt.date, float], ...]

    def __post_init__(self) -> None:
        obs = tuple((d, float(p)) for d, p in self.observations)
        for d, p in obs:
            if not (math.isfinite(p) and p > 0):
                raise InvariantViolation(f"{self.asset_id}: price on {d} must be > 0, got {p}")
        for (d0, _), (d1, _) in zip(obs, obs[1:]):
            if not d1 > d0:
                raise InvariantViolation(f"{self.asset_id}: dates must be strictly ascending ({d0} then {d1})")
        object.__setattr__(self, "observations", obs)

    def __len__(self) -> int:
        return len(self.observations)

    @property
    def dates(self) -> list[dt.date]:
        return [d for d, _ in self.observations]

    @property
    def prices(self) -> list[float]:
        return [p for _, p in self.observations]

    def window(self, start: dt.date | None = None, end: dt.date | None = None) -> "PriceSeries":
        """Observations with ``start <= date <= end``."""
        kept = tuple(
            (d, p)
            for d, p in self.observations
            if (start is None or d >= start) and (end is None or d <= end)
        )
        return PriceSeries(self.asset_id, kept)


def load_price_csv(path: str | Path, asset_id: str | None = None) -> PriceSeries:
    """Read a ``date,close`` CSV. Rows may come in any order; duplicate dates are rejected."""
    path = Path(path)
    asset_id = asset_id or path.stem
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["date", "close"]:
            raise SchemaError(f"{path}:1: expected header 'date,close', got {header!r}")
        rows = {}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise SchemaError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            try:
                day = dt.date.fromisoformat(row[0].strip())
                close = float(row[1])
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from None
            if day in rows:
                raise SchemaError(f"{path}:{lineno}: duplicate date {day}")
            if not (math.isfinite(close) and close > 0):
                raise SchemaError(f"{path}:{lineno}: close must be a positive number, got {row[1]!r}")
            rows[day] = close
    return PriceSeries(asset_id, tuple(sorted(rows.items())))


def compute_returns(series: PriceSeries, kind: ReturnKind = "simple") -> list[float]:
    prices = series.prices
    if len(prices) < 2:
        raise InsufficientData(f"{series.asset_id}: need at least 2 prices, got {len(prices)}")
    if kind == "simple":
        return [p1 / p0 - 1.0 for p0, p1 in zip(prices, prices[1:])]
    if kind == "log":
        return [math.log(p1 / p0) for p0, p1 in zip(prices, prices[1:])]
    raise ValueError(f"unknown return kind {kind!r}")


@dataclass(frozen=True)
class ReturnStats:
    """Daily return moments; ``count`` is ``None`` for published aggregates."""

    mean: float
    std: float
    count: int | None

    def __post_init__(self) -> None:
        if not self.std >= 0:
            raise InvariantViolation(f"std must be >= 0, got {self.std}")
        if self.count is not None and self.count < 1:
            raise InvariantViolation(f"count must be >= 1, got {self.count}")


def return_stats(returns: Sequence[float], ddof: int = 1) -> ReturnStats:
    """Arithmetic mean and standard deviation (sample by default, ``ddof=0`` for population)."""
    n = len(returns)
    if n < 2 or n <= ddof:
        raise InsufficientData(f"need at least 2 returns, got {n}")
    if min(returns) == max(returns):
        return ReturnStats(float(returns[0]), 0.0, n)
    mean = math.fsum(returns) / n
    var = math.fsum((r - mean) ** 2 for r in returns) / (n - ddof)
    return ReturnStats(mean, math.sqrt(var), n)


def sharpe_resilience(stats: ReturnStats) -> float:
    """Mean over volatility with a zero risk-free rate."""
    if stats.std <= 0:
        raise ZeroVolatility("volatility is zero; the ratio is undefined")
    return stats.mean / stats.std


@dataclass(frozen=True)
class ResilienceEstimate:
    asset_id: str
    sharpe: float
    window: tuple[dt.date, dt.date]
    stats: ReturnStats

    def __post_init__(self) -> None:
        if self.window[0] > self.window[1]:
            raise InvariantViolation(f"{self.asset_id}: window start after end")


def estimate_resilience(
    series: PriceSeries,
    start: dt.date | None = None,
    end: dt.date | None = None,
    return_kind: ReturnKind = "simple",
    ddof: int = 1,
) -> ResilienceEstimate:
    window = series.window(start, end)
    stats = return_stats(compute_returns(window, return_kind), ddof=ddof)
    return ResilienceEstimate(
        series.asset_id,
        sharpe_resilience(stats),
        (window.dates[0], window.dates[-1]),
        stats,
    )
