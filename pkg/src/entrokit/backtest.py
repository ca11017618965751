"""Long-only mean-reversion strategy and buy-and-hold benchmark.

The strategy enters when the z-score of price against its rolling mean
drops to entry_z and exits back to cash when it recovers to exit_z.
Signals use only the trailing window ending at the current bar and fill at
that bar's close; there is no shorting, no leverage and no transaction
cost model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .series import PriceSeries

__all__ = [
    "StrategyParams",
    "Trade",
    "PerformanceReport",
    "mean_reversion_backtest",
    "benchmark_average",
    "entropy_cohort_report",
]


@dataclass(frozen=True)
class StrategyParams:
    window: int = 20
    entry_z: float = -1.0
    exit_z: float = 0.0
    initial_capital: float = 10_000.0

    def __post_init__(self) -> None:
        if self.window < 2:
            raise ValueError("window must be >= 2")
        if self.entry_z >= self.exit_z:
            raise ValueError("entry_z must be below exit_z")
        if self.initial_capital <= 0:
            raise ValueError("initial_capital must be positive")


@dataclass(frozen=True)
class Trade:
    timestamp: int
    side: str  # "buy" or "sell"
    price: float
    shares: float


@dataclass(frozen=True)
class PerformanceReport:
    ticker: str
    strategy_return_pct: float
    benchmark_return_pct: float
    num_trades: int
    equity_curve: tuple[tuple[int, float], ...]
    trades: tuple[Trade, ...]
    params: StrategyParams


def mean_reversion_backtest(series: PriceSeries, params: StrategyParams = StrategyParams()) -> PerformanceReport:
    """Run the z-score mean-reversion state machine over one price series.

    Rolling statistics (mean and population standard deviation) use the
    trailing ``window`` bars ending at the current bar, so a decision at
    bar t sees nothing past t; fills happen at bar t's close.  Bars with
    zero rolling standard deviation are skipped (no signal).
    """
    n = len(series)
    if n <= params.window:
        raise ValueError(f"{series.ticker}: need more than {params.window} bars, got {n}")
    prices = series.prices()
    timestamps = series.timestamps()
    w = params.window

    cash = params.initial_capital
    shares = 0.0
    trades: list[Trade] = []
    curve: list[tuple[int, float]] = []

    for t in range(n):
        price = prices[t]
        if t >= w - 1:
            window_slice = prices[t - w + 1 : t + 1]
            mean = window_slice.mean()
            sd = window_slice.std(ddof=0)
            if sd > 0:
                z = (price - mean) / sd
                if shares == 0.0 and z <= params.entry_z:
                    shares = cash / price
                    cash = 0.0
                    trades.append(Trade(int(timestamps[t]), "buy", float(price), shares))
                elif shares > 0.0 and z >= params.exit_z:
                    cash = shares * price
                    trades.append(Trade(int(timestamps[t]), "sell", float(price), shares))
                    shares = 0.0

        curve.append((int(timestamps[t]), float(cash + shares * price)))

    final_equity = curve[-1][1]
    strategy_pct = (final_equity / params.initial_capital - 1.0) * 100.0
    benchmark_pct = (prices[-1] / prices[0] - 1.0) * 100.0
    return PerformanceReport(
        ticker=series.ticker,
        strategy_return_pct=float(strategy_pct),
        benchmark_return_pct=float(benchmark_pct),
        num_trades=len(trades),
        equity_curve=tuple(curve),
        trades=tuple(trades),
        params=params,
    )


def benchmark_average(series_list: list[PriceSeries]) -> float:
    """Mean buy-and-hold % return across stocks over the common window."""
    if not series_list:
        raise ValueError("empty series list")
    lengths = {len(s) for s in series_list}
    if len(lengths) != 1:
        raise ValueError(f"series cover different windows: lengths {sorted(lengths)}")
    if lengths.pop() < 2:
        raise ValueError("each series needs at least 2 points")
    returns = [
        (s.points[-1].price / s.points[0].price - 1.0) * 100.0 for s in series_list
    ]
    return float(np.mean(returns))


def entropy_cohort_report(reports: list[PerformanceReport], entropies: dict[str, float]) -> dict:
    """Split tickers at the median entropy and compare cohort returns.

    Ties at the median fall back to a deterministic split by ticker order,
    flagged in the output.
    """
    missing = [r.ticker for r in reports if r.ticker not in entropies]
    if missing:
        raise ValueError(f"missing entropy for tickers: {missing}")
    ordered = sorted(reports, key=lambda r: (entropies[r.ticker], r.ticker))
    half = len(ordered) // 2
    low, high = ordered[:half], ordered[half:]
    tie_split = len({entropies[r.ticker] for r in ordered}) == 1

    def cohort_summary(cohort: list[PerformanceReport]) -> dict:
        return {
            "tickers": [r.ticker for r in cohort],
            "mean_strategy_return_pct": float(np.mean([r.strategy_return_pct for r in cohort]))
            if cohort
            else 0.0,
            "mean_benchmark_return_pct": float(np.mean([r.benchmark_return_pct for r in cohort]))
            if cohort
            else 0.0,
        }

    return {
        "low_entropy": cohort_summary(low),
        "high_entropy": cohort_summary(high),
        "median_entropy": float(np.median([entropies[r.ticker] for r in reports])),
        "tie_split_by_ticker_order": tie_split,
    }
