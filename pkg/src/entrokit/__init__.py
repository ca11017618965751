"""Predictability analysis for discretized time series.

Entropy-rate estimation (Lempel-Ziv match lengths, Context Tree
Weighting), BDS iid testing, density comparison across sampling
frequencies, correlation-network filtering (MST/PMFG) and a simple
mean-reversion backtest, plus a batch CLI tying them together.
"""

__version__ = "0.1.0"

from .series import (
    DiscreteDistribution,
    EntropyEstimate,
    PricePoint,
    PriceSeries,
    ReturnSeries,
    SymbolSequence,
    conditional_entropy,
    empirical_distribution,
    joint_entropy,
    log_returns,
    quantile_discretize,
    shannon_entropy,
)
from .lz import LzParse, MatchLengths, lz76_complexity, lz_entropy_rate, match_lengths
from .ctw import (
    CtwParams,
    CtwResult,
    ctw_entropy_rate,
    ctw_log_mixture,
    kt_log_probability,
    symbols_to_bits,
)
from .bds import BdsParams, BdsResult, bds_statistic, correlation_integral, entropy_bds_association
from .densities import KernelDensity, density_equality_test, kde, summary_stats
from .graphs import correlation_matrix, distance_graph, mst, pmfg
from .synth import (
    SyntheticSource,
    convergence_curve,
    generate,
    markov_entropy_rate,
    shift_register_chain,
)
from .backtest import (
    PerformanceReport,
    StrategyParams,
    benchmark_average,
    entropy_cohort_report,
    mean_reversion_backtest,
)
from .ingest import ingest_csv
from .pipeline import AnalysisReport, RunConfig, run_pipeline
