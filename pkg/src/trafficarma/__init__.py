"""ARMA forecasting of packet-count traffic series.

Pipeline: capture CSV -> per-step packet counts -> log returns ->
pattern label and ARMA order -> rolling multi-step backtest -> MSE.
"""
from .arma import (
    ArmaModel, FitOptions, ResidualSeries, StabilityReport, check_roots, fit,
    forecast, residuals, simulate,
)
from .backtest import BacktestConfig, BacktestResult, compare_orders, mse, rolling_backtest
from .classify import PatternKind, PatternLabel, classify_pattern, classify_returns, select_order
from .ingest import (
    BinnedSeries, PacketRecord, bin_counts, filter_transport, merge_captures,
    parse_capture_csv,
)
from .report import render_plot_data, render_report
from .series import AcfVector, ReturnSeries, acf, invert_log_return, log_return
from .synth import SynthParams, gen_cyclical, gen_seasonal

__version__ = "0.1.0"
