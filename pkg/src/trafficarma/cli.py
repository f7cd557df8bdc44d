"""Command-line pipeline: ingest -> transform -> classify/fit -> backtest -> report.

Every option can also be set through a ``TF_<OPTION>`` environment
variable (``--step-size`` -> ``TF_STEP_SIZE``); a flag on the command
line wins.  Each file written with ``-o`` gets a
``<file>.manifest.json`` describing how it was produced.

Exit codes: 0 ok, 1 bad input, 2 numeric failure, 3 I/O error.
"""
from __future__ import annotations

import io
import json
import sys
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import click
import numpy as np

from . import arma
from .backtest import BacktestConfig, compare_orders, rolling_backtest
from .classify import classify_pattern, classify_returns, select_order
from .errors import InputError, TrafficError
from .ingest import (
    bin_counts, filter_transport, merge_captures, parse_capture_csv,
    read_binned_csv, write_binned_csv,
)
from .report import render_plot_data, render_report
from .series import (
    ReturnSeries, acf, invert_log_return, log_return, read_returns_csv,
    write_acf_csv, write_returns_csv,
)
from .synth import SynthParams, gen_cyclical, gen_seasonal

EXIT_IO = 3

try:
    TOOL_VERSION = version("artifact")
except PackageNotFoundError:  # running from a source tree
    TOOL_VERSION = "0+unknown"


def option(*decls, **kw):
    """``click.option`` with a ``TF_``-prefixed environment variable."""
    long = next(d for d in decls if d.startswith("--"))
    kw.setdefault("envvar", "TF_" + long[2:].upper().replace("-", "_"))
    kw.setdefault("show_default", True)
    return click.option(*decls, **kw)


def parse_order(text):
    """``"p,q"`` -> ``(p, q)``; ``"AUTO"`` -> ``None``."""
    if text is None or text.strip().upper() == "AUTO":
        return None
    try:
        p, q = (int(v) for v in text.split(","))
    except ValueError:
        raise click.BadParameter(f"expected p,q or AUTO, got {text!r}") from None
    if p < 0 or q < 0:
        raise click.BadParameter("orders must be non-negative")
    return (p, q)


def parse_orders(text):
    return [parse_order(part) for part in text.split(";") if part.strip()]


def _dump(text, out):
    if out is None or out == "-":
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def write_manifest(out, command, inputs, parameters, outputs):
    if out is None or out == "-":
        return
    manifest = {
        "command": command,
        "inputs": [str(p) for p in inputs],
        "parameters": parameters,
        "outputs": [str(p) for p in outputs],
        "tool_version": TOOL_VERSION,
    }
    with open(f"{out}.manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _read_returns(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return read_returns_csv(fh)


def _resolve_order(order, values):
    if order is not None:
        return order
    return select_order(classify_returns(values))


@click.group()
@click.version_option(TOOL_VERSION)
def cli():
    """Packet-count forecasting with ARMA models."""


@cli.command()
@click.argument("captures", nargs=-1, required=True, type=click.Path(dir_okay=False))
@option("--step-size", type=float, default=30.0, help="Bin width in seconds.")
@option("--protocols", default="tcp,udp", help="Comma-separated protocols to keep.")
@option("--per-file-offset", type=float, default=0.0,
        help="Seconds added per file index, for exports whose clock restarts at 0.")
@option("-o", "--output", default=None, help="Binned-series CSV (stdout if omitted).")
def ingest(captures, step_size, protocols, per_file_offset, output):
    """Parse capture CSV exports and count packets per step."""
    allowed = [p for p in protocols.split(",") if p.strip()]
    parts = [filter_transport(parse_capture_csv(path), allowed) for path in captures]
    series = bin_counts(merge_captures(parts, per_file_offset), step_size)
    buf = io.StringIO()
    write_binned_csv(series, buf)
    _dump(buf.getvalue(), output)
    write_manifest(output, "ingest", captures, {
        "step_seconds": step_size, "protocols": sorted(p.strip().upper() for p in allowed),
        "per_file_offset": per_file_offset,
    }, [output])


@cli.command()
@click.argument("binned", type=click.Path(dir_okay=False))
@option("--shift", type=int, default=1, help="Constant added to counts before the log.")
@option("--acf-lags", type=int, default=None, help="Also compute the ACF up to this lag.")
@option("--acf-output", default=None, help="Where to write the ACF CSV.")
@option("-o", "--output", default=None, help="Log-return CSV (stdout if omitted).")
def transform(binned, shift, acf_lags, acf_output, output):
    """Convert binned counts into log returns."""
    with open(binned, encoding="utf-8", newline="") as fh:
        series = read_binned_csv(fh)
    returns = log_return(series, shift)
    buf = io.StringIO()
    write_returns_csv(returns, buf)
    _dump(buf.getvalue(), output)
    outputs = [output]
    if acf_lags:
        abuf = io.StringIO()
        write_acf_csv(acf(returns.values, acf_lags), abuf)
        _dump(abuf.getvalue(), acf_output)
        outputs.append(acf_output)
    write_manifest(output, "transform", [binned], {
        "shift": shift, "anchor_count": returns.anchor_count, "acf_lags": acf_lags,
    }, outputs)


@cli.command()
@click.argument("binned", type=click.Path(dir_okay=False))
@option("--shift", type=int, default=1)
@option("-o", "--output", default=None, help="Label JSON (stdout if omitted).")
def classify(binned, shift, output):
    """Label binned traffic as Seasonal or Cyclical and suggest an order."""
    with open(binned, encoding="utf-8", newline="") as fh:
        series = read_binned_csv(fh)
    label = classify_pattern(series, shift)
    doc = {**label.to_dict(), "order": list(select_order(label))}
    _dump(json.dumps(doc) + "\n", output)
    write_manifest(output, "classify", [binned], {"shift": shift}, [output])


def _fit_options(no_refine, long_ar_order):
    return arma.FitOptions(long_ar_order=long_ar_order, refine=not no_refine)


@cli.command()
@click.argument("returns", type=click.Path(dir_okay=False))
@option("--order", default="AUTO", help="p,q or AUTO (pick from the traffic pattern).")
@option("--no-refine", is_flag=True, help="Skip the conditional least-squares refinement.")
@option("--long-ar-order", type=int, default=None)
@option("-o", "--output", default=None, help="Model JSON (stdout if omitted).")
def fit(returns, order, no_refine, long_ar_order, output):
    """Fit an ARMA(p,q) model to a log-return series."""
    values = _read_returns(returns).values
    p, q = _resolve_order(parse_order(order), values)
    model, _ = arma.fit(values, p, q, _fit_options(no_refine, long_ar_order))
    _dump(model.to_json() + "\n", output)
    write_manifest(output, "fit", [returns], {
        "order": [p, q], "requested_order": order, "refine": not no_refine,
        "long_ar_order": long_ar_order,
    }, [output])


@cli.command()
@click.argument("returns", type=click.Path(dir_okay=False))
@option("--model", "model_path", default=None, type=click.Path(dir_okay=False),
        help="Model JSON from `fit`; the series is fitted when omitted.")
@option("--order", default="AUTO")
@option("--horizon", type=int, default=5)
@option("--window", type=int, default=None, help="Use only the last WINDOW returns.")
@option("--anchor-count", type=int, default=None,
        help="First bin count of the series; adds a count column to the output.")
@option("--shift", type=int, default=1)
@option("-o", "--output", default=None, help="Forecast CSV (stdout if omitted).")
def forecast(returns, model_path, order, horizon, window, anchor_count, shift, output):
    """Forecast the next HORIZON log returns."""
    values = _read_returns(returns).values
    hist = values[-window:] if window else values
    if model_path:
        with open(model_path, encoding="utf-8") as fh:
            model = arma.ArmaModel.from_json(fh.read())
        resid = arma.residuals(model, hist)
    else:
        p, q = _resolve_order(parse_order(order), hist)
        model, resid = arma.fit(hist, p, q)
    fc = arma.forecast(model, hist, resid, horizon)
    lines = ["step,log_return" + (",count" if anchor_count is not None else "")]
    counts = None
    if anchor_count is not None:
        counts = invert_log_return(ReturnSeries(np.r_[values, fc], anchor_count, shift))[-horizon:]
    for k, v in enumerate(fc):
        row = f"{k + 1},{float(v)!r}"
        if counts is not None:
            row += f",{float(counts[k])!r}"
        lines.append(row)
    _dump("\n".join(lines) + "\n", output)
    write_manifest(output, "forecast", [returns] + ([model_path] if model_path else []), {
        "order": list(model.order), "horizon": horizon, "window": window,
        "anchor_count": anchor_count, "shift": shift,
    }, [output])


def _window_list(window, sweep):
    if sweep:
        try:
            return [int(w) for w in sweep.split(",") if w.strip()]
        except ValueError:
            raise click.BadParameter(f"bad window sweep {sweep!r}") from None
    if window is None:
        raise click.UsageError("--window or --window-sweep is required")
    return [window]


@cli.command()
@click.argument("returns", type=click.Path(dir_okay=False))
@option("--window", type=int, default=None, help="Historical sample size in steps.")
@option("--window-sweep", default=None, help="Comma-separated windows to try; the best is kept.")
@option("--horizon", type=int, default=5, help="Steps forecast per origin.")
@option("--total-ahead", type=int, default=15, help="Steps covered per evaluation block.")
@option("--order", default="AUTO")
@option("--no-refit", is_flag=True, help="Fit once on the first window and reuse it.")
@option("--csv-output", default=None, help="Plot-ready origin,offset,actual,predicted CSV.")
@option("--plot", default=None, help="Path stem for the overlay CSV and SVG chart.")
@option("-o", "--output", default=None, help="Result JSON (stdout if omitted).")
def backtest(returns, window, window_sweep, horizon, total_ahead, order, no_refit,
             csv_output, plot, output):
    """Rolling-window multi-step backtest scored by MSE."""
    values = _read_returns(returns).values
    p, q = _resolve_order(parse_order(order), values)
    runs = []
    for w in _window_list(window, window_sweep):
        cfg = BacktestConfig(w, horizon, total_ahead, (p, q), refit=not no_refit)
        runs.append(rolling_backtest(values, cfg))
    best = min(runs, key=lambda r: r.mse)
    if window_sweep:
        doc = {
            "windows": [r.config.window for r in runs],
            "mse": [r.mse for r in runs],
            "best_window": best.config.window,
            "results": [r.to_dict() for r in runs],
        }
        text = json.dumps(doc, indent=2) + "\n"
    else:
        text = best.to_json() + "\n"
    _dump(text, output)
    outputs = [output]
    if csv_output:
        with open(csv_output, "w", encoding="utf-8", newline="") as fh:
            best.write_csv(fh)
        outputs.append(csv_output)
    if plot:
        outputs.extend(render_plot_data(best.actual, best.predicted, plot))
    write_manifest(output, "backtest", [returns], {
        "window": window, "window_sweep": window_sweep, "horizon": horizon,
        "total_ahead": total_ahead, "order": [p, q], "requested_order": order,
        "refit": not no_refit,
    }, outputs)


@cli.command()
@click.argument("returns", type=click.Path(dir_okay=False))
@option("--orders", default="2,1;3,0", help="Semicolon-separated p,q pairs.")
@option("--window", type=int, required=True)
@option("--horizon", type=int, default=5)
@option("--total-ahead", type=int, default=15)
@option("--no-refit", is_flag=True)
@option("--label", default=None, help="Dataset name used in reports (file stem by default).")
@option("-o", "--output", default=None, help="Comparison JSON (stdout if omitted).")
def compare(returns, orders, window, horizon, total_ahead, no_refit, label, output):
    """Backtest several orders over identical origins."""
    values = _read_returns(returns).values
    order_list = parse_orders(orders)
    if any(o is None for o in order_list):
        raise click.BadParameter("AUTO is not a valid order to compare")
    base = BacktestConfig(window, horizon, total_ahead, order_list[0] if order_list else (0, 0),
                          refit=not no_refit)
    result = compare_orders(values, base, order_list)
    label = label or Path(returns).stem
    _dump(json.dumps(result.to_dict(label), indent=2) + "\n", output)
    write_manifest(output, "compare", [returns], {
        "orders": [list(o) for o in order_list], "window": window, "horizon": horizon,
        "total_ahead": total_ahead, "refit": not no_refit, "label": label,
    }, [output])


@cli.command()
@click.argument("kind", type=click.Choice(["seasonal", "cyclical"]))
@option("--n-bins", type=int, default=600)
@option("--base-rate", type=float, default=100.0)
@option("--amplitude", type=float, default=50.0)
@option("--period", type=int, default=20)
@option("--smoothing", type=int, default=10)
@option("--noise-sd", type=float, default=5.0)
@option("--seed", type=int, default=0)
@option("--step-size", type=float, default=30.0)
@option("-o", "--output", default=None, help="Binned-series CSV (stdout if omitted).")
def simulate(kind, n_bins, base_rate, amplitude, period, smoothing, noise_sd, seed,
             step_size, output):
    """Generate a synthetic seasonal or cyclical count series."""
    params = SynthParams(n_bins, base_rate, amplitude if kind == "seasonal" else 0.0,
                         period, smoothing, noise_sd, seed, step_size)
    series = gen_seasonal(params) if kind == "seasonal" else gen_cyclical(params)
    buf = io.StringIO()
    write_binned_csv(series, buf)
    _dump(buf.getvalue(), output)
    write_manifest(output, "simulate", [], {
        "kind": kind, "n_bins": n_bins, "base_rate": base_rate, "amplitude": amplitude,
        "period": period, "smoothing": smoothing, "noise_sd": noise_sd, "seed": seed,
        "step_seconds": step_size,
    }, [output])


def _parse_row(text):
    # DATASET:p,q:MSE
    try:
        label, order, value = text.split(":")
        return label, parse_order(order), float(value)
    except (ValueError, click.BadParameter):
        raise click.BadParameter(f"expected DATASET:p,q:MSE, got {text!r}") from None


@cli.command()
@click.argument("comparisons", nargs=-1, type=click.Path(dir_okay=False))
@option("--row", "rows", multiple=True, help="Extra row as DATASET:p,q:MSE (repeatable).")
@option("--format", "out_format", type=click.Choice(["text", "csv", "json"]), default="text")
@option("-o", "--output", default=None, help="Report file (stdout if omitted).")
def report(comparisons, rows, out_format, output):
    """Tabulate MSE per dataset and order from `compare` outputs."""
    results = []
    for path in comparisons:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        for score in doc["scores"]:
            results.append((doc.get("label", path), tuple(score["order"]), score["mse"]))
    results.extend(_parse_row(r) for r in rows)
    _dump(render_report(results, out_format), output)
    write_manifest(output, "report", comparisons, {"rows": list(rows), "format": out_format}, [output])


def main(argv=None):
    try:
        cli.main(args=argv, prog_name="trafficarma", standalone_mode=False)
    except TrafficError as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.exit_code
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except (ValueError, KeyError) as exc:
        click.echo(f"error: {exc}", err=True)
        return InputError.exit_code
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
