"""MSE comparison tables and forecast-vs-actual plot artifacts."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import EmptyResults, LengthMismatch

SVG_WIDTH = 960
SVG_HEIGHT = 480
MAX_X_LABELS = 20


def fmt6(value: float) -> str:
    return f"{value:.6g}"


def order_name(order) -> str:
    p, q = order
    return f"ARMA({p},{q})"


def winners(results):
    """Lowest-MSE order per dataset; the first listed wins ties."""
    best = {}
    for label, order, value in results:
        if label not in best or value < best[label][1]:
            best[label] = (tuple(order), value)
    return {label: order for label, (order, _) in best.items()}


def _text_table(header, rows):
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
    line = lambda cells: " | ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    rule = "-+-".join("-" * w for w in widths)
    return [line(header), rule, *(line(r) for r in rows)]


def render_report(results: Sequence[tuple], out_format: str = "text") -> str:
    """Render ``(dataset, (p, q), mse)`` rows as a comparison table.

    MSE values are printed with 6 significant digits and each dataset's
    winning order is listed after the table.
    """
    results = [(str(label), tuple(order), float(value)) for label, order, value in results]
    if not results:
        raise EmptyResults("nothing to report")
    best = winners(results)
    if out_format == "text":
        rows = [[label, order_name(order), fmt6(value)] for label, order, value in results]
        lines = _text_table(["Dataset", "ARMA(p,q)", "MSE"], rows)
        lines.append("")
        lines += _text_table(["Dataset", "Winner"], [[k, order_name(v)] for k, v in best.items()])
        return "\n".join(lines) + "\n"
    if out_format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["dataset", "order", "mse", "winner"])
        for label, order, value in results:
            writer.writerow([label, order_name(order), fmt6(value), order_name(best[label])])
        return buf.getvalue()
    if out_format == "json":
        doc = {
            "rows": [
                {"dataset": label, "order": list(order), "mse": float(fmt6(value))}
                for label, order, value in results
            ],
            "winners": {label: list(order) for label, order in best.items()},
        }
        return json.dumps(doc, indent=2) + "\n"
    raise ValueError(f"unknown report format {out_format!r}")


def _nice_ticks(lo, hi, count=5):
    if hi == lo:
        return [lo]
    return list(np.linspace(lo, hi, count))


def _svg(actual, predicted):
    n = len(actual)
    left, right, top, bottom = 80, 30, 40, 60
    pw = SVG_WIDTH - left - right
    ph = SVG_HEIGHT - top - bottom
    lo = float(min(actual.min(), predicted.min()))
    hi = float(max(actual.max(), predicted.max()))
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    xs = lambda t: left + (pw * t / (n - 1) if n > 1 else pw / 2)
    ys = lambda v: top + ph * (hi - v) / (hi - lo)

    def polyline(vals, color, dash=""):
        pts = " ".join(f"{xs(t):.2f},{ys(v):.2f}" for t, v in enumerate(vals))
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        return f'<polyline fill="none" stroke="{color}" stroke-width="2"{extra} points="{pts}"/>'

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" '
        f'viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f'<rect width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    stride = max(1, math.ceil(n / MAX_X_LABELS))
    for t in range(0, n, stride):
        x = xs(t)
        out.append(f'<line x1="{x:.2f}" y1="{top + ph}" x2="{x:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(
            f'<text class="xtick" x="{x:.2f}" y="{top + ph + 20}" font-size="12" '
            f'text-anchor="middle">{t}</text>'
        )
    for v in _nice_ticks(lo, hi):
        y = ys(v)
        out.append(f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="black"/>')
        out.append(
            f'<text class="ytick" x="{left - 8}" y="{y + 4:.2f}" font-size="12" '
            f'text-anchor="end">{v:.4g}</text>'
        )
    out.append(
        f'<text x="{left + pw / 2:.0f}" y="{SVG_HEIGHT - 15}" font-size="13" '
        f'text-anchor="middle">step</text>'
    )
    out.append(polyline(actual, "#1f77b4"))
    out.append(polyline(predicted, "#ff7f0e", "6,4"))
    lx = left + pw - 150
    out.append(f'<line x1="{lx}" y1="{top + 5}" x2="{lx + 30}" y2="{top + 5}" stroke="#1f77b4" stroke-width="2"/>')
    out.append(f'<text x="{lx + 38}" y="{top + 9}" font-size="12">actual</text>')
    out.append(
        f'<line x1="{lx}" y1="{top + 25}" x2="{lx + 30}" y2="{top + 25}" stroke="#ff7f0e" '
        f'stroke-width="2" stroke-dasharray="6,4"/>'
    )
    out.append(f'<text x="{lx + 38}" y="{top + 29}" font-size="12">predicted</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_plot_data(actual, predicted, out) -> tuple[Path, Path]:
    """Write ``<out>.csv`` (``t,actual,predicted``) and ``<out>.svg``.

    A ``.csv`` or ``.svg`` suffix on `out` is dropped first.
    """
    a = np.asarray(actual, dtype=float)
    p = np.asarray(predicted, dtype=float)
    if a.shape != p.shape:
        raise LengthMismatch(f"length mismatch: {a.shape} vs {p.shape}")
    if a.ndim != 1 or a.size == 0:
        raise LengthMismatch("plot needs at least one point")
    stem = Path(out)
    if stem.suffix in (".csv", ".svg"):
        stem = stem.with_suffix("")
    csv_path, svg_path = stem.with_suffix(".csv"), stem.with_suffix(".svg")
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "actual", "predicted"])
        for t, (x, y) in enumerate(zip(a, p)):
            writer.writerow([t, repr(float(x)), repr(float(y))])
    with open(svg_path, "w", encoding="utf-8") as fh:
        fh.write(_svg(a, p))
    return csv_path, svg_path
