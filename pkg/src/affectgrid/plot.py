"""Static SVG line charts for the emitted CSV files. No external tools."""

from __future__ import annotations

import csv
from pathlib import Path
from xml.sax.saxutils import escape

from .model import EMOTIONS
from .output import RESILIENCE_HEADER, TIMESERIES_HEADER, TRUST_PREFIX

# keyed to canonical emotion order: angry, disgust, fear, happy, neutral, sad, surprise
PALETTE = ("#d62728", "#8c564b", "#9467bd", "#f2b701", "#7f7f7f", "#1f77b4", "#2ca02c")

WIDTH, HEIGHT = 640, 400
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 60, 130, 20, 45


class SchemaError(ValueError):
    pass


def _schema(header: list[str]) -> str:
    joined = ",".join(header)
    if joined == TIMESERIES_HEADER:
        return "timeseries"
    if joined == RESILIENCE_HEADER:
        return "resilience"
    if len(header) > 1 and header[0] == "step" and all(h.startswith(TRUST_PREFIX) for h in header[1:]):
        return "trust"
    raise SchemaError(f"unrecognised CSV header: {joined!r}")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_lineplot(csv_path, out_path) -> Path:
    csv_path, out_path = Path(csv_path), Path(out_path)
    with csv_path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise SchemaError(f"{csv_path}: empty file")
    header, data = rows[0], rows[1:]
    kind = _schema(header)
    if not data:
        raise SchemaError(f"{csv_path}: no data rows")
    try:
        steps = [float(r[0]) for r in data]
        cols = [[float(r[i]) for r in data] for i in range(1, len(header))]
    except (ValueError, IndexError) as exc:
        raise SchemaError(f"{csv_path}: malformed row: {exc}") from None

    x0, x1 = min(steps), max(steps)
    if x1 == x0:
        x1 = x0 + 1
    if kind == "timeseries":
        y0, y1 = 0.0, max(1.0, max(max(c) for c in cols))
        ylabel = "mean agent count"
    else:
        y0, y1 = 0.0, 1.0
        ylabel = "positive ratio" if kind == "resilience" else "mean trust"

    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x: float) -> float:
        return MARGIN_L + (x - x0) / (x1 - x0) * pw

    def sy(y: float) -> float:
        y = min(max(y, y0), y1)
        return MARGIN_T + (1.0 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T + ph}" x2="{MARGIN_L + pw}" y2="{MARGIN_T + ph}" stroke="black"/>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" y2="{MARGIN_T + ph}" stroke="black"/>',
    ]
    for k in range(5):
        yv = y0 + (y1 - y0) * k / 4
        xv = x0 + (x1 - x0) * k / 4
        out.append(
            f'<text x="{MARGIN_L - 6}" y="{_fmt(sy(yv) + 4)}" text-anchor="end">{yv:g}</text>'
        )
        out.append(
            f'<text x="{_fmt(sx(xv))}" y="{MARGIN_T + ph + 16}" text-anchor="middle">{xv:g}</text>'
        )
    out.append(
        f'<text x="{MARGIN_L + pw / 2:g}" y="{HEIGHT - 8}" text-anchor="middle">{escape(header[0])}</text>'
    )
    out.append(
        f'<text x="14" y="{MARGIN_T + ph / 2:g}" text-anchor="middle" '
        f'transform="rotate(-90 14 {MARGIN_T + ph / 2:g})">{escape(ylabel)}</text>'
    )

    for i, (name, ys) in enumerate(zip(header[1:], cols)):
        if kind == "timeseries":
            color = PALETTE[[e.value for e in EMOTIONS].index(name)]
        else:
            color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(steps, ys))
        out.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'data-series="{escape(name)}" points="{pts}"/>'
        )
        ly = MARGIN_T + 14 * i + 6
        lx = MARGIN_L + pw + 10
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 18}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 22}" y="{ly + 4}">{escape(name)}</text>')

    out.append("</svg>")
    out_path.write_text("\n".join(out) + "\n", encoding="utf-8", newline="\n")
    return out_path
