"""Report envelope, JSON/CSV writers and a small SVG line-plot writer."""
from __future__ import annotations

import datetime as _dt
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__

SCHEMA_VERSION = 1


def _plain(obj):
    """Recursively convert numpy scalars/arrays and non-finite floats for JSON."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


@dataclass
class ReportEnvelope:
    command: str
    config: dict
    results: list = field(default_factory=list)
    error_budgets: list = field(default_factory=list)
    status: str = "ok"
    error: dict | None = None
    timestamp: str = ""

    def to_dict(self) -> dict:
        return _plain({
            "schema_version": SCHEMA_VERSION,
            "tool": "fracbern",
            "tool_version": __version__,
            "command": self.command,
            "status": self.status,
            "config": self.config,
            "results": self.results,
            "error_budgets": self.error_budgets,
            "error": self.error,
            "timestamp": self.timestamp,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def now_stamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def csv_text(header: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


# SVG ----------------------------------------------------------------------------

_W, _H = 640, 400
_PAD = 56
_COLORS = ("#1f4e9a", "#b23a48", "#2a7f62", "#8a6d1d", "#5b3c88")


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-9 * span:
        out.append(0.0 if abs(t) < 1e-12 * span else t)
        t += step
    return out


def line_plot_svg(series: Sequence[tuple[str, np.ndarray, np.ndarray]], title: str,
                  xlabel: str, ylabel: str, zero_line: bool = True,
                  shade_negative: bool = False) -> str:
    """Polyline plot with axes, ticks, legend, an optional ``y = 0`` line and
    optional shading of the x-ranges where the first series is negative."""
    xs = np.concatenate([np.asarray(s[1], float) for s in series])
    ys = np.concatenate([np.asarray(s[2], float) for s in series])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if zero_line:
        y0, y1 = min(y0, 0.0), max(y1, 0.0)
    if y1 == y0:
        y1 = y0 + 1.0
    margin = 0.05 * (y1 - y0)
    y0, y1 = y0 - margin, y1 + margin

    def px(x):
        return _PAD + (x - x0) / (x1 - x0) * (_W - 2 * _PAD)

    def py(y):
        return _H - _PAD - (y - y0) / (y1 - y0) * (_H - 2 * _PAD)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="11">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>',
           f'<text x="{_W / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>']
    if shade_negative:
        _, sx, sy = series[0]
        sx, sy = np.asarray(sx, float), np.asarray(sy, float)
        neg = sy < 0
        i = 0
        while i < neg.size:
            if neg[i]:
                j = i
                while j + 1 < neg.size and neg[j + 1]:
                    j += 1
                a, b = px(sx[max(i - 1, 0)]), px(sx[min(j + 1, neg.size - 1)])
                out.append(f'<rect class="negative-region" x="{a:.2f}" y="{_PAD}" '
                           f'width="{b - a:.2f}" height="{_H - 2 * _PAD}" fill="#f4c7c3" opacity="0.6"/>')
                i = j + 1
            else:
                i += 1
    out.append(f'<line x1="{_PAD}" y1="{_H - _PAD}" x2="{_W - _PAD}" y2="{_H - _PAD}" stroke="black"/>')
    out.append(f'<line x1="{_PAD}" y1="{_PAD}" x2="{_PAD}" y2="{_H - _PAD}" stroke="black"/>')
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{px(t):.2f}" y1="{_H - _PAD}" x2="{px(t):.2f}" y2="{_H - _PAD + 4}" stroke="black"/>')
        out.append(f'<text x="{px(t):.2f}" y="{_H - _PAD + 16}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{_PAD - 4}" y1="{py(t):.2f}" x2="{_PAD}" y2="{py(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{_PAD - 6}" y="{py(t) + 4:.2f}" text-anchor="end">{t:.3g}</text>')
    if zero_line:
        out.append(f'<line class="zero-line" x1="{_PAD}" y1="{py(0.0):.2f}" x2="{_W - _PAD}" '
                   f'y2="{py(0.0):.2f}" stroke="#888" stroke-dasharray="4 3"/>')
    for idx, (label, sx, sy) in enumerate(series):
        color = _COLORS[idx % len(_COLORS)]
        pts = " ".join(f"{px(float(a)):.2f},{py(float(b)):.2f}" for a, b in zip(sx, sy))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{_W - _PAD - 4}" y="{_PAD + 14 * (idx + 1)}" text-anchor="end" '
                   f'fill="{color}">{label}</text>')
    out.append(f'<text x="{_W / 2:.1f}" y="{_H - 14}" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="16" y="{_H / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {_H / 2:.1f})">{ylabel}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
