"""CSV, JSON and SVG output for tables of results.

CSV follows RFC 4180 (CRLF line ends, minimal quoting) with floats written
to 17 significant digits, so a value read back is bit-identical.  The SVG
writer draws log-log polylines with decade ticks and needs no renderer.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from xml.sax.saxutils import escape

__all__ = ["Table", "format_value", "to_csv", "write_csv", "write_json", "to_svg", "write_svg",
           "OutputError"]


class OutputError(OSError):
    """An output file could not be written."""


class Table:
    """Column names plus rows of plain values."""

    def __init__(self, header, rows=()):
        self.header = list(header)
        self.rows = [list(r) for r in rows]
        for r in self.rows:
            if len(r) != len(self.header):
                raise ValueError(f"row has {len(r)} fields, header has {len(self.header)}")

    def column(self, name):
        i = self.header.index(name)
        return [r[i] for r in self.rows]


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    if hasattr(v, "item"):
        return format_value(v.item())
    return str(v)


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(table.header)
    for row in table.rows:
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def _write(path, text: str) -> None:
    path = Path(path)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_csv(table: Table, path) -> None:
    _write(path, to_csv(table))


def write_json(obj, path) -> None:
    _write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _log_ticks(lo, hi):
    a, b = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
    return [10.0 ** k for k in range(a, b + 1)]


def to_svg(series: dict, title: str = "", xlabel: str = "x", ylabel: str = "y",
           annotations=(), width: int = 640, height: int = 420) -> str:
    """Log-log chart: one polyline per ``name -> (xs, ys)`` entry.

    Points with a nonpositive coordinate cannot be placed on log axes and are
    skipped.  ``annotations`` are extra text lines (e.g. fitted slopes).
    """
    left, right, top, bottom = 70, 20, 40, 60
    pts = {}
    for name, (xs, ys) in series.items():
        pts[name] = [(float(x), float(y)) for x, y in zip(xs, ys)
                     if x > 0 and y > 0 and math.isfinite(x) and math.isfinite(y)]
    allp = [p for v in pts.values() for p in v]
    if allp:
        xlo, xhi = min(p[0] for p in allp), max(p[0] for p in allp)
        ylo, yhi = min(p[1] for p in allp), max(p[1] for p in allp)
    else:
        xlo, xhi, ylo, yhi = 1.0, 10.0, 1.0, 10.0
    if xhi <= xlo:
        xlo, xhi = xlo / 2, xhi * 2
    if yhi <= ylo:
        ylo, yhi = ylo / 2, yhi * 2
    lx0, lx1, ly0, ly1 = map(math.log10, (xlo, xhi, ylo, yhi))
    pw, ph = width - left - right, height - top - bottom

    def X(x):
        return left + (math.log10(x) - lx0) / (lx1 - lx0) * pw

    def Y(y):
        return top + ph - (math.log10(y) - ly0) / (ly1 - ly0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for t in _log_ticks(xlo, xhi):
        if xlo <= t <= xhi:
            out.append(f'<line x1="{X(t):.2f}" y1="{top + ph}" x2="{X(t):.2f}" '
                       f'y2="{top + ph + 5}" stroke="black"/>')
            out.append(f'<text x="{X(t):.2f}" y="{top + ph + 18}" font-size="11" '
                       f'text-anchor="middle">{t:g}</text>')
    for t in _log_ticks(ylo, yhi):
        if ylo <= t <= yhi:
            out.append(f'<line x1="{left - 5}" y1="{Y(t):.2f}" x2="{left}" y2="{Y(t):.2f}" '
                       f'stroke="black"/>')
            out.append(f'<text x="{left - 8}" y="{Y(t) + 4:.2f}" font-size="11" '
                       f'text-anchor="end">{t:g}</text>')
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    for i, (name, p) in enumerate(pts.items()):
        color = colors[i % len(colors)]
        coords = " ".join(f"{X(x):.2f},{Y(y):.2f}" for x, y in p)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                   f'points="{coords}"><title>{escape(name)}</title></polyline>')
        out.append(f'<text x="{left + pw - 5}" y="{top + 15 + 14 * i}" font-size="11" '
                   f'text-anchor="end" fill="{color}">{escape(name)}</text>')
    out.append(f'<text x="{width / 2:.1f}" y="22" font-size="14" text-anchor="middle">'
               f'{escape(title)}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 15}" font-size="12" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="15" y="{top + ph / 2:.1f}" font-size="12" text-anchor="middle" '
               f'transform="rotate(-90 15 {top + ph / 2:.1f})">{escape(ylabel)}</text>')
    for i, line in enumerate(annotations):
        out.append(f'<text x="{left + 8}" y="{top + ph - 10 - 14 * i}" font-size="11">'
                   f'{escape(line)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, *args, **kwargs) -> None:
    _write(path, to_svg(*args, **kwargs))
