"""
CSV tables and SVG orbit-distance charts.

The SVG is assembled as a string with fixed-precision coordinates so that the
same record always produces the same bytes.
"""

import math
from pathlib import Path

import numpy as np
import polars as pl

from .exceptions import InvalidInput, IoFailure
from .orbits import ReturnRecord

WIDTH = 640
HEIGHT = 360
MARGIN = 48


class SvgChart:
    def __init__(self, width: int = WIDTH, height: int = HEIGHT):
        self.width = width
        self.height = height
        self.svg = ""

    def header(self, title: str):
        self.svg += (
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}">\n'
            f"<title>{_escape(title)}</title>\n"
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}" fill="white"/>\n'
        )

    def line(self, x1, y1, x2, y2, stroke="black", extra=""):
        self.svg += (
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{stroke}" {extra}/>\n'
        )

    def polyline(self, points, stroke="steelblue"):
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        self.svg += (
            f'<polyline points="{coords}" fill="none" stroke="{stroke}" stroke-width="1.5"/>\n'
        )

    def marker(self, x, y, fill="crimson"):
        self.svg += f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{fill}"/>\n'

    def text(self, x, y, string, anchor="middle"):
        self.svg += (
            f'<text x="{x:.2f}" y="{y:.2f}" font-family="monospace" font-size="11" '
            f'text-anchor="{anchor}">{_escape(string)}</text>\n'
        )

    def get_svg(self) -> str:
        return f"{self.svg}</svg>\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def render_svg(record: ReturnRecord) -> str:
    if record.ns.size == 0:
        raise InvalidInput("cannot chart an empty return record")
    ns = record.ns.astype(float)
    d = record.distances.astype(float)
    top = max(float(np.max(d)), record.eps) * 1.05
    if not math.isfinite(top) or top <= 0:
        top = 1.0
    left, right = MARGIN, WIDTH - MARGIN // 2
    upper, lower = MARGIN // 2, HEIGHT - MARGIN
    span = max(float(ns[-1] - ns[0]), 1.0)

    def sx(n: float) -> float:
        return left + (n - ns[0]) / span * (right - left)

    def sy(v: float) -> float:
        return lower - v / top * (lower - upper)

    chart = SvgChart()
    chart.header(f"‖T^n x − x‖ for {record.vector_id}")
    chart.line(left, lower, right, lower)
    chart.line(left, lower, left, upper)
    chart.text(left, lower + 16, f"{int(ns[0])}")
    chart.text(right, lower + 16, f"{int(ns[-1])}")
    chart.text((left + right) / 2, HEIGHT - 8, "n")
    chart.text(left - 6, lower + 4, "0", anchor="end")
    chart.text(left - 6, upper + 4, f"{top:.3g}", anchor="end")
    if record.eps <= top:
        chart.line(left, sy(record.eps), right, sy(record.eps), "gray", 'stroke-dasharray="4,3"')
        chart.text(right, sy(record.eps) - 4, f"ε={record.eps:.3g}", anchor="end")
    chart.polyline(zip(map(sx, ns), map(sy, d), strict=True))
    for n in record.eps_return_times:
        chart.marker(sx(n), sy(record.distance_at(n)))
    return chart.get_svg()


def emit_svg(record: ReturnRecord, path: Path) -> None:
    content = render_svg(record)
    try:
        Path(path).write_text(content, encoding="utf-8")
    except OSError as e:
        raise IoFailure(f"Cannot write {path}: {e}") from None


def write_csv(frame: pl.DataFrame, path: Path) -> None:
    try:
        frame.write_csv(path)
    except OSError as e:
        raise IoFailure(f"Cannot write {path}: {e}") from None
