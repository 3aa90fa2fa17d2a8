"""Run directories: ``run.json``, ``series*.csv`` and an optional ``plot.svg``."""

from __future__ import annotations

import csv
import hashlib
import io
import math
from html import escape
from pathlib import Path

from . import __version__
from .experiments import ExperimentResult, Series
from .serialize import atomic_write, canonical


def content_hash(text: str) -> str:
    """Git blob id of ``text`` (sha1 over ``"blob <size>\\0" + bytes``)."""
    data = text.encode("utf-8")
    return hashlib.sha1(b"blob %d\x00" % len(data) + data).hexdigest()


def series_csv(s: Series) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([c.name for c in s.columns])
    for row in s.to_dict()["rows"]:
        w.writerow(["" if v is None else _csv_value(v) for v in row])
    return buf.getvalue()


def _csv_value(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return " ".join(str(_csv_value(x)) for x in v)
    return v


def run_payload(result: ExperimentResult) -> dict:
    body = result.to_dict()
    series_text = canonical(body["series"])
    return {
        "tool": {"name": "singhomeo", "version": __version__},
        "experiment": body["experiment"],
        "config": body["config"],
        "seed": body["seed"],
        "content_hash": content_hash(series_text),
        "checks": body["checks"],
        "passed": body["passed"],
        "notes": body["notes"],
        "columns": {s["name"]: s["columns"] for s in body["series"]},
        "claims": {s["name"]: s["claim"] for s in body["series"]},
        "series": body["series"],
    }


def _numeric(v) -> float | None:
    if isinstance(v, bool) or v is None:
        return None
    if isinstance(v, (int, float)):
        return float(v)
    try:
        num, _, den = str(v).partition("/")
        return float(num) / float(den or 1)
    except ValueError:
        return None


def plot_svg(s: Series, x: str | None = None, y: str | None = None, width: int = 480, height: int = 320) -> str | None:
    """A bare line plot of column ``y`` against ``x`` (log scale when positive and wide)."""
    rows = s.to_dict()["rows"]
    names = [c.name for c in s.columns]
    x = x or names[0]
    if y is None:
        y = next((c.name for c in s.columns if c.kind in ("float", "exact", "mc") and c.name != x), None)
    if y is None or x not in names or y not in names:
        return None
    xi, yi = names.index(x), names.index(y)
    pts = [(_numeric(r[xi]), _numeric(r[yi])) for r in rows]
    pts = [(a, b) for a, b in pts if a is not None and b is not None and math.isfinite(b)]
    if len(pts) < 2:
        return None
    ys = [b for _, b in pts]
    logy = min(ys) > 0 and max(ys) / min(ys) > 100
    if logy:
        pts = [(a, math.log10(b)) for a, b in pts]
    x0, x1 = min(a for a, _ in pts), max(a for a, _ in pts)
    y0, y1 = min(b for _, b in pts), max(b for _, b in pts)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    pad = 40

    def sx(v):
        return pad + (v - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(v):
        return height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)

    path = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in pts)
    label = f"log10 {y}" if logy else y
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n'
        f'<rect width="100%" height="100%" fill="white"/>\n'
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>\n'
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>\n'
        f'<polyline fill="none" stroke="steelblue" stroke-width="2" points="{path}"/>\n'
        f'<text x="{width / 2}" y="{height - 8}" text-anchor="middle" font-size="12">{escape(x)}</text>\n'
        f'<text x="12" y="{height / 2}" font-size="12" transform="rotate(-90 12 {height / 2})" '
        f'text-anchor="middle">{escape(label)}</text>\n'
        f'<text x="{width / 2}" y="18" text-anchor="middle" font-size="13">{escape(s.name)}</text>\n'
        f'<text x="{pad}" y="{pad - 6}" font-size="10">{y1:.4g}</text>\n'
        f'<text x="{pad}" y="{height - pad + 14}" font-size="10">{y0:.4g}</text>\n'
        "</svg>\n"
    )


def write_run(result: ExperimentResult, out: str | Path, plot: bool = False) -> dict:
    """Write the run directory; returns ``{file name: path}``."""
    out = Path(out)
    written = {}
    payload = run_payload(result)
    written["run.json"] = atomic_write(out / "run.json", canonical(payload))
    for i, s in enumerate(result.series):
        name = "series.csv" if i == 0 else f"series-{s.name}.csv"
        written[name] = atomic_write(out / name, series_csv(s))
    if plot and result.series:
        svg = plot_svg(result.series[0])
        if svg is not None:
            written["plot.svg"] = atomic_write(out / "plot.svg", svg)
    return written
