"""Trace export: snapshot CSV, JSON event log and an x-t SVG diagram.

All writers are deterministic: floats are written with ``repr`` and the SVG
carries no timestamp.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, List, Optional

from .engine import SNAPSHOT_COLUMNS, FrontField, SimulationTrace, snapshot_rows

STROKE_DASH = {"shock": None, "rarefaction": "6,4", "compression": "1,3"}
FAMILY_COLOR = {1: "#1f4e9c", 2: "#b03a2e"}


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


def trace_csv(trace: SimulationTrace, fld: Optional[FrontField] = None) -> str:
    """CSV text with one row per front per snapshot.

    With ``fld`` given and no stored snapshots, the current field is written
    as a single snapshot.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SNAPSHOT_COLUMNS)
    snaps = list(trace.snapshots)
    if not snaps and fld is not None:
        snaps = [(fld.t, fld.event_count, snapshot_rows(fld))]
    for t, idx, rows in snaps:
        for row in rows:
            w.writerow([_fmt(t), idx] + [_fmt(v) for v in row])
    return buf.getvalue()


def write_trace_csv(path, trace: SimulationTrace, fld: Optional[FrontField] = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(trace_csv(trace, fld))


def event_log(trace: SimulationTrace) -> list:
    """Event records as plain JSON-ready dicts."""
    keys = ("id", "tag", "family", "kind", "strength")
    return [
        {
            "index": e.index,
            "t": e.time,
            "x": e.position,
            "incoming": [dict(zip(keys, f)) for f in e.incoming],
            "outgoing": [dict(zip(keys, f)) for f in e.outgoing],
        }
        for e in trace.events
    ]


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True, allow_nan=True)
        fh.write("\n")


def trace_svg(trace: SimulationTrace, width: int = 800, height: int = 600,
              x_range: Optional[tuple] = None, t_range: Optional[tuple] = None,
              max_segments: int = 200_000) -> str:
    """x-t diagram of the recorded front paths.

    Shocks are solid, rarefactions dashed and compressions dotted; colour
    marks the family.  Time runs upwards.
    """
    segs = trace.segments[:max_segments]
    if not segs:
        xs, ts = [0.0, 1.0], [0.0, 1.0]
    else:
        xs = [v for s in segs for v in (s.x0, s.x1)]
        ts = [v for s in segs for v in (s.t0, s.t1)]
    x0, x1 = x_range or (min(xs), max(xs))
    t0, t1 = t_range or (min(ts), max(ts))
    if x1 == x0:
        x1 = x0 + 1.0
    if t1 == t0:
        t1 = t0 + 1.0
    pad = 40
    sx = (width - 2 * pad) / (x1 - x0)
    st = (height - 2 * pad) / (t1 - t0)

    def px(x):
        return pad + (x - x0) * sx

    def pt(t):
        return height - pad - (t - t0) * st

    out: List[str] = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width - pad}" y="{height - pad + 25}" font-size="12" text-anchor="end">x</text>',
        f'<text x="{pad - 25}" y="{pad}" font-size="12">t</text>',
    ]
    for s in segs:
        dash = STROKE_DASH.get(s.kind)
        style = f' stroke-dasharray="{dash}"' if dash else ""
        width_px = 1.6 if s.role == "large" else 0.8
        out.append(
            f'<polyline points="{px(s.x0):.2f},{pt(s.t0):.2f} {px(s.x1):.2f},{pt(s.t1):.2f}" '
            f'fill="none" stroke="{FAMILY_COLOR.get(s.family, "black")}" '
            f'stroke-width="{width_px}"{style}/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, trace: SimulationTrace, **kw) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(trace_svg(trace, **kw))
