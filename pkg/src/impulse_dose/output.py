"""Deterministic CSV, JSON and SVG rendering.

Floats are written with 10 significant digits so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .bifurcation import BifurcationDiagram, classify_saturation
from .sim import SimTrace

EVENTS_HEADER = "n,t,lambda,T,x1_pre,x2_pre,x3_pre,x1_post,x2_post,x3_post"
DENSE_HEADER = "t,x1,x2,x3,ybar,y"
BIFURCATION_HEADER = "param,value,period,point_index,x1,x2,x3,saturated"


def fmt(x: float) -> str:
    s = format(float(x), ".10g")
    return "0" if s == "-0" else s


def events_csv(trace: SimTrace | None) -> str:
    lines = [EVENTS_HEADER]
    for e in trace.events if trace is not None else []:
        cells = [str(e.n), fmt(e.t), fmt(e.lam), fmt(e.period), *map(fmt, e.pre), *map(fmt, e.post)]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def dense_csv(trace: SimTrace | None) -> str:
    lines = [DENSE_HEADER]
    rows = trace.dense if trace is not None else np.empty((0, 6))
    lines.extend(",".join(map(fmt, row)) for row in rows)
    return "\n".join(lines) + "\n"


def bifurcation_csv(diagram: BifurcationDiagram) -> str:
    lines = [BIFURCATION_HEADER]
    for row in diagram.rows:
        for i, pt in enumerate(row.points):
            sat = bool(row.dose_saturated[i] or row.period_saturated[i])
            cells = [diagram.parameter, fmt(row.value), row.label, str(i), *map(fmt, pt), str(int(sat))]
            lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def bifurcation_summary(diagram: BifurcationDiagram) -> list[dict]:
    out = []
    for row in diagram.rows:
        flags = classify_saturation(row)
        out.append(
            {
                "value": row.value,
                "period": row.period,
                "lambda_range": list(row.lam_range),
                "T_range": list(row.period_range),
                "dose_saturated": flags.dose,
                "period_saturated": flags.period,
            }
        )
    return out


def to_json(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=False) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(np.real(obj)), "im": float(np.imag(obj))}
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------- SVG


_W, _H, _PAD = 720, 260, 48


def _panel(xs, ys, top: float, label: str, color: str, dots: bool = False) -> list[str]:
    x0, x1 = float(np.min(xs)), float(np.max(xs))
    y0, y1 = float(np.min(ys)), float(np.max(ys))
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    w, h = _W - 2 * _PAD, _H - 2 * _PAD

    def px(x):
        return _PAD + (x - x0) / (x1 - x0) * w

    def py(y):
        return top + _PAD + (1 - (y - y0) / (y1 - y0)) * h

    out = [
        f'<rect x="{_PAD}" y="{top + _PAD}" width="{w}" height="{h}" fill="none" stroke="#444"/>',
        f'<text x="{_PAD}" y="{top + _PAD - 8}" font-size="13">{label}</text>',
        f'<text x="{_PAD - 4}" y="{top + _PAD + 4}" font-size="10" text-anchor="end">{fmt(y1)[:8]}</text>',
        f'<text x="{_PAD - 4}" y="{top + _PAD + h}" font-size="10" text-anchor="end">{fmt(y0)[:8]}</text>',
        f'<text x="{_PAD}" y="{top + _PAD + h + 14}" font-size="10">{fmt(x0)[:8]}</text>',
        f'<text x="{_PAD + w}" y="{top + _PAD + h + 14}" font-size="10" text-anchor="end">{fmt(x1)[:8]}</text>',
    ]
    if dots:
        out += [f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="1.2" fill="{color}"/>' for x, y in zip(xs, ys)]
    else:
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1"/>')
    return out


def _svg(panels: list[list[str]]) -> str:
    height = _H * len(panels)
    body = [line for p in panels for line in p]
    head = f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{height}" font-family="sans-serif">'
    return "\n".join([head, *body, "</svg>"]) + "\n"


def trace_svg(trace: SimTrace, max_points: int = 2000) -> str:
    d = trace.dense
    if len(d) == 0:
        return _svg([])
    stride = max(1, int(np.ceil(len(d) / max_points)))
    d = d[::stride]
    return _svg(
        [
            _panel(d[:, 0], d[:, 5], 0, "y(t), effect %", "#1f5fbf"),
            _panel(d[:, 0], d[:, 4], _H, "ybar(t), concentration", "#bf1f1f"),
        ]
    )


def bifurcation_svg(diagram: BifurcationDiagram, coordinate: int = 0) -> str:
    xs = [row.value for row in diagram.rows for _ in row.points]
    ys = [pt[coordinate] for row in diagram.rows for pt in row.points]
    if not xs:
        return _svg([])
    label = f"x{coordinate + 1} at firing vs {diagram.parameter}"
    return _svg([_panel(np.array(xs), np.array(ys), 0, label, "#222", dots=True)])
