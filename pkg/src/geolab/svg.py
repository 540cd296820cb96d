"""Deterministic SVG renderings of developments and crossing sequences.

Output bytes depend only on the input values: coordinates are formatted
with a fixed precision, element order is fixed, and no timestamps or
identifiers are embedded, so identical inputs rerender identically.
"""

from __future__ import annotations

import math

import numpy as np

_WIDTH = 480
_HEIGHT = 320
_MARGIN = 28

_STYLE = (
    "<style>polyline,path,line{fill:none;stroke:#1a1a1a;stroke-width:1.5}"
    ".ref{stroke:#b03030;stroke-width:1}.grid{stroke:#c8c8c8;stroke-width:0.5}"
    "circle{fill:#b03030;stroke:none}text{font:10px monospace;fill:#555}"
    "</style>"
)


def _fmt(x):
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def _fit(points):
    """Map data points into the drawing box, preserving aspect ratio."""
    pts = np.asarray(points, dtype=np.float64)
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = np.maximum(hi - lo, 1e-12)
    scale = min(
        (_WIDTH - 2 * _MARGIN) / span[0], (_HEIGHT - 2 * _MARGIN) / span[1]
    )
    mid = 0.5 * (lo + hi)

    def to_px(p):
        # svg y grows downward
        x = _WIDTH / 2 + (p[0] - mid[0]) * scale
        y = _HEIGHT / 2 - (p[1] - mid[1]) * scale
        return x, y

    return to_px


def _polyline(px_points, cls=""):
    coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in px_points)
    attr = f' class="{cls}"' if cls else ""
    return f'<polyline{attr} points="{coords}"/>'


def _document(body):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">'
        + _STYLE
        + body
        + "</svg>"
    )


def development_svg(dev):
    """Render one planar development: its polyline plus the reference.

    Accepts a :class:`~geolab.development.PlanarDevelopment` or its JSON
    form.  A point-type reference is drawn as a dot with a radial tie to
    the first sample; a direction-type reference as an upward arrow.
    """
    obj = dev.to_json() if hasattr(dev, "to_json") else dev
    points = np.asarray(obj["points"], dtype=np.float64)
    reference = np.asarray(obj["reference"], dtype=np.float64)
    kind = obj.get("kind", "")

    about_point = bool(np.allclose(reference, 0.0))
    frame = points if not about_point else np.vstack([points, reference[None]])
    to_px = _fit(frame)
    body = [_polyline([to_px(p) for p in points])]
    if about_point:
        cx, cy = to_px(reference)
        x0, y0 = to_px(points[0])
        body.append(f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="3"/>')
        body.append(
            f'<line class="ref" x1="{_fmt(cx)}" y1="{_fmt(cy)}" '
            f'x2="{_fmt(x0)}" y2="{_fmt(y0)}"/>'
        )
    else:
        # the direction points up in development coordinates
        ax = _MARGIN / 2
        body.append(
            f'<line class="ref" x1="{ax}" y1="{_HEIGHT - _MARGIN}" '
            f'x2="{ax}" y2="{_MARGIN}"/>'
        )
        body.append(
            f'<path class="ref" d="M {ax - 4} {_MARGIN + 8} L {ax} {_MARGIN} '
            f'L {ax + 4} {_MARGIN + 8}"/>'
        )
    if kind:
        body.append(f'<text x="{_MARGIN}" y="{_HEIGHT - 8}">{kind}</text>')
    return _document("".join(body))


def staircase_svg(signs, t=None):
    """Render a crossing sign sequence as a running-sum staircase.

    ``signs`` may be a list of +-1, a crossing-sequence JSON list of
    objects with ``sign`` and ``t`` fields, or a CrossingSequence.  The
    staircase starts at height zero and steps by each sign at its moment.
    """
    if hasattr(signs, "sign"):
        t = np.asarray(signs.t, dtype=np.float64)
        signs = np.asarray(signs.sign, dtype=np.int64)
    elif len(signs) and isinstance(signs[0], dict):
        t = np.asarray([c["t"] for c in signs], dtype=np.float64)
        signs = np.asarray([c["sign"] for c in signs], dtype=np.int64)
    else:
        signs = np.asarray(signs, dtype=np.int64)
        if t is None:
            t = np.arange(1, len(signs) + 1, dtype=np.float64)
        t = np.asarray(t, dtype=np.float64)

    if len(signs) == 0:
        return _document(
            f'<text x="{_MARGIN}" y="{_HEIGHT // 2}">no crossings</text>'
        )

    heights = np.concatenate([[0], np.cumsum(signs)])
    t_lo = min(0.0, float(t.min()))
    t_hi = float(t.max()) * 1.05 if t.max() > 0 else 1.0
    corners = [(t_lo, 0.0)]
    for k in range(len(signs)):
        corners.append((float(t[k]), float(heights[k])))
        corners.append((float(t[k]), float(heights[k + 1])))
    corners.append((t_hi, float(heights[-1])))

    frame = np.asarray(corners + [(t_lo, float(heights.min()) - 0.5),
                                  (t_hi, float(heights.max()) + 0.5)])
    to_px = _fit(frame)
    body = []
    x0, y0 = to_px((t_lo, 0.0))
    x1, _ = to_px((t_hi, 0.0))
    body.append(
        f'<line class="grid" x1="{_fmt(x0)}" y1="{_fmt(y0)}" '
        f'x2="{_fmt(x1)}" y2="{_fmt(y0)}"/>'
    )
    body.append(_polyline([to_px(c) for c in corners[: 2 * len(signs) + 2]]))
    return _document("".join(body))


def render_report_svg(bundle, out_dir):
    """Write one SVG per development and per crossing sequence in a bundle.

    Parameters
    ----------
    bundle : dict with optional keys "developments" (list of development
        JSON objects) and "crossings" (list of crossing-sequence JSON
        lists).
    out_dir : existing directory; files are named development_<k>.svg and
        crossings_<k>.svg in input order.

    Returns the list of written file paths.
    """
    import os

    written = []
    for k, obj in enumerate(bundle.get("developments", [])):
        path = os.path.join(out_dir, f"development_{k}.svg")
        with open(path, "w", encoding="ascii") as fh:
            fh.write(development_svg(obj))
        written.append(path)
    for k, obj in enumerate(bundle.get("crossings", [])):
        path = os.path.join(out_dir, f"crossings_{k}.svg")
        with open(path, "w", encoding="ascii") as fh:
            fh.write(staircase_svg(obj))
        written.append(path)
    return written
