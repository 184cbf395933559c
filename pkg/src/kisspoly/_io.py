"""Deterministic CSV/JSON/SVG writers with schema and provenance headers.

Every artifact embeds a schema version and the full run configuration so
that a rerun with the same config is byte-identical (no timestamps, fixed
float formatting, sorted keys).
"""

import json

SCHEMA_PREFIX = "kisspoly"


def fmt(x, digits=17):
    """Fixed-width repr for floats/complex; deterministic across runs."""
    if isinstance(x, complex):
        return f"{x.real:.{digits}e}{x.imag:+.{digits}e}j"
    if isinstance(x, float):
        return f"{x:.{digits}e}"
    return str(x)


def provenance(config, precision, tolerances=None):
    from . import __version__
    return {
        "toolkit": "kisspoly",
        "version": __version__,
        "config": config,
        "precision": "double" if precision is None else f"extended:{precision}",
        "tolerances": tolerances or {},
    }


def write_json(path, schema, payload, prov):
    doc = {"schema": f"{SCHEMA_PREFIX}/{schema}/v1", "provenance": prov}
    doc.update(payload)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    try:
        import numpy as np
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, (np.floating, np.integer)):
            return obj.item()
        if isinstance(obj, np.complexfloating):
            return {"re": float(obj.real), "im": float(obj.imag)}
    except ImportError:
        pass
    return str(obj)


def write_csv(path, schema, header, rows, prov):
    lines = [f"# schema={SCHEMA_PREFIX}/{schema}/v1",
             f"# provenance={json.dumps(prov, sort_keys=True)}",
             ",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


class SvgCanvas:
    """Minimal deterministic SVG writer: polylines and circle markers."""

    def __init__(self, width=640, height=480, margin=30):
        self.width = width
        self.height = height
        self.margin = margin
        self.items = []
        self._pts = []

    def _track(self, pts):
        self._pts.extend(complex(p) for p in pts)

    def polyline(self, pts, stroke="#1f77b4", width=1.5, dashed=False):
        self._track(pts)
        self.items.append(("polyline", [complex(p) for p in pts], stroke,
                           width, dashed))

    def markers(self, pts, fill="#d62728", radius=2.5):
        self._track(pts)
        self.items.append(("markers", [complex(p) for p in pts], fill, radius))

    def _transform(self):
        if not self._pts:
            return lambda z: (0.0, 0.0)
        xs = [p.real for p in self._pts]
        ys = [p.imag for p in self._pts]
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
        spanx = max(x1 - x0, 1e-9)
        spany = max(y1 - y0, 1e-9)
        sc = min((self.width - 2 * self.margin) / spanx,
                 (self.height - 2 * self.margin) / spany)

        def tr(z):
            return (self.margin + (z.real - x0) * sc,
                    self.height - self.margin - (z.imag - y0) * sc)
        return tr

    def render(self):
        tr = self._transform()
        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
               f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">']
        out.append(f'<rect width="{self.width}" height="{self.height}" fill="white"/>')
        for item in self.items:
            if item[0] == "polyline":
                _, pts, stroke, width, dashed = item
                coords = " ".join(f"{tr(p)[0]:.2f},{tr(p)[1]:.2f}" for p in pts)
                dash = ' stroke-dasharray="6,4"' if dashed else ""
                out.append(f'<polyline points="{coords}" fill="none" '
                           f'stroke="{stroke}" stroke-width="{width}"{dash}/>')
            else:
                _, pts, fill, radius = item
                for p in pts:
                    x, y = tr(p)
                    out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{radius}" '
                               f'fill="{fill}"/>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(self.render())
