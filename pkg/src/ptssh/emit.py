"""File emission: CSV, JSON, and SVG outputs with stable bytes.

Every writer goes through an atomic temp-file-plus-rename, numbers are
serialized with ``repr`` (shortest round-trip for doubles), and no
emitted file contains a timestamp, so identical inputs produce identical
bytes.  CSVs carry a one-line JSON provenance comment; SVGs carry the
same as an XML comment.
"""

from __future__ import annotations

import base64
import hashlib
import io
import json
import math
import os
import tempfile

import numpy as np

from .dynamics import LightCone, ReflectionSignal
from .scatter import ReflectionSweep
from .spectral import BandSweepTable, EdgeStateReport, SpectralDecomposition

# 9-anchor approximation of a perceptually uniform colormap
_CMAP_ANCHORS = [
    (68, 1, 84), (72, 40, 120), (62, 74, 137), (49, 104, 142),
    (38, 130, 142), (31, 158, 137), (53, 183, 121), (109, 205, 89),
    (253, 231, 37),
]


def atomic_write(path: str, data: str | bytes) -> str:
    """Write via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-emit-")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def sha256_digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def fnum(x) -> str:
    """Shortest decimal that round-trips the double exactly."""
    return repr(float(x))


def provenance_line(params: dict) -> str:
    return "# " + json.dumps(params, sort_keys=True, separators=(",", ":"))


def write_json(path: str, payload: dict) -> str:
    return atomic_write(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _csv(path: str, params: dict, header: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write(provenance_line(params) + "\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(row) + "\n")
    return atomic_write(path, buf.getvalue())


def write_spectrum_csv(path: str, dec: SpectralDecomposition, params: dict) -> str:
    rows = ([str(i), fnum(e.real), fnum(e.imag)]
            for i, e in enumerate(dec.eigenvalues))
    return _csv(path, params, ["index", "re_E", "im_E"], rows)


def write_spectrum_json(path: str, dec: SpectralDecomposition, params: dict) -> str:
    return write_json(path, {
        "params": params,
        "eigenvalues": [[e.real, e.imag] for e in dec.eigenvalues],
        "max_residual": dec.max_residual,
        "any_defective": dec.any_defective,
    })


def write_edge_reports_csv(path: str, reports: list[EdgeStateReport], params: dict) -> str:
    rows = ([str(r.index), fnum(r.energy.real), fnum(r.energy.imag), r.side,
             fnum(r.edge_weight), fnum(r.ipr)] for r in reports)
    return _csv(path, params, ["index", "re_E", "im_E", "side", "edge_weight", "ipr"], rows)


def write_edge_reports_json(path: str, reports: list[EdgeStateReport], params: dict) -> str:
    return write_json(path, {
        "params": params,
        "edge_states": [{
            "index": r.index,
            "energy": [r.energy.real, r.energy.imag],
            "side": r.side,
            "edge_weight": r.edge_weight,
            "ipr": r.ipr,
        } for r in reports],
    })


def write_edge_profile_csv(path: str, report: EdgeStateReport, params: dict) -> str:
    rows = ([str(site + 1), fnum(a.real), fnum(a.imag)]
            for site, a in enumerate(report.amplitude))
    return _csv(path, params, ["site", "re_psi", "im_psi"], rows)


def write_band_sweep_csv(path: str, table: BandSweepTable, params: dict) -> str:
    def rows():
        for i, v in enumerate(table.v_values):
            for e in table.eigenvalues[i]:
                yield [fnum(v), fnum(e.real), fnum(e.imag)]
    return _csv(path, params, ["v", "re_E", "im_E"], rows())


def write_band_sweep_json(path: str, table: BandSweepTable, params: dict) -> str:
    return write_json(path, {
        "params": params,
        "v_values": [float(v) for v in table.v_values],
        "eigenvalues": [[[e.real, e.imag] for e in row] for row in table.eigenvalues],
        "max_abs_imag": [float(x) for x in table.max_abs_imag],
        "min_abs_real": [float(x) for x in table.min_abs_real],
    })


def write_cone_csv(path: str, cone: LightCone, params: dict,
                   renormalize: bool = False) -> str:
    density = cone.density
    if renormalize:
        density = density / density.sum(axis=1)[:, None]
    header = ["t"] + [str(s + 1) for s in range(density.shape[1])]
    rows = ([fnum(t)] + [fnum(x) for x in row]
            for t, row in zip(cone.times, density))
    return _csv(path, params, header, rows)


def write_signal_csv(path: str, signal: ReflectionSignal, params: dict) -> str:
    rows = ([fnum(t), fnum(p)] for t, p in zip(signal.times, signal.values))
    return _csv(path, params, ["t", "P"], rows)


def write_scatter_csv(path: str, sweep: ReflectionSweep, params: dict) -> str:
    rows = ([fnum(r.energy), fnum(r.r_left), fnum(r.r_right),
             fnum(r.transmission), fnum(abs(r.r_left - r.r_right))]
            for r in sweep.results)
    return _csv(path, params,
                ["E", "r_left", "r_right", "transmission", "abs_diff"], rows)


def write_scatter_json(path: str, sweep: ReflectionSweep, params: dict) -> str:
    return write_json(path, {
        "params": params,
        "results": [{
            "energy": r.energy,
            "r_left": r.r_left,
            "r_right": r.r_right,
            "transmission": r.transmission,
        } for r in sweep.results],
        "failures": [{"energy": e, "reason": msg} for e, msg in sweep.failures],
    })


def _colormap(values: np.ndarray) -> np.ndarray:
    """Map values in [0, 1] to RGB via the anchor table."""
    anchors = np.array(_CMAP_ANCHORS, dtype=np.float64)
    pos = np.clip(values, 0.0, 1.0) * (len(anchors) - 1)
    lo = np.floor(pos).astype(int)
    hi = np.minimum(lo + 1, len(anchors) - 1)
    frac = (pos - lo)[..., None]
    rgb = anchors[lo] * (1 - frac) + anchors[hi] * frac
    return rgb.astype(np.uint8)


def _png_base64(rgb: np.ndarray) -> str:
    from PIL import Image

    img = Image.fromarray(rgb, mode="RGB")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def write_cone_svg(path: str, cone: LightCone, params: dict,
                   renormalize: bool = True) -> str:
    """Heatmap with site index horizontal and time increasing downward."""
    density = cone.density
    if renormalize:
        density = density / density.sum(axis=1)[:, None]
    peak = density.max()
    scale = density / peak if peak > 0 else density
    rgb = _colormap(scale)
    png = _png_base64(rgb)

    n_t, n_s = density.shape
    plot_w, plot_h = 640, 480
    ml, mt, mr, mb = 70, 40, 20, 55
    width, height = ml + plot_w + mr, mt + plot_h + mb

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<!-- {json.dumps(params, sort_keys=True)} -->",
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<image x="{ml}" y="{mt}" width="{plot_w}" height="{plot_h}" '
        f'preserveAspectRatio="none" style="image-rendering:pixelated" '
        f'href="data:image/png;base64,{png}"/>',
        f'<rect x="{ml}" y="{mt}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="black"/>',
    ]
    font = 'font-family="sans-serif" font-size="12"'
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        x = ml + frac * plot_w
        site = 1 + frac * (n_s - 1)
        parts.append(f'<line x1="{x:.1f}" y1="{mt + plot_h}" x2="{x:.1f}" '
                     f'y2="{mt + plot_h + 5}" stroke="black"/>')
        parts.append(f'<text x="{x:.1f}" y="{mt + plot_h + 20}" {font} '
                     f'text-anchor="middle">{site:.0f}</text>')
        y = mt + frac * plot_h
        t_val = frac * float(cone.times[-1])
        parts.append(f'<line x1="{ml - 5}" y1="{y:.1f}" x2="{ml}" y2="{y:.1f}" '
                     f'stroke="black"/>')
        parts.append(f'<text x="{ml - 9}" y="{y + 4:.1f}" {font} '
                     f'text-anchor="end">{t_val:.0f}</text>')
    parts.append(f'<text x="{ml + plot_w / 2}" y="{height - 12}" {font} '
                 f'text-anchor="middle">site index</text>')
    parts.append(f'<text x="18" y="{mt + plot_h / 2}" {font} text-anchor="middle" '
                 f'transform="rotate(-90 18 {mt + plot_h / 2})">time</text>')
    label = "renormalized density" if renormalize else "density"
    parts.append(f'<text x="{ml}" y="{mt - 12}" {font}>{label}, peak = {peak:.3g}</text>')
    parts.append("</svg>")
    return atomic_write(path, "\n".join(parts) + "\n")


def _line_plot_svg(series, x_log: bool, y_log: bool, x_label: str,
                   y_label: str, params: dict) -> str:
    """Shared polyline plot: series is a list of (name, color, x, y)."""
    plot_w, plot_h = 640, 420
    ml, mt, mr, mb = 75, 30, 25, 55
    width, height = ml + plot_w + mr, mt + plot_h + mb

    all_x = np.concatenate([np.asarray(x) for _, _, x, _ in series])
    all_y = np.concatenate([np.asarray(y) for _, _, _, y in series])
    if y_log:
        all_y = all_y[all_y > 0]
    x_lo, x_hi = float(all_x.min()), float(all_x.max())
    y_lo, y_hi = float(all_y.min()), float(all_y.max())
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5

    def sx(x):
        if x_log:
            return ml + (math.log10(x) - math.log10(x_lo)) / (
                math.log10(x_hi) - math.log10(x_lo)) * plot_w
        return ml + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        if y_log:
            y = max(y, y_lo)
            return mt + plot_h - (math.log10(y) - math.log10(y_lo)) / (
                math.log10(y_hi) - math.log10(y_lo)) * plot_h
        return mt + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<!-- {json.dumps(params, sort_keys=True)} -->",
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="black"/>',
    ]
    font = 'font-family="sans-serif" font-size="12"'

    def ticks(lo, hi, log_scale):
        if log_scale:
            lo_d = math.ceil(math.log10(lo) - 1e-9)
            hi_d = math.floor(math.log10(hi) + 1e-9)
            return [10.0 ** d for d in range(lo_d, hi_d + 1)]
        span = hi - lo
        step = 10.0 ** math.floor(math.log10(span / 4))
        for mult in (1, 2, 5, 10):
            if span / (step * mult) <= 6:
                step *= mult
                break
        first = math.ceil(lo / step) * step
        out = []
        t = first
        while t <= hi + 1e-12 * span:
            out.append(round(t, 12))
            t += step
        return out

    for t in ticks(x_lo, x_hi, x_log):
        x = sx(t)
        parts.append(f'<line x1="{x:.1f}" y1="{mt + plot_h}" x2="{x:.1f}" '
                     f'y2="{mt + plot_h + 5}" stroke="black"/>')
        parts.append(f'<text x="{x:.1f}" y="{mt + plot_h + 20}" {font} '
                     f'text-anchor="middle">{t:g}</text>')
    for t in ticks(y_lo, y_hi, y_log):
        y = sy(t)
        parts.append(f'<line x1="{ml - 5}" y1="{y:.1f}" x2="{ml}" y2="{y:.1f}" '
                     f'stroke="black"/>')
        parts.append(f'<text x="{ml - 9}" y="{y + 4:.1f}" {font} '
                     f'text-anchor="end">{t:g}</text>')

    for name, color, xs, ys in series:
        pts = []
        for x, y in zip(xs, ys):
            if y_log and y <= 0:
                continue
            pts.append(f"{sx(x):.2f},{sy(y):.2f}")
        parts.append(f'<polyline points="{" ".join(pts)}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5"/>')
    for i, (name, color, _, _) in enumerate(series):
        y = mt + 16 + 18 * i
        parts.append(f'<line x1="{ml + plot_w - 130}" y1="{y}" '
                     f'x2="{ml + plot_w - 100}" y2="{y}" stroke="{color}" '
                     f'stroke-width="2"/>')
        parts.append(f'<text x="{ml + plot_w - 94}" y="{y + 4}" {font}>{name}</text>')

    parts.append(f'<text x="{ml + plot_w / 2}" y="{height - 12}" {font} '
                 f'text-anchor="middle">{x_label}</text>')
    parts.append(f'<text x="20" y="{mt + plot_h / 2}" {font} text-anchor="middle" '
                 f'transform="rotate(-90 20 {mt + plot_h / 2})">{y_label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_scatter_svg(path: str, sweep: ReflectionSweep, params: dict) -> str:
    e = np.array([r.energy for r in sweep.results])
    rl = np.array([r.r_left for r in sweep.results])
    rr = np.array([r.r_right for r in sweep.results])
    positive = np.concatenate([rl[rl > 0], rr[rr > 0]])
    spread = positive.max() / positive.min() if positive.size else 1.0
    y_log = spread > 1e3
    svg = _line_plot_svg(
        [("R_L", "#c0392b", e, rl), ("R_R", "#2471a3", e, rr)],
        x_log=True, y_log=y_log, x_label="energy", y_label="reflection",
        params=params,
    )
    return atomic_write(path, svg)


def write_signal_svg(path: str, signal: ReflectionSignal, params: dict) -> str:
    svg = _line_plot_svg(
        [(f"site {signal.site}", "#1e8449", signal.times, signal.values)],
        x_log=False, y_log=False, x_label="time", y_label="density",
        params=params,
    )
    return atomic_write(path, svg)


def write_band_sweep_svg(path: str, table: BandSweepTable, component: str,
                         params: dict) -> str:
    """Scatter of one spectral component (re or im) against v."""
    take = (lambda e: e.real) if component == "re" else (lambda e: e.imag)
    plot_w, plot_h = 640, 420
    ml, mt, mr, mb = 75, 30, 25, 55
    width, height = ml + plot_w + mr, mt + plot_h + mb

    v = table.v_values
    x_lo, x_hi = float(v.min()), float(v.max())
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    vals = np.array([[take(e) for e in row] for row in table.eigenvalues])
    y_lo, y_hi = float(vals.min()), float(vals.max())
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5

    def sx(x):
        return ml + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return mt + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<!-- {json.dumps(params, sort_keys=True)} -->",
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="black"/>',
    ]
    font = 'font-family="sans-serif" font-size="12"'
    for i, vv in enumerate(v):
        x = sx(float(vv))
        for y_val in vals[i]:
            parts.append(f'<circle cx="{x:.1f}" cy="{sy(y_val):.2f}" r="1.2" '
                         f'fill="#21618c"/>')
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        x = ml + frac * plot_w
        xv = x_lo + frac * (x_hi - x_lo)
        parts.append(f'<line x1="{x:.1f}" y1="{mt + plot_h}" x2="{x:.1f}" '
                     f'y2="{mt + plot_h + 5}" stroke="black"/>')
        parts.append(f'<text x="{x:.1f}" y="{mt + plot_h + 20}" {font} '
                     f'text-anchor="middle">{xv:.2f}</text>')
        y = mt + plot_h - frac * plot_h
        yv = y_lo + frac * (y_hi - y_lo)
        parts.append(f'<line x1="{ml - 5}" y1="{y:.1f}" x2="{ml}" y2="{y:.1f}" '
                     f'stroke="black"/>')
        parts.append(f'<text x="{ml - 9}" y="{y + 4:.1f}" {font} '
                     f'text-anchor="end">{yv:.3f}</text>')
    y_name = "Re E" if component == "re" else "Im E"
    parts.append(f'<text x="{ml + plot_w / 2}" y="{height - 12}" {font} '
                 f'text-anchor="middle">v</text>')
    parts.append(f'<text x="20" y="{mt + plot_h / 2}" {font} text-anchor="middle" '
                 f'transform="rotate(-90 20 {mt + plot_h / 2})">{y_name}</text>')
    parts.append("</svg>")
    return atomic_write(path, "\n".join(parts) + "\n")
