"""CSV and JSON (de)serialisation for windows, estimates and reports.

Numbers are written so that they read back bit-exactly: integer-valued
floats as integers, everything else with 17 significant digits.  CSV files
may start with ``#`` metadata lines (``# key=value, ...``); readers skip them.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path

import numpy as np

from .combs import LatticeConfig2D, PointSet2D, SequenceWindow
from .correlation import AutocorrelationEstimate
from .entropy import EntropyReport
from .errors import InvalidInput
from .spectra import PointMass, SpectralEstimate


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isfinite(x) and x == int(x) and abs(x) < 2**53:
        return str(int(x))
    return f"{x:.17g}"


def _num(s: str):
    try:
        return int(s)
    except ValueError:
        return float(s)


def _plain(o):
    if isinstance(o, dict):
        return {str(k): _plain(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_plain(v) for v in o]
    if isinstance(o, np.ndarray):
        return _plain(o.tolist())
    if isinstance(o, (bool, np.bool_)):
        return bool(o)
    if isinstance(o, (int, np.integer)):
        return int(o)
    if isinstance(o, (float, np.floating)):
        x = float(o)
        return int(x) if math.isfinite(x) and x == int(x) and abs(x) < 2**53 else x
    return o


def dumps_json(obj: dict) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=False) + "\n"


def _csv_text(header, rows, meta: dict | None = None) -> str:
    buf = _io.StringIO()
    if meta:
        buf.write("# " + ", ".join(f"{k}={fmt(v) if isinstance(v, (int, float, np.number)) else v}"
                                   for k, v in meta.items()) + "\n")
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for r in rows:
        wr.writerow([fmt(v) for v in r])
    return buf.getvalue()


def _read_csv(text: str):
    meta = {}
    lines = []
    for line in text.splitlines():
        if line.startswith("#"):
            for part in line[1:].split(","):
                if "=" in part:
                    k, v = part.split("=", 1)
                    meta[k.strip()] = v.strip()
        elif line.strip():
            lines.append(line)
    rows = list(csv.reader(lines))
    return rows[0], rows[1:], meta


# -- combs ------------------------------------------------------------------


def window_to_csv(w: SequenceWindow) -> str:
    return _csv_text(["index", "weight"], zip(w.indices, w.weights), {"label": w.label, **_scalars(w.meta)})


def window_to_json(w: SequenceWindow) -> str:
    return dumps_json({"type": "SequenceWindow", "origin": w.origin, "dims": [len(w)],
                       "weights": w.weights, "label": w.label, "meta": w.meta})


def config_to_csv(c: LatticeConfig2D) -> str:
    ys, xs = np.indices(c.weights.shape)
    rows = zip((xs + c.origin[0]).ravel(), (ys + c.origin[1]).ravel(), c.weights.ravel())
    return _csv_text(["x", "y", "weight"], rows, {"label": c.label, **_scalars(c.meta)})


def config_to_json(c: LatticeConfig2D) -> str:
    return dumps_json({"type": "LatticeConfig2D", "origin": list(c.origin), "dims": [c.width, c.height],
                       "weights": c.weights.ravel(), "label": c.label, "meta": c.meta})


def pointset_to_csv(ps: PointSet2D) -> str:
    rows = ((m, n, 1) for m, n in ps.points)
    return _csv_text(["m", "n", "weight"], rows, {"label": ps.label, "radius": ps.radius})


def pointset_to_json(ps: PointSet2D) -> str:
    return dumps_json({"type": "PointSet2D", "radius": ps.radius, "count": len(ps),
                       "points": ps.points.ravel(), "label": ps.label})


def _scalars(meta: dict) -> dict:
    return {k: v for k, v in meta.items() if isinstance(v, (int, float, str, np.number))}


def to_csv(obj) -> str:
    for cls, f in ((SequenceWindow, window_to_csv), (LatticeConfig2D, config_to_csv),
                   (PointSet2D, pointset_to_csv), (AutocorrelationEstimate, autocorr_to_csv),
                   (SpectralEstimate, spectrum_to_csv), (EntropyReport, entropy_to_csv)):
        if isinstance(obj, cls):
            return f(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__} to CSV")


def to_json(obj) -> str:
    for cls, f in ((SequenceWindow, window_to_json), (LatticeConfig2D, config_to_json),
                   (PointSet2D, pointset_to_json), (AutocorrelationEstimate, autocorr_to_json),
                   (SpectralEstimate, spectrum_to_json), (EntropyReport, entropy_to_json)):
        if isinstance(obj, cls):
            return f(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__} to JSON")


def from_json(text: str):
    d = json.loads(text)
    t = d.get("type")
    if t == "SequenceWindow":
        return SequenceWindow(d["origin"], np.asarray(d["weights"], dtype=float), d.get("label", ""),
                              d.get("meta", {}))
    if t == "LatticeConfig2D":
        w, h = d["dims"]
        return LatticeConfig2D(tuple(d["origin"]), np.asarray(d["weights"], dtype=float).reshape(h, w),
                               d.get("label", ""), d.get("meta", {}))
    if t == "PointSet2D":
        return PointSet2D(np.asarray(d["points"], dtype=np.int64).reshape(-1, 2), d["radius"],
                          d.get("label", ""))
    if t == "SpectralEstimate":
        return _spectrum_from_dict(d)
    if t == "AutocorrelationEstimate":
        lags = np.asarray(d["lags"])
        return AutocorrelationEstimate(lags, np.asarray(d["coefficients"], dtype=float), d["window_size"],
                                       d.get("label", ""), d.get("meta", {}))
    raise InvalidInput(f"unrecognised JSON object type {t!r}")


def window_from_csv(text: str) -> SequenceWindow:
    header, rows, meta = _read_csv(text)
    if header != ["index", "weight"]:
        raise InvalidInput("not a window CSV")
    idx = [int(r[0]) for r in rows]
    if idx != list(range(idx[0], idx[0] + len(idx))):
        raise InvalidInput("window sites must be consecutive")
    return SequenceWindow(idx[0], np.array([float(r[1]) for r in rows]), meta.get("label", ""))


def config_from_csv(text: str) -> LatticeConfig2D:
    header, rows, meta = _read_csv(text)
    if header != ["x", "y", "weight"]:
        raise InvalidInput("not a configuration CSV")
    a = np.array([[float(v) for v in r] for r in rows])
    x0, y0 = int(a[:, 0].min()), int(a[:, 1].min())
    w = int(a[:, 0].max()) - x0 + 1
    h = int(a[:, 1].max()) - y0 + 1
    out = np.zeros((h, w))
    out[a[:, 1].astype(int) - y0, a[:, 0].astype(int) - x0] = a[:, 2]
    return LatticeConfig2D((x0, y0), out, meta.get("label", ""))


# -- estimates --------------------------------------------------------------


def autocorr_to_csv(e: AutocorrelationEstimate) -> str:
    if e.lags.ndim == 1:
        return _csv_text(["lag", "eta"], zip(e.lags, e.coefficients),
                         {"label": e.label, "N": e.window_size})
    rows = ((a, b, v) for (a, b), v in zip(e.lags, e.coefficients))
    return _csv_text(["lag1", "lag2", "eta"], rows, {"label": e.label, "N": e.window_size})


def autocorr_to_json(e: AutocorrelationEstimate) -> str:
    return dumps_json({"type": "AutocorrelationEstimate", "lags": e.lags, "coefficients": e.coefficients,
                       "window_size": e.window_size, "label": e.label, "meta": e.meta})


def spectrum_to_csv(e: SpectralEstimate) -> str:
    meta = {"label": e.label, "N": e.window_size, "blocks": e.blocks, "L": e.block_length,
            **_scalars(e.meta)}
    if e.dim == 1:
        return _csv_text(["k", "density"], zip(e.k_grid, e.density), meta)
    rows = ((a, b, v) for (a, b), v in zip(e.k_grid, e.density))
    return _csv_text(["k1", "k2", "density"], rows, meta)


def peaks_to_csv(e: SpectralEstimate) -> str:
    if e.dim == 1:
        rows = ((p.k, p.mass, p.stderr, p.detected) for p in e.point_masses)
        return _csv_text(["k", "mass", "stderr", "detected"], rows)
    rows = ((p.k[0], p.k[1], p.mass, p.stderr, p.detected) for p in e.point_masses)
    return _csv_text(["k1", "k2", "mass", "stderr", "detected"], rows)


def spectrum_to_json(e: SpectralEstimate) -> str:
    return dumps_json({
        "type": "SpectralEstimate", "label": e.label, "N": e.window_size, "blocks": e.blocks,
        "block_length": e.block_length, "k": e.k_grid, "density": e.density,
        "point_masses": [{"k": p.k, "mass": p.mass, "stderr": p.stderr, "detected": p.detected}
                         for p in e.point_masses],
        "meta": e.meta,
    })


def _spectrum_from_dict(d: dict) -> SpectralEstimate:
    k = np.asarray(d["k"], dtype=float)
    pms = tuple(PointMass(tuple(p["k"]) if isinstance(p["k"], list) else float(p["k"]), float(p["mass"]),
                          float(p.get("stderr", 0.0)), bool(p.get("detected", False)))
                for p in d.get("point_masses", []))
    return SpectralEstimate(k, np.asarray(d["density"], dtype=float), pms, int(d["N"]), int(d["blocks"]),
                            int(d["block_length"]), d.get("label", ""), d.get("meta", {}))


def spectrum_from_csv(text: str, peaks_text: str | None = None, block_length: int | None = None) -> SpectralEstimate:
    header, rows, meta = _read_csv(text)
    a = np.array([[float(v) for v in r] for r in rows])
    if header == ["k", "density"]:
        k, dens = a[:, 0], a[:, 1]
    elif header == ["k1", "k2", "density"]:
        k, dens = a[:, :2], a[:, 2]
    else:
        raise InvalidInput("not a spectrum CSV")
    pms = []
    if peaks_text:
        ph, prow, _ = _read_csv(peaks_text)
        nk = 1 if ph[0] == "k" else 2
        for r in prow:
            kk = float(r[0]) if nk == 1 else (float(r[0]), float(r[1]))
            pms.append(PointMass(kk, float(r[nk]), float(r[nk + 1]), r[nk + 2] == "true"))
    L = block_length or int(meta.get("L", 0))
    if L <= 0:
        raise InvalidInput("block length unknown; pass it explicitly")
    return SpectralEstimate(k, dens, tuple(pms), int(meta.get("N", 0)), int(meta.get("blocks", 1)), L,
                            meta.get("label", ""), {})


def load_spectrum(path: str | Path, block_length: int | None = None) -> SpectralEstimate:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        return from_json(text)
    peaks = path.with_name(path.stem + ".peaks.csv")
    return spectrum_from_csv(text, peaks.read_text() if peaks.exists() else None, block_length)


def entropy_to_csv(r: EntropyReport) -> str:
    if len(r.patch_counts):
        return _csv_text(["L", "count"], zip(r.block_lengths, r.patch_counts),
                         {"label": r.label, "samples": r.samples})
    rates = list(r.rate_estimates) + [""]
    rows = ([L, H, "" if rt == "" else fmt(rt)] for L, H, rt in zip(r.block_lengths, r.block_entropies, rates))
    buf = _io.StringIO()
    buf.write(f"# label={r.label}, samples={r.samples}\n")
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["L", "H_L", "rate"])
    for L, H, rt in rows:
        wr.writerow([fmt(L), fmt(H), rt])
    return buf.getvalue()


def entropy_to_json(r: EntropyReport) -> str:
    return dumps_json({"type": "EntropyReport", "label": r.label, "samples": r.samples,
                       "block_lengths": r.block_lengths, "block_entropies": r.block_entropies,
                       "rate_estimates": r.rate_estimates, "patch_counts": r.patch_counts})
