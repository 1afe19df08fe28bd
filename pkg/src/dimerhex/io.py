"""Flat config files and CSV / JSON / P2 writers.

Numbers are written with 17 significant digits so files round-trip exactly.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .model import CouplingSet, DecayLaw

CONFIG_KEYS = ("e0", "dd", "dh", "ds", "phi", "L", "R", "theta", "delta0", "lambda")


def fmt(x) -> str:
    return f"{float(x):.17g}"


def format_complex(z) -> str:
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}i"


def parse_complex(s: str) -> complex:
    t = s.strip()
    if not t.endswith("i"):
        raise ValueError(f"not a 're+im i' cell: {s!r}")
    body = t[:-1]
    # the sign that starts the imaginary part is the last one not in an exponent
    for i in range(len(body) - 1, 0, -1):
        if body[i] in "+-" and body[i - 1] not in "eE":
            try:
                return complex(float(body[:i]), float(body[i:]))
            except ValueError:
                break
    raise ValueError(f"not a 're+im i' cell: {s!r}")


def parse_config(text: str) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        try:
            out[key] = float(value)
        except ValueError:
            raise ValueError(f"line {lineno}: {key} is not a number: {value!r}") from None
        if not math.isfinite(out[key]):
            raise ValueError(f"line {lineno}: {key} must be finite")
    return out


def read_config(path) -> dict:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def couplings_from_config(cfg: dict, base: CouplingSet = CouplingSet()) -> CouplingSet:
    return base.replace(**{k: cfg[k] for k in ("e0", "dd", "dh", "ds", "phi") if k in cfg})


def geometry_from_config(cfg: dict) -> dict:
    law = DecayLaw(amplitude=cfg.get("delta0", 1.0), length_scale=cfg.get("lambda", 1.0))
    return {"L": cfg.get("L", 1.0), "R": cfg.get("R", 1.0), "theta": cfg.get("theta", 0.0), "law": law, "e0": cfg.get("e0", 0.0)}


def matrix_to_csv(m) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in np.asarray(m):
        w.writerow([format_complex(z) for z in row])
    return buf.getvalue()


def matrix_from_csv(text: str) -> np.ndarray:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    return np.array([[parse_complex(c) for c in r] for r in rows])


def spectrum_to_csv(spectrum, classes) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "eigenvalue", "class_id", "multiplicity"])
    for i, e in enumerate(spectrum.eigenvalues):
        cid = classes.class_of(i)
        w.writerow([i, fmt(e), cid, classes.classes[cid].multiplicity])
    return buf.getvalue()


def sweep_to_csv(table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    n_levels = table.energies.shape[1]
    w.writerow([table.parameter] + [f"E{i + 1}" for i in range(n_levels)] + ["pattern"])
    for v, row, pat in zip(table.values, table.energies, table.patterns):
        w.writerow([fmt(v)] + [fmt(e) for e in row] + [pat])
    return buf.getvalue()


def _label(lab) -> str:
    return "(" + ",".join(str(x) for x in lab) + ")" if isinstance(lab, tuple) else str(lab)


def grid_to_csv(grid) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eigenphase\\site"] + [_label(c) for c in grid.col_labels])
    for lab, row in zip(grid.row_labels, grid.values):
        w.writerow([_label(lab)] + [fmt(x) for x in row])
    return buf.getvalue()


def grid_to_pgm(grid, scale: int = 40, maxval: int = 255) -> str:
    """Plain (P2) graymap of |W|, one ``scale`` x ``scale`` block per cell,
    white for the largest magnitude."""
    mag = np.abs(grid.values)
    top = mag.max() or 1.0
    levels = np.rint(mag / top * maxval).astype(int)
    img = np.kron(levels, np.ones((scale, scale), dtype=int))
    lines = ["P2", f"{img.shape[1]} {img.shape[0]}", str(maxval)]
    lines += [" ".join(str(v) for v in row) for row in img]
    return "\n".join(lines) + "\n"


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")
