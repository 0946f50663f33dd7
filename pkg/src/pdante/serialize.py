"""Deterministic CSV and manifest output.

CSV files are RFC 4180 with LF line endings; floats are written with nine
significant digits and negative zero is printed as ``0``. Manifests are UTF-8
JSON with a fixed key order and carry everything needed to regenerate the
CSVs byte for byte.
"""

import csv
import io
import json

import numpy as np

from . import __version__
from .sequences import SequenceSpec

PROFILE_HEADER = ("offset_hz", "ix", "minus_iy", "iz", "engine")
VALIDITY_HEADER = ("n", "offset_ratio", "frobenius_distance")
LINES_HEADER = ("line", "offset_ratio", "position", "ridge_low", "ridge_high")
RESONANCE_HEADER = ("m", "n", "delta_nu_hz", "bessel_order", "bessel_argument", "scale", "suppressed")
FLUCTUATION_HEADER = ("n_avg", "fluctuation_std", "baseline_mean_excitation", "baseline_mean_z")

MANIFEST_KEYS = ("command", "version", "parameters", "seeds", "outputs", "sequences")


def fmt(x):
    """Nine-significant-digit float text with ``-0`` folded to ``0``."""
    x = float(x)
    if x == 0.0:
        x = 0.0
    return f"{x:.9g}"


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return str(v)


def csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def profile_csv(profile):
    rows = zip(profile.offsets, profile.ix, profile.minus_iy, profile.iz,
               [profile.engine] * len(profile.offsets))
    return csv_text(PROFILE_HEADER, rows)


def validity_csv(vmap):
    rows = (
        (int(n), r, vmap.distances[i, j])
        for i, n in enumerate(vmap.n_values)
        for j, r in enumerate(vmap.offset_ratios)
    )
    return csv_text(VALIDITY_HEADER, rows)


def resonance_csv(predictions):
    rows = (
        (p.m, p.n, p.delta_nu, p.bessel_order, p.bessel_argument, p.scale, p.suppressed)
        for p in predictions
    )
    return csv_text(RESONANCE_HEADER, rows)


def fluctuation_csv(entries):
    """``entries``: iterable of (n_avg, std, baseline_excitation, baseline_z)."""
    return csv_text(FLUCTUATION_HEADER, entries)


def manifest(command, parameters, outputs, seeds=(), sequences=()):
    return {
        "command": command,
        "version": __version__,
        "parameters": {k: parameters[k] for k in sorted(parameters)},
        "seeds": list(seeds),
        "outputs": dict(outputs),
        "sequences": [s.to_dict() for s in sequences],
    }


def manifest_text(m):
    ordered = {k: m[k] for k in MANIFEST_KEYS}
    return json.dumps(ordered, indent=2, ensure_ascii=False) + "\n"


def read_manifest(path):
    with open(path, encoding="utf-8") as fh:
        m = json.load(fh)
    missing = [k for k in MANIFEST_KEYS if k not in m]
    if missing:
        raise ValueError(f"manifest lacks keys {missing}")
    m["sequences"] = [SequenceSpec.from_dict(d) for d in m["sequences"]]
    return m
