"""Deterministic machine-readable output.

Identical inputs must produce byte-identical files, so everything here
avoids timestamps, locale formatting, and dict-order surprises: floats
are written with 17 significant digits (round-trip exact for doubles),
non-finite values become null, and field order is fixed by construction.
Write failures surface as the built-in OSError.
"""

import math

import numpy as np


def format_float(x) -> str:
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return "%.17g" % x


def _json_fragment(obj, indent: int) -> str:
    pad = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{out}"'
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad}  "{key}": {_json_fragment(val, indent + 1)}'
            for key, val in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{pad}  {_json_fragment(val, indent + 1)}" for val in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json(obj) -> str:
    return _json_fragment(obj, 0) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(to_json(obj))


AUDIT_COLUMNS = ("name", "lhs", "rhs", "relative_margin", "hypotheses", "sharp", "verdict")


def _hypotheses_cell(hyps) -> str:
    parts = []
    for h in hyps:
        flag = "ok" if h["satisfied"] else "unmet"
        parts.append(f"{h['name']}={flag}({format_float(h['witness'])})")
    return ";".join(parts)


def audits_to_csv(audit_dicts) -> str:
    lines = [",".join(AUDIT_COLUMNS)]
    for d in audit_dicts:
        row = [
            d["name"],
            format_float(d["lhs"]),
            format_float(d["rhs"]),
            format_float(d["relative_margin"]),
            _hypotheses_cell(d["hypotheses"]),
            "true" if d["sharp"] else "false",
            d["verdict"],
        ]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


EIG_COLUMNS = ("kind", "eigenvalue", "residual_norm")


def eigenvalues_to_csv(rows) -> str:
    lines = [",".join(EIG_COLUMNS)]
    for r in rows:
        lines.append(
            ",".join([r["kind"], format_float(r["eigenvalue"]), format_float(r["residual_norm"])])
        )
    return "\n".join(lines) + "\n"


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def plot_data(hs, values) -> str:
    """Two-column (h, value) text, one refinement level per row."""
    if len(hs) != len(values):
        raise ValueError("h and value columns differ in length")
    lines = [f"{format_float(h)} {format_float(v)}" for h, v in zip(hs, values)]
    return "\n".join(lines) + "\n"


def run_header(geometry: str, grid, parameters: dict, version: str) -> dict:
    """Fixed-order metadata block leading every JSON report."""
    return {
        "tool": "driftgeo",
        "version": version,
        "geometry": geometry,
        "grid": [int(n) for n in grid],
        "parameters": {k: parameters[k] for k in sorted(parameters)},
    }
