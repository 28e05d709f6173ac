"""Deterministic text formatting shared by the dataset writers."""
from __future__ import annotations

import json
import math
from typing import Optional, Sequence

SIG_DIGITS = 12


def format_float(x: Optional[float]) -> str:
    """12 significant digits in scientific notation; ``inf``, ``nan`` and empty for None."""
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        x = 0.0  # drop the sign of negative zero
    return f"{x:.{SIG_DIGITS - 1}e}"


def json_number(x: Optional[float]):
    """Round-trip ``x`` through the fixed text format so JSON output is stable too."""
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(format_float(x))


def _bool(v: bool) -> str:
    return "true" if v else "false"


def metric_point_dict(p) -> dict:
    return {
        "eta": json_number(p.eta),
        "snr": json_number(p.snr),
        "fidelity": json_number(p.fidelity),
        "f_opt": json_number(p.f_opt),
        "in_cloning_region": bool(p.in_cloning_region),
        "warnings": list(p.warnings),
    }


def _comment_block(comments: Sequence[str]) -> list[str]:
    return [f"# {c}" for c in comments]


def grid_to_csv(grid, comments: Sequence[str] = ()) -> str:
    """Long format: one row per cell, first axis outermost."""
    a1, a2 = grid.axes
    lines = _comment_block(comments)
    lines.append(f"{a1.name},{a2.name},eta,snr,fidelity,f_opt,in_region")
    for x, row in zip(a1.values, grid.points):
        for y, p in zip(a2.values, row):
            lines.append(",".join([
                format_float(x), format_float(y), format_float(p.eta), format_float(p.snr),
                format_float(p.fidelity), format_float(p.f_opt), _bool(p.in_cloning_region),
            ]))
    return "\n".join(lines) + "\n"


def grid_to_json(grid, meta: Optional[dict] = None) -> str:
    """Axis metadata plus row-major value arrays."""
    flat = [p for row in grid.points for p in row]
    doc = {
        "meta": meta or {},
        "axes": [dict(a.as_dict(), values=[json_number(v) for v in a.values]) for a in grid.axes],
        "fixed": {k: json_number(v) for k, v in sorted(grid.fixed.items())},
        "shape": list(grid.shape),
        "order": "row-major",
        "data": {
            "eta": [json_number(p.eta) for p in flat],
            "snr": [json_number(p.snr) for p in flat],
            "fidelity": [json_number(p.fidelity) for p in flat],
            "f_opt": [json_number(p.f_opt) for p in flat],
            "in_region": [bool(p.in_cloning_region) for p in flat],
        },
    }
    return json.dumps(doc, indent=1) + "\n"


def curves_to_csv(curves, comments: Sequence[str] = ()) -> str:
    """One block per curve: a ``# curve`` comment with (b, chi), a header row, the dots."""
    lines = _comment_block(comments)
    for k, c in enumerate(curves):
        if k:
            lines.append("")
        lines.append(f"# curve b={format_float(c.b)} chi={format_float(c.chi)}")
        lines.append("finesse,eta,fidelity,f_opt_gap")
        for f, e, fid, gap in zip(c.finesse, c.eta, c.fidelity, c.f_opt_gap):
            lines.append(",".join(format_float(v) for v in (f, e, fid, gap)))
    return "\n".join(lines) + "\n"


def read_curves_csv(text: str) -> list[dict]:
    """Parse :func:`curves_to_csv` output back into dicts of float lists."""
    curves: list[dict] = []
    cur = None
    for line in text.splitlines():
        if line.startswith("# curve"):
            fields = dict(kv.split("=") for kv in line[len("# curve"):].split())
            cur = {"b": float(fields["b"]), "chi": float(fields["chi"]),
                   "finesse": [], "eta": [], "fidelity": [], "f_opt_gap": []}
            curves.append(cur)
        elif not line or line.startswith("#") or line.startswith("finesse,"):
            continue
        elif cur is not None:
            vals = line.split(",")
            for key, v in zip(("finesse", "eta", "fidelity", "f_opt_gap"), vals):
                cur[key].append(float(v) if v else None)
    return curves


def curves_to_json(curves, meta: Optional[dict] = None) -> str:
    doc = {
        "meta": meta or {},
        "curves": [
            {
                "b": json_number(c.b),
                "chi": json_number(c.chi),
                "finesse": [json_number(v) for v in c.finesse],
                "eta": [json_number(v) for v in c.eta],
                "fidelity": [json_number(v) for v in c.fidelity],
                "f_opt_gap": [json_number(v) for v in c.f_opt_gap],
            }
            for c in curves
        ],
    }
    return json.dumps(doc, indent=1) + "\n"
