"""File formats: binary fields, deterministic CSV tables, JSON reports.

Binary field files are one JSON header line ({L, h, nx, ny, gamma, kind}
plus an echoed config) followed by row-major 64-bit little-endian reals:
one block for a scalar field, the two displacement blocks Y1, Y2 for a
flow map.  CSV files start with a `# config ...` comment, then the column
header; all floats are printed with 17 significant digits so that equal
inputs give byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .flow.fields import ScalarField2D
from .flow.maps import FlowMap

FLOAT_FMT = "%.17g"

_KINDS = ("scalar", "flow")


def format_float(x: float) -> str:
    return FLOAT_FMT % float(x)


def _header_line(L, h, n, gamma, kind, config) -> bytes:
    doc = {"L": L, "h": h, "nx": n, "ny": n, "gamma": gamma, "kind": kind}
    if config is not None:
        doc["config"] = config
    return (json.dumps(doc, sort_keys=True) + "\n").encode("ascii")


def _blocks(fh, n, count):
    out = []
    for _ in range(count):
        raw = fh.read(8 * n * n)
        if len(raw) != 8 * n * n:
            raise ValueError("truncated field file")
        out.append(np.frombuffer(raw, dtype="<f8").reshape(n, n).copy())
    return out


def write_field(path, field: ScalarField2D, config=None) -> None:
    with open(path, "wb") as fh:
        fh.write(_header_line(field.L, field.h, field.n, field.gamma,
                              "scalar", config))
        fh.write(np.ascontiguousarray(field.samples, dtype="<f8").tobytes())


def write_flow(path, flow: FlowMap, config=None) -> None:
    with open(path, "wb") as fh:
        fh.write(_header_line(flow.L, flow.h, flow.n, flow.gamma,
                              "flow", config))
        for block in (flow.Y1, flow.Y2):
            fh.write(np.ascontiguousarray(block, dtype="<f8").tobytes())


def read_field_file(path):
    """Returns (header dict, ScalarField2D | FlowMap) according to `kind`."""
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("ascii"))
        kind = header.get("kind")
        if kind not in _KINDS:
            raise ValueError(f"unknown field kind {kind!r}")
        n = int(header["nx"])
        if int(header["ny"]) != n:
            raise ValueError("only square grids are supported")
        L, h, gamma = float(header["L"]), float(header["h"]), float(header["gamma"])
        if kind == "scalar":
            (samples,) = _blocks(fh, n, 1)
            return header, ScalarField2D(L, h, samples, gamma)
        y1, y2 = _blocks(fh, n, 2)
        return header, FlowMap(L, h, y1, y2, gamma)


def csv_text(columns, rows, config=None) -> str:
    """Deterministic CSV: `# config ...` comment, header, 17-digit floats."""
    lines = []
    if config is not None:
        lines.append("# config " + json.dumps(config, sort_keys=True))
    lines.append(",".join(columns))
    for row in rows:
        cells = [c if isinstance(c, str) else format_float(c) for c in row]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_csv(path, columns, rows, config=None) -> None:
    Path(path).write_text(csv_text(columns, rows, config), encoding="ascii")


def read_csv(path):
    """Returns (config dict | None, columns, rows-as-strings)."""
    text = Path(path).read_text(encoding="ascii").splitlines()
    config = None
    if text and text[0].startswith("# config "):
        config = json.loads(text[0][len("# config "):])
        text = text[1:]
    columns = text[0].split(",") if text else []
    return config, columns, [line.split(",") for line in text[1:] if line]


def write_json_report(path, doc: dict, config=None) -> None:
    if config is not None:
        doc = dict(doc, config=config)
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n",
                          encoding="ascii")


def trajectory_rows(traj, stride: int = 16):
    """`t,node_i,node_j,x1,x2` rows on a strided node subset of each state."""
    rows = []
    for st in traj.states:
        x1, x2 = st.flow.position_arrays()
        n = st.flow.n
        for i in range(0, n, stride):
            for j in range(0, n, stride):
                rows.append((st.t, str(i), str(j), x1[i, j], x2[i, j]))
    return rows
