"""File formats: KPF1 field snapshots, eigenpair sidecars, NDJSON and CSV.

KPF1 layout (all little-endian): magic ``KPF1``, u32 version=1, u32 d,
u32 n[i] per axis, f64 L[i] per axis, u8 origin_centered, f64 t, then
prod(n) f64 field values row-major.  Readers reject unknown versions.

Floating-point text output uses 17 significant digits so every value
round-trips exactly.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .grid import PeriodicGrid, ScalarField

MAGIC = b"KPF1"
VERSION = 1


def write_kpf1(path, f: ScalarField, t: float) -> None:
    g = f.grid
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, g.d))
        fh.write(struct.pack(f"<{g.d}I", *g.n))
        fh.write(struct.pack(f"<{g.d}d", *g.L))
        fh.write(struct.pack("<B", 1 if g.origin_centered else 0))
        fh.write(struct.pack("<d", float(t)))
        fh.write(np.asarray(f.data, dtype="<f8").tobytes())


def read_kpf1(path) -> tuple[ScalarField, float]:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise ValueError(f"not a KPF1 file: bad magic {magic!r}")
        version, d = struct.unpack("<II", fh.read(8))
        if version != VERSION:
            raise ValueError(f"unsupported KPF1 version {version}")
        n = struct.unpack(f"<{d}I", fh.read(4 * d))
        L = struct.unpack(f"<{d}d", fh.read(8 * d))
        (centered,) = struct.unpack("<B", fh.read(1))
        (t,) = struct.unpack("<d", fh.read(8))
        count = int(np.prod(n))
        data = np.frombuffer(fh.read(8 * count), dtype="<f8")
        if data.size != count:
            raise ValueError("truncated KPF1 file")
    grid = PeriodicGrid(d=d, n=tuple(int(m) for m in n),
                        L=tuple(float(v) for v in L), origin_centered=bool(centered))
    return ScalarField(grid, data.astype(float)), t


def fmt(x) -> str:
    """Render a float with 17 significant digits (round-trip exact)."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def ndjson_line(pairs) -> str:
    """One NDJSON object from (key, value) pairs, keys kept in order."""
    parts = []
    for k, v in pairs:
        if v is None:
            sv = "null"
        elif isinstance(v, str):
            sv = '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
        elif isinstance(v, bool):
            sv = "true" if v else "false"
        elif isinstance(v, (int, np.integer)):
            sv = str(int(v))
        else:
            sv = fmt(v)
        parts.append(f'"{k}":{sv}')
    return "{" + ",".join(parts) + "}"


def write_eigenpair(phi_path, sidecar_path, phi1: ScalarField, lambda1: float,
                    residual: float, iterations: int) -> None:
    write_kpf1(phi_path, phi1, 0.0)
    Path(sidecar_path).write_text(
        f"lambda1={fmt(lambda1)} residual={fmt(residual)} iterations={int(iterations)}\n"
    )


FRONT_CSV_HEADER = "t,lambda,dir_index,r_inner,r_outer"


def write_front_csv(path, records) -> None:
    lines = [FRONT_CSV_HEADER]
    for rec in records:
        lines.append(",".join([fmt(rec.t), fmt(rec.level), str(rec.dir_index),
                               fmt(rec.r_inner), fmt(rec.r_outer)]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_front_csv(path):
    from .fronts import FrontRecord

    text = Path(path).read_text().strip().splitlines()
    if not text or text[0] != FRONT_CSV_HEADER:
        raise ValueError("not a front CSV file (bad header)")
    out = []
    for line in text[1:]:
        t, lam, di, ri, ro = line.split(",")
        out.append(FrontRecord(t=float(t), level=float(lam), dir_index=int(di),
                               r_inner=float(ri), r_outer=float(ro)))
    return out
