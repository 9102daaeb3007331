import struct

import numpy as np
import pytest

from fkpp.fronts import FrontRecord
from fkpp.grid import ScalarField, make_grid
from fkpp.io import fmt, ndjson_line, read_front_csv, read_kpf1, write_front_csv, write_kpf1


def test_kpf1_round_trip(tmp_path, rng):
    for d, n, L, centered in [(1, 16, 3.5, True), (2, 8, 1.0, False)]:
        g = make_grid(d, n, L, origin_centered=centered)
        f = ScalarField(g, rng.normal(size=g.size))
        path = tmp_path / "f.kpf1"
        write_kpf1(path, f, t=2.25)
        back, t = read_kpf1(path)
        assert t == 2.25
        assert back.grid == g
        assert np.array_equal(back.data, f.data)


def test_kpf1_exact_byte_layout(tmp_path):
    g = make_grid(1, 8, 2.0, origin_centered=True)
    f = ScalarField(g, np.arange(8, dtype=float))
    path = tmp_path / "f.kpf1"
    write_kpf1(path, f, t=1.5)
    blob = path.read_bytes()
    want = b"KPF1"
    want += struct.pack("<II", 1, 1)
    want += struct.pack("<I", 8)
    want += struct.pack("<d", 2.0)
    want += struct.pack("<B", 1)
    want += struct.pack("<d", 1.5)
    want += np.arange(8, dtype="<f8").tobytes()
    assert blob == want


def test_kpf1_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.kpf1"
    path.write_bytes(b"NOPE" + b"\x00" * 64)
    with pytest.raises(ValueError, match="magic"):
        read_kpf1(path)


def test_kpf1_rejects_unknown_version(tmp_path):
    g = make_grid(1, 8, 1.0)
    f = ScalarField(g, np.zeros(8))
    path = tmp_path / "f.kpf1"
    write_kpf1(path, f, 0.0)
    blob = bytearray(path.read_bytes())
    blob[4:8] = struct.pack("<I", 2)
    path.write_bytes(bytes(blob))
    with pytest.raises(ValueError, match="version"):
        read_kpf1(path)


def test_kpf1_truncated(tmp_path):
    g = make_grid(1, 8, 1.0)
    f = ScalarField(g, np.zeros(8))
    path = tmp_path / "f.kpf1"
    write_kpf1(path, f, 0.0)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ValueError, match="truncated"):
        read_kpf1(path)


def test_fmt_round_trips(rng):
    for x in [0.5, 1 / 3, np.pi, 1e-17, -2.3e5] + list(rng.normal(size=20)):
        assert float(fmt(float(x))) == float(x)


def test_ndjson_line_shape():
    line = ndjson_line([("t", 0.5), ("stop", None), ("name", 'a"b'), ("ok", True), ("n", 3)])
    assert line == '{"t":0.5,"stop":null,"name":"a\\"b","ok":true,"n":3}'
    import json

    assert json.loads(line) == {"t": 0.5, "stop": None, "name": 'a"b', "ok": True, "n": 3}


def test_front_csv_round_trip(tmp_path):
    recs = [FrontRecord(t=0.25, level=0.3, dir_index=0, r_inner=1.0625, r_outer=2.5),
            FrontRecord(t=0.5, level=0.3, dir_index=1, r_inner=0.0, r_outer=0.0)]
    path = tmp_path / "fronts.csv"
    write_front_csv(path, recs)
    back = read_front_csv(path)
    assert back == recs


def test_front_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "fronts.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError):
        read_front_csv(path)
