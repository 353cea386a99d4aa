from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from fractalsurf import SampledField
from fractalsurf.errors import IoError
from fractalsurf.io import export_bytes, export_field, load_csv

GOLDEN = Path(__file__).parent / "golden"


def reference_field():
    i = np.arange(5)
    X, Y = np.meshgrid(i, i)
    return SampledField(i / 4, i / 2, (X - 2) ** 2 / 4 + Y / 8)


@pytest.mark.parametrize("fmt", ["csv", "pgm", "obj"])
def test_golden(fmt, tmp_path):
    out = tmp_path / f"s.{fmt}"
    export_field(reference_field(), fmt, out)
    assert out.read_bytes() == (GOLDEN / f"reference.{fmt}").read_bytes()


def test_constant_pgm_is_black():
    data = export_bytes(SampledField([0, 1], [0, 1], np.full((2, 2), 3.7)), "pgm")
    assert data == b"P5\n2 2\n65535\n" + bytes(8)


def test_pgm_extremes():
    data = export_bytes(SampledField([0, 1], [0, 1], [[0.0, 1.0], [2.0, 4.0]]), "pgm")
    pix = np.frombuffer(data[len(b"P5\n2 2\n65535\n"):], dtype=">u2")
    assert pix.tolist() == [0, 16384, 32768, 65535]


def test_obj_counts():
    f = SampledField(np.linspace(0, 1, 3), np.linspace(0, 1, 3), np.zeros((3, 3)))
    lines = export_bytes(f, "obj").decode().splitlines()
    assert sum(l.startswith("v ") for l in lines) == 9
    faces = [list(map(int, l.split()[1:])) for l in lines if l.startswith("f ")]
    assert len(faces) == 8
    assert min(min(t) for t in faces) == 1 and max(max(t) for t in faces) == 9


def test_obj_faces_face_up():
    f = SampledField([0, 1, 3], [0, 2], np.zeros((2, 3)))
    lines = export_bytes(f, "obj").decode().splitlines()
    verts = np.array([list(map(float, l.split()[1:])) for l in lines if l.startswith("v ")])
    for l in lines:
        if l.startswith("f "):
            a, b, c = (verts[int(k) - 1] for k in l.split()[1:])
            assert np.cross(b - a, c - a)[2] > 0


def test_csv_order():
    f = SampledField([0, 1], [0, 5], [[1, 2], [3, 4]])
    assert export_bytes(f, "csv").decode().splitlines() == ["x,y,z", "0,0,1", "1,0,2", "0,5,3", "1,5,4"]


@given(arrays(float, (3, 4), elements=st.floats(-1e6, 1e6, allow_nan=False)))
def test_csv_round_trip(values):
    import tempfile
    f = SampledField(np.linspace(0, 0.7, 4), np.array([0.1, 0.2, 0.3]) ** 0.5, values)
    with tempfile.TemporaryDirectory() as d:
        path = Path(d) / "f.csv"
        export_field(f, "csv", path)
        g = load_csv(path)
    assert np.array_equal(g.xs, f.xs) and np.array_equal(g.ys, f.ys) and np.array_equal(g.values, f.values)


def test_unknown_format():
    with pytest.raises(ValueError):
        export_bytes(reference_field(), "png")


def test_unwritable_path(tmp_path):
    with pytest.raises(IoError):
        export_field(reference_field(), "csv", tmp_path / "missing" / "x.csv")


@pytest.mark.parametrize("text", ["a,b,c\n0,0,1\n", "x,y,z\n0,0,zz\n", "x,y,z\n0,0,1\n1,0,2\n0,1,3\n",
                                  "x,y,z\n0,0,1\n0,1,2\n1,0,3\n1,1,4\n"])
def test_bad_csv(tmp_path, text):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(IoError):
        load_csv(path)
