import json
import xml.etree.ElementTree as ET

import pytest

from geocover.cli import main
from geocover.geom import Disk
from geocover.io import InputError, load_points, load_shape
from geocover.pipeline import ShapeSpec
from geocover.svg import emit_svg

SVG = "{http://www.w3.org/2000/svg}"


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return p


def _run(tmp_path, points, shape, *extra):
    pf = _write(tmp_path, "points.json", {"points": points})
    sf = _write(tmp_path, "shape.json", shape)
    out = tmp_path / "out.json"
    code = main(["discretize", "--points", str(pf), "--shape", str(sf), "--out", str(out), *extra])
    return code, out


def test_lens_greedy(tmp_path):
    code, out = _run(tmp_path, [[0, 0], [1, 0]], {"type": "disk", "radius": 1}, "--solver", "greedy")
    assert code == 0
    doc = json.loads(out.read_text())
    assert [t["covered"] for t in doc["translates"]] == [[0, 1]]
    assert doc["solution"]["cardinality"] == 1
    assert doc["perturbation"]["applied"] is False


def test_chain_exact(tmp_path):
    code, out = _run(tmp_path, [[0, 0], [1.9, 0], [3.8, 0]], {"type": "disk", "radius": 1}, "--solver", "exact")
    doc = json.loads(out.read_text())
    assert code == 0
    assert [t["covered"] for t in doc["translates"]] == [[0, 1], [1, 2]]
    assert doc["solution"]["cardinality"] == 2


def test_malformed_shape(tmp_path, capsys):
    pf = _write(tmp_path, "points.json", {"points": [[0, 0]]})
    sf = _write(tmp_path, "shape.json", '{"type": "disk", "radius": 1')
    out = tmp_path / "out.json"
    assert main(["discretize", "--points", str(pf), "--shape", str(sf), "--out", str(out)]) == 2
    assert not out.exists()
    assert "shape.json:" in capsys.readouterr().err


@pytest.mark.parametrize("shape", [{"type": "disk", "radius": -1}, {"type": "blob"},
                                   {"type": "polygon", "outer": [[0, 0], [1, 1]]}])
def test_bad_shapes_exit_2(tmp_path, shape):
    code, out = _run(tmp_path, [[0, 0]], shape)
    assert code == 2 and not out.exists()


def test_algorithm_mismatch(tmp_path):
    code, out = _run(tmp_path, [[0, 0]], {"type": "disk", "radius": 1}, "--algorithm", "polygon")
    assert code == 2 and not out.exists()


def test_cap_exceeded(tmp_path):
    pts = [[i * 0.05, 0] for i in range(40)]
    code, out = _run(tmp_path, pts, {"type": "disk", "radius": 1}, "--algorithm", "oracle")
    assert code == 4 and not out.exists()


def test_csv_points(tmp_path):
    f = _write(tmp_path, "p.csv", "x,y\n0,0\n1.5, 2\n")
    assert load_points(f) == [(0, 0), (1.5, 2)]
    bad = _write(tmp_path, "q.csv", "0,0\n1,zz\n")
    with pytest.raises(InputError) as err:
        load_points(bad)
    assert err.value.where.endswith(":2:3")


def test_load_polygon_shape(tmp_path):
    f = _write(tmp_path, "s.json", {"type": "polygon", "outer": [[0, 0], [4, 0], [4, 4], [0, 4]],
                                    "holes": [[[1, 1], [2, 1], [2, 2]]], "reference": [1, 0]})
    shape = load_shape(f)
    assert shape.prototype.m == 7 and shape.prototype.reference == (1, 0)


def test_determinism(tmp_path):
    pts = [[0.1, 0.2], [0.9, 0.1], [0.5, 0.8], [2, 2], [2.5, 1.8]]
    outs = []
    for k in range(2):
        pf = _write(tmp_path, "p.json", {"points": pts})
        sf = _write(tmp_path, "s.json", {"type": "disk", "radius": 0.7})
        out, svg = tmp_path / f"o{k}.json", tmp_path / f"o{k}.svg"
        assert main(["discretize", "--points", str(pf), "--shape", str(sf), "--seed", "5",
                     "--out", str(out), "--svg", str(svg)]) == 0
        outs.append((out.read_bytes(), svg.read_bytes()))
    assert outs[0] == outs[1]


def test_svg_lens():
    doc = {"translates": [{"reference": [0.5, 0.0], "covered": [0, 1]}]}
    root = ET.fromstring(emit_svg(doc, [(0, 0), (1, 0)], ShapeSpec(Disk(1.0))))
    assert len(root.findall(f".//{SVG}path[@class='inverse']")) == 2
    assert len(root.findall(f".//{SVG}path[@class='star']")) == 1


def test_svg_empty():
    root = ET.fromstring(emit_svg({"translates": []}, [(3, 4)], ShapeSpec(Disk(1.0))))
    assert len(root.findall(f".//{SVG}circle[@class='point']")) == 1


def test_selfcheck(capsys):
    assert main(["selfcheck", "--spikes", "1", "2", "--groups", "3"]) == 0
    out = capsys.readouterr().out
    assert "8 perimeter crossings" in out and "32 perimeter crossings" in out
    assert "selfcheck passed" in out
