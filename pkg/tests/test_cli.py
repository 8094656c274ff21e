import json
import subprocess
import sys

import pytest

from helpers import data
from posetmod import io
from posetmod.cli import main
from posetmod.generators import random_findet


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def box_module(tmp_path):
    p = tmp_path / "m.json"
    p.write_text(io.dumps(io.module_to_json(random_findet(2, 4, 6))))
    return p


def test_phom_and_fringe_worked_example(capsys, tmp_path):
    enc = tmp_path / "enc.json"
    code, _, _ = run(capsys, "phom", data("worked_filtration.json"), "--dim", 0, "--encoding", "-o", enc)
    assert code == 0
    code, out, _ = run(capsys, "fringe", enc)
    assert code == 0
    d = json.loads(out)
    assert len(d["rows"]) == 3 and len(d["cols"]) == 3
    code, out, _ = run(capsys, "phom", data("worked_filtration.json"), "--dim", 0)
    m = io.module_from_json(json.loads(out))
    assert m.dims[m.cell((1, 1))] == 3


def test_fringe_of_box_module(capsys, box_module):
    code, out, _ = run(capsys, "fringe", box_module)
    assert code == 0 and "entries" in json.loads(out)


def test_encode(capsys, box_module):
    code, out, _ = run(capsys, "encode", box_module)
    assert code == 0
    d = json.loads(out)
    assert set(d) == {"box", "pi", "H"}


def test_encode_rejects_bad_partition(capsys, tmp_path):
    part = tmp_path / "p.json"
    part.write_text(json.dumps([[[0, 0], [0, 1], [1, 0], [1, 1]]]))
    code, _, err = run(capsys, "encode", data("noncommuting.json"), "--partition", part)
    assert code == 1 and "witness" in err


@pytest.mark.parametrize("side", ["upset", "downset"])
def test_resolve(capsys, box_module, side):
    code, out, _ = run(capsys, "resolve", box_module, "--side", side)
    d = json.loads(out)
    assert code == 0 and d["side"] == side and len(d["differentials"]) == len(d["terms"]) - 1


def test_primary(capsys, box_module):
    code, out, _ = run(capsys, "primary", box_module)
    d = json.loads(out)
    assert code == 0 and d["injective"] is True and d["components"]


def test_hom_indicator_example(capsys):
    code, out, _ = run(capsys, "hom", "--upset", data("m2_upset.json"), "--downset", data("m2_downset.json"))
    assert code == 0 and out == "2\n"


def test_hom_of_modules(capsys, box_module):
    code, out, _ = run(capsys, "hom", box_module, box_module)
    assert code == 0 and int(out) >= 1


def test_verify_kinds(capsys, box_module):
    assert run(capsys, "verify", box_module)[1] == "ok module\n"
    assert run(capsys, "verify", data("worked_filtration.json"))[1] == "ok filtration\n"
    assert run(capsys, "verify", data("m2_upset.json"))[1] == "ok region\n"


def test_verify_noncommuting(capsys):
    code, _, err = run(capsys, "verify", data("noncommuting.json"))
    assert code == 1 and "((0, 0), (1, 0), (0, 1), (1, 1))" in err


def test_verify_late_face(capsys, tmp_path):
    p = tmp_path / "f.json"
    p.write_text(json.dumps({"n": 1, "simplices": [{"vertices": [0], "entries": [[2]]},
                                                    {"vertices": [1], "entries": [[0]]},
                                                    {"vertices": [0, 1], "entries": [[1]]}]}))
    code, _, err = run(capsys, "verify", p)
    assert code == 1 and "witness" in err


def test_malformed_json(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{\n")
    code, _, err = run(capsys, "verify", p)
    assert code == 1 and f"{p}:2:" in err


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "verify", "/nonexistent.json")[0] == 2
    assert run(capsys, "phom", data("two_vertex.json"))[0] == 2
    assert run(capsys, "hom", "--upset", data("m2_upset.json"))[0] == 2


def test_field_option(capsys):
    code, out, _ = run(capsys, "phom", data("two_vertex.json"), "--dim", 0, "--field", "p:7")
    assert code == 0 and json.loads(out)["field"] == "p:7"
    assert run(capsys, "phom", data("two_vertex.json"), "--dim", 0, "--field", "p:8")[0] == 2


def test_deterministic_across_threads(capsys, box_module):
    outs = {run(capsys, "fringe", box_module, "--threads", t)[1] for t in (1, 4)}
    outs |= {run(capsys, "fringe", box_module)[1]}
    assert len(outs) == 1


def test_module_entry_point(box_module):
    r = subprocess.run([sys.executable, "-m", "posetmod", "verify", str(box_module)], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "ok module\n"
