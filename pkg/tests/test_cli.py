import json
from pathlib import Path

import pytest

from cubicalsc.cli import COMMANDS, main, render, run

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

# one invocation per command, with the exit code each should produce
INVOCATIONS = [
    (["validate", "square.cx"], 0),
    (["validate", "missing_corner.cx"], 0),
    (["npc", "square.cx"], 0),
    (["npc", "missing_corner.cx"], 1),
    (["hyperplanes", "cube3.cx"], 0),
    (["carrier", "grid3.cx", "--edge", "e1.1x"], 0),
    (["hull", "grid3.cx", "--cells", "v0.0,v2.1"], 0),
    (["collapse", "square.cx", "--verify"], 0),
    (["collapse", "cube3.cx"], 0),
    (["collapse", "torus.cx"], 1),
    (["separate", "grid3.cx", "--jobs", "3"], 0),
    (["separate", "torus.cx"], 0),
    (["map-check", "a2_cover.map"], 0),
    (["fiber", "a2_cover.map", "a2_cover.map"], 0),
    (["symmetric", "rose_a2.pres"], 0),
    (["minimal", "rose_a2.pres"], 1),
    (["pieces", "abAB.pres"], 0),
    (["piece-bound", "abAB.pres"], 0),
    (["check-cn", "--n", "9", "rose_a2.pres"], 0),
    (["check-cn", "--n", "4", "abAB.pres"], 0),
    (["check-cn", "--n", "5", "abAB.pres"], 1),
    (["check-cn", "--n", "9", "rose_abcd_c9.pres", "--budget", "100000"], 0),
    (["diagram", "validate", "cone_tree.dgm"], 0),
    (["diagram", "reduce", "planted_0.dgm"], 0),
    (["diagram", "reduce", "planted_1.dgm"], 0),
    (["diagram", "features", "polyomino.dgm"], 0),
    (["diagram", "dichotomy", "cone_tree.dgm"], 0),
    (["diagram", "dichotomy", "polyomino.dgm"], 0),
    (["diagram", "dichotomy", "planted_1.dgm"], 2),
    (["artin", "build", "triangle_5.graph"], 0),
    (["artin", "profile", "edge_m5.graph"], 0),
    (["artin", "certify", "--n", "9", "edge_m5.graph"], 0),
    (["artin", "certify", "--n", "9", "edge_m4.graph"], 1),
    (["artin", "certify", "--n", "9", "free_inf.graph"], 0),
]


@pytest.fixture(autouse=True)
def _in_corpus(monkeypatch):
    monkeypatch.chdir(CORPUS)


def test_every_command_is_exercised():
    used = {" ".join(a[:2]) if a[0] in ("diagram", "artin") else a[0] for a, _ in INVOCATIONS}
    assert used == set(COMMANDS)


@pytest.mark.parametrize("argv,code", INVOCATIONS, ids=[" ".join(a) for a, _ in INVOCATIONS])
def test_exit_codes_and_status(argv, code):
    got, report, _ = run(argv)
    assert got == code, report
    assert isinstance(report["status"], str)


@pytest.mark.parametrize("argv,code", INVOCATIONS, ids=[" ".join(a) for a, _ in INVOCATIONS])
def test_reports_are_byte_identical(argv, code, capsys):
    outs = []
    for _ in range(2):
        main(argv)
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    json.loads(outs[0])


def test_collapse_square_certificate():
    code, report, _ = run(["collapse", "square.cx", "--verify"])
    assert code == 0 and report["status"] == "Certified"
    assert len(report["steps"]) == 4 and report["replay"]["ok"]


def test_torus_is_stuck_without_free_faces():
    _, report, _ = run(["collapse", "torus.cx"])
    assert report["free_faces"] == []


def test_artin_witness_length():
    code, report, _ = run(["artin", "certify", "--n", "9", "edge_m4.graph"])
    assert code == 1
    assert len(report["witness"]["cycle"]) == 8
    assert report["witness"]["piece_count"] == 8
    assert report["certified_max_n"] == 8


def test_cover_example_reports():
    assert run(["check-cn", "--n", "9", "rose_a2.pres"])[1]["status"] == "Certified"
    _, rep, _ = run(["minimal", "rose_a2.pres"])
    (row,) = rep["relators"]
    assert not row["holds"] and len(row["witness"]) == 1
    assert not row["witness"][0]["diagonal"]


def test_reduce_keeps_boundary():
    _, rep, _ = run(["diagram", "reduce", "planted_0.dgm"])
    before = json.loads((CORPUS / "planted_0.dgm").read_text())
    assert rep["status"] == "Reduced"
    assert rep["final_complexity"] < rep["initial_complexity"]

    def labels(d):
        lab = {e["id"]: e["label"] for e in d["edges"]}
        out = []
        for ref in d["outer"]:
            name, sign = ref[:-1], ref[-1]
            base = lab[name]
            out.append(base if sign == "+" else base[:-1] + ("-" if base[-1] == "+" else "+"))
        return out

    a, b = labels(before), labels(rep["diagram"])
    # same cyclic word, possibly read from another start
    assert len(a) == len(b) and any(a == b[k:] + b[:k] for k in range(len(b)))


@pytest.mark.parametrize("argv,kind", [
    (["frobnicate", "square.cx"], "UnknownCommand"),
    (["diagram", "paint", "cone_tree.dgm"], "UnknownCommand"),
    ([], "UnknownCommand"),
    (["npc", "absent.cx"], "FileNotFound"),
    (["check-cn", "abAB.pres"], "BadFlag"),
    (["check-cn", "--n", "five", "abAB.pres"], "BadFlag"),
    (["npc", "square.cx", "--format", "xml"], "BadFlag"),
    (["npc", "square.cx", "--jobs", "0"], "BadFlag"),
    (["npc", "square.cx", "--colour"], "BadFlag"),
])
def test_input_errors(argv, kind):
    code, report, _ = run(argv)
    assert code == 3
    assert report["status"] == "InputError" and report["error"]["kind"] == kind


def test_invalid_complex_is_exit_one(tmp_path):
    bad = tmp_path / "bad.cx"
    bad.write_text(json.dumps({"dim": 1, "vertices": ["a"], "edges": [{"id": "e", "ends": ["a", "z"]}]}))
    code, report, _ = run(["validate", str(bad)])
    assert code == 1 and report["status"] == "Invalid"
    assert run(["npc", str(bad)])[0] == 3


def test_pretty_and_output_file(tmp_path, capsys):
    target = tmp_path / "r.json"
    assert main(["npc", "square.cx", "--format", "pretty", "--output", str(target)]) == 0
    assert capsys.readouterr().out == ""
    text = target.read_text()
    assert text == render({"status": "NPC"}, "pretty")
    assert json.loads(text) == {"status": "NPC"}


def test_jobs_do_not_change_output(capsys):
    main(["separate", "grid3.cx"])
    one = capsys.readouterr().out
    main(["separate", "grid3.cx", "--jobs", "4"])
    assert capsys.readouterr().out == one
