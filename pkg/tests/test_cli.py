import hashlib
import json
import subprocess
import sys

import pytest
from corpus import e6, path3

from invschreier import io
from invschreier.cli import run
from invschreier.lazy import z2_with_diagonal
from invschreier.schreier import reverse_cycle, a_cycles
from invschreier.graph_core import ball


@pytest.fixture
def files(tmp_path):
    (tmp_path / "e6.sg").write_text(io.format_schreier(e6()))
    k5 = "graph 5\n" + "".join(f"edge {u} {v}\n" for u in range(5) for v in range(u + 1, 5)) + "root 0\n"
    (tmp_path / "k5.el").write_text(k5)
    (tmp_path / "p3.el").write_text(io.format_edge_list(path3()))
    return tmp_path


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_verify(files, capsys):
    assert run(["verify", str(files / "e6.sg")]) == 0
    assert capsys.readouterr().out == "valid schreier structure, rank 2, 6 vertices\n"


def test_factorize_then_verify(files, capsys):
    out = files / "k5.sg"
    assert run(["factorize", "--in", str(files / "k5.el"), "--out", str(out)]) == 0
    capsys.readouterr()
    assert run(["verify", str(out), "--json"]) == 0
    doc = _json(capsys)
    assert doc == {"v": 1, "valid": True, "rank": 2, "n_vertices": 5}


def test_factorize_is_deterministic(files):
    digests = set()
    for name in ("a.sg", "b.sg"):
        run(["factorize", "--in", str(files / "k5.el"), "--out", str(files / name), "--seed", "3"])
        digests.add(hashlib.sha256((files / name).read_bytes()).hexdigest())
    assert len(digests) == 1


def test_witness_json(files, capsys):
    G = z2_with_diagonal()
    sg = io.schreier_from_ball(ball(G, None, 4))
    root_cycle = next(c for c in a_cycles(sg, 3).cycles if sg.root in c.vertices)
    (files / "z.sg").write_text(io.format_schreier(sg))
    (files / "zr.sg").write_text(io.format_schreier(reverse_cycle(sg, root_cycle)))
    code = run(["witness", str(files / "z.sg"), str(files / "zr.sg"), "--max-len", "4", "--json"])
    assert code == 0
    assert _json(capsys) == {"v": 1, "witness": "a3 a2^-1 a1^-1"}


def test_witness_none_exits_4(files, capsys):
    assert run(["witness", str(files / "e6.sg"), str(files / "e6.sg"), "--max-len", "3"]) == 4


def test_check_unimodular(files, capsys):
    assert run(["check-unimodular", str(files / "p3.el"), "--radius", "1"]) == 0
    assert run(["check-unimodular", str(files / "p3.el"), "--root", "dirac", "--json"]) == 4
    doc = json.loads(capsys.readouterr().out.splitlines()[-1])
    assert doc["ok"] is False and doc["worst"] in ({"lhs": "2", "rhs": "0"}, {"lhs": "0", "rhs": "2"})


def test_estimate_round_trip(files, capsys):
    m = files / "m.json"
    assert run(["estimate", "--model", "reversal:z2diag:3:p=0.5", "-N", "300", "--seed", "1",
                "--radius", "2", "--out", str(m)]) == 0
    assert run(["check-unimodular", str(m)]) == 0


def test_exit_codes(files, capsys, monkeypatch):
    bad = files / "bad.el"
    bad.write_text("graph 2\nedge 0 7\n")
    assert run(["verify", str(files / "missing.sg")]) == 1
    assert run(["factorize", "--in", str(bad)]) == 1
    assert "line 2" in capsys.readouterr().err
    assert run(["factorize", "--in", str(files / "p3.el")]) == 2
    assert run(["ball", "nosuchgraph"]) == 2
    assert run(["nosuchcommand"]) == 1
    monkeypatch.setenv("SCHREIER_BUDGET", "5")
    assert run(["extend", "grandfather:3", "--radius", "3"]) == 3
    assert "budget" in capsys.readouterr().err


def test_count_reversals(files, capsys):
    assert run(["count-reversals", str(files / "e6.sg"), "--json"]) == 0
    doc = _json(capsys)
    assert (doc["count"], doc["n_cycles"], doc["rigid"]) == (4, 2, False)


def test_extend_ball_is_valid(files, capsys):
    out = files / "gf.sg"
    assert run(["extend", "grandfather:3", "--radius", "2", "--out", str(out)]) == 0
    capsys.readouterr()
    assert run(["verify", str(out)]) == 0
    assert capsys.readouterr().out.startswith("valid truncated schreier structure")


def test_console_script(files):
    proc = subprocess.run([sys.executable, "-m", "invschreier.cli", "export-dot", str(files / "e6.sg")],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.startswith("digraph")


def test_subgroup_membership(capsys):
    assert run(["subgroup", "--gens", "a1^2,a2", "--rank", "2", "--member", "a1 a2", "--json"]) == 0
    assert _json(capsys) == {"v": 1, "n_vertices": 2, "word": "a1 a2", "member": False}
