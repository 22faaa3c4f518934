import json
import subprocess
import sys

import pytest

from dibramble.acceptance import SMOKE_ARGS
from dibramble.bramble import Bramble, dump_bramble
from dibramble.cli import cli_main
from dibramble.digraph import Digraph, write_graph


@pytest.fixture
def smoke(tmp_path):
    graph, ps = str(tmp_path / "g.txt"), str(tmp_path / "ps.json")
    assert cli_main(["gen-ps", "--g", "8", "--a", "4", "--b", "4", "--out", ps, "--graph-out", graph]) == 0
    return tmp_path, graph, ps


def _triangle(tmp_path, elements):
    graph = tmp_path / "tri.txt"
    write_graph(Digraph.bidirected(3, [(0, 1), (1, 2), (0, 2)]), graph)
    bramble = tmp_path / "b.json"
    dump_bramble(Bramble(tuple(elements)), bramble, witnesses=False)
    return str(graph), str(bramble)


class TestVerify:
    def test_valid(self, tmp_path, capsys):
        graph, bramble = _triangle(tmp_path, [{0}, {1}, {2}])
        assert cli_main(["verify", "--graph", graph, "--bramble", bramble]) == 0
        assert "size 3, congestion 1" in capsys.readouterr().out

    def test_invalid(self, tmp_path, capsys):
        graph = tmp_path / "arc.txt"
        write_graph(Digraph(2, [(0, 1)]), graph)
        bramble = tmp_path / "b.json"
        dump_bramble(Bramble(({0}, {1})), bramble)
        assert cli_main(["--json", "verify", "--graph", str(graph), "--bramble", str(bramble)]) == 1
        out = json.loads(capsys.readouterr().out)
        assert not out["ok"] and out["violations"] == ["TouchingViolation((0, 1))"]


class TestExtract:
    def test_smoke(self, smoke, capsys):
        tmp_path, graph, ps = smoke
        out = str(tmp_path / "b.json")
        code = cli_main(["extract", "--graph", graph, "--ps", ps, "--out", out] + SMOKE_ARGS)
        assert code == 0
        report = json.loads((tmp_path / "b.report.json").read_text())
        assert report["congestion"] <= 8 and report["params"]["a"] == 4
        capsys.readouterr()
        assert cli_main(["verify", "--graph", graph, "--bramble", out]) == 0
        assert cli_main(["--json", "order", "--graph", graph, "--bramble", out]) == 0
        assert json.loads(capsys.readouterr().out.splitlines()[-1])["exact"] is True

    def test_env_seed(self, smoke, monkeypatch):
        tmp_path, graph, ps = smoke
        monkeypatch.setenv("DIBRAMBLE_SEED", "7")
        args = [a for a in SMOKE_ARGS]
        i = args.index("--seed")
        del args[i:i + 2]
        report = tmp_path / "r.json"
        assert cli_main(["extract", "--graph", graph, "--ps", ps, "--out", str(tmp_path / "b.json"),
                         "--report", str(report)] + args) == 0
        assert json.loads(report.read_text())["seed"] == 7

    def test_bad_env_seed(self, smoke, monkeypatch):
        tmp_path, graph, ps = smoke
        monkeypatch.setenv("DIBRAMBLE_SEED", "x")
        assert cli_main(["extract", "--graph", graph, "--ps", ps, "--k", "2", "--sigma", "0.25",
                         "--out", str(tmp_path / "b.json")]) == 2

    def test_construction_gap(self, tmp_path):
        from dibramble.generators import bridge_gadget
        from dibramble.linkage import dump_path_system
        G, ps, _ = bridge_gadget(6, 10, shift=0)
        graph, psf = tmp_path / "g.txt", tmp_path / "ps.json"
        write_graph(G, graph)
        dump_path_system(ps, psf)
        out = tmp_path / "b.json"
        code = cli_main(["extract", "--graph", str(graph), "--ps", str(psf), "--out", str(out), "--k", "2",
                         "--d1", "4", "--d2", "4", "--d3", "1", "--bowtie-factor", "1"])
        assert code == 3 and not out.exists()
        assert "error" in json.loads((tmp_path / "b.report.json").read_text())


class TestUsage:
    def test_unknown_flag(self, capsys):
        assert cli_main(["verify", "--nope"]) == 2
        assert "dibramble:" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert cli_main(["verify", "--graph", str(tmp_path / "none"), "--bramble", "x"]) == 2

    def test_bad_sigma_and_cap(self, tmp_path):
        assert cli_main(["extract", "--graph", "g", "--ps", "p", "--k", "2", "--sigma", "2", "--out", "o"]) == 2
        assert cli_main(["order", "--graph", "g", "--bramble", "b", "--cap", "0"]) == 2

    def test_malformed_graph(self, tmp_path):
        graph = tmp_path / "g.txt"
        graph.write_text("2 1\n0 9\n")
        graph2, bramble = _triangle(tmp_path, [{0}])
        assert cli_main(["verify", "--graph", str(graph), "--bramble", bramble]) == 2

    def test_help(self):
        assert cli_main(["--help"]) == 0


class TestGenerators:
    def test_gen_grid(self, tmp_path, capsys):
        out = tmp_path / "cyl.txt"
        assert cli_main(["--json", "gen-grid", "--g", "3", "--out", str(out)]) == 0
        assert json.loads(capsys.readouterr().out)["n"] == 18
        assert out.read_text().startswith("18 ")

    def test_gen_ps_verified(self, tmp_path, capsys):
        assert cli_main(["gen-ps", "--g", "6", "--a", "2", "--b", "2", "--out", str(tmp_path / "p.json")]) == 0
        assert "verified exhaustively" in capsys.readouterr().out

    def test_order_beyond_cap(self, tmp_path, capsys):
        graph, bramble = _triangle(tmp_path, [{0}, {1}, {2}])
        assert cli_main(["order", "--graph", graph, "--bramble", bramble, "--cap", "2"]) == 0
        assert "between 3 and 3" in capsys.readouterr().out


def test_module_entry_point(tmp_path):
    graph, bramble = _triangle(tmp_path, [{0}, {1}])
    proc = subprocess.run([sys.executable, "-m", "dibramble", "verify", "--graph", graph, "--bramble", bramble],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "valid bramble" in proc.stdout


def test_selftest_subset(capsys):
    assert cli_main(["selftest", "--only", "7"]) == 0
    assert "[PASS] 7." in capsys.readouterr().out
