import json
import math

import pytest

from energynet import families as fam
from energynet.cli import main
from energynet.comparison import ConductancePair
from energynet.graph_core import Network
from energynet.io import (
    FormatError,
    dump_network,
    dump_pair,
    parse_network,
    parse_pair,
    read_network,
    write_network,
    write_pair,
)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestIO:
    def test_round_trip_bit_identical(self, tmp_path):
        net = Network("abc", [("a", "b", 0.1), ("b", "c", 1 / 3), ("a", "c", 2.0**40 + 0.5)], "b")
        path = tmp_path / "net.json"
        write_network(net, path)
        back = read_network(path)
        assert back.vertices == net.vertices and back.origin == "b"
        assert back.conductances == net.conductances
        assert dump_network(back) == dump_network(net)

    def test_pair_round_trip(self):
        pair = ConductancePair(fam.path(3).scaled(0.3), fam.path(3))
        back = parse_pair(dump_pair(pair))
        assert back.b.conductances == pair.b.conductances
        assert back.c.conductances == pair.c.conductances

    def test_missing_origin(self):
        with pytest.raises(FormatError, match="missing field 'origin'"):
            parse_network('{"vertices": ["a"], "edges": []}')

    def test_unknown_field(self):
        with pytest.raises(FormatError, match="unknown field"):
            parse_network('{"vertices": ["a"], "origin": "a", "edges": [], "extra": 1}')

    def test_bad_json_position(self):
        with pytest.raises(FormatError, match="line 1 column"):
            parse_network('{"vertices": [')

    @pytest.mark.parametrize("c", ["0", "-1", '"x"', "true"])
    def test_bad_conductance(self, c):
        doc = '{"vertices": ["a", "b"], "origin": "a", "edges": [{"u": "a", "v": "b", "c": %s}]}' % c
        with pytest.raises(FormatError, match="'c'"):
            parse_network(doc)

    def test_lf_only(self, tmp_path):
        path = tmp_path / "p.json"
        write_pair(ConductancePair(fam.path(1), fam.path(1)), path)
        assert b"\r" not in path.read_bytes()


class TestCLI:
    def test_describe_geometric(self, capsys):
        code, out, _ = run(capsys, "describe", "--family", "geometric", "--n", "5", "--base", "2", "--format", "csv")
        assert code == 0
        rows = dict(line.split(",", 1) for line in out.strip().splitlines()[1:])
        assert rows["vertices"] == "11"
        assert rows["edges"] == "10"
        assert rows["connected"] == "yes"

    def test_resistance_k4(self, capsys):
        code, out, _ = run(capsys, "resistance", "--family", "complete", "--n", "4", "--x", "0", "--y", "3", "--format", "csv")
        assert code == 0
        assert out.strip().splitlines()[1] == "0,3,0.5"

    def test_dipole_path(self, capsys):
        code, out, _ = run(capsys, "dipole", "--family", "path", "--n", "2", "--x", "2", "--y", "0", "--format", "csv")
        assert code == 0
        assert out == "vertex,value\n0,0.0\n1,1.0\n2,2.0\n"

    def test_moments_pass(self, capsys):
        code, out, _ = run(capsys, "moments", "--family", "complete", "--n", "4", "--x", "1", "--y", "2")
        assert code == 0
        assert "FAIL" not in out

    def test_walk(self, capsys):
        code, out, _ = run(capsys, "walk", "--family", "path", "--n", "2", "--x", "1", "--trials", "500", "--seed", "4")
        assert code == 0
        assert "monte_carlo" in out

    def test_compare_geometric(self, capsys):
        code, out, _ = run(capsys, "compare", "--family", "geometric", "--n", "10", "--base", "1.5", "2")
        assert code == 0
        assert out.count("pass") == 8

    def test_invariant(self, capsys):
        code, out, _ = run(capsys, "invariant", "--family", "geometric", "--n", "60", "--base", "1.5", "2", "--format", "csv")
        assert code == 0
        k = float(out.splitlines()[1].split(",")[1])
        assert k == pytest.approx(math.sqrt(0.5), abs=1e-2)

    def test_check_failure_exit_one(self, capsys):
        # truncation at N=5 is far from the limit
        code, out, _ = run(capsys, "invariant", "--family", "geometric", "--n", "5", "--base", "1.5", "2")
        assert code == 1
        assert "FAIL" in out

    def test_invariant_pair_file(self, capsys, tmp_path):
        path = tmp_path / "pair.json"
        write_pair(ConductancePair(fam.geometric_integers(30, 1.5), fam.geometric_integers(30, 2.0)), path)
        interior = ",".join(str(k) for k in range(-29, 30))
        code, out, _ = run(capsys, "invariant", "--input", str(path), f"--interior={interior}")
        assert code == 0
        code, _, err = run(capsys, "invariant", "--input", str(path))
        assert code == 2 and "--interior" in err

    def test_generate_and_reread(self, capsys, tmp_path):
        path = tmp_path / "hct.json"
        code, _, _ = run(capsys, "generate", "--family", "hct", "--depth", "3", "--levels", "1,0.5,0.25", "--out", str(path))
        assert code == 0
        net = read_network(path)
        assert net.conductances == fam.horizontally_connected_tree(3, [1, 0.5, 0.25]).conductances
        code, out, _ = run(capsys, "describe", "--input", str(path))
        assert code == 0

    def test_csv_out_file(self, capsys, tmp_path):
        path = tmp_path / "r.csv"
        code, out, _ = run(capsys, "resistance", "--family", "path", "--n", "3", "--x", "0", "--y", "3", "--format", "csv", "--out", str(path))
        assert code == 0 and out == ""
        assert path.read_text() == "x,y,resistance\n0,3,3.0\n"

    @pytest.mark.parametrize(
        "argv",
        [
            ["resistance", "--family", "path", "--n", "3", "--x", "0", "--y", "9"],
            ["resistance", "--family", "path", "--n", "3", "--x", "0"],
            ["describe"],
            ["describe", "--family", "nope", "--n", "3"],
            ["describe", "--family", "geometric", "--n", "3", "--base", "0.5"],
            ["compare", "--family", "geometric", "--n", "3", "--base", "2"],
            ["compare", "--family", "geometric", "--n", "3", "--base", "3", "2"],
            ["walk", "--family", "path", "--n", "3", "--x", "0"],
            ["frobnicate"],
        ],
    )
    def test_input_errors(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == 2
        assert err

    def test_bad_file(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"vertices": ["a"], "edges": []}')
        code, _, err = run(capsys, "describe", "--input", str(path))
        assert code == 2
        assert "missing field 'origin'" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "describe", "--input", str(tmp_path / "nope.json"))
        assert code == 2

    def test_disconnected_file(self, capsys, tmp_path):
        path = tmp_path / "d.json"
        write_network(Network("abcd", [("a", "b", 1), ("c", "d", 1)], "a"), path)
        code, out, err = run(capsys, "resistance", "--input", str(path), "--x", "a", "--y", "c")
        assert code == 2
        assert "not connected" in err
