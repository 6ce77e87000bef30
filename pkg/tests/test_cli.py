"""Tests for the command-line interface, exit codes, and the results cache."""

from __future__ import annotations

import json

import pytest

from fiveflow.capacity import k4_gadget, standard_edge
from fiveflow.cli import main
from fiveflow.construct import build_appendix_snark
from fiveflow.graph import (
    petersen_graph,
    read_capacity_graph,
    read_graph6,
    write_capacity_graph,
    write_graph6,
)
from fiveflow.si5 import OPEN_41
from fiveflow.wheels import WheelTemplate, even_subgraph_from_rim


@pytest.fixture()
def petersen_file(tmp_path):
    path = tmp_path / "petersen.g6"
    path.write_text(write_graph6(petersen_graph()) + "\n")
    return str(path)


@pytest.fixture()
def k4_gadget_file(tmp_path):
    path = tmp_path / "k4-gadget.cg"
    path.write_text(write_capacity_graph(k4_gadget()))
    return str(path)


@pytest.fixture()
def w4_rim_file(tmp_path):
    wt = WheelTemplate(4, even_subgraph_from_rim(4, 0b1111), OPEN_41)
    path = tmp_path / "w4-rim-41.cg"
    path.write_text(write_capacity_graph(wt.capacity_graph()))
    return str(path)


# ===========================================================================
# decide and nz5
# ===========================================================================


class TestDecide:
    def test_petersen_infeasible(self, petersen_file, capsys):
        """No faithful flow with every edge in the wide interval."""
        assert main(["decide", petersen_file]) == 1
        assert capsys.readouterr().out == "Infeasible\n"

    def test_wheel_rim_feasible_with_certificate(self, w4_rim_file, capsys):
        assert main(["decide", w4_rim_file, "--certificate"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("Feasible\n")
        assert "\nf r1 " in out and "\nf s4 " in out

    def test_porcelain_schema(self, petersen_file, capsys):
        """Seven tab-separated fields, stable order."""
        assert main(["decide", petersen_file, "--porcelain"]) == 1
        fields = capsys.readouterr().out.strip().split("\t")
        assert len(fields) == 7
        assert fields[0] == "decide"
        assert fields[1] == "1"
        assert len(fields[2]) == 64
        assert fields[3] == "Infeasible"
        assert int(fields[5]) > 0

    def test_malformed_input(self, tmp_path, capsys):
        bad = tmp_path / "bad.cg"
        bad.write_text("not a graph\n")
        assert main(["decide", str(bad)]) == 2
        assert "error:" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert main(["decide", str(tmp_path / "absent.g6")]) == 2
        assert "error:" in capsys.readouterr().err

    def test_guard_refuses_large_instances(self, tmp_path, capsys):
        path = tmp_path / "snark.g6"
        path.write_text(write_graph6(build_appendix_snark()) + "\n")
        assert main(["decide", str(path)]) == 2
        assert "guard" in capsys.readouterr().err
        assert main(["decide", str(path), "--guard-edges", "10"]) == 2


class TestNz5:
    def test_petersen_has_integer_flow(self, petersen_file, capsys):
        """The Petersen graph admits a nowhere-zero integer 5-flow."""
        assert main(["nz5", petersen_file]) == 0
        assert capsys.readouterr().out == "Feasible\n"

    def test_certificate_uses_integers(self, petersen_file, capsys):
        assert main(["nz5", petersen_file, "--certificate"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "Feasible"
        values = {line.split()[2] for line in lines[1:]}
        assert values <= {"1/1", "2/1", "3/1", "4/1"}


# ===========================================================================
# capacity and predicate
# ===========================================================================


class TestCapacity:
    def test_k4_gadget(self, k4_gadget_file, capsys):
        """Everything but the two integer points 2 and 3 passes through."""
        assert main(["capacity", k4_gadget_file]) == 0
        assert capsys.readouterr().out == "(2,3)u(3,2)\n"

    def test_standard_edge(self, tmp_path, capsys):
        path = tmp_path / "edge.cg"
        path.write_text(write_capacity_graph(standard_edge()))
        assert main(["capacity", str(path)]) == 0
        assert capsys.readouterr().out == "(1,4)\n"

    def test_needs_terminals(self, w4_rim_file, capsys):
        assert main(["capacity", w4_rim_file]) == 2
        assert "terminal" in capsys.readouterr().err.lower()


class TestPredicate:
    def test_full_rim_odd(self, capsys):
        assert main(["predicate", "7", "rim", "(4,1)"]) == 1
        assert capsys.readouterr().out == "Phi_c >= 5: true\n"

    def test_full_rim_even(self, capsys):
        assert main(["predicate", "4", "rim", "(4,1)"]) == 0
        assert capsys.readouterr().out == "Phi_c >= 5: false\n"

    def test_mask_argument(self, capsys):
        """A single rim edge generates the hub triangle."""
        assert main(["predicate", "3", "0b001", "(4,1)"]) == 1
        assert capsys.readouterr().out == "Phi_c >= 5: true\n"

    def test_bad_capacity_string(self, capsys):
        assert main(["predicate", "5", "rim", "(4,"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_empty_mask_rejected(self, capsys):
        assert main(["predicate", "5", "0", "(4,1)"]) == 2


# ===========================================================================
# scan
# ===========================================================================


class TestScan:
    def test_report_to_stdout(self, capsys):
        assert main(["scan", "3"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].split("\t") == [
            "n", "rim_mask", "A", "predicate", "engine", "certificate", "seconds",
        ]
        assert len(lines) == 62
        assert "disagreements=0" in lines[-1]

    def test_report_to_file(self, tmp_path, capsys):
        out = tmp_path / "report.tsv"
        assert main(["scan", "3", "--output", str(out)]) == 0
        stdout = capsys.readouterr().out
        assert f"wrote {out}" in stdout
        assert len(out.read_text().splitlines()) == 62

    def test_jobs_do_not_change_the_report(self, tmp_path):
        one, two = tmp_path / "one.tsv", tmp_path / "two.tsv"
        assert main(["scan", "3", "--output", str(one)]) == 0
        assert main(["scan", "3", "--jobs", "2", "--output", str(two)]) == 0
        first = one.read_text()
        second = two.read_text()
        strip = lambda text: [
            line.rsplit("\t", 1)[0] for line in text.splitlines()[:-1]
        ]
        assert strip(first) == strip(second)

    def test_porcelain_counts(self, capsys):
        assert main(["scan", "3", "--porcelain"]) == 0
        fields = capsys.readouterr().out.strip().split("\t")
        assert fields[0] == "scan" and fields[3] == "60/0/0"


# ===========================================================================
# build and check-snark
# ===========================================================================


class TestBuild:
    def test_appendix_outputs(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["build", "appendix", "--out-dir", str(out)]) == 0
        stdout = capsys.readouterr().out
        assert "snark true" in stdout
        assert "template-decision Infeasible" in stdout
        g = read_graph6((out / "appendix-snark.g6").read_text())
        assert g.vertex_count == 28 and g.edge_count == 42
        template = read_capacity_graph((out / "appendix-template.cg").read_text())
        constrained = [
            eid for eid, s in template.sigma.items() if s == OPEN_41
        ]
        assert sorted(constrained) == ["r1", "r2", "r3"]
        report = (out / "appendix-report.txt").read_text()
        assert "girth 5" in report and "three-edge-colourable false" in report
        assert "expansion-split x1 r1-8 r3-6" in report
        assert "expansion-split x2 r1-6 r2-8" in report
        assert "expansion-split x3 r2-6 r3-8" in report

    def test_porcelain_carries_graph6(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["build", "appendix", "--out-dir", str(out), "--porcelain"]) == 0
        fields = capsys.readouterr().out.strip().split("\t")
        assert fields[0] == "build"
        assert read_graph6(fields[3]).vertex_count == 28


class TestCheckSnark:
    def test_petersen_is_a_snark(self, petersen_file, capsys):
        assert main(["check-snark", petersen_file]) == 0
        out = capsys.readouterr().out
        assert "snark true" in out and "girth 5" in out

    def test_k4_is_not(self, tmp_path, capsys):
        from fiveflow.wheels import build_wheel

        path = tmp_path / "k4.g6"
        path.write_text(write_graph6(build_wheel(3)) + "\n")
        assert main(["check-snark", str(path)]) == 1
        out = capsys.readouterr().out
        assert "snark false" in out and "girth 3" in out


# ===========================================================================
# results cache
# ===========================================================================


class TestCache:
    def test_decide_replay_is_byte_identical(self, petersen_file, tmp_path, capsys):
        cache = str(tmp_path / "cache")
        assert main(["decide", petersen_file, "--cache", cache, "--porcelain"]) == 1
        first = capsys.readouterr().out
        assert main(["decide", petersen_file, "--cache", cache, "--porcelain"]) == 1
        second = capsys.readouterr().out
        assert first == second

    def test_record_schema(self, petersen_file, tmp_path, capsys):
        cache = tmp_path / "cache"
        main(["decide", petersen_file, "--cache", str(cache)])
        capsys.readouterr()
        (record_path,) = cache.glob("*.json")
        record = json.loads(record_path.read_text())
        assert record["command"] == "decide"
        assert record["decision"] == "Infeasible"
        assert record["input_hash"] == record_path.stem
        assert record["nodes"] > 0
        assert record["certificate_ref"] is None

    def test_decision_files_are_immutable(self, petersen_file, tmp_path, capsys):
        cache = tmp_path / "cache"
        main(["decide", petersen_file, "--cache", str(cache)])
        (record_path,) = cache.glob("*.json")
        before = record_path.read_text()
        main(["decide", petersen_file, "--cache", str(cache)])
        capsys.readouterr()
        assert record_path.read_text() == before

    def test_certificates_stored_side_by_side(self, petersen_file, tmp_path, capsys):
        cache = tmp_path / "cache"
        assert main(["nz5", petersen_file, "--cache", str(cache), "--certificate"]) == 0
        first = capsys.readouterr().out
        (record_path,) = cache.glob("*.json")
        record = json.loads(record_path.read_text())
        assert record["certificate_ref"] == record_path.stem + ".cert"
        assert (cache / record["certificate_ref"]).exists()
        assert main(["nz5", petersen_file, "--cache", str(cache), "--certificate"]) == 0
        assert capsys.readouterr().out == first

    def test_commands_do_not_share_entries(self, petersen_file, tmp_path, capsys):
        """decide and nz5 on the same file key to different records."""
        cache = tmp_path / "cache"
        main(["decide", petersen_file, "--cache", str(cache)])
        main(["nz5", petersen_file, "--cache", str(cache)])
        capsys.readouterr()
        assert len(list(cache.glob("*.json"))) == 2

    def test_scan_cache_replays_report(self, tmp_path, capsys):
        cache = str(tmp_path / "cache")
        assert main(["scan", "3", "--cache", cache]) == 0
        first = capsys.readouterr().out
        assert main(["scan", "3", "--cache", cache]) == 0
        assert capsys.readouterr().out == first


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
