"""JSON reports and the command-line front end (exit codes, round trips)."""

from __future__ import annotations

import json
from fractions import Fraction

import pytest

from tinopt.cli import main
from tinopt.cycles import Cycle, CyclicPartition
from tinopt.fixtures import fixture_json
from tinopt.model import load_network
from tinopt.report import (
    dumps_canonical,
    frac,
    partition_repr,
    point_repr,
)

# ---------------------------------------------------------------------------
# report helpers
# ---------------------------------------------------------------------------


def test_frac_and_point_repr_never_emit_floats():
    assert frac(Fraction(5, 2)) == "5/2"
    assert frac(4) == 4
    assert frac(0.5) == "1/2"
    assert point_repr((Fraction(1, 3), 2)) == ["1/3", 2]


def test_partition_repr_uses_zero_sentinel():
    part = CyclicPartition((Cycle((1, 3)), Cycle((2,))))
    rep = partition_repr(part)
    assert rep == {"cycles": [[1, 3], [2]], "predecessors": [3, 0, 1]}


def test_dumps_canonical_is_a_fixed_point():
    doc = {"a": [1, "5/2", {"b": True}], "c": None}
    text = dumps_canonical(doc)
    assert text.endswith("\n")
    assert dumps_canonical(json.loads(text)) == text


# ---------------------------------------------------------------------------
# CLI plumbing
# ---------------------------------------------------------------------------


@pytest.fixture()
def nets(tmp_path):
    """Bundled fixtures materialized as files, plus two hand-rolled ones."""
    paths = {}
    for name in ("example1", "example2", "gap_eps_1_10"):
        p = tmp_path / (name + ".json")
        p.write_text(fixture_json(name))
        paths[name] = str(p)

    sym = {
        "mode": "deterministic", "users": 3, "subchannels": 1,
        "matrices": [[[3, 1, 1], [1, 3, 1], [1, 1, 3]]],
    }
    p = tmp_path / "symmetric3.json"
    p.write_text(json.dumps(sym))
    paths["symmetric3"] = str(p)

    huge = {
        "mode": "deterministic", "users": 10, "subchannels": 1,
        "matrices": [[[0] * 10 for _ in range(10)]],
    }
    p = tmp_path / "huge.json"
    p.write_text(json.dumps(huge))
    paths["huge"] = str(p)

    non_tin = {
        "mode": "deterministic", "users": 2, "subchannels": 1,
        "matrices": [[[1, 5], [5, 1]]],
    }
    p = tmp_path / "non_tin.json"
    p.write_text(json.dumps(non_tin))
    paths["non_tin"] = str(p)
    return paths


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def assert_canonical(out):
    assert out == dumps_canonical(json.loads(out))
    return json.loads(out)


# ---------------------------------------------------------------------------
# verdict-driven exit codes
# ---------------------------------------------------------------------------


def test_check_tin_exit_codes_and_text(nets, capsys):
    code, out, _ = run_cli(capsys, "check-tin", nets["example1"])
    assert code == 0
    assert "overall: TIN optimal" in out

    code, out, _ = run_cli(capsys, "check-tin", nets["non_tin"])
    assert code == 1
    assert "NOT TIN optimal" in out and "desired 1 < max incoming 5" in out


def test_check_tin_json_roundtrip(nets, capsys):
    code, out, _ = run_cli(capsys, "check-tin", "--json", nets["example1"])
    assert code == 0
    doc = assert_canonical(out)
    assert doc["command"] == "check-tin" and doc["all_satisfied"] is True
    assert len(doc["subchannels"]) == 3


def test_sum_reports_three_methods(nets, capsys):
    code, out, _ = run_cli(capsys, "sum", nets["example1"])
    assert code == 0
    assert "total over 3 sub-channel(s): 18  [exact]" in out
    assert out.count("lp_cycle_bounds=6  assignment=6  brute_force=6") == 3

    code, out, _ = run_cli(capsys, "sum", "--json", nets["example1"])
    doc = assert_canonical(out)
    assert doc["quantity"] == "sum-capacity"
    assert doc["total"] == 18
    assert [c["value"] for c in doc["per_subchannel"]] == [6, 6, 6]


def test_sum_labels_non_tin_as_bound_only(nets, capsys):
    code, out, _ = run_cli(capsys, "sum", nets["non_tin"])
    assert code == 0  # sum always reports; the label carries the caveat
    assert "bound-only: TIN condition fails" in out


def test_region_lists_all_cycle_bounds(nets, capsys):
    code, out, _ = run_cli(capsys, "region", "--json", nets["symmetric3"])
    assert code == 0
    doc = assert_canonical(out)
    assert len(doc["subchannels"][0]) == 8


def test_member_exit_codes(nets, capsys):
    code, out, _ = run_cli(capsys, "member", nets["gap_eps_1_10"],
                           "--point", "2,1/2,1/2")
    assert code == 0 and "inside the combined-bound region" in out

    code, out, _ = run_cli(capsys, "member", nets["gap_eps_1_10"],
                           "--point", "3,3,3")
    assert code == 1 and "OUTSIDE" in out

    # values starting with "-" need the = form, as usual with argparse
    code, out, _ = run_cli(capsys, "member", "--json", nets["gap_eps_1_10"],
                           "--point=-1,0,0")
    assert code == 1
    doc = assert_canonical(out)
    assert doc["membership"]["negative_users"] == [1]


def test_combined_bounds_output(nets, capsys):
    code, out, _ = run_cli(capsys, "combined-bounds", nets["gap_eps_1_10"])
    assert code == 0
    assert "d1 <= 2" in out and "d1 + d2 <= 13/5" in out
    assert "d1 + d2 + d3 <= 3" in out

    code, out, _ = run_cli(capsys, "combined-bounds", "--json",
                           nets["example1"])
    doc = assert_canonical(out)
    rhs = {tuple(b["users"]): b["rhs"] for b in doc["bounds"]}
    assert rhs[(1, 2, 3)] == 18 and rhs[(1, 3)] == 14


def test_decompose_exit_codes(nets, capsys):
    code, out, _ = run_cli(capsys, "decompose", nets["gap_eps_1_10"],
                           "--point", "2,1/2,1/2")
    assert code == 1
    assert "NOT decomposable" in out and "user 2 cannot exceed 1/5" in out

    code, out, _ = run_cli(capsys, "decompose", "--json",
                           nets["gap_eps_1_10"], "--point", "1,1,1")
    assert code == 0
    doc = assert_canonical(out)
    assert doc["decomposition"]["feasible"] is True
    assert len(doc["decomposition"]["allocation"]) == 2


def test_invertibility_deterministic(nets, capsys):
    code, out, _ = run_cli(capsys, "invertibility", nets["example1"])
    assert code == 0 and out.count("invertible") >= 3

    code, out, _ = run_cli(capsys, "invertibility", "--json",
                           nets["example2"])
    assert code == 1
    doc = assert_canonical(out)
    assert doc["invertible"] is False
    assert doc["subchannels"][2]["invertible"] is False
    kernels = [c.get("kernel") for c in doc["subchannels"][2]["certificates"]]
    assert all(kernels)


def test_invertibility_partition_probe(nets, capsys):
    code, out, _ = run_cli(capsys, "invertibility", nets["symmetric3"],
                           "--partition", "1:3,2:1,3:2")
    assert code == 1 and "kernel witness" in out

    code, out, _ = run_cli(capsys, "invertibility", nets["symmetric3"],
                           "--partition", "1:0,2:0,3:0")
    assert code == 0  # no participating bits at all


def test_invertibility_gdof_paths(nets, capsys):
    code, out, _ = run_cli(capsys, "invertibility", nets["gap_eps_1_10"])
    assert code == 0 and "sufficient-condition" in out

    code, out, _ = run_cli(capsys, "invertibility", "--json",
                           nets["gap_eps_1_10"], "--logP", "20")
    assert code == 0
    doc = assert_canonical(out)
    assert doc["quantized"]["log2P"] == 20
    assert doc["quantized"]["invertible"] is True


def test_invertibility_flag_misuse_is_an_input_error(nets, capsys):
    code, _, err = run_cli(capsys, "invertibility", nets["example1"],
                           "--logP", "20")
    assert code == 2 and "gdof" in err

    code, _, err = run_cli(capsys, "invertibility", nets["gap_eps_1_10"],
                           "--partition", "1:0,2:0,3:0")
    assert code == 2 and "--logP" in err


def test_separability_exit_codes(nets, capsys):
    code, out, _ = run_cli(capsys, "separability", nets["example1"])
    assert code == 0 and "separable (certified)" in out

    code, out, _ = run_cli(capsys, "separability", nets["example2"])
    assert code == 1 and "not certified" in out

    code, out, _ = run_cli(capsys, "separability", "--json",
                           nets["gap_eps_1_10"], "--logP", "20")
    assert code == 0
    doc = assert_canonical(out)
    assert doc["certified"] is True and doc["total"] == 3
    assert doc["quantized"]["certified"] is True


def test_gap_subcommand(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "gap", "--epsilon", "1/8")
    assert code == 0
    doc = assert_canonical(out)
    assert doc["matrices"][1][0] == [1, "1/2", "3/8"]

    target = tmp_path / "gap.json"
    code, out, _ = run_cli(capsys, "gap", "--out", str(target))
    assert code == 0 and "wrote gap network" in out
    net = load_network(target)
    assert net.subchannels == 2

    code, _, err = run_cli(capsys, "gap", "--epsilon", "1/3")
    assert code == 2 and "epsilon" in err


def test_demo_runs_and_asserts(capsys):
    code, out, _ = run_cli(capsys, "demo")
    assert code == 0
    assert "demo 4" in out and "25 at (-5, 15, 15)" in out

    code, out, _ = run_cli(capsys, "demo", "--json")
    assert code == 0
    doc = assert_canonical(out)
    assert doc["results"]["example1"] == {"total": 18, "certified": True}
    assert doc["results"]["gap"]["decomposable"] is False


# ---------------------------------------------------------------------------
# error exit codes
# ---------------------------------------------------------------------------


def test_missing_and_malformed_files_exit_2(tmp_path, capsys):
    code, _, err = run_cli(capsys, "sum", str(tmp_path / "missing.json"))
    assert code == 2 and "error:" in err

    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    code, _, err = run_cli(capsys, "sum", str(bad))
    assert code == 2 and "invalid JSON" in err


def test_bad_point_and_partition_exit_2(nets, capsys):
    code, _, err = run_cli(capsys, "member", nets["gap_eps_1_10"],
                           "--point", "1,zebra,3")
    assert code == 2 and "zebra" in err

    code, _, err = run_cli(capsys, "invertibility", nets["symmetric3"],
                           "--partition", "1:2")
    assert code == 2

    code, _, err = run_cli(capsys, "invertibility", nets["symmetric3"],
                           "--partition", "1:2,1:3,3:0")
    assert code == 2 and "twice" in err


def test_enumeration_guard_exits_3(nets, capsys):
    code, _, err = run_cli(capsys, "sum", nets["huge"])
    assert code == 3
    assert "exhaustive enumeration limit exceeded" in err


def test_unknown_subcommand_is_argparse_error(capsys):
    with pytest.raises(SystemExit):
        main(["frobnicate"])
