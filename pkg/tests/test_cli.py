"""End-to-end checks of the command-line interface.

Most tests drive main() in process and parse the captured JSON; a couple go
through a real subprocess to pin down byte determinism of stdout.
"""

import json
import subprocess
import sys

import pytest

from dprkit import cli


def run(argv):
    # Usage errors surface as SystemExit(2) from argparse; normalize.
    try:
        return cli.main(argv)
    except SystemExit as e:
        return int(e.code)


def run_json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr()
    return code, json.loads(out.out) if out.out else None, out.err


def test_build_gx_2_1_matches_expected_terms(capsys):
    code, doc, err = run_json(capsys, ["gdpr", "build", "GX", "-n", "2", "-m", "1"])
    assert code == 0 and err == ""
    monos = [term["monomial"] for term in doc["terms"]]
    assert {"X[1]": 1} in monos and {"X[2]": 1} in monos
    assert {"X[1]": 1, "X[2]": 1, "U[1][1]": 1} in monos
    assert {"X[1]": 1, "X[2]": 1, "Y[1]": 1, "U[2][2]": 1} in monos
    assert {"X[1]": 1, "X[2]": 1, "Y[1]": 1, "U[3][2]": 1} in monos
    assert len(monos) == 5


def test_divide_by_two_first_coefficient_is_one_half(capsys):
    code, doc, _ = run_json(capsys, ["fgl", "divide", "-n", "2", "--order", "1"])
    assert code == 0
    assert doc["vars"] == ["u"] and doc["order"] == 1
    (entry,) = doc["coeffs"]
    assert entry["exp"] == [1]
    (term,) = entry["poly"]["terms"]
    assert term["coeff"] == {"num": "1", "den": "2"} and term["monomial"] == {}


def test_claim1_case_five_reports_equality(capsys):
    code, doc, _ = run_json(capsys, ["fixedpoint", "claim1", "--case", "5"])
    assert code == 0
    assert doc == {"case": 5, "lhs": 1, "rhs": 1, "equal": True}


def test_verify_step_requires_seed(capsys):
    code, doc, err = run_json(capsys, ["verify", "step", "-n", "3", "--trials", "2"])
    assert code == 2 and doc is None
    assert "--seed" in json.loads(err)["error"]


def test_verify_commands_report_pass(capsys):
    code, doc, _ = run_json(
        capsys, ["verify", "step", "-n", "3", "--seed", "9", "--trials", "4"])
    assert code == 0 and doc["pass"] is True and doc["seed"] == 9
    code, doc, _ = run_json(
        capsys, ["verify", "full", "-n", "2", "-m", "3", "--seed", "5",
                 "--trials", "4", "--range", "50"])
    assert code == 0 and doc["pass"] is True
    assert doc["identity"] == "full" and doc["sample_range"] == 50


def test_gdpr_checks_all_pass(capsys):
    for which in ("multilinear", "bounds", "weight", "mirror"):
        code, doc, _ = run_json(capsys, ["gdpr", "check", which, "-n", "3", "-m", "2"])
        assert code == 0 and doc["pass"] is True, which
    code, doc, _ = run_json(
        capsys, ["gdpr", "check", "padding", "-n", "2", "-m", "2",
                 "--big-n", "4", "--big-m", "3"])
    assert code == 0 and doc["pass"] is True and doc["big_n"] == 4


def test_padding_needs_embedding_counts(capsys):
    code, doc, err = run_json(capsys, ["gdpr", "check", "padding", "-n", "2", "-m", "2"])
    assert code == 2 and doc is None
    assert "--big-n" in json.loads(err)["error"]


def test_guard_group_specs(capsys):
    code, doc, _ = run_json(capsys, ["fixedpoint", "guard", "--group", "2x2"])
    assert code == 0
    assert doc == {"group": [2, 2], "contexts": 16, "holds": True}
    code, doc, err = run_json(capsys, ["fixedpoint", "guard", "--group", "banana"])
    assert code == 2 and "banana" in json.loads(err)["error"]


def test_allbad_equality_and_values(capsys):
    code, doc, _ = run_json(capsys, ["fixedpoint", "allbad", "-n", "2", "-m", "1"])
    assert code == 0 and doc["equal"] is True and doc["lhs"] == 1
    code, doc, _ = run_json(capsys, ["fixedpoint", "allbad", "-n", "2", "-m", "2"])
    assert code == 0 and doc["equal"] is True and doc["lhs"] == 0


def test_domain_error_exits_two(capsys):
    code, doc, err = run_json(capsys, ["gdpr", "build", "GX", "-n", "0", "-m", "1"])
    assert code == 2 and doc is None
    assert json.loads(err)["error"].startswith("ValueError")


def test_stray_m_rejected(capsys):
    code, _, err = run_json(capsys, ["gdpr", "build", "EX", "-n", "2", "-m", "1"])
    assert code == 2 and "-m" in json.loads(err)["error"]


def test_gx_requires_m(capsys):
    code, _, err = run_json(capsys, ["gdpr", "build", "GX", "-n", "2"])
    assert code == 2 and "-m" in json.loads(err)["error"]


def test_unknown_command_exits_two(capsys):
    code, _, err = run_json(capsys, ["nosuch"])
    assert code == 2 and "error" in json.loads(err)


def test_text_format_listing(capsys):
    code = run(["gdpr", "build", "EX", "-n", "2", "--format", "text"])
    assert code == 0
    assert capsys.readouterr().out == "-1  X[1]*X[2]*U[1][1]\n"
    code = run(["fgl", "relations", "--order", "4", "--format", "text"])
    assert code == 0
    out = capsys.readouterr().out
    assert "(1,1,2)" in out and "(2,1,1)" in out


def test_nfold_scales_the_linear_coefficient(capsys):
    code, doc, _ = run_json(capsys, ["fgl", "nfold", "-n", "3", "--order", "2"])
    assert code == 0
    linear = [c for c in doc["coeffs"] if c["exp"] == [1]]
    (term,) = linear[0]["poly"]["terms"]
    assert term == {"coeff": {"num": "3", "den": "1"}, "monomial": {}}


def test_denominator_profile_shape(capsys):
    code, doc, _ = run_json(
        capsys, ["fgl", "divide", "-n", "2", "--order", "4",
                 "--denominator-profile"])
    assert code == 0 and doc["n"] == 2
    profile = doc["profile"]
    assert [i for i, _ in profile] == [1, 2, 3, 4]
    assert profile[0] == [1, 1]
    ks = [k for _, k in profile]
    assert all(a <= b for a, b in zip(ks, ks[1:]))


def test_inverse_series_command(capsys):
    code, doc, _ = run_json(capsys, ["fgl", "inverse", "--order", "3"])
    assert code == 0 and doc["vars"] == ["u"]
    linear = [c for c in doc["coeffs"] if c["exp"] == [1]]
    (term,) = linear[0]["poly"]["terms"]
    assert term["coeff"] == {"num": "-1", "den": "1"}


def test_repeat_runs_are_identical_in_process(capsys):
    first = run(["verify", "full", "-n", "2", "-m", "2", "--seed", "42"])
    out1 = capsys.readouterr().out
    second = run(["verify", "full", "-n", "2", "-m", "2", "--seed", "42"])
    out2 = capsys.readouterr().out
    assert (first, out1) == (second, out2) and first == 0


def test_subprocess_output_is_byte_deterministic():
    argv = [sys.executable, "-m", "dprkit.cli", "fgl", "show",
            "--mode", "universal", "--order", "4"]
    runs = [subprocess.run(argv, capture_output=True) for _ in range(2)]
    assert runs[0].returncode == 0
    assert runs[0].stdout == runs[1].stdout and runs[0].stdout
    assert runs[0].stderr == b""


def test_mode_choices_cover_specializations(capsys):
    code, doc, _ = run_json(
        capsys, ["fgl", "show", "--mode", "additive", "--order", "5"])
    assert code == 0
    nonlinear = [c for c in doc["coeffs"] if sum(c["exp"]) > 1]
    assert nonlinear == []
    code, doc, _ = run_json(
        capsys, ["fgl", "show", "--mode", "multiplicative", "--order", "2"])
    assert code == 0
    cross = [c for c in doc["coeffs"] if c["exp"] == [1, 1]]
    (term,) = cross[0]["poly"]["terms"]
    assert term["monomial"] == {"beta": 1}
