import io
import json
from fractions import Fraction

import pytest

from mtlab.cli import run_command
from mtlab.theta import ThetaElement, build_theta


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_theta_json(ctx11):
    code, text, _ = run("theta", "--curve", "11a1", "--S", "5")
    assert code == 0
    payload = json.loads(text)
    assert payload["schema"] == "mtlab.theta/1"
    restored = ThetaElement.from_payload(payload, ctx11.profile)
    assert restored.element == build_theta(ctx11.eig, 5).element


def test_theta_output_is_deterministic():
    first = run("theta", "--curve", "37a1", "--S", "13")
    second = run("theta", "--curve", "37a1", "--S", "13")
    assert first == second


def test_theta_csv_and_p_part():
    code, text, _ = run("theta", "--curve", "11a1", "--S", "7", "--format", "csv")
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "element,coefficient"
    assert len(lines) == 1 + 6
    code, text, _ = run("theta", "--curve", "11a1", "--S", "7", "--p", "3")
    payload = json.loads(text)
    assert payload["schema"] == "mtlab.theta_p/1"
    assert payload["orders"] == [3]


@pytest.mark.parametrize(
    "argv",
    [
        ("theta", "--curve", "11a1", "--S", "5", "--bogus"),
        ("theta", "--curve", "11a1"),
        ("unknown",),
    ],
)
def test_usage_errors_exit_with_two(argv):
    assert run(*argv)[0] == 2


def test_unknown_curve():
    code, text, err = run("theta", "--curve", "99z9", "--S", "5")
    assert code == 2
    assert text == ""
    assert "99z9" in err


def test_invalid_precision_is_a_usage_error():
    code, _, err = run("ord", "--curve", "37a1", "--S", "5", "--precision", "5")
    assert code == 2
    assert "precision" in err


def test_ord_37a1():
    code, text, _ = run("ord", "--curve", "37a1", "--S", "5")
    assert code == 0
    payload = json.loads(text)
    assert payload["schema"] == "mtlab.ord/1"
    assert payload["ord_found"] >= 1
    assert payload["augmentation"] == "0"
    assert payload["rank"] == 1


def test_verify_trivial_zeros_701a1():
    code, text, _ = run("verify", "--curve", "701a1", "--S", "3", "--theorem", "trivial_zeros")
    assert code == 0
    payload = json.loads(text)
    assert payload["schema"] == "mtlab.report/1"
    assert payload["verdict"] == "pass"


def test_verify_leading_coefficient_needs_p():
    code, _, err = run("verify", "--curve", "37a1", "--S", "29", "--theorem", "leading_coefficient")
    assert code == 2
    assert "--p" in err


def test_verify_csv_summary():
    code, text, _ = run("verify", "--curve", "11a1", "--S", "33", "--theorem", "trivial_zeros", "--format", "csv")
    assert code == 0
    header, row = text.splitlines()
    assert header.startswith("curve,S,theorem,verdict")
    assert row.startswith("11a1,33,trivial_zeros,pass")


def test_space_for_level():
    code, text, _ = run("space", "--N", "11", "--hecke", "2")
    assert code == 0
    payload = json.loads(text)
    assert payload["dimension"] == 3
    assert payload["cuspidal_dimension"] == 2
    assert payload["genus"] == 1
    assert payload["hecke_charpoly"] == {"2": ["1", "4", "4"]}


def test_space_for_curve():
    payload = json.loads(run("space", "--curve", "11a1")[1])
    assert payload["symbol_0"] == {"plus": "1/5", "minus": "0"}
    assert payload["epsilon"] == 1


def test_lvalue():
    code, text, _ = run("lvalue", "--curve", "11a1", "--S", "7", "--a", "2", "--chi", "7:1")
    assert code == 0
    payload = json.loads(text)
    assert abs(float(payload["L_over_omega_plus"]) - 0.2) < 1e-12
    assert abs(float(payload["symbol"]["numeric_plus"]) - float(Fraction(payload["symbol"]["exact_plus"]))) < 1e-12
    assert payload["twist"]["conductor"] == 7


def test_lvalue_needs_both_s_and_a():
    assert run("lvalue", "--curve", "11a1", "--S", "7")[0] == 2


def test_derive():
    code, text, _ = run("derive", "--curve", "37a1", "--S", "7", "--D", "7:1")
    assert code == 0
    payload = json.loads(text)
    assert payload["derivative"] == "D_7^(1)"
    assert payload["n"] == 6
    assert len(payload["coefficients"]) == 6


def test_derive_with_congruence_check():
    code, text, _ = run("derive", "--curve", "37a1", "--S", "13", "--D", "13:1", "--p", "3", "--t", "2")
    assert code == 0
    check = json.loads(text)["congruence_check"]
    assert check["depth"] == 2
    assert check["consistent"]


def test_derive_bad_term():
    assert run("derive", "--curve", "37a1", "--S", "7", "--D", "7-1")[0] == 2


def test_small_scan():
    code, text, _ = run("scan", "--curve", "37a1", "--bound", "7", "--max-factors", "1")
    assert code == 0
    rows = json.loads(text)
    assert [row["S"] for row in rows] == [2, 3, 5, 7]
    assert all(row["verdict"] in ("pass", "not_applicable") for row in rows)


def test_scan_text_summary():
    code, text, _ = run("scan", "--curve", "11a1", "--bound", "13", "--max-factors", "1", "--theorem", "trivial_zeros", "--format", "text")
    assert code == 0
    assert text.splitlines()[-1].startswith("pass: ")
