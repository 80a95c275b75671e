import json
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from cubictwist.cli import EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, main, parse_coords
from cubictwist.field_core import conductor_params, field_from_conductor
from cubictwist.report import (SCHEMA_VERSION, make_report, parse_rational, parse_report,
                               rational_str, serialize_report, to_jsonable)
from cubictwist.twist_engine import test_good_basis


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def walk(obj):
    yield obj
    if isinstance(obj, dict):
        for v in obj.values():
            yield from walk(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from walk(v)


def test_family_good_basis_json(capsys):
    code, out, _ = run(capsys, "family", "shanks", "-n", "21", "--good-basis", "--json")
    assert code == EXIT_OK
    rep = parse_report(out)
    assert rep["schema_version"] == SCHEMA_VERSION and rep["command"] == "family"
    gb = rep["results"][0]["good_bases"][0]
    assert gb["ok"] is True
    assert gb["report"]["twisted_gram"]["s_u_v_w"] == ["28899", "-12141", "7011", "342"]
    assert not any(isinstance(x, float) for x in walk(rep))


def test_test_basis_power_basis(capsys):
    code, out, _ = run(capsys, "test-basis", "--field-conductor", "7", "--coords", "1,0,0;0,1,0;0,0,1", "--json")
    assert code == EXIT_OK
    r = parse_report(out)["results"][0]
    assert (r["e1"], r["e2"], r["e3"]) == ("7", "7", "-7")
    assert r["sign_ok"] is False and r["is_good"] is False


def test_test_basis_human_output_shows_gram_and_slack(capsys):
    code, out, _ = run(capsys, "test-basis", "--family", "shanks", "-n", "21",
                       "--coords", "1/3,1/3,1/3;0,1,0;0,1,1", "--link")
    assert code == EXIT_OK
    assert "28899" in out and "s/2-|u|" in out and "good = True" in out


def test_verify_family_washington_case_1(capsys):
    code, out, _ = run(capsys, "verify-family", "washington", "--n-range", "2..40", "--case", "1")
    assert code == EXIT_OK
    assert "0 mismatches" in out


def test_verify_family_reports_mismatch(capsys):
    code, out, _ = run(capsys, "verify-family", "kishi", "--n-range=-5..-3", "--case", "odd-a", "--json")
    assert code == EXIT_MISMATCH
    rep = parse_report(out)
    assert rep["status"] == "mismatch" and rep["results"][0]["mismatches"] == "2"


def test_ideal_and_ortho_and_field(capsys):
    assert run(capsys, "ideal", "--field-conductor", "63")[0] == EXIT_OK
    assert run(capsys, "ideal", "--field-conductor", "91", "--I", "1", "--J", "2")[0] == EXIT_OK
    code, out, _ = run(capsys, "ortho", "--family", "shanks", "-n", "1", "--json")
    assert code == EXIT_OK
    cert = parse_report(out)["results"][0]["certificate"]
    assert cert["frame_gram"]["matrix"] == [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]
    code, out, _ = run(capsys, "field", "--field-conductor", "63", "--field-index", "1", "--json")
    assert code == EXIT_OK
    assert parse_report(out)["results"][0]["conductor"] == {"m": "63", "a": "-12", "b": "6"}


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["field"],
    ["field", "--field-conductor", "8"],
    ["field", "--field-conductor", "63", "--field-index", "5"],
    ["test-basis", "--field-conductor", "7", "--coords", "1,0;0,1"],
    ["test-basis", "--field-conductor", "7", "--coords", "1,0,0;0,1,0;1,0,0"],
    ["test-basis", "--field-conductor", "7", "--coords", "1/0,0,0;0,1,0;0,0,1"],
    ["test-basis", "--field-conductor", "7"],
    ["search", "--family", "shanks"],
    ["search", "--family", "shanks", "-n", "-1", "--seed", "-1"],
    ["search", "--family", "shanks", "-n", "-1", "--seed", str(2 ** 64)],
    ["search", "--family", "shanks", "-n", "-1", "--iterations", "0"],
    ["search", "--family", "shanks", "-n", "-1", "--field-conductor", "7"],
    ["search", "--seed", "abc", "--field-conductor", "7"],
    ["verify-family", "kishi", "--n-range", "3"],
    ["verify-family", "kishi", "--case", "nonmonogenic"],
    ["verify-family"],
    ["family", "shanks", "-n", "-4"],
    ["ideal", "--field-conductor", "91", "--I", "1", "--J", "1"],
    ["ideal", "--field-conductor", "7", "--I", "x"],
    ["search", "--config", "/nonexistent.toml", "--field-conductor", "7"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE
    assert "Traceback" not in err and err.strip()


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.text(alphabet="0123456789,;/-. ax", max_size=30))
def test_malformed_coords_never_crash(capsys, text):
    code, _, err = run(capsys, "test-basis", "--field-conductor", "7", "--coords", text)
    assert code in (EXIT_OK, EXIT_USAGE)
    assert "Traceback" not in err


def test_parse_coords():
    assert parse_coords("1/3, 1/3, 1/3;0,1,0;0,1,1")[0] == (Fraction(1, 3),) * 3


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text('family = "shanks"\nn = -1\nseed = 3\niterations = 40\ncoeff-bound = 2\n')
    code, out, _ = run(capsys, "search", "--config", str(cfg), "--json")
    assert code == EXIT_OK
    c = parse_report(out)["config"]
    assert (c["seed"], c["iterations"], c["coeff_bound"]) == ("3", "40", "2")
    code, out, _ = run(capsys, "search", "--config", str(cfg), "--seed", "9", "--json")
    assert parse_report(out)["config"]["seed"] == "9"
    bad = tmp_path / "bad.toml"
    bad.write_text("colour = 1\n")
    assert run(capsys, "search", "--config", str(bad), "--field-conductor", "7")[0] == EXIT_USAGE
    bad.write_text('seed = "x"\n')
    assert run(capsys, "search", "--config", str(bad), "--field-conductor", "7")[0] == EXIT_USAGE
    bad.write_text("seed = [\n")
    assert run(capsys, "search", "--config", str(bad), "--field-conductor", "7")[0] == EXIT_USAGE


def test_search_is_deterministic(capsys):
    argv = ["search", "--family", "kishi", "-n", "2", "--seed", "11", "--iterations", "150", "--json"]
    a = run(capsys, *argv)[1]
    b = run(capsys, *argv)[1]
    assert a == b and '"is_good": true' in a


# -- serialization -----------------------------------------------------------------

@given(st.fractions(max_denominator=10 ** 6))
def test_rational_strings_round_trip(q):
    s = rational_str(q)
    assert parse_rational(s) == q
    assert ("/" in s) == (q.denominator != 1)


def test_integer_canonical_form_and_zero():
    assert rational_str(Fraction(28899, 1)) == "28899"
    assert rational_str(0) == "0"
    assert rational_str(Fraction(-7, 9)) == "-7/9"
    with pytest.raises(ValueError):
        parse_rational("0.5")


def test_twist_report_round_trip():
    F = field_from_conductor(conductor_params(7))
    rep = test_good_basis(F, F.one, F.rho, F.rho ** 2)
    data = serialize_report(make_report("test-basis", {"seed": 0}, [rep]))
    back = parse_report(data)
    assert serialize_report(back) == data
    r = back["results"][0]
    assert [parse_rational(x) for x in r["alpha0"]] == list(rep.alpha0.coords)
    assert parse_rational(r["e1"]) == rep.e1
    assert json.loads(data) == back


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        to_jsonable({"x": 0.5})


def test_schema_version_checked():
    with pytest.raises(ValueError):
        parse_report(b'{"schema_version": "0"}')
