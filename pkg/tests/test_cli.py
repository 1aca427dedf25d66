"""Tests for the command-line interface.

Each subcommand is exercised in-process through ``main(argv)`` so that exit
codes and the exact stdout/stderr text are observable; one subprocess smoke
test checks the ``python -m`` entry point end to end.

Exit-code convention under test: 0 affirmative, 1 negative domain verdict,
2 usage or input error.
"""

from __future__ import annotations

import contextlib
import io
import json
import subprocess
import sys

import pytest

from madawipol.cli import ENV_CONFIG, main
from madawipol.forms import config_to_json, default_config


def run(argv):
    """Run the CLI in-process; return (exit_code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def broken_config_path(tmp_path_factory):
    """A config file where Bool and Colour share one form (mutual fit)."""
    doc = config_to_json(default_config())
    doc["typeConsMapping"]["Bool"] = doc["typeConsMapping"]["Colour"]
    path = tmp_path_factory.mktemp("cfg") / "broken.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


# -- fit ---------------------------------------------------------------------


def test_fit_affirmative_exit_zero():
    code, out, err = run(["fit", "--male", "List a", "--female", "List (List a)"])
    assert code == 0
    assert out == "fits\n"
    assert err == ""


def test_fit_negative_exit_one():
    code, out, err = run(["fit", "--male", "Bool", "--female", "Colour"])
    assert code == 1
    assert out == "does-not-fit\n"


def test_fit_json_payload():
    code, out, _ = run(["fit", "--male", "Bool", "--female", "Colour", "--json"])
    assert code == 1
    assert json.loads(out) == {"male": "Bool", "female": "Colour", "fits": False}


def test_fit_json_normalizes_variable_names():
    code, out, _ = run(["fit", "--male", "List q", "--female", "List Bool",
                        "--json"])
    assert code == 0
    assert json.loads(out) == {"male": "List a", "female": "List Bool",
                               "fits": True}


def test_fit_unknown_constructor_is_usage_error():
    code, out, err = run(["fit", "--male", "Wrong", "--female", "Bool"])
    assert code == 2
    assert out == ""
    assert err.startswith("error: ")


# -- unify -------------------------------------------------------------------


def test_unify_failure_exit_one():
    code, out, _ = run(["unify", "List (List Bool)", "List (List Colour)"])
    assert code == 1
    assert out == "NOT-UNIFIABLE\n"


def test_unify_success_prints_sorted_bindings():
    code, out, _ = run(["unify", "List a", "List (List b)"])
    assert code == 0
    assert out == "a#l := List b#r\n"


def test_unify_ground_success_has_no_bindings():
    code, out, _ = run(["unify", "Bool", "Bool"])
    assert code == 0
    assert out == "unifiable (no bindings)\n"


def test_unify_json_success():
    code, out, _ = run(["unify", "List a", "List (List b)", "--json"])
    assert code == 0
    assert json.loads(out) == {
        "left": "List a",
        "right": "List (List b)",
        "unifiable": True,
        "unifier": {"a#l": "List b#r"},
    }


def test_unify_json_failure_has_null_unifier():
    code, out, _ = run(["unify", "List a", "Pair b", "--json"])
    assert code == 1
    assert json.loads(out) == {
        "left": "List a",
        "right": "Pair b",
        "unifiable": False,
        "unifier": None,
    }


def test_unify_bad_type_is_usage_error():
    code, _, err = run(["unify", "List (", "Bool"])
    assert code == 2
    assert err.startswith("error: bad type")


# -- translate ---------------------------------------------------------------


def test_translate_untranslatable_exit_one():
    code, out, _ = run(["translate", "--ads", "Cons True (Cons Red Nil)"])
    assert code == 1
    assert out == ("UNJOINABLE: Cons Red Nil into Cons argument 1: "
                   "male List Colour vs female List Bool\n")


def test_translate_success_human_output():
    code, out, _ = run(["translate", "--ads", "FlexiCons Red"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "term:      FlexiCons Red"
    assert lines[1] == "instances: 2"
    assert lines[2] == "joins:     1"
    assert "  1.arg0: Colour" in lines
    assert "  2.male: Colour" in lines


def test_translate_success_json_payload():
    code, out, _ = run(["translate", "--ads", "Cons True Nil", "--json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["translated"] is True
    assert doc["terms"] == ["Cons True Nil"]
    assert len(doc["instances"]) == 3
    assert doc["jointTypes"] == {
        "1.arg0": "Bool",
        "1.arg1": "List Bool",
        "1.male": "List Bool",
        "2.male": "Bool",
        "3.male": "List Bool",
    }


def test_translate_arity_mismatch_is_usage_error():
    code, _, err = run(["translate", "--ads", "Cons True"])
    assert code == 2
    assert "2 arguments" in err


def test_translate_bad_term_is_usage_error():
    code, _, err = run(["translate", "--ads", "Cons (True"])
    assert code == 2
    assert err.startswith("error: bad term")


# -- typeform ----------------------------------------------------------------


def test_typeform_ground_json():
    code, out, _ = run(["typeform", "Bool", "--json"])
    assert code == 0
    assert json.loads(out) == {
        "type": "Bool",
        "rigidArea": "87/500",
        "rigidRings": 2,
        "poly": None,
    }


def test_typeform_polymorphic_json():
    code, out, _ = run(["typeform", "List a", "--json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["type"] == "List a"
    assert doc["rigidArea"] == "87/500"
    assert doc["poly"] == {
        "surfaceArea": "3969/10000",
        "transform": ["7/10", "0", "0", "7/10"],
    }


def test_typeform_human_output_mentions_poly():
    code, out, _ = run(["typeform", "List a"])
    assert code == 0
    assert "rigid area: 87/500 (2 rings)" in out
    assert "surface area 3969/10000" in out


def test_typeform_unknown_constructor_is_usage_error():
    code, _, err = run(["typeform", "Wrong"])
    assert code == 2
    assert err.startswith("error: ")


def test_typeform_bad_syntax_is_usage_error():
    code, _, err = run(["typeform", "List ("])
    assert code == 2
    assert err.startswith("error: bad type")


# -- render ------------------------------------------------------------------


def test_render_type_svg_to_stdout():
    code, out, _ = run(["render", "--type", "Bool"])
    assert code == 0
    assert out.startswith('<?xml version="1.0" encoding="UTF-8"?>')
    assert "<svg" in out and "polyline" in out


def test_render_type_obj_female():
    code, out, _ = run(["render", "--type", "Bool", "--gender", "female",
                        "--format", "obj"])
    assert code == 0
    assert out.startswith("# madawipol mesh\n")
    assert "g female_rigid_0" in out


def test_render_out_writes_file(tmp_path):
    target = tmp_path / "bool.svg"
    code, out, _ = run(["render", "--type", "Bool", "--out", str(target)])
    assert code == 0
    assert out == ""
    _, direct, _ = run(["render", "--type", "Bool"])
    assert target.read_text(encoding="utf-8") == direct


def test_render_assembly_svg():
    code, out, _ = run(["render", "--ads", "Cons True Nil"])
    assert code == 0
    assert out.startswith('<?xml version="1.0" encoding="UTF-8"?>')


def test_render_assembly_obj_rejected():
    code, _, err = run(["render", "--ads", "Cons True Nil", "--format", "obj"])
    assert code == 2
    assert "obj export works on joint forms" in err


def test_render_needs_exactly_one_subject():
    for argv in (["render"], ["render", "--type", "Bool", "--ads", "Nil"]):
        code, _, err = run(argv)
        assert code == 2
        assert "exactly one of --type or --ads" in err


def test_render_untranslatable_assembly_exit_one():
    code, out, err = run(["render", "--ads", "Cons True (Cons Red Nil)"])
    assert code == 1
    assert out == ""
    assert err == "UNJOINABLE: Cons Red Nil into Cons argument 1\n"


# -- check-config and config loading ------------------------------------------


def test_check_config_default_ok():
    code, out, _ = run(["check-config"])
    assert code == 0
    assert out == "config ok\n"


def test_check_config_json_valid():
    code, out, _ = run(["check-config", "--json"])
    assert code == 0
    assert json.loads(out) == {"valid": True, "violations": []}


def test_check_config_standard_file():
    code, out, _ = run(["check-config", "--config",
                        "configs/standard_config.json"])
    assert code == 0
    assert out == "config ok\n"


def test_check_config_reports_mutual_fit(broken_config_path):
    code, out, _ = run(["check-config", "--config", broken_config_path])
    assert code == 1
    assert out.splitlines()[0].startswith("mutual-fit: Bool->Colour:")


def test_check_config_json_violations(broken_config_path):
    code, out, _ = run(["check-config", "--config", broken_config_path,
                        "--json"])
    assert code == 1
    doc = json.loads(out)
    assert doc["valid"] is False
    assert sorted(v["subject"] for v in doc["violations"]) == [
        "Bool->Colour", "Colour->Bool"]
    assert {v["kind"] for v in doc["violations"]} == {"mutual-fit"}


def test_corrupt_config_file_is_usage_error(tmp_path):
    path = tmp_path / "corrupt.json"
    path.write_text("{nope", encoding="utf-8")
    code, _, err = run(["check-config", "--config", str(path)])
    assert code == 2
    assert err.startswith(f"error: cannot load config {path}")


def test_missing_config_file_is_usage_error():
    code, _, err = run(["check-config", "--config", "/does/not/exist.json"])
    assert code == 2
    assert err.startswith("error: cannot load config")


def test_env_var_selects_config(monkeypatch, broken_config_path):
    monkeypatch.setenv(ENV_CONFIG, broken_config_path)
    code, out, _ = run(["check-config"])
    assert code == 1
    assert out.splitlines()[0].startswith("mutual-fit:")


def test_config_flag_beats_env_var(monkeypatch, broken_config_path):
    monkeypatch.setenv(ENV_CONFIG, broken_config_path)
    code, out, _ = run(["check-config", "--config",
                        "configs/standard_config.json"])
    assert code == 0
    assert out == "config ok\n"


def test_other_commands_use_env_config(monkeypatch, broken_config_path):
    # a broken config still loads; fit just uses its forms
    monkeypatch.setenv(ENV_CONFIG, broken_config_path)
    code, out, _ = run(["fit", "--male", "Bool", "--female", "Colour"])
    assert code == 0  # Bool and Colour share a form in the broken config
    assert out == "fits\n"


# -- subprocess smoke ----------------------------------------------------------


def test_module_entry_point_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "madawipol.cli",
         "unify", "List (List Bool)", "List (List Colour)"],
        capture_output=True, text=True, timeout=120)
    assert proc.returncode == 1
    assert proc.stdout == "NOT-UNIFIABLE\n"
