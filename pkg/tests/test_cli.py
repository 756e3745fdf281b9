from __future__ import annotations

import json
import subprocess
import sys

import pytest

from nogo import ENGINE_VERSION
from nogo.cli import COMMANDS, main

SCHEMA = {"subcommand", "inputs", "result", "residual", "residual_is_zero", "trace_path", "engine_version"}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, "--format", "json", *argv)
    return code, json.loads(out)


def test_every_subcommand_is_registered():
    assert set(COMMANDS) == {
        "poisson", "order", "quantize", "commutator", "axioms", "gvh-witness", "prescription",
        "canonicalize", "generalize", "commute", "wellposed", "gr-witness", "symmetric-check",
        "lorentz-check", "flat-conservation", "corpus", "oracle",
    }


def test_poisson(capsys):
    code, report = run_json(capsys, "poisson", "{q^3, p^3}")
    assert code == 0
    assert set(report) == SCHEMA
    assert report["result"] == "9*q^2*p^2"
    assert report["engine_version"] == ENGINE_VERSION
    assert run(capsys, "poisson", "{q^3, p^3}", "--expect", "9*q^2*p^2")[0] == 0
    assert run(capsys, "poisson", "{q^3, p^3}", "--expect", "q^2*p^2")[0] == 1


@pytest.mark.parametrize(
    "argv, code",
    [
        (["order", "q*p", "--scheme", "normal"], 0),
        (["quantize", "q*p"], 0),
        (["quantize", "q^3"], 1),
        (["commutator", "qh", "ph"], 0),
        (["axioms"], 0),
        (["axioms", "--scheme", "weyl"], 0),
        (["axioms", "--scheme", "normal"], 0),
        (["axioms", "--scheme", "normal", "--expect", "pass"], 1),
        (["gvh-witness"], 0),
        (["gvh-witness", "--ordering", "normal"], 0),
        (["prescription", "q^2*p", "q^3 + 1", "--scheme", "mid"], 0),
        (["prescription", "q*p^2", "q^2", "--scheme", "right"], 0),
        (["canonicalize", "F_{b a}", "--decl", "antisym F {1 2}"], 0),
        (["generalize", "eta_{a b} u^b"], 0),
        (["commute", "D[g,a] D[g,b] bar(T)^c"], 0),
        (["wellposed", "D[eta,a] f", "D[eta,a] f", "--expect", "zero"], 0),
        (["wellposed", "D[eta,a]D[eta,b]T^c", "D[eta,b]D[eta,a]T^c", "--expect", "zero"], 1),
        (["gr-witness"], 0),
        (["symmetric-check"], 0),
        (["lorentz-check"], 0),
        (["lorentz-check", "--flat"], 0),
        (["flat-conservation", "--relabel"], 0),
        (["flat-conservation", "--control"], 0),
        (["corpus", "run", "--deterministic"], 0),
        (["corpus", "list"], 0),
        (["oracle", "--metric", "bump2"], 0),
    ],
)
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


@pytest.mark.parametrize(
    "argv",
    [
        ["poisson", "{q, p"],
        ["canonicalize", "F_{a a}"],
        ["canonicalize", "X^a Y_a Z^a"],
        ["order", "q", "--scheme", "sideways"],
        ["oracle", "--metric", "nowhere"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_and_parse_errors_exit_2(capsys, argv):
    try:
        code = main(argv)
    except SystemExit as exc:  # argparse rejects unknown subcommands itself
        code = exc.code
    assert code == 2


def test_parse_error_reports_position(capsys):
    code, _, err = run(capsys, "canonicalize", "X^a Y_a Z^a")
    assert code == 2 and "line 1, column 9" in err


def test_wellposed_reports_curvature(capsys):
    code, report = run_json(capsys, "wellposed", "D[eta,a]D[eta,b]T^c", "D[eta,b]D[eta,a]T^c")
    assert code == 0
    assert report["result"]["flat_equal"] is True
    assert report["residual"] == "R[g]^c_{a b d} bar(T)^d"
    assert report["residual_is_zero"] is False


def test_gvh_report(capsys):
    code, report = run_json(capsys, "gvh-witness")
    assert code == 0
    assert report["result"]["classical_residual"] == "0"
    assert report["result"]["constant"] == "-1/3"


def test_json_is_deterministic(capsys):
    outs = {run(capsys, "--format", "json", "corpus", "--deterministic")[1] for _ in range(2)}
    assert len(outs) == 1
    outs = {run(capsys, "--format", "json", "lorentz-check")[1] for _ in range(2)}
    assert len(outs) == 1


def test_trace_and_replay(capsys, tmp_path):
    cert = tmp_path / "witness.cert"
    code, report = run_json(capsys, "gr-witness", "--trace", str(cert))
    assert code == 0 and report["trace_path"] == str(cert)
    code, replayed = run_json(capsys, "--replay", str(cert))
    assert code == 0
    assert replayed["result"]["final"] == report["residual"]
    assert replayed["result"]["mismatches"] == []
    cert.write_text(cert.read_text().replace("out R[g]^c_{a b d} bar(T)^d", "out 0"))
    assert run(capsys, "--replay", str(cert))[0] == 1


def test_trace_for_scalar_commands(capsys, tmp_path):
    cert = tmp_path / "p.cert"
    run(capsys, "order", "q^2*p", "--trace", str(cert))
    code, replayed = run_json(capsys, "--replay", str(cert))
    assert code == 0 and replayed["result"]["steps"] == 1


def test_latex_output(capsys):
    _, out, _ = run(capsys, "--format", "latex", "gr-witness")
    assert out.strip() == r"R^{(g)}{}^{c}{}_{abd} \overline{T}^{d}"
    _, out, _ = run(capsys, "--format", "latex", "quantize", "q*p")
    assert r"\hat{q}" in out and r"\tfrac{1}{2}" in out


def test_corpus_path(capsys, tmp_path):
    (tmp_path / "one.corpus").write_text("[bad]\nop: nonzero\ninput: X^a - X^a\n")
    code, report = run_json(capsys, "corpus", "run", str(tmp_path), "--deterministic")
    assert code == 1 and report["result"]["failed"] == 1
    code, _ = run_json(capsys, "corpus", str(tmp_path / "one.corpus"))
    assert code == 1


def test_oracle_eval(capsys):
    code, report = run_json(capsys, "oracle", "--metric", "minkowski4", "--eval", "R[g]^c_{a b d} bar(T)^d")
    assert code == 0 and report["result"]["minkowski4"]["zero"] is True


def test_console_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "nogo.cli", "poisson", "{q^3, p^3}"], capture_output=True, text=True
    )
    assert out.returncode == 0 and "9*q^2*p^2" in out.stdout
