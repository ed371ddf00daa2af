import json
import subprocess
import sys

import pytest

from pdrer.aiger import write_aag
from pdrer.cli import EXIT_CERT_FAIL, EXIT_SAFE, EXIT_UNSAFE, EXIT_UNKNOWN, EXIT_USAGE, main
from pdrer.generators import gen_toggler


@pytest.fixture
def toggler(tmp_path):
    p = tmp_path / "toggler.aag"
    p.write_text(write_aag(gen_toggler(True)))
    return p


def first_line(capsys):
    return capsys.readouterr().out.splitlines()[0]


def test_check_toggler(toggler, capsys, tmp_path):
    cex = tmp_path / "cex.txt"
    assert main(["check", str(toggler), "--dump-cex", str(cex)]) == EXIT_UNSAFE
    assert first_line(capsys) == "UNSAFE"
    assert cex.read_text() == "state 0 inputs -\nstate 1 inputs -\n"
    assert main(["certify", "--model", str(toggler), "--cex", str(cex)]) == 0


def test_pipeline_bufferalloc(tmp_path, capsys):
    model = tmp_path / "ba4.aag"
    inv = tmp_path / "inv.txt"
    stats = tmp_path / "stats.json"
    assert main(["gen", "bufferalloc", "--k", "4", "-o", str(model)]) == 0
    rc = main(["check", str(model), "--engine", "pdr-er", "--delta", "50", "--dump-invariant", str(inv),
               "--stats-json", str(stats)])
    assert rc == EXIT_SAFE and first_line(capsys) == "SAFE"
    assert main(["certify", "--model", str(model), "--invariant", str(inv)]) == 0
    rec = json.loads(stats.read_text())
    assert rec["schema"] == 1 and rec["result"] == "SAFE" and "time" in rec
    assert rec["stats"]["invariant_clauses"] > 0


def test_binary_output(tmp_path, capsys):
    model = tmp_path / "ba2.aig"
    assert main(["gen", "bufferalloc", "--k", "2", "-o", str(model)]) == 0
    assert model.read_bytes().startswith(b"aig ")
    assert main(["check", str(model), "--engine", "pdr"]) == EXIT_SAFE


@pytest.mark.parametrize("argv", [
    ["check", "x.aag", "--engine", "pdr", "--no-genev"],
    ["check", "x.aag", "--engine", "pdr", "--delta", "5"],
    ["check", "x.aag", "--engine", "bogus"],
    ["frobnicate"],
    [],
    ["gen", "bufferalloc", "--k", "0", "-o", "x.aag"],
    ["certify", "--model", "m.aag"],
    ["check", "x.aag", "--er-template-order", "and,zzz"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE
    assert capsys.readouterr().err


def test_parse_error_is_usage(tmp_path, capsys):
    p = tmp_path / "junk.aag"
    p.write_text("not an aiger file\n")
    assert main(["check", str(p)]) == EXIT_USAGE


def test_certification_failure(tmp_path, toggler, capsys):
    inv = tmp_path / "inv.txt"
    inv.write_text("inv 0 0\n")
    assert main(["certify", "--model", str(toggler), "--invariant", str(inv)]) == EXIT_CERT_FAIL
    cex = tmp_path / "cex.txt"
    cex.write_text("state 0 inputs -\nstate 0 inputs -\n")
    assert main(["certify", "--model", str(toggler), "--cex", str(cex)]) == EXIT_CERT_FAIL


def test_timeout_unknown(tmp_path, capsys):
    model = tmp_path / "ba6.aag"
    main(["gen", "bufferalloc", "--k", "6", "-o", str(model)])
    capsys.readouterr()
    assert main(["check", str(model), "--timeout-seconds", "0"]) == EXIT_UNKNOWN
    assert first_line(capsys) == "UNKNOWN"


def test_module_entry_point(toggler):
    p = subprocess.run([sys.executable, "-m", "pdrer", "check", str(toggler)], capture_output=True, text=True)
    assert p.returncode == EXIT_UNSAFE and p.stdout.splitlines()[0] == "UNSAFE"
