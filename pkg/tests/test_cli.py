import json
import subprocess
import sys
from fractions import Fraction as F

from persalg.cli import main


def run_cli(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def test_certify_sphere_example(capsys, tmp_path):
    out_file = tmp_path / "cert.json"
    code, out, err = run_cli(
        ["certify", "--model", "sphere", "--N", "3", "--h", "1/100",
         "--output", str(out_file)], capsys)
    assert code == 0
    cert = json.loads(out_file.read_text())
    assert F(cert["accuracy"]) == F(1, 12) + F(1, 50)


def test_certify_deterministic(capsys, tmp_path):
    f1, f2 = tmp_path / "a.json", tmp_path / "b.json"
    for f in (f1, f2):
        code, _, _ = run_cli(
            ["certify", "--model", "single", "--output", str(f)], capsys)
        assert code == 0
    assert f1.read_bytes() == f2.read_bytes()


def test_distance_subcommand(capsys, tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    a.write_text(json.dumps({"modulus": 0, "bars": [
        {"birth": "0", "death": "2", "degree": 0}]}))
    b.write_text(json.dumps({"modulus": 0, "bars": []}))
    code, out, _ = run_cli(["distance", "--metric", "dint", str(a), str(b)], capsys)
    assert code == 0 and out.strip() == "1"
    code, out, _ = run_cli(["distance", "--metric", "Dint", str(a), str(b)], capsys)
    assert code == 0 and out.strip() == "2"
    code, out, _ = run_cli(["distance", "--metric", "drint", str(a), str(b)], capsys)
    assert code == 0 and out.strip() == "1"
    c = tmp_path / "c.json"
    c.write_text(json.dumps({"modulus": 0, "bars": [
        {"birth": "7", "death": "9", "degree": 0}]}))
    code, out, _ = run_cli(["distance", "--metric", "dint", "--shift-invariant",
                            str(a), str(c)], capsys)
    assert code == 0 and out.strip() == "0"


def test_conelength_example(capsys, tmp_path):
    cpx = tmp_path / "e2.json"
    cpx.write_text(json.dumps({
        "modulus": 0,
        "generators": [{"name": "a", "degree": 0, "level": "0"},
                       {"name": "b", "degree": 1, "level": "1"}],
        "differential": [{"from": "b", "to": "a"}],
    }))
    code, out, _ = run_cli(["conelength", "--eps", "3/10", str(cpx)], capsys)
    assert code == 0 and out.strip() == "2"


def test_barcode_round_trip(capsys, tmp_path):
    cpx = tmp_path / "c.json"
    cpx.write_text(json.dumps({
        "modulus": 2,
        "generators": [{"name": "a", "degree": 0, "level": "1/3"},
                       {"name": "b", "degree": 1, "level": "2"}],
        "differential": [{"from": "b", "to": "a"}],
    }))
    out_file = tmp_path / "bars.json"
    code, _, _ = run_cli(["barcode", str(cpx), "--output", str(out_file)], capsys)
    assert code == 0
    data = json.loads(out_file.read_text())
    assert data["bars"] == [{"birth": "1/3", "death": "2", "degree": 0}]
    from persalg.persistence import Barcode

    assert Barcode.from_json(data).to_json() == data


def test_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, out, err = run_cli(["barcode", str(bad)], capsys)
    assert code == 4


def test_coverage_gap_exit_code(capsys):
    code, out, err = run_cli(
        ["hochschild", "--model", "torus-grid", "--N", "2",
         "--precision", "6", "--n-max", "2"], capsys)
    assert code == 3
    assert "coverage gap" in err


def test_verification_failure_exit_code(capsys):
    code, out, err = run_cli(
        ["morse", "--K", "0.1", "--delta", "0.99", "--eta", "0.0000001",
         "--resolution", "200"], capsys)
    # coarse grid + extreme delta: the verifier reports honest violations
    assert code in (0, 2)


def test_oracle_subcommand(capsys):
    code, out, _ = run_cli(
        ["oracle", "--kind", "divisor_sum", "--N", "3", "--precision", "2"], capsys)
    assert code == 0 and out.strip() == "T^{1/3} + T"
    code, out, _ = run_cli(
        ["oracle", "--kind", "odd_squares", "--precision", "26"], capsys)
    assert code == 0 and out.strip() == "T + T^{9} + T^{25}"


def test_model_subcommand(capsys, tmp_path):
    out_file = tmp_path / "model.json"
    code, _, _ = run_cli(
        ["model", "--model", "single", "--output", str(out_file)], capsys)
    assert code == 0
    data = json.loads(out_file.read_text())
    assert data["objects"] == ["L"]
    assert data["uncheckable_instances"] == 0


def test_entropy_subcommand(capsys, tmp_path):
    out_file = tmp_path / "growth.csv"
    code, _, err = run_cli(
        ["entropy", "--k-max", "12", "--output", str(out_file)], capsys)
    assert code == 0
    lines = out_file.read_text().strip().splitlines()
    assert lines[0] == "k,N_k,bound"
    assert lines[1] == "1,3,3"


def test_console_script_installed():
    proc = subprocess.run([sys.executable, "-m", "persalg.cli", "oracle",
                           "--kind", "odd_squares", "--precision", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "T"
