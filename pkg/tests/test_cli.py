import json
import subprocess
import sys

from webrank.cli import main
from webrank.web import save_balanced_set
from webrank.catalog import get_family


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_counts_text(capsys):
    code, out, _ = run_cli(capsys, "counts", "--k0", "4", "--n", "10")
    assert code == 0
    assert "1860" in out  # calibrated max rank in dimension 10
    assert "N(2)=6, N(3)=8, N(4)=3" in out


def test_counts_json(capsys):
    code, out, _ = run_cli(capsys, "counts", "--k0", "3", "--n", "4", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["per_n"][-1]["calibrated_max_rank"] == 26
    assert payload["N_table"] == {"2": 3, "3": 2}
    assert payload["config"]["seed"] == 0


def test_catalog_lists_families(capsys):
    code, out, _ = run_cli(capsys, "catalog")
    assert code == 0
    assert "k0_3_quadrics" in out
    assert "k0_4_pereira_pirio_affine" in out


def test_validate_family(capsys):
    code, out, _ = run_cli(capsys, "validate", "--family", "k0_3_quadrics")
    assert code == 0
    assert "true" in out


def test_check_ordinary_with_direct(capsys):
    code, out, _ = run_cli(
        capsys,
        "check-ordinary",
        "--family",
        "k0_3_quadrics",
        "--direct",
        "--n",
        "3",
    )
    assert code == 0
    assert "finite criterion: true" in out


def test_rank_command(capsys):
    code, out, _ = run_cli(
        capsys, "rank", "--family", "k0_3_quadrics", "--n", "2", "--format", "json"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["value"] == 3
    assert payload["expected"] == 3
    assert payload["dims_trace"] == {"4": 3, "5": 3}


def test_verify_family_quadrics(capsys):
    code, out, _ = run_cli(
        capsys,
        "verify-family",
        "--family",
        "k0_3_quadrics",
        "--seed",
        "7",
        "--format",
        "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["verdicts"]["overall"] == "true"
    ranks = {c["n"]: c["value"] for c in payload["rank"]["per_n"]}
    assert ranks == {2: 3, 3: 11}
    assert payload["rank"]["N_table_empirical"] == {"2": 3, "3": 2}
    assert payload["expected"] == {"ordinary": True, "max_rank": True}


def test_reports_are_byte_identical_for_same_seed(capsys):
    argv = [
        "verify-family",
        "--family",
        "k0_3_sym_sum",
        "--seed",
        "3",
        "--format",
        "json",
    ]
    _, first, _ = run_cli(capsys, *argv)
    _, second, _ = run_cli(capsys, *argv)
    assert first == second


def test_reports_differ_across_seeds_only_in_witnesses(capsys):
    _, first, _ = run_cli(
        capsys, "verify-family", "--family", "k0_3_sym_sum", "--seed", "3",
        "--format", "json",
    )
    _, second, _ = run_cli(
        capsys, "verify-family", "--family", "k0_3_sym_sum", "--seed", "4",
        "--format", "json",
    )
    assert json.loads(first)["verdicts"] == json.loads(second)["verdicts"]


def test_crosscheck_command(capsys):
    code, out, _ = run_cli(
        capsys, "crosscheck", "--family", "k0_3_quadrics", "--n", "2", "--n", "3"
    )
    assert code == 0
    assert "true" in out


def test_bad_family_file_exits_one(capsys, tmp_path):
    bad = {
        "k0": 4,
        "webs": [
            ["x1"],
            ["x1+x2", "x1-x2", "x1*x2"],
            ["x1+x2+x3", "x1+2*x2+3*x3", "2*x1+3*x2+4*x3"],
            ["x1+x2+x3+x4"],
        ],
    }
    path = tmp_path / "bad_family.json"
    path.write_text(json.dumps(bad))
    code, out, _ = run_cli(capsys, "check-ordinary", "--input", str(path))
    assert code == 1
    assert "k=3: false" in out


def test_file_input_roundtrip(capsys, tmp_path):
    E, _ = get_family("k0_3_harmonic_inv")
    path = tmp_path / "family.json"
    save_balanced_set(E, str(path))
    code, out, _ = run_cli(capsys, "validate", "--input", str(path))
    assert code == 0


def test_unknown_family_exit_code(capsys):
    code, _, err = run_cli(capsys, "validate", "--family", "nope")
    assert code == 66
    assert "unknown family" in err


def test_missing_file_exit_code(capsys):
    code, _, err = run_cli(capsys, "validate", "--input", "/does/not/exist.json")
    assert code == 66


def test_malformed_json_exit_code(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _, err = run_cli(capsys, "validate", "--input", str(path))
    assert code == 65


def test_missing_input_is_usage_error(capsys):
    code, _, _ = run_cli(capsys, "validate")
    assert code == 64


def test_usage_error_exit_code():
    result = subprocess.run(
        [sys.executable, "-m", "webrank.cli", "counts", "--k0", "4"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 64


def test_module_invocation_smoke():
    result = subprocess.run(
        [sys.executable, "-m", "webrank.cli", "counts", "--k0", "3", "--n", "3"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert "11" in result.stdout
