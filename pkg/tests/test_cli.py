"""Command line behavior: output documents, exit codes, determinism."""

import json

import pytest

from cube_constants import cli, verify
from cube_constants.verify import BoundsReport


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExact:
    def test_level_route_json(self, capsys):
        code, out, _ = run_cli(capsys, "exact", "--family", "homog:3:2")
        assert code == 0
        doc = json.loads(out)
        assert doc["lambda"] == {"num": "3", "den": "2"}
        assert doc["float"] == 1.5
        assert doc["method"] == "level"

    def test_explicit_route(self, capsys, tmp_path):
        spec = {"kind": "explicit", "N": 3, "sets": [[1], [2], [3]]}
        path = tmp_path / "fam.json"
        path.write_text(json.dumps(spec))
        code, out, _ = run_cli(capsys, "exact", "--family", f"file:{path}")
        assert code == 0
        doc = json.loads(out)
        assert doc["method"] == "exact"
        assert doc["lambda"] == {"num": "3", "den": "2"}

    def test_prime_route(self, capsys):
        code, out, _ = run_cli(capsys, "exact", "--family", "primes:10")
        assert code == 0
        doc = json.loads(out)
        assert doc["method"] == "haagerup"
        assert doc["lambda"] == {"num": "3", "den": "2"}

    def test_level_by_n_d_flags(self, capsys):
        code, out, _ = run_cli(capsys, "exact", "--N", "6", "--d", "2",
                               "--mode", "up-to-degree")
        assert code == 0
        assert json.loads(out)["family"]["kind"] == "upto"

    def test_missing_arguments_is_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "exact")
        assert code == 64
        assert "error" in err

    def test_guard_error_exit_two(self, capsys):
        code, _, err = run_cli(capsys, "exact", "--family", "sqfree:9999")
        assert code == 2
        assert err


class TestUsage:
    def test_unknown_subcommand(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["bogus"])
        assert exc.value.code == 64

    def test_unknown_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["kappa", "--frobnicate"])
        assert exc.value.code == 64

    def test_bad_family_shorthand(self, capsys):
        code, _, err = run_cli(capsys, "exact", "--family", "homog:x:2")
        assert code == 2

    def test_missing_file(self, capsys):
        code, _, err = run_cli(capsys, "exact", "--family", "file:/nonexistent.json")
        assert code == 2


class TestTable:
    def test_csv_banner_and_shape(self, capsys):
        code, out, _ = run_cli(capsys, "table")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "#cube-constants v1"
        assert lines[1] == "d,limit_constant,normalized,reference_value"
        assert len(lines) == 7
        first = lines[2].split(",")
        assert first[0] == "2"
        assert abs(float(first[1]) - 0.4839414490382868) <= 1e-12

    def test_json_variant(self, capsys):
        code, out, _ = run_cli(capsys, "table", "--format", "json")
        assert code == 0
        rows = json.loads(out)["rows"]
        assert [r["d"] for r in rows] == [2, 3, 4, 5, 6]
        for r in rows:
            assert abs(r["normalized"] - r["reference_value"]) <= 0.002


class TestLimit:
    def test_series(self, capsys):
        code, out, _ = run_cli(capsys, "limit", "--d", "2", "--N", "10,20")
        assert code == 0
        doc = json.loads(out)
        assert doc["d"] == 2
        assert [row["N"] for row in doc["series"]] == [10, 20]
        # ratios approach the limit from one side at these sizes
        assert abs(doc["series"][1]["ratio"] - doc["limit"]) < abs(
            doc["series"][0]["ratio"] - doc["limit"]
        )


class TestMc:
    def test_reports_estimate(self, capsys):
        code, out, _ = run_cli(capsys, "mc", "--family", "homog:8:2",
                               "--samples", "5000", "--seed", "1")
        assert code == 0
        doc = json.loads(out)
        assert doc["method"] == "mc"
        assert doc["samples"] == 5000
        assert doc["ci95"][0] < doc["mean"] < doc["ci95"][1]

    def test_thread_count_does_not_change_output(self, capsys):
        _, out1, _ = run_cli(capsys, "mc", "--family", "homog:8:2",
                             "--samples", "5000", "--threads", "1")
        _, out8, _ = run_cli(capsys, "mc", "--family", "homog:8:2",
                             "--samples", "5000", "--threads", "8")
        assert out1 == out8


class TestSidonCommand:
    def test_full_family(self, capsys):
        code, out, _ = run_cli(capsys, "sidon", "--family", "upto:2:2")
        assert code == 0
        doc = json.loads(out)
        assert abs(doc["value"] - 2) <= 1e-8
        assert len(doc["witness"]) == 4

    def test_guard(self, capsys):
        code, _, err = run_cli(capsys, "sidon", "--family", "homog:12:2")
        assert code == 2


class TestKappaCommand:
    def test_value(self, capsys):
        code, out, _ = run_cli(capsys, "kappa", "--tol", "1e-5")
        assert code == 0
        assert 2.2085 <= json.loads(out)["kappa"] <= 2.2095


class TestVerifyCommand:
    def test_suite_passes(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--suite", "range", "--max-n", "6")
        assert code == 0
        reports = json.loads(out)
        assert all(r["pass"] for r in reports)

    def test_failure_exits_three(self, capsys, monkeypatch):
        bad = BoundsReport("forced", 2.0, 1.0, False, {})
        monkeypatch.setattr(cli, "run_suite", lambda *a, **k: [bad])
        code, out, _ = run_cli(capsys, "verify", "--suite", "range")
        assert code == 3
        assert json.loads(out)[0]["pass"] is False

    def test_combinatorics_document(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--suite", "combinatorics",
                               "--max-n", "6")
        assert code == 0
        doc = json.loads(out)
        assert set(doc) == {"identity", "c_table", "beckner"}
        assert doc["identity"] is True

    def test_csv_format(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--suite", "desigforo",
                               "--desigforo-max-n", "20", "--format", "csv")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "#cube-constants v1"
        assert lines[1] == "name,lhs,rhs,pass,context"


class TestFamiliesCommand:
    def test_materializes_sets(self, capsys):
        code, out, _ = run_cli(capsys, "families", "--family", "homog:4:3")
        assert code == 0
        doc = json.loads(out)
        assert doc["size"] == 4
        assert [1, 2, 3] in doc["sets"]

    def test_squarefree_shorthand(self, capsys):
        code, out, _ = run_cli(capsys, "families", "--family", "sqfree:10")
        assert code == 0
        doc = json.loads(out)
        assert doc["size"] == 7  # 1,2,3,5,6,7,10


class TestPrimesCommand:
    def test_small_n_skips_squarefree(self, capsys):
        code, out, _ = run_cli(capsys, "primes", "--N", "10")
        assert code == 0
        doc = json.loads(out)
        assert doc["prime_singletons"]["lambda"] == {"num": "3", "den": "2"}
        assert doc["squarefree"] is None

    def test_with_squarefree(self, capsys):
        code, out, _ = run_cli(capsys, "primes", "--N", "16",
                               "--samples", "5000")
        assert code == 0
        doc = json.loads(out)
        assert doc["squarefree"]["agrees_with_exact"] is True


class TestDeterminismAndOut:
    def test_byte_identical_reruns(self, capsys):
        for argv in (
            ["exact", "--family", "homog:5:2"],
            ["mc", "--family", "homog:6:2", "--samples", "2000"],
            ["table"],
            ["kappa"],
            ["limit", "--d", "3", "--N", "8,12"],
        ):
            _, out1, _ = run_cli(capsys, *argv)
            _, out2, _ = run_cli(capsys, *argv)
            assert out1 == out2, argv

    def test_out_flag_matches_stdout(self, capsys, tmp_path):
        path = tmp_path / "doc.json"
        code, out, _ = run_cli(capsys, "exact", "--family", "homog:4:2")
        code2 = cli.main(["exact", "--family", "homog:4:2", "--out", str(path)])
        capsys.readouterr()
        assert code == code2 == 0
        assert path.read_text() == out

    def test_env_threads_must_be_integer(self, capsys, monkeypatch):
        monkeypatch.setenv("CUBE_CONSTANTS_THREADS", "soon")
        code, _, err = run_cli(capsys, "mc", "--family", "homog:5:2",
                               "--samples", "1000")
        assert code == 2
