import csv
import io
import json
import math
import subprocess
import sys

import pytest

from entangle import __version__
from entangle.cli import fmt, run, to_csv


def call(capsys, *argv):
    status = run(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestFormatting:
    def test_numbers(self):
        assert fmt(0.1 + 0.2) == "0.3"
        assert fmt(1 / 3) == "0.333333333333"
        assert fmt(-0.0) == "0"
        assert fmt(5) == "5"
        assert fmt(True) == "true"
        assert fmt("psi+") == "psi+"
        assert fmt(1e-20) == "1e-20"

    def test_csv_uses_lf(self):
        text = to_csv(["a", "b"], [(1, 0.5), (2, 0.25)])
        assert text == "a,b\n1,0.5\n2,0.25\n"


class TestTeleport:
    def test_example(self, capsys):
        status, out, _ = call(capsys, "teleport", "--channel", "phi+", "--input", "0.5477,0.8367")
        assert status == 0
        rows = rows_of(out)
        assert list(rows[0]) == ["outcome", "probability", "fidelity", "degenerate"]
        assert len(rows) == 4
        for r in rows:
            assert float(r["probability"]) == pytest.approx(0.25, abs=1e-10)
            assert float(r["fidelity"]) == pytest.approx(1, abs=1e-12)
            assert r["degenerate"] == "false"

    def test_product_channel(self, capsys):
        status, out, _ = call(capsys, "teleport", "--channel", "00", "--input", "0.6,0.8")
        assert status == 0
        rows = rows_of(out)
        assert sum(float(r["probability"]) for r in rows) == pytest.approx(1)

    def test_complex_input(self, capsys):
        status, out, _ = call(capsys, "teleport", "--input", "1,1i")
        assert status == 0 and len(rows_of(out)) == 4

    @pytest.mark.parametrize("bad", ["1,x", "1,2,3", "0,0"])
    def test_bad_input(self, capsys, bad):
        status, _, err = call(capsys, "teleport", "--input", bad)
        assert status == 1
        assert "--input" in err


class TestPurify:
    def test_example(self, capsys):
        status, out, _ = call(capsys, "purify", "--A", "0.55", "--B", "0.15", "--C", "0.15",
                              "--D", "0.15", "--target", "0.999999")
        assert status == 0
        rows = rows_of(out)
        assert list(rows[0]) == ["round", "A", "B", "C", "D", "N", "surviving_fraction"]
        assert float(rows[-1]["A"]) >= 0.999999
        assert rows[-1]["round"] == "12"

    def test_bad_float_names_flag(self, capsys):
        status, _, err = call(capsys, "purify", "--A", "abc", "--B", "0", "--C", "0", "--D", "0")
        assert status == 1 and "--A" in err

    def test_coefficients_must_sum_to_one(self, capsys):
        status, _, err = call(capsys, "purify", "--A", "0.5", "--B", "0.5", "--C", "0.5", "--D", "0")
        assert status == 1 and "sum" in err


class TestConcentrate:
    def test_columns(self, capsys):
        status, out, _ = call(capsys, "concentrate", "--a2", "0.3", "--ns", "10,100")
        assert status == 0
        rows = rows_of(out)
        assert list(rows[0]) == ["n", "rate_nats", "ratio_to_entropy"]
        assert float(rows[0]["ratio_to_entropy"]) == pytest.approx(0.708760394394, abs=1e-11)

    def test_ebits(self, capsys):
        _, nats, _ = call(capsys, "concentrate", "--a2", "0.5", "--ns", "1000")
        _, ebits, _ = call(capsys, "concentrate", "--a2", "0.5", "--ns", "1000", "--unit", "ebits")
        a, b = rows_of(nats)[0], rows_of(ebits)[0]
        assert "rate_ebits" in b
        assert float(b["rate_ebits"]) == pytest.approx(float(a["rate_nats"]) / math.log(2), rel=1e-11)
        assert a["ratio_to_entropy"] == b["ratio_to_entropy"]

    def test_unordered_grid(self, capsys):
        assert call(capsys, "concentrate", "--a2", "0.3", "--ns", "100,10")[0] == 1

    def test_bad_count(self, capsys):
        status, _, err = call(capsys, "concentrate", "--a2", "0.3", "--ns", "10,ten")
        assert status == 1 and "--ns" in err


class TestWernerSweep:
    def test_small_grid(self, capsys):
        status, out, _ = call(capsys, "werner-sweep", "--from", "0.5", "--to", "1", "--points", "3",
                              "--seed", "7")
        assert status == 0
        rows = rows_of(out)
        assert list(rows[0]) == ["F", "E_F_nats", "E_RE_nats", "fidelity", "ppt_witness",
                                 "ere_converged"]
        assert [r["F"] for r in rows] == ["0.5", "0.75", "1"]
        for r in rows:
            assert float(r["E_RE_nats"]) <= float(r["E_F_nats"]) + 1e-6

    def test_jobs_do_not_change_output(self, capsys):
        args = ["werner-sweep", "--from", "0.6", "--to", "0.9", "--points", "3", "--seed", "3"]
        _, serial, _ = call(capsys, *args)
        _, parallel, _ = call(capsys, *args, "--jobs", "2")
        assert serial == parallel

    def test_out_of_domain(self, capsys):
        assert call(capsys, "werner-sweep", "--from", "0.1", "--points", "2")[0] == 1
        assert call(capsys, "werner-sweep", "--points", "0")[0] == 1


class TestLoccAudit:
    def test_formation(self, capsys):
        status, out, _ = call(capsys, "locc-audit", "--trials", "25", "--seed", "1")
        assert status == 0
        report = json.loads(out)
        assert report["measure"] == "formation" and report["trials"] == 25
        assert report["violations"] == []

    def test_zero_trials(self, capsys):
        assert call(capsys, "locc-audit", "--trials", "0")[0] == 1


class TestExitCodes:
    def test_unknown_subcommand(self, capsys):
        status, _, err = call(capsys, "frobnicate")
        assert status == 1 and "usage" in err

    def test_unknown_flag(self, capsys):
        status, _, err = call(capsys, "teleport", "--bogus")
        assert status == 1 and "usage" in err

    def test_no_arguments(self, capsys):
        assert call(capsys)[0] == 1

    def test_violation_exits_two(self, capsys, monkeypatch):
        import entangle.cli as cli
        from entangle.locc import AuditReport

        monkeypatch.setattr(cli, "audit_monotonicity",
                            lambda m, t, s: AuditReport(m, s, t, 1e-6, 0.1, [[1, 0.1]], []))
        status, out, err = call(capsys, "locc-audit", "--trials", "1")
        assert status == 2
        assert json.loads(out)["violations"] == [[1, 0.1]]
        assert "violation" in err

    def test_failed_check_exits_two(self, capsys, monkeypatch):
        import entangle.cli as cli
        from entangle.core import CheckFailed

        def boom(*a, **k):
            raise CheckFailed("E_RE above E_F")

        monkeypatch.setattr(cli, "werner_sweep", boom)
        assert call(capsys, "werner-sweep", "--points", "2")[0] == 2


class TestArtifacts:
    def test_sidecar(self, tmp_path, capsys):
        out = tmp_path / "trace.csv"
        status = run(["purify", "--A", "0.7", "--B", "0.1", "--C", "0.1", "--D", "0.1",
                      "--seed", "4", "--out", str(out)])
        assert status == 0
        assert capsys.readouterr().out == ""
        assert out.read_bytes().startswith(b"round,A,B,C,D,N,surviving_fraction\n")
        assert b"\r\n" not in out.read_bytes()
        meta = json.loads((tmp_path / "trace.csv.meta.json").read_text())
        assert meta["command"] == "purify"
        assert meta["config"]["A"] == 0.7 and meta["config"]["seed"] == 4
        assert meta["exit_status"] == 0 and meta["version"] == __version__
        assert "created" in meta

    @pytest.mark.parametrize("argv", [
        ["teleport", "--channel", "psi-", "--input", "0.3,0.9"],
        ["purify", "--A", "0.55", "--B", "0.15", "--C", "0.15", "--D", "0.15"],
        ["concentrate", "--a2", "0.3"],
        ["werner-sweep", "--from", "0.45", "--to", "0.85", "--points", "3"],
        ["locc-audit", "--trials", "30", "--measure", "formation"],
    ])
    def test_byte_identical_reruns(self, argv, tmp_path):
        a, b = tmp_path / "a.out", tmp_path / "b.out"
        assert run(argv + ["--seed", "11", "--out", str(a)]) == 0
        assert run(argv + ["--seed", "11", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_env_seed(self, tmp_path, monkeypatch):
        monkeypatch.setenv("ENTANGLE_SEED", "11")
        a = tmp_path / "a.json"
        run(["locc-audit", "--trials", "5", "--out", str(a)])
        assert json.loads(a.read_text())["seed"] == 11
        b = tmp_path / "b.json"
        run(["locc-audit", "--trials", "5", "--seed", "11", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_bad_env_seed(self, monkeypatch, capsys):
        monkeypatch.setenv("ENTANGLE_SEED", "seven")
        status, _, err = call(capsys, "locc-audit", "--trials", "1")
        assert status == 1 and "ENTANGLE_SEED" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "entangle", "teleport"], capture_output=True,
                         text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == "outcome,probability,fidelity,degenerate"
