"""Command-line contract: output formats, exit codes, determinism."""
from __future__ import annotations

import csv
import io
import json
import math

import pytest

from typreal import cli
from typreal.validate import DEFAULT_SEED


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    assert code == 0
    return json.loads(out)


class TestBound:
    def test_text_odd(self, capsys):
        code, out, _ = run(capsys, "bound", "--n", "3", "--format", "text")
        assert code == 0
        assert out == "N=3 odd bound=1.00000000000000000 mu=0.5\n"

    def test_json_even(self, capsys):
        code, out, _ = run(capsys, "bound", "--n", "2", "--format", "json")
        assert code == 0
        assert out.startswith('{"n":2,"parity":"even","bound":0.5,"eta":0.25,"nu":0.61237')
        rec = json.loads(out)
        assert list(rec) == ["n", "parity", "bound", "eta", "nu"]
        assert rec["nu"] == pytest.approx(math.sqrt(6) / 4, abs=1e-15)

    def test_json_odd_has_no_nu(self, capsys):
        rec = run_json(capsys, "bound", "--n", "5")
        assert list(rec) == ["n", "parity", "bound", "mu"]

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "bound", "--n", "4", "--format", "csv")
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["n", "parity", "bound", "eta", "nu"]
        assert "\r" not in out

    @pytest.mark.parametrize("n", ["1", "0", "-3"])
    def test_guard(self, capsys, n):
        code, out, err = run(capsys, "bound", "--n", n)
        assert code == 2
        assert out == ""
        assert "degree" in err

    def test_non_integer(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["bound", "--n", "x"])
        assert exc.value.code == 2


class TestExtremizer:
    def test_odd_max(self, capsys):
        rec = run_json(capsys, "extremizer", "--n", "3", "--which", "max")
        assert rec["coefficients"] == [1.0, 1.0, 0.5]

    def test_odd_min(self, capsys):
        rec = run_json(capsys, "extremizer", "--n", "3", "--which", "min")
        assert rec["coefficients"] == [1.0, -1.0, 0.5]

    def test_even_max(self, capsys):
        rec = run_json(capsys, "extremizer", "--n", "2", "--which", "max")
        assert rec["coefficients"] == [1.0, 0.5]
        assert rec["p_at_1"] == 1.5 and rec["p_at_minus_1"] == -0.5

    def test_field_order(self, capsys):
        rec = run_json(capsys, "extremizer", "--n", "4")
        assert list(rec) == ["n", "parity", "bound", "eta", "nu", "which", "coefficients",
                             "p_at_1", "p_at_minus_1"]

    def test_text(self, capsys):
        code, out, _ = run(capsys, "extremizer", "--n", "3")
        assert code == 0
        assert out == "N=3 odd max coefficients=[1.0, 1.0, 0.5] P(1)=2.5 P(-1)=-0.5\n"

    def test_bad_which(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["extremizer", "--n", "3", "--which", "mid"])
        assert exc.value.code == 2

    def test_guard(self, capsys):
        assert run(capsys, "extremizer", "--n", "1")[0] == 2


class TestTable:
    def test_two_rows(self, capsys):
        recs = run_json(capsys, "table", "--from", "2", "--to", "3")
        assert [r["bound"] for r in recs] == [0.5, 1.0]

    def test_csv_rows(self, capsys):
        code, out, _ = run(capsys, "table", "--from", "2", "--to", "10", "--format", "csv")
        assert code == 0
        assert "\r" not in out and out.endswith("\n")
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["n", "parity", "bound"] + [f"a{j}" for j in range(2, 11)]
        body = rows[1:]
        assert len(body) == 9
        assert all(len(r) == len(rows[0]) for r in body)
        # degree 2 has only a2; the rest is padding
        assert body[0][4:] == [""] * 8

    def test_monotone_within_parity(self, capsys):
        recs = run_json(capsys, "table", "--from", "2", "--to", "40")
        assert [r["n"] for r in recs] == list(range(2, 41))
        for parity in ("odd", "even"):
            b = [r["bound"] for r in recs if r["parity"] == parity]
            assert all(x < y for x, y in zip(b, b[1:]))

    @pytest.mark.parametrize("lo,hi", [(1, 5), (5, 4), (2, 501)])
    def test_bad_range(self, capsys, lo, hi):
        assert run(capsys, "table", "--from", str(lo), "--to", str(hi))[0] == 2


class TestVerify:
    def test_single(self, capsys):
        code, out, _ = run(capsys, "verify", "--n", "2")
        assert code == 0
        assert out.splitlines()[-1] == "verified 1 degrees: 1 passed, 0 failed"

    def test_range_json(self, capsys):
        code, out, _ = run(capsys, "verify", "--from", "2", "--to", "40", "--seed", "42",
                           "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert doc["seed"] == 42
        assert len(doc["reports"]) == 39
        assert doc["passed"] == 39 and doc["failed"] == 0
        rec = doc["reports"][1]
        assert list(rec) == ["n", "parity", "bound", "mu", "coefficients", "diagnostics"]
        assert rec["diagnostics"]["passed"] is True

    def test_csv_summary_on_stderr(self, capsys):
        code, out, err = run(capsys, "verify", "--from", "2", "--to", "4", "--format", "csv")
        assert code == 0
        assert err == "verified 3 degrees: 3 passed, 0 failed\n"
        assert len(out.splitlines()) == 4

    @pytest.mark.parametrize("argv", [
        ["--n", "0"],
        ["--n", "501"],
        [],
        ["--n", "3", "--from", "2", "--to", "4"],
        ["--from", "2"],
        ["--from", "9", "--to", "3"],
    ])
    def test_usage_errors(self, capsys, argv):
        assert run(capsys, "verify", *argv)[0] == 2

    def test_failure_exit(self, capsys, monkeypatch):
        real = cli.certify

        def fail_at_five(n, seed):
            r = real(n, seed)
            if n == 5:
                from dataclasses import replace
                r = replace(r, passed=False, failed_stage="pencil")
            return r

        monkeypatch.setattr(cli, "certify", fail_at_five)
        code, out, _ = run(capsys, "verify", "--from", "4", "--to", "6")
        assert code == 1
        assert "FAIL[pencil]" in out
        assert out.splitlines()[-1] == "verified 3 degrees: 2 passed, 1 failed"

    def test_genuine_failure_exit(self, capsys):
        # root-based factorization loses accuracy at this degree
        code, out, _ = run(capsys, "verify", "--n", "95", "--format", "json")
        assert code == 1
        d = json.loads(out)["reports"][0]["diagnostics"]
        assert d["failed_stage"] == "factorization"
        assert d["factorization_gap"] is None

    def test_default_seed(self, capsys):
        assert run_json(capsys, "verify", "--n", "3")["seed"] == DEFAULT_SEED

    def test_env_seed_overrides_flag(self, capsys, monkeypatch):
        monkeypatch.setenv("EXTREMAL_SEED", "7")
        doc = run_json(capsys, "verify", "--n", "6", "--seed", "99")
        assert doc["seed"] == 7
        monkeypatch.delenv("EXTREMAL_SEED")
        assert run_json(capsys, "verify", "--n", "6", "--seed", "7") == doc

    def test_env_seed_invalid(self, capsys, monkeypatch):
        monkeypatch.setenv("EXTREMAL_SEED", "seven")
        code, _, err = run(capsys, "verify", "--n", "3")
        assert code == 2
        assert "EXTREMAL_SEED" in err

    def test_deterministic(self, capsys):
        a = run(capsys, "verify", "--from", "2", "--to", "12", "--format", "json")
        b = run(capsys, "verify", "--from", "2", "--to", "12", "--format", "json")
        assert a == b


class TestKernel:
    def test_three_points(self, capsys):
        rec = run_json(capsys, "kernel", "--n", "3", "--points", "3")
        assert rec["t"] == pytest.approx([math.pi / 4, math.pi / 2, 3 * math.pi / 4], abs=1e-15)
        assert rec["values"][1] == pytest.approx(0.5, abs=1e-15)

    def test_default_grid_hits_zero(self, capsys):
        rec = run_json(capsys, "kernel", "--n", "3")
        assert rec["points"] == cli.DEFAULT_KERNEL_POINTS
        vals = rec["values"]
        assert min(vals) >= -1e-10
        k = min(range(len(vals)), key=vals.__getitem__)
        assert vals[k] <= 1e-9
        # the zero is at 2 pi/3; near pi/3 the kernel is about 3 sqrt(3)/8
        assert rec["t"][k] == pytest.approx(2 * math.pi / 3, abs=1e-12)
        j = min(range(len(vals)), key=lambda i: abs(rec["t"][i] - math.pi / 3))
        assert vals[j] > 0.5

    @pytest.mark.parametrize("n", [2, 7, 20, 41])
    def test_nonnegative(self, capsys, n):
        rec = run_json(capsys, "kernel", "--n", str(n), "--points", "2000")
        assert min(rec["values"]) >= -1e-10

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "kernel", "--n", "4", "--points", "5", "--format", "csv")
        assert code == 0
        lines = out.split("\n")
        assert lines[0] == "t,value" and len(lines) == 7 and lines[-1] == ""

    @pytest.mark.parametrize("argv", [["--n", "3", "--points", "1"], ["--n", "1"]])
    def test_guard(self, capsys, argv):
        assert run(capsys, "kernel", *argv)[0] == 2


@pytest.mark.parametrize("argv", [
    ["bound", "--n", "7"],
    ["bound", "--n", "8"],
    ["extremizer", "--n", "9", "--which", "min"],
    ["table", "--from", "2", "--to", "6"],
    ["verify", "--n", "10"],
    ["kernel", "--n", "6", "--points", "50"],
])
def test_json_round_trip(capsys, argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    assert code == 0
    obj = json.loads(out)
    assert cli._dumps(obj) + "\n" == out


def test_missing_command():
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2
