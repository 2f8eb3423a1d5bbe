import json
import subprocess
import sys
from fractions import Fraction

import pytest

from hetfac import io
from hetfac.audit import fixture_by_name
from hetfac.cli import human, main, run_summary
from hetfac.mechanisms import Mechanism, run


def cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def sc_fixture_file(tmp_path):
    p = tmp_path / "inst.json"
    p.write_text(io.dumps_instance(fixture_by_name("sc-opt-not-sp").instance))
    return p


class TestGen:
    def test_byte_identical_rerun(self, tmp_path, capsys):
        for d in ("a", "b"):
            assert cli(capsys, "gen", "--seed", "42", "--size", "10", "--out", str(tmp_path / d))[0] == 0
        a = sorted((tmp_path / "a").iterdir())
        b = sorted((tmp_path / "b").iterdir())
        assert len(a) == 10
        assert [p.read_bytes() for p in a] == [p.read_bytes() for p in b]

    def test_minimal_instances(self, tmp_path, capsys):
        out = tmp_path / "c.jsonl"
        cli(capsys, "gen", "--nmin", "1", "--nmax", "1", "--mmax", "2", "--size", "5", "--out", str(out))
        assert all(i.n == 1 and i.m == 2 for i in io.read_corpus(out))

    def test_duplicates_present(self, tmp_path, capsys):
        cli(capsys, "gen", "--seed", "42", "--size", "100", "--out", str(tmp_path / "d"))
        assert any(len(set(i.alternatives)) < i.m for i in io.read_corpus(tmp_path / "d"))

    def test_bad_range(self, tmp_path, capsys):
        code, _, err = cli(capsys, "gen", "--mmin", "1", "--out", str(tmp_path / "x"))
        assert code == 2 and "error" in err


class TestRun:
    @pytest.mark.parametrize("mech", ["m1", "opt-sc", "m3", "m4"])
    def test_matches_library(self, sc_fixture_file, capsys, mech):
        code, out, _ = cli(capsys, "run", "--mech", mech, str(sc_fixture_file))
        inst = io.read_corpus(sc_fixture_file)[0]
        m = Mechanism.parse(mech)
        got = json.loads(out)
        assert code == 0 and got == run_summary(m, inst)
        assert tuple(Fraction(v) for v in got["placement"]) == run(m, inst).coords(inst)

    def test_opt_sc_placement(self, sc_fixture_file, capsys):
        out = json.loads(cli(capsys, "run", "--mech", "opt-sc", str(sc_fixture_file))[1])
        assert out["placement"] == ["-1", "103/100"] and out["sum_cost"] == "403/100"

    def test_human(self, sc_fixture_file, capsys):
        code, out, _ = cli(capsys, "run", "--mech", "opt-sc", "--human", str(sc_fixture_file))
        assert code == 0 and "F2 at 1.03 (slot 2)" in out

    def test_malformed_field(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text('{"agents": [{"x": "0", "pref": "sideways"}], "alternatives": ["0", "1"]}')
        code, _, err = cli(capsys, "run", "--mech", "m1", str(p))
        assert code == 2 and "agents[0].pref" in err

    def test_setting_mismatch(self, tmp_path, capsys):
        p = tmp_path / "opt.json"
        p.write_text('{"agents": [{"x": "0", "pref": "f1"}], "alternatives": ["0", "1"]}')
        code, _, err = cli(capsys, "run", "--mech", "m1", str(p))
        assert code == 2 and "compulsory" in err

    def test_missing_file(self, tmp_path, capsys):
        assert cli(capsys, "run", "--mech", "m1", str(tmp_path / "none.json"))[0] == 2

    def test_unknown_mechanism(self, sc_fixture_file, capsys):
        assert cli(capsys, "run", "--mech", "m9", str(sc_fixture_file))[0] == 2


class TestAudit:
    def test_m1_sum_passes(self, tmp_path, capsys):
        code, _, _ = cli(capsys, "audit", "--mech", "m1", "--objective", "sum", "--bound", "3",
                         "--size", "2000", "--seed", "7", "--out", str(tmp_path))
        rep = json.loads((tmp_path / "report.json").read_text())
        assert code == 0 and rep["verdict"] == "pass" and rep["seed"] == 7
        assert (tmp_path / "summary.csv").read_text().splitlines()[0].startswith("mechanism,")

    def test_opt_sc_fixtures_violation(self, capsys):
        code, out, _ = cli(capsys, "audit", "--sp", "--mech", "opt-sc", "--fixtures")
        rep = json.loads(out)
        assert code == 1 and rep["verdict"] == "fail" and rep["witness"] is not None

    def test_m4_group_passes(self, capsys):
        code, out, _ = cli(capsys, "audit", "--gsp", "--mech", "m4", "--nmax", "3", "--size", "60")
        assert code == 0 and json.loads(out)["violations"] == 0

    def test_default_bound_and_watch(self, capsys):
        code, out, _ = cli(capsys, "audit", "--mech", "m3", "--size", "100")
        rep = json.loads(out)
        assert code == 0 and rep["bound"] == "max(2n+1, 15)" and "2n+1" in rep["watch_counts"]

    def test_no_proven_bound(self, capsys):
        assert cli(capsys, "audit", "--mech", "m1", "--objective", "max", "--size", "5")[0] == 2

    def test_tight_bound_fails(self, capsys):
        assert cli(capsys, "audit", "--mech", "m1", "--bound", "1", "--size", "50")[0] == 1

    def test_group_cap(self, capsys):
        code, _, err = cli(capsys, "audit", "--gsp", "--mech", "m1", "--nmin", "5", "--nmax", "5",
                           "--size", "1")
        assert code == 2 and "too large" in err

    def test_report_deterministic(self, tmp_path, capsys):
        for d in ("a", "b"):
            cli(capsys, "audit", "--mech", "m2", "--size", "100", "--seed", "3", "--out", str(tmp_path / d))
        for name in ("report.json", "summary.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_supplied_corpus(self, tmp_path, capsys):
        cli(capsys, "gen", "--setting", "single", "--size", "20", "--out", str(tmp_path / "c.jsonl"))
        code, out, _ = cli(capsys, "audit", "--sp", "--mech", "sc", "--corpus", str(tmp_path / "c.jsonl"))
        assert code == 0 and json.loads(out)["instances"] == 20


class TestRepro:
    def test_transcript(self, capsys):
        code, out, _ = cli(capsys, "repro")
        assert code == 0
        assert "cost 103/100 -> 51/50" in out
        assert "cost 101/100 -> 1" in out
        assert "MISMATCH" not in out


def test_human_rendering():
    assert human(Fraction(7)) == "7"
    assert human(Fraction(103, 100)) == "1.03"
    assert human(Fraction(1, 3)) == "0.333333333333 (=1/3)"


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "hetfac", "repro"], capture_output=True, text=True)
    assert r.returncode == 0 and "all claims reproduced" in r.stdout


def test_usage_error_exit_code():
    r = subprocess.run([sys.executable, "-m", "hetfac", "audit"], capture_output=True, text=True)
    assert r.returncode == 2
