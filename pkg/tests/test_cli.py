"""Command-line front end: schemas, determinism, config handling, exit codes."""

import pytest

from poisson_mac.cli import main


def run(tmp_path, *argv):
    out = tmp_path / "out.csv"
    code = main([*argv, "--out", str(out)])
    text = out.read_text(encoding="utf-8") if out.exists() else ""
    return code, text


def rows_of(text):
    lines = [l for l in text.splitlines() if l and not l.startswith("#")]
    header = lines[0].split(",")
    return header, [dict(zip(header, l.split(","))) for l in lines[1:]]


class TestSolve:
    def test_fig2_schema_and_values(self, tmp_path):
        code, text = run(
            tmp_path, "solve", "--a1", "10", "--a2", "12",
            "--lambda0", "0.001", "--tau", "0.02",
        )
        assert code == 0
        assert text.startswith("# command=solve")
        assert "intersections=1" in text.splitlines()[0]
        header, rows = rows_of(text)
        assert header == [
            "a1", "a2", "lambda0", "tau", "capacity_nats", "mu1", "mu2",
            "strategy", "regime_ok",
        ]
        assert rows[0]["strategy"] == "BothActive"
        assert rows[0]["regime_ok"] == "true"
        assert float(rows[0]["capacity_nats"]) == pytest.approx(4.53858, abs=1e-4)

    def test_fig1_only_user2(self, tmp_path):
        code, text = run(tmp_path, "solve", "--a1", "1", "--a2", "20", "--tau", "0.02")
        assert code == 0
        _, rows = rows_of(text)
        assert rows[0]["strategy"] == "OnlyUser2"
        assert rows[0]["lambda0"] == "0.001"  # documented default

    def test_deterministic_output(self, tmp_path):
        args = ("solve", "--a1", "10", "--a2", "12", "--tau", "0.02")
        _, first = run(tmp_path, *args)
        _, second = run(tmp_path, *args)
        assert first == second

    def test_missing_field_is_validation_error(self, tmp_path, capsys):
        code, _ = run(tmp_path, "solve", "--a1", "10", "--tau", "0.02")
        assert code == 2
        assert "a2" in capsys.readouterr().err

    def test_bad_value_is_validation_error(self, tmp_path, capsys):
        code, _ = run(
            tmp_path, "solve", "--a1", "-3", "--a2", "12", "--tau", "0.02"
        )
        assert code == 2
        assert "a1" in capsys.readouterr().err

    def test_strict_out_of_regime(self, tmp_path):
        code, _ = run(
            tmp_path, "solve", "--a1", "10", "--a2", "30", "--tau", "0.02", "--strict"
        )
        assert code == 3


class TestConfigFile:
    def test_config_supplies_and_flags_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("a1 = 10\na2 = 12\ntau = 0.02\n# comment\n", encoding="utf-8")
        code, text = run(tmp_path, "solve", "--config", str(cfg))
        assert code == 0
        _, rows = rows_of(text)
        assert rows[0]["a1"] == "10"

        code, text = run(tmp_path, "solve", "--config", str(cfg), "--a1", "1", "--a2", "20")
        assert code == 0
        _, rows = rows_of(text)
        assert rows[0]["a1"] == "1"
        assert rows[0]["strategy"] == "OnlyUser2"

    def test_malformed_config(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("a1 10\n", encoding="utf-8")
        code, _ = run(tmp_path, "solve", "--config", str(cfg))
        assert code == 2
        assert "key=value" in capsys.readouterr().err


class TestIntersections:
    def test_fig1_empty(self, tmp_path):
        code, text = run(
            tmp_path, "intersections", "--a1", "1", "--a2", "20", "--tau", "0.02"
        )
        assert code == 0
        header, rows = rows_of(text)
        assert header == ["mu1", "mu2", "valid"]
        assert rows == []

    def test_fig2_single_valid(self, tmp_path):
        code, text = run(
            tmp_path, "intersections", "--a1", "10", "--a2", "12", "--tau", "0.02"
        )
        assert code == 0
        _, rows = rows_of(text)
        assert len(rows) == 1
        assert rows[0]["valid"] == "true"
        assert 0.0 <= float(rows[0]["mu1"]) <= 1.0


class TestSolveMiso:
    def test_reduction_matches_solve(self, tmp_path):
        code, miso_text = run(
            tmp_path, "solve-miso", "--peaks1", "5,5", "--peaks2", "6,6",
            "--tau", "0.02",
        )
        assert code == 0
        _, miso_rows = rows_of(miso_text)
        code, siso_text = run(
            tmp_path, "solve", "--a1", "10", "--a2", "12", "--tau", "0.02"
        )
        _, siso_rows = rows_of(siso_text)
        assert miso_rows[0]["capacity_nats"] == siso_rows[0]["capacity_nats"]
        assert miso_rows[0]["a1"] == "10"


class TestSweeps:
    def test_sweep_peak_with_continuous_sentinel(self, tmp_path):
        code, text = run(
            tmp_path, "sweep-peak", "--a1", "12.5", "--a2", "5:15:5",
            "--tau", "0.02,0",
        )
        assert code == 0
        header, rows = rows_of(text)
        assert header == ["a2", "tau", "mu1", "mu2", "capacity"]
        assert len(rows) == 6
        slotted = {r["a2"]: float(r["capacity"]) for r in rows if r["tau"] != "0"}
        cont = {r["a2"]: float(r["capacity"]) for r in rows if r["tau"] == "0"}
        assert set(slotted) == set(cont) == {"5", "10", "15"}
        for a2 in slotted:
            assert slotted[a2] < cont[a2]  # dead time only loses information

    def test_sweep_region_labels(self, tmp_path):
        code, text = run(
            tmp_path, "sweep-region", "--a1", "1:21:10", "--a2", "1:21:10",
        )
        assert code == 0
        header, rows = rows_of(text)
        assert header == ["a1", "a2", "strategy"]
        assert len(rows) == 9
        byab = {(r["a1"], r["a2"]): r["strategy"] for r in rows}
        assert byab[("1", "1")] == "BothActive"
        assert byab[("1", "21")] == "OnlyUser2"
        assert byab[("21", "1")] == "OnlyUser1"

    def test_sweep_region_cells_range(self, tmp_path):
        code, text = run(
            tmp_path, "sweep-region", "--a1", "1:30", "--a2", "1:30", "--cells", "3",
        )
        assert code == 0
        _, rows = rows_of(text)
        assert len(rows) == 9


class TestSymmetricAndConverge:
    def test_symmetric_row(self, tmp_path):
        code, text = run(tmp_path, "symmetric", "--a", "10", "--tau", "0.02")
        assert code == 0
        header, rows = rows_of(text)
        assert "peak_threshold" in header
        assert rows[0]["schur_mode"] == "SplitRegions"
        assert float(rows[0]["fixed_point"]) == pytest.approx(0.267433, abs=1e-5)

    def test_converge_rows(self, tmp_path):
        code, text = run(
            tmp_path, "converge", "--a1", "10", "--a2", "12", "--taus", "1e-3,1e-4"
        )
        assert code == 0
        header, rows = rows_of(text)
        assert header == ["tau", "capacity", "cont_capacity", "gap", "mu1", "mu2"]
        assert len(rows) == 2
        assert float(rows[1]["gap"]) < float(rows[0]["gap"])

    def test_converge_rejects_zero_tau(self, tmp_path, capsys):
        code, _ = run(
            tmp_path, "converge", "--a1", "10", "--a2", "12", "--taus", "1e-3,0"
        )
        assert code == 2
        assert "taus" in capsys.readouterr().err
