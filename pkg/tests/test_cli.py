"""Tests for the command-line interface and its CSV contract."""

import csv
import io
import math
import os

import pytest

from hhranging.cli import (
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_PARAMETER,
    PARALLELISM_ENV,
    _parse_m_grid,
    main,
)
from hhranging.errors import ParameterError


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


class TestMGridParsing:
    def test_range_form(self):
        assert _parse_m_grid("100:500:200") == [100, 300, 500]

    def test_inclusive_endpoint(self):
        assert _parse_m_grid("1:5:2") == [1, 3, 5]

    def test_comma_form(self):
        assert _parse_m_grid("400,800,1200") == [400, 800, 1200]

    @pytest.mark.parametrize("bad", ["", "a:b:c", "10:5:1", "1:10:0", "4,x"])
    def test_rejects_malformed(self, bad):
        with pytest.raises(ParameterError):
            _parse_m_grid(bad)


class TestExponentsCommand:
    def test_header_and_d2_ratio(self, capsys):
        code, out, err = run_cli(capsys, "exponents", "--d", "2")
        assert code == EXIT_OK
        header, rows = parse_csv(out)
        assert header == [
            "d", "kappa", "n_s", "n_b", "xi_ctr", "xi_qtr", "xi_hh", "xi_hh_asym",
            "xi_cct_large_idler", "xi_cct_equal_small", "ratio_hh_ctr",
        ]
        assert float(rows[0][-1]) == 2.0

    def test_d15_ratio(self, capsys):
        code, out, _ = run_cli(capsys, "exponents", "--d", "15")
        _, rows = parse_csv(out)
        assert float(rows[0][-1]) == pytest.approx(1.32907, abs=5e-5)

    def test_round_trip_precision(self, capsys):
        code, out, _ = run_cli(capsys, "exponents", "--d", "2,7")
        _, rows = parse_csv(out)
        for row in rows:
            xi = float(row[4])
            assert repr(xi) == row[4]


class TestBoundsCommand:
    def test_first_row_formula(self, capsys):
        code, out, _ = run_cli(
            capsys, "bounds", "--d", "2", "--m-grid", "1000000,2000000"
        )
        assert code == EXIT_OK
        _, rows = parse_csv(out)
        assert int(rows[0][0]) == 1_000_000
        expected = math.log(0.5) - 2.0 * (0.01 * 0.1 / 1200.0) * 1_000_000
        assert float(rows[0][1]) == pytest.approx(expected, rel=1e-12)

    def test_prefactor_flag_off(self, capsys):
        _, out_on, _ = run_cli(capsys, "bounds", "--d", "2", "--m-grid", "1000000")
        _, out_off, _ = run_cli(
            capsys, "bounds", "--d", "2", "--m-grid", "1000000", "--no-include-prefactor"
        )
        _, on = parse_csv(out_on)
        _, off = parse_csv(out_off)
        assert float(on[0][1]) - float(off[0][1]) == pytest.approx(math.log(0.5))

    def test_log_base_10(self, capsys):
        _, out_e, _ = run_cli(capsys, "bounds", "--d", "2", "--m-grid", "1000000")
        _, out_10, _ = run_cli(
            capsys, "bounds", "--d", "2", "--m-grid", "1000000", "--log-base", "10"
        )
        _, re = parse_csv(out_e)
        _, r10 = parse_csv(out_10)
        assert float(r10[0][1]) == pytest.approx(float(re[0][1]) / math.log(10.0))
        # the ratio column is base independent
        assert float(r10[0][3]) == pytest.approx(float(re[0][3]), rel=1e-12)


class TestSimulateCommand:
    ARGS = (
        "simulate", "--d", "2", "--kappa", "0.1", "--n-s", "0.5", "--n-b", "10",
        "--m", "100", "--trials", "2048", "--seed", "5",
    )

    def test_columns_and_sanity(self, capsys):
        code, out, _ = run_cli(capsys, *self.ARGS)
        assert code == EXIT_OK
        header, rows = parse_csv(out)
        assert header == [
            "m", "trials", "errors", "p_hat", "ci_low", "ci_high",
            "log_p_hat", "log_qtr_bound",
        ]
        (row,) = rows
        assert int(row[1]) == 2048
        assert float(row[3]) == int(row[2]) / 2048
        assert float(row[4]) <= float(row[3]) <= float(row[5])

    def test_same_seed_byte_identical(self, capsys):
        _, out1, _ = run_cli(capsys, *self.ARGS)
        _, out2, _ = run_cli(capsys, *self.ARGS)
        assert out1 == out2

    def test_parallelism_env_honored(self, capsys, monkeypatch):
        _, baseline, _ = run_cli(capsys, *self.ARGS)
        monkeypatch.setenv(PARALLELISM_ENV, "3")
        _, env_run, _ = run_cli(capsys, *self.ARGS)
        assert env_run == baseline

    def test_requires_exactly_one_m_spec(self, capsys):
        code, _, err = run_cli(capsys, "simulate", "--d", "2", "--trials", "2048")
        assert code == EXIT_PARAMETER
        assert "exactly one" in err
        code, _, _ = run_cli(
            capsys, "simulate", "--d", "2", "--m", "10", "--m-grid", "10,20"
        )
        assert code == EXIT_PARAMETER


class TestWishartOracleCommand:
    def test_columns_and_agreement(self, capsys):
        code, out, _ = run_cli(
            capsys, "wishart-oracle", "--d", "2,3", "--trials", "20000"
        )
        assert code == EXIT_OK
        header, rows = parse_csv(out)
        assert header == ["d", "n_samples", "mc_mean", "mc_stderr", "closed_form", "rel_err"]
        for row in rows:
            assert abs(float(row[2]) - float(row[4])) < 4.0 * float(row[3])


class TestCtrExactCommand:
    def test_columns(self, capsys):
        code, out, _ = run_cli(capsys, "ctr-exact", "--d", "2", "--m-grid", "100,200")
        assert code == EXIT_OK
        header, rows = parse_csv(out)
        assert header == ["m", "z", "log_ctr_exact"]
        assert float(rows[1][2]) < float(rows[0][2]) < 0.0


class TestOutputFile:
    def test_atomic_write_and_crlf(self, capsys, tmp_path):
        out_path = tmp_path / "exp.csv"
        code, out, _ = run_cli(capsys, "exponents", "--d", "2", "--out", str(out_path))
        assert code == EXIT_OK
        assert out == ""
        data = out_path.read_bytes()
        assert data.count(b"\r\n") == 2
        assert [p.name for p in tmp_path.iterdir()] == ["exp.csv"]

    def test_failure_leaves_no_partial_file(self, capsys, tmp_path):
        out_path = tmp_path / "never.csv"
        code, _, _ = run_cli(
            capsys, "exponents", "--d", "1", "--out", str(out_path)
        )
        assert code == EXIT_PARAMETER
        assert not out_path.exists()
        assert list(tmp_path.iterdir()) == []


class TestConfigFile:
    def test_config_applies_and_cli_overrides(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# experiment defaults\nkappa=0.02\nn_b=300\n")
        code, out, _ = run_cli(
            capsys, "exponents", "--d", "2", "--config", str(cfg), "--kappa", "0.03"
        )
        assert code == EXIT_OK
        _, rows = parse_csv(out)
        assert float(rows[0][1]) == 0.03  # command line wins
        assert float(rows[0][3]) == 300.0  # file value applies

    def test_underscore_keys_accepted(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("n_s=0.2\ninclude_prefactor=false\n")
        code, out, _ = run_cli(
            capsys, "bounds", "--d", "2", "--m-grid", "1000000", "--config", str(cfg)
        )
        assert code == EXIT_OK
        _, rows = parse_csv(out)
        expected = -2.0 * (0.01 * 0.2 / 1200.0) * 1_000_000  # no prefactor term
        assert float(rows[0][1]) == pytest.approx(expected, rel=1e-12)

    def test_bad_config_line(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("kappa 0.02\n")
        code, _, err = run_cli(capsys, "exponents", "--d", "2", "--config", str(cfg))
        assert code == EXIT_PARAMETER
        assert "key=value" in err

    def test_missing_config(self, capsys):
        code, _, _ = run_cli(capsys, "exponents", "--d", "2", "--config", "/no/such")
        assert code == EXIT_PARAMETER


class TestExitCodes:
    def test_parameter_error(self, capsys):
        code, _, err = run_cli(capsys, "exponents", "--d", "1")
        assert code == EXIT_PARAMETER
        assert err.startswith("error:")

    def test_numerical_error_maps_to_3(self):
        assert EXIT_NUMERICAL == 3

    def test_success_is_zero(self, capsys):
        code, _, _ = run_cli(capsys, "exponents", "--d", "2")
        assert code == EXIT_OK
