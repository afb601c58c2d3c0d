import json
from pathlib import Path

import numpy as np
import pytest

from whmc.cli import main


def run_cli(*argv):
    return main(list(argv))


def write_config(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


def estimate_config(out, **overrides):
    cfg = {
        "model": {"type": "brownian"},
        "functional": {"kind": "indicator_cdf", "u": 1.0, "t": 4.0, "s": 4.0},
        "method": {"type": "whmc", "n": 32, "m": 2000},
        "rng": {"seed": 11, "workers": 2},
        "output": {"path": str(out), "format": "json"},
    }
    cfg.update(overrides)
    return cfg


BETA_MODEL = {
    "type": "beta", "c1": 1.0, "alpha1": 1.0, "beta1": 1.0, "lambda1": 1.0,
    "c2": 1.0, "alpha2": 2.0, "beta2": 1.0, "lambda2": 1.0,
}


class TestEstimate:
    def test_minimal_run_writes_report(self, tmp_path):
        out = tmp_path / "report.json"
        cfg = write_config(tmp_path, estimate_config(out))
        assert run_cli("estimate", "--config", str(cfg)) == 0
        payload = json.loads(out.read_text())
        assert 0.0 <= payload["value"] <= 1.0
        assert payload["steps_consumed"] == 2000 * 32

    def test_same_seed_reproduces_bytes(self, tmp_path):
        out1 = tmp_path / "a.json"
        out2 = tmp_path / "b.json"
        cfg1 = write_config(tmp_path, estimate_config(out1), "c1.json")
        cfg2 = write_config(tmp_path, estimate_config(out2), "c2.json")
        assert run_cli("estimate", "--config", str(cfg1)) == 0
        assert run_cli("estimate", "--config", str(cfg2)) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_seed_flag_overrides(self, tmp_path):
        out1 = tmp_path / "a.json"
        out2 = tmp_path / "b.json"
        cfg = write_config(tmp_path, estimate_config(out1))
        assert run_cli("estimate", "--config", str(cfg)) == 0
        assert run_cli("estimate", "--config", str(cfg), "--seed", "99", "--out", str(out2)) == 0
        assert out1.read_bytes() != out2.read_bytes()

    def test_missing_functional_field_is_config_error(self, tmp_path, capsys):
        cfg_payload = estimate_config(tmp_path / "x.json")
        del cfg_payload["functional"]["u"]
        cfg = write_config(tmp_path, cfg_payload)
        assert run_cli("estimate", "--config", str(cfg)) == 2
        assert "functional.u" in capsys.readouterr().err

    def test_missing_seed_is_config_error(self, tmp_path, capsys):
        cfg_payload = estimate_config(tmp_path / "x.json")
        del cfg_payload["rng"]["seed"]
        cfg = write_config(tmp_path, cfg_payload)
        assert run_cli("estimate", "--config", str(cfg)) == 2
        assert "rng.seed" in capsys.readouterr().err

    def test_numeric_error_exit_code(self, tmp_path, capsys):
        model = dict(BETA_MODEL, c1=0.0)  # valid density, but no root ladder
        cfg_payload = estimate_config(tmp_path / "x.json", model=model)
        cfg_payload["functional"] = {"kind": "first_passage_time", "u": 1.0, "t": 1.0}
        cfg = write_config(tmp_path, cfg_payload)
        assert run_cli("estimate", "--config", str(cfg)) == 3

    def test_mlmc_method(self, tmp_path):
        out = tmp_path / "ml.json"
        cfg_payload = estimate_config(out, model=dict(BETA_MODEL))
        cfg_payload["functional"] = {"kind": "first_passage_time", "u": 1.0, "t": 1.0}
        cfg_payload["method"] = {"type": "mlmc", "n0": 8, "m_per_level": [2000, 400, 100]}
        cfg = write_config(tmp_path, cfg_payload)
        assert run_cli("estimate", "--config", str(cfg)) == 0
        payload = json.loads(out.read_text())
        assert len(payload["levels"]) == 3

    def test_plain_method(self, tmp_path):
        out = tmp_path / "plain.json"
        cfg_payload = estimate_config(out)
        cfg_payload["method"] = {"type": "plain", "h": 0.05, "m": 2000}
        cfg = write_config(tmp_path, cfg_payload)
        assert run_cli("estimate", "--config", str(cfg)) == 0
        assert 0.0 <= json.loads(out.read_text())["value"] <= 1.0


class TestFptimeCdf:
    def cfg(self, tmp_path, out, points=40):
        return write_config(
            tmp_path,
            {
                "model": {"type": "brownian"},
                "cdf": {"u": 2.0, "t": 50.0, "n": 32, "m": 3000, "grid_points": points},
                "rng": {"seed": 5, "workers": 1},
                "output": {"path": str(out)},
            },
        )

    def test_columns_and_monotone_analytic(self, tmp_path):
        out = tmp_path / "cdf.csv"
        assert run_cli("fptime-cdf", "--config", str(self.cfg(tmp_path, out))) == 0
        header, rows = _read_csv(out)
        assert header == ["time", "analytic", "whmc", "plain", "whmc_abs_error", "plain_abs_error"]
        analytic = [float(r[1]) for r in rows]
        assert all(b >= a for a, b in zip(analytic, analytic[1:]))
        assert (tmp_path / "cdf.png").exists()

    def test_empty_grid_rejected(self, tmp_path, capsys):
        out = tmp_path / "cdf.csv"
        assert run_cli("fptime-cdf", "--config", str(self.cfg(tmp_path, out, points=0))) == 2
        assert "cdf.grid_points" in capsys.readouterr().err

    def test_no_plot_flag(self, tmp_path):
        out = tmp_path / "cdf.csv"
        assert run_cli("fptime-cdf", "--config", str(self.cfg(tmp_path, out)), "--no-plot") == 0
        assert not (tmp_path / "cdf.png").exists()

    def test_byte_identical_rerun_including_figure(self, tmp_path):
        out = tmp_path / "cdf.csv"
        cfg = self.cfg(tmp_path, out)
        assert run_cli("fptime-cdf", "--config", str(cfg)) == 0
        first_csv = out.read_bytes()
        first_png = (tmp_path / "cdf.png").read_bytes()
        assert run_cli("fptime-cdf", "--config", str(cfg)) == 0
        assert out.read_bytes() == first_csv
        assert (tmp_path / "cdf.png").read_bytes() == first_png


class TestRateStudy:
    def cfg(self, tmp_path, out, lo=4, hi=5):
        return write_config(
            tmp_path,
            {
                "model": BETA_MODEL,
                "rate_study": {"u": 1.0, "t": 1.0, "level_min": lo, "level_max": hi, "m": 300},
                "rng": {"seed": 5, "workers": 1},
                "output": {"path": str(out)},
            },
        )

    def test_one_row_per_level_with_four_mse_columns(self, tmp_path):
        out = tmp_path / "rate.csv"
        assert run_cli("rate-study", "--config", str(self.cfg(tmp_path, out))) == 0
        header, rows = _read_csv(out)
        assert len(rows) == 2
        assert sum(c.startswith("mse_") for c in header) == 4
        assert (tmp_path / "rate.png").exists()

    def test_single_level_leaves_slope_blank(self, tmp_path):
        out = tmp_path / "rate.csv"
        assert run_cli("rate-study", "--config", str(self.cfg(tmp_path, out, 4, 4)), "--no-plot") == 0
        header, rows = _read_csv(out)
        slope_cols = [k for k, c in enumerate(header) if c.startswith("slope_")]
        assert all(rows[0][k] == "" for k in slope_cols)


class TestGerberShiu:
    def cfg(self, tmp_path, out, q=1.0):
        return write_config(
            tmp_path,
            {
                "model": BETA_MODEL,
                "gerber_shiu": {
                    "u": 0.1, "y": 0.05, "q": q, "t": 2.0,
                    "n_exp_min": 4, "n_exp_max": 6, "m": 400,
                },
                "rng": {"seed": 5, "workers": 1},
                "output": {"path": str(out)},
            },
        )

    def test_step_counts_are_powers_of_two(self, tmp_path):
        out = tmp_path / "gs.csv"
        assert run_cli("gerber-shiu", "--config", str(self.cfg(tmp_path, out))) == 0
        _, rows = _read_csv(out)
        ns = [int(r[0]) for r in rows]
        assert ns == [16, 32, 64]
        assert (tmp_path / "gs.png").exists()

    def test_nonpositive_discount_rejected(self, tmp_path, capsys):
        out = tmp_path / "gs.csv"
        assert run_cli("gerber-shiu", "--config", str(self.cfg(tmp_path, out, q=-1.0))) == 2
        assert "gerber_shiu.q" in capsys.readouterr().err


class TestCsvRoundTrip:
    def test_numeric_cells_round_trip_losslessly(self, tmp_path):
        out = tmp_path / "rate.csv"
        cfg = TestRateStudy().cfg(tmp_path, out)
        assert run_cli("rate-study", "--config", str(cfg), "--no-plot") == 0
        from whmc.estimators import level_mse_study

        rows = level_mse_study(
            json_model(), 1.0, 1.0, [4, 5], 300, 5, workers=1
        )
        _, csv_rows = _read_csv(out)
        for row, csv_row in zip(rows, csv_rows):
            assert float(csv_row[4]) == row.mse["time"]
            assert float(csv_row[6]) == row.mse["overshoot"]


def json_model():
    from whmc import BetaFamily, BetaFamilyParams

    return BetaFamily(
        BetaFamilyParams(
            c1=1.0, alpha1=1.0, beta1=1.0, lambda1=1.0,
            c2=1.0, alpha2=2.0, beta2=1.0, lambda2=1.0,
        )
    )


def _read_csv(path):
    lines = Path(path).read_text().splitlines()
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]
