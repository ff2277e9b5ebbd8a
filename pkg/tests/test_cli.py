import csv
import io
import json
import math
import subprocess
import sys

import pytest
from numpy.testing import assert_allclose

from bchubbard.cli import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestPhase:
    def test_single_point(self, capsys):
        code, out, _ = run(capsys, "phase", "--u-range", "0", "0", "--mu-range", "0", "0", "--grid", "1")
        assert code == EXIT_OK
        rows = rows_csv(out)
        assert len(rows) == 1
        assert rows[0]["phase"] == "II"
        assert out.splitlines()[0] == "u,mu,phase,n_s,n_d,energy,odlro"

    def test_region_two_only_on_zero_line(self, capsys):
        code, out, _ = run(capsys, "phase", "--u-range", "-6", "6", "--mu-range", "-4", "4", "--grid", "13", "9")
        assert code == EXIT_OK
        rows = rows_csv(out)
        assert len(rows) == 13 * 9
        assert all(float(r["mu"]) == 0.0 for r in rows if r["phase"] == "II")
        assert any(r["phase"] == "II" for r in rows)

    def test_json_matches_csv(self, capsys):
        args = ("phase", "--u-range", "-5", "5", "--mu-range", "-1", "1", "--grid", "4", "3")
        _, text, _ = run(capsys, *args)
        _, js, _ = run(capsys, *args, "--format", "json")
        payload = json.loads(js)
        assert payload["command"] == "phase"
        assert payload["columns"] == text.splitlines()[0].split(",")
        for c_row, j_row in zip(rows_csv(text), payload["rows"]):
            for key, value in j_row.items():
                if isinstance(value, float):
                    assert float(c_row[key]) == value
                else:
                    assert c_row[key] == str(value)

    def test_seventeen_digits(self, capsys):
        _, out, _ = run(capsys, "phase", "--u-range", "1", "1", "--mu-range", "-1", "-1", "--grid", "1")
        energy = rows_csv(out)[0]["energy"]
        assert len(energy.lstrip("-").replace(".", "").lstrip("0")) == 17

    def test_bad_grid(self, capsys):
        code, _, _ = run(capsys, "phase", "--u-range", "0", "1", "--mu-range", "0", "0", "--grid", "1")
        assert code == EXIT_USAGE


class TestScan:
    def test_region_one(self, capsys):
        code, out, _ = run(capsys, "scan", "--region", "I", "--axis", "mu", "--range", "-3", "-1", "--points", "3",
                           "--u", "4", "--r", "1", "2")
        assert code == EXIT_OK
        rows = rows_csv(out)
        assert len(rows) == 6
        nodal = [r for r in rows if r["r"] == "2" and float(r["value"]) == -2.0][0]
        assert float(nodal["discord"]) == 0.0

    def test_region_mismatch_exit_code(self, capsys):
        code, _, err = run(capsys, "scan", "--region", "I", "--axis", "mu", "--range", "-1", "1", "--points", "3",
                           "--u", "4")
        assert code == EXIT_DOMAIN
        assert "region" in err

    def test_unknown_region(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["scan", "--region", "V", "--axis", "mu", "--range", "-1", "0", "--u", "4"])
        assert exc.value.code == EXIT_USAGE

    def test_region_three(self, capsys):
        code, out, _ = run(capsys, "scan", "--region", "III", "--axis", "n_d", "--range", "0.1", "0.5", "--points", "5")
        assert code == EXIT_OK
        q = [float(r["discord"]) for r in rows_csv(out)]
        assert all(b > a for a, b in zip(q, q[1:]))

    def test_fits_written(self, capsys, tmp_path):
        out_path = tmp_path / "scan.csv"
        code, _, _ = run(capsys, "scan", "--region", "I", "--axis", "mu", "--approach", "0", "-1", "--u", "4",
                         "--fit", "0", "--out", str(out_path))
        assert code == EXIT_OK
        fits = rows_csv((tmp_path / "scan.fits.csv").read_text())
        q_alg = [f for f in fits if f["measure"] == "Q" and f["model"] == "algebraic"][0]
        assert_allclose(float(q_alg["exponent_or_slope"]), -0.5, atol=0.05)

    def test_fits_in_json(self, capsys):
        code, out, _ = run(capsys, "scan", "--region", "I", "--axis", "mu", "--approach", "0", "-1", "--u", "4",
                           "--fit", "0", "--format", "json")
        assert code == EXIT_OK
        payload = json.loads(out)
        assert len(payload["fits"]) == 6
        assert payload["rows"][0]["d_discord"] is None


class TestKspace:
    def test_iso_correlation(self, capsys):
        code, out, _ = run(capsys, "kspace", "--axis", "u", "--range", "-3", "3", "--points", "7", "--n", "1")
        assert code == EXIT_OK
        assert all(float(r["discord"]) == 0.5 for r in rows_csv(out))

    def test_phase_four(self, capsys):
        code, out, _ = run(capsys, "kspace", "--region", "IV", "--axis", "u", "--range", "5", "6", "--points", "3",
                           "--n", "1")
        assert code == EXIT_OK
        assert all(float(r["discord"]) == 0.0 for r in rows_csv(out))


class TestMonogamy:
    def test_eta_decreasing(self, capsys):
        code, out, _ = run(capsys, "monogamy", "--family", "eta", "--L-range", "3", "40", "--N-d", "1")
        assert code == EXIT_OK
        R = [float(r["ratio"]) for r in rows_csv(out)]
        assert len(R) == 38
        assert all(b < a for a, b in zip(R, R[1:]))

    def test_eta_half(self, capsys):
        code, out, _ = run(capsys, "monogamy", "--family", "eta", "--L-range", "3", "30", "--half")
        assert code == EXIT_OK
        assert all(r["violated"] == "true" for r in rows_csv(out))

    def test_region_one(self, capsys):
        code, out, _ = run(capsys, "monogamy", "--family", "region1", "--mu-range", "-0.4", "-0.05", "--points", "3",
                           "--r-max", "500")
        assert code == EXIT_OK
        rows = rows_csv(out)
        assert rows[0]["violated"] == "false" and rows[-1]["violated"] == "true"

    def test_invalid_family_parameters(self, capsys):
        code, _, _ = run(capsys, "monogamy", "--family", "eta", "--L-range", "2", "5", "--N-d", "1")
        assert code == EXIT_DOMAIN


class TestCommon:
    def test_deterministic_bytes(self, capsys, tmp_path):
        args = ["scan", "--region", "II", "--axis", "u", "--range", "-1", "1", "--points", "3", "--n", "1",
                "--samples", "500", "--seed", "3"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(a)]) == EXIT_OK
        assert main(args + ["--out", str(b)]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_config_and_precedence(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"u_range": [0, 0], "mu_range": [0, 0], "grid": [1], "format": "json"}))
        code, out, _ = run(capsys, "phase", "--config", str(cfg))
        assert code == EXIT_OK
        assert json.loads(out)["rows"][0]["phase"] == "II"
        code, out, _ = run(capsys, "phase", "--config", str(cfg), "--mu-range", "0.5", "0.5")
        assert json.loads(out)["rows"][0]["phase"] == "I'"
        code, out, _ = run(capsys, "phase", "--config", str(cfg), "--format", "csv")
        assert out.startswith("u,mu,")

    def test_config_unknown_key(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"colour": "red"}))
        code, _, _ = run(capsys, "phase", "--config", str(cfg))
        assert code == EXIT_USAGE

    def test_config_missing(self, capsys, tmp_path):
        code, _, _ = run(capsys, "phase", "--config", str(tmp_path / "none.json"))
        assert code == EXIT_USAGE

    def test_no_subcommand(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == EXIT_USAGE

    def test_bad_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["phase", "--bogus"])
        assert exc.value.code == EXIT_USAGE

    def test_verify_report(self, capsys):
        code, out, err = run(capsys, "verify", "--suite", "monogamy")
        assert code in (EXIT_OK, EXIT_VERIFY)
        rows = rows_csv(out)
        assert [r["criterion"] for r in rows] == ["8"]
        assert (code == EXIT_OK) == (rows[0]["passed"] == "true")
        assert "criterion" in err

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "bchubbard", "phase", "--u-range", "0", "0", "--mu-range", "0", "0", "--grid", "1"],
            capture_output=True, text=True, check=False,
        )
        assert proc.returncode == 0
        assert proc.stdout.splitlines()[1].startswith("0,0,II")
        assert not math.isnan(float(proc.stdout.splitlines()[1].split(",")[3]))
