import argparse
import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sincbinom import binom_gamma, sech_closed_form
from sincbinom.cli import main, parse_complex

E_PI = math.exp(-math.pi)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_process(*argv):
    return subprocess.run([sys.executable, "-m", "sincbinom", *argv], capture_output=True, text=True)


class TestParseComplex:
    @pytest.mark.parametrize("text, value", [
        ("1", 1), ("i", 1j), ("-i", -1j), ("1+2i", 1 + 2j), ("1.5-0.5i", 1.5 - 0.5j),
        ("1i", 1j), ("-2.5e-1+i", -0.25 + 1j), (".5", 0.5), ("1 + 2i", 1 + 2j),
    ])
    def test_accepts(self, text, value):
        assert parse_complex(text) == value

    @pytest.mark.parametrize("text", ["", "j", "1+", "1+2j", "abc", "1 2", "--1", "i2"])
    def test_rejects_naming_token(self, text):
        with pytest.raises(argparse.ArgumentTypeError, match="cannot parse"):
            parse_complex(text)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
    def test_round_trip(self, re_, im):
        text = f"{re_!r}{'+' if math.copysign(1, im) > 0 else '-'}{abs(im)!r}i"
        assert parse_complex(text) == complex(re_, im)


class TestEval:
    def test_integer(self, capsys):
        code, out, _ = run(capsys, "eval", "--w", "4", "--z", "2")
        data = json.loads(out)
        assert code == 0
        assert data["value"]["re"] == pytest.approx(6, rel=1e-14) and data["value"]["im"] == 0
        assert set(data) >= {"value", "abs_error_estimate", "terms_used", "method"}

    def test_sinc_series_at_zero(self, capsys):
        code, out, _ = run(capsys, "eval", "--w", "1+1i", "--z", "0", "--method", "sinc-series")
        v = json.loads(out)["value"]
        assert code == 0 and abs(complex(v["re"], v["im"]) - 1) < 1e-12

    def test_finite_sum(self, capsys):
        code, out, _ = run(capsys, "eval", "--w", "3", "--z", "0.5", "--method", "finite-sum")
        assert code == 0
        assert json.loads(out)["value"]["re"] == pytest.approx(32 / (5 * math.pi), rel=1e-14)

    def test_printed_value_round_trips(self, capsys):
        w, z = 0.3 - 1.1j, 2.7 + 0.4j
        _, out, _ = run(capsys, "eval", "--w", "0.3-1.1i", "--z", "2.7+0.4i")
        v = json.loads(out)["value"]
        assert complex(v["re"], v["im"]) == binom_gamma(w, z)

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "--format", "csv", "eval", "--w", "2", "--z", "1")
        rows = list(csv.reader(io.StringIO(out)))
        assert code == 0
        assert rows[0] == ["re", "im", "abs_err", "terms_used", "method", "converged"]
        assert float(rows[1][0]) == pytest.approx(2)

    def test_negative_imaginary_value(self, capsys):
        code, out, _ = run(capsys, "eval", "--w", "-i", "--z", "0.5")
        v = json.loads(out)["value"]
        assert code == 0 and complex(v["re"], v["im"]) == pytest.approx(binom_gamma(-1j, 0.5))

    def test_domain_error(self, capsys):
        code, _, err = run(capsys, "eval", "--w", "-2", "--z", "0.5")
        assert code == 1 and "Re(w)" in err

    def test_parse_error(self):
        proc = run_process("eval", "--w", "1+2j", "--z", "0")
        assert proc.returncode == 1 and "'1+2j'" in proc.stderr

    def test_no_convergence(self, capsys):
        code, out, err = run(capsys, "eval", "--w", "-0.95+0.5i", "--z", "0.5", "--method", "sinc-series",
                             "--tol", "1e-14", "--max-terms", "100")
        assert code == 2 and "tolerance" in err
        assert json.loads(out)["converged"] is False

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "v.json"
        code, out, _ = run(capsys, "eval", "--w", "4", "--z", "2", "--out", str(path))
        assert code == 0 and out == ""
        assert json.loads(path.read_text())["value"]["re"] == pytest.approx(6)


class TestTable:
    def test_default_grid(self, capsys):
        code, out, _ = run(capsys, "table")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0
        assert list(rows[0]) == ["x", "re", "im", "abs_err"]
        assert len(rows) == 201
        by_x = {float(r["x"]): complex(float(r["re"]), float(r["im"])) for r in rows}
        assert by_x[0.0] == pytest.approx(1, abs=1e-14)
        assert by_x[1.0] == pytest.approx(1 + 1j, abs=1e-14)
        assert abs(by_x[-2.0]) <= 1e-10 and abs(by_x[-1.0]) <= 1e-10

    def test_lattice_matches_falling_factorial(self, capsys):
        from sincbinom import binom_int_k

        _, out, _ = run(capsys, "table", "--w", "1+i", "--x-min", "0", "--x-max", "6", "--step", "0.5")
        for r in csv.DictReader(io.StringIO(out)):
            x = float(r["x"])
            if x == round(x):
                got = complex(float(r["re"]), float(r["im"]))
                assert abs(got - binom_int_k(1 + 1j, int(x))) <= 1e-12 * max(1, abs(got))

    @pytest.mark.parametrize("args", [("--x-min", "3", "--x-max", "1"), ("--step", "0"), ("--step", "-0.1")])
    def test_bad_grid(self, capsys, args):
        code, _, _ = run(capsys, "table", *args)
        assert code == 1

    def test_json(self, capsys):
        code, out, _ = run(capsys, "table", "--x-min", "0", "--x-max", "1", "--step", "0.5", "--format", "json")
        data = json.loads(out)
        assert code == 0 and [d["x"] for d in data] == [0.0, 0.5, 1.0]


class TestIntegrate:
    def test_sinc_shift(self, capsys):
        code, out, _ = run(capsys, "integrate", "--w", "2", "--kernel", "sinc-shift", "--a", "0.5")
        data = json.loads(out)
        target = 16 / (3 * math.pi)
        assert code == 0
        for route in ("series", "quadrature"):
            assert data[route]["value"]["re"] == pytest.approx(target, abs=1e-6)
        assert data["residual"] < 1e-6

    def test_rational_square(self, capsys):
        code, out, _ = run(capsys, "integrate", "--w", "1", "--kernel", "rational-square", "--alpha", "1")
        data = json.loads(out)
        assert code == 0
        assert data["series"]["value"]["re"] == pytest.approx(1.5 - E_PI / 2, abs=1e-12)
        assert data["quadrature"]["value"]["re"] == pytest.approx(1.5 - E_PI / 2, abs=1e-4)

    def test_sech(self, capsys):
        code, out, _ = run(capsys, "integrate", "--w", "1i", "--kernel", "sech", "--alpha", "1")
        data = json.loads(out)
        expected = sech_closed_form(1)
        for route in ("series", "quadrature"):
            v = data[route]["value"]
            assert abs(complex(v["re"], v["im"]) - expected) <= 1e-4

    def test_tabulated(self, capsys, tmp_path):
        xi = np.linspace(-0.5, 0.5, 101)
        path = tmp_path / "t.csv"
        rows = "\n".join(f"{x:.17g},{math.cos(math.pi * x * 0.6):.17g},{-math.sin(math.pi * x * 0.6):.17g}"
                         for x in xi)
        path.write_text("xi,re,im\n" + rows + "\n")
        # f^ = e^{-2 pi i (0.3) xi}: f = sinc(x - 0.3), integral = C(w, 0.3)
        code, out, _ = run(capsys, "integrate", "--w", "1.5", "--kernel", "tabulated", "--table", str(path))
        data = json.loads(out)
        assert code == 0
        assert data["series"]["value"]["re"] == pytest.approx(binom_gamma(1.5, 0.3).real, abs=1e-6)

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "integrate", "--w", "2", "--kernel", "sinc-shift", "--a", "0.5", "--format", "csv")
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["route", "re", "im", "abs_err"] and [r[0] for r in rows[1:]] == ["series", "quadrature"]

    def test_missing_parameter(self, capsys):
        code, _, err = run(capsys, "integrate", "--w", "1", "--kernel", "sech")
        assert code == 1 and "--alpha" in err

    def test_bad_kernel_parameter(self, capsys):
        code, _, _ = run(capsys, "integrate", "--w", "1", "--kernel", "rational-square", "--alpha", "-1")
        assert code == 1


class TestVerify:
    def test_sinc_representation(self, capsys):
        code, out, _ = run(capsys, "verify", "--identity", "sinc-representation", "--w", "6", "--z", "4")
        data = json.loads(out)
        assert code == 0 and data["pass"] is True
        assert data["lhs"]["re"] == pytest.approx(15) and data["rhs"]["re"] == pytest.approx(15)

    def test_cot_tight(self, capsys):
        code, out, _ = run(capsys, "verify", "--identity", "cot", "--w", "2", "--z", "0.25", "--tol", "1e-8")
        data = json.loads(out)
        assert code == 0 and data["tolerance"] == 1e-8 and data["pass"] is True

    def test_failure_exit_code(self, capsys):
        code, out, _ = run(capsys, "verify", "--identity", "rational-square", "--w", "1+i", "--alpha", "0.5",
                           "--tol", "1e-20")
        assert code == 3 and json.loads(out)["pass"] is False

    def test_sech(self, capsys):
        code, _, _ = run(capsys, "verify", "--identity", "sech", "--alpha", "1-0.5i")
        assert code == 0

    def test_missing_argument(self, capsys):
        code, _, err = run(capsys, "verify", "--identity", "cot", "--w", "1")
        assert code == 1 and "--z" in err

    def test_unknown_identity(self, capsys):
        code, _, _ = run(capsys, "verify", "--identity", "fermat", "--w", "1", "--z", "2")
        assert code == 1


class TestBattery:
    def test_byte_identical(self):
        a = run_process("battery", "--samples", "14", "--seed", "7")
        b = run_process("battery", "--samples", "14", "--seed", "7")
        c = run_process("battery", "--samples", "14", "--seed", "7", "--threads", "3")
        assert a.returncode == 0
        assert a.stdout == b.stdout == c.stdout
        assert len(json.loads(a.stdout)) == 14

    def test_csv(self, capsys):
        code, out, err = run(capsys, "battery", "--samples", "7", "--format", "csv")
        rows = list(csv.reader(io.StringIO(out)))
        assert code == 0 and rows[0][0] == "identity_id" and len(rows) == 8
        assert "0 failures" in err

    def test_rejects_zero(self, capsys):
        code, _, _ = run(capsys, "battery", "--samples", "0")
        assert code == 1


class TestUsage:
    def test_no_command(self):
        assert run_process().returncode == 1

    def test_unknown_flag(self):
        assert run_process("eval", "--w", "1", "--z", "0", "--bogus").returncode == 1

    def test_console_script(self):
        proc = subprocess.run(["sincbinom", "eval", "--w", "4", "--z", "2"], capture_output=True, text=True)
        assert proc.returncode == 0 and json.loads(proc.stdout)["terms_used"] == 1
