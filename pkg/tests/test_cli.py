import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elliptic_rmatrix import cli
from elliptic_rmatrix.kernels import g0
from elliptic_rmatrix.theta import EllipticParams


# --- complex literal round-trips --------------------------------------------


@pytest.mark.parametrize(
    "text,value",
    [
        ("0.3", 0.3 + 0j),
        ("-2", -2 + 0j),
        ("i", 1j),
        ("-i", -1j),
        ("0.3-0.2i", 0.3 - 0.2j),
        ("-0.4i", -0.4j),
        ("1e-3+2.5e-1i", 0.001 + 0.25j),
        (" 0.3 - 0.2 i ", 0.3 - 0.2j),
    ],
)
def test_parse_complex_forms(text, value):
    assert cli.parse_complex(text) == value


def test_parse_complex_rejects_junk():
    for bad in ("", "abc", "0.3+0.2k"):
        with pytest.raises(ValueError):
            cli.parse_complex(bad)


@given(re_=st.floats(-1e6, 1e6), im=st.floats(-1e6, 1e6))
@settings(max_examples=80, deadline=None)
def test_format_parse_round_trip(re_, im):
    z = complex(re_, im)
    assert cli.parse_complex(cli.format_complex(z)) == z


# --- eval --------------------------------------------------------------------


def test_eval_scalar_json(capsys):
    code = cli.run(
        ["eval", "--kernel", "g0", "--w", "0.3-0.2i", "--tau", "0.9i"]
    )
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["kernel"] == "g0"
    got = cli.parse_complex(out["value"])
    assert abs(got - g0(0.3 - 0.2j, EllipticParams(0.9j))) < 1e-15


def test_eval_scalar_csv(capsys):
    code = cli.run(
        ["eval", "--kernel", "theta", "--u", "0.3", "--tau", "0.9i",
         "--output", "csv"]
    )
    lines = capsys.readouterr().out.strip().splitlines()
    assert code == 0
    assert lines[0] == "kernel,u,tau,value_re,value_im"
    assert len(lines) == 2
    cells = lines[1].split(",")
    assert cells[0] == "theta"
    float(cells[-1])  # numeric columns parse
    float(cells[-2])


def test_eval_matrix_csv_has_sixteen_entries(capsys):
    code = cli.run(
        ["eval", "--kernel", "r_elliptic", "--u", "0.4", "--v", "0.1",
         "--lambda", "0.2-0.1i", "--tau", "0.9i", "--output", "csv"]
    )
    lines = capsys.readouterr().out.strip().splitlines()
    assert code == 0
    assert len(lines) == 17  # header + 4x4 entries
    assert lines[0].endswith("row,col,value_re,value_im")


def test_eval_missing_argument_is_usage_error(capsys):
    code = cli.run(["eval", "--kernel", "g_lambda", "--w", "0.3", "--tau", "0.9i"])
    err = capsys.readouterr().err
    assert code == 2
    assert "error:" in err
    assert "lambda" in err


def test_eval_domain_error_is_usage_error(capsys):
    # psi_mu out of zone
    code = cli.run(
        ["eval", "--kernel", "psi_mu", "--w", "0.3-0.2i", "--mu", "1.4",
         "--eta", "1"]
    )
    assert code == 2
    assert "zone" in capsys.readouterr().err


def test_eval_truncation_cap_reported(capsys):
    code = cli.run(
        ["eval", "--kernel", "theta", "--u", "0.3", "--tau", "0.01i",
         "--truncation", "8"]
    )
    assert code == 2
    assert "error:" in capsys.readouterr().err


# --- verify -------------------------------------------------------------------


def test_verify_list_suites(capsys):
    code = cli.run(["verify", "--list-suites"])
    out = capsys.readouterr().out.strip().splitlines()
    assert code == 0
    assert len(out) == 15
    names = {line.split(":")[0] for line in out}
    assert "fay" in names and "cdybe" in names


def test_verify_suite_passes_and_is_deterministic(capsys):
    args = ["verify", "--suite", "fay", "--samples", "5", "--seed", "3"]
    assert cli.run(args) == 0
    first = capsys.readouterr().out
    assert cli.run(args) == 0
    second = capsys.readouterr().out
    assert first == second  # byte-identical report for the same seed
    report = json.loads(first)
    assert report["passed"] is True
    assert report["samples"] == 5
    assert report["failures"] == []


def test_verify_failure_sets_exit_one(capsys):
    code = cli.run(
        ["verify", "--suite", "fay", "--samples", "3", "--tol", "1e-20"]
    )
    out = json.loads(capsys.readouterr().out)
    assert code == 1
    assert out["passed"] is False
    assert len(out["failures"]) == 3


def test_verify_requires_a_suite(capsys):
    assert cli.run(["verify"]) == 2


def test_verify_csv_single_row(capsys):
    code = cli.run(
        ["verify", "--suite", "duality", "--samples", "4", "--output", "csv"]
    )
    lines = capsys.readouterr().out.strip().splitlines()
    assert code == 0
    assert lines[0].startswith("suite,samples,seed,")
    assert len(lines) == 2
    assert lines[1].split(",")[-1] == "True"


# --- degenerate ----------------------------------------------------------------


def test_degenerate_case_b_fitted_rate(capsys):
    code = cli.run(
        ["degenerate", "--case", "b", "--scales", "1.5,2,2.5,3"]
    )
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    rates = {row["kernel_id"]: row["fitted_rate"] for row in out["rows"]}
    # log-linear in T with slope -2*pi
    for rate in rates.values():
        assert abs(rate - (-2 * np.pi)) < 0.5


def test_degenerate_case_a_fitted_rate(capsys):
    code = cli.run(["degenerate", "--case", "a", "--scales", "10,20,40,80"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    for row in out["rows"]:
        assert abs(row["fitted_rate"] - (-2.0)) < 0.4


def test_degenerate_case_c_monotone(capsys):
    code = cli.run(
        ["degenerate", "--case", "c", "--scales", "10,20,40", "--output", "csv"]
    )
    lines = capsys.readouterr().out.strip().splitlines()
    assert code == 0
    errs = {}
    for line in lines[1:]:
        scale, kernel_id, err, _ = line.split(",")
        errs.setdefault(kernel_id, []).append(float(err))
    for seq in errs.values():
        assert seq == sorted(seq, reverse=True)  # strictly improving ladder


def test_degenerate_rejects_unsorted_ladder(capsys):
    code = cli.run(["degenerate", "--case", "a", "--scales", "40,10"])
    assert code == 2
    assert "increasing" in capsys.readouterr().err


# --- average -------------------------------------------------------------------


def test_average_residuals_decrease(capsys):
    code = cli.run(
        ["average", "--identity", "avctg-p", "--n-list", "5,10,20"]
    )
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    errs = [row["residual"] for row in out["rows"]]
    assert errs[0] > errs[-1]
    assert errs[-1] < 1e-9


def test_average_rational_paired_vs_plain(capsys):
    base = ["average", "--identity", "rational-to-trig", "--n-list", "100,400"]
    assert cli.run(base) == 0
    paired = json.loads(capsys.readouterr().out)["rows"]
    assert cli.run(base + ["--tail-mode", "plain"]) == 0
    plain = json.loads(capsys.readouterr().out)["rows"]
    assert paired[-1]["residual"] < 1e-6
    assert plain[-1]["residual"] > 10 * paired[-1]["residual"]


def test_average_out_of_band_lambda_is_usage_error(capsys):
    code = cli.run(
        ["average", "--identity", "avctg-p", "--n-list", "5,10",
         "--lambda", "0.3+0.2i"]
    )
    assert code == 2
    assert "lambda" in capsys.readouterr().err.lower()


def test_average_rejects_bad_n_list(capsys):
    code = cli.run(
        ["average", "--identity", "avctg", "--n-list", "7"]
    )
    assert code == 2


# --- installed entry point -------------------------------------------------


def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "elliptic_rmatrix.cli", "eval", "--kernel",
         "phi", "--w", "0.3-0.2i"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    out = json.loads(proc.stdout)
    assert cli.parse_complex(out["value"]) == 1.0 / (0.3 - 0.2j)
