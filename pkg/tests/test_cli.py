"""Command-line interface tests: every subcommand, the exit-code
contract (0 success, 2 validation, 3 numerical), file formats, and the
pipeline's worker-count determinism.

All invocations go through main(argv) in process; outputs land in
pytest tmp dirs.
"""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from rwre_survival import format_law, parse_law, read_curve_csv, sample_window
from rwre_survival import format_environment
from rwre_survival.cli import main

LAW_A_TEXT = """\
0.75 0 0.25 0.4
0.25 0 0.75 0.4
0.25 0.5 0.25 0.2
"""


@pytest.fixture()
def law_file(tmp_path):
    path = tmp_path / "law.txt"
    path.write_text(LAW_A_TEXT)
    return str(path)


def test_validate_reports_regime(law_file, capsys):
    assert main(["validate", "--law", law_file]) == 0
    out = capsys.readouterr().out
    assert "ellipticity_floor = 0.25" in out
    assert "regime = polynomial" in out
    assert "min_p = 0.4" in out


def test_validate_rejects_bad_law(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("1.0 0 0.0 1.0\n")
    assert main(["validate", "--law", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err


def test_validate_rejects_missing_file(tmp_path):
    assert main(["validate", "--law", str(tmp_path / "nope.txt")]) == 2


def test_construct_writes_usable_law(tmp_path):
    out = tmp_path / "constructed.txt"
    code = main(
        ["construct", "--q", "geo:0.5", "--eps", "1.0", "--n0", "1",
         "--N", "60", "--out", str(out)]
    )
    assert code == 0
    law = parse_law(out.read_text())
    assert sum(a.weight for a in law.atoms) == pytest.approx(1.0, abs=1e-12)


def test_construct_rejects_unknown_family(tmp_path):
    assert main(
        ["construct", "--q", "zeta:2", "--eps", "1.0", "--n0", "1", "--N", "9"]
    ) == 2


def test_rates_emits_closed_form_exponent(law_file, tmp_path):
    out = tmp_path / "rates.json"
    assert main(["rates", "--law", law_file, "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["regime"]["kind"] == "polynomial"
    expect = 2.0 * math.log(2.0) / math.log(3.0)
    assert abs(report["polynomial"]["exponent"] - expect) < 1e-10


def test_simulate_quenched_csv(law_file, tmp_path, law_a):
    env = sample_window(law_a, 7, -10, 10)
    env_path = tmp_path / "env.txt"
    env_path.write_text(format_environment(env))
    out = tmp_path / "quenched.csv"
    code = main(
        ["simulate-quenched", "--env", str(env_path), "--r", "0.5",
         "--n", "10", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,survival_lower,survival_upper"
    assert len(lines) == 12
    first = lines[1].split(",")
    assert float(first[1]) == 1.0 and float(first[2]) == 1.0


def test_simulate_quenched_strict_window_guard(law_file, tmp_path, law_a):
    env_path = tmp_path / "env.txt"
    env_path.write_text(format_environment(sample_window(law_a, 7, -3, 3)))
    assert main(
        ["simulate-quenched", "--env", str(env_path), "--r", "0.5", "--n", "9"]
    ) == 2


def test_simulate_annealed_requires_seed(law_file):
    assert main(
        ["simulate-annealed", "--law", law_file, "--r", "0.5",
         "--grid", "2^2..2^4", "--envs", "5"]
    ) == 2


def test_simulate_annealed_writes_curve(law_file, tmp_path):
    out = tmp_path / "curve.csv"
    code = main(
        ["simulate-annealed", "--law", law_file, "--r", "0.5",
         "--grid", "2^2..2^5", "--envs", "25", "--seed", "3",
         "--w-cap", "32", "--out", str(out)]
    )
    assert code == 0
    curve = read_curve_csv(out.read_text())
    assert list(curve.grid) == [4, 8, 16, 32]
    assert curve.seed == 3 and curve.n_envs == 25


def test_simulate_annealed_exhaustive(law_file, tmp_path):
    out = tmp_path / "exh.csv"
    code = main(
        ["simulate-annealed", "--law", law_file, "--r", "0.9",
         "--grid", "1,2,3", "--exhaustive", "--out", str(out)]
    )
    assert code == 0
    curve = read_curve_csv(out.read_text())
    # s(1) = 1 - E[w0] r = 1 - 0.1 * 0.9
    assert curve.p[0] == pytest.approx(0.91, abs=1e-12)
    assert np.all(curve.stderr == 0.0)


def test_simulate_annealed_rejects_bad_grid(law_file):
    assert main(
        ["simulate-annealed", "--law", law_file, "--r", "0.5",
         "--grid", "x..y", "--envs", "5", "--seed", "1"]
    ) == 2


def test_fit_reads_curve(law_file, tmp_path):
    curve = tmp_path / "curve.csv"
    main(
        ["simulate-annealed", "--law", law_file, "--r", "0.5",
         "--grid", "2^3..2^7", "--envs", "60", "--seed", "11",
         "--w-cap", "128", "--out", str(curve)]
    )
    out = tmp_path / "fit.json"
    assert main(
        ["fit", "--curve", str(curve), "--regime", "polynomial",
         "--out", str(out)]
    ) == 0
    fit = json.loads(out.read_text())
    assert fit["regime"] == "polynomial"
    assert fit["slope"] < 0.0
    assert fit["n_points"] >= 4


def test_fit_insufficient_points_is_numerical_error(law_file, tmp_path):
    curve = tmp_path / "curve.csv"
    main(
        ["simulate-annealed", "--law", law_file, "--r", "0.5",
         "--grid", "2^3..2^4", "--envs", "10", "--seed", "1",
         "--out", str(curve)]
    )
    assert main(["fit", "--curve", str(curve), "--regime", "polynomial"]) == 3


def test_srw_check_passes_at_moderate_size(capsys):
    assert main(["srw-check", "--l", "20", "--n", "20000"]) == 0
    out = capsys.readouterr().out
    assert "within_5pct = true" in out


def test_compare_emits_verdict(law_file, tmp_path):
    curve = tmp_path / "curve.csv"
    main(
        ["simulate-annealed", "--law", law_file, "--r", "0.5",
         "--grid", "2^3..2^8", "--envs", "80", "--seed", "42",
         "--w-cap", "256", "--out", str(curve)]
    )
    out = tmp_path / "cmp.json"
    assert main(
        ["compare", "--law", law_file, "--curve", str(curve),
         "--out", str(out)]
    ) == 0
    report = json.loads(out.read_text())
    assert report["regime"] == "polynomial"
    assert isinstance(report["pass"], bool)
    assert report["bracket"][0] < report["bracket"][1]


def test_run_pipeline_worker_determinism(law_file, tmp_path):
    """The full pipeline writes byte-identical artifacts for 1 vs 8
    workers; the manifests differ at most in their timestamps."""
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        f"law={law_file}\nr=0.5\ngrid=2^3..2^6\nenvs=30\nseed=11\nw_cap=64\n"
    )
    out1 = tmp_path / "out1"
    out8 = tmp_path / "out8"
    assert main(
        ["run", "--config", str(cfg), "--threads", "1", "--out-dir", str(out1)]
    ) == 0
    assert main(
        ["run", "--config", str(cfg), "--threads", "8", "--out-dir", str(out8)]
    ) == 0
    names = ["law.txt", "rates.json", "curve.csv", "fit.json", "compare.json"]
    for name in names:
        assert (out1 / name).read_bytes() == (out8 / name).read_bytes(), name
    m1 = json.loads((out1 / "manifest.json").read_text())
    m8 = json.loads((out8 / "manifest.json").read_text())
    m1.pop("timestamp")
    m8.pop("timestamp")
    assert m1 == m8
    assert set(m1["artifacts"]) == set(names)


def test_run_flags_override_config(law_file, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        f"law={law_file}\nr=0.5\ngrid=2^3..2^6\nenvs=10\nseed=1\nw_cap=64\n"
    )
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert main(
        ["run", "--config", str(cfg), "--out-dir", str(out_a)]
    ) == 0
    assert main(
        ["run", "--config", str(cfg), "--seed", "2", "--out-dir", str(out_b)]
    ) == 0
    ca = read_curve_csv((out_a / "curve.csv").read_text())
    cb = read_curve_csv((out_b / "curve.csv").read_text())
    assert ca.seed == 1 and cb.seed == 2
    assert not np.array_equal(ca.p, cb.p)
    ma = json.loads((out_a / "manifest.json").read_text())
    mb = json.loads((out_b / "manifest.json").read_text())
    assert ma["config_hash"] != mb["config_hash"]


def test_run_hash_ignores_execution_keys(law_file, tmp_path):
    """threads/out_dir are execution mechanics, not experiment identity."""
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        f"law={law_file}\nr=0.5\ngrid=2^3..2^6\nenvs=10\nseed=1\nw_cap=64\n"
    )
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    main(["run", "--config", str(cfg), "--threads", "1", "--out-dir", str(out_a)])
    main(["run", "--config", str(cfg), "--threads", "3", "--out-dir", str(out_b)])
    ma = json.loads((out_a / "manifest.json").read_text())
    mb = json.loads((out_b / "manifest.json").read_text())
    assert ma["config_hash"] == mb["config_hash"]


def test_run_requires_one_law_source(law_file, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("r=0.5\ngrid=2^3..2^5\nenvs=5\nseed=1\n")
    assert main(
        ["run", "--config", str(cfg), "--out-dir", str(tmp_path / "o")]
    ) == 2  # neither law nor construct
    cfg.write_text(
        f"law={law_file}\nconstruct=q=geo:0.5 eps=1.0 n0=1 N=50\n"
        "r=0.5\ngrid=2^3..2^5\nenvs=5\nseed=1\n"
    )
    assert main(
        ["run", "--config", str(cfg), "--out-dir", str(tmp_path / "o2")]
    ) == 2  # both


def test_construct_based_run(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "construct=q=explog:1,1 eps=1 n0=2 N=2000\nr=0.5\ngrid=2^2..2^7\n"
        "envs=40\nseed=4\nw_cap=128\nn_max=2000\n"
    )
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out-dir", str(out)]) == 0
    law = parse_law((out / "law.txt").read_text())
    assert len(law.atoms) > 100
    report = json.loads((out / "rates.json").read_text())
    assert report["regime"]["kind"] == "intermediate"


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
