import io
import json
import shutil
import subprocess

import numpy as np
import pytest

from stablecov import (
    Explicit,
    Geometric,
    Hyperbolic,
    SpectralMeasure,
    ValidationError,
    sample_sas,
)
from stablecov.cli import parse_filter, parse_grid, parse_lags, run


def run_out(argv, tmp_path, name="out.txt"):
    path = tmp_path / name
    code = run(argv + ["--out", str(path)])
    assert code == 0, argv
    return path.read_text()


# ----------------------------------------------------------------------
# mini-language parsing
# ----------------------------------------------------------------------


def test_parse_filter_families():
    f = parse_filter("explicit:1,0.5,-0.25", 1.5)
    assert isinstance(f, Explicit) and list(f.coeffs) == [1.0, 0.5, -0.25]
    g = parse_filter("geom:base=3", 1.5)
    assert isinstance(g, Geometric) and g.base == 3.0
    assert parse_filter("geom", 1.5).base == 2.0
    h = parse_filter("hyper:beta=1.2,sign=alt,c0=zsum", 1.5)
    assert isinstance(h, Hyperbolic) and h.beta == 1.2
    h2 = parse_filter("hyper:beta=0.8,c0=2", 1.5)
    assert h2.c0 == 2.0


def test_parse_filter_rejects_bad_specs():
    for spec in ("cauchy:9", "explicit:1,zz", "hyper:sign=alt",
                 "hyper:beta=oops", "hyper:beta=1.2,order=3",
                 "geom:base=x", "hyper:beta=1.2,c0=maybe",
                 "hyper:beta=1.2,sign=random"):
        with pytest.raises(ValidationError):
            parse_filter(spec, 1.5)


def test_parse_lags():
    assert parse_lags("1:4") == [1, 2, 3, 4]
    assert parse_lags("-2:2") == [-2, -1, 0, 1, 2]
    for text in ("5", "7:3", "a:b"):
        with pytest.raises(ValidationError):
            parse_lags(text)


def test_parse_grid():
    assert parse_grid("64:512") == [64, 128, 256, 512]
    assert parse_grid("64:100") == [64, 100]
    assert parse_grid("5:5") == [5]
    for text in ("0:16", "10:5", "64"):
        with pytest.raises(ValidationError):
            parse_grid(text)


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------


def test_process_deps_row_contract(tmp_path):
    text = run_out(["process-deps", "--alpha", "1.5",
                    "--filter", "hyper:beta=1.2", "--lags", "1:128",
                    "--tol", "1e-10"], tmp_path)
    lines = text.strip().split("\n")
    assert lines[0] == "n,rho,rho_tilde,codifference,covariation,tail_bound"
    assert len(lines) == 129
    first = lines[1].split(",")
    assert first[0] == "1"
    assert all(float(v) == float(v) for v in first[1:])  # parses, not NaN


def test_process_deps_leaves_covariation_blank_below_one(tmp_path):
    text = run_out(["process-deps", "--alpha", "0.8",
                    "--filter", "explicit:1,0.5", "--lags", "0:2"],
                   tmp_path)
    for line in text.strip().split("\n")[1:]:
        assert line.split(",")[4] == ""


def test_ou_curve_contract(tmp_path):
    text = run_out(["ou", "--alpha", "1.5", "--lambda", "1.0",
                    "--tmax", "10", "--steps", "100"], tmp_path)
    lines = text.strip().split("\n")
    assert lines[0].split(",") == ["t", "rho", "rho_normalized",
                                   "codifference",
                                   "codifference_normalized", "tail_bound"]
    assert len(lines) == 101
    t0 = lines[1].split(",")
    assert float(t0[0]) == 0.0
    assert float(t0[2]) == 1.0
    assert float(t0[4]) == pytest.approx(2.0, rel=1e-15)
    assert float(lines[-1].split(",")[0]) == 10.0


def test_memory_exact_positive_example(tmp_path):
    text = run_out(["memory-exact", "--alpha", "2",
                    "--filter", "hyper:beta=0.7,sign=const",
                    "--grid", "64:16384"], tmp_path)
    doc = json.loads(text)
    assert doc["report"]["class"] == "Positive"
    assert doc["report"]["replications"] == 0
    assert len(doc["rows"]) == len(doc["report"]["n_grid"])


def test_memory_sim_seed_determinism(tmp_path):
    argv = ["memory-sim", "--alpha", "1.5", "--filter", "explicit:1",
            "--grid", "64:2048", "--replications", "50", "--seed", "7"]
    a = run_out(argv, tmp_path, "a.json")
    b = run_out(argv, tmp_path, "b.json")
    assert a == b
    c = run_out(argv[:-1] + ["8"], tmp_path, "c.json")
    assert a != c
    doc = json.loads(a)
    assert doc["report"]["replications"] == 50
    assert doc["report"]["class"] == "Zero"


def test_env_seed_fallback(tmp_path, monkeypatch):
    argv = ["memory-sim", "--alpha", "1.5", "--filter", "explicit:1",
            "--grid", "64:2048", "--replications", "30"]
    monkeypatch.setenv("STABLECOV_SEED", "7")
    via_env = run_out(argv, tmp_path, "env.json")
    monkeypatch.delenv("STABLECOV_SEED")
    via_flag = run_out(argv + ["--seed", "7"], tmp_path, "flag.json")
    assert via_env == via_flag


def test_stdout_matches_out_file(tmp_path, capsys):
    argv = ["ou", "--alpha", "1.2", "--lambda", "0.5", "--tmax", "2",
            "--steps", "5"]
    from_file = run_out(argv, tmp_path)
    assert run(argv) == 0
    assert capsys.readouterr().out == from_file


def test_memory_field_opposite_axes(tmp_path):
    text = run_out(["memory-field", "--alpha", "2",
                    "--filter-a", "hyper:beta=0.7",
                    "--filter-b", "hyper:beta=1.3,c0=zsum",
                    "--grid", "64:8192"], tmp_path)
    doc = json.loads(text)
    assert doc["report_n"]["class"] == "Positive"
    assert doc["report_m"]["class"] == "Negative"
    axes = {row["axis"] for row in doc["rows"]}
    assert axes == {"n", "m"}


def test_field_deps_grid(tmp_path):
    text = run_out(["field-deps", "--alpha", "1.5",
                    "--filter-a", "explicit:1,0.5",
                    "--filter-b", "explicit:1,-0.5",
                    "--lags-n", "0:2", "--lags-m=-1:1"], tmp_path)
    lines = text.strip().split("\n")
    assert lines[0] == "n,m,rho,rho_tilde,tail_bound"
    assert len(lines) == 1 + 3 * 3
    tildes = [float(line.split(",")[3]) for line in lines[1:]]
    assert all(abs(v) <= 1.0 for v in tildes)


def test_spectral_estimate_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    x = sample_sas(1.3, 4000, rng)
    y = sample_sas(1.3, 4000, rng)
    src = tmp_path / "samples.csv"
    np.savetxt(src, np.column_stack([x, y]), delimiter=",")
    text = run_out(["spectral-estimate", "--input", str(src)], tmp_path)
    measure = SpectralMeasure.from_csv(io.StringIO(text))
    assert 0.8 < measure.alpha < 1.8
    doc = json.loads(run_out(["spectral-estimate", "--input", str(src),
                              "--format", "json"], tmp_path, "s.json"))
    assert abs(doc["rho_tilde"]) < 0.2  # independent coordinates


def test_qcov_atoms(tmp_path):
    src = tmp_path / "atoms.csv"
    rows = [(2.0, 2.0, 0.5), (1.0, 0.0, 1.0), (0.5, 0.5, 1.0),
            (-1.0, 2.0, 0.25)]
    src.write_text("\n".join("%g,%g,%g" % r for r in rows) + "\n")
    want = sum(m * x1 * x2 / max(1.0, x1 * x1 + x2 * x2)
               for x1, x2, m in rows)
    doc = json.loads(run_out(["qcov", "--atoms", str(src)], tmp_path))
    assert doc["kappa"] == pytest.approx(want, rel=1e-15)
    assert doc["method"] == "atoms"


def test_qcov_spectral_polar(tmp_path):
    s = 2.0 ** -0.5
    gamma = SpectralMeasure([(s, s), (-s, -s)], [0.5, 0.5], 1.5)
    src = tmp_path / "gamma.csv"
    with open(src, "w") as fh:
        gamma.to_csv(fh)
    doc = json.loads(run_out(["qcov", "--spectral", str(src)], tmp_path))
    # rho of the diagonal pair is 1/2; radial constant 1/(2-a) + 1/a
    assert doc["kappa"] == pytest.approx(0.5 * (1.0 / 0.5 + 1.0 / 1.5),
                                         rel=1e-12)
    assert doc["certificate"] == 0.0


def test_qcov_needs_exactly_one_source(tmp_path):
    assert run(["qcov"]) == 2
    src = tmp_path / "x.csv"
    src.write_text("1,1,1\n")
    assert run(["qcov", "--atoms", str(src), "--spectral", str(src)]) == 2


def test_experiment_zero_sum_decay(tmp_path):
    doc = json.loads(run_out(["experiment", "zero-sum-decay",
                              "--beta", "1.25"], tmp_path))
    assert doc["experiment"] == "zero-sum-decay"
    assert doc["slope"] == pytest.approx(1.5 - 1.25, abs=0.05)
    assert doc["replications"] == 0
    assert "conjecture" in doc["note"]


def test_experiment_sign_pattern(tmp_path):
    doc = json.loads(run_out(["experiment", "sign-pattern",
                              "--beta", "0.75", "--pattern", "+-",
                              "--length", "8192"], tmp_path))
    assert "+-" in doc["note"]
    assert len(doc["rows"]) >= 6
    assert run(["experiment", "sign-pattern", "--beta", "0.75",
                "--pattern", "+x-"]) == 2


def test_exit_codes(tmp_path):
    # validation: nonsense filter and out-of-range alpha
    assert run(["process-deps", "--alpha", "1.5", "--filter", "cauchy:9",
                "--lags", "1:4"]) == 2
    assert run(["process-deps", "--alpha", "2.5", "--filter", "explicit:1",
                "--lags", "1:4"]) == 2
    # numerical: unreachable tolerance on a slowly decaying tail
    assert run(["memory-exact", "--alpha", "1.5",
                "--filter", "hyper:beta=1.2", "--grid", "64:2048",
                "--tol", "1e-18"]) == 1


def test_tol_halving_stays_within_certificate(tmp_path):
    argv = ["process-deps", "--alpha", "1.5", "--filter", "hyper:beta=1.2",
            "--lags", "1:16"]
    loose = run_out(argv + ["--tol", "1e-6"], tmp_path, "loose.csv")
    tight = run_out(argv + ["--tol", "5e-7"], tmp_path, "tight.csv")
    for row_a, row_b in zip(loose.strip().split("\n")[1:],
                            tight.strip().split("\n")[1:]):
        a = row_a.split(",")
        b = row_b.split(",")
        cert = float(a[5]) + float(b[5])
        for col in (1, 2, 3, 4):
            assert abs(float(a[col]) - float(b[col])) <= cert


@pytest.mark.skipif(shutil.which("stablecov") is None,
                    reason="console script not on PATH")
def test_console_script_runs():
    proc = subprocess.run(
        ["stablecov", "ou", "--alpha", "2", "--lambda", "1",
         "--tmax", "1", "--steps", "3"],
        capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert proc.stdout.startswith("t,rho,")
