import json
from pathlib import Path

import numpy as np
import pytest

from implicit_online import cli

DATASETS = Path(__file__).resolve().parents[1] / "src" / "implicit_online" / "datasets"
MINI_CLASS = str(DATASETS / "mini_classification.libsvm")
MINI_REG = str(DATASETS / "mini_regression.libsvm")


def _read(path):
    with open(path, "rb") as f:
        return f.read()


def test_synthetic_small(tmp_path):
    out = str(tmp_path / "syn.csv")
    rc = cli.main(["synthetic", "--T", "10", "--out", out])
    assert rc == 0
    lines = _read(out).decode().splitlines()
    assert lines[0] == "t,algorithm,cumulative_loss"
    assert len(lines) == 1 + 10 * 4  # header + T rows per algorithm
    # cumulative loss is non-negative and non-decreasing per algorithm
    per_algo = {}
    for line in lines[1:]:
        t, algo, cum = line.split(",")
        per_algo.setdefault(algo, []).append((int(t), float(cum)))
    assert set(per_algo) == {"ogd", "adaogd", "implicit_decay", "adaimplicit"}
    for series in per_algo.values():
        ts, cums = zip(*sorted(series))
        assert ts == tuple(range(1, 11))
        assert all(c >= 0 for c in cums)
        assert all(b >= a - 1e-12 for a, b in zip(cums, cums[1:]))
    report = json.loads(_read(str(tmp_path / "syn_report.json")))
    assert report["command"] == "synthetic"
    assert report["config"]["T"] == 10
    # beta=1 run carries the certificate marked out of scope
    names = {c["name"]: c for c in report["certificates"]}
    assert not names["adaimplicit_regret"]["in_scope"]
    assert (tmp_path / "syn_plot.py").exists()


def test_synthetic_theorem_beta_certificate(tmp_path):
    out = str(tmp_path / "syn.csv")
    rc = cli.main(["synthetic", "--T", "60", "--theorem-beta", "--out", out])
    assert rc == 0
    report = json.loads(_read(str(tmp_path / "syn_report.json")))
    in_scope = [c for c in report["certificates"] if c["in_scope"] and c["name"] == "adaimplicit_regret"]
    assert in_scope and all(c["holds"] for c in in_scope)


def test_sweep_shape_and_determinism(tmp_path):
    args = [
        "sweep", "--dataset", MINI_CLASS, "--grid-points", "5", "--repeats", "2",
        "--grid-lo-exp", "-4", "--grid-hi-exp", "4", "--seed", "9",
    ]
    out1 = str(tmp_path / "a.csv")
    out2 = str(tmp_path / "b.csv")
    assert cli.main(args + ["--out", out1]) == 0
    assert cli.main(args + ["--out", out2]) == 0
    assert _read(out1) == _read(out2)
    lines = _read(out1).decode().splitlines()
    assert lines[0] == "algorithm,beta,repeat,avg_cumulative_loss"
    assert len(lines) == 1 + 4 * 5 * 2
    agg = _read(str(tmp_path / "a_aggregate.csv")).decode().splitlines()
    assert agg[0] == "algorithm,beta,mean,std"
    assert len(agg) == 1 + 4 * 5
    # aggregate means equal the mean of per-repeat values
    report = json.loads(_read(str(tmp_path / "a_report.json")))
    cells = report["cells"]
    for row in report["aggregates"]:
        vals = [c["avg_cumulative_loss"] for c in cells
                if c["algorithm"] == row["algorithm"] and c["beta"] == row["beta"]]
        assert abs(row["mean"] - float(np.mean(vals))) <= 1e-12


def test_sweep_cell_recomputes_from_trace(tmp_path):
    out = str(tmp_path / "cell.csv")
    assert cli.main(["sweep", "--dataset", MINI_CLASS, "--grid-points", "1", "--grid-lo-exp", "1",
                     "--repeats", "2", "--algo", "adaimplicit", "--seed", "5", "--out", out]) == 0
    lines = _read(out).decode().splitlines()[1:]
    from implicit_online import LearnerConfig, MirrorSetup, parse_libsvm, preprocess, run
    from implicit_online.data import losses_from_dataset, shuffle_order

    with open(MINI_CLASS) as f:
        ds = preprocess(parse_libsvm(f))
    for line in lines:
        _, beta, rep, avg = line.split(",")
        order = shuffle_order(ds.n, 5, int(rep))
        losses = losses_from_dataset(ds, order)
        trace = run(LearnerConfig(algorithm="adaimplicit", setup=MirrorSetup.unconstrained(),
                                  x_init=np.zeros(ds.d), beta=float(beta)), losses)
        recomputed = sum(rec.loss_value for rec in trace.records) / ds.n
        assert abs(float(avg) - recomputed) <= 1e-12


def test_emitted_plot_scripts_compile(tmp_path):
    out = str(tmp_path / "p.csv")
    assert cli.main(["synthetic", "--T", "5", "--out", out]) == 0
    src = (tmp_path / "p_plot.py").read_text()
    compile(src, "p_plot.py", "exec")


def test_sweep_regression_task(tmp_path):
    out = str(tmp_path / "r.csv")
    rc = cli.main(["sweep", "--dataset", MINI_REG, "--task", "regression", "--grid-points", "3",
                   "--repeats", "1", "--algo", "adaimplicit,implicit", "--out", out])
    assert rc == 0
    lines = _read(out).decode().splitlines()
    assert len(lines) == 1 + 2 * 3
    assert {l.split(",")[0] for l in lines[1:]} == {"adaimplicit", "implicit_decay"}


def test_sweep_requires_dataset(tmp_path):
    with pytest.raises(SystemExit):
        cli.main(["sweep", "--out", str(tmp_path / "x.csv")])


def test_config_file_and_flag_precedence(tmp_path):
    cfg_path = tmp_path / "run.toml"
    cfg_path.write_text('T = 25\nradius = 10.0\nbeta = 0.5\n')
    out = str(tmp_path / "c.csv")
    rc = cli.main(["synthetic", "--config", str(cfg_path), "--T", "5", "--out", out])
    assert rc == 0
    report = json.loads(_read(str(tmp_path / "c_report.json")))
    assert report["config"]["T"] == 5          # flag wins
    assert report["config"]["radius"] == 10.0  # file beats default
    assert report["config"]["beta"] == 0.5


def test_config_rejects_unknown_key(tmp_path):
    cfg_path = tmp_path / "bad.toml"
    cfg_path.write_text("horizon = 10\n")
    with pytest.raises(SystemExit, match="unknown config key"):
        cli.main(["synthetic", "--config", str(cfg_path)])


def test_algo_list_validation():
    with pytest.raises(SystemExit, match="unknown algorithm"):
        cli.main(["synthetic", "--T", "5", "--algo", "sgd"])


def test_check_quick_exit_zero(capsys, tmp_path):
    rc = cli.main(["check", "--quick", "--out", str(tmp_path / "check.json")])
    out = capsys.readouterr().out
    assert rc == 0
    assert "FAIL" not in out
    assert out.count("PASS") >= 10
    report = json.loads(_read(str(tmp_path / "check.json")))
    assert all(c["holds"] for c in report["certificates"])


def test_check_fault_injection_names_failure():
    results = cli.run_check_suite(quick=True, delta_fault=True)
    failed = [r.name for r in results if not r.ok]
    assert "delta_nonneg(adaimplicit)" in failed


def test_worker_pool_env(tmp_path, monkeypatch):
    out1 = str(tmp_path / "p1.csv")
    out2 = str(tmp_path / "p2.csv")
    args = ["sweep", "--dataset", MINI_CLASS, "--grid-points", "2", "--repeats", "2",
            "--grid-lo-exp", "0", "--grid-hi-exp", "1", "--algo", "adaimplicit"]
    assert cli.main(args + ["--out", out1]) == 0
    monkeypatch.setenv("IMPLICIT_ONLINE_THREADS", "2")
    assert cli.main(args + ["--out", out2]) == 0
    assert _read(out1) == _read(out2)
