import json
from pathlib import Path

import pytest

from hyperlab.cli import c_grid, main
from hyperlab.errors import MEMCAP_ENV
from hyperlab.model import Params
from hyperlab.statistics import exact_expected_ds, p_from_c, CnParameterization

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def data_lines(text):
    return [ln for ln in text.splitlines() if not ln.startswith("#")]


def summary(text):
    keys, values = [ln[2:].split(",") for ln in text.splitlines() if ln.startswith("# ")]
    return dict(zip(keys, values))


def test_hitting_golden(capsys):
    code, out, _ = run(capsys, "hitting", "--n", 3, "--k", 3, "--j", 2, "--trials", 5, "--seed", 1, "--threads", 1)
    assert code == 0
    assert out == (GOLDEN / "hitting_n3_k3_j2_t5_s1.csv").read_text()


def test_hitting_rows(capsys):
    code, out, _ = run(capsys, "hitting", "--n", 14, "--k", 3, "--j", 2, "--trials", 30, "--seed", 4, "--threads", 1)
    assert code == 0
    lines = data_lines(out)
    assert lines[0] == "trial,seed,tau_i,tau_c,equal"
    for ln in lines[1:]:
        trial, seed, ti, tc, eq = map(int, ln.split(","))
        assert seed == 4 + trial
        assert ti <= tc
        assert eq == (ti == tc)
    s = summary(out)
    assert float(s["ci_low"]) <= float(s["point"]) <= float(s["ci_high"])


def test_threads_do_not_change_output(capsys):
    argv = ["hitting", "--n", 10, "--k", 3, "--j", 1, "--trials", 16, "--seed", 2]
    _, serial, _ = run(capsys, *argv, "--threads", 1)
    _, pooled, _ = run(capsys, *argv, "--threads", 2)
    assert serial == pooled


def test_degree_dist_summary(capsys):
    code, out, _ = run(capsys, "degree-dist", "--n", 20, "--k", 3, "--j", 1, "--s", 1, "--c", 0.5,
                       "--trials", 50, "--seed", 3, "--threads", 1)
    assert code == 0
    assert data_lines(out)[0] == "trial,D_s"
    assert len(data_lines(out)) == 51
    s = summary(out)
    assert list(s) == ["mean", "exact_expectation", "limit_lambda", "tv_to_poisson"]
    params = Params(20, 3, 1)
    exact = exact_expected_ds(params, p_from_c(params, CnParameterization(1, 0.5)), 1)
    assert float(s["exact_expectation"]) == pytest.approx(exact, rel=1e-12)


def test_degree_dist_large_c_empties_d0(capsys):
    code, out, _ = run(capsys, "degree-dist", "--n", 30, "--k", 3, "--j", 1, "--s", 0, "--c", 40,
                       "--trials", 100, "--seed", 3, "--threads", 1)
    assert code == 0
    assert float(summary(out)["mean"]) < 0.05


@pytest.mark.parametrize("extra", [["--trials", 0], ["--trials", 5, "--c", -50]])
def test_degree_dist_usage_errors(capsys, extra):
    argv = ["degree-dist", "--n", 30, "--k", 3, "--j", 1, "--s", 0, "--c", 0, "--seed", 1, *extra]
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_sweep_output_and_single_point(capsys):
    base = ["sweep", "--n", 20, "--k", 3, "--j", 1, "--trials", 40, "--seed", 5, "--threads", 1]
    code, out, _ = run(capsys, *base, "--c-from", -1, "--c-to", 2, "--c-step", 0.5)
    assert code == 0
    lines = data_lines(out)
    assert lines[0] == "c,trials,frac_no_isolated,frac_connected"
    assert len(lines) == 8
    for ln in lines[1:]:
        _, _, no_iso, conn = map(float, ln.split(","))
        assert conn <= no_iso
    _, single, _ = run(capsys, *base, "--c-from", 0.5, "--c-to", 0.5, "--c-step", 1)
    assert data_lines(single)[1] == lines[4]


def test_sweep_uniform_model(capsys):
    code, out, _ = run(capsys, "sweep", "--n", 20, "--k", 3, "--j", 1, "--trials", 20, "--seed", 5,
                       "--c-from", 0, "--c-to", 1, "--c-step", 1, "--model", "uniform", "--threads", 1)
    assert code == 0 and len(data_lines(out)) == 3


@pytest.mark.parametrize("grid", [(1, 0, 0.5), (0, 1, 0), (0, 1, -1)])
def test_sweep_empty_grid(capsys, grid):
    code, _, _ = run(capsys, "sweep", "--n", 20, "--k", 3, "--j", 1, "--trials", 5, "--seed", 5,
                     "--c-from", grid[0], "--c-to", grid[1], "--c-step", grid[2])
    assert code == 2


def test_c_grid():
    assert c_grid(-4, 4, 1) == [-4, -3, -2, -1, 0, 1, 2, 3, 4]
    assert c_grid(0, 0.3, 0.1) == [0, 0.1, 0.2, 0.3]


def test_transfer_command(capsys):
    code, out, _ = run(capsys, "transfer", "--n", 20, "--k", 3, "--j", 1, "--c", 1, "--trials", 30,
                       "--seed", 0, "--threads", 1)
    assert code == 0
    assert data_lines(out)[0] == "model,trials,frac_no_isolated,frac_connected"
    assert "M" in summary(out)


def test_oracle_check_default(capsys):
    code, out, _ = run(capsys, "oracle-check", "--threads", 1)
    assert code == 0
    assert out.splitlines() == ["instances,max_n,mismatches", "1000,12,0"]


def test_oracle_check_mismatch_exit(capsys, monkeypatch):
    from hyperlab import experiments

    monkeypatch.setattr(experiments, "bfs_j_components", lambda h: [(-1,)])
    code, _, err = run(capsys, "oracle-check", "--instances", 3)
    assert code == 4
    assert "# tracker" in err and "# oracle" in err


def test_enumerate_wc(capsys):
    code, out, _ = run(capsys, "enumerate-wc", "--k", 3, "--j", 2, "--max-jsize", 3)
    assert code == 0
    assert out.splitlines() == ["jsize,count,bound", "3,1,134217728"]
    code, _, _ = run(capsys, "enumerate-wc", "--k", 3, "--j", 1, "--max-jsize", 9)
    assert code == 3


def test_component(capsys):
    code, out, _ = run(capsys, "component", "--n", 30, "--k", 3, "--j", 2, "--epsilon", 0.3, "--seed", 2)
    assert code == 0
    rep = json.loads(out)
    assert rep["coverage_min"] <= rep["coverage_mean"] <= rep["coverage_max"]
    assert rep["params"] == {"n": 30, "k": 3, "j": 2}
    for eps in (0, 1, 1.5):
        code, _, _ = run(capsys, "component", "--n", 30, "--k", 3, "--j", 2, "--epsilon", eps, "--seed", 2)
        assert code == 2


def test_json_format(capsys):
    code, out, _ = run(capsys, "hitting", "--n", 5, "--k", 3, "--j", 1, "--trials", 3, "--seed", 0,
                       "--format", "json", "--threads", 1)
    assert code == 0
    payload = json.loads(out)
    assert [r["trial"] for r in payload["rows"]] == [0, 1, 2]
    assert set(payload["summary"]) == {"trials", "coincidences", "point", "ci_low", "ci_high"}


def test_usage_errors(capsys):
    assert run(capsys, "hitting", "--n", 5, "--k", 3, "--trials", 3, "--seed", 0)[0] == 2
    assert run(capsys, "hitting", "--n", 5, "--k", 3, "--j", 3, "--trials", 3, "--seed", 0)[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["hitting", "--n", "five"])
    assert exc.value.code == 2


def test_resource_cap(capsys, monkeypatch):
    argv = ["hitting", "--n", 30, "--k", 4, "--j", 2, "--trials", 1, "--seed", 0, "--threads", 1]
    assert run(capsys, *argv, "--memcap", 100)[0] == 3
    monkeypatch.setenv(MEMCAP_ENV, "100")
    assert run(capsys, *argv)[0] == 3
    assert run(capsys, *argv, "--memcap", 1000)[0] == 0


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# hitting run\nn = 3\nk=3\nj=2\ntrials=5\nseed=1\nthreads=1\n")
    code, out, _ = run(capsys, "hitting", "--config", cfg)
    assert code == 0
    assert out == (GOLDEN / "hitting_n3_k3_j2_t5_s1.csv").read_text()
    code, out, _ = run(capsys, "hitting", "--config", cfg, "--trials", 2)
    assert len(data_lines(out)) == 3
    cfg.write_text("n=3\nbogus=1\n")
    assert run(capsys, "hitting", "--config", cfg)[0] == 2
    assert run(capsys, "hitting", "--config", tmp_path / "missing.cfg")[0] == 2


def test_out_file_and_manifest(capsys, tmp_path):
    out = tmp_path / "sweep.csv"
    code, stdout, _ = run(capsys, "sweep", "--n", 15, "--k", 3, "--j", 1, "--c-from", 0, "--c-to", 1,
                          "--c-step", 1, "--trials", 10, "--seed", 9, "--out", out, "--threads", 1)
    assert code == 0 and stdout == ""
    assert out.read_text().startswith("c,trials,frac_no_isolated,frac_connected\n")
    manifest = json.loads(Path(str(out) + ".manifest.json").read_text())
    assert manifest["generator"] == "numpy.random.PCG64"
    assert manifest["options"]["seed"] == 9
    assert manifest["argv"][0] == "sweep"
    assert "wall_time_s" in manifest
