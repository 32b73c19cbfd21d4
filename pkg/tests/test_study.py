import numpy as np
import pytest
import yaml
from pathlib import Path

import bayesrs.study as study
from bayesrs.cli import main
from bayesrs.errors import InvalidParameter
from bayesrs.study import (CSV_COLUMNS, StudyConfig, StudyResult, parse_csv, report, reps_csv,
                           run_study)

ROOT = Path(__file__).resolve().parents[1]


def small(**kw):
    base = dict(L=4, rs_cases=["best1"], mu_cases=["ufc"], sigma_cases=["cor:0.0", "cor:0.5"],
                crn_cases=["isCRN", "noCRN"], strategies=["equal", "dpw_plus"],
                M_cov=2, M_mu=1, M=3, cap=5_000, seed=3)
    base.update(kw)
    return StudyConfig(**base)


def test_reference_grid_count():
    cfg = StudyConfig.reference_scale()
    assert len(cfg.cells()) // len(cfg.strategies) == 162
    assert (cfg.L, cfg.M_cov, cfg.M_mu, cfg.M, cfg.cap) == (20, 15, 15, 10, 150_000)


def test_invalid_counts():
    with pytest.raises(InvalidParameter):
        StudyConfig(M=0)


def test_empty_grid_header_only():
    res = run_study(small(strategies=[]))
    assert report(res, "csv") == ",".join(CSV_COLUMNS) + "\n"


def test_single_cell_roundtrip():
    res = run_study(small(sigma_cases=["cor:0.5"], crn_cases=["isCRN"], strategies=["dpw_plus"]))
    text = report(res, "csv")
    assert len(text.splitlines()) == 2
    assert parse_csv(text) == res.cells


def test_csv_roundtrip_and_bounds():
    res = run_study(small())
    assert parse_csv(report(res, "csv")) == res.cells
    for c in res.cells:
        assert 0 <= c.emp_pcs <= 1 and c.n_reps == 6


def test_strategy_does_not_change_observations(monkeypatch):
    seen = {}
    real = study.crn_observe

    def recording(inst, seed):
        obs = real(inst, seed)
        inner = obs.block

        def block(i, start, stop):
            vals = inner(i, start, stop)
            for k, v in zip(range(start, stop), vals):
                key = (inst.dumps(), seed, i, k)
                assert seen.setdefault(key, v) == v
            return vals

        obs.block = block
        return obs

    monkeypatch.setattr(study, "crn_observe", recording)
    a = run_study(small(strategies=["equal"]))
    b = run_study(small(strategies=["greedy_ocba", "equal"]))
    assert a.totals(strategy="equal") == b.totals(strategy="equal")


def test_crn_modes_share_observations():
    cfg = small(sigma_cases=["cor:0.0"])
    inst = study.build_instance(cfg, "best1", "ufc", "cor:0.0", 0, 0)
    seed = study.observation_seed(cfg, 0, 0, 1)
    # seeds are keyed on (m_cov, m_mu, rep) only
    assert seed == study.observation_seed(small(strategies=["dpw"]), 0, 0, 1)
    assert inst.dumps() == study.build_instance(small(crn_cases=["noCRN"]), "best1", "ufc", "cor:0.0", 0, 0).dumps()


def test_variances_shared_across_correlations():
    cfg = small()
    a = study.build_instance(cfg, "best1", "ufc", "cor:0.0", 1, 0)
    b = study.build_instance(cfg, "best1", "ufc", "cor:0.9", 1, 0)
    assert np.array_equal(np.diag(a.sigma), np.diag(b.sigma))


def test_parallel_matches_serial():
    cfg = small()
    assert report(run_study(cfg, parallel=2), "csv") == report(run_study(cfg), "csv")


def test_summary_layout():
    res = run_study(small(sigma_cases=["cor:0.5", "cor:0.0"]))
    text = report(res, "summary")
    lines = text.splitlines()
    assert "equal" in lines[1] and "dpw_plus" in lines[1]
    assert lines[2].startswith("cor:0.0") and lines[3].startswith("cor:0.5")


def test_rep_rows():
    res = run_study(small())
    text = reps_csv(res)
    assert text.splitlines()[0].startswith("rs_case,mu_case")
    assert len(text.splitlines()) == 1 + len(res.reps) == 1 + 2 * 2 * 2 * 2 * 3


def test_config_files_parse():
    for name in ("desk.yaml", "reference.yaml"):
        data = yaml.safe_load((ROOT / "configs" / name).read_text())
        StudyConfig.from_mapping(data)
    assert StudyConfig.from_mapping(yaml.safe_load((ROOT / "configs" / "desk.yaml").read_text())) == StudyConfig()


def test_unknown_config_field():
    with pytest.raises(InvalidParameter):
        StudyConfig.from_mapping({"budget": 3})


def test_cli_run_and_report(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(yaml.safe_dump(dict(L=4, rs_cases=["best1"], mu_cases=["inc"], sigma_cases=["cor:0.5"],
                                       crn_cases=["isCRN"], strategies=["equal", "dpw_plus"],
                                       M_cov=1, M=2, cap=5000)))
    out = tmp_path / "out.csv"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--seed", "9"]) == 0
    first = out.read_text()
    assert first.splitlines()[0] == ",".join(CSV_COLUMNS) and len(first.splitlines()) == 3
    main(["run", "--config", str(cfg), "--out", str(out), "--seed", "9"])
    assert out.read_text() == first
    capsys.readouterr()
    assert main(["report", "--in", str(out), "--format", "summary"]) == 0
    assert "dpw_plus" in capsys.readouterr().out
    main(["report", "--in", str(out), "--format", "csv"])
    assert capsys.readouterr().out == first


def test_cli_trace(capsys):
    assert main(["trace", "--L", "4", "--sigma", "cor:0.5", "--verbose", "--seed", "2"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# L=4") and "# reason=" in out
