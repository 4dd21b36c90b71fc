import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from widomlab.sets import CircularArc, GreenLevelSet, IntervalUnion, Lemniscate, to_json
from widomlab.verify import (
    CSV_COLUMNS,
    CampaignConfig,
    audit,
    compute_margin,
    load_results,
    make_check,
    parse_degrees,
    random_interval_unions,
    run_bound_suite,
    run_campaign,
    weight_by_name,
)


def by_check(results, name):
    return [r for r in results if r.check == name]


def test_parse_degrees():
    assert parse_degrees("1..4") == (1, 2, 3, 4)
    assert parse_degrees("8, 2,4,2") == (2, 4, 8)
    assert parse_degrees(5) == (5,)
    assert parse_degrees([3, 1]) == (1, 3)
    for bad in ("", "0..3", [-1]):
        with pytest.raises(ValueError):
            parse_degrees(bad)


def test_config_validation(interval):
    with pytest.raises(ValueError):
        CampaignConfig([interval], "1..3", tolerances={"szego": 0.0})
    with pytest.raises(ValueError):
        CampaignConfig([interval], "1..3", suites=("nonsense",))
    with pytest.raises(ValueError):
        CampaignConfig([], "1..3")
    with pytest.raises(ValueError):
        weight_by_name("nope")


def test_config_files(tmp_path, interval):
    j = tmp_path / "c.json"
    j.write_text(json.dumps({"set": to_json(interval), "degrees": "1..3", "suites": "all"}))
    cfg = CampaignConfig.load(j)
    assert cfg.degrees == (1, 2, 3) and cfg.suites == ("bounds", "asymptotics", "zeros")
    t = tmp_path / "c.toml"
    t.write_text('degrees = "2,4"\nworkers = 2\n[family]\ncount = 3\nseed = 9\n')
    cfg = CampaignConfig.load(t, seed=1)
    assert len(cfg.sets) == 3 and cfg.degrees == (2, 4) and cfg.workers == 2


def test_random_family_is_seeded():
    a = random_interval_unions(20, 5)
    b = random_interval_unions(20, 5)
    assert [s.intervals for s in a] == [s.intervals for s in b]
    for s in a:
        assert 2 <= len(s.intervals) <= 3
        pts = np.array(s.intervals).ravel()
        assert pts[0] == -1 and pts[-1] == 1
        assert np.all(np.diff(pts) >= 0.05)


def test_interval_passes_everything(interval):
    rep = run_campaign(CampaignConfig([interval], "1..20"))
    assert rep.passed
    w = [r.widom for r in by_check(rep.results, "schiefermayr")]
    assert np.allclose(w, 2.0, atol=1e-9)
    # window shorter than 40: liminf is recorded, not asserted
    lim = by_check(rep.results, "liminf")
    assert lim and all(r.status == "UNSUPPORTED" for r in lim)


def test_solver_call_count():
    sets = random_interval_unions(3, 2) + [Lemniscate((-1, 0, 1), 1.0)]
    rep = run_campaign(CampaignConfig(sets, "2,4"))
    assert rep.solver_calls["primary"] == len(sets) * 2
    assert rep.solver_calls["auxiliary"] >= 1  # W_1 for the lemniscate bound


def test_determinism_across_workers(monkeypatch):
    sets = random_interval_unions(4, 7)
    cfg = dict(sets=sets, degrees="1..5", suites=("bounds", "zeros"))
    monkeypatch.setenv("WIDOMLAB_WORKERS", "1")
    one = run_campaign(CampaignConfig(**cfg))
    monkeypatch.setenv("WIDOMLAB_WORKERS", "2")
    two = run_campaign(CampaignConfig(**cfg))
    assert one.to_csv() == two.to_csv()
    assert json.dumps(one.to_json(), sort_keys=True) == json.dumps(two.to_json(), sort_keys=True)


def test_reports_audit_and_roundtrip(tmp_path):
    rep = run_campaign(CampaignConfig(random_interval_unions(3, 1), "1..6", suites=("bounds", "zeros")))
    assert audit(rep.results) == []
    csv_path, json_path = rep.write(tmp_path)
    header = csv_path.read_text().splitlines()[0].split(",")
    assert tuple(header) == CSV_COLUMNS
    again = load_results(json_path)
    assert audit(again) == []
    assert [r.margin for r in again if r.status == "PASS"] == [r.margin for r in rep.results if r.status == "PASS"]
    assert "runtime" not in json.loads(json_path.read_text())["results"][0]


def test_audit_catches_tampering(interval):
    r = make_check("x", 1, "szego", ">=", 1.0, 0.5, 0.0, {})
    from dataclasses import replace
    assert audit([replace(r, status="FAIL")])
    assert audit([replace(r, margin=0.1)])


def test_lemniscate_bound():
    rep = run_campaign(CampaignConfig([Lemniscate((-1, 0, 1), 1.0)], "1..6"))
    lem = by_check(rep.results, "lemniscate")
    assert len(lem) == 6 and all(r.passed for r in lem)


def test_level_set_identity():
    desc = GreenLevelSet(IntervalUnion(((-1, 1),)), 0.5)
    rep = run_campaign(CampaignConfig([desc], "1..4", grid_points=1024))
    ident = by_check(rep.results, "level_set_identity")
    assert len(ident) == 4 and all(r.passed for r in ident)
    assert all(r.passed for r in by_check(rep.results, "level_set_bound"))


def test_arc_bounds():
    rep = run_campaign(CampaignConfig([CircularArc(math.pi / 2)], "1..6"))
    assert all(r.passed for r in by_check(rep.results, "arc_monotone"))
    # below the minimum degree the limit check is recorded as unsupported
    assert all(r.status == "UNSUPPORTED" for r in by_check(rep.results, "arc_limit"))


def test_weighted_checks(interval):
    rep = run_campaign(CampaignConfig([interval], "2,4", weights=("unit", "sqrt_1mx2")))
    wl = [r for r in rep.results if r.check.startswith("weighted_lower_bound[")]
    assert len(wl) == 4 and all(r.passed for r in wl)


def test_asymptotics_suite(two_interval):
    rep = run_campaign(CampaignConfig([two_interval], "8,16,32", suites=("asymptotics",)))
    assert rep.passed
    assert {r.check for r in rep.results} >= {"root_norm_trend", "root_norm_top"}


def test_bound_suite_helper(interval):
    res = run_bound_suite(CampaignConfig([interval], "1..3", suites=("zeros",)))
    assert {r.check for r in res} >= {"schiefermayr", "totik_widom"}


@given(st.sampled_from([">=", "<="]), st.floats(-10, 10), st.floats(-10, 10), st.floats(0, 1))
def test_margin_sign_matches_status(sense, measured, bound, slack):
    r = make_check("s", 1, "c", sense, measured, bound, slack, {})
    assert (r.margin >= 0) == r.passed
    assert r.margin == compute_margin(sense, measured, bound, slack)
