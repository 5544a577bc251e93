"""Sampling determinism, checks, witnesses, and file emission."""

import json
from pathlib import Path

import pytest

from jagerlab import (
    DomainError,
    ExperimentConfig,
    emit_plot_data,
    injectivity_witness,
    iter_jager_pairs,
    run_verification,
    sample_jager_pairs,
)
from jagerlab.experiments import (
    containment_check,
    correspondence_check,
    hyperbola_check,
    identities_check,
    region_two_sided_check,
    witness_grid_check,
    x0_from_index,
)


def small_cfg(**kw):
    base = dict(k_list=(0.5, 1.0), samples=60, n_min=1, n_max=12, seed=7)
    base.update(kw)
    return ExperimentConfig(**base)


# -- sampling ------------------------------------------------------------------


def test_x0_index_keyed_and_order_independent():
    a = [x0_from_index(42, i) for i in range(10)]
    b = [x0_from_index(42, i) for i in reversed(range(10))]
    assert a == b[::-1]
    assert all(0 < x < 1 for x in a)
    assert x0_from_index(42, 3) != x0_from_index(43, 3)


def test_minimal_run_emits_exactly_one_pair():
    cfg = ExperimentConfig(k_list=(1.0,), samples=1, n_min=1, n_max=1, seed=5)
    assert len(list(sample_jager_pairs(cfg))) == 1


def test_pair_stream_is_deterministic():
    cfg = small_cfg()
    first = list(iter_jager_pairs(cfg, 0.5))
    second = list(iter_jager_pairs(cfg, 0.5))
    assert first == second


def test_pairs_respect_hyperbola_bound():
    cfg = small_cfg(samples=200)
    for rec in sample_jager_pairs(cfg):
        assert 4 * rec.k * rec.u * rec.v <= 1 + 1e-9


def test_stratified_sampling_controls_first_digit():
    cfg = small_cfg(stratify_first_digit=True, samples=32)
    firsts = {}
    for rec in iter_jager_pairs(cfg, 0.5):
        if rec.n == 1:
            firsts.setdefault(rec.index % 8, set()).add(rec.digit)
    for stratum, digits in firsts.items():
        assert digits == {stratum}


# -- checks ---------------------------------------------------------------------


def test_correspondence_check_small():
    results = correspondence_check(small_cfg())
    assert all(r.failures == 0 for r in results)
    named = [r for r in results if r.name == "correspondence"]
    assert {r.k for r in named} == {0.5, 1.0}
    assert all(r.worst_residual < 1e-8 for r in named)


def test_hyperbola_check_small():
    for r in hyperbola_check(small_cfg()):
        assert r.failures == 0


def test_containment_check_reports_reconciliation():
    results = containment_check(small_cfg(samples=120))
    for r in results:
        assert r.failures == 0
        assert "literal_outside_disagreements" in r.info
        assert "probe_max_v_at_u_below_0.05" in r.info


def test_region_two_sided_small():
    for k in (0.5, 2.0):
        for r in region_two_sided_check(k, samples=500, seed=3):
            assert r.failures == 0, (k, r.info)


def test_identities_check_passes():
    r = identities_check()
    assert r.failures == 0, r.info


# -- witnesses --------------------------------------------------------------------


def test_witness_grid():
    r = witness_grid_check(seed=11)
    assert r.failures == 0
    assert r.info["k1_refusal"]


def test_witness_properties():
    w = injectivity_witness(0.5, seed=9)
    assert w.coincidence < 1e-12
    assert w.separation > 0.1
    assert w.p2 == (-w.p1[1], -w.p1[0])
    for x, y in (w.p1, w.p2):
        assert 0 < x < 1 and -1.5 < y <= -0.5


def test_witness_deterministic():
    assert injectivity_witness(0.3, seed=4) == injectivity_witness(0.3, seed=4)
    assert injectivity_witness(0.3, seed=4) != injectivity_witness(0.3, seed=5)


def test_witness_refusals():
    with pytest.raises(DomainError):
        injectivity_witness(1.0)
    with pytest.raises(DomainError):
        injectivity_witness(1.7)
    # too close to 1 for the required separation to fit the folded square
    with pytest.raises(DomainError):
        injectivity_witness(0.95)


# -- reports and files ---------------------------------------------------------------


def test_run_verification_small_passes():
    report = run_verification(small_cfg(), suites=("identities", "witness", "hyperbola"))
    assert report.passed
    payload = report.to_dict()
    assert payload["schema"] == "jagerlab-report/1"
    assert payload["passed"] is True
    assert {c["name"] for c in payload["checks"]} >= {"unit_identities", "hyperbola_bound"}


def test_report_json_is_deterministic():
    cfg = small_cfg(samples=30)
    a = run_verification(cfg, suites=("hyperbola",)).to_json()
    b = run_verification(cfg, suites=("hyperbola",)).to_json()
    assert a == b


def test_emit_plot_data_files(tmp_path):
    paths = emit_plot_data(0.5, tmp_path, samples=40, n_max=8, seed=3)
    region = Path(paths["region_boundary"]).read_text().splitlines()
    pairs = Path(paths["jager_pairs"]).read_text().splitlines()
    assert region[0] == "label,u,v"
    assert pairs[0] == "k,x0_seed_index,n,u,v,x_n,y_n,a_n"
    labels = {line.split(",")[0] for line in region[1:]}
    assert {"corollary_edge_1", "p0_item_1", "p0_item_5", "hyperbola_arc",
            "pa_quad_1"} <= labels
    # cloud row count equals emitted pair count
    cfg = ExperimentConfig(k_list=(0.5,), samples=40, n_min=1, n_max=8, seed=3)
    assert len(pairs) - 1 == len(list(iter_jager_pairs(cfg, 0.5)))


def test_emit_plot_data_byte_identical(tmp_path):
    first = emit_plot_data(1.5, tmp_path / "a", samples=25, n_max=6, seed=8)
    second = emit_plot_data(1.5, tmp_path / "b", samples=25, n_max=6, seed=8)
    for key in ("region_boundary", "jager_pairs"):
        assert Path(first[key]).read_bytes() == Path(second[key]).read_bytes()


def test_emit_plot_data_vertex_rows(tmp_path):
    paths = emit_plot_data(1.0, tmp_path, samples=10, n_max=5, seed=2)
    rows = Path(paths["region_boundary"]).read_text().splitlines()[1:]
    quad0 = [tuple(map(float, line.split(",")[1:]))
             for line in rows if line.startswith("pa_quad_0,")]
    assert quad0[0] == (1.0, 0.0)
    assert quad0[1] == (0.5, 0.5)
    assert quad0[2] == (pytest.approx(1 / 3), pytest.approx(2 / 3))
    assert quad0[3] == (0.5, 0.0)
