# Smoke tests for the fractalssm_core module: hand-derived values from the
# C++ suite, exercised through the bindings.
import json
import math

import pytest

import fractalssm_core as m


def test_zoh_hand_values():
    ln2 = math.log(2.0)
    assert m.zoh_a_bar(-1.0, ln2) == pytest.approx(0.5, rel=1e-15)
    assert m.zoh_phi(-1.0, ln2) == pytest.approx(0.5, rel=1e-15)
    assert m.zoh_a_bar(-1.0, 0.0) == 1.0
    assert m.zoh_phi(-1.0, 0.0) == 0.0


def test_hilbert_order_is_a_unit_step_bijection():
    coords = m.generate_order("hilbert", 8, 8)
    assert len(coords) == 64
    assert len(set(coords)) == 64
    assert coords[0] == (0, 0)
    for (x0, y0), (x1, y1) in zip(coords, coords[1:]):
        assert abs(x1 - x0) + abs(y1 - y0) == 1
    csv = m.order_csv("hilbert", 2)
    assert csv == "index,x,y\n0,0,0\n1,0,1\n2,1,1\n3,1,0\n"


def test_sds_coverage_ordering():
    hilbert = m.sds_coverage("hilbert", 16)
    local = m.sds_coverage("local", 16)
    raster = m.sds_coverage("raster", 16)
    assert hilbert == 1.0
    assert local == pytest.approx(192.0 / 252.0, abs=0.0)
    assert raster == 0.0
    report = json.loads(m.sds_report_json("hilbert", 8, 4, "mean", [1.5]))
    assert report["denominator"] == 60
    assert report["table"][0]["coverage"] == 1.0


def test_csr_skips_frozen_goldens():
    assert m.csr_skips("hilbert", 2) == [(0, 3), (0, 2)]
    skips = m.csr_skips("hilbert", 4)
    assert len(skips) == 4  # ceil(log2 16)
    assert skips[0] == (2, 13)


def test_bdpp_hand_case_and_gradients():
    args = dict(n=2, channels=1, d_state=1, a_bar=[0.3, 0.5], b_bar=[1.0, 1.0],
                c=[1.0, 1.0], x=[1.0, 1.0])
    assert m.bdpp(**args) == [1.75, 3.0]
    grad = m.bdpp_grad(**args, batch=1, skips=[], upstream=[1.0, 2.0])
    assert grad["d_x"] == [3.25, 4.5]
    assert grad["d_a_bar"] == [0.0, 6.0]
    assert grad["d_b_bar"] == [3.25, 4.5]
    assert grad["d_c"] == [1.75, 6.0]


def test_bdpp_skip_edge_changes_the_answer():
    base = dict(n=3, channels=1, d_state=1, a_bar=[0.5] * 3, b_bar=[1.0] * 3,
                c=[1.0] * 3, x=[1.0] * 3)
    plain = m.bdpp(**base)
    skipped = m.bdpp(**base, skips=[(0, 2)])
    assert skipped != plain
    assert skipped[2] == 4.5  # hand expansion from the C++ suite


def test_rope_preserves_norms():
    v = [0.3, -1.2, 0.8, 2.0, -0.4, 0.1]
    rotated = m.rope_rotate(v, pos=17, max_len=64)
    assert rotated != v
    assert math.dist(rotated, [0.0] * 6) == pytest.approx(
        math.dist(v, [0.0] * 6), rel=1e-12)
    assert m.rope_rotate(v, pos=0, max_len=64) == v


def test_verify_small_counts():
    report = m.verify(suite="all", seed=1, ssm_instances=20, grad_instances=5,
                      rope_instances=50)
    assert report["passed"] is True
    doc = json.loads(report["json"])
    assert doc["passed"] is True
    assert [s["name"] for s in doc["suites"]] == ["ssm", "grad", "rope"]


def test_error_mapping():
    with pytest.raises(ValueError):
        m.generate_order("wiggle", 4, 4)
    with pytest.raises(ValueError):
        m.generate_order("hilbert", 3, 3)
    with pytest.raises(RuntimeError):
        m.sds_coverage("hilbert", 2)  # too short for a patch
