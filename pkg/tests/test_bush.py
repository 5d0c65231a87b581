import math
import re
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from wikicite.bush import (
    BushEdge,
    BushNode,
    BushStyle,
    ClusterBush,
    build_bush,
    cluster_overlap,
    edge_width,
    node_radius,
    render_bush_svg,
)
from wikicite.errors import AxisMismatch, NonConsecutiveK
from wikicite.nmf import NmfModel

GOLDEN = Path(__file__).parent / "data" / "golden_bush.svg"
ARTICLES = ("Uranus", "Extinction (astronomy)", "RBL2", "Papillomavirus")


def model(W, labels=ARTICLES):
    W = np.asarray(W, dtype=float)
    k = W.shape[1]
    return NmfModel(k, W, np.ones((k, 2)), 1, 0.0, 0, labels, ("J1", "J2"))


def col(*values):
    return model(np.array(values, dtype=float)[:, None], labels=None)


def test_identical_columns():
    assert cluster_overlap(col(1, 2, 3), 0, col(1, 2, 3), 0) == 1.0


def test_disjoint_columns():
    assert cluster_overlap(col(1, 0, 0), 0, col(0, 1, 0), 0) == 0.0


def test_hand_computed_cosine():
    assert abs(cluster_overlap(col(1, 1, 0), 0, col(1, 0, 0), 0) - 1 / math.sqrt(2)) < 1e-12


def test_zero_column():
    assert cluster_overlap(col(0, 0, 0), 0, col(1, 0, 0), 0) == 0.0


def test_axis_mismatch():
    with pytest.raises(AxisMismatch):
        cluster_overlap(col(1, 0), 0, col(1, 0, 0), 0)
    with pytest.raises(IndexError):
        cluster_overlap(col(1, 0), 1, col(1, 0), 0)


def test_jaccard_alternative():
    a, b = col(5, 4, 0, 1), col(5, 0, 4, 1)
    assert cluster_overlap(a, 0, b, 0, method="jaccard", top_n=2) == pytest.approx(1 / 3)


nonneg = arrays(np.float64, 6, elements=st.floats(0, 1e6, allow_subnormal=False))


@given(nonneg, nonneg)
def test_symmetry_and_range(a, b):
    ma, mb = col(*a), col(*b)
    ab = cluster_overlap(ma, 0, mb, 0)
    assert ab == cluster_overlap(mb, 0, ma, 0)
    assert 0.0 <= ab <= 1.0


@given(nonneg)
def test_self_overlap(a):
    if a.any():
        assert cluster_overlap(col(*a), 0, col(*a), 0) == 1.0


def test_self_overlap_extreme_magnitudes():
    for v in (1.5e-229, 1e300):
        assert cluster_overlap(col(v, v, 0.0), 0, col(v, v, 0.0), 0) == 1.0


def fixture_models():
    m1 = model([[1.0], [1.0], [0.5], [0.5]])
    m2 = model([[1.0, 0.0], [0.9, 0.1], [0.0, 0.6], [0.1, 0.5]])
    m3 = model([[1.0, 0.0, 0.0], [0.8, 0.0, 0.1], [0.0, 0.7, 0.0], [0.0, 0.1, 0.9]])
    return [m1, m2, m3]


def test_two_children_linked_to_root():
    m1, m2, _ = fixture_models()
    bush = build_bush([m1, m2])
    assert len(bush.nodes) == 3
    root = bush.node_index(1, 0)
    assert sorted(e.b for e in bush.edges if e.a == root) == [1, 2]


def test_single_model_bush():
    bush = build_bush(fixture_models()[:1])
    assert len(bush.nodes) == 1 and bush.edges == []
    assert bush.nodes[0].label == "Extinction (astronomy)"  # tie with Uranus, ascending title
    assert bush.nodes[0].mass == pytest.approx(3.0)


def test_bush_invariants():
    bush = build_bush(fixture_models(), min_overlap=0.0)
    assert [(n.run_k, n.cluster) for n in bush.nodes] == [(1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2)]
    for e in bush.edges:
        assert bush.nodes[e.b].run_k == bush.nodes[e.a].run_k + 1
        assert 0.0 <= e.overlap <= 1.0


def test_threshold_filters_edges():
    all_edges = build_bush(fixture_models(), min_overlap=0.0).edges
    strong = build_bush(fixture_models(), min_overlap=0.5).edges
    assert {(e.a, e.b) for e in strong} == {(e.a, e.b) for e in all_edges if e.overlap >= 0.5}


def test_non_consecutive_k():
    m1, _, m3 = fixture_models()
    with pytest.raises(NonConsecutiveK):
        build_bush([m1, m3])


def test_labels_per_node():
    bush = build_bush(fixture_models(), top_n_label=3)
    assert bush.nodes[1].labels == ("Uranus", "Extinction (astronomy)", "Papillomavirus")


def test_svg_single_node():
    svg = render_bush_svg(build_bush(fixture_models()[:1]))
    assert svg.count("<circle") == 1
    assert svg.count("<line") == 0


def test_svg_edge_width_follows_overlap():
    nodes = [BushNode(1, 0, ("a",), 1.0), BushNode(2, 0, ("b",), 1.0), BushNode(2, 1, ("c",), 1.0)]
    bush = ClusterBush(nodes, [BushEdge(0, 1, 1.0), BushEdge(0, 2, 0.2)])
    widths = [float(w) for w in re.findall(r'<line [^>]*stroke-width="([0-9.]+)"', render_bush_svg(bush))]
    assert widths[0] > widths[1]


@given(st.floats(0, 1), st.floats(0, 1))
def test_width_and_radius_monotone(a, b):
    if b - a > 1e-9:
        assert edge_width(a) < edge_width(b)
        masses = [a, b, 0.0, 1.0]
        assert node_radius(a, masses) < node_radius(b, masses)


def test_k1_row_is_lowest():
    svg = render_bush_svg(build_bush(fixture_models()))
    rows = re.findall(r'<text x="8" y="([0-9.]+)"[^>]*>k=(\d)</text>', svg)
    ys = {int(k): float(y) for y, k in rows}
    assert ys[1] > ys[2] > ys[3]


def test_labels_escaped():
    m = model([[1.0], [0.0], [0.0], [0.0]], labels=("<b>&", "x", "y", "z"))
    svg = render_bush_svg(build_bush([m]))
    assert "<b>" not in svg and "&lt;b&gt;&amp;" in svg


def test_golden_svg():
    svg = render_bush_svg(build_bush(fixture_models()), BushStyle())
    assert svg == GOLDEN.read_text(encoding="utf-8")
