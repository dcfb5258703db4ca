from fractions import Fraction

import numpy as np
import pytest

from graphheat.covering import (
    CoveringMap,
    build_cyclic_cover,
    lemma_sets,
    lift_function,
    validate_covering,
)
from graphheat.errors import EmptyFiberIntersection, InvalidFold, NotACycle
from graphheat.graph import build_graph

from conftest import path


def test_cyclic_cover_c8(c4, c8_cover):
    assert c8_cover.cover.n == 8
    assert validate_covering(c8_cover).valid
    assert c8_cover.p["5"] == "1"
    assert c8_cover.fiber("0") == ("0", "4")


def test_identity_cover(c4):
    cm = build_cyclic_cover(c4, 1)
    assert cm.cover is c4
    assert all(cm.p[v] == v for v in c4.vertex_ids)
    assert validate_covering(cm).valid


def test_cover_rejects_path():
    with pytest.raises(NotACycle):
        build_cyclic_cover(path(3), 2)


def test_cover_rejects_bad_fold(c4):
    with pytest.raises(InvalidFold):
        build_cyclic_cover(c4, 0)


def test_cover_preserves_degrees(c8_cover):
    cover_deg = c8_cover.cover.degrees()
    base_deg = c8_cover.base.degrees()
    for v in c8_cover.cover.vertex_ids:
        i = c8_cover.cover.index_of(v)
        j = c8_cover.base.index_of(c8_cover.p[v])
        assert cover_deg[i] == base_deg[j]


def test_weighted_cover_axioms():
    base = build_graph(
        [("0", 1.0), ("1", 2.0), ("2", 0.5)],
        [("0", "1", 1.5), ("1", "2", 0.25), ("2", "0", 3.0)],
    )
    cm = build_cyclic_cover(base, 3)
    assert cm.cover.n == 9
    assert validate_covering(cm).valid


def test_validate_covering_detects_collapse(c4):
    # map collapsing two adjacent vertices breaks the neighbor bijection
    p = {"0": "0", "1": "1", "2": "1", "3": "3"}
    bad = CoveringMap(c4, c4, p)
    res = validate_covering(bad)
    assert not res.valid


def test_validate_covering_detects_measure_mismatch(c4):
    cover = build_graph(
        [("0", 1.0), ("1", 1.0), ("2", 1.0), ("3", 2.0)],
        [("0", "1", 1.0), ("1", "2", 1.0), ("2", "3", 1.0), ("3", "0", 1.0)],
    )
    res = validate_covering(CoveringMap(c4, cover, {v: v for v in c4.vertex_ids}))
    assert not res.valid
    assert "measure" in res.violation


def test_lift_eigen_pattern(c8_cover):
    lifted = lift_function(c8_cover, np.array([0.0, 1.0, 0.0, -1.0]))
    np.testing.assert_array_equal(lifted, [0, 1, 0, -1, 0, 1, 0, -1])


def test_lift_constant(c8_cover):
    np.testing.assert_array_equal(
        lift_function(c8_cover, np.full(4, 2.5)), np.full(8, 2.5)
    )


def test_lift_identity_cover(c4):
    cm = build_cyclic_cover(c4, 1)
    phi = np.array([1.0, 2.0, 3.0, 4.0])
    np.testing.assert_array_equal(lift_function(cm, phi), phi)


def test_lemma_sets_c8(c8_cover):
    Z, ratio = lemma_sets(c8_cover, "0", ["0"], 2)
    assert set(Z) == {"6", "7", "0", "1", "2"}
    assert ratio == Fraction(2, 1)


def test_lemma_sets_whole_cover(c8_cover):
    _, ratio = lemma_sets(c8_cover, "0", list(c8_cover.cover.vertex_ids), 1)
    assert ratio == 0


def test_lemma_sets_zero_radius(c8_cover):
    Z, _ = lemma_sets(c8_cover, "0", ["0", "1"], 0)
    assert set(Z) == {"0", "1"}


def test_lemma_sets_empty_fiber(c8_cover):
    with pytest.raises(EmptyFiberIntersection):
        lemma_sets(c8_cover, "2", ["0"], 0)
