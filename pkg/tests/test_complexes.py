import json
import math
import random
from fractions import Fraction
from itertools import combinations

import pytest

from hdx import complexes as cpx
from hdx.errors import SchemaError


# -- complete complexes --------------------------------------------------------


@pytest.mark.parametrize("d,v,e,p", [(2, 3, 3, 1), (3, 4, 6, 4), (5, 6, 15, 20)])
def test_complete_counts(d, v, e, p):
    assert (v, e, p) == (math.comb(d + 1, 1), math.comb(d + 1, 2), math.comb(d + 1, 3))
    cx = cpx.complete_complex(d)
    assert cx.n_vertices == v and len(cx.edges) == e and len(cx.polygons) == p


def test_complete_rejects_small_d():
    with pytest.raises(ValueError):
        cpx.complete_complex(1)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_complete_vertex_transitive_degrees(d):
    cx = cpx.complete_complex(d)
    assert all(cx.degree(v) == d for v in range(cx.n_vertices))


# -- spherical building ----------------------------------------------------------


def test_building_counts(building2):
    b = building2
    dims = [len(s) for s in b.labels]
    assert dims.count(1) == 15 and dims.count(2) == 35 and dims.count(3) == 15
    assert b.n_vertices == 65
    assert len(b.polygons) == 315
    assert cpx.diameter(b) == 3


def test_building_triangles_against_clique_enumeration(building2):
    # independent oracle: enumerate 3-cliques of the containment graph
    b = building2
    adjacency = [set() for _ in range(b.n_vertices)]
    for s, t in b.edges:
        adjacency[s].add(t)
        adjacency[t].add(s)
    cliques = [
        (u, v, w)
        for u, v, w in combinations(range(b.n_vertices), 3)
        if v in adjacency[u] and w in adjacency[u] and w in adjacency[v]
    ]
    assert len(cliques) == 315
    built = {tuple(sorted(b.polygon_vertices(p))) for p in range(len(b.polygons))}
    assert built == set(cliques)
    # every clique is a chain of dimensions 1 < 2 < 3
    for u, v, w in cliques:
        assert sorted(len(b.labels[x]) for x in (u, v, w)) == [1, 2, 3]


def test_building_rejects_nonprime():
    with pytest.raises(ValueError):
        cpx.spherical_building(4)
    with pytest.raises(ValueError):
        cpx.spherical_building(6)


def test_building_measures_descending(building2):
    assert cpx.is_descending_mu1(building2)
    assert cpx.is_descending_mu0(building2)
    # mu1 is uniform here: every containment pair lies in exactly 3 flags
    assert set(building2.measures.mu1) == {Fraction(1, 315)}


# -- presentation complexes -------------------------------------------------------


def test_presentation_complex_basic():
    X = cpx.presentation_complex(cpx.presentation("a,b", "b"))
    assert X.n_vertices == 1 and len(X.edges) == 2 and len(X.polygons) == 1
    assert len(X.polygons[0]) == 1


def test_presentation_t_squared_accepted():
    X = cpx.presentation_complex(cpx.presentation("t", "t^2"))
    assert len(X.polygons[0]) == 2


def test_presentation_torus():
    X = cpx.presentation_complex(cpx.presentation("a,b", "a b a^-1 b^-1"))
    assert X.n_vertices == 1 and len(X.edges) == 2
    assert len(X.polygons[0]) == 4


def test_presentation_rejects_unreduced_relator():
    with pytest.raises(SchemaError):
        cpx.presentation("a,b", "a b b^-1")
    with pytest.raises(SchemaError):
        cpx.Presentation(("a",), ((),))


def test_presentation_rejects_empty_relator_set():
    with pytest.raises(SchemaError):
        cpx.presentation_complex(cpx.Presentation(("a",), ()))


@pytest.mark.parametrize("d,gens,rels", [(3, 1, 1), (4, 3, 4), (5, 6, 10)])
def test_contracted_complete_counts(d, gens, rels):
    p = cpx.contracted_complete_presentation(d)
    assert len(p.generators) == gens == math.comb(d, 2) - (d - 1)
    assert len(p.relators) == rels == math.comb(d, 3)


def test_free_product_counts():
    p = cpx.free_product_presentation(
        cpx.presentation("t", "t^2"), cpx.presentation("a", "a^3")
    )
    assert len(p.generators) == 2 and len(p.relators) == 2
    q = cpx.free_product_presentation(
        cpx.presentation("a,b", "b"), cpx.presentation("c", "c")
    )
    assert len(q.generators) == 3 and len(q.relators) == 2
    assert q.factors is not None


def test_free_product_renames_collisions():
    p = cpx.free_product_presentation(
        cpx.presentation("a", "a^2"), cpx.presentation("a", "a^3")
    )
    assert len(set(p.generators)) == 2


# -- cyclic covers ------------------------------------------------------------------


def test_cyclic_cover_m1_equals_presentation_complex():
    X = cpx.presentation_complex(cpx.presentation("a,b", "b"))
    assert cpx.cyclic_cover_complex(1).same_as(X)


def test_cyclic_cover_counts():
    cc = cpx.cyclic_cover_complex(3)
    assert cc.n_vertices == 3 and len(cc.edges) == 6 and len(cc.polygons) == 3


def test_cyclic_cover_h1_rank_one():
    # independent oracle: F2 cycle space modulo polygon boundaries
    cc = cpx.cyclic_cover_complex(5)
    assert cc.is_connected
    m = len(cc.edges)
    rel_rows = []
    for per in cc.polygons:
        mask = 0
        for dart in per:
            mask ^= 1 << (dart >> 1)
        rel_rows.append(mask)
    pivots = []
    for mask in rel_rows:
        for p in pivots:
            mask = min(mask, mask ^ p)
        if mask:
            pivots.append(mask)
            pivots.sort(reverse=True)
    dim_z1 = m - len(pivots)
    dim_b1 = cc.n_vertices - 1
    assert dim_z1 - dim_b1 == 1


# -- links ----------------------------------------------------------------------------


def test_link_of_complete_is_complete_graph():
    k4 = cpx.complete_complex(3)
    lk = cpx.link(k4, 0)
    assert lk.n_vertices == 3 and len(lk.edges) == 3
    assert set(lk.measures.mu1) == {Fraction(1, 3)}
    k6 = cpx.complete_complex(5)
    lk = cpx.link(k6, 2)
    assert lk.n_vertices == 5 and len(lk.edges) == math.comb(5, 2)


def test_link_of_building_line_is_k33(building2):
    b = building2
    line = next(v for v in range(b.n_vertices) if len(b.labels[v]) == 2)
    lk = cpx.link(b, line)
    assert lk.n_vertices == 6 and len(lk.edges) == 9
    degrees = sorted(lk.degree(v) for v in range(6))
    assert degrees == [3] * 6


def test_link_of_building_point_is_heawood_like(building2):
    b = building2
    point = next(v for v in range(b.n_vertices) if len(b.labels[v]) == 1)
    lk = cpx.link(b, point)
    assert lk.n_vertices == 14 and len(lk.edges) == 21
    assert all(lk.degree(v) == 3 for v in range(14))


def test_link_measures_descending(building2):
    lk = cpx.link(building2, 0)
    assert cpx.is_descending_mu0(lk)


def test_link_rejects_nonsimplicial():
    X = cpx.presentation_complex(cpx.presentation("a,b", "b"))
    with pytest.raises(SchemaError):
        cpx.link(X, 0)


# -- trees ----------------------------------------------------------------------------


def test_spanning_tree_k3_lowest_id():
    k3 = cpx.complete_complex(2)
    assert cpx.spanning_tree(k3, 0) == frozenset({0, 1})  # edges (0,1), (0,2)


def test_spanning_tree_single_vertex_empty():
    X = cpx.presentation_complex(cpx.presentation("a", "a^2"))
    assert cpx.spanning_tree(X, 0) == frozenset()


def test_spanning_tree_path_from_middle():
    path = cpx.Complex(3, [(0, 1), (1, 2)])
    assert cpx.spanning_tree(path, 1) == frozenset({0, 1})


def test_spanning_tree_rejects_disconnected():
    ms = cpx.Measures((Fraction(1, 2), Fraction(1, 2)), (), ())
    two = cpx.Complex(2, [], (), measures=ms)
    assert not two.is_connected
    with pytest.raises(ValueError):
        cpx.spanning_tree(two, 0)


# -- measures and validation ------------------------------------------------------------


def test_descending_validation_catches_mismatch():
    k3 = cpx.complete_complex(2)
    bad = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))
    lying = cpx.Measures(bad, k3.measures.mu1, k3.measures.mu2,
                         ("descending", "uniform", "uniform"))
    with pytest.raises(SchemaError):
        cpx._validate_measures(k3, lying)


def test_measures_must_sum_to_one():
    k3 = cpx.complete_complex(2)
    bad = cpx.resolve_measures(k3, "uniform", [0.3, 0.3, 0.3], "uniform")
    with pytest.raises(SchemaError):
        cpx._validate_measures(k3, bad)


def test_generated_complexes_have_valid_descending_measures():
    for cx in (cpx.complete_complex(3), cpx.spherical_building(2), cpx.cyclic_cover_complex(4)):
        for mu in (cx.measures.mu0, cx.measures.mu1, cx.measures.mu2):
            if mu:
                assert sum(mu) == 1
                assert all(x >= 0 for x in mu)


def test_polygon_canonicalization_is_rotation_invariant():
    k4 = cpx.complete_complex(3)
    per = k4.polygons[0]
    assert per == cpx.canonical_perimeter(per[1:] + per[:1])
    reversed_per = tuple(cpx.reverse_dart(d) for d in reversed(per))
    assert per == cpx.canonical_perimeter(reversed_per)
    assert len(k4.polygon_orientations(0)) == 6


def test_perimeter_validation():
    with pytest.raises(SchemaError):  # not closed: single non-loop dart
        cpx.Complex(3, [(0, 1), (1, 2)], [(0,)])
    with pytest.raises(SchemaError):  # immediate backtrack e followed by e-bar
        cpx.Complex(2, [(0, 1)], [(0, 1)])


# -- JSON roundtrip -----------------------------------------------------------------------


@pytest.mark.parametrize("make", [
    lambda: cpx.complete_complex(2),
    lambda: cpx.complete_complex(4),
    lambda: cpx.spherical_building(2),
    lambda: cpx.cyclic_cover_complex(3),
    lambda: cpx.presentation_complex(cpx.presentation("a,b", "a b a^-1 b^-1")),
])
def test_json_roundtrip_identity(tmp_path, make):
    cx = make()
    path = tmp_path / "cx.json"
    cpx.save_complex(cx, path)
    again = cpx.load_complex(path)
    assert cx.same_as(again)


def test_load_rejects_backtracking_perimeter(tmp_path):
    data = {
        "vertices": 2,
        "edges": [{"id": 0, "src": 0, "dst": 1}],
        "polygons": [{"id": 0, "perimeter": [
            {"edge": 0, "reversed": False}, {"edge": 0, "reversed": True}]}],
        "measures": {"mu0": "descending", "mu1": "descending", "mu2": "uniform"},
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    with pytest.raises(SchemaError):
        cpx.load_complex(path)


def test_load_rejects_denormalized_measures(tmp_path):
    data = {
        "vertices": 2,
        "edges": [{"id": 0, "src": 0, "dst": 1}],
        "polygons": [],
        "measures": {"mu0": [0.5, 0.4], "mu1": [1.0], "mu2": []},
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    with pytest.raises(SchemaError):
        cpx.load_complex(path)


def test_load_rejects_noncontiguous_ids(tmp_path):
    data = {
        "vertices": 2,
        "edges": [{"id": 1, "src": 0, "dst": 1}],
        "polygons": [],
        "measures": {"mu0": "descending", "mu1": "uniform", "mu2": []},
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    with pytest.raises(SchemaError):
        cpx.load_complex(path)


def test_random_desk_complexes_construct(building2):
    from conftest import random_desk_complex

    rng = random.Random(9)
    for _ in range(60):
        cx = random_desk_complex(rng)
        assert cx.is_connected
        assert sum(cx.measures.mu1) == 1


def test_building_q3_gaussian_binomial_counts():
    b = cpx.spherical_building(3)
    dims = [len(s) for s in b.labels]
    # gaussian binomials over F_3: [4 1] = 40, [4 2] = 130, [4 3] = 40
    assert dims.count(1) == 40 and dims.count(2) == 130 and dims.count(3) == 40
    # full flags: 40 planes x 13 lines per plane x 4 points per line
    assert len(b.polygons) == 40 * 13 * 4
    assert cpx.is_descending_mu1(b) and cpx.is_descending_mu0(b)
