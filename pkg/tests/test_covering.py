import random
from fractions import Fraction

import pytest

from conftest import random_desk_complex
from hdx import cochain as ch
from hdx import complexes as cpx
from hdx import covering as cov
from hdx.cochain import Cochain1, Coefficient
from hdx.errors import SizeGuardExceeded
from hdx.perm import Perm

SYM2 = Coefficient.sym(2)
SWAP = Perm((1, 0))
ID2 = Perm.identity(2)


def k3():
    return cpx.complete_complex(2)


def ab_b():
    return cpx.presentation_complex(cpx.presentation("a,b", "b"))


# -- building covers ----------------------------------------------------------------


def test_identity_cochain_gives_disjoint_copies():
    a = ch.identity_cochain1(k3(), SYM2)
    covering = cov.covering_from_cochain(a)
    comps = covering.components()
    assert len(comps) == 2
    assert all(len(c) == 3 for c in comps)


def test_transposition_edge_gives_hexagon():
    a = Cochain1(k3(), SYM2, (SWAP, ID2, ID2))
    covering = cov.covering_from_cochain(a)
    assert covering.is_connected()
    cover = cov.cover_complex(covering, with_polygons=False)
    assert cover.n_vertices == 6 and len(cover.edges) == 6
    assert all(cover.degree(v) == 2 for v in range(6))  # a single 6-cycle


def test_coboundaries_give_trivial_covers():
    rng = random.Random(3)
    for _ in range(20):
        cx = random_desk_complex(rng)
        n = rng.randint(2, 3)
        coeff = Coefficient.sym(n)
        a = ch.delta0(ch.random_cochain0(cx, coeff, rng))
        covering = cov.covering_from_cochain(a)
        comps = covering.components()
        assert len(comps) == n
        assert all(len(c) == cx.n_vertices for c in comps)


def test_cover_edge_and_fiber_counts():
    rng = random.Random(5)
    for _ in range(20):
        cx = random_desk_complex(rng)
        n = rng.randint(2, 3)
        a = ch.random_cochain1(cx, Coefficient.sym(n), rng)
        covering = cov.covering_from_cochain(a)
        assert len(covering.cover_edges) == n * len(cx.edges)
        for x in range(cx.n_vertices):
            assert len(covering.fiber(x)) == n
        assert covering.is_connected() == ch.is_connected_cochain(a)


def test_cocycle_cover_is_polygonal_with_matching_euler_characteristic():
    rng = random.Random(7)
    cases = 0
    for _ in range(40):
        cx = random_desk_complex(rng)
        n = rng.randint(2, 3)
        coeff = Coefficient.sym(n)
        try:
            reps = cov.enumerate_cocycles(cx, coeff)
        except SizeGuardExceeded:
            continue
        for rep in reps[:3]:
            covering = cov.covering_from_cochain(rep)
            assert all(
                covering.closed_polygon_lifts(p) == n for p in range(len(cx.polygons))
            )
            cover = cov.cover_complex(covering)
            assert cov.euler_characteristic(cover) == n * cov.euler_characteristic(cx)
            cases += 1
    assert cases > 10


# -- reading cochains off covers -------------------------------------------------------


def test_roundtrip_recovers_orbit():
    a = Cochain1(k3(), SYM2, (SWAP, ID2, ID2))
    covering = cov.covering_from_cochain(a)
    back = cov.cochain_from_covering(covering)
    assert back.values == a.values  # default labels reproduce exactly
    assert ch.same_orbit(a, back)


def test_relabeled_fiber_changes_by_action_on_one_vertex():
    cx = k3()
    a = Cochain1(cx, SYM2, (SWAP, ID2, ID2))
    covering = cov.covering_from_cochain(a)
    relabel = [ID2, SWAP, ID2]  # rename the fiber over vertex 1
    back = cov.cochain_from_covering(covering, relabel)
    assert ch.same_orbit(a, back)
    beta = ch.Cochain0(cx, SYM2, (ID2, SWAP, ID2))
    assert ch.act(beta, a).values == back.values


def test_random_relabelings_stay_in_orbit():
    rng = random.Random(11)
    for _ in range(30):
        cx = random_desk_complex(rng)
        n = rng.randint(2, 3)
        coeff = Coefficient.sym(n)
        a = ch.random_cochain1(cx, coeff, rng)
        covering = cov.covering_from_cochain(a)
        relabel = [ch.vrandom(coeff, rng) for _ in range(cx.n_vertices)]
        back = cov.cochain_from_covering(covering, relabel)
        assert ch.same_orbit(a, back)


def test_invalid_covering_rejected():
    a = Cochain1(k3(), SYM2, (SWAP, ID2, ID2))
    covering = cov.covering_from_cochain(a)
    broken = cov.Covering(
        covering.base, covering.degree, covering.cochain,
        covering.cover_edges[:-1] + ((0, 0),), covering.polygon_holonomies,
    )
    with pytest.raises(ValueError):
        cov.cochain_from_covering(broken)


def test_disjoint_copies_detected_as_coboundary():
    rng = random.Random(13)
    cx = k3()
    b = ch.random_cochain0(cx, SYM2, rng)
    covering = cov.covering_from_cochain(ch.delta0(b))
    back = cov.cochain_from_covering(covering)
    assert ch.is_coboundary_exact(back)


# -- levels ------------------------------------------------------------------------------


def test_level_decomposition_bijective():
    a = Cochain1(ab_b(), SYM2, (SWAP, ID2))
    covering = cov.covering_from_cochain(a)
    decomposition = cov.levels(covering)
    assert len(decomposition.levels) == 2
    for level in decomposition.levels:
        assert len(level) == covering.base.n_vertices


def test_level_crossing_examples():
    assert cov.level_crossing_norm(ch.identity_cochain1(k3(), SYM2)) == 0
    hexagon = Cochain1(k3(), SYM2, (SWAP, SWAP, ID2))
    # make it a cocycle first: delta over the triangle must vanish
    if not ch.is_cocycle(hexagon):
        hexagon = Cochain1(k3(), SYM2, (SWAP, ID2, SWAP))
    assert ch.is_cocycle(hexagon)
    assert cov.level_crossing_norm(hexagon) == ch.norm(hexagon)
    for n in (2, 3, 4):
        cyc = Perm(tuple(range(1, n)) + (0,))
        a = Cochain1(ab_b(), Coefficient.sym(n), (cyc, Perm.identity(n)))
        assert cov.level_crossing_norm(a) == Fraction(1, 2)


def test_level_crossing_rejects_non_cocycles():
    a = Cochain1(k3(), SYM2, (SWAP, ID2, ID2))
    with pytest.raises(ValueError):
        cov.level_crossing_norm(a)


def test_crossing_fraction_equals_norm_for_all_cochains():
    rng = random.Random(17)
    for _ in range(50):
        cx = random_desk_complex(rng)
        a = ch.random_cochain1(cx, Coefficient.sym(rng.randint(2, 3)), rng)
        covering = cov.covering_from_cochain(a)
        assert covering.crossing_fraction() == ch.norm(a)


# -- enumeration -----------------------------------------------------------------------------


def test_enumerate_cocycles_k3_single_class():
    reps = cov.enumerate_cocycles(k3(), SYM2)
    assert len(reps) == 1
    assert all(ch.vis_id(v) for v in reps[0].values)


def test_enumerate_cocycles_ab_b():
    reps = cov.enumerate_cocycles(ab_b(), SYM2)
    assert len(reps) == 2
    values = {rep.values for rep in reps}
    assert values == {(ID2, ID2), (SWAP, ID2)}


def test_enumerate_cocycles_t_squared():
    cx = cpx.presentation_complex(cpx.presentation("t", "t^2"))
    reps = cov.enumerate_cocycles(cx, SYM2)
    assert {rep.values for rep in reps} == {(ID2,), (SWAP,)}


def test_enumerated_cocycles_verify_and_dedupe():
    rng = random.Random(19)
    for _ in range(20):
        cx = random_desk_complex(rng)
        coeff = Coefficient.sym(2)
        reps = cov.enumerate_cocycles(cx, coeff)
        assert all(ch.is_cocycle(rep) for rep in reps)
        tree = cpx.spanning_tree(cx, 0)
        for rep in reps:
            assert all(ch.vis_id(rep.values[e]) for e in tree)
        for i, r1 in enumerate(reps):
            for r2 in reps[i + 1 :]:
                assert not ch.same_orbit(r1, r2)


def test_orbit_closure_covers_all_cocycles():
    # brute-force oracle on a tiny complex: every cocycle lies in some
    # enumerated representative's orbit
    import itertools

    cx = cpx.presentation_complex(cpx.presentation("a,b", "b", "a^2"))
    coeff = SYM2
    reps = cov.enumerate_cocycles(cx, coeff)
    els = ch.velements(coeff)
    all_cocycles = [
        Cochain1(cx, coeff, values)
        for values in itertools.product(els, repeat=len(cx.edges))
        if ch.is_cocycle(Cochain1(cx, coeff, values))
    ]
    for z in all_cocycles:
        assert any(ch.same_orbit(z, rep) for rep in reps)


def test_size_guard_on_enumeration():
    with pytest.raises(SizeGuardExceeded):
        cov.enumerate_cocycles(cpx.spherical_building(2), SYM2)


# -- cohomology vanishing ------------------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3])
def test_h1_vanishes_for_complete_complexes(n):
    vanishes, witness = cov.h1_vanishes_at_level(cpx.complete_complex(3), Coefficient.sym(n))
    assert vanishes and witness is None


def test_h1_does_not_vanish_with_witness():
    vanishes, witness = cov.h1_vanishes_at_level(ab_b(), SYM2)
    assert not vanishes
    assert witness.values == (SWAP, ID2)
    vanishes, witness = cov.h1_vanishes_at_level(
        cpx.presentation_complex(cpx.presentation("t", "t^2")), SYM2
    )
    assert not vanishes and witness is not None


# -- export ------------------------------------------------------------------------------------------


def test_covering_export_projection():
    a = Cochain1(k3(), SYM2, (SWAP, ID2, ID2))
    covering = cov.covering_from_cochain(a)
    data = cov.covering_to_dict(covering, "base.json")
    assert data["degree"] == 2 and data["base"] == "base.json"
    assert data["vertices"] == 6
    assert data["projection"]["v0"] == "v0" and data["projection"]["v1"] == "v0"
    assert data["projection"]["e5"] == "e2"


def test_free_product_with_trivial_factor_preserves_cocycle_classes():
    # the contracted-complete factor presents the trivial group, so the free
    # product presents the same group: cocycle classes must biject
    base = cpx.presentation_complex(cpx.presentation("t", "t^2"))
    fused = cpx.presentation_complex(
        cpx.free_product_presentation(
            cpx.presentation("t", "t^2"),
            cpx.contracted_complete_presentation(4),
        )
    )
    for n in (2, 3):
        coeff = Coefficient.sym(n)
        a = cov.enumerate_cocycles(base, coeff)
        b = cov.enumerate_cocycles(fused, coeff)
        assert len(a) == len(b)
        # the extra generators carry the identity on every class
        for rep in b:
            assert all(ch.vis_id(v) for v in rep.values[1:])
