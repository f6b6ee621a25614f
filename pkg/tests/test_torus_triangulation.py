"""The 7-vertex triangulated torus: a small pure simplicial complex with
nontrivial first cohomology.  Its vertex links are 6-cycles, so it sits
exactly on the boundary of the local spectral expansion condition, and its
cosystole is a genuine minimum over nontrivial cohomology classes."""

import itertools
from fractions import Fraction

import pytest

from hdx import cheeger as chg
from hdx import cochain as ch
from hdx import complexes as cpx
from hdx import covering as cov
from hdx import spectral as sp
from hdx.cochain import Cochain1, Coefficient


@pytest.fixture(scope="module")
def torus7():
    edges = list(itertools.combinations(range(7), 2))
    eid = {e: i for i, e in enumerate(edges)}
    triangles = []
    for i in range(7):
        for a, b, c in ((i, (i + 1) % 7, (i + 3) % 7), (i, (i + 2) % 7, (i + 3) % 7)):
            triangles.append(cpx._triangle_perimeter(a, b, c, eid))
    return cpx.Complex(7, edges, triangles)


def test_torus7_is_a_torus(torus7):
    assert torus7.is_simplicial()
    assert len(torus7.edges) == 21 and len(torus7.polygons) == 14
    assert cov.euler_characteristic(torus7) == 0
    # every edge lies in exactly two triangles, every link is a 6-cycle
    assert all(len(ps) == 2 for ps in torus7.edge_polygons)
    for v in range(7):
        lk = cpx.link(torus7, v)
        assert lk.n_vertices == 6 and len(lk.edges) == 6
        assert all(lk.degree(u) == 2 for u in range(6))


def test_torus7_sits_on_the_local_expansion_boundary(torus7):
    report = sp.local_lambda(torus7)
    # the 6-cycle has second eigenvalue cos(2*pi/6) = 1/2 exactly
    assert abs(report.local_lambda - 0.5) < 1e-10
    trickle = sp.trickling_check(torus7)
    assert trickle["skipped"] and trickle["holds"] is None
    bound = sp.cover_cosystole_bound(torus7)
    assert bound["vacuous"] and bound["bound"] is None


def test_torus7_cosystole_matches_f2_coset_oracle(torus7):
    report = chg.cosystole_sym(torus7, 2)
    assert not report.infinite

    # independent oracle: enumerate Z^1 and B^1 over F2 from scratch and
    # minimize the weight over the nontrivial cosets
    m = len(torus7.edges)
    rel_masks = []
    for per in torus7.polygons:
        mask = 0
        for d in per:
            mask ^= 1 << (d >> 1)
        rel_masks.append(mask)
    coboundaries = set()
    for bits in range(2**7):
        mask = 0
        for e, (s, t) in enumerate(torus7.edges):
            if ((bits >> s) ^ (bits >> t)) & 1:
                mask |= 1 << e
        coboundaries.add(mask)
    assert len(coboundaries) == 2**6
    # kernel basis of the relation system by elimination on the lowest bit
    pivots = {}
    for mask in rel_masks:
        for col, row in pivots.items():
            if (mask >> col) & 1:
                mask ^= row
        if mask:
            pivots[(mask & -mask).bit_length() - 1] = mask
    for c in sorted(pivots):
        for c2 in list(pivots):
            if c2 != c and (pivots[c2] >> c) & 1:
                pivots[c2] ^= pivots[c]
    basis = []
    for free in range(m):
        if free in pivots:
            continue
        vec = 1 << free
        for c, row in pivots.items():
            if (row >> free) & 1:
                vec ^= 1 << c
        basis.append(vec)
    cocycles = set()
    for combo in range(2 ** len(basis)):
        vec = 0
        for k, b in enumerate(basis):
            if (combo >> k) & 1:
                vec ^= b
        cocycles.add(vec)
    assert len(cocycles) == 2**8  # dim Z^1 = 8 over F2
    assert all(
        not (bin(bits & mask).count("1") & 1)
        for bits in cocycles for mask in rel_masks
    )
    mu1 = torus7.measures.mu1
    best = None
    for bits in cocycles - coboundaries:
        weight = sum((mu1[e] for e in range(m) if (bits >> e) & 1), Fraction(0))
        best = weight if best is None else min(best, weight)
    assert report.value == best

    witness = ch.cochain_from_dict(torus7, report.witness["cochain"])
    assert ch.is_cocycle(witness) and ch.is_connected_cochain(witness)
    assert not ch.is_coboundary_exact(witness)
    assert ch.norm(witness) == best


def test_torus7_connected_witnesses_satisfy_cover_expansion(torus7):
    reps = cov.enumerate_cocycles(torus7, Coefficient.sym(2))
    checked = 0
    for rep in reps:
        if ch.is_coboundary_exact(rep) or not ch.is_connected_cochain(rep):
            continue
        record = chg.verify_cover_expansion(rep)
        assert record["holds"]
        checked += 1
    assert checked == 3  # the three nontrivial F2 cohomology classes
