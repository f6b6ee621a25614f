"""The dictionary between Sym(n)-valued 1-cochains and degree-n covers.

A 1-cochain a on a connected complex determines a cover of the 1-skeleton
with vertex set V(X) x [n] and one lift (e, i) of each edge e: x -> y per
level i, running from (x, a(e).i) to (y, i).  Cocycles are exactly the
cochains whose polygon perimeters lift closed at every level; coboundaries
correspond to disjoint unions of the base.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .cochain import (
    Cochain1,
    Coefficient,
    delta1,
    identity_value,
    is_cocycle,
    vapply,
    vconj,
    velements,
    vinv,
    vis_id,
    vmul,
)
from .complexes import Complex, Measures, dart_edge, spanning_tree
from .errors import EXACT_CANDIDATE_LIMIT, SizeGuardExceeded


@dataclass(frozen=True)
class Covering:
    """A degree-n cover of a complex's 1-skeleton with lift bookkeeping.

    Cover vertex (x, i) is node ``x * n + i``; the lift (e, i) of edge e is
    cover edge ``e * n + i``, with endpoints per the defining cochain.
    """

    base: Complex
    degree: int
    cochain: Cochain1
    cover_edges: tuple[tuple[int, int], ...]  # (src node, dst node) per lift
    polygon_holonomies: tuple  # delta1 value per base polygon

    def node(self, x: int, i: int) -> int:
        return x * self.degree + i

    def node_vertex(self, node: int) -> int:
        return node // self.degree

    def node_level(self, node: int) -> int:
        return node % self.degree

    def fiber(self, x: int) -> tuple[int, ...]:
        return tuple(self.node(x, i) for i in range(self.degree))

    def closed_polygon_lifts(self, pid: int) -> int:
        """Number of levels at which the polygon's perimeter lifts closed."""
        h = self.polygon_holonomies[pid]
        return sum(1 for i in range(self.degree) if vapply(h, i) == i)

    def is_connected(self) -> bool:
        total = self.base.n_vertices * self.degree
        adj = [[] for _ in range(total)]
        for s, t in self.cover_edges:
            adj[s].append(t)
            adj[t].append(s)
        seen = [False] * total
        seen[0] = True
        queue = deque([0])
        count = 1
        while queue:
            v = queue.popleft()
            for u in adj[v]:
                if not seen[u]:
                    seen[u] = True
                    count += 1
                    queue.append(u)
        return count == total

    def components(self) -> list[list[int]]:
        total = self.base.n_vertices * self.degree
        adj = [[] for _ in range(total)]
        for s, t in self.cover_edges:
            adj[s].append(t)
            adj[t].append(s)
        seen = [False] * total
        out = []
        for start in range(total):
            if seen[start]:
                continue
            comp = [start]
            seen[start] = True
            queue = deque([start])
            while queue:
                v = queue.popleft()
                for u in adj[v]:
                    if not seen[u]:
                        seen[u] = True
                        comp.append(u)
                        queue.append(u)
            out.append(sorted(comp))
        return out

    def crossing_fraction(self) -> Fraction:
        """Probability that a sampled lifted edge has endpoints in different
        levels (edge by mu1, level uniform).  For cocycles this equals the
        cochain's norm."""
        mu1 = self.base.measures.mu1
        n = self.degree
        total = Fraction(0)
        for e in range(len(self.base.edges)):
            crossing = sum(
                1
                for i in range(n)
                if self.node_level(self.cover_edges[e * n + i][0]) != i
            )
            total += mu1[e] * Fraction(crossing, n)
        return total


@dataclass(frozen=True)
class LevelDecomposition:
    """Partition of cover nodes into levels V(X) x {i}."""

    levels: tuple[tuple[int, ...], ...]

    def indicator(self, i: int, total: int) -> tuple[int, ...]:
        members = set(self.levels[i])
        return tuple(1 if v in members else 0 for v in range(total))


def covering_from_cochain(a: Cochain1) -> Covering:
    """Build the cover per the correspondence equations."""
    cx = a.cx
    n = a.coeff.degree
    edges = []
    for e, (x, y) in enumerate(cx.edges):
        val = a.values[e]
        for i in range(n):
            edges.append((x * n + vapply(val, i), y * n + i))
    holonomies = delta1(a).values
    return Covering(cx, n, a, tuple(edges), holonomies)


def levels(cov: Covering) -> LevelDecomposition:
    n = cov.degree
    return LevelDecomposition(
        tuple(
            tuple(x * n + i for x in range(cov.base.n_vertices)) for i in range(n)
        )
    )


def level_crossing_norm(a: Cochain1) -> Fraction:
    """Fraction of lifted edges whose endpoints sit in different levels.

    Stated for cocycles (levels of a genuine polygonal cover); equals ||a||.
    """
    if not is_cocycle(a):
        raise ValueError("level crossing norm is defined for cocycles")
    return covering_from_cochain(a).crossing_fraction()


def cochain_from_covering(cov: Covering, relabeling=None) -> Cochain1:
    """Read a 1-cochain off a labeled cover.

    ``relabeling`` optionally renames each fiber by a permutation per base
    vertex (node (x, i) becomes (x, g_x(i))); different labelings produce
    cochains in one orbit of the 0-cochain action.
    """
    base, n, coeff = cov.base, cov.degree, cov.cochain.coeff
    _validate_covering(cov)
    if relabeling is None:
        relabel = [identity_value(coeff)] * base.n_vertices
    else:
        relabel = list(relabeling)
        if len(relabel) != base.n_vertices:
            raise ValueError("one relabeling permutation per base vertex required")
    values = []
    for e, (x, y) in enumerate(base.edges):
        images = [None] * n
        for i in range(n):
            src, dst = cov.cover_edges[e * n + i]
            j_new = vapply(relabel[y], cov.node_level(dst))
            i_new = vapply(relabel[x], cov.node_level(src))
            images[j_new] = i_new
        if sorted(images) != list(range(n)):
            raise ValueError(f"fiber over edge {e} is not a perfect matching")
        if coeff.kind == "f2":
            values.append(0 if images[0] == 0 else 1)
        else:
            from .perm import Perm

            values.append(Perm(images))
    return Cochain1(base, coeff, tuple(values))


def _validate_covering(cov: Covering) -> None:
    n = cov.degree
    base = cov.base
    if len(cov.cover_edges) != n * len(base.edges):
        raise ValueError("cover must have n lifts of every base edge")
    for e, (x, y) in enumerate(base.edges):
        seen_dst = set()
        seen_src = set()
        for i in range(n):
            src, dst = cov.cover_edges[e * n + i]
            if cov.node_vertex(src) != x or cov.node_vertex(dst) != y:
                raise ValueError(f"lift ({e}, {i}) does not project onto edge {e}")
            seen_dst.add(cov.node_level(dst))
            seen_src.add(cov.node_level(src))
        if seen_dst != set(range(n)) or seen_src != set(range(n)):
            raise ValueError(f"fiber over edge {e} is not a bijection of levels")


def cover_complex(cov: Covering, with_polygons: bool = True) -> Complex:
    """Materialize the cover as a complex with uniformly lifted measures.

    Polygons are included only when every lift closes (the defining cochain
    is a cocycle); otherwise the 1-skeleton is returned.
    """
    base, n = cov.base, cov.degree
    edges = [
        (src, dst) for src, dst in cov.cover_edges
    ]
    polygons = []
    closed = all(vis_id(h) for h in cov.polygon_holonomies)
    if with_polygons and closed:
        a = cov.cochain
        for pid, per in enumerate(base.polygons):
            start = base.dart_src(per[0])
            for i in range(n):
                node = start * n + i
                lifted = []
                level = i
                for d in per:
                    e = dart_edge(d)
                    val = a.values[e]
                    if d & 1 == 0:
                        arrival = vapply(vinv(a.coeff, val), level)
                        lifted.append(2 * (e * n + arrival))
                        level = arrival
                    else:
                        lifted.append(2 * (e * n + level) + 1)
                        level = vapply(val, level)
                polygons.append(tuple(lifted))
    ms = base.measures
    lifted_measures = Measures(
        tuple(m / n for m in ms.mu0 for _ in range(n)),
        tuple(m / n for m in ms.mu1 for _ in range(n)),
        tuple(m / n for m in ms.mu2 for _ in range(n)) if polygons else (),
        (None, None, None),
    )
    labels = tuple((x, i) for x in range(base.n_vertices) for i in range(n))
    cx = Complex(base.n_vertices * n, edges, polygons, measures=lifted_measures, labels=labels)
    return cx


def covering_to_dict(cov: Covering, base_name: str = "") -> dict:
    from .complexes import complex_to_dict

    skeleton = cover_complex(cov, with_polygons=True)
    data = complex_to_dict(skeleton)
    n = cov.degree
    projection = {}
    for node in range(cov.base.n_vertices * n):
        projection[f"v{node}"] = f"v{cov.node_vertex(node)}"
    for lift in range(len(cov.cover_edges)):
        projection[f"e{lift}"] = f"e{lift // n}"
    data.update({"base": base_name, "degree": n, "projection": projection})
    return data


# -- cocycle enumeration ---------------------------------------------------------


def tree_normalized_cocycles(cx: Complex, coeff: Coefficient, tree=None, root: int = 0):
    """All cocycles that are the identity on the spanning tree, as raw value
    tuples.  Their orbit closure under the 0-cochain action is all of Z^1."""
    if not cx.is_connected:
        raise ValueError("cocycle enumeration requires a connected complex")
    if tree is None:
        tree = spanning_tree(cx, root)
    free = [e for e in range(len(cx.edges)) if e not in tree]
    els = velements(coeff)
    count = len(els) ** len(free)
    if count > EXACT_CANDIDATE_LIMIT:
        raise SizeGuardExceeded("cocycle enumeration", count, EXACT_CANDIDATE_LIMIT)
    pos = {e: k for k, e in enumerate(free)}
    ident = identity_value(coeff)

    # per polygon, the sequence of (free-edge slot, inverted?) after dropping
    # tree edges, for fast relation checking
    relations = []
    for per in cx.polygons:
        seq = []
        for d in per:
            e = dart_edge(d)
            if e in pos:
                seq.append((pos[e], bool(d & 1)))
        relations.append(seq)

    out = []
    for assignment in itertools.product(els, repeat=len(free)):
        ok = True
        for seq in relations:
            h = ident
            for slot, inverted in seq:
                v = assignment[slot]
                h = vmul(coeff, h, vinv(coeff, v) if inverted else v)
            if not vis_id(h):
                ok = False
                break
        if ok:
            values = [ident] * len(cx.edges)
            for e, k in pos.items():
                values[e] = assignment[k]
            out.append(tuple(values))
    return out


def enumerate_cocycles(cx: Complex, coeff: Coefficient, root: int = 0) -> list[Cochain1]:
    """Orbit representatives of the cocycles: identity on a spanning tree,
    deduplicated under simultaneous conjugation, lexicographically least
    representative first."""
    if isinstance(coeff, int):
        coeff = Coefficient.sym(coeff)
    tn = tree_normalized_cocycles(cx, coeff, root=root)
    els = velements(coeff)
    reps = set()
    for values in tn:
        key = min(tuple(vconj(coeff, v, g) for v in values) for g in els)
        reps.add(key)
    return [Cochain1(cx, coeff, key) for key in sorted(reps)]


def h1_vanishes_at_level(cx: Complex, coeff: Coefficient):
    """True iff every cocycle at this degree is a coboundary; returns
    (vanishes, witness non-coboundary cocycle or None)."""
    from .cochain import is_coboundary_exact

    if isinstance(coeff, int):
        coeff = Coefficient.sym(coeff)
    for rep in enumerate_cocycles(cx, coeff):
        if not is_coboundary_exact(rep):
            return False, rep
    return True, None


def euler_characteristic(cx: Complex) -> int:
    return cx.n_vertices - len(cx.edges) + len(cx.polygons)
