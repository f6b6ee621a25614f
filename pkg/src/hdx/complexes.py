"""Polygonal complexes: measured 2-dimensional complexes, generators, JSON i/o.

A complex has vertices 0..N-1, an edge table, and polygons glued along closed
cyclically reduced edge paths.  Oriented edges are encoded as *darts*: dart
``2*e`` traverses edge ``e`` from src to dst, dart ``2*e + 1`` the other way.
Every polygon stores one canonical perimeter (the lexicographically least of
its 2*len orientations); the other orientations are derived views.

Measures live on unoriented cells as exact fractions; sampling an oriented
cell means sampling an unoriented one and a uniform orientation.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .errors import SchemaError

MEASURE_TOL = Fraction(1, 10**12)


def reverse_dart(dart: int) -> int:
    return dart ^ 1


def dart_edge(dart: int) -> int:
    return dart >> 1


@dataclass(frozen=True)
class OrientedEdge:
    edge: int
    reversed: bool
    src: int
    dst: int

    @property
    def dart(self) -> int:
        return 2 * self.edge + (1 if self.reversed else 0)


@dataclass(frozen=True)
class OrientedPolygon:
    """One of the 2*len orientations of a polygon: rotation then optional flip."""

    polygon: int
    rotation: int
    reversed: bool
    darts: tuple[int, ...]


def _rotations_and_reversals(perimeter: tuple[int, ...]):
    ell = len(perimeter)
    rev = tuple(reverse_dart(d) for d in reversed(perimeter))
    for r in range(ell):
        yield (r, False, perimeter[r:] + perimeter[:r])
        yield (r, True, rev[r:] + rev[:r])


def canonical_perimeter(perimeter: tuple[int, ...]) -> tuple[int, ...]:
    return min(darts for _, _, darts in _rotations_and_reversals(perimeter))


@dataclass(frozen=True)
class Measures:
    """Probability measures on vertices, edges and polygons.

    ``spec`` remembers how each level was declared ("uniform", "descending"
    or None for an explicit vector) so files round-trip exactly.
    """

    mu0: tuple[Fraction, ...]
    mu1: tuple[Fraction, ...]
    mu2: tuple[Fraction, ...]
    spec: tuple[str | None, str | None, str | None] = (None, None, None)


class Complex:
    """A measured 2-dimensional polygonal complex (polygons may be absent)."""

    def __init__(self, n_vertices, edges, polygons=(), measures=None, labels=None):
        if n_vertices < 1:
            raise SchemaError("a complex needs at least one vertex")
        self.n_vertices = int(n_vertices)
        self.edges = tuple((int(s), int(t)) for s, t in edges)
        for eid, (s, t) in enumerate(self.edges):
            if not (0 <= s < n_vertices and 0 <= t < n_vertices):
                raise SchemaError(f"edge {eid} references a missing vertex: ({s}, {t})")
        self.polygons = tuple(
            canonical_perimeter(self._check_perimeter(pid, tuple(p)))
            for pid, p in enumerate(polygons)
        )
        self.labels = labels

        # adjacency indices
        out = [[] for _ in range(self.n_vertices)]
        for eid, (s, t) in enumerate(self.edges):
            out[s].append(2 * eid)
            out[t].append(2 * eid + 1)
        self.out_darts = tuple(tuple(sorted(ds)) for ds in out)
        epols = [[] for _ in self.edges]
        for pid, per in enumerate(self.polygons):
            for d in per:
                epols[dart_edge(d)].append(pid)
        self.edge_polygons = tuple(tuple(ps) for ps in epols)

        self.is_connected = self._compute_connected()
        self.measures = measures if measures is not None else default_measures(self)
        _validate_measures(self, self.measures)

    # -- construction helpers -------------------------------------------------

    def _check_perimeter(self, pid, darts):
        if not darts:
            raise SchemaError(f"polygon {pid} has an empty perimeter")
        for d in darts:
            if not (0 <= dart_edge(d) < len(self.edges)):
                raise SchemaError(f"polygon {pid} references a missing edge {dart_edge(d)}")
        ell = len(darts)
        for k in range(ell):
            if self.dart_dst(darts[k]) != self.dart_src(darts[(k + 1) % ell]):
                raise SchemaError(f"polygon {pid}: perimeter is not a closed path")
        for k in range(ell):
            nxt = darts[(k + 1) % ell]
            if ell > 1 and nxt == reverse_dart(darts[k]):
                raise SchemaError(f"polygon {pid}: perimeter is not cyclically reduced")
        return darts

    def _compute_connected(self) -> bool:
        seen = [False] * self.n_vertices
        seen[0] = True
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for d in self.out_darts[v]:
                u = self.dart_dst(d)
                if not seen[u]:
                    seen[u] = True
                    queue.append(u)
        return all(seen)

    # -- dart geometry ---------------------------------------------------------

    def dart_src(self, dart: int) -> int:
        s, t = self.edges[dart_edge(dart)]
        return t if dart & 1 else s

    def dart_dst(self, dart: int) -> int:
        s, t = self.edges[dart_edge(dart)]
        return s if dart & 1 else t

    def oriented(self, dart: int) -> OrientedEdge:
        return OrientedEdge(dart_edge(dart), bool(dart & 1), self.dart_src(dart), self.dart_dst(dart))

    def is_loop(self, eid: int) -> bool:
        s, t = self.edges[eid]
        return s == t

    def degree(self, v: int) -> int:
        return len(self.out_darts[v])

    # -- polygons ---------------------------------------------------------------

    def polygon_orientations(self, pid: int) -> list[OrientedPolygon]:
        """All 2*len orientations of polygon ``pid``."""
        return [
            OrientedPolygon(pid, r, flip, darts)
            for r, flip, darts in _rotations_and_reversals(self.polygons[pid])
        ]

    def is_simplicial(self) -> bool:
        """All polygons are triangles on three distinct vertices, and the
        1-skeleton is simple (no loops or parallel edges)."""
        pairs = set()
        for eid, (s, t) in enumerate(self.edges):
            if s == t or (min(s, t), max(s, t)) in pairs:
                return False
            pairs.add((min(s, t), max(s, t)))
        for per in self.polygons:
            if len(per) != 3:
                return False
            verts = {self.dart_src(d) for d in per}
            if len(verts) != 3:
                return False
        return True

    def polygon_vertices(self, pid: int) -> tuple[int, ...]:
        return tuple(self.dart_src(d) for d in self.polygons[pid])

    # -- comparisons -------------------------------------------------------------

    def same_as(self, other: "Complex") -> bool:
        return (
            self.n_vertices == other.n_vertices
            and self.edges == other.edges
            and self.polygons == other.polygons
            and self.measures.mu0 == other.measures.mu0
            and self.measures.mu1 == other.measures.mu1
            and self.measures.mu2 == other.measures.mu2
        )

    def __repr__(self) -> str:
        return (
            f"Complex(V={self.n_vertices}, E={len(self.edges)}, "
            f"P={len(self.polygons)}, connected={self.is_connected})"
        )


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------


def _edge_coface_weights(cx: Complex, mu2) -> list[Fraction]:
    """Per edge, the mu2-mass of polygons containing it, with the multiplicity
    of its appearances in each perimeter."""
    acc = [Fraction(0)] * len(cx.edges)
    for pid, per in enumerate(cx.polygons):
        for d in per:
            acc[dart_edge(d)] += mu2[pid]
    return acc


def _vertex_coface_weights(cx: Complex, mu1) -> list[Fraction]:
    """Per vertex, the mu1-mass of incident edges; a loop counts twice."""
    acc = [Fraction(0)] * cx.n_vertices
    for eid, (s, t) in enumerate(cx.edges):
        acc[s] += mu1[eid]
        acc[t] += mu1[eid]
    return acc


def _normalize(weights) -> tuple[Fraction, ...]:
    total = sum(weights)
    if total <= 0:
        raise SchemaError("descending measure has no mass to descend from")
    return tuple(Fraction(w) / total for w in weights)


def _uniform(k: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(1, k) for _ in range(k)) if k else ()


def resolve_measures(cx: Complex, mu0="descending", mu1="descending", mu2="uniform") -> Measures:
    """Resolve symbolic measure declarations against a complex's cell tables.

    Descending resolves top-down: mu1 from mu2, then mu0 from mu1.
    """
    spec2 = mu2 if isinstance(mu2, str) else None
    if mu2 == "uniform":
        m2 = _uniform(len(cx.polygons))
    elif isinstance(mu2, str):
        raise SchemaError(f"unknown mu2 spec {mu2!r}")
    else:
        m2 = tuple(Fraction(x) for x in mu2)

    spec1 = mu1 if isinstance(mu1, str) else None
    if mu1 == "uniform":
        m1 = _uniform(len(cx.edges))
    elif mu1 == "descending":
        m1 = _normalize(_edge_coface_weights(cx, m2))
    elif isinstance(mu1, str):
        raise SchemaError(f"unknown mu1 spec {mu1!r}")
    else:
        m1 = tuple(Fraction(x) for x in mu1)

    spec0 = mu0 if isinstance(mu0, str) else None
    if mu0 == "uniform":
        m0 = _uniform(cx.n_vertices)
    elif mu0 == "descending":
        m0 = _normalize(_vertex_coface_weights(cx, m1))
    elif isinstance(mu0, str):
        raise SchemaError(f"unknown mu0 spec {mu0!r}")
    else:
        m0 = tuple(Fraction(x) for x in mu0)

    return Measures(m0, m1, m2, (spec0, spec1, spec2))


def default_measures(cx: Complex) -> Measures:
    """Uniform on the top dimension present, descending below."""
    if cx.polygons:
        return resolve_measures(cx, "descending", "descending", "uniform")
    return resolve_measures(cx, "descending", "uniform", ())


def _validate_measures(cx: Complex, ms: Measures) -> None:
    for name, mu, count in (("mu0", ms.mu0, cx.n_vertices), ("mu1", ms.mu1, len(cx.edges)), ("mu2", ms.mu2, len(cx.polygons))):
        if len(mu) != count:
            raise SchemaError(f"{name} has {len(mu)} entries, expected {count}")
        if any(x < 0 for x in mu):
            raise SchemaError(f"{name} has a negative entry")
        if count and abs(sum(mu) - 1) > MEASURE_TOL:
            raise SchemaError(f"{name} sums to {float(sum(mu))}, expected 1")
    if ms.spec[1] == "descending" and cx.edges:
        target = _normalize(_edge_coface_weights(cx, ms.mu2))
        if any(abs(a - b) > MEASURE_TOL for a, b in zip(ms.mu1, target)):
            raise SchemaError("mu1 declared descending but is not proportional to coface mass")
    if ms.spec[0] == "descending":
        target = _normalize(_vertex_coface_weights(cx, ms.mu1))
        if any(abs(a - b) > MEASURE_TOL for a, b in zip(ms.mu0, target)):
            raise SchemaError("mu0 declared descending but is not proportional to coface mass")


def is_descending_mu0(cx: Complex) -> bool:
    target = _normalize(_vertex_coface_weights(cx, cx.measures.mu1))
    return all(abs(a - b) <= MEASURE_TOL for a, b in zip(cx.measures.mu0, target))


def is_descending_mu1(cx: Complex) -> bool:
    if not cx.polygons:
        return False
    target = _normalize(_edge_coface_weights(cx, cx.measures.mu2))
    return all(abs(a - b) <= MEASURE_TOL for a, b in zip(cx.measures.mu1, target))


# ---------------------------------------------------------------------------
# group presentations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Presentation:
    """A finite presentation: named generators with weights, relator words.

    Relators are tuples of (generator index, +1/-1) letters, cyclically
    reduced and nonempty.  ``factors`` records the free factors when the
    presentation was built as a free product.
    """

    generators: tuple[str, ...]
    relators: tuple[tuple[tuple[int, int], ...], ...]
    gen_weights: tuple[Fraction, ...] = ()
    rel_weights: tuple[Fraction, ...] = ()
    factors: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(set(self.generators)) != len(self.generators):
            raise SchemaError("duplicate generator names")
        for ridx, word in enumerate(self.relators):
            if not word:
                raise SchemaError(f"relator {ridx} is empty")
            for g, e in word:
                if not (0 <= g < len(self.generators)) or e not in (1, -1):
                    raise SchemaError(f"relator {ridx} has a bad letter ({g}, {e})")
            for k in range(len(word)):
                g1, e1 = word[k]
                g2, e2 = word[(k + 1) % len(word)]
                if len(word) > 1 and g1 == g2 and e1 == -e2:
                    raise SchemaError(f"relator {ridx} is not cyclically reduced")
        if not self.gen_weights:
            object.__setattr__(self, "gen_weights", _uniform(len(self.generators)))
        if not self.rel_weights:
            object.__setattr__(self, "rel_weights", _uniform(len(self.relators)))

    def word_str(self, ridx: int) -> str:
        return " ".join(
            self.generators[g] + ("" if e == 1 else "^-1") for g, e in self.relators[ridx]
        )


def parse_word(text: str, generators) -> tuple[tuple[int, int], ...]:
    """Parse a relator like ``"a b a^-1 b^-1"`` or ``"t^2"``."""
    index = {name: i for i, name in enumerate(generators)}
    letters = []
    for token in text.replace("*", " ").split():
        name, _, exp = token.partition("^")
        if name not in index:
            raise SchemaError(f"unknown generator {name!r} in word {text!r}")
        power = int(exp) if exp else 1
        if power == 0:
            raise SchemaError(f"zero power in word {text!r}")
        sign = 1 if power > 0 else -1
        letters.extend((index[name], sign) for _ in range(abs(power)))
    return tuple(letters)


def presentation(gens: str, *relator_words: str) -> Presentation:
    """Convenience builder: ``presentation("a,b", "b")`` for <a,b | b>."""
    names = tuple(g.strip() for g in gens.split(","))
    return Presentation(names, tuple(parse_word(w, names) for w in relator_words))


def presentation_complex(p: Presentation) -> Complex:
    """One vertex, a loop per generator, a polygon tracing each relator."""
    if not p.relators:
        raise SchemaError("a presentation complex needs at least one relator (mu2 undefined)")
    edges = [(0, 0)] * len(p.generators)
    polygons = [
        tuple(2 * g + (0 if e == 1 else 1) for g, e in word) for word in p.relators
    ]
    cx = Complex(1, edges, polygons, measures=None)
    cx.measures = resolve_measures(cx, (Fraction(1),), p.gen_weights, p.rel_weights)
    _validate_measures(cx, cx.measures)
    return cx


def free_product_presentation(p1: Presentation, p2: Presentation) -> Presentation:
    """Union of generators and relators, with uniform weights; colliding
    names from the second factor get a tick suffix."""
    taken = set(p1.generators)
    renamed = []
    for name in p2.generators:
        new = name
        while new in taken:
            new += "'"
        taken.add(new)
        renamed.append(new)
    offset = len(p1.generators)
    relators = list(p1.relators) + [
        tuple((g + offset, e) for g, e in word) for word in p2.relators
    ]
    return Presentation(
        p1.generators + tuple(renamed), tuple(relators), factors=(p1, p2)
    )


def contracted_complete_presentation(d: int) -> Presentation:
    """Presentation of the trivial group: the complete complex on d vertices
    with the path spanning tree 1-2-...-d contracted.  Generators are the
    non-tree edges, relators the images of the triangles."""
    if d < 3:
        raise ValueError(f"need d >= 3, got {d}")
    gen_index = {}
    names = []
    for i in range(1, d + 1):
        for j in range(i + 1, d + 1):
            if j != i + 1:
                gen_index[(i, j)] = len(names)
                names.append(f"x{i}_{j}")
    relators = []
    for i, j, k in combinations(range(1, d + 1), 3):
        word = []
        for pair, sign in (((i, j), 1), ((j, k), 1), ((i, k), -1)):
            if pair in gen_index:
                word.append((gen_index[pair], sign))
        relators.append(tuple(word))
    return Presentation(tuple(names), tuple(relators))


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def _triangle_perimeter(u: int, v: int, w: int, edge_id) -> tuple[int, int, int]:
    """Darts tracing u -> v -> w -> u through edges stored with src < dst."""
    def dart(a, b):
        eid = edge_id[(min(a, b), max(a, b))]
        return 2 * eid + (0 if a < b else 1)

    return (dart(u, v), dart(v, w), dart(w, u))


def complete_complex(d: int) -> Complex:
    """The 2-skeleton of the d-simplex: d+1 vertices, all edges, all triangles.
    Uniform measures on every dimension."""
    if d < 2:
        raise ValueError(f"need d >= 2, got {d}")
    n = d + 1
    pairs = list(combinations(range(n), 2))
    edge_id = {p: i for i, p in enumerate(pairs)}
    polygons = [
        _triangle_perimeter(i, j, k, edge_id) for i, j, k in combinations(range(n), 3)
    ]
    cx = Complex(n, pairs, polygons, measures=None)
    cx.measures = resolve_measures(cx, "uniform", "uniform", "uniform")
    _validate_measures(cx, cx.measures)
    return cx


def _rref(rows: list[list[int]], q: int) -> tuple[tuple[int, ...], ...]:
    rows = [list(r) for r in rows]
    pivot_col = 0
    out = []
    while rows and pivot_col < 4:
        pivot = next((r for r in rows if r[pivot_col] % q != 0), None)
        if pivot is None:
            pivot_col += 1
            continue
        rows.remove(pivot)
        inv = pow(pivot[pivot_col], q - 2, q) if q > 2 else 1
        pivot = [(x * inv) % q for x in pivot]
        rows = [
            [(r[c] - r[pivot_col] * pivot[c]) % q for c in range(4)] for r in rows
        ]
        out = [
            [(o[c] - o[pivot_col] * pivot[c]) % q for c in range(4)] for o in out
        ]
        out.append(pivot)
        rows = [r for r in rows if any(x % q for x in r)]
        pivot_col += 1
    return tuple(tuple(r) for r in out)


def _span_vectors(basis, q: int) -> frozenset:
    from itertools import product as iproduct

    vecs = set()
    for coeffs in iproduct(range(q), repeat=len(basis)):
        v = [0, 0, 0, 0]
        for c, b in zip(coeffs, basis):
            for i in range(4):
                v[i] = (v[i] + c * b[i]) % q
        vecs.add(tuple(v))
    return frozenset(vecs)


def spherical_building(q: int) -> Complex:
    """Flag complex of the proper nonzero subspaces of F_q^4 ordered by
    containment: vertices are subspaces, edges containment pairs, triangles
    the full flags.  mu2 uniform, mu1 and mu0 descending.

    Only prime q is supported (field arithmetic is mod-q).
    """
    if q < 2 or any(q % p == 0 for p in range(2, q)):
        raise ValueError(f"q must be prime, got {q}")
    from itertools import product as iproduct

    # projective points: vectors normalized to leading coefficient 1
    proj = [
        v for v in iproduct(range(q), repeat=4)
        if any(v) and v[next(i for i in range(4) if v[i])] == 1
    ]
    dim1 = sorted({_rref([list(v)], q) for v in proj})
    dim2 = sorted({_rref([list(a[0]), list(b[0])], q) for a, b in combinations(dim1, 2)})
    dim2 = [s for s in dim2 if len(s) == 2]
    dim3 = sorted({
        _rref([list(a[0]), list(b[0]), list(c[0])], q)
        for a, b in combinations(dim1, 2) for c in dim1
    })
    dim3 = [s for s in dim3 if len(s) == 3]

    subspaces = list(dim1) + list(dim2) + list(dim3)
    index = {s: i for i, s in enumerate(subspaces)}
    span = {s: _span_vectors(s, q) for s in subspaces}

    edges = []
    edge_id = {}
    for small, large in ((dim1, dim2), (dim1, dim3), (dim2, dim3)):
        for a in small:
            for b in large:
                if span[a] <= span[b]:
                    u, v = sorted((index[a], index[b]))
                    edge_id[(u, v)] = len(edges)
                    edges.append((u, v))

    polygons = []
    for b in dim2:
        below = [a for a in dim1 if span[a] <= span[b]]
        above = [c for c in dim3 if span[b] <= span[c]]
        for a in below:
            for c in above:
                polygons.append(_triangle_perimeter(index[a], index[b], index[c], edge_id))

    cx = Complex(len(subspaces), edges, polygons, measures=None, labels=tuple(subspaces))
    cx.measures = resolve_measures(cx, "descending", "descending", "uniform")
    _validate_measures(cx, cx.measures)
    return cx


def cyclic_cover_complex(m: int) -> Complex:
    """The m-fold cyclic cover of the <a,b | b> presentation complex: a cycle
    of m a-edges with a b-loop (and its length-1 polygon) at each vertex."""
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    edges = [(i, (i + 1) % m) for i in range(m)] + [(i, i) for i in range(m)]
    polygons = [(2 * (m + i),) for i in range(m)]
    cx = Complex(m, edges, polygons, measures=None)
    cx.measures = resolve_measures(cx, "uniform", "uniform", "uniform")
    _validate_measures(cx, cx.measures)
    return cx


# ---------------------------------------------------------------------------
# links and trees
# ---------------------------------------------------------------------------


def link(cx: Complex, v: int) -> Complex:
    """The link of a vertex in a simplicial complex: the graph of its
    neighbours, an edge for each triangle through v, with the edge measure
    inherited from mu2 and the vertex measure descending from it."""
    if not cx.is_simplicial():
        raise SchemaError("links are only defined for simplicial complexes")
    neighbours = sorted({cx.dart_dst(d) for d in cx.out_darts[v]})
    vid = {u: i for i, u in enumerate(neighbours)}
    weights: dict[tuple[int, int], Fraction] = {}
    for pid, per in enumerate(cx.polygons):
        verts = cx.polygon_vertices(pid)
        if v in verts:
            u, w = sorted(x for x in verts if x != v)
            key = (vid[u], vid[w])
            weights[key] = weights.get(key, Fraction(0)) + cx.measures.mu2[pid]
    pairs = sorted(weights)
    total = sum(weights.values())
    if total == 0:
        raise SchemaError(f"vertex {v} lies in no polygon; its link carries no measure")
    mu1 = tuple(weights[p] / total for p in pairs)
    lk = Complex(len(neighbours), pairs, (), measures=None, labels=tuple(neighbours))
    lk.measures = resolve_measures(lk, "descending", mu1, ())
    _validate_measures(lk, lk.measures)
    return lk


def spanning_tree(cx: Complex, root: int = 0) -> frozenset[int]:
    """BFS spanning tree edge set with lowest-id tie-breaking."""
    if not cx.is_connected:
        raise ValueError("spanning tree requires a connected complex")
    seen = [False] * cx.n_vertices
    seen[root] = True
    tree = set()
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for d in sorted(cx.out_darts[v], key=lambda d: (cx.dart_dst(d), dart_edge(d))):
            u = cx.dart_dst(d)
            if not seen[u]:
                seen[u] = True
                tree.add(dart_edge(d))
                queue.append(u)
    return frozenset(tree)


def tree_parent_darts(cx: Complex, tree: frozenset[int], root: int = 0) -> list[int | None]:
    """For each vertex, the dart pointing one step toward the root inside the
    tree (None at the root).  Raises if the edge set does not span."""
    adj = [[] for _ in range(cx.n_vertices)]
    for eid in sorted(tree):
        s, t = cx.edges[eid]
        if s == t:
            raise ValueError(f"tree contains loop edge {eid}")
        adj[s].append((t, 2 * eid + 1))
        adj[t].append((s, 2 * eid))
    parent: list[int | None] = [None] * cx.n_vertices
    seen = [False] * cx.n_vertices
    seen[root] = True
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for u, dart_back in sorted(adj[v]):
            if not seen[u]:
                seen[u] = True
                parent[u] = dart_back
                queue.append(u)
    if not all(seen):
        raise ValueError("edge set does not span the complex")
    return parent


def tree_path_to_root(cx: Complex, parent, v: int) -> list[int]:
    """Darts walking from v to the root along parent pointers."""
    path = []
    while parent[v] is not None:
        d = parent[v]
        path.append(d)
        v = cx.dart_dst(d)
    return path


def tree_radius(cx: Complex, parent) -> int:
    return max(len(tree_path_to_root(cx, parent, v)) for v in range(cx.n_vertices))


def graph_distances(cx: Complex, source: int) -> list[int]:
    dist = [-1] * cx.n_vertices
    dist[source] = 0
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for d in cx.out_darts[v]:
            u = cx.dart_dst(d)
            if dist[u] < 0:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def diameter(cx: Complex) -> int:
    if not cx.is_connected:
        raise ValueError("diameter of a disconnected complex is infinite")
    return max(max(graph_distances(cx, v)) for v in range(cx.n_vertices))


def connected_components(cx: Complex) -> list[list[int]]:
    seen = [False] * cx.n_vertices
    comps = []
    for start in range(cx.n_vertices):
        if seen[start]:
            continue
        comp = [start]
        seen[start] = True
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for d in cx.out_darts[v]:
                u = cx.dart_dst(d)
                if not seen[u]:
                    seen[u] = True
                    comp.append(u)
                    queue.append(u)
        comps.append(sorted(comp))
    return comps


# ---------------------------------------------------------------------------
# JSON i/o
# ---------------------------------------------------------------------------


def _measure_to_json(mu, spec):
    if spec is not None:
        return spec
    return [float(x) for x in mu]


def complex_to_dict(cx: Complex) -> dict:
    return {
        "vertices": cx.n_vertices,
        "edges": [{"id": i, "src": s, "dst": t} for i, (s, t) in enumerate(cx.edges)],
        "polygons": [
            {
                "id": i,
                "perimeter": [
                    {"edge": dart_edge(d), "reversed": bool(d & 1)} for d in per
                ],
            }
            for i, per in enumerate(cx.polygons)
        ],
        "measures": {
            "mu0": _measure_to_json(cx.measures.mu0, cx.measures.spec[0]),
            "mu1": _measure_to_json(cx.measures.mu1, cx.measures.spec[1]),
            "mu2": _measure_to_json(cx.measures.mu2, cx.measures.spec[2]),
        },
    }


def _measure_from_json(value, what):
    if isinstance(value, str):
        if value not in ("uniform", "descending"):
            raise SchemaError(f"{what}: unknown measure spec {value!r}")
        return value
    if not isinstance(value, list):
        raise SchemaError(f"{what}: expected a list or spec string")
    return tuple(Fraction(repr(x)) if isinstance(x, float) else Fraction(x) for x in value)


def complex_from_dict(data: dict) -> Complex:
    try:
        n = int(data["vertices"])
        raw_edges = data["edges"]
        raw_polys = data.get("polygons", [])
        raw_measures = data.get("measures", {})
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed complex file: {exc}") from exc
    for pos, e in enumerate(raw_edges):
        if e.get("id") != pos:
            raise SchemaError(f"edge ids must be contiguous from 0; saw {e.get('id')} at {pos}")
    for pos, p in enumerate(raw_polys):
        if p.get("id") != pos:
            raise SchemaError(f"polygon ids must be contiguous from 0; saw {p.get('id')} at {pos}")
    edges = [(e["src"], e["dst"]) for e in raw_edges]
    polygons = [
        tuple(2 * step["edge"] + (1 if step["reversed"] else 0) for step in p["perimeter"])
        for p in raw_polys
    ]
    cx = Complex(n, edges, polygons, measures=None)
    cx.measures = resolve_measures(
        cx,
        _measure_from_json(raw_measures.get("mu0", "descending"), "mu0"),
        _measure_from_json(raw_measures.get("mu1", "descending"), "mu1"),
        _measure_from_json(raw_measures.get("mu2", "uniform"), "mu2"),
    )
    _validate_measures(cx, cx.measures)
    return cx


def save_complex(cx: Complex, path) -> None:
    with open(path, "w") as fh:
        json.dump(complex_to_dict(cx), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_complex(path) -> Complex:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    return complex_from_dict(data)
