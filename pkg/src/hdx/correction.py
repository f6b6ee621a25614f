"""Constructive correction: filling search, star and cone normalization,
small-Cheeger witnesses, and corruption experiments.

The filling search writes a closed loop as a product of conjugated polygon
perimeters.  Its state is a freely and cyclically reduced loop word; a move
replaces a perimeter sub-arc appearing in the word (scanned cyclically) by
the complementary arc and costs one polygon.  Peeling a boundary cell off a
Van Kampen diagram is exactly such a move, and cyclic reduction removes the
zero-cost backtracking hair, so the move set reaches every filling of a
cyclically reduced fillable loop.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from random import Random

from . import cochain as ch
from .cochain import Cochain1, Coefficient
from .complexes import (
    Complex,
    Presentation,
    complete_complex,
    contracted_complete_presentation,
    dart_edge,
    presentation_complex,
    reverse_dart,
    spanning_tree,
    tree_parent_darts,
    tree_path_to_root,
    tree_radius,
)

MAX_FILL_CELLS = 64


@dataclass(frozen=True)
class Filling:
    """A Van Kampen product for a closed loop: cells (sigma_i, pi_i) with the
    loop equal to the product of sigma_i pi_i sigma_i^-1 after free reduction."""

    loop: tuple[int, ...]
    cells: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]

    @property
    def size(self) -> int:
        return len(self.cells)


@dataclass(frozen=True)
class FillingFailure:
    explored: int
    frontier: int
    best_length: int
    reason: str


def free_reduce(word) -> tuple[int, ...]:
    stack: list[int] = []
    for d in word:
        if stack and stack[-1] == reverse_dart(d):
            stack.pop()
        else:
            stack.append(d)
    return tuple(stack)


def _inverse_word(word) -> tuple[int, ...]:
    return tuple(reverse_dart(d) for d in reversed(word))


def replay_filling(f: Filling) -> tuple[int, ...]:
    """Free reduction of sigma_1 pi_1 sigma_1^-1 ... sigma_k pi_k sigma_k^-1."""
    word: list[int] = []
    for sigma, pi in f.cells:
        word.extend(sigma)
        word.extend(pi)
        word.extend(_inverse_word(sigma))
    return free_reduce(word)


def validate_filling(f: Filling) -> bool:
    return replay_filling(f) == free_reduce(f.loop)


def _arc_table(cx: Complex):
    """Map from perimeter sub-arcs to (replacement, orientation) moves."""
    table: dict[tuple[int, ...], list[tuple[tuple[int, ...], tuple[int, ...]]]] = {}
    max_len = 0
    for pid in range(len(cx.polygons)):
        for op in cx.polygon_orientations(pid):
            phi = op.darts
            max_len = max(max_len, len(phi))
            for s in range(1, len(phi) + 1):
                arc = phi[:s]
                replacement = _inverse_word(phi[s:])
                table.setdefault(arc, []).append((replacement, phi))
    return table, max_len


def _normalize_plain(word) -> tuple[int, ...]:
    """Free + cyclic reduction, canonical lex-least rotation."""
    w = free_reduce(word)
    while len(w) >= 2 and w[0] == reverse_dart(w[-1]):
        w = free_reduce(w[1:-1])
    if not w:
        return w
    return min(w[r:] + w[:r] for r in range(len(w)))


def _normalize_traced(word, rho: list[int]) -> tuple[int, ...]:
    """Like _normalize_plain but appends the conjugating prefix to rho."""
    w = free_reduce(word)
    while len(w) >= 2 and w[0] == reverse_dart(w[-1]):
        rho.append(w[0])
        w = free_reduce(w[1:-1])
    if not w:
        return w
    best_r = min(range(len(w)), key=lambda r: w[r:] + w[:r])
    rho.extend(w[:best_r])
    return w[best_r:] + w[:best_r]


def _validate_loop(cx: Complex, loop) -> tuple[int, ...]:
    loop = tuple(loop)
    if not loop:
        return loop
    for d in loop:
        if not (0 <= dart_edge(d) < len(cx.edges)):
            raise ValueError(f"loop references a missing edge {dart_edge(d)}")
    for d1, d2 in zip(loop, loop[1:]):
        if cx.dart_dst(d1) != cx.dart_src(d2):
            raise ValueError("loop steps are not connected")
    if cx.dart_dst(loop[-1]) != cx.dart_src(loop[0]):
        raise ValueError("loop is not closed")
    return loop


def filling_search(cx: Complex, loop, max_cells: int = 25,
                   word_cap: int | None = None, node_budget: int = 200_000):
    """Search for a filling of a closed loop using at most max_cells polygons.

    On simplicial complexes a greedy pass contracts loop corners through
    link-graph geodesics (every link step is one triangle move); a
    best-first search over reduced loop words backs it up.  Returns a
    Filling or a FillingFailure with frontier statistics (a failure is not
    a proof that no filling exists).
    """
    if max_cells > MAX_FILL_CELLS:
        raise ValueError(f"max_cells capped at {MAX_FILL_CELLS}")
    loop = _validate_loop(cx, loop)
    table, max_poly = _arc_table(cx)
    if word_cap is None:
        word_cap = max(len(loop), max_poly) + 2 * max_poly

    start = _normalize_plain(loop)
    if not start:
        return Filling(loop, ())

    if cx.is_simplicial():
        chain = _greedy_corner_chain(cx, table, start, max_cells)
        if chain is not None:
            return _filling_from_chain(loop, chain)

    # length-greedy pass with a tight word cap, then a wide systematic pass
    tight_cap = max(len(start), max_poly) + 4
    result = _astar_fill(loop, start, table, max_poly, max_cells,
                         min(tight_cap, word_cap), node_budget, length_weight=2)
    if isinstance(result, Filling):
        return result
    return _astar_fill(loop, start, table, max_poly, max_cells, word_cap,
                       node_budget, length_weight=0)


def _link_adjacency(cx: Complex):
    """adj[v][u] = link(v)-neighbours of u, i.e. w with {u, v, w} a triangle."""
    cached = cx.__dict__.get("_link_adj")
    if cached is not None:
        return cached
    adj: list[dict[int, set[int]]] = [dict() for _ in range(cx.n_vertices)]
    for pid in range(len(cx.polygons)):
        a, b, c = cx.polygon_vertices(pid)
        for v, u, w in ((a, b, c), (b, a, c), (c, a, b)):
            adj[v].setdefault(u, set()).add(w)
            adj[v].setdefault(w, set()).add(u)
    cx.__dict__["_link_adj"] = adj
    return adj


def _link_path(adj_v, src: int, dst: int):
    """Shortest path from src to dst inside one link graph, or None."""
    if src == dst:
        return [src]
    from collections import deque

    prev = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for w in sorted(adj_v.get(u, ())):
            if w not in prev:
                prev[w] = u
                if w == dst:
                    path = [w]
                    while prev[path[-1]] is not None:
                        path.append(prev[path[-1]])
                    return path[::-1]
                queue.append(w)
    return None


def _greedy_corner_chain(cx: Complex, table, start, max_cells):
    """Contract corners with the nearest link shortcut first, one arc move
    per iteration: a distance-1 corner contracts across its triangle (s=2),
    a farther one expands its incoming dart one link step closer (s=1).

    Returns a move chain [(word, pos, s, phi, replacement), ...] ending at
    the empty word, or None when stuck (cell budget, cycling, or a corner
    with no link path).
    """
    adj = _link_adjacency(cx)
    w = start
    chain = []
    seen_words = {w}
    while w:
        if len(chain) >= max_cells:
            return None
        hits = table.get(w)
        if hits:  # whole word is a polygon perimeter
            replacement, phi = hits[0]
            chain.append((w, 0, len(w), phi, replacement))
            return chain
        if len(w) < 3:
            return None
        length = len(w)
        doubled = w + w
        candidates = []  # (k, pos, s, phi, replacement, child)
        for pos in range(length):
            a = w[pos]
            b = w[(pos + 1) % length]
            v = cx.dart_src(b)
            path = _link_path(adj[v], cx.dart_src(a), cx.dart_dst(b))
            if path is None:
                continue
            k = len(path) - 1
            if k == 1:
                move_hits = table.get((a, b))
                if not move_hits:
                    continue
                replacement, phi = move_hits[0]
                s = 2
            else:
                # one step of (u -> v) |-> (u -> path[1] -> v)
                mid = path[1]
                found = None
                for replacement, phi in table.get((a,), ()):
                    if len(replacement) == 2 and cx.dart_dst(replacement[0]) == mid:
                        found = (replacement, phi)
                        break
                if found is None:
                    continue
                replacement, phi = found
                s = 1
            child = _normalize_plain(replacement + doubled[pos + s : pos + length])
            if child in seen_words:
                continue
            candidates.append((k, pos, s, phi, replacement, child))
        if not candidates:
            return None
        k, pos, s, phi, replacement, child = min(candidates, key=lambda c: (c[0], c[1]))
        chain.append((w, pos, s, phi, replacement))
        w = child
        seen_words.add(w)
    return chain


def _filling_from_chain(loop, chain) -> Filling:
    rho: list[int] = []
    w = _normalize_traced(loop, rho)
    cells = []
    for expected, pos, s, phi, replacement in chain:
        if w != expected:
            raise AssertionError("move chain does not match the replayed word")
        rho.extend(w[:pos])
        w = w[pos:] + w[:pos]
        cells.append((tuple(rho), phi))
        w = _normalize_traced(replacement + w[s:], rho)
    filling_ = Filling(tuple(loop), tuple(cells))
    if w or not validate_filling(filling_):
        raise AssertionError("filling replay failed to reproduce the loop")
    return filling_


def _astar_fill(loop, start, table, max_poly, max_cells, word_cap, node_budget,
                length_weight: int = 0):
    """Best-first over reduced loop words.  length_weight > 0 biases the
    frontier toward short words (fast, possibly suboptimal); 0 uses the
    cells-remaining estimate len/max_poly (near-exhaustive)."""

    def priority(g, word):
        if length_weight:
            return g + length_weight * len(word)
        return g + (len(word) + max_poly - 1) // max_poly

    came_from: dict[tuple[int, ...], tuple] = {}
    g_score = {start: 0}
    counter = 0
    heap = [(priority(0, start), 0, counter, start)]
    explored = 0
    best_length = len(start)

    while heap and explored < node_budget:
        _, g, _, word = heapq.heappop(heap)
        if g > g_score.get(word, -1):
            continue
        explored += 1
        best_length = min(best_length, len(word))
        if not word:
            return _extract_filling(loop, word, came_from)
        if g + 1 > max_cells:
            continue
        doubled = word + word
        length = len(word)
        for pos in range(length):
            for s in range(1, min(max_poly, length) + 1):
                arc = doubled[pos : pos + s]
                hits = table.get(arc)
                if not hits:
                    continue
                rotated_tail = doubled[pos + s : pos + length]
                for replacement, phi in hits:
                    child = _normalize_plain(replacement + rotated_tail)
                    if len(child) > word_cap:
                        continue
                    tentative = g + 1
                    if tentative < g_score.get(child, tentative + 1):
                        g_score[child] = tentative
                        came_from[child] = (word, pos, s, phi, replacement)
                        counter += 1
                        heapq.heappush(heap, (priority(tentative, child), tentative, counter, child))
    reason = "node budget exhausted" if heap else "search space exhausted under the cell budget"
    return FillingFailure(explored, len(heap), best_length, reason)


def _extract_filling(loop, goal, came_from) -> Filling:
    chain = []
    word = goal
    while word in came_from:
        parent, pos, s, phi, replacement = came_from[word]
        chain.append((pos, s, phi, replacement))
        word = parent
    chain.reverse()

    # replay from the original loop, tracking the conjugating prefix
    rho: list[int] = []
    w = _normalize_traced(loop, rho)
    cells = []
    for pos, s, phi, replacement in chain:
        rho.extend(w[:pos])
        w = w[pos:] + w[:pos]
        cells.append((tuple(rho), phi))
        w = _normalize_traced(replacement + w[s:], rho)
    filling = Filling(tuple(loop), tuple(cells))
    if w or not validate_filling(filling):
        raise AssertionError("filling replay failed to reproduce the loop")
    return filling


def filling_defect_bound(a: Cochain1, f: Filling) -> dict:
    """The loop's holonomy norm is at most the sum of the cells' holonomy
    norms (triangle inequality plus conjugation invariance)."""
    if not validate_filling(f):
        raise ValueError("filling does not replay to its loop")
    loop_norm = ch.vnorm(a.coeff, ch.evaluate_path(a, f.loop)) if f.loop else Fraction(0)
    total = Fraction(0)
    for _, phi in f.cells:
        total += ch.vnorm(a.coeff, ch.evaluate_path(a, phi))
    return {"loop_norm": loop_norm, "cells_total": total, "holds": loop_norm <= total}


# ---------------------------------------------------------------------------
# correction certificates
# ---------------------------------------------------------------------------


@dataclass
class CorrectionCertificate:
    method: str
    input: Cochain1
    output: Cochain1
    measured_distance: Fraction
    measured_defect: Fraction
    claimed_ratio: Fraction | None
    holds: bool | None
    stats: dict = field(default_factory=dict)

    @property
    def ratio(self) -> Fraction | None:
        if self.measured_defect == 0:
            return None
        return self.measured_distance / self.measured_defect

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "input": ch.cochain_to_dict(self.input),
            "output": ch.cochain_to_dict(self.output),
            "measured_distance": float(self.measured_distance),
            "measured_distance_exact": str(self.measured_distance),
            "measured_defect": float(self.measured_defect),
            "measured_defect_exact": str(self.measured_defect),
            "claimed_ratio": None if self.claimed_ratio is None else float(self.claimed_ratio),
            "ratio": None if self.ratio is None else float(self.ratio),
            "holds": self.holds,
            "stats": self.stats,
        }


def _is_complete(cx: Complex) -> int | None:
    n = cx.n_vertices
    if n < 3:
        return None
    if not cx.same_as(complete_complex(n - 1)):
        return None
    return n - 1


def correct_complete(a: Cochain1) -> CorrectionCertificate:
    """Star normalization on the complete complex: normalize at every apex,
    keep the best, output the nearest coboundary it implies.

    The averaged identity over apexes makes the best apex achieve distance
    at most (d-1)/(d+1) times the defect; the certificate asserts exactly
    that with exact arithmetic.
    """
    cx = a.cx
    d = _is_complete(cx)
    if d is None:
        raise ValueError("star correction requires the complete complex with uniform measures")
    edge_id = {pair: e for e, pair in enumerate(cx.edges)}
    best = None
    for apex in range(cx.n_vertices):
        star = frozenset(
            edge_id[(min(apex, y), max(apex, y))] for y in range(cx.n_vertices) if y != apex
        )
        beta, moved = ch.tree_normalize(a, star, apex)
        val = ch.norm(moved)
        if best is None or val < best[0]:
            best = (val, beta, apex)
    val, beta, apex = best
    output = ch.delta0(beta.inverse())
    measured = ch.distance(a, output)
    defect = ch.defect(a)
    claimed = Fraction(d - 1, d + 1)
    cert = CorrectionCertificate(
        "complete", a, output, measured, defect, claimed,
        holds=bool(measured <= claimed * defect),
        stats={"apex": apex, "d": d},
    )
    assert measured == val
    return cert


def _cone_fillings(cx: Complex, root: int, fill_budget: int):
    """Fillings of the tree loops through each non-tree edge, cached on the
    complex instance (they depend only on the complex and the root)."""
    cache = cx.__dict__.setdefault("_cone_fillings", {})
    key = (root, fill_budget)
    if key in cache:
        return cache[key]
    tree = spanning_tree(cx, root)
    parent = tree_parent_darts(cx, tree, root)
    fillings = {}
    failures = {}
    for e in range(len(cx.edges)):
        if e in tree:
            continue
        u, v = cx.edges[e]
        down = _inverse_word(tree_path_to_root(cx, parent, u))
        up = tree_path_to_root(cx, parent, v)
        loop = down + (2 * e,) + tuple(up)
        result = filling_search(cx, loop, max_cells=fill_budget)
        if isinstance(result, Filling):
            fillings[e] = result
        else:
            failures[e] = result
    cache[key] = (tree, parent, fillings, failures)
    return cache[key]


def correct_cone(a: Cochain1, root: int = 0, radius_budget: int | None = None,
                 fill_budget: int = 25) -> CorrectionCertificate:
    """Cone correction: normalize on a BFS tree at the root, certify via
    fillings of the non-tree loops (each of length at most 2*radius + 1).

    When every loop fills within the budget the certificate claims
    distance <= fill_budget * defect; otherwise it is downgraded to a
    best-effort output with no claimed bound.
    """
    cx = a.cx
    if not cx.is_connected:
        raise ValueError("cone correction requires a connected complex")
    tree, parent, fillings, failures = _cone_fillings(cx, root, fill_budget)
    radius = tree_radius(cx, parent)
    if radius_budget is not None and radius > radius_budget:
        raise ValueError(f"BFS tree radius {radius} exceeds the budget {radius_budget}")
    beta, _ = ch.tree_normalize(a, tree, root)
    output = ch.delta0(beta.inverse())
    measured = ch.distance(a, output)
    defect = ch.defect(a)
    all_filled = not failures
    claimed = Fraction(fill_budget) if all_filled else None
    max_size = max((f.size for f in fillings.values()), default=0)
    cert = CorrectionCertificate(
        "cone", a, output, measured, defect, claimed,
        holds=bool(measured <= claimed * defect) if all_filled else None,
        stats={
            "root": root,
            "radius": radius,
            "fillings": len(fillings),
            "max_filling_size": max_size,
            "failed_loops": sorted(failures),
        },
    )
    return cert


# ---------------------------------------------------------------------------
# small-Cheeger witnesses for free products with a contracted complete factor
# ---------------------------------------------------------------------------


def small_cheeger_witness(p: Presentation) -> dict:
    """Witness cochain with a small defect-to-distance ratio on the
    presentation complex of p = p1 * contracted_complete_presentation(d).

    The witness is trivial on the first factor's generators and cuts the
    contracted path in the middle on the second factor's: generators
    straddling the cut carry the transposition, and only the d-2 triangles
    through the cut's tree edge become defective.  The certified upper
    bound on the presentation's Cheeger constant is
    (1 + |S'|) * 12 / (d (d - 1)), achieved with room to spare.
    """
    factors = getattr(p, "factors", None)
    if not factors:
        raise ValueError("expected a presentation built by free_product_presentation")
    p1, p2 = factors
    d = _contracted_degree(p2)
    if d is None:
        raise ValueError("second free factor is not a contracted complete presentation")
    cx = presentation_complex(p)
    coeff = Coefficient.sym(2)
    swap, ident = ch.velements(coeff)[1], ch.velements(coeff)[0]
    m = d // 2
    offset = len(p1.generators)
    values = [ident] * len(p.generators)
    gen_pos = offset
    for i in range(1, d + 1):
        for j in range(i + 1, d + 1):
            if j != i + 1:
                if i <= m < j:
                    values[gen_pos] = swap
                gen_pos += 1
    witness = Cochain1(cx, coeff, tuple(values))

    defect = ch.defect(witness)
    # Z^1 of the free product splits as Z^1(factor1) x {id}: the contracted
    # factor presents the trivial group, so its generators must map to id,
    # and the identity cochain is the nearest first-factor cocycle.
    mu1 = cx.measures.mu1
    dist = sum(
        (mu1[e] * ch.vnorm(coeff, values[e]) for e in range(offset, len(p.generators))),
        Fraction(0),
    )
    ratio = defect / dist
    bound = (1 + len(p1.generators)) * Fraction(12, d * (d - 1))
    return {
        "witness": witness,
        "ratio": ratio,
        "bound": bound,
        "holds": ratio <= bound,
        "d": d,
        "cut": m,
        "defect": defect,
        "distance": dist,
    }


def _contracted_degree(p: Presentation) -> int | None:
    for d in range(3, 200):
        k = (d - 1) * (d - 2) // 2
        if k == len(p.generators):
            reference = contracted_complete_presentation(d)
            if (reference.generators == p.generators and reference.relators == p.relators):
                return d
        if k > len(p.generators):
            return None
    return None


# ---------------------------------------------------------------------------
# corruption experiments
# ---------------------------------------------------------------------------


def _sample_base_cocycle(cx: Complex, coeff: Coefficient, rng: Random) -> Cochain1:
    """A random coboundary (always a cocycle); complexes with enumerable
    cocycle classes contribute a random class translated at random."""
    from . import covering as cov
    from .errors import SizeGuardExceeded

    base = ch.delta0(ch.random_cochain0(cx, coeff, rng))
    try:
        reps = cov.enumerate_cocycles(cx, coeff)
    except SizeGuardExceeded:
        return base
    rep = reps[rng.randrange(len(reps))]
    beta = ch.random_cochain0(cx, coeff, rng)
    return ch.act(beta, rep)


def _corrupt(a: Cochain1, p: float, rng: Random) -> Cochain1:
    values = list(a.values)
    for e in range(len(values)):
        if rng.random() < p:
            values[e] = ch.vrandom(a.coeff, rng)
    return Cochain1(a.cx, a.coeff, tuple(values))


def run_trial(spec: dict) -> dict:
    """One corruption-and-correct trial; self-contained for worker pools."""
    cx = spec["cx"]
    coeff = spec["coeff"]
    rng = Random(spec["seed"])
    base = _sample_base_cocycle(cx, coeff, rng)
    corrupted = _corrupt(base, spec["p_corrupt"], rng)
    method = spec["method"]
    if method == "complete":
        cert = correct_complete(corrupted)
        defect, distance = cert.measured_defect, cert.measured_distance
    elif method == "cone":
        cert = correct_cone(corrupted, root=spec.get("root", 0),
                            fill_budget=spec.get("fill_budget", 25))
        defect, distance = cert.measured_defect, cert.measured_distance
    elif method == "exact":
        defect = ch.defect(corrupted)
        distance, _ = ch.dist_to_cocycles(corrupted, "exact")
    else:
        raise ValueError(f"unknown method {method!r}")
    ratio = None if defect == 0 else distance / defect
    return {
        "trial": spec["trial"],
        "defect": float(defect),
        "distance": float(distance),
        "ratio": None if ratio is None else float(ratio),
        "method": method,
        "seed": spec["seed"],
    }


def stability_experiment(cx: Complex, coeff: Coefficient, p_corrupt: float,
                         trials: int, method: str, seed: int = 42,
                         workers: int = 1, **method_params) -> list[dict]:
    """Corrupt sampled cocycles edgewise and record (defect, distance) per
    trial for the chosen correction method."""
    from .parallel import pmap

    if method == "cone":
        # warm the filling cache once so every trial reuses it
        _cone_fillings(cx, method_params.get("root", 0), method_params.get("fill_budget", 25))
    specs = [
        {
            "cx": cx, "coeff": coeff, "p_corrupt": p_corrupt, "method": method,
            "trial": t, "seed": (seed * 0x9E3779B1 + t) & 0xFFFFFFFF, **method_params,
        }
        for t in range(trials)
    ]
    return pmap(run_trial, specs, workers)
