"""Cochains on polygonal complexes with Sym(n) or F2 coefficients.

A 0-cochain assigns a coefficient value to every vertex; a 1-cochain assigns
one to every oriented edge, anti-symmetrically (the value on a reversed edge
is the inverse), so only the canonical orientation is stored.  The coboundary
of a 0-cochain b is the edge assignment b(x)^-1 b(y); the coboundary of a
1-cochain is its path evaluation around polygon perimeters.

F2 values are stored as bits 0/1 and behave exactly like Sym(2) under the
normalized Hamming metric (the nontrivial element is at distance 1 from the
identity).
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from random import Random

import numpy as np

from . import perm
from .complexes import Complex, dart_edge, reverse_dart, spanning_tree, tree_parent_darts, tree_path_to_root
from .errors import EXACT_CANDIDATE_LIMIT, SizeGuardExceeded
from .perm import Perm

LOCAL_SEARCH_SEED = 0xC0B0
LOCAL_SEARCH_RESTARTS = 32


@dataclass(frozen=True)
class Coefficient:
    kind: str  # "sym" or "f2"
    degree: int

    @staticmethod
    def sym(n: int) -> "Coefficient":
        if n < 1:
            raise ValueError("Sym(n) needs n >= 1")
        return Coefficient("sym", n)

    @staticmethod
    def f2() -> "Coefficient":
        return Coefficient("f2", 2)

    def __repr__(self) -> str:
        return "F2" if self.kind == "f2" else f"Sym({self.degree})"


# -- value backend -----------------------------------------------------------


def identity_value(coeff: Coefficient):
    return 0 if coeff.kind == "f2" else Perm.identity(coeff.degree)


def vmul(coeff: Coefficient, a, b):
    return (a ^ b) if coeff.kind == "f2" else a * b


def vinv(coeff: Coefficient, a):
    return a if coeff.kind == "f2" else a.inverse()


def vdh(a, b) -> Fraction:
    """Normalized Hamming distance between two values (cross-degree for Sym)."""
    if isinstance(a, int):
        return Fraction(a ^ b)
    return perm.hamming_distance(a, b)


def vnorm(coeff: Coefficient, a) -> Fraction:
    if coeff.kind == "f2":
        return Fraction(a)
    return perm.norm(a)


def vis_id(a) -> bool:
    return a == 0 if isinstance(a, int) else a.is_identity()


def vapply(a, i: int) -> int:
    """Apply a value to a point of {0,..,n-1}."""
    return (i ^ a) if isinstance(a, int) else a.images[i]


def velements(coeff: Coefficient):
    """All values in a fixed deterministic (lexicographic) order."""
    if coeff.kind == "f2":
        return [0, 1]
    return perm.all_perms(coeff.degree)


def vrandom(coeff: Coefficient, rng: Random):
    if coeff.kind == "f2":
        return rng.randrange(2)
    return perm.random_perm(rng, coeff.degree)


def vconj(coeff: Coefficient, a, g):
    return a if coeff.kind == "f2" else a.conjugate_by(g)


def value_to_json(a):
    return a if isinstance(a, int) else perm.format_cycles(a)


def value_from_json(coeff: Coefficient, raw):
    if coeff.kind == "f2":
        if raw not in (0, 1):
            raise ValueError(f"F2 value must be 0 or 1, got {raw!r}")
        return raw
    return perm.parse_cycles(raw, coeff.degree)


# -- cochain containers --------------------------------------------------------


@dataclass(frozen=True)
class Cochain0:
    cx: Complex
    coeff: Coefficient
    values: tuple

    def __post_init__(self):
        if len(self.values) != self.cx.n_vertices:
            raise ValueError("one value per vertex required")

    def inverse(self) -> "Cochain0":
        return Cochain0(self.cx, self.coeff, tuple(vinv(self.coeff, v) for v in self.values))


@dataclass(frozen=True)
class Cochain1:
    cx: Complex
    coeff: Coefficient
    values: tuple  # per edge, at the canonical src->dst orientation

    def __post_init__(self):
        if len(self.values) != len(self.cx.edges):
            raise ValueError("one value per edge required")

    def on_dart(self, dart: int):
        v = self.values[dart_edge(dart)]
        return vinv(self.coeff, v) if dart & 1 else v


@dataclass(frozen=True)
class Cochain2:
    """Polygon values at canonical orientations.  A re-based orientation
    carries a conjugate of the canonical value and a reversed one its
    inverse; evaluate_path over the orientation's darts recovers them."""

    cx: Complex
    coeff: Coefficient
    values: tuple  # per polygon, at the canonical orientation


def identity_cochain0(cx: Complex, coeff: Coefficient) -> Cochain0:
    e = identity_value(coeff)
    return Cochain0(cx, coeff, tuple(e for _ in range(cx.n_vertices)))


def identity_cochain1(cx: Complex, coeff: Coefficient) -> Cochain1:
    e = identity_value(coeff)
    return Cochain1(cx, coeff, tuple(e for _ in cx.edges))


def random_cochain0(cx: Complex, coeff: Coefficient, rng: Random) -> Cochain0:
    return Cochain0(cx, coeff, tuple(vrandom(coeff, rng) for _ in range(cx.n_vertices)))


def random_cochain1(cx: Complex, coeff: Coefficient, rng: Random) -> Cochain1:
    return Cochain1(cx, coeff, tuple(vrandom(coeff, rng) for _ in cx.edges))


def to_sym(a: Cochain1) -> Cochain1:
    """Reinterpret an F2 cochain as a Sym(2) cochain."""
    if a.coeff.kind == "sym":
        return a
    swap = Perm((1, 0))
    ident = Perm.identity(2)
    return Cochain1(a.cx, Coefficient.sym(2), tuple(swap if v else ident for v in a.values))


def to_f2(a: Cochain1) -> Cochain1:
    if a.coeff.kind == "f2":
        return a
    if a.coeff.degree != 2:
        raise ValueError("only Sym(2) cochains convert to F2")
    return Cochain1(a.cx, Coefficient.f2(), tuple(0 if v.is_identity() else 1 for v in a.values))


# -- coboundaries and evaluation -----------------------------------------------


def delta0(b: Cochain0) -> Cochain1:
    """(delta b)(x -> y) = b(x)^-1 b(y)."""
    coeff = b.coeff
    vals = tuple(
        vmul(coeff, vinv(coeff, b.values[s]), b.values[t]) for s, t in b.cx.edges
    )
    return Cochain1(b.cx, coeff, vals)


def evaluate_path(a: Cochain1, darts) -> object:
    """Ordered product of a's values along a connected dart path."""
    cx, coeff = a.cx, a.coeff
    darts = list(darts)
    for d1, d2 in zip(darts, darts[1:]):
        if cx.dart_dst(d1) != cx.dart_src(d2):
            raise ValueError("path steps are not connected")
    out = identity_value(coeff)
    for d in darts:
        out = vmul(coeff, out, a.on_dart(d))
    return out


def delta1(a: Cochain1) -> Cochain2:
    """(delta a)(polygon) = product of a around the perimeter."""
    vals = tuple(evaluate_path(a, per) for per in a.cx.polygons)
    return Cochain2(a.cx, a.coeff, vals)


def act(b: Cochain0, a: Cochain1) -> Cochain1:
    """(b.a)(x -> y) = b(x)^-1 a(e) b(y); preserves coboundary norms."""
    if b.coeff != a.coeff:
        raise ValueError(f"coefficient mismatch: {b.coeff} vs {a.coeff}")
    coeff = a.coeff
    vals = tuple(
        vmul(coeff, vmul(coeff, vinv(coeff, b.values[s]), a.values[e]), b.values[t])
        for e, (s, t) in enumerate(a.cx.edges)
    )
    return Cochain1(a.cx, coeff, vals)


# -- norms and distances ---------------------------------------------------------


def _mu(cochain) -> tuple:
    ms = cochain.cx.measures
    if isinstance(cochain, Cochain0):
        return ms.mu0
    if isinstance(cochain, Cochain1):
        return ms.mu1
    return ms.mu2


def norm(cochain) -> Fraction:
    """Expected Hamming distance to the identity under the cell measure."""
    coeff = cochain.coeff
    mu = _mu(cochain)
    return sum((m * vnorm(coeff, v) for m, v in zip(mu, cochain.values)), Fraction(0))


def distance(a, b) -> Fraction:
    """Expected Hamming distance between two cochains of the same level."""
    if a.cx is not b.cx and not a.cx.same_as(b.cx):
        raise ValueError("cochains live on different complexes")
    if type(a) is not type(b) or a.coeff.kind != b.coeff.kind:
        raise ValueError("cochains are not comparable")
    mu = _mu(a)
    return sum((m * vdh(x, y) for m, x, y in zip(mu, a.values, b.values)), Fraction(0))


def defect(a: Cochain1) -> Fraction:
    """||delta a||, the measure-weighted failure of the polygon relations."""
    return norm(delta1(a))


def is_cocycle(a: Cochain1) -> bool:
    return all(vis_id(v) for v in delta1(a).values)


# -- trees and normalization ------------------------------------------------------


def tree_normalize(a: Cochain1, tree: frozenset[int], root: int = 0):
    """Conjugating 0-cochain b with b(root) = id and (b.a) = id on the tree.

    b(x) is a evaluated along the tree path from x to the root; returns
    (b, b.a).
    """
    parent = tree_parent_darts(a.cx, tree, root)
    coeff = a.coeff
    betas = [None] * a.cx.n_vertices
    betas[root] = identity_value(coeff)
    order = sorted(range(a.cx.n_vertices), key=lambda v: len(tree_path_to_root(a.cx, parent, v)))
    for v in order:
        if betas[v] is None:
            d = parent[v]
            up = a.cx.dart_dst(d)
            betas[v] = vmul(coeff, a.on_dart(d), betas[up])
    b = Cochain0(a.cx, coeff, tuple(betas))
    return b, act(b, a)


def is_coboundary_exact(a: Cochain1) -> bool:
    """Whether a = delta0(b) for some b, by tree propagation from the root."""
    if not a.cx.is_connected:
        raise ValueError("coboundary testing requires a connected complex")
    coeff = a.coeff
    tree = spanning_tree(a.cx, 0)
    parent = tree_parent_darts(a.cx, tree, 0)
    betas = [None] * a.cx.n_vertices
    betas[0] = identity_value(coeff)
    order = sorted(range(a.cx.n_vertices), key=lambda v: len(tree_path_to_root(a.cx, parent, v)))
    for v in order:
        if betas[v] is None:
            d = parent[v]  # dart v -> parent(v)
            up = a.cx.dart_dst(d)
            # delta b (up -> v) = b(up)^-1 b(v) must equal a(up -> v)
            betas[v] = vmul(coeff, betas[up], a.on_dart(reverse_dart(d)))
    for e, (s, t) in enumerate(a.cx.edges):
        want = vmul(coeff, vinv(coeff, betas[s]), betas[t])
        if want != a.values[e]:
            return False
    return True


def is_connected_cochain(a: Cochain1) -> bool:
    """Whether the degree-n cover encoded by a has a connected 1-skeleton."""
    if not a.cx.is_connected:
        raise ValueError("connectivity of the cover needs a connected base")
    cx, n = a.cx, a.coeff.degree
    total = cx.n_vertices * n
    seen = [False] * total
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        node = queue.popleft()
        x, i = divmod(node, n)
        for d in cx.out_darts[x]:
            # the lift of dart x -> y through level i ends at level a(d)^-1 . i
            y = cx.dart_dst(d)
            j = vapply(vinv(a.coeff, a.on_dart(d)), i)
            nxt = y * n + j
            if not seen[nxt]:
                seen[nxt] = True
                count += 1
                queue.append(nxt)
    return count == total


# -- exact distance searches --------------------------------------------------------


def _guard(what: str, count: int):
    if count > EXACT_CANDIDATE_LIMIT:
        raise SizeGuardExceeded(what, count, EXACT_CANDIDATE_LIMIT)


def _int_weights(mu) -> tuple[np.ndarray, int]:
    """Rescale a rational measure vector to integer weights over a common
    denominator, for exact vectorized sums."""
    denom = math.lcm(*(m.denominator for m in mu)) if mu else 1
    weights = np.array([int(m * denom) for m in mu], dtype=np.int64)
    return weights, denom


def _dist_to_coboundaries_f2(a: Cochain1, root: int):
    """Vectorized exhaustive search over all F2 0-cochains with b(root) = 0."""
    cx = a.cx
    free = [v for v in range(cx.n_vertices) if v != root]
    k = len(free)
    _guard("exact coboundary distance", 2**k)
    # bit layout matches itertools.product order so tie-breaking agrees
    # with the generic path (last free vertex varies fastest)
    pos = {v: k - 1 - i for i, v in enumerate(free)}
    cand = np.arange(2**k, dtype=np.int64)
    weights, denom = _int_weights(cx.measures.mu1)
    total = np.zeros(2**k, dtype=np.int64)
    for e, (s, t) in enumerate(cx.edges):
        bit_s = (cand >> pos[s]) & 1 if s != root else 0
        bit_t = (cand >> pos[t]) & 1 if t != root else 0
        total += weights[e] * ((bit_s ^ bit_t ^ a.values[e]) & 1)
    best = int(total.argmin())
    betas = [0] * cx.n_vertices
    for v in free:
        betas[v] = int((best >> pos[v]) & 1)
    witness = Cochain0(cx, a.coeff, tuple(betas))
    return Fraction(int(total[best]), denom), witness


def dist_to_coboundaries(a: Cochain1, mode: str = "exact", seed: int = LOCAL_SEARCH_SEED):
    """Distance from a to the coboundaries, inf over b of ||b.a||.

    Exact mode searches all 0-cochains with b(root) = id (a global
    conjugation leaves every ||b.a|| unchanged, so the quotient is free).
    Local-search mode returns a certified upper bound from coordinate
    descent with restarts.  Returns (distance, witness 0-cochain).
    """
    cx, coeff = a.cx, a.coeff
    if not cx.is_connected:
        raise ValueError("coboundary distance requires a connected complex")
    root = 0
    if mode == "exact":
        if coeff.kind == "f2":
            return _dist_to_coboundaries_f2(a, root)
        els = velements(coeff)
        free = [v for v in range(cx.n_vertices) if v != root]
        _guard("exact coboundary distance", len(els) ** len(free))
        mu = cx.measures.mu1
        ident = identity_value(coeff)
        best_val, best_beta = None, None
        for assignment in itertools.product(els, repeat=len(free)):
            betas = [ident] * cx.n_vertices
            for v, g in zip(free, assignment):
                betas[v] = g
            total = Fraction(0)
            for e, (s, t) in enumerate(cx.edges):
                w = vmul(coeff, vmul(coeff, vinv(coeff, betas[s]), a.values[e]), betas[t])
                total += mu[e] * vnorm(coeff, w)
                if best_val is not None and total >= best_val:
                    break
            if best_val is None or total < best_val:
                best_val, best_beta = total, tuple(betas)
        return best_val, Cochain0(cx, coeff, best_beta)
    if mode == "local-search":
        return _local_search_coboundaries(a, seed)
    raise ValueError(f"unknown mode {mode!r}")


def _local_search_coboundaries(a: Cochain1, seed: int):
    """Coordinate descent over vertices, vertex-id sweep order, restarted."""
    cx, coeff = a.cx, a.coeff
    mu = cx.measures.mu1
    els = velements(coeff)
    rng = Random(seed)
    incident = [[] for _ in range(cx.n_vertices)]
    for e, (s, t) in enumerate(cx.edges):
        incident[s].append(e)
        if t != s:
            incident[t].append(e)

    def objective(betas):
        return sum(
            (
                mu[e] * vnorm(coeff, vmul(coeff, vmul(coeff, vinv(coeff, betas[s]), a.values[e]), betas[t]))
                for e, (s, t) in enumerate(cx.edges)
            ),
            Fraction(0),
        )

    def local_cost(betas, v):
        total = Fraction(0)
        for e in incident[v]:
            s, t = cx.edges[e]
            total += mu[e] * vnorm(
                coeff, vmul(coeff, vmul(coeff, vinv(coeff, betas[s]), a.values[e]), betas[t])
            )
        return total

    best_val, best_beta = None, None
    for restart in range(LOCAL_SEARCH_RESTARTS):
        if restart == 0:
            betas = [identity_value(coeff)] * cx.n_vertices
        else:
            betas = [vrandom(coeff, rng) for _ in range(cx.n_vertices)]
        improved = True
        while improved:
            improved = False
            for v in range(cx.n_vertices):
                current = local_cost(betas, v)
                best_local, best_g = current, betas[v]
                for g in els:
                    old = betas[v]
                    betas[v] = g
                    cost = local_cost(betas, v)
                    betas[v] = old
                    if cost < best_local:
                        best_local, best_g = cost, g
                if best_local < current:
                    betas[v] = best_g
                    improved = True
        val = objective(betas)
        if best_val is None or val < best_val:
            best_val, best_beta = val, tuple(betas)
    return best_val, Cochain0(cx, coeff, best_beta)


def dist_to_cocycles(a: Cochain1, mode: str = "exact"):
    """Distance from a to the cocycles of its degree; (distance, witness).

    Exact mode minimizes d(b.a, z) over root-normalized b and the
    tree-normalized cocycle list z (their orbit closure is all of Z^1).
    Heuristic mode returns a flagged upper bound from correction output.
    """
    from . import covering

    cx, coeff = a.cx, a.coeff
    if not cx.is_connected:
        raise ValueError("cocycle distance requires a connected complex")
    root = 0
    tree = spanning_tree(cx, root)
    if mode == "exact":
        tn = covering.tree_normalized_cocycles(cx, coeff, tree, root)
        els = velements(coeff)
        free = [v for v in range(cx.n_vertices) if v != root]
        _guard("exact cocycle distance", max(1, len(els) ** len(free)) * max(1, len(tn)))
        mu = cx.measures.mu1
        ident = identity_value(coeff)
        best_val, best_pair = None, None
        for assignment in itertools.product(els, repeat=len(free)):
            betas = [ident] * cx.n_vertices
            for v, g in zip(free, assignment):
                betas[v] = g
            moved = [
                vmul(coeff, vmul(coeff, vinv(coeff, betas[s]), a.values[e]), betas[t])
                for e, (s, t) in enumerate(cx.edges)
            ]
            for z in tn:
                total = Fraction(0)
                for e in range(len(cx.edges)):
                    total += mu[e] * vdh(moved[e], z[e])
                    if best_val is not None and total >= best_val:
                        break
                if best_val is None or total < best_val:
                    best_val, best_pair = total, (tuple(betas), z)
        betas, z = best_pair
        inv_beta = Cochain0(cx, coeff, tuple(vinv(coeff, g) for g in betas))
        witness = act(inv_beta, Cochain1(cx, coeff, z))
        return best_val, witness
    if mode == "heuristic":
        from .correction import correct_cone

        cert = correct_cone(a, root=root)
        return distance(a, cert.output), cert.output
    raise ValueError(f"unknown mode {mode!r}")


def same_orbit(a: Cochain1, b: Cochain1) -> bool:
    """Whether b = beta.a for some 0-cochain beta (exact check).

    Tree-normalized forms of one orbit differ exactly by a global
    conjugation, so the check reduces to |Sym(n)| comparisons.
    """
    if a.coeff != b.coeff:
        return False
    if a.cx is not b.cx and not a.cx.same_as(b.cx):
        return False
    tree = spanning_tree(a.cx, 0)
    _, na = tree_normalize(a, tree, 0)
    _, nb = tree_normalize(b, tree, 0)
    coeff = a.coeff
    for g in velements(coeff):
        if all(
            vconj(coeff, v, g) == w for v, w in zip(na.values, nb.values)
        ):
            return True
    return False


# -- JSON ----------------------------------------------------------------------


def coefficient_to_json(coeff: Coefficient):
    return "f2" if coeff.kind == "f2" else {"sym": coeff.degree}


def coefficient_from_json(raw) -> Coefficient:
    if raw == "f2":
        return Coefficient.f2()
    if isinstance(raw, dict) and "sym" in raw:
        return Coefficient.sym(int(raw["sym"]))
    raise ValueError(f"unknown coefficient spec {raw!r}")


def cochain_to_dict(c) -> dict:
    return {
        "coefficient": coefficient_to_json(c.coeff),
        "level": 0 if isinstance(c, Cochain0) else 1,
        "values": {str(i): value_to_json(v) for i, v in enumerate(c.values)},
    }


def cochain_from_dict(cx: Complex, data: dict):
    coeff = coefficient_from_json(data["coefficient"])
    level = int(data.get("level", 1))
    count = cx.n_vertices if level == 0 else len(cx.edges)
    vals = []
    for i in range(count):
        raw = data["values"].get(str(i))
        if raw is None:
            raise ValueError(f"missing value for cell {i}")
        vals.append(value_from_json(coeff, raw))
    cls = Cochain0 if level == 0 else Cochain1
    return cls(cx, coeff, tuple(vals))
