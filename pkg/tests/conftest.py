import random

import pytest

from hdx import complexes as cpx


def random_closed_path(rng: random.Random, cx, length: int):
    """A cyclically reduced closed dart path of the given length, or None."""
    for _ in range(200):
        v0 = rng.randrange(cx.n_vertices)
        path = []
        v = v0
        dead = False
        for _ in range(length - 1):
            cands = [d for d in cx.out_darts[v] if not path or d != (path[-1] ^ 1)]
            if not cands:
                dead = True
                break
            d = rng.choice(cands)
            path.append(d)
            v = cx.dart_dst(d)
        if dead:
            continue
        closing = [
            d for d in cx.out_darts[v]
            if cx.dart_dst(d) == v0 and (not path or d != (path[-1] ^ 1)) and (d ^ 1) != (path[0] if path else -1)
        ]
        if closing:
            path.append(rng.choice(closing))
            return tuple(path)
    return None


def random_desk_complex(rng: random.Random, max_vertices=4, max_extra_edges=3, max_polygons=3):
    """A small random connected complex with a few random polygons."""
    n = rng.randint(2, max_vertices)
    edges = []
    for v in range(1, n):
        edges.append((rng.randrange(v), v))
    for _ in range(rng.randint(0, max_extra_edges)):
        a = rng.randrange(n)
        b = rng.randrange(n)
        edges.append((min(a, b), max(a, b)) if a != b else (a, b))
    skeleton = cpx.Complex(n, edges)
    polygons = []
    for _ in range(rng.randint(1, max_polygons)):
        loop = random_closed_path(rng, skeleton, rng.randint(1, 4))
        if loop is not None:
            polygons.append(loop)
    if not polygons:
        # fall back to a doubled edge so a 2-cell always exists
        e = rng.randrange(len(edges))
        if edges[e][0] == edges[e][1]:
            polygons = [(2 * e,)]
        else:
            edges = edges + [edges[e]]
            skeleton = cpx.Complex(n, edges)
            polygons = [(2 * e, 2 * (len(edges) - 1) + 1)]
    return cpx.Complex(n, edges, polygons)


@pytest.fixture(scope="session")
def building2():
    return cpx.spherical_building(2)
