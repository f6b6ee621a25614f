"""Symmetric-group elements and the normalized Hamming metric with errors.

Points are 0-based internally; cycle notation for CLI i/o is 1-based.
Composition is function composition: ``(a * b)(i) == a(b(i))``.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from random import Random

MAX_DEGREE = 2**16


class Perm:
    """An element of Sym(n), stored as the image tuple of 0..n-1."""

    __slots__ = ("images",)

    def __init__(self, images):
        images = tuple(images)
        n = len(images)
        if n < 1 or n > MAX_DEGREE:
            raise ValueError(f"degree {n} out of range [1, {MAX_DEGREE}]")
        if sorted(images) != list(range(n)):
            raise ValueError(f"not a permutation of 0..{n - 1}: {images}")
        self.images = images

    @property
    def degree(self) -> int:
        return len(self.images)

    @staticmethod
    def identity(n: int) -> "Perm":
        return Perm(range(n))

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Perm") -> "Perm":
        if self.degree != other.degree:
            raise ValueError(f"degree mismatch: {self.degree} != {other.degree}")
        return Perm(self.images[j] for j in other.images)

    def inverse(self) -> "Perm":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Perm(inv)

    def conjugate_by(self, g: "Perm") -> "Perm":
        """g^-1 * self * g."""
        return g.inverse() * self * g

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def fixed_points(self) -> int:
        return sum(1 for i, j in enumerate(self.images) if i == j)

    def __eq__(self, other) -> bool:
        return isinstance(other, Perm) and self.images == other.images

    def __lt__(self, other: "Perm") -> bool:
        return self.images < other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __repr__(self) -> str:
        return f"Perm({list(self.images)})"

    def __str__(self) -> str:
        return format_cycles(self)

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each rotated to start at its least point."""
        seen = [False] * self.degree
        out = []
        for i in range(self.degree):
            if seen[i] or self.images[i] == i:
                seen[i] = True
                continue
            cyc = []
            j = i
            while not seen[j]:
                seen[j] = True
                cyc.append(j)
                j = self.images[j]
            out.append(tuple(cyc))
        return out


def compose(a: Perm, b: Perm) -> Perm:
    return a * b


def inverse(a: Perm) -> Perm:
    return a.inverse()


def hamming_distance(s: Perm, t: Perm) -> Fraction:
    """d_h(s, t) = 1 - |{i < n : s(i) = t(i)}| / N, with n <= N the two degrees.

    Symmetric in its arguments; for equal degrees this is the usual
    normalized Hamming distance.
    """
    if s.degree > t.degree:
        s, t = t, s
    agree = sum(1 for i in range(s.degree) if s.images[i] == t.images[i])
    return Fraction(t.degree - agree, t.degree)


def norm(s: Perm) -> Fraction:
    """Distance to the identity of the same degree."""
    return Fraction(s.degree - s.fixed_points(), s.degree)


def embed(s: Perm, big_degree: int) -> Perm:
    """Extend s to Sym(N) acting as the identity on the new points."""
    if big_degree < s.degree:
        raise ValueError(f"cannot embed degree {s.degree} into {big_degree}")
    return Perm(s.images + tuple(range(s.degree, big_degree)))


def all_perms(n: int):
    """All of Sym(n) in lexicographic image order."""
    return [Perm(p) for p in itertools.permutations(range(n))]


def random_perm(rng: Random, n: int) -> Perm:
    images = list(range(n))
    rng.shuffle(images)
    return Perm(images)


def format_cycles(s: Perm) -> str:
    """Cycle notation with 1-based points; identity prints as ``id[n]``."""
    cycs = s.cycles()
    if not cycs:
        return f"id[{s.degree}]"
    return "".join("(" + " ".join(str(p + 1) for p in cyc) + ")" for cyc in cycs)


def parse_cycles(text: str, degree: int | None = None) -> Perm:
    """Parse 1-based cycle notation, e.g. ``(1 2)(3 4 5)`` or ``id[4]``.

    Without an explicit degree, the largest point mentioned sets it.
    """
    text = text.strip()
    if text.startswith("id[") and text.endswith("]"):
        n = int(text[3:-1])
        if degree is not None and degree != n:
            raise ValueError(f"declared degree {n} != requested {degree}")
        return Perm.identity(n)
    cycles = []
    rest = text
    while rest:
        rest = rest.lstrip()
        if not rest:
            break
        if not rest.startswith("("):
            raise ValueError(f"bad cycle notation: {text!r}")
        close = rest.index(")")
        body = rest[1:close].replace(",", " ").split()
        points = [int(p) - 1 for p in body]
        if len(points) < 2 or min(points) < 0 or len(set(points)) != len(points):
            raise ValueError(f"bad cycle {rest[: close + 1]!r}")
        cycles.append(points)
        rest = rest[close + 1 :]
    top = max((p for cyc in cycles for p in cyc), default=-1) + 1
    n = degree if degree is not None else top
    if top > n:
        raise ValueError(f"point {top} exceeds degree {n}")
    images = list(range(n))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            if images[a] != a:
                raise ValueError(f"point {a + 1} appears in two cycles: {text!r}")
            images[a] = b
    return Perm(images)


def candidate_count(n: int, slots: int) -> int:
    """(n!)**slots, the size of an exhaustive assignment space."""
    return math.factorial(n) ** slots
