"""Cheeger constants and cosystoles, with exact brute-force modes.

Definitions (inf over the stated domains, infinity when the domain is empty):

    h_0(X, F2)    = min over nonempty proper vertex sets B of
                    ||delta 1_B|| / min(mu0(B), 1 - mu0(B))
    h_1(X, G)     = inf { ||delta a|| / d(a, Z^1) : ||delta a|| != 0 }
    h^B_1(X, G)   = inf { ||delta a|| / d(a, B^1) : a not in B^1 }
    CoSyst_1      = inf { ||a|| : a a connected non-coboundary cocycle }

The coboundary constant vanishes whenever a non-coboundary cocycle exists
(its numerator is zero); when the first cohomology vanishes the two
constants agree.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import cochain as ch
from . import covering as cov
from .cochain import Cochain0, Cochain1, Coefficient
from .complexes import Complex, connected_components
from .errors import EXACT_CANDIDATE_LIMIT, SizeGuardExceeded

H0_EXACT_MAX_VERTICES = 24
H1_F2_EXACT_MAX_EDGES = 24


@dataclass
class CheegerReport:
    kind: str                 # "h0" | "h1" | "hB1"
    coefficient: object       # json-able coefficient tag
    mode: str
    value: Fraction | None    # exact value, None when infinite or interval-only
    infinite: bool = False
    lower: float | None = None
    upper: Fraction | None = None
    witness: dict | None = None
    per_degree: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "coefficient": self.coefficient,
            "mode": self.mode,
            "value": None if self.value is None else float(self.value),
            "value_exact": None if self.value is None else str(self.value),
            "infinite": self.infinite,
            "lower": self.lower,
            "upper": None if self.upper is None else float(self.upper),
            "upper_exact": None if self.upper is None else str(self.upper),
            "witness": self.witness,
            "per_degree": self.per_degree,
            "stats": self.stats,
        }


@dataclass
class CosystoleReport:
    n_max: int
    value: Fraction | None    # minimal norm found; None when no witness exists
    infinite: bool
    witness: dict | None
    per_degree: list
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "value": None if self.value is None else float(self.value),
            "value_exact": None if self.value is None else str(self.value),
            "infinite": self.infinite,
            "witness": self.witness,
            "per_degree": self.per_degree,
            "stats": self.stats,
        }


# ---------------------------------------------------------------------------
# h0 with F2 coefficients
# ---------------------------------------------------------------------------


def _cut_weight_ints(cx: Complex):
    """Integer edge weights over a common denominator, for exact cut sums."""
    mu1 = cx.measures.mu1
    d1 = math.lcm(*(m.denominator for m in mu1)) if mu1 else 1
    w1 = [int(m * d1) for m in mu1]
    mu0 = cx.measures.mu0
    d0 = math.lcm(*(m.denominator for m in mu0))
    w0 = [int(m * d0) for m in mu0]
    return w1, d1, w0, d0


def h0_f2(cx: Complex, mode: str = "exact") -> CheegerReport:
    """Edge-expansion Cheeger constant of the 1-skeleton over F2.

    Exact mode scans every nonempty proper vertex subset (|V| <= 24); sweep
    mode returns the spectral lower bound 1 - lambda_2 and a Fiedler sweep
    cut as a witness upper bound.
    """
    if not cx.is_connected:
        comp = connected_components(cx)[0]
        witness = _subset_witness(cx, set(comp))
        return CheegerReport(
            "h0", "f2", mode, Fraction(0), witness=witness,
            stats={"disconnected": True, "component": comp},
        )
    if mode == "sweep":
        return _h0_sweep(cx)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    n = cx.n_vertices
    if n > H0_EXACT_MAX_VERTICES:
        raise SizeGuardExceeded("exact h0", 2**n, 2**H0_EXACT_MAX_VERTICES)

    w1, d1, w0, d0 = _cut_weight_ints(cx)
    total0 = sum(w0)
    best = None  # (cut_int, denom_int, mask); exact integer comparisons
    for lo in range(1, 2**n - 1, 2**20):
        masks = np.arange(lo, min(lo + 2**20, 2**n - 1), dtype=np.int64)
        cut = np.zeros(len(masks), dtype=np.int64)
        for e, (s, t) in enumerate(cx.edges):
            if s != t:
                cut += w1[e] * (((masks >> s) ^ (masks >> t)) & 1)
        m0 = np.zeros(len(masks), dtype=np.int64)
        for v in range(n):
            m0 += w0[v] * ((masks >> v) & 1)
        mind = np.minimum(m0, total0 - m0)
        ratios = cut / np.maximum(mind, 1)
        ratios[mind <= 0] = np.inf
        fmin = ratios.min()
        # float preselect with generous margin, then exact comparison
        near = np.flatnonzero(ratios <= fmin * (1 + 1e-12) + 1e-300)
        for idx in near:
            cand = (int(cut[idx]), int(mind[idx]), int(masks[idx]))
            if best is None or cand[0] * best[1] < best[0] * cand[1]:
                best = cand
    value = Fraction(best[0], d1) / Fraction(best[1], d0)
    members = {v for v in range(n) if (best[2] >> v) & 1}
    return CheegerReport(
        "h0", "f2", "exact", value,
        witness=_subset_witness(cx, members),
        stats={"subsets": int(2**n - 2)},
    )


def _subset_witness(cx: Complex, members) -> dict:
    indicator = Cochain0(cx, Coefficient.f2(), tuple(1 if v in members else 0 for v in range(cx.n_vertices)))
    return {"subset": sorted(members), "cochain": ch.cochain_to_dict(indicator)}


def _h0_sweep(cx: Complex) -> CheegerReport:
    from . import spectral

    lam2, order = spectral.fiedler_order(cx)
    w1, d1, w0, d0 = _cut_weight_ints(cx)
    total0 = sum(w0)
    members: set[int] = set()
    best = None
    for v in order[:-1]:
        members.add(v)
        cut = sum(
            w1[e]
            for e, (s, t) in enumerate(cx.edges)
            if s != t and ((s in members) != (t in members))
        )
        m0 = sum(w0[u] for u in members)
        denom = min(m0, total0 - m0)
        if denom == 0:
            continue
        ratio = Fraction(cut, d1) / Fraction(denom, d0)
        if best is None or ratio < best[0]:
            best = (ratio, set(members))
    lower = 1.0 - lam2
    return CheegerReport(
        "h0", "f2", "sweep", None,
        lower=lower, upper=best[0], witness=_subset_witness(cx, best[1]),
        stats={"lambda2": lam2},
    )


# ---------------------------------------------------------------------------
# h1 over F2 (linear-algebra cocycle set) and Sym(n) (full brute force)
# ---------------------------------------------------------------------------


def _f2_cocycle_masks(cx: Complex) -> list[int]:
    """All F2 1-cocycles as edge bitmasks: the kernel of the polygon parity
    matrix, enumerated from a row-reduced basis."""
    m = len(cx.edges)
    rel_masks = []
    for per in cx.polygons:
        mask = 0
        for d in per:
            mask ^= 1 << (d >> 1)
        rel_masks.append(mask)
    # Gaussian elimination over F2, pivot on the lowest set bit
    pivots: dict[int, int] = {}
    for mask in rel_masks:
        for col, row in pivots.items():
            if (mask >> col) & 1:
                mask ^= row
        if mask:
            low = (mask & -mask).bit_length() - 1
            pivots[low] = mask
    # full reduction: each pivot column appears in its own row only
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
    out = []
    for bits in range(2 ** len(basis)):
        mask = 0
        k = bits
        for b in basis:
            if k & 1:
                mask ^= b
            k >>= 1
        out.append(mask)
    return sorted(set(out))


def h1_f2_exact(cx: Complex) -> CheegerReport:
    """h1 over F2 by scanning every 1-cochain against the cocycle kernel."""
    m = len(cx.edges)
    if m > H1_F2_EXACT_MAX_EDGES:
        raise SizeGuardExceeded("exact h1 over F2", 2**m, 2**H1_F2_EXACT_MAX_EDGES)
    cocycles = _f2_cocycle_masks(cx)
    if 2**m * max(1, len(cocycles)) > EXACT_CANDIDATE_LIMIT:
        raise SizeGuardExceeded("exact h1 over F2", 2**m * len(cocycles), EXACT_CANDIDATE_LIMIT)
    mu1, mu2 = cx.measures.mu1, cx.measures.mu2
    rel_masks = []
    for per in cx.polygons:
        mask = 0
        for d in per:
            mask ^= 1 << (d >> 1)
        rel_masks.append(mask)
    cocycle_set = set(cocycles)
    best = None
    for alpha in range(2**m):
        if alpha in cocycle_set:
            continue
        defect = sum(
            (mu2[p] for p, mask in enumerate(rel_masks) if bin(alpha & mask).count("1") & 1),
            Fraction(0),
        )
        dist = min(
            sum((mu1[e] for e in range(m) if ((alpha ^ z) >> e) & 1), Fraction(0))
            for z in cocycles
        )
        ratio = defect / dist
        if best is None or ratio < best[0]:
            best = (ratio, alpha)
    if best is None:
        return CheegerReport("h1", "f2", "exact", None, infinite=True,
                             stats={"cochains": 2**m, "cocycles": len(cocycles)})
    alpha = Cochain1(cx, Coefficient.f2(), tuple((best[1] >> e) & 1 for e in range(m)))
    return CheegerReport(
        "h1", "f2", "exact", best[0],
        witness={"cochain": ch.cochain_to_dict(alpha)},
        stats={"cochains": 2**m, "cocycles": len(cocycles)},
    )


def _degree_exact_h1(cx: Complex, coeff: Coefficient, denominator: str):
    """Exact per-degree scan of all cochains; denominator is "cocycles" or
    "coboundaries".  Returns (value or None-if-empty-domain, witness, stats)."""
    m = len(cx.edges)
    els = ch.velements(coeff)
    count = len(els) ** m
    if count > EXACT_CANDIDATE_LIMIT:
        raise SizeGuardExceeded(f"exact h1 at {coeff}", count, EXACT_CANDIDATE_LIMIT)
    best = None
    examined = 0
    for values in itertools.product(els, repeat=m):
        a = Cochain1(cx, coeff, values)
        if denominator == "cocycles":
            defect = ch.defect(a)
            if defect == 0:
                continue
            dist, _ = ch.dist_to_cocycles(a, "exact")
        else:
            if ch.is_coboundary_exact(a):
                continue
            defect = ch.defect(a)
            dist, _ = ch.dist_to_coboundaries(a, "exact")
        examined += 1
        ratio = defect / dist
        if best is None or ratio < best[0]:
            best = (ratio, a)
    stats = {"cochains": count, "in_domain": examined}
    if best is None:
        return None, None, stats
    return best[0], best[1], stats


def h1_sym_truncated(cx: Complex, n_max: int, mode: str = "exact",
                     samples: int = 64, seed: int = 42) -> CheegerReport:
    """min over degrees 2..n_max of the exact degree-n cocycle Cheeger
    constant.  Degrees whose exhaustive search trips the size guard are
    skipped in exact mode and sampled (witness upper bounds only) otherwise.
    """
    return _sym_truncated(cx, n_max, "cocycles", "h1", mode, samples, seed)


def hB_variants(cx: Complex, n_max: int = 2, mode: str = "exact",
                samples: int = 64, seed: int = 42,
                coefficient: str = "sym") -> CheegerReport:
    """Coboundary Cheeger constant (F2, or Sym truncated at n_max).

    The domain includes non-coboundary cocycles, so the value is 0 as soon
    as the first cohomology fails to vanish at some degree; the report notes
    when h = hB because cohomology vanishes at all tested degrees.
    """
    if coefficient == "f2":
        report = _hB_f2_exact(cx)
        vanishes = cov.h1_vanishes_at_level(cx, Coefficient.f2())[0]
    else:
        report = _sym_truncated(cx, n_max, "coboundaries", "hB1", mode, samples, seed)
        vanishes = all(
            cov.h1_vanishes_at_level(cx, Coefficient.sym(n))[0]
            for n in range(2, n_max + 1)
        )
    report.stats["h1_vanishes_at_all_tested_degrees"] = vanishes
    report.stats["equals_cocycle_constant"] = vanishes
    return report


def _hB_f2_exact(cx: Complex) -> CheegerReport:
    m = len(cx.edges)
    if m > H1_F2_EXACT_MAX_EDGES:
        raise SizeGuardExceeded("exact hB over F2", 2**m, 2**H1_F2_EXACT_MAX_EDGES)
    mu1, mu2 = cx.measures.mu1, cx.measures.mu2
    rel_masks = []
    for per in cx.polygons:
        mask = 0
        for d in per:
            mask ^= 1 << (d >> 1)
        rel_masks.append(mask)
    coboundaries = set()
    for bits in range(2**cx.n_vertices):
        mask = 0
        for e, (s, t) in enumerate(cx.edges):
            if ((bits >> s) ^ (bits >> t)) & 1:
                mask |= 1 << e
        coboundaries.add(mask)
    if 2**m * len(coboundaries) > EXACT_CANDIDATE_LIMIT:
        raise SizeGuardExceeded("exact hB over F2", 2**m * len(coboundaries), EXACT_CANDIDATE_LIMIT)
    coboundary_list = sorted(coboundaries)
    best = None
    for alpha in range(2**m):
        if alpha in coboundaries:
            continue
        defect = sum(
            (mu2[p] for p, mask in enumerate(rel_masks) if bin(alpha & mask).count("1") & 1),
            Fraction(0),
        )
        dist = min(
            sum((mu1[e] for e in range(m) if ((alpha ^ z) >> e) & 1), Fraction(0))
            for z in coboundary_list
        )
        ratio = defect / dist
        if best is None or ratio < best[0]:
            best = (ratio, alpha)
    if best is None:
        return CheegerReport("hB1", "f2", "exact", None, infinite=True,
                             stats={"cochains": 2**m})
    alpha = Cochain1(cx, Coefficient.f2(), tuple((best[1] >> e) & 1 for e in range(m)))
    return CheegerReport(
        "hB1", "f2", "exact", best[0],
        witness={"cochain": ch.cochain_to_dict(alpha)},
        stats={"cochains": 2**m, "coboundaries": len(coboundaries)},
    )


def _sym_truncated(cx, n_max, denominator, kind, mode, samples, seed) -> CheegerReport:
    import random

    per_degree = []
    best = None
    skipped = []
    for n in range(2, n_max + 1):
        coeff = Coefficient.sym(n)
        try:
            value, witness, stats = _degree_exact_h1(cx, coeff, denominator)
            entry = {"degree": n, "mode": "exact", **stats}
            if value is None:
                entry["value"] = None
                entry["infinite"] = True
            else:
                entry["value"] = float(value)
                entry["value_exact"] = str(value)
                if best is None or value < best[0]:
                    best = (value, witness, n, "exact")
            per_degree.append(entry)
        except SizeGuardExceeded as guard:
            if mode == "exact":
                skipped.append({"degree": n, "reason": str(guard)})
                continue
            rng = random.Random(seed + n)
            got = None
            entry = {"degree": n, "mode": "sampled", "samples": samples}
            try:
                for _ in range(samples):
                    a = ch.random_cochain1(cx, coeff, rng)
                    if denominator == "cocycles":
                        defect = ch.defect(a)
                        if defect == 0:
                            continue
                        dist, _ = ch.dist_to_cocycles(a, "exact")
                    else:
                        if ch.is_coboundary_exact(a):
                            continue
                        defect = ch.defect(a)
                        dist, _ = ch.dist_to_coboundaries(a, "exact")
                    ratio = defect / dist
                    if got is None or ratio < got[0]:
                        got = (ratio, a)
            except SizeGuardExceeded as inner:
                # exact denominators are out of reach too: no certified bound
                got = None
                entry["uncertified"] = str(inner)
            if got is not None:
                entry["upper"] = float(got[0])
                entry["upper_exact"] = str(got[0])
                if best is None or got[0] < best[0]:
                    best = (got[0], got[1], n, "sampled")
            per_degree.append(entry)
    coeff_tag = {"sym_truncated_at": n_max}
    if best is None:
        return CheegerReport(kind, coeff_tag, mode, None, infinite=True,
                             per_degree=per_degree, stats={"skipped": skipped})
    value, witness, at_degree, how = best
    report = CheegerReport(
        kind, coeff_tag, mode,
        value if how == "exact" else None,
        upper=value if how == "sampled" else None,
        witness={"degree": at_degree, "cochain": ch.cochain_to_dict(witness)},
        per_degree=per_degree,
        stats={"skipped": skipped, "attained_at_degree": at_degree},
    )
    return report


# ---------------------------------------------------------------------------
# cosystoles
# ---------------------------------------------------------------------------


def cosystole_sym(cx: Complex, n_max: int) -> CosystoleReport:
    """Minimal norm of a connected non-coboundary cocycle over degrees
    2..n_max.  Each enumerated class is minimized over its orbit (the
    definition's infimum ranges over the whole orbit); when the orbit
    search trips the size guard the representative's norm stands as an
    upper bound and is flagged."""
    per_degree = []
    best = None
    flagged = False
    for n in range(2, n_max + 1):
        coeff = Coefficient.sym(n)
        reps = cov.enumerate_cocycles(cx, coeff)
        entry = {"degree": n, "classes": len(reps), "witnesses": 0}
        degree_best = None
        for rep in reps:
            if ch.is_coboundary_exact(rep) or not ch.is_connected_cochain(rep):
                continue
            entry["witnesses"] += 1
            try:
                dist, beta = ch.dist_to_coboundaries(rep, "exact")
                witness = ch.act(beta, rep)
                exact_orbit = True
            except SizeGuardExceeded:
                dist, witness = ch.norm(rep), rep
                exact_orbit = False
                flagged = True
            if degree_best is None or dist < degree_best[0]:
                degree_best = (dist, witness, exact_orbit)
        if degree_best is not None:
            entry["value"] = float(degree_best[0])
            entry["value_exact"] = str(degree_best[0])
            entry["orbit_minimized"] = degree_best[2]
            if best is None or degree_best[0] < best[0]:
                best = (degree_best[0], degree_best[1], n)
        per_degree.append(entry)
    if best is None:
        return CosystoleReport(n_max, None, True, None, per_degree)
    value, witness, at_degree = best
    assert ch.is_cocycle(witness) and ch.is_connected_cochain(witness)
    assert not ch.is_coboundary_exact(witness)
    return CosystoleReport(
        n_max, value, False,
        {"degree": at_degree, "cochain": ch.cochain_to_dict(witness)},
        per_degree,
        stats={"upper_bound_only": flagged},
    )


def verify_cover_expansion(a: Cochain1) -> dict:
    """For a connected cochain a: its norm is at least half the F2 edge
    expansion of the 1-skeleton cover it encodes.

    The level indicators of a connected cover are non-constant with
    distance exactly 1/n to the constants, which is all the 0-dimensional
    argument uses, so cocycle-ness is not required here."""
    if not ch.is_connected_cochain(a):
        raise ValueError("expected a connected cochain")
    cover = cov.cover_complex(cov.covering_from_cochain(a), with_polygons=False)
    report = h0_f2(cover, "exact")
    nrm = ch.norm(a)
    bound = report.value / 2
    return {
        "norm": nrm,
        "h0_of_cover": report.value,
        "bound": bound,
        "holds": nrm >= bound,
    }


def reevaluate_witness_ratio(cx: Complex, report: CheegerReport) -> Fraction:
    """Recompute the ratio of a report's witness cochain from scratch."""
    data = report.witness["cochain"]
    a = ch.cochain_from_dict(cx, data)
    if report.kind == "h0":
        defect = ch.norm(ch.delta0(a))
        mu0 = cx.measures.mu0
        mass = sum((mu0[v] for v in range(cx.n_vertices) if a.values[v]), Fraction(0))
        return defect / min(mass, 1 - mass)
    defect = ch.defect(a)
    if report.kind == "h1":
        dist, _ = ch.dist_to_cocycles(a, "exact")
    else:
        dist, _ = ch.dist_to_coboundaries(a, "exact")
    return defect / dist
