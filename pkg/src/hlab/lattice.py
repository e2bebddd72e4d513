"""Greatest-fixed-point iteration on finite power-set lattices, plus the two
exact-rational constructions showing which hypotheses are load-bearing.

On a finite universe the union-of-images operator is monotone, so the
chain X, F(X), F(F(X)), ... is decreasing and stabilizes within |X| steps
on the greatest fixed point.  The premises verifier reports the two
hypotheses the general (infinite) theory needs on top of that: pairwise
disjoint map images and finite fibres.

The two counterexample builders certify, in exact rational arithmetic,
that each hypothesis is genuinely needed:

* fractional shifts x -> frac(x + 1/m) on [0, 1) have finite fibres but
  overlapping images, and the union operator fails order-continuity: 0
  survives in every shifted set of a shrinking chain while the image of
  the chain's intersection misses 0;
* the maps x -> (x+1)/2^(2m-1) on [0, 1] have pairwise disjoint images
  whose union is not closed: the image intervals march down to 0 without
  ever containing it, so the system is not locally finite at 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import CapExceeded
from .ifs import PropertyReport


def _validate(maps: dict, universe) -> frozenset:
    u = frozenset(universe)
    if not u:
        raise ValueError("universe must be nonempty")
    if len(u) != len(tuple(universe)):
        raise ValueError("universe elements must be distinct")
    if not maps:
        raise ValueError("need at least one map")
    for name, table in maps.items():
        if set(table.keys()) != u:
            raise ValueError(f"map {name!r} is not total on the universe")
        bad = set(table.values()) - u
        if bad:
            raise ValueError(f"map {name!r} leaves the universe: {sorted(map(str, bad))}")
    return u


def f_union(maps: dict, subset, universe=None) -> frozenset:
    """Union of the map images of a subset."""
    s = frozenset(subset)
    if universe is not None:
        extra = s - frozenset(universe)
        if extra:
            raise ValueError(f"elements outside universe: {sorted(map(str, extra))}")
    return frozenset(t[x] for t in maps.values() for x in s)


@dataclass(frozen=True)
class GfpResult:
    gfp: frozenset
    steps: int
    chain_sizes: tuple[int, ...]
    fixed_verified: bool


def tk_gfp(maps: dict, universe, seed=None) -> GfpResult:
    """Iterate the union operator downward from the universe (or a seed).

    The seed, when given, must satisfy F(seed) within seed; the result is
    then the greatest fixed point below the seed.  Stabilization within
    |universe| steps is guaranteed by the decreasing chain; the result is
    re-checked to be fixed and the outcome reported explicitly.
    """
    u = _validate(maps, universe)
    if seed is not None:
        a = frozenset(seed)
        if not a <= u:
            raise ValueError("seed must be a subset of the universe")
        if not f_union(maps, a) <= a:
            raise ValueError("seed is not post-fixed: F(seed) is not within seed")
    else:
        a = u
    sizes = [len(a)]
    steps = 0
    while True:
        b = f_union(maps, a)
        if b == a:
            break
        a = b
        steps += 1
        sizes.append(len(a))
        if steps > len(u) + 1:
            raise RuntimeError("decreasing chain failed to stabilize")
    return GfpResult(a, steps, tuple(sizes), f_union(maps, a) == a)


def brute_force_fixed_subsets(maps: dict, universe, cap: int = 20) -> list[frozenset]:
    """All subsets fixed by the union operator, by 2^|X| enumeration."""
    u = _validate(maps, universe)
    elems = sorted(u, key=str)
    if len(elems) > cap:
        raise CapExceeded(f"universe of {len(elems)} elements exceeds the cap {cap}")
    fixed = []
    for mask in range(1 << len(elems)):
        s = frozenset(e for k, e in enumerate(elems) if mask >> k & 1)
        if f_union(maps, s) == s:
            fixed.append(s)
    return fixed


def check_continuity_premises(maps: dict, universe) -> PropertyReport:
    """Pairwise-disjoint images and fibre sizes of every map.

    These are the hypotheses under which the union operator is
    order-continuous in general; on failure the witness is a pair of map
    names together with a shared image element.
    """
    u = _validate(maps, universe)
    images = {name: frozenset(t.values()) for name, t in maps.items()}
    fibre_max = 0
    for table in maps.values():
        counts: dict = {}
        for v in table.values():
            counts[v] = counts.get(v, 0) + 1
        fibre_max = max(fibre_max, max(counts.values()))
    details = {
        "image_sizes": {name: len(im) for name, im in images.items()},
        "max_fibre": fibre_max,
        "universe_size": len(u),
    }
    for (ni, imi), (nj, imj) in itertools.combinations(images.items(), 2):
        common = imi & imj
        if common:
            details["shared_element"] = sorted(map(str, common))[0]
            return PropertyReport(
                "non-overlapping", "fails", 0, (ni, nj), details
            )
    return PropertyReport("non-overlapping", "holds", fibre_max, None, details)


# ---------------------------------------------------------------------------
# exact interval machinery for the counterexamples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalInterval:
    """Interval with rational endpoints and open/closed flags."""

    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if self.lo > self.hi or (self.lo == self.hi and not (self.lo_closed and self.hi_closed)):
            raise ValueError("empty interval")

    def contains(self, x) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    def intersect(self, other: "RationalInterval") -> "RationalInterval | None":
        if self.lo > other.lo:
            lo, loc = self.lo, self.lo_closed
        elif other.lo > self.lo:
            lo, loc = other.lo, other.lo_closed
        else:
            lo, loc = self.lo, self.lo_closed and other.lo_closed
        if self.hi < other.hi:
            hi, hic = self.hi, self.hi_closed
        elif other.hi < self.hi:
            hi, hic = other.hi, other.hi_closed
        else:
            hi, hic = self.hi, self.hi_closed and other.hi_closed
        if lo > hi or (lo == hi and not (loc and hic)):
            return None
        return RationalInterval(lo, hi, loc, hic)

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo}, {self.hi}{right}"


@dataclass(frozen=True)
class IntervalUnion:
    """Finite union of disjoint rational intervals."""

    parts: tuple[RationalInterval, ...]

    def contains(self, x) -> bool:
        return any(p.contains(x) for p in self.parts)

    def intersect(self, other: "IntervalUnion") -> "IntervalUnion":
        out = []
        for a in self.parts:
            for b in other.parts:
                c = a.intersect(b)
                if c is not None:
                    out.append(c)
        return IntervalUnion(tuple(sorted(out, key=lambda p: (p.lo, p.hi))))

    def __str__(self) -> str:
        return " u ".join(str(p) for p in self.parts) if self.parts else "{}"


def _frac(x: Fraction) -> Fraction:
    return x - math.floor(x)


def fractional_shift_counterexample(n_max: int, m_max: int) -> PropertyReport:
    """Certify the order-continuity failure of overlapping fractional shifts.

    With C_n = [0, 1/n] u [1 - 1/n, 1) and f_m(x) = frac(x + 1/m), checks
    exactly: (i) 0 lies in f_n(C_n) for every 3 <= n <= n_max via the
    witness x = 1 - 1/n, (ii) the intersection of the C_n contains 0,
    (iii) the image of {0} under the m <= m_max maps is {1/m} and misses 0.
    So 0 survives in every shifted set of the chain while the image of the
    chain's intersection cannot reach it.
    """
    if n_max < 3 or m_max < 2:
        raise ValueError("need n_max >= 3 and m_max >= 2")
    witnesses = {}
    for n in range(3, n_max + 1):
        c_n = IntervalUnion(
            (
                RationalInterval(Fraction(0), Fraction(1, n)),
                RationalInterval(Fraction(1) - Fraction(1, n), Fraction(1), True, False),
            )
        )
        x = 1 - Fraction(1, n)
        if not c_n.contains(x):
            return PropertyReport(
                "gfp-continuity-counterexample", "fails", 0, ("witness outside set", n),
                {"n": n},
            )
        if _frac(x + Fraction(1, n)) != 0:
            return PropertyReport(
                "gfp-continuity-counterexample", "fails", 0, ("shift misses zero", n),
                {"n": n},
            )
        witnesses[n] = x
    inter = IntervalUnion((RationalInterval(Fraction(0), Fraction(1)),))
    for n in range(3, n_max + 1):
        inter = inter.intersect(
            IntervalUnion(
                (
                    RationalInterval(Fraction(0), Fraction(1, n)),
                    RationalInterval(Fraction(1) - Fraction(1, n), Fraction(1), True, False),
                )
            )
        )
    if not inter.contains(Fraction(0)):
        return PropertyReport(
            "gfp-continuity-counterexample", "fails", 0, ("intersection misses zero",), {}
        )
    image0 = sorted(_frac(Fraction(1, m)) for m in range(2, m_max + 1))
    if any(v == 0 for v in image0):
        return PropertyReport(
            "gfp-continuity-counterexample", "fails", 0, ("zero in image",), {}
        )
    details = {
        "shift_witnesses": {n: witnesses[n] for n in sorted(witnesses)[:5]},
        "checked_sets": f"n = 3..{n_max}",
        "intersection": str(inter),
        "image_of_zero_min": image0[0],
        "image_of_zero_max": image0[-1],
        "missing_point": Fraction(0),
    }
    # The gap between 0 and the image of the intersection point.
    return PropertyReport(
        "gfp-continuity-counterexample", "holds", image0[0], None, details
    )


def shrinking_images_counterexample(m_max: int) -> PropertyReport:
    """Certify the non-closed union of the maps x -> (x+1)/2^(2m-1) on [0, 1].

    Exact checks: the image intervals [2^-(2m-1), 2^-(2m-2)] are pairwise
    disjoint for m <= m_max, their left endpoints decrease to
    2^-(2*m_max-1) at the truncation while staying positive, and 0 lies in
    no image.  The union therefore accumulates at 0 without containing it.
    """
    if m_max < 2:
        raise ValueError("need m_max >= 2")
    images = []
    for m in range(1, m_max + 1):
        a = Fraction(1, 2 ** (2 * m - 1))
        lo = a * 0 + a
        hi = a * 1 + a
        images.append(RationalInterval(lo, hi))
    min_gap = None
    for a, b in zip(images, images[1:]):
        if b.hi >= a.lo:
            return PropertyReport(
                "image-closure-counterexample", "fails", 0, (str(a), str(b)), {}
            )
        gap = a.lo - b.hi
        if min_gap is None or gap < min_gap:
            min_gap = gap
    if any(im.contains(Fraction(0)) for im in images):
        return PropertyReport(
            "image-closure-counterexample", "fails", 0, ("zero attained",), {}
        )
    inf_union = min(im.lo for im in images)
    expected = Fraction(1, 2 ** (2 * m_max - 1))
    if inf_union != expected:
        return PropertyReport(
            "image-closure-counterexample", "fails", 0, ("wrong infimum",),
            {"inf": inf_union, "expected": expected},
        )
    details = {
        "first_images": [str(im) for im in images[:4]],
        "inf_of_union": inf_union,
        "pairwise_disjoint": f"m = 1..{m_max}",
        "zero_attained": False,
    }
    return PropertyReport("image-closure-counterexample", "holds", min_gap, None, details)
