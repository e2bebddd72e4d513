"""Contractive affine systems and verifiers for their separation classes.

The central object is a finite or truncated-infinite family of affine
contractions of R^d together with a box that every map sends into itself.
Verifiers decide (or honestly refuse to decide) membership in the classes
used downstream: non-overlapping images, local finiteness, strong
non-overlap of all composite images, and the positive-separation constants
of the strong separation condition.

Disjointness of affine images is decided on axis-aligned interval
enclosures, which are exact for affine maps on boxes in 1-D and
conservative enclosures in higher dimension; point sampling only ever
refines a box-level "maybe" into a witnessed failure, never into a pass.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import CapExceeded, DimensionMismatch, SpecFormatError, UnknownIndex
from .exact import Scalar, eval_rational, is_exact, parse_scalar, scalar_to_json
from .metric import PointCloud
from .words import Word

_NORM_SLACK = 1e-12
_FLOAT_BOX_SLACK = 1e-9


# ---------------------------------------------------------------------------
# boxes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Box:
    """Axis-aligned box given by per-axis (lo, hi) bounds."""

    bounds: tuple[tuple[Scalar, Scalar], ...]

    def __post_init__(self):
        object.__setattr__(self, "bounds", tuple((lo, hi) for lo, hi in self.bounds))
        if not self.bounds:
            raise ValueError("box needs at least one axis")
        for lo, hi in self.bounds:
            if lo > hi:
                raise ValueError(f"inverted box axis ({lo}, {hi})")

    @property
    def dimension(self) -> int:
        return len(self.bounds)

    @property
    def is_exact(self) -> bool:
        return all(is_exact(lo) and is_exact(hi) for lo, hi in self.bounds)

    def center(self) -> tuple:
        if self.is_exact:
            return tuple(Fraction(lo + hi, 2) for lo, hi in self.bounds)
        return tuple((float(lo) + float(hi)) / 2.0 for lo, hi in self.bounds)

    def diagonal(self) -> Scalar:
        if self.dimension == 1:
            lo, hi = self.bounds[0]
            return hi - lo
        return math.sqrt(sum((float(hi) - float(lo)) ** 2 for lo, hi in self.bounds))

    def contains(self, p, slack: Scalar = 0) -> bool:
        if len(p) != self.dimension:
            raise DimensionMismatch("point/box dimension mismatch")
        return all(
            lo - slack <= c <= hi + slack for c, (lo, hi) in zip(p, self.bounds)
        )

    def intersects(self, other: "Box") -> bool:
        return all(
            lo1 <= hi2 and lo2 <= hi1
            for (lo1, hi1), (lo2, hi2) in zip(self.bounds, other.bounds)
        )

    def gap_to(self, other: "Box") -> Scalar:
        """Euclidean distance between the two boxes; 0 iff they intersect."""
        gaps = []
        for (lo1, hi1), (lo2, hi2) in zip(self.bounds, other.bounds):
            g = max(lo2 - hi1, lo1 - hi2)
            gaps.append(g if g > 0 else 0)
        if self.dimension == 1:
            return gaps[0]
        if all(g == 0 for g in gaps):
            return 0
        return math.sqrt(sum(float(g) ** 2 for g in gaps))

    def corners(self):
        for combo in itertools.product(*self.bounds):
            yield tuple(combo)

    def grid(self, per_axis: int = 4):
        """Deterministic sample points, per_axis values per axis incl. endpoints."""
        axes = []
        for lo, hi in self.bounds:
            if per_axis == 1:
                axes.append([lo])
                continue
            if is_exact(lo) and is_exact(hi):
                axes.append(
                    [lo + Fraction(t, per_axis - 1) * (hi - lo) for t in range(per_axis)]
                )
            else:
                lo, hi = float(lo), float(hi)
                axes.append([lo + t * (hi - lo) / (per_axis - 1) for t in range(per_axis)])
        for combo in itertools.product(*axes):
            yield tuple(combo)


# ---------------------------------------------------------------------------
# affine contractions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AffineContraction:
    """x -> M x + b with a certified Lipschitz bound.

    lip_bound must dominate the operator norm of M (validated numerically
    with 1e-12 slack) and be < 1, except for the identity map, which is
    admitted with lip_bound 1 so empty-word composites are representable.
    bilip_lower, when present, is a certified lower bi-Lipschitz constant.
    """

    matrix: tuple[tuple[Scalar, ...], ...]
    offset: tuple[Scalar, ...]
    lip_bound: Scalar
    bilip_lower: Scalar | None = None

    def __post_init__(self):
        object.__setattr__(self, "matrix", tuple(tuple(row) for row in self.matrix))
        object.__setattr__(self, "offset", tuple(self.offset))
        d = len(self.offset)
        if d < 1 or len(self.matrix) != d or any(len(r) != d for r in self.matrix):
            raise ValueError("matrix must be d x d matching the offset length")
        if self.lip_bound < 0:
            raise ValueError("lip_bound must be >= 0")
        if self.lip_bound >= 1 and not (self.lip_bound == 1 and self.is_identity):
            raise ValueError(f"lip_bound {self.lip_bound} not < 1 for a non-identity map")
        norm = self._operator_norm()
        if norm > float(self.lip_bound) + _NORM_SLACK:
            raise ValueError(
                f"declared lip_bound {self.lip_bound} below operator norm {norm}"
            )
        if self.bilip_lower is not None:
            if not 0 < self.bilip_lower <= self.lip_bound:
                raise ValueError("need 0 < bilip_lower <= lip_bound")
            smin = self._smallest_singular_value()
            if smin < float(self.bilip_lower) - _NORM_SLACK:
                raise ValueError(
                    f"declared bilip_lower {self.bilip_lower} above smallest "
                    f"singular value {smin}"
                )

    def _operator_norm(self) -> float:
        if self.dimension == 1:
            return abs(float(self.matrix[0][0]))
        return float(np.linalg.norm(self._float_matrix(), 2))

    def _smallest_singular_value(self) -> float:
        if self.dimension == 1:
            return abs(float(self.matrix[0][0]))
        return float(np.linalg.svd(self._float_matrix(), compute_uv=False)[-1])

    def _float_matrix(self) -> np.ndarray:
        return np.asarray([[float(v) for v in row] for row in self.matrix], dtype=np.float64)

    @property
    def dimension(self) -> int:
        return len(self.offset)

    @property
    def is_exact(self) -> bool:
        return all(is_exact(v) for row in self.matrix for v in row) and all(
            is_exact(v) for v in self.offset
        )

    @property
    def is_identity(self) -> bool:
        return all(
            row[j] == (1 if i == j else 0) for i, row in enumerate(self.matrix) for j in range(len(row))
        ) and all(v == 0 for v in self.offset)

    @classmethod
    def identity(cls, dimension: int) -> "AffineContraction":
        m = tuple(tuple(1 if i == j else 0 for j in range(dimension)) for i in range(dimension))
        return cls(m, (0,) * dimension, 1, 1)

    def __call__(self, point) -> tuple:
        if len(point) != self.dimension:
            raise DimensionMismatch("point/map dimension mismatch")
        return tuple(
            sum(m * x for m, x in zip(row, point)) + b
            for row, b in zip(self.matrix, self.offset)
        )

    def apply_array(self, arr: np.ndarray) -> np.ndarray:
        return arr @ self._float_matrix().T + np.asarray(
            [float(v) for v in self.offset], dtype=np.float64
        )

    def compose(self, other: "AffineContraction") -> "AffineContraction":
        """self after other: (self.compose(other))(x) == self(other(x))."""
        if self.dimension != other.dimension:
            raise DimensionMismatch("composing maps of different dimension")
        d = self.dimension
        m = tuple(
            tuple(
                sum(self.matrix[i][k] * other.matrix[k][j] for k in range(d))
                for j in range(d)
            )
            for i in range(d)
        )
        b = tuple(
            sum(self.matrix[i][k] * other.offset[k] for k in range(d)) + self.offset[i]
            for i in range(d)
        )
        lip = self.lip_bound * other.lip_bound
        bilip = None
        if self.bilip_lower is not None and other.bilip_lower is not None:
            bilip = self.bilip_lower * other.bilip_lower
        return AffineContraction(m, b, lip, bilip)

    def image_box(self, box: Box) -> Box:
        """Exact axis-aligned enclosure of the image of a box."""
        bounds = []
        for row, b in zip(self.matrix, self.offset):
            lo = hi = b
            for m, (alo, ahi) in zip(row, box.bounds):
                p, q = m * alo, m * ahi
                if p > q:
                    p, q = q, p
                lo, hi = lo + p, hi + q
            bounds.append((lo, hi))
        return Box(tuple(bounds))


def apply_map(f: AffineContraction, cloud: PointCloud) -> PointCloud:
    """Image cloud; output resolution is lip_bound times the input resolution."""
    if f.dimension != cloud.dimension:
        raise DimensionMismatch("map/cloud dimension mismatch")
    res = 0 if cloud.resolution == 0 else f.lip_bound * cloud.resolution
    if cloud.is_exact and f.is_exact:
        return PointCloud([f(p) for p in cloud], res)
    return PointCloud(f.apply_array(cloud.array()), float(res))


# ---------------------------------------------------------------------------
# parametric families (truncated infinite systems)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParametricFamily:
    """1-D affine family f_m(x) = slope(m) x + intercept(m), m >= m_start.

    slope/intercept are closed-form rational expressions in the integer
    parameter m (see exact.eval_rational), so member maps and image
    intervals are available for every parameter, not just the truncation.
    """

    slope: str
    intercept: str
    m_start: int
    truncate: int
    kind: str = "affine-1d"

    def __post_init__(self):
        if self.kind != "affine-1d":
            raise SpecFormatError(f"unsupported family kind {self.kind!r}")
        if self.truncate < 1:
            raise SpecFormatError("truncate must be >= 1")
        # Parse both expressions once to fail fast on malformed input.
        self.coefficients(self.m_start)

    def coefficients(self, m: int) -> tuple[Fraction, Fraction]:
        return eval_rational(self.slope, m), eval_rational(self.intercept, m)

    def member(self, m: int) -> AffineContraction:
        a, b = self.coefficients(m)
        bilip = abs(a) if a != 0 else None
        return AffineContraction(((a,),), (b,), abs(a), bilip)

    def image_interval(self, m: int, box: Box) -> tuple[Fraction, Fraction]:
        a, b = self.coefficients(m)
        lo, hi = box.bounds[0]
        u, v = a * lo + b, a * hi + b
        return (u, v) if u <= v else (v, u)

    def parameters(self):
        return range(self.m_start, self.m_start + self.truncate)


# ---------------------------------------------------------------------------
# the system
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IifsSpec:
    """An indexed family of affine contractions on a self-mapped box.

    maps is the (possibly truncated) ordered list of (index symbol, map).
    Validation certifies: distinct symbols, common dimension, contraction
    factor sup lip < 1, and image containment f_i(box) within box by exact
    interval evaluation (with 1e-9 slack for float data).
    """

    dimension: int
    maps: tuple[tuple[str, AffineContraction], ...]
    box: Box
    family: ParametricFamily | None = None

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple((s, f) for s, f in self.maps))
        if not self.maps:
            raise SpecFormatError("a system needs at least one map")
        if self.box.dimension != self.dimension:
            raise SpecFormatError("box/system dimension mismatch")
        syms = [s for s, _ in self.maps]
        if len(set(syms)) != len(syms):
            raise SpecFormatError("index symbols must be distinct")
        for s, f in self.maps:
            if f.dimension != self.dimension:
                raise SpecFormatError(f"map {s!r} has wrong dimension")
            if f.lip_bound >= 1:
                raise SpecFormatError(f"map {s!r} is not a contraction")
        if max(f.lip_bound for _, f in self.maps) >= 1:
            raise SpecFormatError("contraction factor must be < 1")
        slack = 0 if self.is_exact else _FLOAT_BOX_SLACK
        for s, f in self.maps:
            img = f.image_box(self.box)
            for (lo, hi), (ilo, ihi) in zip(self.box.bounds, img.bounds):
                if ilo < lo - slack or ihi > hi + slack:
                    raise SpecFormatError(
                        f"image of map {s!r} leaves the domain box: {img.bounds}"
                    )

    @cached_property
    def is_exact(self) -> bool:
        return self.box.is_exact and all(f.is_exact for _, f in self.maps)

    @cached_property
    def contraction_c(self) -> Scalar:
        return max(f.lip_bound for _, f in self.maps)

    @cached_property
    def bilip_floor(self) -> Scalar | None:
        lowers = [f.bilip_lower for _, f in self.maps]
        if any(l is None for l in lowers):
            return None
        return min(lowers)

    @cached_property
    def symbols(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.maps)

    @cached_property
    def _by_symbol(self) -> dict:
        return dict(self.maps)

    def map_for(self, symbol: str) -> AffineContraction:
        try:
            return self._by_symbol[symbol]
        except KeyError:
            raise UnknownIndex(f"no map with index {symbol!r}") from None

    @cached_property
    def truncation(self) -> int | None:
        return self.family.truncate if self.family is not None else None

    def fingerprint(self) -> str:
        blob = json.dumps(spec_to_dict(self), sort_keys=True)
        return hashlib.sha256(blob.encode("ascii")).hexdigest()[:16]


def compose_word(spec: IifsSpec, word: Word) -> AffineContraction:
    """Composite map of a finite word, first letter outermost.

    The empty word gives the identity (lip_bound 1, exempt from the
    contraction requirement).
    """
    comp = AffineContraction.identity(spec.dimension)
    for letter in word:
        comp = comp.compose(spec.map_for(letter))
    return comp


# ---------------------------------------------------------------------------
# class-membership reports
# ---------------------------------------------------------------------------

_VERDICTS = ("holds", "fails", "inconclusive")


@dataclass(frozen=True)
class PropertyReport:
    """Outcome of a class-membership verifier, with witnesses and margins."""

    name: str
    verdict: str
    margin: Scalar
    witness: tuple | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in _VERDICTS:
            raise ValueError(f"verdict must be one of {_VERDICTS}")
        if self.verdict == "fails" and self.witness is None:
            raise ValueError("a failing verdict requires a witness")
        if self.verdict == "holds" and self.witness is not None:
            raise ValueError("a holding verdict must not carry a witness")
        if not (self.margin >= 0 or math.isinf(float(self.margin))):
            raise ValueError("margin must be >= 0")

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    def as_dict(self) -> dict:
        return {
            "property": self.name,
            "verdict": self.verdict,
            "margin": scalar_to_json(self.margin),
            "witness": _jsonify(self.witness),
            "details": _jsonify(self.details),
        }


def _jsonify(value):
    if value is None or isinstance(value, (bool, str, int, float)):
        return scalar_to_json(value) if not isinstance(value, (bool, str)) else value
    if isinstance(value, Fraction):
        return scalar_to_json(value)
    if isinstance(value, dict):
        return {str(k): _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, Word):
        return str(value)
    return str(value)


# ---------------------------------------------------------------------------
# verifiers
# ---------------------------------------------------------------------------


def _preimage_in_box(f: AffineContraction, z, box: Box, slack):
    """A point y of the box with f(y) == z, or None."""
    if f.dimension == 1:
        a, b = f.matrix[0][0], f.offset[0]
        if a == 0:
            if abs(float(z[0]) - float(b)) <= max(float(slack), 1e-12):
                return box.center()
            return None
        y = ((z[0] - b) / a,)
        return y if box.contains(y, slack) else None
    m = f._float_matrix()
    if abs(np.linalg.det(m)) < 1e-14:
        return None
    y = tuple(np.linalg.solve(m, np.asarray([float(c) for c in z]) - np.asarray(
        [float(v) for v in f.offset])))
    if box.contains(y, max(float(slack), 1e-9)):
        zz = f(y)
        if all(abs(float(u) - float(v)) <= 1e-9 for u, v in zip(zz, z)):
            return y
    return None


def _common_image_point(spec: IifsSpec, fi, fj, samples_per_axis):
    slack = 0 if spec.is_exact else _FLOAT_BOX_SLACK
    for f, g in ((fi, fj), (fj, fi)):
        for x in spec.box.grid(samples_per_axis):
            z = f(x)
            if _preimage_in_box(g, z, spec.box, slack) is not None:
                return z
    return None


def check_non_overlapping(spec: IifsSpec, samples_per_axis: int = 4) -> PropertyReport:
    """Pairwise disjointness of the map images of the domain box.

    Holds when all image enclosures are disjoint with positive margin
    (exact for 1-D affine images).  When enclosures meet, a deterministic
    grid of sample points is pushed through one map and checked for exact
    membership in the other image; a hit is a witnessed failure, no hit is
    inconclusive at this sampling resolution.
    """
    boxes = [(s, f, f.image_box(spec.box)) for s, f in spec.maps]
    min_gap = math.inf
    touching = []
    for (si, fi, bi), (sj, fj, bj) in itertools.combinations(boxes, 2):
        g = bi.gap_to(bj)
        if g > 0:
            min_gap = min(min_gap, g)
        else:
            touching.append((si, fi, sj, fj))
    details = {"pairs_checked": len(boxes) * (len(boxes) - 1) // 2}
    if spec.truncation is not None:
        details["truncation"] = spec.truncation
    if not touching:
        margin = min_gap if len(boxes) > 1 else math.inf
        return PropertyReport("non-overlapping", "holds", margin, None, details)
    for si, fi, sj, fj in touching:
        z = _common_image_point(spec, fi, fj, samples_per_axis)
        if z is not None:
            details["overlap_point"] = z
            return PropertyReport("non-overlapping", "fails", 0, (si, sj), details)
    details["reason"] = (
        "image enclosures meet but no common point was found at this sampling resolution"
    )
    return PropertyReport("non-overlapping", "inconclusive", 0, None, details)


def _tail_sup_monotone(family: ParametricFamily, box: Box, probes: int):
    """Check image sups are non-increasing past the truncation; return probe list."""
    start = family.m_start + family.truncate
    sups = []
    lo_box = box.bounds[0][0]
    for m in range(start, start + probes):
        lo, hi = family.image_interval(m, box)
        if lo < lo_box:
            return None
        sups.append(hi)
    if any(b > a for a, b in zip(sups, sups[1:])):
        return None
    return sups


def check_locally_finite(
    spec: IifsSpec,
    eps: Scalar,
    cell_cap: int = 100_000,
    tail_probes: int = 48,
    tail_cap: int = 2**24,
) -> PropertyReport:
    """Counts, per eps-cell of the box, how many map images meet the cell.

    Finite systems always hold (margin = the largest per-cell count).  For
    a truncated family the infinite tail is handled through its closed-form
    image intervals: a cell is excluded once the monotone image-sup bound
    drops below the cell, and the verdict fails at the bottom edge of the
    box if the tail is eventually trapped inside the bottom cell, which
    means that cell meets infinitely many images.  Without a monotone
    bound the verdict is inconclusive.
    """
    if eps <= 0:
        raise ValueError("eps must be > 0")
    per_axis = [max(1, math.ceil(float(hi - lo) / float(eps))) for lo, hi in spec.box.bounds]
    n_cells = math.prod(per_axis)
    if n_cells > cell_cap:
        raise CapExceeded(f"{n_cells} cells exceed the cap {cell_cap}")

    def cell_box(idx):
        bounds = []
        for axis, k in enumerate(idx):
            lo, hi = spec.box.bounds[axis]
            w = (hi - lo) / per_axis[axis]
            bounds.append((lo + k * w, lo + (k + 1) * w))
        return Box(tuple(bounds))

    image_boxes = [f.image_box(spec.box) for _, f in spec.maps]
    counts = {}
    for idx in itertools.product(*(range(n) for n in per_axis)):
        cb = cell_box(idx)
        counts[idx] = sum(1 for ib in image_boxes if cb.intersects(ib))
    details = {"cells": n_cells, "max_count_truncated": max(counts.values())}

    if spec.family is None:
        return PropertyReport(
            "locally-finite", "holds", max(counts.values()), None, details
        )

    family = spec.family
    sups = _tail_sup_monotone(family, spec.box, tail_probes)
    if sups is None:
        details["reason"] = "no monotone image bound available for the family tail"
        return PropertyReport("locally-finite", "inconclusive", 0, None, details)
    details["tail_probes"] = tail_probes
    box_lo = spec.box.bounds[0][0]
    tail_start = family.m_start + family.truncate
    worst = max(counts.values())
    for idx in itertools.product(*(range(n) for n in per_axis)):
        cb = cell_box(idx)
        a, b = cb.bounds[0]
        if a <= box_lo and sups[-1] <= b:
            # Monotone sups and box containment trap every later image
            # inside this bottom cell: it meets infinitely many images.
            details["trapped_from_parameter"] = tail_start + len(sups) - 1
            return PropertyReport(
                "locally-finite", "fails", 0, (box_lo,), details
            )
        # Doubling search for a parameter whose image sup falls below the cell.
        m = tail_start
        excluded = None
        while m <= tail_cap:
            _, hi = family.image_interval(m, spec.box)
            if hi < a:
                excluded = m
                break
            m = 2 * m if m > 0 else 1
        if excluded is None:
            details["reason"] = f"tail not excluded from cell {idx} within parameter cap"
            return PropertyReport("locally-finite", "inconclusive", 0, None, details)
        worst = max(worst, counts[idx] + (excluded - tail_start))
    details["max_count_bound"] = worst
    return PropertyReport("locally-finite", "holds", worst, None, details)


def _words_up_to(spec: IifsSpec, depth: int):
    """All nonempty words up to the given length, with their composite maps."""
    comps = {(): AffineContraction.identity(spec.dimension)}
    by_len = [[()]]
    for _ in range(depth):
        nxt = []
        for w in by_len[-1]:
            for s in spec.symbols:
                ww = w + (s,)
                comps[ww] = comps[w].compose(spec.map_for(s))
                nxt.append(ww)
        by_len.append(nxt)
    words = [w for level in by_len[1:] for w in level]
    return words, comps


def check_strongly_non_overlapping(
    spec: IifsSpec, depth: int, pair_cap: int = 1_000_000
) -> PropertyReport:
    """Disjointness of composite images for all word pairs up to a depth.

    Pairs where one word is a prefix of the other are skipped: their images
    nest by construction, and the separation property quantifies over
    diverging words.  A holds verdict is always scoped to the checked
    depth; intersecting enclosures fail with the word pair as witness.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    n_words = sum(len(spec.symbols) ** k for k in range(1, depth + 1))
    if n_words * (n_words - 1) // 2 > pair_cap:
        raise CapExceeded(
            f"depth too large: {n_words} words exceed the pair cap {pair_cap}"
        )
    words, comps = _words_up_to(spec, depth)
    boxes = {w: comps[w].image_box(spec.box) for w in words}
    min_gap = math.inf
    checked = 0
    for w1, w2 in itertools.combinations(words, 2):
        if w1 == w2[: len(w1)] or w2 == w1[: len(w2)]:
            continue
        checked += 1
        g = boxes[w1].gap_to(boxes[w2])
        if g <= 0:
            return PropertyReport(
                "strongly-non-overlapping",
                "fails",
                0,
                (Word(w1), Word(w2)),
                {"depth": depth, "pairs_checked": checked},
            )
        min_gap = min(min_gap, g)
    details = {
        "depth": depth,
        "pairs_checked": checked,
        "scope": f"all non-nested word pairs up to length {depth}",
    }
    return PropertyReport(
        "strongly-non-overlapping", "holds", min_gap, None, details
    )


@dataclass(frozen=True)
class SscReport:
    """Pairwise image separation constants on an attractor approximation.

    pairs maps (i, j) with i < j to the smallest distance between the i-
    and j-images of the supplied cloud; sep_c is the overall minimum (+inf
    when there are no pairs).  Values are lower-bound estimates for the
    true constants up to the reported slack.
    """

    pairs: dict
    sep_c: Scalar
    slack: Scalar

    def as_dict(self) -> dict:
        return {
            "pairs": {f"{i},{j}": scalar_to_json(v) for (i, j), v in self.pairs.items()},
            "sep_c": scalar_to_json(self.sep_c),
            "slack": scalar_to_json(self.slack),
        }


def ssc_constants(spec: IifsSpec, approx) -> SscReport:
    """Separation constants c_ij = min dist(f_i(A), f_j(A)) on a cloud A.

    approx is a PointCloud or anything with .cloud / .error_bound /
    .pruning_slack attributes (an attractor approximation); the slack
    accounts for how far the cloud may sit from the true attractor.
    """
    from .metric import min_set_dist

    cloud = getattr(approx, "cloud", approx)
    offset = cloud.resolution
    offset = offset + getattr(approx, "error_bound", 0) + getattr(approx, "pruning_slack", 0)
    images = {s: apply_map(f, cloud) for s, f in spec.maps}
    pairs = {}
    for (si, _), (sj, _) in itertools.combinations(spec.maps, 2):
        pairs[(si, sj)] = min_set_dist(images[si], images[sj])
    sep = min(pairs.values()) if pairs else math.inf
    return SscReport(pairs, sep, 2 * spec.contraction_c * offset)


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------


def spec_from_dict(data: dict, truncate_override: int | None = None) -> IifsSpec:
    try:
        box = Box(tuple((parse_scalar(lo), parse_scalar(hi)) for lo, hi in data["box"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecFormatError(f"bad or missing box: {exc}") from exc
    if "family" in data:
        fam = data["family"]
        try:
            family = ParametricFamily(
                slope=fam["slope"],
                intercept=fam["intercept"],
                m_start=int(fam.get("m_start", 1)),
                truncate=int(truncate_override or fam["truncate"]),
                kind=fam.get("kind", "affine-1d"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecFormatError(f"bad family: {exc}") from exc
        maps = tuple((str(m), family.member(m)) for m in family.parameters())
        return IifsSpec(1, maps, box, family)
    try:
        maps = []
        for entry in data["maps"]:
            matrix = tuple(tuple(parse_scalar(v) for v in row) for row in entry["matrix"])
            offset = tuple(parse_scalar(v) for v in entry["offset"])
            bilip = parse_scalar(entry["bilip_lower"]) if "bilip_lower" in entry else None
            maps.append(
                (
                    str(entry["index"]),
                    AffineContraction(matrix, offset, parse_scalar(entry["lip"]), bilip),
                )
            )
        dimension = int(data.get("dimension", len(maps[0][1].offset)))
    except SpecFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecFormatError(f"bad maps section: {exc}") from exc
    return IifsSpec(dimension, tuple(maps), box)


def spec_to_dict(spec: IifsSpec) -> dict:
    out = {
        "dimension": spec.dimension,
        "box": [[scalar_to_json(lo), scalar_to_json(hi)] for lo, hi in spec.box.bounds],
    }
    if spec.family is not None:
        f = spec.family
        out["family"] = {
            "kind": f.kind,
            "slope": f.slope,
            "intercept": f.intercept,
            "m_start": f.m_start,
            "truncate": f.truncate,
        }
        return out
    out["maps"] = []
    for s, f in spec.maps:
        entry = {
            "index": s,
            "matrix": [[scalar_to_json(v) for v in row] for row in f.matrix],
            "offset": [scalar_to_json(v) for v in f.offset],
            "lip": scalar_to_json(f.lip_bound),
        }
        if f.bilip_lower is not None:
            entry["bilip_lower"] = scalar_to_json(f.bilip_lower)
        out["maps"].append(entry)
    return out


def load_spec(path, truncate_override: int | None = None) -> IifsSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecFormatError(f"cannot read system file {path}: {exc}") from exc
    return spec_from_dict(data, truncate_override)
