"""The address-to-point map and its quantitative properties.

A depth-m word prefix is coded to the point f_{w_1} ... f_{w_m}(a) for a
base point a (by default the fixed point of the first letter's map, which
lies in the attractor).  The coded point sits in the word's cylinder, so
its distance to the true address point is at most the cylinder diameter
lip(f_w) * diam(attractor); every check below propagates exactly this
bookkeeping instead of estimating anything from samples.

Checks: the shift/map intertwining residual, the 3*diam(A) Lipschitz
inequality for the coding map (contraction factor <= 1/3 required),
pairwise separation of coded points under strong non-overlap, the
inverse-continuity modulus delta_eps = sep_c * l^(-log3 eps), and the
cylinder-gap shadow of total disconnectedness.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .attractor import AttractorApprox, word_fixed_point
from .errors import CapExceeded
from .exact import Scalar, is_exact, log3_exponent
from .ifs import (
    IifsSpec,
    PropertyReport,
    check_strongly_non_overlapping,
    compose_word,
    ssc_constants,
)
from .metric import PointCloud, min_set_dist, point_dist
from .words import Word, WordPrefix, right_shift, word_metric

_FLOAT_BASE_TOL = 1e-13


@dataclass(frozen=True)
class CodedPoint:
    """Approximation of the address point of a word prefix."""

    prefix: WordPrefix
    point: tuple
    error_bound: Scalar


def code_point(
    spec: IifsSpec, approx: AttractorApprox, prefix: WordPrefix, base=None
) -> CodedPoint:
    """Code a prefix to a point with a certified error bound.

    With the default base (fixed point of the first letter's map, a point
    of the attractor) the bound is lip(f_w) times the attractor-diameter
    bound.  An explicit base adds lip(f_w) times its certified distance to
    the attractor.  The empty prefix returns the base itself with the
    diameter bound.
    """
    delta = approx.diameter_bound()
    if len(prefix) == 0:
        pt = tuple(base) if base is not None else spec.box.center()
        if not spec.box.contains(pt, 0 if spec.is_exact else 1e-9):
            raise ValueError("base point outside the domain box")
        return CodedPoint(prefix, pt, delta + _base_offset(approx, pt))
    if base is None:
        base = word_fixed_point(spec, Word((prefix.letters[0],)), tol=_FLOAT_BASE_TOL)
        extra = 0 if spec.is_exact else _FLOAT_BASE_TOL
    else:
        base = tuple(base)
        if not spec.box.contains(base, 0 if spec.is_exact else 1e-9):
            raise ValueError("base point outside the domain box")
        extra = _base_offset(approx, base)
    comp = compose_word(spec, prefix)
    return CodedPoint(prefix, comp(base), comp.lip_bound * (delta + extra))


def _base_offset(approx: AttractorApprox, pt) -> Scalar:
    """Certified distance from a point to the true attractor."""
    gap = min_set_dist(PointCloud([pt], 0), approx.cloud)
    return gap + approx.error_bound + approx.pruning_slack


def check_semiconjugacy(spec: IifsSpec, approx: AttractorApprox, samples) -> PropertyReport:
    """Residual of coding-after-shift against map-after-coding.

    For each sample (i, w) both pipelines approximate the same address
    point, so their distance must stay within the sum of the two coding
    error bounds.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one sample")
    worst = 0
    worst_allowed = 0
    for letter, prefix in samples:
        f = spec.map_for(letter)
        via_word = code_point(spec, approx, right_shift(letter, prefix))
        through_map = code_point(spec, approx, prefix)
        residual = point_dist(via_word.point, f(through_map.point))
        allowed = via_word.error_bound + f.lip_bound * through_map.error_bound
        if residual > worst:
            worst = residual
        if allowed > worst_allowed:
            worst_allowed = allowed
        if residual > allowed:
            return PropertyReport(
                "semiconjugacy",
                "fails",
                0,
                (letter, prefix),
                {"residual": residual, "allowed": allowed},
            )
    return PropertyReport(
        "semiconjugacy",
        "holds",
        worst,
        None,
        {"samples": len(samples), "max_residual": worst, "max_allowed": worst_allowed},
    )


def _require_small_contraction(spec: IifsSpec) -> None:
    c = spec.contraction_c
    limit = Fraction(1, 3) if is_exact(c) else 1 / 3 + 1e-12
    if c > limit:
        raise ValueError(
            f"contraction factor {c} exceeds 1/3; the coding-map Lipschitz "
            "bound is only claimed for factors <= 1/3"
        )


def check_pi_lipschitz(spec: IifsSpec, approx: AttractorApprox, pairs) -> PropertyReport:
    """Per-pair inequality d(pi(a), pi(b)) <= 3 diam(A) d_shift(a,b) + errors.

    The shift metric enters through its certified upper bound, the coded
    points through their error bounds; nothing is estimated as a supremum.
    """
    _require_small_contraction(spec)
    pairs = list(pairs)
    if not pairs:
        raise ValueError("need at least one pair")
    delta = approx.diameter_bound()
    max_ratio = 0
    cache: dict = {}

    def coded(p):
        if p not in cache:
            cache[p] = code_point(spec, approx, p)
        return cache[p]

    for a, b in pairs:
        _, upper = word_metric(a, b)
        pa = coded(a)
        pb = coded(b)
        d = point_dist(pa.point, pb.point)
        allowed = 3 * delta * upper + pa.error_bound + pb.error_bound
        if d > allowed:
            return PropertyReport(
                "coding-lipschitz",
                "fails",
                0,
                (a, b),
                {"distance": d, "allowed": allowed},
            )
        ratio = d / (3 * delta * upper)
        if ratio > max_ratio:
            max_ratio = ratio
    return PropertyReport(
        "coding-lipschitz",
        "holds",
        max_ratio,
        None,
        {"pairs": len(pairs), "max_ratio": max_ratio, "diameter_bound": delta},
    )


def injectivity_search(
    spec: IifsSpec, approx: AttractorApprox, depth: int, pair_cap: int = 1_000_000
) -> PropertyReport:
    """Pairwise separation of coded points for all depth-D prefixes.

    Requires strong non-overlap up to the depth; coded points then live in
    disjoint cylinders, so every ordered pair must stay at least the
    cylinder margin minus twice the coding error apart.
    """
    sno = check_strongly_non_overlapping(spec, depth, pair_cap)
    if not sno.holds:
        raise ValueError(f"strong non-overlap {sno.verdict} at depth {depth}")
    n = len(spec.symbols) ** depth
    if n * (n - 1) > pair_cap:
        raise CapExceeded(f"{n * (n - 1)} ordered pairs exceed the cap {pair_cap}")
    prefixes = [WordPrefix(w) for w in itertools.product(spec.symbols, repeat=depth)]
    codes = [code_point(spec, approx, p) for p in prefixes]
    max_eb = max(cp.error_bound for cp in codes)
    threshold = sno.margin - 2 * max_eb
    min_d = math.inf
    checked = 0
    for i, j in itertools.permutations(range(len(prefixes)), 2):
        d = point_dist(codes[i].point, codes[j].point)
        checked += 1
        if d < min_d:
            min_d = d
        if d < threshold:
            return PropertyReport(
                "injectivity",
                "fails",
                0,
                (prefixes[i], prefixes[j]),
                {"distance": d, "threshold": threshold},
            )
    details = {
        "pairs_checked": checked,
        "min_distance": min_d,
        "cylinder_margin": sno.margin,
        "coding_error": max_eb,
    }
    return PropertyReport("injectivity", "holds", min_d if checked else math.inf, None, details)


def _delta_eps(sep_c, l, eps):
    """The inverse-continuity radius sep_c * l^(-log3 eps), rounded toward
    strictness when floats are involved."""
    k = log3_exponent(eps)
    if k is not None and is_exact(sep_c) and is_exact(l):
        return sep_c * Fraction(l) ** k
    e = -math.log(float(eps)) / math.log(3.0)
    return math.nextafter(float(sep_c) * float(l) ** e, 0.0)


def inverse_modulus_check(
    spec: IifsSpec,
    approx: AttractorApprox,
    eps,
    pairs=None,
    depth: int | None = None,
    pair_cap: int = 4_000_000,
    per_word: bool = False,
) -> PropertyReport:
    """Certify: coded points closer than delta_eps have addresses closer than eps.

    delta_eps = sep_c * l^(-log3 eps) with l the uniform lower bi-Lipschitz
    constant and sep_c the separation constant of the system on the
    attractor.  The antecedent is tightened by the coding error bounds so
    a reported pass never rests on approximation slack.  With per_word
    the weaker per-address constant min over the word's letters of the
    pairwise separations replaces sep_c (uniformity is lost).
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    l = spec.bilip_floor
    if l is None:
        raise ValueError("every map needs bilip_lower for the modulus check")
    ssc = ssc_constants(spec, approx)
    if ssc.sep_c == 0:
        raise ValueError("separation constant is zero; the modulus is undefined")
    if (pairs is None) == (depth is None):
        raise ValueError("give exactly one of pairs or depth")

    if depth is not None:
        n = len(spec.symbols) ** depth
        if n * (n - 1) // 2 > pair_cap:
            raise CapExceeded(f"depth {depth} needs more than {pair_cap} pairs")
        prefixes = [WordPrefix(w) for w in itertools.product(spec.symbols, repeat=depth)]
        if not per_word:
            fast = _modulus_exhaustive_exact(spec, approx, eps, prefixes, ssc.sep_c, l)
            if fast is not None:
                return fast
        pairs = itertools.combinations(prefixes, 2)

    delta = _delta_eps(ssc.sep_c, l, eps)
    hits = checked = 0
    cache: dict = {}

    def coded(p):
        if p not in cache:
            cache[p] = code_point(spec, approx, p)
        return cache[p]

    for a, b in pairs:
        checked += 1
        pa = coded(a)
        pb = coded(b)
        cut = delta
        if per_word:
            cut = _delta_eps(_per_word_sep(spec, ssc, a), l, eps)
        d = point_dist(pa.point, pb.point)
        if d < cut - (pa.error_bound + pb.error_bound):
            hits += 1
            _, upper = word_metric(a, b)
            if not upper < eps:
                return PropertyReport(
                    "inverse-modulus",
                    "fails",
                    0,
                    (a, b),
                    {"distance": d, "delta_eps": cut, "metric_upper": upper},
                )
    return PropertyReport(
        "inverse-modulus",
        "holds",
        delta,
        None,
        {"pairs_checked": checked, "antecedent_hits": hits, "delta_eps": delta,
         "eps": eps, "per_word": per_word},
    )


def _per_word_sep(spec: IifsSpec, ssc, prefix: WordPrefix):
    best = None
    for a in set(prefix.letters):
        for j in spec.symbols:
            if j == a:
                continue
            v = ssc.pairs.get((a, j), ssc.pairs.get((j, a)))
            if v is not None and (best is None or v < best):
                best = v
    if best is None or best == 0:
        raise ValueError("per-word separation constant unavailable or zero")
    return best


def _modulus_exhaustive_exact(spec, approx, eps, prefixes, sep_c, l):
    """Vectorized exact path for 1-D rational systems: scale everything to a
    common integer denominator and compare in int64.  Returns None when the
    data does not fit that regime."""
    k = log3_exponent(eps)
    if spec.dimension != 1 or not spec.is_exact or k is None:
        return None
    if not (is_exact(sep_c) and is_exact(l)):
        return None
    codes = [code_point(spec, approx, p) for p in prefixes]
    values = [Fraction(cp.point[0]) for cp in codes]
    eb = max(cp.error_bound for cp in codes)
    delta = sep_c * Fraction(l) ** k
    cut = Fraction(delta - 2 * eb)
    den = 1
    for v in values:
        den = den * v.denominator // math.gcd(den, v.denominator)
    if den > 2**40 or cut.denominator > 2**40:
        return None
    nums = np.asarray([int(v * den) for v in values], dtype=np.int64)
    if int(np.abs(nums).max() or 1) * cut.denominator >= 2**62:
        return None

    # antecedent: |v_i - v_j| < cut  <=>  |n_i - n_j| * cut.den < cut.num * den
    diff = np.abs(nums[:, None] - nums[None, :])
    antecedent = diff * cut.denominator < cut.numerator * den
    depth = len(prefixes[0])
    sym_id = {s: t for t, s in enumerate(spec.symbols)}
    w = np.asarray([[sym_id[c] for c in p.letters] for p in prefixes], dtype=np.int8)
    lower3d = np.zeros((len(prefixes), len(prefixes)), dtype=np.int64)
    for pos in range(depth):
        lower3d += (w[:, None, pos] != w[None, :, pos]) * 3 ** (depth - 1 - pos)
    # upper = lower + 1/(2*3^depth); scaled by 2*3^depth: 2*lower3d + 1
    upper_scaled = 2 * lower3d + 1
    eps_f = Fraction(eps)
    consequent = upper_scaled * eps_f.denominator < eps_f.numerator * 2 * 3**depth
    bad = antecedent & ~consequent
    np.fill_diagonal(bad, False)
    np.fill_diagonal(antecedent, False)
    n_pairs = len(prefixes) * (len(prefixes) - 1) // 2
    hits = int(np.count_nonzero(antecedent)) // 2
    if bad.any():
        i, j = np.argwhere(bad)[0]
        return PropertyReport(
            "inverse-modulus",
            "fails",
            0,
            (prefixes[int(i)], prefixes[int(j)]),
            {"delta_eps": delta, "eps": eps},
        )
    return PropertyReport(
        "inverse-modulus",
        "holds",
        delta,
        None,
        {"pairs_checked": n_pairs, "antecedent_hits": hits, "delta_eps": delta,
         "eps": eps, "per_word": False},
    )


def disconnectedness_probe(
    spec: IifsSpec, approx: AttractorApprox, depth: int, pair_cap: int = 1_000_000
) -> PropertyReport:
    """Cylinder-gap structure: the finite-resolution shadow of a totally
    disconnected attractor.

    Partitions the approximation cloud by depth-D cylinder membership and
    checks that all |I|^D groups are present and pairwise separated by at
    least the cylinder margin minus the approximation offsets.
    """
    if len(spec.symbols) ** depth == 1:
        return PropertyReport(
            "disconnectedness",
            "inconclusive",
            0,
            None,
            {"groups": 1, "reason": "single cylinder; no gap structure to probe"},
        )
    sno = check_strongly_non_overlapping(spec, depth, pair_cap)
    if not sno.holds:
        raise ValueError(f"strong non-overlap {sno.verdict} at depth {depth}")
    cloud = approx.cloud
    words = list(itertools.product(spec.symbols, repeat=depth))
    boxes = [compose_word(spec, Word(w)).image_box(spec.box) for w in words]
    slack = float(cloud.resolution) if not cloud.is_exact else 0

    groups: list[list] = [[] for _ in words]
    if spec.dimension == 1:
        arr = cloud.coords_1d()
        order = sorted(range(len(boxes)), key=lambda i: boxes[i].bounds[0][0])
        lows = [boxes[i].bounds[0][0] for i in order]
        his = [boxes[i].bounds[0][1] for i in order]
        from bisect import bisect_right

        unassigned = 0
        for x in arr:
            pos = bisect_right(lows, x) - 1
            if pos >= 0 and x <= his[pos] + slack:
                groups[order[pos]].append((x,))
            else:
                unassigned += 1
    else:
        pts = cloud.array()
        assigned = np.zeros(len(pts), dtype=bool)
        for gi, bx in enumerate(boxes):
            mask = np.ones(len(pts), dtype=bool)
            for axis, (lo, hi) in enumerate(bx.bounds):
                mask &= (pts[:, axis] >= float(lo) - slack) & (
                    pts[:, axis] <= float(hi) + slack
                )
            take = mask & ~assigned
            groups[gi] = [tuple(p) for p in pts[take]]
            assigned |= take
        unassigned = int((~assigned).sum())

    if unassigned:
        return PropertyReport(
            "disconnectedness",
            "inconclusive",
            0,
            None,
            {"reason": f"{unassigned} points outside every depth-{depth} cylinder"},
        )
    nonempty = [g for g in groups if g]
    n_groups = len(nonempty)
    clouds = [PointCloud(g, 0) for g in nonempty]
    if spec.dimension == 1:
        spans = sorted((c.coords_1d()[0], c.coords_1d()[-1]) for c in clouds)
        min_gap = min(b_lo - a_hi for (_, a_hi), (b_lo, _) in zip(spans, spans[1:]))
    else:
        min_gap = min(
            min_set_dist(a, b) for a, b in itertools.combinations(clouds, 2)
        )
    offset = cloud.resolution + approx.error_bound + approx.pruning_slack
    threshold = sno.margin - 2 * offset
    details = {
        "groups": n_groups,
        "expected": len(words),
        "min_gap": min_gap,
        "cylinder_margin": sno.margin,
        "threshold": threshold,
    }
    if n_groups == len(words) and min_gap >= threshold:
        return PropertyReport("disconnectedness", "holds", min_gap, None, details)
    witness = ("missing cylinder",) if n_groups != len(words) else ("narrow gap",)
    return PropertyReport("disconnectedness", "fails", 0, witness, details)
