"""Deterministic Hutchinson iteration and word-fixed-point sampling.

Two independent routes to the attractor of a contractive affine system:

* iterate the set map A -> union of f_i(A) from a seed cloud, carrying the
  geometric-series error certificate h(A_n, A) <= c^n/(1-c) h(A_0, A_1)
  plus the accumulated pruning slack, and
* collect the fixed points of all length-m composite maps, which land
  inside the attractor and form a c^m-fine net of it.

Everything stays in exact rationals when the system and seed are exact and
no pruning is requested; the two routes then cross-validate each other to
machine-free precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapExceeded
from .exact import Scalar, is_exact
from .ifs import AffineContraction, IifsSpec, apply_map, compose_word
from .metric import PointCloud, diameter, epsilon_prune, hausdorff_dist
from .words import Word


@dataclass(frozen=True)
class AttractorApprox:
    """A cloud within error_bound + pruning_slack of the true attractor."""

    cloud: PointCloud
    iterations: int
    error_bound: Scalar
    h01: Scalar
    contraction: Scalar
    pruning_slack: Scalar
    fingerprint: str

    def diameter_bound(self) -> Scalar:
        """Upper bound for the diameter of the true attractor."""
        return diameter(self.cloud) + 2 * (self.error_bound + self.pruning_slack)


@dataclass(frozen=True)
class CylinderApprox:
    """Image of an attractor approximation under a finite-word composite."""

    word: Word
    cloud: PointCloud
    diam_bound: Scalar


def hb_step(spec: IifsSpec, cloud: PointCloud, eps: Scalar = 0) -> PointCloud:
    """One application of the set map: prune(union of f_i(cloud), eps)."""
    res = 0 if cloud.resolution == 0 else spec.contraction_c * cloud.resolution
    if cloud.is_exact and spec.is_exact:
        pts = []
        for _, f in spec.maps:
            pts.extend(f(p) for p in cloud)
        out = PointCloud(pts, res)
    else:
        arr = cloud.array()
        out = PointCloud(
            np.vstack([f.apply_array(arr) for _, f in spec.maps]), float(res)
        )
    return epsilon_prune(out, eps)


def _seed_cloud(spec: IifsSpec) -> PointCloud:
    return PointCloud([spec.box.center()], 0)


def _check_seed(spec: IifsSpec, cloud: PointCloud) -> None:
    slack = 0 if spec.is_exact and cloud.is_exact else 1e-9
    arr = cloud.array()
    for axis, (lo, hi) in enumerate(spec.box.bounds):
        if arr[:, axis].min() < float(lo) - slack or arr[:, axis].max() > float(hi) + slack:
            raise ValueError("seed cloud leaves the domain box")


def iterate_attractor(
    spec: IifsSpec,
    a0: PointCloud | None = None,
    *,
    n_steps: int | None = None,
    target_error: Scalar | None = None,
    eps_final: Scalar = 0,
    cap: int = 1_000_000,
) -> AttractorApprox:
    """Iterate the set map until the certified bound meets the target.

    Exactly one of n_steps / target_error selects the stopping rule.  The
    certified bound c^n/(1-c) h(A_0, A_1) is built multiplicatively, so
    consecutive bounds differ by the exact factor c.  Pruning at step k
    uses eps_final * c^(n-k); the accumulated eps-sum is returned
    separately in pruning_slack and is at most eps_final/(1-c).
    """
    if (n_steps is None) == (target_error is None):
        raise ValueError("give exactly one of n_steps or target_error")
    if target_error is not None and target_error <= 0:
        raise ValueError("target_error must be > 0")
    if n_steps is not None and n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    if eps_final < 0:
        raise ValueError("eps_final must be >= 0")
    if a0 is None:
        a0 = _seed_cloud(spec)
    _check_seed(spec, a0)
    c = spec.contraction_c
    fp = spec.fingerprint()

    probe = hb_step(spec, a0, 0)
    h01_probe = hausdorff_dist(a0, probe)
    zero = 0 if is_exact(h01_probe) else 0.0
    if h01_probe == 0:
        return AttractorApprox(a0, 0, zero, zero, c, zero, fp)

    if n_steps is not None:
        n = n_steps
    else:
        bound = h01_probe / (1 - c)
        n = 0
        while bound > target_error:
            bound = bound * c
            n += 1
            if n > 100_000:
                raise CapExceeded("target_error needs more than 100000 steps")
    if n == 0:
        return AttractorApprox(a0, 0, h01_probe / (1 - c), h01_probe, c, zero, fp)

    cloud = a0
    h01 = None
    slack = zero if eps_final == 0 else (0 if is_exact(eps_final) else 0.0)
    for k in range(1, n + 1):
        eps_k = eps_final * c ** (n - k) if eps_final != 0 else 0
        cloud = hb_step(spec, cloud, eps_k)
        slack = slack + eps_k
        if len(cloud) > cap:
            raise CapExceeded(f"cloud of {len(cloud)} points exceeds the cap {cap}")
        if k == 1:
            h01 = hausdorff_dist(a0, cloud)
    eb = h01 / (1 - c)
    for _ in range(n):
        eb = eb * c
    return AttractorApprox(cloud, n, eb, h01, c, slack, fp)


def _fixed_point(comp: AffineContraction, box, tol: float) -> tuple:
    """Fixed point of a contractive affine map: exact solve in 1-D exact
    data, Banach iteration from the box center otherwise."""
    if comp.lip_bound >= 1:
        raise ValueError("only contractions have a unique fixed point")
    if comp.dimension == 1 and comp.is_exact:
        a, b = comp.matrix[0][0], comp.offset[0]
        return (b / (1 - a),)
    lip = float(comp.lip_bound)
    x = tuple(float(v) for v in box.center())
    if lip == 0:
        return tuple(float(v) for v in comp(x))
    threshold = tol * (1 - lip) / lip
    for _ in range(1_000_000):
        nx = tuple(float(v) for v in comp(x))
        step = max(abs(u - v) for u, v in zip(nx, x))
        x = nx
        if step <= threshold:
            return x
    raise RuntimeError("fixed-point iteration failed to converge")


def word_fixed_point(spec: IifsSpec, word: Word, tol: float = 1e-12) -> tuple:
    """Fixed point of the word's composite map, within tol of the true one."""
    if len(word) == 0:
        raise ValueError("the empty word composes to the identity; no unique fixed point")
    if tol <= 0:
        raise ValueError("tol must be > 0")
    return _fixed_point(compose_word(spec, word), spec.box, tol)


def attractor_by_words(
    spec: IifsSpec, depth: int, cap: int = 1_000_000, tol: float = 1e-12
) -> PointCloud:
    """Fixed points of every length-depth composite, as one cloud.

    Each point lies in the attractor; the cloud is within Hausdorff
    distance c^depth * diam(box) of it, recorded as the resolution.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if len(spec.symbols) ** depth > cap:
        raise CapExceeded(
            f"{len(spec.symbols)}^{depth} words exceed the cap {cap}"
        )
    pts = []

    def rec(comp: AffineContraction, remaining: int) -> None:
        if remaining == 0:
            pts.append(_fixed_point(comp, spec.box, tol))
            return
        for s in spec.symbols:
            rec(comp.compose(spec.map_for(s)), remaining - 1)

    rec(AffineContraction.identity(spec.dimension), depth)
    res = spec.contraction_c**depth * spec.box.diagonal()
    return PointCloud(pts, 0).with_resolution(res)


def cylinder(spec: IifsSpec, approx: AttractorApprox, word: Word) -> CylinderApprox:
    """Image of the approximation under the word's composite map.

    The diameter bound is the composite's Lipschitz product times the
    approximation's certified attractor-diameter bound; the empty word
    returns the approximation itself.
    """
    if len(word) == 0:
        return CylinderApprox(Word(()), approx.cloud, approx.diameter_bound())
    comp = compose_word(spec, word)
    img = apply_map(comp, approx.cloud)
    return CylinderApprox(Word(word.letters), img, comp.lip_bound * approx.diameter_bound())
