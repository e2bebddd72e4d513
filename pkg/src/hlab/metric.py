"""Point clouds, diameters and the Hausdorff-Pompeiu distance.

A cloud is a finite, nonempty approximation of a compact subset of R^d,
tagged with the resolution of the net it realises (0 means the cloud is
meant exactly).  Clouds whose coordinates are all ints / Fractions run in
exact rational arithmetic; everything else is float64 backed by numpy.

Distances:
    d(A, B) = sup_{x in A} inf_{y in B} d(x, y)        (directed)
    h(A, B) = max(d(A, B), d(B, A))                     (Hausdorff-Pompeiu)

All functions are pure; clouds are immutable once built.
"""

from __future__ import annotations

import math
import os
from bisect import bisect_left
from fractions import Fraction

import numpy as np

from .errors import DimensionMismatch
from .exact import Scalar, is_exact

# Above this many candidate pairs the directed distance switches from a
# dense distance matrix to a KD-tree query.
_BRUTE_PAIR_CAP = 4_000_000
# Above this many points the diameter goes through the convex hull.
_DIAMETER_BRUTE_CAP = 4000


def workers() -> int:
    """Thread count for the spatial query kernels (HLAB_THREADS, default all)."""
    try:
        return max(1, int(os.environ["HLAB_THREADS"]))
    except (KeyError, ValueError):
        return -1


def _check_point(p) -> tuple:
    pt = tuple(p)
    if not pt:
        raise ValueError("points must have dimension >= 1")
    for c in pt:
        if isinstance(c, float) and not math.isfinite(c):
            raise ValueError(f"non-finite coordinate in point {pt!r}")
    return pt


class PointCloud:
    """Finite nonempty set of points of one dimension, with a net resolution.

    Points are kept in lexicographic order and de-duplicated: with a
    positive resolution, points closer than resolution/2 collapse onto the
    lexicographically smallest representative of their grid cell.
    """

    __slots__ = ("_pts", "_arr", "resolution")

    def __init__(self, points, resolution: Scalar = 0):
        if resolution < 0:
            raise ValueError("resolution must be >= 0")
        self.resolution = resolution
        if isinstance(points, np.ndarray):
            self._pts = None
            self._arr = self._normalize_array(points, resolution)
        else:
            pts = [_check_point(p) for p in points]
            if not pts:
                raise ValueError("cloud must be nonempty")
            d = len(pts[0])
            if any(len(p) != d for p in pts):
                raise DimensionMismatch("points of mixed dimension in one cloud")
            if all(is_exact(c) for p in pts for c in p):
                self._pts = self._normalize_exact(pts, resolution)
                self._arr = None
            else:
                arr = np.asarray([[float(c) for c in p] for p in pts], dtype=np.float64)
                self._pts = None
                self._arr = self._normalize_array(arr, resolution)

    @staticmethod
    def _normalize_exact(pts, resolution):
        pts = sorted(set(pts))
        if resolution == 0:
            return tuple(pts)
        d = len(pts[0])
        # Collapse cell size (res/2)/d <= (res/2)/sqrt(d), kept rational.
        cell = Fraction(resolution) / (2 * d)
        seen, keep = set(), []
        for p in pts:
            key = tuple(c // cell for c in p)
            if key not in seen:
                seen.add(key)
                keep.append(p)
        return tuple(keep)

    @staticmethod
    def _normalize_array(arr, resolution):
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ValueError("cloud array must be nonempty and 2-d")
        if not np.all(np.isfinite(arr)):
            raise ValueError("non-finite coordinates in cloud")
        order = np.lexsort(arr.T[::-1])
        arr = arr[order]
        if resolution == 0:
            keep = np.ones(len(arr), dtype=bool)
            keep[1:] = np.any(arr[1:] != arr[:-1], axis=1)
            return np.ascontiguousarray(arr[keep])
        d = arr.shape[1]
        cell = float(resolution) / 2.0 / math.sqrt(d) * (1.0 - 1e-12)
        cells = np.floor(arr / cell).astype(np.int64)
        _, first = np.unique(cells, axis=0, return_index=True)
        return np.ascontiguousarray(arr[np.sort(first)])

    # -- basic views ---------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self._pts is not None

    @property
    def dimension(self) -> int:
        if self._pts is not None:
            return len(self._pts[0])
        return self._arr.shape[1]

    def __len__(self) -> int:
        if self._pts is not None:
            return len(self._pts)
        return self._arr.shape[0]

    def __iter__(self):
        if self._pts is not None:
            return iter(self._pts)
        return iter(map(tuple, self._arr))

    def __contains__(self, p) -> bool:
        if self._pts is not None:
            return tuple(p) in set(self._pts)
        return bool(np.any(np.all(self._arr == np.asarray(p, dtype=np.float64), axis=1)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointCloud):
            return NotImplemented
        if self.is_exact and other.is_exact:
            return self._pts == other._pts
        return self.array().shape == other.array().shape and bool(
            np.array_equal(self.array(), other.array())
        )

    def __repr__(self) -> str:
        return f"PointCloud(n={len(self)}, d={self.dimension}, resolution={self.resolution})"

    def with_resolution(self, resolution: Scalar) -> "PointCloud":
        """Same points, re-tagged with a caller-certified net resolution.

        Skips the duplicate collapse a fresh construction would apply, so
        the point set is preserved verbatim.
        """
        if resolution < 0:
            raise ValueError("resolution must be >= 0")
        out = object.__new__(PointCloud)
        out._pts = self._pts
        out._arr = self._arr
        out.resolution = resolution
        return out

    def array(self) -> np.ndarray:
        """Float64 view (N, d); computed once for exact clouds."""
        if self._arr is None:
            self._arr = np.asarray(
                [[float(c) for c in p] for p in self._pts], dtype=np.float64
            )
        return self._arr

    def coords_1d(self) -> list:
        """Sorted coordinate list of a 1-D cloud (exact scalars when exact)."""
        if self.dimension != 1:
            raise DimensionMismatch("coords_1d needs a 1-D cloud")
        if self._pts is not None:
            return [p[0] for p in self._pts]
        return list(self._arr[:, 0])

    # -- CSV interchange -----------------------------------------------------

    def to_csv(self, path) -> None:
        """One point per row, comma-separated decimal fields."""
        with open(path, "w", encoding="ascii") as fh:
            fh.write(f"# dim={self.dimension} resolution={float(self.resolution)!r}\n")
            if self._pts is not None:
                for p in self._pts:
                    fh.write(",".join(repr(float(c)) for c in p) + "\n")
            else:
                for row in self._arr:
                    fh.write(",".join(repr(float(c)) for c in row) + "\n")

    @classmethod
    def from_csv(cls, path) -> "PointCloud":
        resolution = 0.0
        rows = []
        with open(path, "r", encoding="ascii") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    for field in line[1:].split():
                        if field.startswith("resolution="):
                            resolution = float(field.split("=", 1)[1])
                    continue
                rows.append([float(tok) for tok in line.split(",")])
        if not rows:
            raise ValueError(f"no points in {path}")
        return cls(np.asarray(rows, dtype=np.float64), resolution)


def point_dist(p, q) -> Scalar:
    """Euclidean distance between two points (exact in 1-D exact inputs)."""
    p, q = _check_point(p), _check_point(q)
    if len(p) != len(q):
        raise DimensionMismatch(f"points of dimension {len(p)} and {len(q)}")
    if len(p) == 1:
        return abs(p[0] - q[0])
    return math.sqrt(sum((float(a) - float(b)) ** 2 for a, b in zip(p, q)))


def _check_same_dim(a: PointCloud, b: PointCloud) -> None:
    if a.dimension != b.dimension:
        raise DimensionMismatch(f"clouds of dimension {a.dimension} and {b.dimension}")


def _nearest_in_sorted(xs, v):
    """Distance from v to the nearest element of the sorted sequence xs."""
    i = bisect_left(xs, v)
    best = None
    if i < len(xs):
        best = xs[i] - v
    if i > 0:
        left = v - xs[i - 1]
        best = left if best is None or left < best else best
    return best


def _directed_1d_exact(xs_a, xs_b):
    scaled = _common_denominator_ints(xs_a, xs_b)
    if scaled is not None:
        ia, ib, den = scaled
        worst = 0
        for a in ia:
            d = _nearest_in_sorted(ib, a)
            if d > worst:
                worst = d
        return Fraction(worst, den)
    worst = 0
    for a in xs_a:
        d = _nearest_in_sorted(xs_b, a)
        if d > worst:
            worst = d
    return worst


def _common_denominator_ints(xs_a, xs_b):
    """Scale two exact coordinate lists to ints over one denominator.

    Integer comparisons run at C speed, which matters for the sorted-
    bisection kernels; bails out (None) if the common denominator blows up.
    """
    den = 1
    for x in xs_a:
        q = x.denominator if isinstance(x, Fraction) else 1
        den = den * q // math.gcd(den, q)
        if den > 2**96:
            return None
    for x in xs_b:
        q = x.denominator if isinstance(x, Fraction) else 1
        den = den * q // math.gcd(den, q)
        if den > 2**96:
            return None
    ia = [int(x * den) for x in xs_a]
    ib = [int(x * den) for x in xs_b]
    return ia, ib, den


def _min_dists_float(qarr: np.ndarray, barr: np.ndarray) -> np.ndarray:
    """Per-query nearest-neighbour distances against the cloud barr."""
    if barr.shape[1] == 1:
        b = barr[:, 0]
        idx = np.searchsorted(b, qarr[:, 0])
        right = np.minimum(idx, len(b) - 1)
        left = np.maximum(idx - 1, 0)
        return np.minimum(np.abs(b[right] - qarr[:, 0]), np.abs(b[left] - qarr[:, 0]))
    if qarr.shape[0] * barr.shape[0] <= _BRUTE_PAIR_CAP:
        from scipy.spatial.distance import cdist

        return cdist(qarr, barr).min(axis=1)
    from scipy.spatial import cKDTree

    return cKDTree(barr).query(qarr, workers=workers())[0]


def directed_set_dist(a: PointCloud, b: PointCloud) -> Scalar:
    """sup over a of the distance to b; zero iff a is a subset of b."""
    _check_same_dim(a, b)
    if a.is_exact and b.is_exact and a.dimension == 1:
        return _directed_1d_exact(a.coords_1d(), b.coords_1d())
    return float(_min_dists_float(a.array(), b.array()).max())


def hausdorff_dist(a: PointCloud, b: PointCloud) -> Scalar:
    """max of the two directed distances; a metric on finite clouds."""
    return max(directed_set_dist(a, b), directed_set_dist(b, a))


def min_set_dist(a: PointCloud, b: PointCloud) -> Scalar:
    """Smallest distance between a point of a and a point of b."""
    _check_same_dim(a, b)
    if a.is_exact and b.is_exact and a.dimension == 1:
        xs, ys = a.coords_1d(), b.coords_1d()
        best = None
        i = j = 0
        while i < len(xs) and j < len(ys):
            d = abs(xs[i] - ys[j])
            if best is None or d < best:
                best = d
            if xs[i] <= ys[j]:
                i += 1
            else:
                j += 1
        while i < len(xs):
            d = abs(xs[i] - ys[-1])
            best = d if d < best else best
            i += 1
        while j < len(ys):
            d = abs(xs[-1] - ys[j])
            best = d if d < best else best
            j += 1
        return best
    return float(_min_dists_float(a.array(), b.array()).min())


def diameter(a: PointCloud) -> Scalar:
    """Largest pairwise distance; 0 for singletons."""
    if len(a) == 1:
        return 0 if a.is_exact else 0.0
    if a.dimension == 1:
        xs = a.coords_1d()
        return xs[-1] - xs[0]
    arr = a.array()
    if len(arr) > _DIAMETER_BRUTE_CAP:
        if a.dimension > 3:
            raise ValueError("diameter of large clouds supported only for d <= 3")
        from scipy.spatial import ConvexHull

        arr = arr[ConvexHull(arr).vertices]
    from scipy.spatial.distance import pdist

    return float(pdist(arr).max())


def epsilon_prune(a: PointCloud, eps: Scalar) -> PointCloud:
    """Deterministic eps-net of the cloud: a subset within eps of every point.

    Points are binned on a grid fine enough that a whole cell has diameter
    <= eps; the lexicographically smallest point of each cell survives.
    The result's resolution is max(input resolution, eps).
    """
    if eps < 0:
        raise ValueError("eps must be >= 0")
    if eps == 0 or len(a) == 1:
        return a
    res = max(a.resolution, eps)
    if a.is_exact:
        d = a.dimension
        cell = Fraction(eps) / d
        seen, keep = set(), []
        for p in a._pts:
            key = tuple(c // cell for c in p)
            if key not in seen:
                seen.add(key)
                keep.append(p)
        return PointCloud(keep, res)
    arr = a.array()
    cell = float(eps) / math.sqrt(arr.shape[1]) * (1.0 - 1e-12)
    cells = np.floor(arr / cell).astype(np.int64)
    _, first = np.unique(cells, axis=0, return_index=True)
    return PointCloud(arr[np.sort(first)], res)
