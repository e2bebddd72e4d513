"""Shared systems used across the test suite."""

from fractions import Fraction as F

import pytest

from hlab import (
    AffineContraction,
    Box,
    IifsSpec,
    ParametricFamily,
    PointCloud,
    iterate_attractor,
)

THIRD = F(1, 3)


def make_cantor_spec() -> IifsSpec:
    """Two maps x/3 and x/3 + 2/3 on [0, 1], exact rationals."""
    f1 = AffineContraction(((THIRD,),), (F(0),), THIRD, THIRD)
    f2 = AffineContraction(((THIRD,),), (F(2, 3),), THIRD, THIRD)
    return IifsSpec(1, (("1", f1), ("2", f2)), Box(((F(0), F(1)),)))


def make_sierpinski_spec() -> IifsSpec:
    """Three ratio-1/4 similarities with separated pieces on [0, 1]^2."""
    r = 0.25

    def corner(ox, oy):
        return AffineContraction(((r, 0.0), (0.0, r)), (ox, oy), r, r)

    return IifsSpec(
        2,
        (("1", corner(0.0, 0.0)), ("2", corner(0.75, 0.0)), ("3", corner(0.375, 0.75))),
        Box(((0.0, 1.0), (0.0, 1.0))),
    )


def make_geometric_family_spec(truncate: int = 8) -> IifsSpec:
    """The family f_m(x) = (x+1)/2^(2m-1) on [0, 1], m from 1, truncated."""
    fam = ParametricFamily("1/2**(2*m-1)", "1/2**(2*m-1)", 1, truncate)
    maps = tuple((str(m), fam.member(m)) for m in fam.parameters())
    return IifsSpec(1, maps, Box(((F(0), F(1)),)), fam)


def make_single_map_spec() -> IifsSpec:
    f = AffineContraction(((F(1, 2),),), (F(0),), F(1, 2), F(1, 2))
    return IifsSpec(1, (("1", f),), Box(((F(0), F(1)),)))


def make_overlapping_spec() -> IifsSpec:
    """Two identical maps: every separation class fails."""
    f1 = AffineContraction(((THIRD,),), (F(0),), THIRD, THIRD)
    f2 = AffineContraction(((THIRD,),), (F(0),), THIRD, THIRD)
    return IifsSpec(1, (("1", f1), ("2", f2)), Box(((F(0), F(1)),)))


def make_touching_spec() -> IifsSpec:
    """Images [0,1/3] and [1/3,2/3] share exactly the point 1/3."""
    f1 = AffineContraction(((THIRD,),), (F(0),), THIRD, THIRD)
    f2 = AffineContraction(((THIRD,),), (F(1, 3),), THIRD, THIRD)
    return IifsSpec(1, (("1", f1), ("2", f2)), Box(((F(0), F(1)),)))


def make_diamond_spec() -> IifsSpec:
    """Two rotated maps whose images are disjoint diamonds with overlapping
    bounding boxes: the box-level check cannot decide either way."""
    m = ((0.1, -0.1), (0.1, 0.1))
    lip = 0.1 * 2**0.5 + 1e-9
    f1 = AffineContraction(m, (0.2, 0.34), lip)
    f2 = AffineContraction(m, (0.35, 0.49), lip)
    return IifsSpec(2, (("1", f1), ("2", f2)), Box(((0.0, 1.0), (0.0, 1.0))))


@pytest.fixture(scope="session")
def cantor_spec():
    return make_cantor_spec()


@pytest.fixture(scope="session")
def cantor_approx(cantor_spec):
    """Exact 10-step iteration from the seed {0}: 1024 points, bound 3^-10."""
    return iterate_attractor(cantor_spec, PointCloud([(F(0),)]), n_steps=10)


@pytest.fixture(scope="session")
def sierpinski_spec():
    return make_sierpinski_spec()


@pytest.fixture(scope="session")
def family_spec():
    return make_geometric_family_spec()
