import random
from fractions import Fraction as F

import pytest

from hlab import (
    AffineContraction,
    Box,
    IifsSpec,
    PointCloud,
    Word,
    WordPrefix,
    check_pi_lipschitz,
    check_semiconjugacy,
    code_point,
    disconnectedness_probe,
    injectivity_search,
    inverse_modulus_check,
    iterate_attractor,
    point_dist,
)

from conftest import make_overlapping_spec, make_single_map_spec


def wp(letters):
    return WordPrefix(tuple(letters))


def test_code_point_constant_words(cantor_spec, cantor_approx):
    for m in (3, 6, 10):
        cp = code_point(cantor_spec, cantor_approx, wp("1" * m))
        assert abs(cp.point[0] - 0) <= F(1, 3**m) * 2
        assert cp.error_bound <= F(1, 3**m) * cantor_approx.diameter_bound()
        cp2 = code_point(cantor_spec, cantor_approx, wp("2" * m))
        assert abs(cp2.point[0] - 1) <= F(1, 3**m) * 2


def test_code_point_mixed_word(cantor_spec, cantor_approx):
    # address 1 2 2 2 ... codes to f_1(1) = 1/3
    cp = code_point(cantor_spec, cantor_approx, wp("1" + "2" * 9))
    assert abs(cp.point[0] - F(1, 3)) <= cp.error_bound
    assert cp.error_bound == F(1, 3**10) * cantor_approx.diameter_bound()


def test_code_point_empty_prefix(cantor_spec, cantor_approx):
    cp = code_point(cantor_spec, cantor_approx, wp(""))
    assert cp.point == (F(1, 2),)
    assert cp.error_bound >= cantor_approx.diameter_bound()


def test_code_point_explicit_base(cantor_spec, cantor_approx):
    cp = code_point(cantor_spec, cantor_approx, wp("12"), base=(F(1),))
    # f_1(f_2(1)) = f_1(1) = 1/3
    assert cp.point == (F(1, 3),)
    with pytest.raises(ValueError):
        code_point(cantor_spec, cantor_approx, wp("12"), base=(F(7),))


def test_code_point_deterministic(cantor_spec, cantor_approx):
    a = code_point(cantor_spec, cantor_approx, wp("1221"))
    b = code_point(cantor_spec, cantor_approx, wp("1221"))
    assert a == b


def test_semiconjugacy_specific(cantor_spec, cantor_approx):
    # address 1 2 2 2...: both pipelines approximate f_1(1) = 1/3
    samples = [("1", wp("2" * 10)), ("1", wp("1" * 10)), ("2", wp("1" * 10))]
    report = check_semiconjugacy(cantor_spec, cantor_approx, samples)
    assert report.verdict == "holds"
    assert report.margin <= 2 * F(1, 3**11) * cantor_approx.diameter_bound()


def test_semiconjugacy_random(cantor_spec, cantor_approx):
    rng = random.Random(11)
    samples = [
        (rng.choice("12"), wp("".join(rng.choice("12") for _ in range(8))))
        for _ in range(100)
    ]
    report = check_semiconjugacy(cantor_spec, cantor_approx, samples)
    assert report.verdict == "holds"
    assert report.details["max_residual"] <= report.details["max_allowed"]


def test_semiconjugacy_needs_samples(cantor_spec, cantor_approx):
    with pytest.raises(ValueError):
        check_semiconjugacy(cantor_spec, cantor_approx, [])


def test_pi_lipschitz_trivial_and_extreme(cantor_spec, cantor_approx):
    a = wp("1" * 8)
    report = check_pi_lipschitz(cantor_spec, cantor_approx, [(a, a)])
    assert report.verdict == "holds"
    assert report.margin == 0

    # endpoints 0 and 1: distance 1, shift metric >= 1/3, ratio <= 3 diam(A)
    pairs = [(wp("1" * 8), wp("2" * 8))]
    report = check_pi_lipschitz(cantor_spec, cantor_approx, pairs)
    assert report.verdict == "holds"
    assert report.margin <= 3


def test_pi_lipschitz_random(cantor_spec, cantor_approx):
    rng = random.Random(13)
    pairs = [
        (
            wp("".join(rng.choice("12") for _ in range(10))),
            wp("".join(rng.choice("12") for _ in range(10))),
        )
        for _ in range(300)
    ]
    report = check_pi_lipschitz(cantor_spec, cantor_approx, pairs)
    assert report.verdict == "holds"


def test_pi_lipschitz_rejects_large_contraction():
    f = AffineContraction(((F(2, 5),),), (F(0),), F(2, 5), F(2, 5))
    g = AffineContraction(((F(2, 5),),), (F(3, 5),), F(2, 5), F(2, 5))
    spec = IifsSpec(1, (("1", f), ("2", g)), Box(((F(0), F(1)),)))
    approx = iterate_attractor(spec, PointCloud([(F(0),)]), n_steps=6)
    with pytest.raises(ValueError):
        check_pi_lipschitz(spec, approx, [(wp("11"), wp("22"))])


def test_injectivity_cantor_depth2(cantor_spec, cantor_approx):
    report = injectivity_search(cantor_spec, cantor_approx, 2)
    assert report.verdict == "holds"
    assert report.details["pairs_checked"] == 12
    slack = 2 * report.details["coding_error"]
    assert report.details["min_distance"] >= F(1, 9) - slack
    assert report.margin >= F(1, 9)


def test_injectivity_single_map_vacuous(cantor_approx):
    spec = make_single_map_spec()
    approx = iterate_attractor(spec, PointCloud([(F(1, 2),)]), n_steps=6)
    report = injectivity_search(spec, approx, 3)
    assert report.verdict == "holds"
    assert report.details["pairs_checked"] == 0


def test_injectivity_overlapping_system_errors(cantor_approx):
    spec = make_overlapping_spec()
    approx = iterate_attractor(spec, PointCloud([(F(0),)]), n_steps=4)
    with pytest.raises(ValueError):
        injectivity_search(spec, approx, 2)


def test_inverse_modulus_exact_exhaustive(cantor_spec, cantor_approx):
    report = inverse_modulus_check(cantor_spec, cantor_approx, F(1, 9), depth=6)
    assert report.verdict == "holds"
    assert report.details["pairs_checked"] == 2016  # C(64, 2)
    assert report.details["antecedent_hits"] > 0
    # delta_eps = sep_c * (1/3)^2 with sep_c = 1/3 + 3^-11
    assert report.margin == (F(1, 3) + F(1, 3**11)) * F(1, 9)


def test_inverse_modulus_sampled_pairs(cantor_spec, cantor_approx):
    pairs = [(wp("1" * 6), wp("2" * 6)), (wp("121212"), wp("121211"))]
    report = inverse_modulus_check(cantor_spec, cantor_approx, F(1, 3), pairs=pairs)
    assert report.verdict == "holds"

    # identical addresses: antecedent fires and the tail bound is below eps
    same = [(wp("1" * 6), wp("1" * 6))]
    report = inverse_modulus_check(cantor_spec, cantor_approx, F(1, 3), pairs=same)
    assert report.verdict == "holds"
    assert report.details["antecedent_hits"] == 1


def test_inverse_modulus_per_word_mode(cantor_spec, cantor_approx):
    pairs = [(wp("1" * 6), wp("1" * 5 + "2"))]
    report = inverse_modulus_check(
        cantor_spec, cantor_approx, F(1, 9), pairs=pairs, per_word=True
    )
    assert report.verdict == "holds"
    assert report.details["per_word"] is True


def test_inverse_modulus_argument_errors(cantor_spec, cantor_approx):
    with pytest.raises(ValueError):
        inverse_modulus_check(cantor_spec, cantor_approx, F(3, 2), depth=4)
    with pytest.raises(ValueError):
        inverse_modulus_check(cantor_spec, cantor_approx, F(1, 9))
    spec = make_overlapping_spec()  # sep_c = 0
    approx = iterate_attractor(spec, PointCloud([(F(0),)]), n_steps=4)
    with pytest.raises(ValueError):
        inverse_modulus_check(spec, approx, F(1, 9), depth=4)


def test_inverse_modulus_requires_bilip():
    f1 = AffineContraction(((F(1, 3),),), (F(0),), F(1, 3))
    f2 = AffineContraction(((F(1, 3),),), (F(2, 3),), F(1, 3))
    spec = IifsSpec(1, (("1", f1), ("2", f2)), Box(((F(0), F(1)),)))
    approx = iterate_attractor(spec, PointCloud([(F(0),)]), n_steps=4)
    with pytest.raises(ValueError):
        inverse_modulus_check(spec, approx, F(1, 9), depth=4)


def test_modulus_exact_and_loop_paths_agree(cantor_spec, cantor_approx):
    import itertools

    prefixes = [wp("".join(w)) for w in itertools.product("12", repeat=5)]
    fast = inverse_modulus_check(cantor_spec, cantor_approx, F(1, 9), depth=5)
    slow = inverse_modulus_check(
        cantor_spec, cantor_approx, F(1, 9),
        pairs=itertools.combinations(prefixes, 2),
    )
    assert fast.verdict == slow.verdict == "holds"
    assert fast.details["antecedent_hits"] == slow.details["antecedent_hits"]
    assert fast.details["pairs_checked"] == slow.details["pairs_checked"]


def test_disconnectedness_probe_depths(cantor_spec, cantor_approx):
    one = disconnectedness_probe(cantor_spec, cantor_approx, 1)
    assert one.verdict == "holds"
    assert one.details["groups"] == 2
    assert abs(one.details["min_gap"] - F(1, 3)) <= F(1, 3**10)

    three = disconnectedness_probe(cantor_spec, cantor_approx, 3)
    assert three.verdict == "holds"
    assert three.details["groups"] == 8
    assert three.details["min_gap"] >= F(1, 27) - 2 * F(1, 3**10)


def test_code_point_stable_under_prefix_extension(cantor_spec, cantor_approx):
    # extending the address moves the coded point at most c^m * diam(A)
    base = wp("1212")
    short = code_point(cantor_spec, cantor_approx, base)
    for tail in ("1", "22", "121"):
        longer = code_point(cantor_spec, cantor_approx, wp("1212" + tail))
        drift = point_dist(short.point, longer.point)
        assert drift <= F(1, 3**4) * cantor_approx.diameter_bound()


def test_cylinder_clouds_respect_reported_margin(cantor_spec, cantor_approx):
    # cylinder clouds of diverging words stay at least the strong-non-overlap
    # margin apart, up to the approximation offset
    import itertools

    from hlab import check_strongly_non_overlapping, cylinder, min_set_dist

    depth = 3
    sno = check_strongly_non_overlapping(cantor_spec, depth)
    offset = (
        cantor_approx.cloud.resolution
        + cantor_approx.error_bound
        + cantor_approx.pruning_slack
    )
    words = [Word(w) for w in itertools.product("12", repeat=depth)]
    clouds = [cylinder(cantor_spec, cantor_approx, w).cloud for w in words]
    for (i, a), (j, b) in itertools.combinations(enumerate(clouds), 2):
        assert min_set_dist(a, b) >= sno.margin - 2 * offset


def test_disconnectedness_single_map_inconclusive():
    spec = make_single_map_spec()
    approx = iterate_attractor(spec, PointCloud([(F(1, 2),)]), n_steps=5)
    report = disconnectedness_probe(spec, approx, 2)
    assert report.verdict == "inconclusive"
    assert report.details["groups"] == 1
