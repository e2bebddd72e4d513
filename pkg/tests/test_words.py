import random
from fractions import Fraction as F

import pytest

from hlab import (
    EMPTY,
    MismatchBeyondDepth,
    Word,
    WordPrefix,
    concat,
    first_mismatch,
    parse_word,
    right_shift,
    word_metric,
)


def wp(s):
    return parse_word(s, WordPrefix)


def test_parse_and_format():
    assert parse_word("") == EMPTY
    assert parse_word("1.2.1").letters == ("1", "2", "1")
    assert str(Word(("1", "2"))) == "1.2"


def test_concat_identity_and_length():
    b = Word(("2", "1"))
    assert concat(EMPTY, b) == b
    assert concat(b, EMPTY) == b
    assert concat(Word(("1",)), Word(("2",))) == Word(("1", "2"))
    rng = random.Random(1)
    for _ in range(50):
        a = Word(tuple(rng.choice("12") for _ in range(rng.randint(0, 6))))
        c = Word(tuple(rng.choice("12") for _ in range(rng.randint(0, 6))))
        assert len(concat(a, c)) == len(a) + len(c)


def test_right_shift_prepends():
    assert right_shift("1", wp("")) == wp("1")
    assert right_shift("1", wp("2.2")) == wp("1.2.2")


def test_word_metric_identical():
    lo, hi = word_metric(wp("1.1.1.1"), wp("1.1.1.1"))
    assert lo == 0
    assert hi == F(1, 2 * 3**4)


def test_word_metric_first_position():
    lo, hi = word_metric(wp("1.1.1.1"), wp("2.1.1.1"))
    assert lo == F(1, 3)
    assert hi == F(1, 3) + F(1, 2 * 3**4)


def test_word_metric_all_positions_tends_to_half():
    for n in (4, 8, 12):
        a = WordPrefix(("1",) * n)
        b = WordPrefix(("2",) * n)
        lo, hi = word_metric(a, b)
        assert lo == sum(F(1, 3**k) for k in range(1, n + 1))
        assert lo < F(1, 2) < lo + F(1, 3**n)
        assert hi - lo == F(1, 2 * 3**n)


def test_word_metric_depth_mismatch():
    with pytest.raises(MismatchBeyondDepth):
        word_metric(wp("1"), wp("1.2"))


def test_shift_is_one_third_similarity():
    rng = random.Random(7)
    for _ in range(100):
        n = rng.randint(1, 9)
        a = WordPrefix(tuple(rng.choice("123") for _ in range(n)))
        b = WordPrefix(tuple(rng.choice("123") for _ in range(n)))
        lo, hi = word_metric(a, b)
        slo, shi = word_metric(right_shift("1", a), right_shift("1", b))
        assert slo == lo / 3
        # the scaled tail: (hi - lo)/3 is the new tail width
        assert shi == hi / 3


def test_first_mismatch_examples():
    assert first_mismatch(wp("1.2"), wp("1.3")) == 1
    assert first_mismatch(wp("1.2"), wp("2.2")) == 0
    with pytest.raises(MismatchBeyondDepth):
        first_mismatch(wp("1.2"), wp("1.2"))


def test_sandwich_bound_on_random_pairs():
    # 1/3^(m+1) <= d <= 1/(2*3^m) for every pair with an in-depth mismatch
    rng = random.Random(42)
    checked = 0
    while checked < 1000:
        n = rng.randint(1, 12)
        a = WordPrefix(tuple(rng.choice("12") for _ in range(n)))
        b = WordPrefix(tuple(rng.choice("12") for _ in range(n)))
        if a == b:
            continue
        m = first_mismatch(a, b)
        lo, hi = word_metric(a, b)
        assert F(1, 3 ** (m + 1)) <= lo
        assert hi <= F(1, 2 * 3**m)
        checked += 1


def test_metric_axioms_on_lower_bounds():
    rng = random.Random(3)
    for _ in range(200):
        n = rng.randint(1, 8)
        a, b, c = (
            WordPrefix(tuple(rng.choice("12") for _ in range(n))) for _ in range(3)
        )
        lab, _ = word_metric(a, b)
        lba, _ = word_metric(b, a)
        lac, _ = word_metric(a, c)
        lcb, _ = word_metric(c, b)
        assert lab == lba
        assert lab <= lac + lcb
        if a == b:
            assert lab == 0
