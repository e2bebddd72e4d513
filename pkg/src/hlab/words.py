"""Finite words over an index alphabet and the base-3 shift-space metric.

An infinite address is only ever handled through a finite prefix of
declared depth; the metric then comes back as an exact rational interval
[lower, upper] whose width 1/(2*3^depth) is the tail that the prefix
cannot see.  Letters are opaque strings.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import MismatchBeyondDepth


@dataclass(frozen=True)
class Word:
    """A finite word; the empty word acts as the identity for concatenation."""

    letters: tuple[str, ...] = ()

    def __post_init__(self):
        if not all(isinstance(c, str) and c for c in self.letters):
            raise ValueError("letters must be nonempty strings")

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __str__(self) -> str:
        return ".".join(self.letters)


@dataclass(frozen=True)
class WordPrefix(Word):
    """A word read as the first `depth` letters of a conceptual infinite word."""

    @property
    def depth(self) -> int:
        return len(self.letters)


EMPTY = Word()


def parse_word(text: str, cls=Word) -> Word:
    """Parse the dotted literal syntax: "1.2.1"; the empty string is the empty word."""
    text = text.strip()
    if not text:
        return cls()
    return cls(tuple(text.split(".")))


def concat(a: Word, b: Word) -> Word:
    return Word(a.letters + b.letters)


def right_shift(letter: str, w: WordPrefix) -> WordPrefix:
    """Prepend a letter: the shift-space self-map sending w to letter,w."""
    return WordPrefix((letter,) + w.letters)


def word_metric(a: WordPrefix, b: WordPrefix) -> tuple[Fraction, Fraction]:
    """Exact interval bracketing the shift metric sum(1 - delta_n)/3^n.

    lower is the truncated sum over the visible positions; upper adds the
    full unseen tail 1/(2*3^depth), so lower <= true distance <= upper.
    """
    if len(a) != len(b):
        raise MismatchBeyondDepth(f"prefixes of depth {len(a)} and {len(b)}")
    n = len(a)
    lower = Fraction(0)
    for k, (x, y) in enumerate(zip(a.letters, b.letters), start=1):
        if x != y:
            lower += Fraction(1, 3**k)
    return lower, lower + Fraction(1, 2 * 3**n)


def first_mismatch(a: WordPrefix, b: WordPrefix) -> int:
    """Largest n with equal length-n prefixes; raises if none differs in depth."""
    if len(a) != len(b):
        raise MismatchBeyondDepth(f"prefixes of depth {len(a)} and {len(b)}")
    for k, (x, y) in enumerate(zip(a.letters, b.letters)):
        if x != y:
            return k
    raise MismatchBeyondDepth(f"prefixes agree through depth {len(a)}")
