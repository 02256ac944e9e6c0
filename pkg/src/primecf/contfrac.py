"""Exact continued-fraction kernel.

Finite digit words, continuant recurrences, fundamental intervals, measures
of unions of sibling intervals, and certified expansion of dyadic
observations.  All arithmetic is exact (Python ints / fractions.Fraction);
nothing in this module rounds.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence


@dataclass(frozen=True)
class Word:
    """A finite string of partial quotients; every digit is >= 1."""

    digits: tuple[int, ...]

    def __post_init__(self):
        for d in self.digits:
            if not isinstance(d, int) or d < 1:
                raise ValueError(f"digits must be integers >= 1, got {d!r}")

    @classmethod
    def of(cls, digits: "Word | Iterable[int]") -> "Word":
        if isinstance(digits, Word):
            return digits
        return cls(tuple(int(d) for d in digits))

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.digits)

    def __getitem__(self, i):
        return self.digits[i]

    def __add__(self, other: "Word | Iterable[int]") -> "Word":
        return Word(self.digits + Word.of(other).digits)

    def delete(self, k: int) -> "Word":
        """Word with the k-th digit removed (1-based position)."""
        if not 1 <= k <= len(self.digits):
            raise ValueError(f"position {k} outside word of length {len(self.digits)}")
        return Word(self.digits[: k - 1] + self.digits[k:])


@dataclass(frozen=True)
class ContinuantPair:
    """Numerator/denominator state (p, q) with its predecessor (p_prev, q_prev).

    Seeds: p_{-1}=1, p_0=0, q_{-1}=0, q_0=1, then p_n = a_n p_{n-1} + p_{n-2}
    and likewise for q.
    """

    p: int
    q: int
    p_prev: int
    q_prev: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    @property
    def determinant(self) -> int:
        return self.p * self.q_prev - self.p_prev * self.q


def continuants(word: Word | Iterable[int]) -> ContinuantPair:
    """Run the continuant recurrence across the whole word."""
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    for a in Word.of(word):
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    return ContinuantPair(p=p, q=q, p_prev=p_prev, q_prev=q_prev)


@dataclass(frozen=True)
class FundamentalInterval:
    """The set of x in [0,1) whose expansion starts with a given word.

    lo < hi always; which endpoint is attained alternates with the parity
    of the level: even level -> closed at lo (= p/q), odd level -> closed
    at hi (= p/q).
    """

    lo: Fraction
    hi: Fraction
    level: int
    word: Word

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def closed_left(self) -> bool:
        return self.level % 2 == 0

    @property
    def closed_right(self) -> bool:
        return self.level % 2 == 1


def fundamental_interval(word: Word | Iterable[int]) -> FundamentalInterval:
    """Exact endpoints of the interval of reals sharing this digit prefix.

    The endpoints are p/q and (p + p_prev)/(q + q_prev); the length is
    1/(q (q + q_prev)).
    """
    w = Word.of(word)
    if len(w) == 0:
        return FundamentalInterval(Fraction(0), Fraction(1), 0, w)
    c = continuants(w)
    a = Fraction(c.p, c.q)
    b = Fraction(c.p + c.p_prev, c.q + c.q_prev)
    lo, hi = (a, b) if a < b else (b, a)
    return FundamentalInterval(lo, hi, len(w), w)


def union_measure(prefix: Word | Iterable[int], a: int, b: int) -> Fraction:
    """Lebesgue measure of the union of child intervals with next digit in [a, b].

    Children with consecutive digits tile the parent contiguously, so the
    union telescopes to ((b+1) - a) / ((a q + q_prev)((b+1) q + q_prev)).
    """
    if not (1 <= a <= b):
        raise ValueError(f"need 1 <= a <= b, got a={a}, b={b}")
    c = continuants(prefix)
    return Fraction(b + 1 - a, (a * c.q + c.q_prev) * ((b + 1) * c.q + c.q_prev))


def expand_rational(num: int, den: int, max_len: int = 64) -> Word:
    """Continued-fraction digits of num/den in [0, 1), truncated at max_len.

    Full (untruncated) expansions are canonical: the Euclidean algorithm
    never emits a trailing 1 for a fraction in lowest or non-lowest terms
    (the final quotient always exceeds 1); a defensive fold is kept anyway.
    """
    if den <= 0:
        raise ValueError(f"denominator must be positive, got {den}")
    if not 0 <= num < den:
        raise ValueError(f"need 0 <= num < den, got {num}/{den}")
    if max_len < 0:
        raise ValueError(f"max_len must be >= 0, got {max_len}")
    digits: list[int] = []
    truncated = False
    while num != 0:
        if len(digits) == max_len:
            truncated = True
            break
        a, r = divmod(den, num)
        digits.append(a)
        num, den = r, num
    if not truncated and len(digits) > 1 and digits[-1] == 1:
        digits.pop()
        digits[-1] += 1
    return Word(tuple(digits))


def expand_real(x: Fraction, precision_bits: int | None = None, max_len: int = 64) -> Word:
    """Digit prefix certified correct for an uncertain observation of x.

    With precision_bits = P, x stands for any real in [x, x + 2^-P]; a digit
    is emitted only while the fundamental interval of the extended prefix
    contains that whole interval strictly in its interior (so every real in
    the interval shares the prefix, regardless of endpoint conventions).
    With precision_bits = None, x is exact and the full canonical expansion
    is returned.
    """
    x = Fraction(x)
    if not 0 <= x < 1:
        raise ValueError(f"x must lie in [0, 1), got {x}")
    if precision_bits is None:
        return expand_rational(x.numerator, x.denominator, max_len)
    if precision_bits < 1:
        raise ValueError(f"precision_bits must be >= 1, got {precision_bits}")
    x_hi = x + Fraction(1, 2 ** precision_bits)

    digits: list[int] = []
    num, den = x.numerator, x.denominator
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    while num != 0 and len(digits) < max_len:
        a, r = divmod(den, num)
        cp, cq = a * p + p_prev, a * q + q_prev
        mp_, mq = cp + p, cq + q
        # Candidate interval endpoints: convergent cp/cq and mediant mp_/mq.
        # The convergent end is attained (closed); the mediant end is not.
        # Containment may touch the closed end but not the open one; all
        # comparisons are integer cross-multiplications.
        level = len(digits) + 1
        if level % 2 == 1:
            # interval (mediant, convergent]
            ok = (mp_ * x.denominator < x.numerator * mq
                  and x_hi.numerator * cq <= cp * x_hi.denominator)
        else:
            # interval [convergent, mediant)
            ok = (cp * x.denominator <= x.numerator * cq
                  and x_hi.numerator * mq < mp_ * x_hi.denominator)
        if not ok:
            break
        digits.append(a)
        p_prev, p, q_prev, q = p, cp, q, cq
        num, den = r, num
    return Word(tuple(digits))


@dataclass(frozen=True)
class ContinuantBoundsReport:
    """Attained ratios for the digit-deletion and split continuant bounds."""

    word: Word
    k: int
    delete_ratio: Fraction
    delete_lo: Fraction
    delete_hi: Fraction
    split_ratios: tuple[tuple[int, Fraction], ...]

    @property
    def delete_ok(self) -> bool:
        return self.delete_lo <= self.delete_ratio <= self.delete_hi

    @property
    def splits_ok(self) -> bool:
        return all(1 <= r <= 2 for _, r in self.split_ratios)

    @property
    def ok(self) -> bool:
        return self.delete_ok and self.splits_ok


def check_continuant_bounds(word: Word | Iterable[int], k: int) -> ContinuantBoundsReport:
    """Exact ratios for two continuant inequalities.

    Deleting the k-th digit a_k divides the continuant by a factor in
    [(a_k + 1)/2, a_k + 1]; splitting the word anywhere gives
    q(bc) / (q(b) q(c)) in [1, 2].  Ratios are returned so callers can see
    how sharp each bound is, not just that it holds.
    """
    w = Word.of(word)
    if len(w) == 0:
        raise ValueError("word must be non-empty")
    if not 1 <= k <= len(w):
        raise ValueError(f"position {k} outside word of length {len(w)}")
    q_full = continuants(w).q
    q_del = continuants(w.delete(k)).q
    a_k = w[k - 1]
    splits = []
    for i in range(1, len(w)):
        qb = continuants(Word(w.digits[:i])).q
        qc = continuants(Word(w.digits[i:])).q
        splits.append((i, Fraction(q_full, qb * qc)))
    return ContinuantBoundsReport(
        word=w,
        k=k,
        delete_ratio=Fraction(q_full, q_del),
        delete_lo=Fraction(a_k + 1, 2),
        delete_hi=Fraction(a_k + 1),
        split_ratios=tuple(splits),
    )
