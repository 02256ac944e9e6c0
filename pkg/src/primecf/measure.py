"""Lebesgue measure of prime-digit level sets, and zero-one-law experiments.

The level set for a threshold t collects the x in [0,1) whose first ell
digits are primes multiplying to at least t; its measure is a sum of
exact fundamental-interval lengths over prime tuples.  Enumeration stops
at a factor cutoff and the omitted tuples are covered by an integer-tail
bound, so the reported pair [exact_lower, exact_upper] is a rigorous
bracket: every float is nudged outward before accumulation and the
correctly-rounded totals are nudged once more.
"""
from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from mpmath import mp, mpf

from .contfrac import expand_real
from .errors import OutOfRangeError, PrecisionExhaustedError
from .primes import PrimeSieve, is_prime_trial, primes_in

_MAX_PRECISION_DOUBLINGS = 8


def _down(v: float) -> float:
    return math.nextafter(v, -math.inf)


def _up(v: float) -> float:
    return math.nextafter(v, math.inf)


@dataclass(frozen=True)
class LevelSetMeasure:
    phi_value: float
    ell: int
    exact_lower: float
    exact_upper: float
    cutoff: int
    terms: int

    @property
    def width(self) -> float:
        return self.exact_upper - self.exact_lower


def level_set_measure(ell: int, threshold: float, cutoff: int,
                      sv: PrimeSieve) -> LevelSetMeasure:
    """Bracket the measure of {x : first ell digits prime, product >= threshold}.

    Enumerates prime tuples with every factor <= cutoff and sums the
    exact interval lengths 1/(q_ell (q_ell + q_{ell-1})); tuples with a
    factor beyond the cutoff contribute only to the upper end through an
    integer-tail bound.  Exact mode is limited to ell in {1, 2}; deeper
    products are only reachable through the Monte Carlo experiment.
    """
    if ell not in (1, 2):
        raise ValueError(f"exact level-set mode supports ell in {{1, 2}}, got {ell};"
                         " use the Monte Carlo experiment for deeper products")
    if threshold < 2:
        raise OutOfRangeError(f"threshold must be >= 2, got {threshold}")
    if threshold < 3:
        warnings.warn(f"threshold {threshold} < 3: the measure criterion is only"
                      " valid from 3 up", stacklevel=2)
    if cutoff < 2 or cutoff > sv.limit:
        raise OutOfRangeError(f"cutoff {cutoff} outside sieve range [2, {sv.limit}]")

    lows: list[float] = []
    highs: list[float] = []
    terms = 0
    if ell == 1:
        for p in primes_in(math.ceil(threshold), cutoff, sv):
            p = int(p)
            t = 1.0 / (p * (p + 1))
            lows.append(_down(t))
            highs.append(_up(t))
        terms = len(lows)
        # integers past the cutoff dominate the skipped primes:
        # sum 1/(k(k+1)) over k > cutoff telescopes to 1/(cutoff+1)
        tail = _up(1.0 / (cutoff + 1))
    else:
        pint = primes_in(2, cutoff, sv)
        ps = pint.astype(np.float64)
        for p1 in pint:
            p1 = int(p1)
            start = int(np.searchsorted(ps, threshold / p1, side="left"))
            # the float quotient can land the cut one off; settle the
            # boundary with exact int-vs-float comparisons
            while start < pint.size and int(pint[start]) * p1 < threshold:
                start += 1
            while start > 0 and int(pint[start - 1]) * p1 >= threshold:
                start -= 1
            if start == ps.size:
                continue
            prod = p1 * ps[start:]
            q2 = prod + 1.0
            t = 1.0 / (q2 * (q2 + ps[start:]))
            block = float(np.sum(t))
            # four float ops per term plus pairwise summation keep the
            # relative error well under 1e-13; pad outward by that much
            lows.append(block * (1.0 - 1e-13))
            highs.append(block * (1.0 + 1e-13))
            terms += t.size
        psq_hi = _up(math.fsum(_up(1.0 / (int(p) * int(p))) for p in pint))
        # pairs with a factor beyond the cutoff: each length <= (p1 p2)^-2,
        # and sum_{p > cutoff} p^-2 <= 1/cutoff
        tail = _up(2.0 * (psq_hi + 1.0 / cutoff) * (1.0 / cutoff))

    lower = _down(math.fsum(lows)) if lows else 0.0
    upper = _up(_up(math.fsum(highs)) + tail) if highs else _up(tail)
    return LevelSetMeasure(
        phi_value=float(threshold),
        ell=ell,
        exact_lower=max(lower, 0.0),
        exact_upper=upper,
        cutoff=cutoff,
        terms=terms,
    )


@dataclass(frozen=True)
class MCExperiment:
    """A reproducible zero-one-law sampling run.

    Every sample is a uniform dyadic rational with `precision_bits` bits;
    its digit string must certify to depth window[1] + ell, otherwise the
    sample is refined with doubled precision (appending fresh bits keeps
    the value uniform).
    """

    sample_count: int
    precision_bits: int
    window: tuple[int, int]
    phi: Callable[[int], float]
    ell: int
    seed: int

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError(f"sample_count must be >= 1, got {self.sample_count}")
        if self.precision_bits < 16:
            raise ValueError(f"precision_bits must be >= 16, got {self.precision_bits}")
        n1, n2 = self.window
        if not 1 <= n1 <= n2:
            raise ValueError(f"window must satisfy 1 <= n1 <= n2, got {self.window}")
        if self.ell < 1:
            raise ValueError(f"ell must be >= 1, got {self.ell}")


@dataclass(frozen=True)
class ZeroOneReport:
    hit_fraction: float
    hit_count: int
    sample_count: int
    per_n: tuple[tuple[int, int], ...]  # (n, number of samples hitting at n)
    refinements: int                    # samples that needed extra precision
    max_bits_used: int


def _certified_digits(rng: random.Random, bits_needed: int, depth: int):
    """Draw a uniform sample and certify `depth` digits, doubling as needed."""
    P = bits_needed
    value = rng.getrandbits(P)
    while value == 0:
        value = rng.getrandbits(P)
    refinements = 0
    for _ in range(_MAX_PRECISION_DOUBLINGS):
        word = expand_real(Fraction(value, 1 << P), precision_bits=P, max_len=depth)
        if len(word) >= depth:
            return word, P, refinements
        value = (value << P) | rng.getrandbits(P)
        P *= 2
        refinements = 1
    raise PrecisionExhaustedError(
        f"could not certify {depth} digits after {_MAX_PRECISION_DOUBLINGS} doublings"
    )


def run_zero_one_experiment(cfg: MCExperiment, sv: PrimeSieve) -> ZeroOneReport:
    """Empirical frequency of a window hit: some n in [n1, n2] whose ell
    consecutive digits are all prime with product >= phi(n).

    Samples are independent with per-index derived seeds, so the report
    is bit-identical for a fixed configuration regardless of ordering.
    """
    n1, n2 = cfg.window
    depth = n2 + cfg.ell
    thresholds = {n: float(cfg.phi(n)) for n in range(n1, n2 + 1)}
    per_n = {n: 0 for n in range(n1, n2 + 1)}
    hit_count = 0
    refined = 0
    max_bits = cfg.precision_bits
    for i in range(cfg.sample_count):
        rng = random.Random(f"{cfg.seed}:{i}")
        word, bits, refinements = _certified_digits(rng, cfg.precision_bits, depth)
        refined += refinements
        max_bits = max(max_bits, bits)
        digits = list(word)
        prime = [None] * len(digits)  # lazily certified primality per position

        def is_p(idx: int) -> bool:
            if prime[idx] is None:
                prime[idx] = is_prime_trial(digits[idx], sv)
            return prime[idx]

        hit_any = False
        for n in range(n1, n2 + 1):
            block = range(n - 1, n - 1 + cfg.ell)
            if not all(is_p(j) for j in block):
                continue
            prod = 1
            for j in block:
                prod *= digits[j]
            if prod >= thresholds[n]:
                per_n[n] += 1
                hit_any = True
        hit_count += hit_any
    return ZeroOneReport(
        hit_fraction=hit_count / cfg.sample_count,
        hit_count=hit_count,
        sample_count=cfg.sample_count,
        per_n=tuple(sorted(per_n.items())),
        refinements=refined,
        max_bits_used=max_bits,
    )


@dataclass(frozen=True)
class BBSeriesRow:
    n: int
    term: float
    partial: float


@dataclass(frozen=True)
class BBSeriesReport:
    series: str
    rows: tuple[BBSeriesRow, ...]
    skipped: tuple[int, ...]


def borel_bernstein_table(phi: Callable[[int], float], ell: int, prime_mode: bool,
                          window: tuple[int, int]) -> BBSeriesReport:
    """Partial sums of the criterion series deciding the zero-one laws.

    Plain digits: 1/phi for ell = 1, (log phi)^(ell-1)/phi beyond; prime
    digits: (log log phi)^(ell-1)/(phi log phi).  Entries with phi(n) <= 1
    cannot feed the logarithms and are skipped (reported).  Terms are
    evaluated in arbitrary precision so doubly exponential phi underflows
    to 0.0 gracefully instead of overflowing.  Note the log-log numerator
    is signed for phi < e; the theorems assume phi >= 3.
    """
    n1, n2 = window
    if n2 < n1:
        raise ValueError(f"empty window {window}")
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    if prime_mode:
        series = "(log log phi)^(ell-1) / (phi log phi)"
    elif ell == 1:
        series = "1 / phi"
    else:
        series = "(log phi)^(ell-1) / phi"
    rows: list[BBSeriesRow] = []
    skipped: list[int] = []
    total = 0.0
    needs_log = prime_mode or ell > 1
    with mp.workdps(30):
        for n in range(n1, n2 + 1):
            val = mpf(phi(n))
            if val <= 0 or (needs_log and val <= 1):
                skipped.append(n)
                continue
            if prime_mode:
                lg = mp.log(val)
                term = mp.log(lg) ** (ell - 1) / (val * lg) if ell > 1 else 1 / (val * lg)
            elif ell == 1:
                term = 1 / val
            else:
                term = mp.log(val) ** (ell - 1) / val
            total += float(term)
            rows.append(BBSeriesRow(n=n, term=float(term), partial=total))
    return BBSeriesReport(series=series, rows=tuple(rows), skipped=tuple(skipped))
