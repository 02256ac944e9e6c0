"""Sieve-backed prime services.

Primality tables, prime counting, interval queries, reciprocal sums, and
enumeration of integers with a bounded number of prime factors (counted
with multiplicity).  Everything downstream that touches a prime goes
through this module so the certified range is explicit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OutOfRangeError

# Construction works in fixed-size segments so the transient marking
# buffer stays small regardless of the final table size.
_SEGMENT = 1 << 22


class PrimeSieve:
    """Immutable primality table over [0, limit]."""

    def __init__(self, limit: int):
        limit = int(limit)
        if limit < 2:
            raise ValueError(f"sieve limit must be at least 2, got {limit}")
        self.limit = limit
        self._table = _build_table(limit)
        self._table.setflags(write=False)
        self._prime_array: np.ndarray | None = None

    @property
    def table(self) -> np.ndarray:
        return self._table

    @property
    def primes(self) -> np.ndarray:
        """Ascending int64 array of all primes <= limit (cached lazily)."""
        if self._prime_array is None:
            arr = np.flatnonzero(self._table).astype(np.int64)
            arr.setflags(write=False)
            self._prime_array = arr
        return self._prime_array

    def is_prime(self, k: int) -> bool:
        if not 0 <= k <= self.limit:
            raise OutOfRangeError(f"{k} outside sieved range [0, {self.limit}]")
        return bool(self._table[k])

    def __repr__(self) -> str:
        return f"PrimeSieve(limit={self.limit})"


def _build_table(limit: int) -> np.ndarray:
    root = math.isqrt(limit)
    base = np.ones(root + 1, dtype=bool)
    base[:2] = False
    for p in range(2, math.isqrt(root) + 1):
        if base[p]:
            base[p * p :: p] = False
    base_primes = [int(p) for p in np.flatnonzero(base)]

    table = np.zeros(limit + 1, dtype=bool)
    table[2 : root + 1] = base[2:]
    for lo in range(root + 1, limit + 1, _SEGMENT):
        hi = min(lo + _SEGMENT, limit + 1)
        seg = np.ones(hi - lo, dtype=bool)
        for p in base_primes:
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start < hi:
                seg[start - lo :: p] = False
        table[lo:hi] = seg
    return table


def sieve(limit: int) -> PrimeSieve:
    """Build a primality table covering [2, limit]."""
    return PrimeSieve(limit)


def prime_count(x: float, sv: PrimeSieve) -> int:
    """Number of primes <= x (x may be real, must not exceed the sieve)."""
    if x > sv.limit:
        raise OutOfRangeError(f"prime_count({x}) exceeds sieve limit {sv.limit}")
    if x < 2:
        return 0
    return int(np.searchsorted(sv.primes, math.floor(x), side="right"))


def primes_in(lo: float, hi: float, sv: PrimeSieve) -> np.ndarray:
    """Ascending array of primes p with lo <= p <= hi."""
    if hi > sv.limit:
        raise OutOfRangeError(f"primes_in upper end {hi} exceeds sieve limit {sv.limit}")
    if hi < lo:
        return sv.primes[:0]
    start = int(np.searchsorted(sv.primes, math.ceil(max(lo, 2)), side="left"))
    stop = int(np.searchsorted(sv.primes, math.floor(hi), side="right"))
    return sv.primes[start:stop]


def mertens_sum(x: float, sv: PrimeSieve) -> float:
    """Sum of 1/p over primes p <= x.

    Terms are added in ascending order through math.fsum, so the result is
    the correctly rounded double of the term sequence.
    """
    if x < 2:
        raise ValueError(f"mertens_sum needs x >= 2, got {x}")
    ps = primes_in(2, x, sv)
    return math.fsum(1.0 / ps.astype(np.float64))


def is_prime_trial(n: int, sv: PrimeSieve) -> bool:
    """Primality of n by table lookup, or trial division when n > limit.

    Valid for n <= limit**2: any composite in that range has a factor
    within the sieved base.
    """
    if n < 2:
        return False
    if n <= sv.limit:
        return bool(sv.table[n])
    root = math.isqrt(n)
    if root > sv.limit:
        raise OutOfRangeError(f"{n} exceeds certified range limit^2 = {sv.limit ** 2}")
    for p in sv.primes:
        if p > root:
            break
        if n % int(p) == 0:
            return False
    return True


@dataclass(frozen=True)
class AlmostPrimeEnumeration:
    """Request for integers with a bounded count of prime factors.

    mode "exactly": Omega(k) == ell; mode "at-most": 1 <= Omega(k) <= ell.
    1 has no prime factor and is never emitted.
    """

    ell: int
    mode: str
    bound: int

    def __post_init__(self):
        if self.ell < 1:
            raise ValueError(f"ell must be >= 1, got {self.ell}")
        if self.mode not in ("exactly", "at-most"):
            raise ValueError(f"mode must be 'exactly' or 'at-most', got {self.mode!r}")
        if self.bound < 2:
            raise ValueError(f"bound must be >= 2, got {self.bound}")


def omega_table(bound: int, sv: PrimeSieve) -> np.ndarray:
    """Omega(k) (prime factors with multiplicity) for every k in [0, bound].

    Requires sqrt(bound) <= sieve limit: after removing all prime-power
    divisors up to sqrt(bound), the remainder of k is 1 or a single prime.
    """
    root = math.isqrt(bound)
    if root > sv.limit:
        raise OutOfRangeError(f"omega_table({bound}) needs primes to {root} > {sv.limit}")
    omega = np.zeros(bound + 1, dtype=np.int8)
    rem = np.arange(bound + 1, dtype=np.int64)
    for p in primes_in(2, root, sv):
        p = int(p)
        pe = p
        while pe <= bound:
            omega[pe::pe] += 1
            pe *= p
        view = rem[p::p]
        view //= p
        mask = view % p == 0
        while mask.any():
            sel = view[mask] // p
            view[mask] = sel
            nxt = mask.copy()
            nxt[mask] = sel % p == 0
            mask = nxt
    omega[2:] += (rem[2:] > 1).astype(np.int8)
    return omega


def almost_primes(cfg: AlmostPrimeEnumeration, sv: PrimeSieve) -> np.ndarray:
    """Ascending array of k <= bound matching the enumeration request."""
    if cfg.bound > sv.limit * sv.limit:
        raise OutOfRangeError(
            f"bound {cfg.bound} exceeds certified range limit^2 = {sv.limit ** 2}"
        )
    if cfg.ell == 1:
        # Omega(k) = 1 means k prime; both modes coincide.
        if cfg.bound > sv.limit:
            raise OutOfRangeError(
                f"prime enumeration to {cfg.bound} exceeds sieve limit {sv.limit}"
            )
        return primes_in(2, cfg.bound, sv)
    omega = omega_table(cfg.bound, sv)
    if cfg.mode == "exactly":
        hits = omega == cfg.ell
    else:
        hits = (omega >= 1) & (omega <= cfg.ell)
    hits[:2] = False
    return np.flatnonzero(hits).astype(np.int64)
