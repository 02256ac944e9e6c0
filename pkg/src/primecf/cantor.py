"""Nested Cantor constructions with prime digit blocks.

Two builders live here.  The first follows the doubly exponential
threshold c^(b^k): level k keeps the digits that are primes inside
[c^(b^k), 3 c^(b^k)], with closed-form log-domain count and gap bounds
feeding the nested-interval dimension ratio, whose exact limit is
1/(b+1).  The second is the bounded-alphabet set E_B: runs of digits
at most M interrupted by scheduled runs of ell prime digits drawn from
geometric windows, carrying a mass distribution mu defined block by
block.  All c^(b^k)-scale arithmetic stays in log domain; everything a
word enumeration touches is exact (integer continuants, rational
endpoints).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import numpy as np

from .contfrac import Word, continuants
from .errors import (
    ConstructionInfeasibleError,
    EnumerationGuardError,
    OutOfRangeError,
)
from .pressure import (
    ENUMERATION_GUARD,
    PressureProblem,
    dimensional_number,
    log_moment_enumerate,
    partition_sum,
)
from .primes import PrimeSieve, primes_in

# The explicit prime-count bound x/(2+log x) < pi(x) only starts at 55.
ROSSER_FLOOR = 55
_WORD_CAP = 20_000
_NODE_GUARD = 1_000_000


# ---------------------------------------------------------------------------
# doubly exponential construction


@dataclass(frozen=True)
class LuczakParams:
    b: float
    c: float
    ell: int = 1

    def __post_init__(self):
        if not self.b > 1:
            raise ValueError(f"b must exceed 1, got {self.b}")
        if not self.c > 1:
            raise ValueError(f"c must exceed 1, got {self.c}")
        if self.ell < 1:
            raise ValueError(f"ell must be >= 1, got {self.ell}")


@dataclass(frozen=True)
class CantorLevel:
    """One level of the nested construction, in log domain.

    log_m bounds the child count from below, log_eps the gap between
    same-level intervals; the count bound is only backed by the explicit
    prime-count inequality once c^(b^k) >= 55 (rosser_ok).  When the
    prime window fits inside the sieve, the true prime count (and, while
    cheap, the actual digit words) ride along.
    """

    k: int
    log_m: float
    log_eps: float
    rosser_ok: bool
    block: tuple[int, int] | None = None
    true_count: int | None = None
    enumerated_words: tuple[Word, ...] | None = None


def luczak_levels(params: LuczakParams, k_max: int, sv: PrimeSieve | None = None,
                  word_cap: int = _WORD_CAP) -> list[CantorLevel]:
    """Levels 1..k_max of the prime Cantor construction for phi(n) = c^(b^n).

    Per level: m_k = c^(b^k) / (2 b^k log c) and
    eps_k = 36^-(k+1) * c^(-2 (b^(k+1) - b)/(b - 1)), both as logs.
    """
    if k_max < 2:
        raise ValueError(f"k_max must be >= 2, got {k_max}")
    b, c = params.b, params.c
    logc = math.log(c)
    levels: list[CantorLevel] = []
    cum: list[tuple[int, ...]] | None = [()] if sv is not None else None
    for k in range(1, k_max + 1):
        logx = b ** k * logc
        log_m = logx - math.log(2.0 * logx)
        log_eps = -(k + 1) * math.log(36.0) - 2.0 * (b ** (k + 1) - b) / (b - 1.0) * logc
        rosser_ok = logx >= math.log(ROSSER_FLOOR)
        block = None
        true_count = None
        words = None
        if sv is not None and logx <= math.log(sv.limit / 3.0):
            x = c ** (b ** k)
            ps = primes_in(x, 3.0 * x, sv)
            block = (math.ceil(x), math.floor(3.0 * x))
            true_count = int(ps.size)
            if cum is not None and true_count and len(cum) * true_count <= word_cap:
                cum = [w + (int(p),) for w in cum for p in ps]
                words = tuple(Word.of(w) for w in cum)
            else:
                cum = None
        else:
            cum = None
        levels.append(CantorLevel(k=k, log_m=log_m, log_eps=log_eps,
                                  rosser_ok=rosser_ok, block=block,
                                  true_count=true_count, enumerated_words=words))
    return levels


@dataclass(frozen=True)
class FalconerRatio:
    k: int
    ratio: float


def falconer_lower_bound(params: LuczakParams, k_max: int) -> list[FalconerRatio]:
    """ratio_k = log(m_1 ... m_{k-1}) / (-log(m_k eps_k)) for k = 2..k_max.

    The nested-interval dimension bound; the sequence drifts toward
    1/(b+1) as the doubly exponential terms swamp the polynomial ones.
    """
    if k_max < 3:
        raise ValueError(f"k_max must be >= 3, got {k_max}")
    levels = luczak_levels(params, k_max)
    ratios = []
    acc = 0.0
    for k in range(2, k_max + 1):
        acc += levels[k - 2].log_m
        denom = -(levels[k - 1].log_m + levels[k - 1].log_eps)
        ratios.append(FalconerRatio(k=k, ratio=acc / denom))
    return ratios


def falconer_limit(b) -> Fraction:
    """Exact limit of the dimension ratio: the c-terms cancel, leaving
    the coefficient of b^k log c upstairs over the one downstairs."""
    bf = Fraction(b)
    if bf <= 1:
        raise ValueError(f"b must exceed 1, got {b}")
    numer_coeff = 1 / (bf - 1)                  # from sum of b^j, j < k
    denom_coeff = 2 * bf / (bf - 1) - 1         # from eps_k minus m_k
    return numer_coeff / denom_coeff


@dataclass(frozen=True)
class BoxDimEstimate:
    slope: float
    residual: float
    levels: int


def box_dimension_estimate(covers: Sequence[Sequence[float]]) -> BoxDimEstimate:
    """Least-squares slope of log(count) against -log(max length) per level."""
    if len(covers) < 2:
        raise ValueError("need covers at two or more levels for a slope")
    xs, ys = [], []
    for level in covers:
        lengths = list(level)
        if not lengths or min(lengths) <= 0:
            raise ValueError("each cover level needs positive lengths")
        xs.append(-math.log(max(lengths)))
        ys.append(math.log(len(lengths)))
    coeffs, res = np.polyfit(xs, ys, 1, full=True)[:2]
    residual = float(np.sqrt(res[0] / len(xs))) if res.size else 0.0
    return BoxDimEstimate(slope=float(coeffs[0]), residual=residual, levels=len(covers))


# ---------------------------------------------------------------------------
# the bounded-alphabet set with scheduled prime runs


def alpha_values(B: float, ell: int, s: float) -> tuple[float, ...]:
    """alpha_j = B^(s^(ell-1-j) (2s-1) (1-s)^j / (s^ell - (1-s)^ell)), j <= ell-2."""
    if ell < 2:
        raise ValueError(f"alphas need ell >= 2, got {ell}")
    if not 0.5 < s < 1:
        raise OutOfRangeError(f"s must lie in (1/2, 1), got {s}")
    if ell == 2:
        # s^2 - (1-s)^2 = 2s - 1, so the lone exponent collapses to s
        return (B ** s,)
    den = s ** ell - (1 - s) ** ell
    return tuple(
        B ** (s ** (ell - 1 - j) * (2 * s - 1) * (1 - s) ** j / den)
        for j in range(ell - 1)
    )


def alpha_identity_errors(B: float, ell: int, s: float) -> tuple[float, float, float]:
    """Relative errors of the product identities tying the alphas to B.

    Returns (worst chain-identity error over j <= ell-3,
             error of 1/(a_0...a_{l-2}) = (1/(B a_1...a_{l-2}))^s,
             margin of B a_0^s / B^(2s) - 1, which must be >= 0).
    """
    al = alpha_values(B, ell, s)
    chain_err = 0.0
    for j in range(ell - 2):
        lhs = 1.0 / math.prod(al[: j + 1])
        inner = al[0] * math.prod(al[1: j + 1]) ** 2 * al[j + 1]
        rhs = (1.0 / inner) ** s
        chain_err = max(chain_err, abs(lhs / rhs - 1.0))
    lhs = 1.0 / math.prod(al)
    rhs = (1.0 / (B * math.prod(al[1:]))) ** s
    full_err = abs(lhs / rhs - 1.0)
    margin = B * al[0] ** s / B ** (2 * s) - 1.0
    return chain_err, full_err, margin


def prime_block_constant(gamma: float, n: int, sv: PrimeSieve) -> float:
    """c_n with #(P in [gamma^n, 2 gamma^n]) = gamma^n / (c_n * n * log gamma).

    Tends to 1; the constructions want it below 2 (enough primes in every
    window).  Infinite when the window holds no prime at all.
    """
    if gamma <= 1:
        raise ValueError(f"gamma must exceed 1, got {gamma}")
    lo = gamma ** n
    if 2 * lo > sv.limit:
        raise OutOfRangeError(f"window [{lo:.4g}, {2 * lo:.4g}] beyond sieve limit {sv.limit}")
    count = primes_in(lo, 2 * lo, sv).size
    if count == 0:
        return math.inf
    return lo / (count * n * math.log(gamma))


@dataclass(frozen=True)
class EBParams:
    """Parameters of the bounded-alphabet construction with prime runs.

    The digit positions n_j, n_j + 1, ..., n_j + ell - 1 carry primes from
    geometric windows (base alpha_i for slot i < ell - 1, and
    B/(alpha_0 ... alpha_{ell-2}) for the last slot); everything else is a
    digit in {1..M}.  `constraints` records each feasibility inequality as
    (name, status, detail) with status "ok" or "symbolic" — the latter for
    bounds the miniature scale cannot honor, kept for the record.
    """

    B: float
    ell: int
    s: float
    delta: float
    M: int
    N: int
    alphas: tuple[float, ...]
    last_base: float
    l_schedule: tuple[int, ...]
    n_schedule: tuple[int, ...]
    t_value: float
    constraints: tuple[tuple[str, str, str], ...]

    def position_role(self, pos: int) -> tuple[str, int, int]:
        """('prime', i, j) when pos = n_j + i inside a prime run, else ('digit', -1, -1)."""
        for j in range(1, len(self.n_schedule)):
            nj = self.n_schedule[j]
            if pos < nj:
                break
            if pos <= nj + self.ell - 1:
                return ("prime", pos - nj, j)
        return ("digit", -1, -1)

    def block_base(self, i: int) -> float:
        return self.alphas[i] if i < self.ell - 1 else self.last_base

    def block_window(self, i: int, j: int) -> tuple[float, float]:
        lo = self.block_base(i) ** self.n_schedule[j]
        return lo, 2.0 * lo


def _prime_block(params: EBParams, i: int, j: int, sv: PrimeSieve) -> np.ndarray:
    lo, hi = params.block_window(i, j)
    if hi > sv.limit:
        raise ConstructionInfeasibleError(
            f"prime window [{lo:.4g}, {hi:.4g}] for slot (i={i}, j={j}) "
            f"is beyond the sieve limit {sv.limit}"
        )
    ps = primes_in(lo, hi, sv)
    if ps.size == 0:
        raise ConstructionInfeasibleError(
            f"no primes in window [{lo:.4g}, {hi:.4g}] for slot (i={i}, j={j})"
        )
    return ps


def make_eb_params(B: float, ell: int, s: float, delta: float, sv: PrimeSieve,
                   M: int | None = None, N: int | None = None) -> EBParams:
    """Assemble and vet the construction parameters.

    Picks the smallest (M, N) — smallest N for the smallest workable M —
    such that the word enumeration stays under guard, s sits strictly
    below the dimensional number t_B(M, N), the first round of prime
    windows holds primes inside the sieve, and those windows are dense
    (count constant below 2).  The asymptotic lower bounds on N from the
    source construction are evaluated and recorded as symbolic when the
    desk-scale instance cannot meet them.
    """
    if ell < 2:
        raise ValueError(f"the construction needs ell >= 2, got {ell}")
    if not (0 < delta and 0.5 < s - 2 * delta and s < 1):
        raise ValueError(f"need 1/2 < s - 2*delta < s < 1, got s={s}, delta={delta}")
    alphas = alpha_values(B, ell, s)
    last_base = B / math.prod(alphas)
    if last_base <= 1:
        raise ConstructionInfeasibleError(
            f"last prime-window base B/(alpha_0...alpha_(ell-2)) = {last_base:.4g} <= 1"
        )
    M_range = [M] if M is not None else list(range(2, 9))
    N_range = [N] if N is not None else list(range(1, 15))
    failure = "no candidates examined"
    for M_ in M_range:
        for N_ in N_range:
            if M_ ** N_ > ENUMERATION_GUARD:
                failure = f"M^N = {M_}^{N_} exceeds the enumeration guard"
                break
            problem = PressureProblem(ell=ell, B=B, M=M_, n=N_)
            if partition_sum(problem, s, method="auto") <= 0:
                failure = f"s = {s} not below t_B(M={M_}, N={N_})"
                continue
            n1 = N_ + 1
            try:
                bases = [alphas[i] if i < ell - 1 else last_base for i in range(ell)]
                for i, base in enumerate(bases):
                    lo = base ** n1
                    if 2 * lo > sv.limit:
                        raise ConstructionInfeasibleError(
                            f"first-round window for slot i={i} beyond sieve"
                        )
                    if primes_in(lo, 2 * lo, sv).size == 0:
                        raise ConstructionInfeasibleError(
                            f"first-round window for slot i={i} holds no prime"
                        )
                    if prime_block_constant(base, n1, sv) >= 2:
                        raise ConstructionInfeasibleError(
                            f"window count constant >= 2 for slot i={i} at n={n1}"
                        )
            except ConstructionInfeasibleError as exc:
                failure = str(exc)
                continue
            return _finish_eb_params(B, ell, s, delta, M_, N_, alphas, last_base, sv)
    raise ConstructionInfeasibleError(f"no admissible (M, N): {failure}")


def _finish_eb_params(B, ell, s, delta, M, N, alphas, last_base, sv) -> EBParams:
    l_schedule = [1]
    while len(l_schedule) < 12:
        l_schedule.append(2 * l_schedule[-1] + 1)
    n_schedule = [-(ell - 1)]
    for lj in l_schedule:
        n_schedule.append(n_schedule[-1] + ell + lj * N)
    problem = PressureProblem(ell=ell, B=B, M=M, n=N)
    t_value = dimensional_number(problem, method="auto")
    n1 = n_schedule[1]

    constraints: list[tuple[str, str, str]] = []

    def record(name: str, holds: bool, detail: str):
        constraints.append((name, "ok" if holds else "symbolic", detail))

    record("s < t_B(M,N)", True, f"s = {s}, t = {t_value:.9f}")
    record("N > e^20", N > math.e ** 20, f"N = {N} vs {math.e ** 20:.4g}")
    record("N > 5/(s delta) + 1", N > 5 / (s * delta) + 1,
           f"N = {N} vs {5 / (s * delta) + 1:.4g}")
    record("N > 2 ell / delta", N > 2 * ell / delta, f"N = {N} vs {2 * ell / delta:.4g}")
    bound = 2 * ell * math.log(2) / (delta * math.log(alphas[0]))
    record("N > 2 ell log 2 / (delta log alpha_0)", N > bound, f"N = {N} vs {bound:.4g}")
    for i in range(ell - 1):
        lhs = (2 ** ell) * (N ** ell) * math.prod(math.log(a) for a in alphas[: i + 1])
        lhs /= math.prod(alphas[: i + 1]) ** (delta * N)
        record(f"window-density bound < 1 (i={i})", lhs < 1, f"value = {lhs:.4g}")
    chain_err, full_err, margin = alpha_identity_errors(B, ell, s)
    record("alpha chain identity", chain_err <= 1e-12, f"rel err = {chain_err:.3g}")
    record("alpha full-product identity", full_err <= 1e-12, f"rel err = {full_err:.3g}")
    record("B alpha_0^s >= B^(2s)", margin >= -1e-12, f"margin = {margin:.3g}")
    for i in range(ell):
        base = alphas[i] if i < ell - 1 else last_base
        try:
            c = prime_block_constant(base, n1, sv)
            record(f"c_n(base_{i}) < 2 at n1", c < 2, f"c = {c:.4g}")
        except OutOfRangeError as exc:
            record(f"c_n(base_{i}) < 2 at n1", False, str(exc))

    return EBParams(B=B, ell=ell, s=s, delta=delta, M=M, N=N, alphas=alphas,
                    last_base=last_base, l_schedule=tuple(l_schedule),
                    n_schedule=tuple(n_schedule), t_value=t_value,
                    constraints=tuple(constraints))


class _BlockWeights:
    """Per-sub-block masses w(b) = u^-1 (alpha_0^N q_N^2(b))^-s and their
    partial-word closures sigma(d) = sum over completions of w(d ++ e)."""

    def __init__(self, M: int, N: int, alpha0: float, s: float):
        self.M = M
        self.N = N
        self.s = s
        self.log_alpha_term = N * math.log(alpha0)
        # exact enumeration of u through the same log-domain word walk
        self.u = math.exp(-s * self.log_alpha_term + log_moment_enumerate(M, N, s))
        self._memo: dict[tuple[int, ...], float] = {}

    def weight(self, block: tuple[int, ...]) -> float:
        q = continuants(block).q
        return math.exp(-self.s * (self.log_alpha_term + 2.0 * math.log(q))) / self.u

    def sigma(self, partial: tuple[int, ...]) -> float:
        """Mass of all completions of a partial sub-block; sigma(()) = 1."""
        if len(partial) == self.N:
            return self.weight(partial)
        got = self._memo.get(partial)
        if got is None:
            got = math.fsum(self.sigma(partial + (a,)) for a in range(1, self.M + 1))
            self._memo[partial] = got
        return got


@dataclass(frozen=True)
class EBNode:
    word: tuple[int, ...]
    depth: int
    parent: int
    p: int
    p_prev: int
    q: int
    q_prev: int
    mu: float

    def interval_length(self) -> Fraction:
        return Fraction(1, self.q * (self.q + self.q_prev))

    def endpoint(self, t: int) -> Fraction:
        """Value of the word extended by digit t, at the child boundary."""
        return Fraction(t * self.p + self.p_prev, t * self.q + self.q_prev)


DigitSpec = tuple  # ("range", 1, M) or ("primes", (p1, p2, ...))


@dataclass(frozen=True)
class EBTree:
    params: EBParams
    u: float
    levels: tuple[tuple[EBNode, ...], ...]
    digit_specs: tuple[DigitSpec, ...]  # digit_specs[d-1] governs depth d

    @property
    def depth(self) -> int:
        return len(self.levels)

    def hull(self, node: EBNode) -> tuple[Fraction, Fraction]:
        """Exact endpoints of the union of the node's child closures."""
        spec = self.digit_specs[node.depth]  # digits at depth + 1
        if spec[0] == "range":
            dmin, dmax = spec[1], spec[2]
        else:
            dmin, dmax = spec[1][0], spec[1][-1]
        a = node.endpoint(dmin)
        b = node.endpoint(dmax + 1)
        return (a, b) if a <= b else (b, a)

    def records(self) -> Iterator[tuple[int, tuple[int, ...], float, float, Fraction, Fraction]]:
        """(depth, word, mu, diam, lo, hi) per node, level by level."""
        for level in self.levels:
            for node in level:
                lo, hi = self.hull(node)
                yield node.depth, node.word, node.mu, float(hi - lo), lo, hi


def eb_prefix_tree(params: EBParams, depth_limit: int, sv: PrimeSieve,
                   node_guard: int = _NODE_GUARD) -> EBTree:
    """Enumerate admissible words to depth_limit and attach their masses.

    mu of a word multiplies the weights of its completed digit sub-blocks,
    the uniform splits 1/#P of its prime positions, and the closure
    sigma(partial) of an unfinished sub-block, which reproduces the
    recursive definition (checkpoint products, uniform prime splits,
    completion sums) in one pass.
    """
    if depth_limit < 1:
        raise ValueError(f"depth_limit must be >= 1, got {depth_limit}")
    if depth_limit + 1 >= params.n_schedule[-1]:
        raise OutOfRangeError(f"depth_limit {depth_limit} beyond the prepared schedule")
    weights = _BlockWeights(params.M, params.N, params.alphas[0], params.s)

    specs: list[DigitSpec] = []
    for pos in range(1, depth_limit + 2):
        role, i, j = params.position_role(pos)
        if role == "prime":
            ps = _prime_block(params, i, j, sv)
            specs.append(("primes", tuple(int(p) for p in ps)))
        else:
            specs.append(("range", 1, params.M))

    # run starts: position of the first digit of the sub-block run that
    # contains pos, for sub-block offset bookkeeping
    def run_offset(pos: int) -> int:
        js = [j for j in range(len(params.n_schedule))
              if params.n_schedule[j] + params.ell <= pos]
        start = params.n_schedule[max(js)] + params.ell if js else 1
        return pos - start

    levels: list[tuple[EBNode, ...]] = []
    total = 0
    # (node, partial sub-block, carried product of closed factors)
    frontier: list[tuple[EBNode, tuple[int, ...], float]] = [
        (EBNode((), 0, -1, 0, 1, 1, 0, 1.0), (), 1.0)
    ]
    for pos in range(1, depth_limit + 1):
        spec = specs[pos - 1]
        role = spec[0]
        digits = (range(spec[1], spec[2] + 1) if role == "range" else spec[1])
        completes = role == "range" and run_offset(pos) % params.N == params.N - 1
        nxt: list[tuple[EBNode, tuple[int, ...], float]] = []
        for parent_idx, (par, partial, carried) in enumerate(frontier):
            for d in digits:
                word = par.word + (int(d),)
                p = d * par.p + par.p_prev
                q = d * par.q + par.q_prev
                if role == "primes":
                    new_partial = ()
                    new_carried = carried / len(spec[1])
                elif completes:
                    new_partial = ()
                    new_carried = carried * weights.weight(partial + (int(d),))
                else:
                    new_partial = partial + (int(d),)
                    new_carried = carried
                mu = new_carried * weights.sigma(new_partial)
                node = EBNode(word, pos, parent_idx, p, par.p, q, par.q, mu)
                nxt.append((node, new_partial, new_carried))
        total += len(nxt)
        if total > node_guard:
            raise EnumerationGuardError(
                f"tree exceeds {node_guard} nodes at depth {pos}"
            )
        frontier = nxt
        levels.append(tuple(entry[0] for entry in frontier))
    return EBTree(params=params, u=weights.u, levels=tuple(levels),
                  digit_specs=tuple(specs))


@dataclass(frozen=True)
class GapReport:
    min_normalized: float
    worst_depth: int
    worst_word: tuple[int, ...]
    pairs_checked: int


def gap_check(tree: EBTree) -> GapReport:
    """Exact gaps between same-depth fundamental sets, normalized by the
    requirement diam(I_n)/(8M); every value >= 1 means the bound holds."""
    eight_m = 8 * tree.params.M
    worst = math.inf
    worst_depth = 0
    worst_word: tuple[int, ...] = ()
    pairs = 0
    for level in tree.levels:
        hulls = sorted(
            ((tree.hull(node), node) for node in level), key=lambda t: t[0][0]
        )
        for (h1, n1), (h2, n2) in zip(hulls, hulls[1:]):
            gap = h2[0] - h1[1]
            pairs += 1
            for node in (n1, n2):
                req = node.interval_length() / eight_m
                normalized = float(gap / req)
                if normalized < worst:
                    worst = normalized
                    worst_depth = node.depth
                    worst_word = node.word
    return GapReport(min_normalized=worst, worst_depth=worst_depth,
                     worst_word=worst_word, pairs_checked=pairs)


@dataclass(frozen=True)
class HolderReport:
    exponent: float
    per_depth: tuple[tuple[int, float], ...]
    max_ratio: float


def holder_check(tree: EBTree, params: EBParams | None = None) -> HolderReport:
    """max over nodes of mu(J) / diam(J)^(s(1-delta)-delta), per depth.

    A finite, depth-stable maximum is the empirical face of the mass
    bound behind the dimension estimate.
    """
    prm = params if params is not None else tree.params
    exponent = prm.s * (1 - prm.delta) - prm.delta
    per_depth: list[tuple[int, float]] = []
    overall = 0.0
    for level in tree.levels:
        best = 0.0
        for node in level:
            lo, hi = tree.hull(node)
            ratio = node.mu / float(hi - lo) ** exponent
            best = max(best, ratio)
        per_depth.append((level[0].depth, best))
        overall = max(overall, best)
    return HolderReport(exponent=exponent, per_depth=tuple(per_depth),
                        max_ratio=overall)
