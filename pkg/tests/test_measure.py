import math
from fractions import Fraction

import pytest
from mpmath import mp, mpf

from primecf.errors import OutOfRangeError, PrecisionExhaustedError
from primecf.measure import (
    MCExperiment,
    borel_bernstein_table,
    level_set_measure,
    run_zero_one_experiment,
)
from primecf.primes import primes_in


# -- independent oracles ----------------------------------------------------

def oracle_level_one(threshold: float, cutoff: int, sv) -> tuple[Fraction, int]:
    total, count = Fraction(0), 0
    for p in primes_in(2, cutoff, sv):
        p = int(p)
        if p >= threshold:
            total += Fraction(1, p * (p + 1))
            count += 1
    return total, count


def oracle_level_two(threshold: float, cutoff: int, sv) -> tuple[Fraction, int]:
    # ordered prime digit pairs (x, y); |I(x, y)| = 1/((xy+1)(xy+1+x))
    ps = [int(p) for p in primes_in(2, cutoff, sv)]
    total, count = Fraction(0), 0
    for x in ps:
        for y in ps:
            if x * y >= threshold:
                q = x * y + 1
                total += Fraction(1, q * (q + x))
                count += 1
    return total, count


# -- exact level sets ---------------------------------------------------------

@pytest.mark.parametrize("threshold,cutoff", [(3, 50), (10, 200), (97.5, 1000)])
def test_single_digit_bracket_contains_exact_sum(sieve_small, threshold, cutoff):
    res = level_set_measure(1, threshold, cutoff, sieve_small)
    exact, count = oracle_level_one(threshold, cutoff, sieve_small)
    assert res.terms == count
    assert Fraction(res.exact_lower) <= exact <= Fraction(res.exact_upper)
    assert res.width < 2.0 / cutoff


@pytest.mark.parametrize("threshold,cutoff", [(4, 40), (6, 100), (50, 200)])
def test_double_digit_bracket_contains_exact_sum(sieve_small, threshold, cutoff):
    res = level_set_measure(2, threshold, cutoff, sieve_small)
    exact, count = oracle_level_two(threshold, cutoff, sieve_small)
    assert res.terms == count
    assert Fraction(res.exact_lower) <= exact <= Fraction(res.exact_upper)


def test_double_digit_attained_threshold_boundary(sieve_small):
    # 9 = 3 * 3 sits exactly on the cut; nudging past it must drop the pair
    at = level_set_measure(2, 9, 60, sieve_small)
    past = level_set_measure(2, 9.0000001, 60, sieve_small)
    _, count_at = oracle_level_two(9, 60, sieve_small)
    _, count_past = oracle_level_two(9.0000001, 60, sieve_small)
    assert at.terms == count_at
    assert past.terms == count_past == count_at - 1
    assert at.exact_lower > past.exact_lower


def test_double_digit_boundary_with_large_factors(sieve_small):
    # threshold equal to a product of two five-digit primes; the float
    # quotient inside the factor scan sits within rounding of the cut
    t = 9973 * 9967
    res = level_set_measure(2, t, 10_000, sieve_small)
    ps = [int(p) for p in primes_in(2, 10_000, sieve_small)]
    count = sum(1 for x in ps for y in ps if x * y >= t)
    assert res.terms == count


def test_bracket_nesting_and_width(sieve_small):
    ref = level_set_measure(1, 3, 100_000, sieve_small)
    for cutoff in (50, 300, 2000):
        res = level_set_measure(1, 3, cutoff, sieve_small)
        assert res.exact_lower <= ref.exact_lower
        assert res.exact_upper >= ref.exact_upper
        assert res.width > ref.width
    ref2 = level_set_measure(2, 6, 10_000, sieve_small)
    for cutoff in (50, 500):
        res = level_set_measure(2, 6, cutoff, sieve_small)
        assert res.exact_lower <= ref2.exact_lower + 1e-15
        assert res.exact_upper >= ref2.exact_upper - 1e-15


def test_level_set_validation(sieve_small):
    with pytest.raises(ValueError):
        level_set_measure(3, 10, 100, sieve_small)
    with pytest.raises(OutOfRangeError):
        level_set_measure(1, 1.9, 100, sieve_small)
    with pytest.raises(OutOfRangeError):
        level_set_measure(1, 10, 1_000_000, sieve_small)
    with pytest.raises(OutOfRangeError):
        level_set_measure(1, 10, 1, sieve_small)
    with pytest.warns(UserWarning):
        level_set_measure(1, 2.5, 100, sieve_small)


# -- sampling experiments -------------------------------------------------------

def test_experiment_reproducible(sieve_small):
    cfg = MCExperiment(sample_count=60, precision_bits=128, window=(1, 4),
                       phi=lambda n: 10.0, ell=1, seed=7)
    a = run_zero_one_experiment(cfg, sieve_small)
    b = run_zero_one_experiment(cfg, sieve_small)
    assert a == b
    other = MCExperiment(sample_count=60, precision_bits=128, window=(1, 4),
                         phi=lambda n: 10.0, ell=1, seed=8)
    assert run_zero_one_experiment(other, sieve_small) != a


def test_experiment_frequency_matches_first_digit_law(sieve_small):
    # window (1,1): the hit event is exactly "first digit a prime >= 3",
    # whose probability is the level-set measure; 5 sigma at 2000 samples
    cfg = MCExperiment(sample_count=2000, precision_bits=64, window=(1, 1),
                       phi=lambda n: 3.0, ell=1, seed=20260815)
    rep = run_zero_one_experiment(cfg, sieve_small)
    meas = level_set_measure(1, 3, 100_000, sieve_small)
    p = (meas.exact_lower + meas.exact_upper) / 2
    assert abs(rep.hit_fraction - p) < 5 * math.sqrt(p * (1 - p) / 2000)
    assert rep.per_n == ((1, rep.hit_count),)
    assert rep.sample_count == 2000


def test_experiment_frequency_matches_pair_law(sieve_small):
    cfg = MCExperiment(sample_count=2000, precision_bits=64, window=(1, 1),
                       phi=lambda n: 6.0, ell=2, seed=20260815)
    rep = run_zero_one_experiment(cfg, sieve_small)
    meas = level_set_measure(2, 6, 10_000, sieve_small)
    p = (meas.exact_lower + meas.exact_upper) / 2
    assert abs(rep.hit_fraction - p) < 5 * math.sqrt(p * (1 - p) / 2000)


def test_experiment_counting_consistency(sieve_small):
    cfg = MCExperiment(sample_count=150, precision_bits=256, window=(2, 12),
                       phi=lambda n: float(n), ell=1, seed=3)
    rep = run_zero_one_experiment(cfg, sieve_small)
    assert 0 <= rep.hit_count <= rep.sample_count
    assert rep.hit_fraction == rep.hit_count / rep.sample_count
    assert [n for n, _ in rep.per_n] == list(range(2, 13))
    assert sum(c for _, c in rep.per_n) >= rep.hit_count
    assert all(0 <= c <= rep.sample_count for _, c in rep.per_n)
    assert rep.max_bits_used >= 256
    assert rep.refinements >= 0


def test_experiment_trivial_threshold_hits_everything(sieve_small):
    # a prime somewhere in the first 61 digits: misses have probability
    # around (3/4)^60, far below one in a million samples
    cfg = MCExperiment(sample_count=100, precision_bits=512, window=(1, 60),
                       phi=lambda n: 2.0, ell=1, seed=11)
    rep = run_zero_one_experiment(cfg, sieve_small)
    assert rep.hit_count == 100


def test_experiment_precision_exhaustion(sieve_small):
    # 16 starting bits double at most 8 times: never enough for 2001 digits
    cfg = MCExperiment(sample_count=1, precision_bits=16, window=(1, 2000),
                       phi=lambda n: 2.0, ell=1, seed=1)
    with pytest.raises(PrecisionExhaustedError):
        run_zero_one_experiment(cfg, sieve_small)


def test_experiment_validation():
    with pytest.raises(ValueError):
        MCExperiment(sample_count=0, precision_bits=64, window=(1, 2),
                     phi=lambda n: 2.0, ell=1, seed=1)
    with pytest.raises(ValueError):
        MCExperiment(sample_count=5, precision_bits=8, window=(1, 2),
                     phi=lambda n: 2.0, ell=1, seed=1)
    with pytest.raises(ValueError):
        MCExperiment(sample_count=5, precision_bits=64, window=(3, 2),
                     phi=lambda n: 2.0, ell=1, seed=1)
    with pytest.raises(ValueError):
        MCExperiment(sample_count=5, precision_bits=64, window=(0, 2),
                     phi=lambda n: 2.0, ell=1, seed=1)
    with pytest.raises(ValueError):
        MCExperiment(sample_count=5, precision_bits=64, window=(1, 2),
                     phi=lambda n: 2.0, ell=0, seed=1)


# -- criterion series -------------------------------------------------------------

def test_series_labels():
    phi = lambda n: float(n * n)
    assert borel_bernstein_table(phi, 1, False, (2, 5)).series == "1 / phi"
    assert borel_bernstein_table(phi, 3, False, (2, 5)).series == "(log phi)^(ell-1) / phi"
    assert borel_bernstein_table(phi, 1, True, (2, 5)).series == "(log log phi)^(ell-1) / (phi log phi)"


def test_series_terms_match_formulas():
    phi = lambda n: float(n * n)
    window = (2, 40)
    with mp.workdps(30):
        for ell, prime_mode, formula in [
            (1, False, lambda v: 1 / v),
            (2, False, lambda v: mp.log(v) / v),
            (1, True, lambda v: 1 / (v * mp.log(v))),
            (3, True, lambda v: mp.log(mp.log(v)) ** 2 / (v * mp.log(v))),
        ]:
            rep = borel_bernstein_table(phi, ell, prime_mode, window)
            assert [r.n for r in rep.rows] == list(range(2, 41))
            for row in rep.rows:
                assert row.term == pytest.approx(float(formula(mpf(row.n) ** 2)), rel=1e-12)
            partial = 0.0
            for row in rep.rows:
                partial += row.term
                assert row.partial == pytest.approx(partial, rel=1e-12)


def test_series_direction_flip_for_borderline_handle():
    # phi(n) = n log^2 n: the plain series keeps accumulating per decade,
    # the prime-digit series settles
    phi = lambda n: n * math.log(n) ** 2
    plain = borel_bernstein_table(phi, 2, False, (10, 10_000)).rows
    prime = borel_bernstein_table(phi, 2, True, (10, 10_000)).rows
    def decade_gain(rows, lo, hi):
        by_n = {r.n: r.partial for r in rows}
        return by_n[hi] - by_n[lo]
    plain_ratio = decade_gain(plain, 1000, 10_000) / decade_gain(plain, 100, 1000)
    prime_ratio = decade_gain(prime, 1000, 10_000) / decade_gain(prime, 100, 1000)
    assert prime_ratio < 0.55 < plain_ratio


def test_series_skips_unusable_entries():
    phi = lambda n: 0.5 if n < 5 else float(n)
    prime = borel_bernstein_table(phi, 1, True, (2, 8))
    assert prime.skipped == (2, 3, 4)
    plain = borel_bernstein_table(phi, 1, False, (2, 8))
    assert plain.skipped == ()
    assert plain.rows[0].term == pytest.approx(2.0)
    neg = borel_bernstein_table(lambda n: -1.0, 1, False, (2, 4))
    assert neg.skipped == (2, 3, 4)
    assert neg.rows == ()


def test_series_survives_doubly_exponential_underflow():
    rep = borel_bernstein_table(lambda n: mp.exp(2 ** n), 1, False, (1, 80))
    terms = [r.term for r in rep.rows]
    assert all(math.isfinite(t) for t in terms)
    assert terms[-1] == 0.0
    assert rep.rows[-1].partial < 1.0


def test_series_validation():
    with pytest.raises(ValueError):
        borel_bernstein_table(lambda n: 2.0, 1, False, (5, 4))
    with pytest.raises(ValueError):
        borel_bernstein_table(lambda n: 2.0, 0, False, (1, 4))
