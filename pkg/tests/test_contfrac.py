from fractions import Fraction

import numpy as np
import pytest

from primevisit.errors import PrecisionExhausted, UsageError
from primevisit.contfrac import (
    RealNumberSpec,
    cf_expand,
    check_prop71,
    max_partial_quotient,
    return_time,
    return_time_bruteforce,
    type_estimate,
)
from primevisit.exactreal import QuadExt

GOLDEN = RealNumberSpec.golden()
SQRT2M1 = RealNumberSpec.quadratic(-1, 1, 2)


def test_expand_rational():
    cf = cf_expand(RealNumberSpec.rational(355, 113), 10)
    assert cf.partial_quotients == (3, 7, 16)
    assert cf.terminated and cf.exact
    assert cf.convergents[-1] == (355, 113)


def test_expand_quadratic_periodic():
    cf = cf_expand(GOLDEN, 12)
    assert cf.partial_quotients == (0,) + (1,) * 11
    assert cf.period == 1
    cf2 = cf_expand(SQRT2M1, 12)
    assert cf2.partial_quotients == (0,) + (2,) * 11
    assert cf2.period == 1
    # sqrt(7) = [2; 1,1,1,4 repeating]
    cf3 = cf_expand(RealNumberSpec.quadratic(0, 1, 7), 14)
    assert cf3.partial_quotients[:9] == (2, 1, 1, 1, 4, 1, 1, 1, 4)
    assert cf3.period == 4


def test_convergent_identities():
    # p_n q_{n-1} - p_{n-1} q_n = (-1)^{n-1}, q_n strictly increasing (n >= 1)
    for spec in (GOLDEN, SQRT2M1, RealNumberSpec.quadratic(Fraction(1, 3), Fraction(2, 7), 13)):
        cf = cf_expand(spec, 20)
        conv = cf.convergents
        for n in range(1, len(conv)):
            p1, q1 = conv[n]
            p0, q0 = conv[n - 1]
            assert p1 * q0 - p0 * q1 == (-1) ** (n - 1)
            if n >= 2:
                assert q1 > q0


def test_approximation_quality():
    # ||q_n alpha|| <= 1/q_{n+1}
    for spec in (GOLDEN, SQRT2M1):
        a = spec.exact_value()
        cf = cf_expand(spec, 18)
        qs = [q for _, q in cf.convergents]
        for n in range(len(qs) - 1):
            dist = (a * qs[n]).dist_to_nearest_int()
            assert dist <= QuadExt(Fraction(1, qs[n + 1]))


def test_expand_decimal_truncates():
    cf = cf_expand(RealNumberSpec.decimal("0.6180339887"), 40)
    # golden to 10 digits: the certified prefix must match the true expansion
    assert cf.partial_quotients[:10] == (0,) + (1,) * 9
    assert not cf.exact
    assert cf.depth < 40  # truncated where the half-ulp interval gives out


def test_expand_decimal_too_coarse():
    with pytest.raises(PrecisionExhausted):
        # +- 0.05 straddles several quotients immediately after a0
        rt = return_time(RealNumberSpec.decimal("0.6"), Fraction(1, 1000))


def test_return_time_examples():
    assert return_time(GOLDEN, Fraction(1, 10)).tau == 5
    rep = return_time(GOLDEN, Fraction(1, 10))
    assert rep.achieved == pytest.approx(0.09017, abs=1e-5)
    assert return_time(GOLDEN, Fraction(1, 20)).tau == 13
    rep = return_time(RealNumberSpec.rational(1, 3), Fraction(2, 10))
    assert rep.tau == 3 and rep.achieved == 0.0


def test_return_time_epsilon_validation():
    with pytest.raises(UsageError):
        return_time(GOLDEN, Fraction(1, 2))
    with pytest.raises(UsageError):
        return_time(GOLDEN, 0)


def test_bruteforce_examples():
    assert return_time_bruteforce(GOLDEN, Fraction(1, 10), 100).tau == 5
    assert return_time_bruteforce(RealNumberSpec.rational(1, 2), Fraction(3, 10), 10).tau == 2
    t1 = return_time(SQRT2M1, Fraction(1, 10**4)).tau
    t2 = return_time_bruteforce(SQRT2M1, Fraction(1, 10**4), 10**4 + 1).tau
    assert t1 == t2 == 5741


def test_oracle_equivalence_random():
    rng = np.random.default_rng(5)
    for _ in range(12):
        d = int(rng.choice([2, 3, 5, 7, 13]))
        val = QuadExt(
            Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 5))),
            Fraction(int(rng.integers(1, 5)), int(rng.integers(1, 5))),
            d,
        ).frac()
        spec = RealNumberSpec.quadratic(val.a, val.b, val.d)
        for eps in (Fraction(1, 10), Fraction(1, 97), Fraction(1, 1000)):
            cap = int(1 / eps) + 1
            assert return_time(spec, eps).tau == return_time_bruteforce(spec, eps, cap).tau


def test_tau_monotone_in_eps_and_symmetric():
    taus = [
        return_time(GOLDEN, Fraction(1, 10**j)).tau for j in range(1, 6)
    ]
    assert taus == sorted(taus)
    # tau_eps(alpha) = tau_eps(1 - alpha)
    g = QuadExt.golden()
    flipped = QuadExt(1) - g
    spec = RealNumberSpec.quadratic(flipped.a, flipped.b, flipped.d)
    for eps in (Fraction(1, 10), Fraction(1, 50), Fraction(1, 997)):
        assert return_time(spec, eps).tau == return_time(GOLDEN, eps).tau


def test_rational_tau_hits_denominator():
    # once eps is below every nonzero ||n alpha||, tau is the denominator
    rep = return_time(RealNumberSpec.rational(3, 7), Fraction(1, 10**6))
    assert rep.tau == 7 and rep.achieved == 0.0


def test_decimal_return_times_match_exact():
    # 30 certified digits of the golden ratio reach tau at eps = 1e-5
    g30 = RealNumberSpec.decimal("0.618033988749894848204586834366")
    for eps in (Fraction(1, 10), Fraction(1, 1000), Fraction(1, 10**5)):
        assert return_time(g30, eps).tau == return_time(GOLDEN, eps).tau


def test_quotient_list_return_time():
    spec = RealNumberSpec.from_quotients([0] + list(range(1, 20)))
    rep = return_time(spec, Fraction(1, 500))
    rb = return_time_bruteforce(spec, Fraction(1, 500), 600)
    assert rep.tau == rb.tau


def test_type_estimates():
    est = type_estimate(GOLDEN, 30)
    assert est.applicable
    assert est.liminf_proxy == pytest.approx(1.0, abs=0.15)
    assert est.exponent_max == pytest.approx(1.0, abs=0.15)

    assert not type_estimate(RealNumberSpec.rational(7, 13), 10).applicable

    liou = RealNumberSpec.from_quotients([0] + [10 ** (2**i) for i in range(6)])
    est = type_estimate(liou, 7)
    assert est.applicable and est.liminf_proxy < 0.7


def test_max_partial_quotient():
    assert max_partial_quotient(GOLDEN) == 1
    assert max_partial_quotient(SQRT2M1) == 2
    assert max_partial_quotient(RealNumberSpec.rational(3, 7)) is None
    # long-period surd (period 712): still confirmed by depth doubling;
    # 8084 cross-checked against a high-precision mpmath expansion
    long_period = RealNumberSpec.quadratic(Fraction(29, 11), Fraction(-3, 2), 31)
    assert max_partial_quotient(long_period) == 8084


def test_expansion_fuzz_quality():
    """Random quadratics: quotient validity, alternating enclosure, and the
    1/q^2 approximation quality, all by exact comparisons."""
    rng = np.random.default_rng(1234)
    tested = 0
    while tested < 60:
        d = int(rng.choice([2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19]))
        a = Fraction(int(rng.integers(-30, 31)), int(rng.integers(1, 12)))
        b = Fraction(int(rng.integers(-12, 13)) or 1, int(rng.integers(1, 12)))
        x = QuadExt(a, b, d)
        if x.is_rational:
            continue
        tested += 1
        spec = RealNumberSpec.quadratic(x.a, x.b, x.d)
        cf = cf_expand(spec, 18)
        assert all(q >= 1 for q in cf.partial_quotients[1:])
        for n, (p, q) in enumerate(cf.convergents):
            diff = x - Fraction(p, q)
            assert diff.sign() == (1 if n % 2 == 0 else -1)
            absdiff = diff if diff.sign() > 0 else -diff
            assert absdiff < Fraction(1, q * q)
        assert cf_expand(spec, 30).partial_quotients[:18] == cf.partial_quotients


def test_prop71_rows():
    grid = [Fraction(1, 10**j) for j in range(1, 7)]
    for spec, A in ((GOLDEN, 1), (SQRT2M1, 2)):
        rows = check_prop71(spec, grid)
        for r in rows:
            assert r.lower_kind == "bounded-quotient"
            assert r.upper_ok and r.lower_ok
            assert r.lower == pytest.approx(float(1 / r.epsilon) / (A + 1) ** 3)


def test_prop71_envelope_for_decimal():
    rows = check_prop71(RealNumberSpec.decimal("0.54627234601"), [Fraction(1, 10)])
    assert rows[0].lower_kind == "envelope"


def test_parse_roundtrip():
    assert RealNumberSpec.parse("golden").kind == "quadratic"
    assert RealNumberSpec.parse("3/7").rat == Fraction(3, 7)
    s = RealNumberSpec.parse("sqrt:2:-1:1")
    assert s.kind == "quadratic" and float(s) == pytest.approx(0.41421356, abs=1e-8)
    assert RealNumberSpec.parse("dec:0.125").kind == "decimal"
    assert RealNumberSpec.parse("cf:0,1,2,3").quotients == (0, 1, 2, 3)
    with pytest.raises(UsageError):
        RealNumberSpec.parse("banana")
