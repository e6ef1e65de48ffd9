from fractions import Fraction
from math import sinh

import numpy as np
import pytest

from primevisit.errors import InvalidParameter, SearchFailed, UsageError
from primevisit.contfrac import RealNumberSpec
from primevisit.clusters import pm
from primevisit.dynamics import (
    UnimodularMatrix,
    UpperHalfPoint,
    early_visit_search,
    first_return,
    hyp_distance,
    kac_empirical,
    make_mobius,
    make_right_shift,
    make_rotation,
    mobius_ball_measure,
    prime_visit_times,
    quotient_distance,
    reduce_fundamental,
    verify_certificate,
)

GOLDEN = RealNumberSpec.golden()
SQRT2M1 = RealNumberSpec.quadratic(-1, 1, 2)


# --- hyperbolic geometry -----------------------------------------------------


def test_hyp_distance_examples():
    i = UpperHalfPoint(0.0, 1.0)
    assert hyp_distance(i, UpperHalfPoint(0.0, 2.0)) == pytest.approx(np.log(2))
    assert hyp_distance(i, i) == 0.0
    assert hyp_distance(i, UpperHalfPoint(1.0, 1.0)) == pytest.approx(
        np.arccosh(1.5)
    )
    # symmetry
    z, w = UpperHalfPoint(0.3, 0.9), UpperHalfPoint(-0.2, 1.7)
    assert hyp_distance(z, w) == pytest.approx(hyp_distance(w, z))


def test_reduce_examples():
    rp = reduce_fundamental(UpperHalfPoint(0.0, 2.0))
    assert rp.point.floats() == (0.0, 2.0) and rp.word == ""

    rp = reduce_fundamental(UpperHalfPoint(0.7, 0.8))
    x, y = rp.point.floats()
    assert (x, y) == (pytest.approx(0.41096, abs=1e-5), pytest.approx(1.09589, abs=1e-5))
    assert rp.word.split() == ["T^-1", "S"]

    rp = reduce_fundamental(UpperHalfPoint(5.3, 0.9))
    assert rp.word.startswith("T^-5")
    x, y = rp.point.floats()
    assert abs(x) <= 0.5 + 1e-12 and x * x + y * y >= 1 - 1e-12


def test_reduce_gamma_tracks_word():
    rng = np.random.default_rng(17)
    for _ in range(50):
        z = UpperHalfPoint(float(rng.uniform(-8, 8)), float(rng.uniform(0.05, 3)))
        rp = reduce_fundamental(z)
        out = rp.gamma.act(z)
        assert out.floats() == pytest.approx(rp.point.floats(), abs=1e-9)
        x, y = rp.point.floats()
        assert abs(x) <= 0.5 + 1e-9 and x * x + y * y >= 1 - 1e-9


def test_reduce_exact_points():
    z = UpperHalfPoint(Fraction(7, 10), Fraction(4, 5))
    rp = reduce_fundamental(z)
    assert rp.point.is_exact
    # T^-1 then S: -1/(-3/10 + 4i/5) = 30/73 + 80i/73, by hand
    assert rp.point.re == Fraction(30, 73)
    assert rp.point.im == Fraction(80, 73)


def test_quotient_distance_edge_identification():
    z = UpperHalfPoint(-0.49, 1.2)
    w = UpperHalfPoint(0.49, 1.2)
    qd = quotient_distance(z, w)
    assert qd.value < 0.02  # via the T-translate
    assert qd.value <= hyp_distance(z, w)
    assert qd.exact_region
    # identity is in the translate set
    assert quotient_distance(z, z).value == 0.0


# --- systems ------------------------------------------------------------------


def test_shift_isometry():
    sh = make_right_shift(12)
    for x in range(12):
        for y in range(12):
            assert sh.dist(sh.apply(x), sh.apply(y)) == sh.dist(x, y)


def test_first_return_cap_exceeded():
    from primevisit.errors import CapExceeded

    # hyperbolic non-integer matrix: the orbit of i wanders without coming
    # back within 1e-6 in the first few dozen steps
    mob = make_mobius(UnimodularMatrix.exact(Fraction(3, 2), Fraction(1, 2), 1, 1))
    zi = UpperHalfPoint(Fraction(0), Fraction(1))
    with pytest.raises(CapExceeded):
        first_return(mob, zi, Fraction(1, 10**6), cap=40)


def test_shift_system_basics():
    sh = make_right_shift(4)
    assert sh.iterate(0, 3) == 3
    assert sh.dist(0, 3) == 1.0
    assert sh.ball_measure(0, 0.5) == 0.25
    assert sh.ball_measure(0, 1.5) == 1.0
    assert first_return(make_right_shift(7), 0, 0.5) == 7
    assert first_return(make_right_shift(7), 0, 1.5) == 1


def test_rotation_system_basics():
    rot = make_rotation(GOLDEN)
    assert rot.ball_measure(0, 0.05) == pytest.approx(0.1)
    assert first_return(rot, 0, Fraction(1, 10)) == 5
    with pytest.raises(InvalidParameter):
        make_rotation(RealNumberSpec.rational(3, 2))


def test_rotation_isometry_and_measure_preservation():
    rot = make_rotation(SQRT2M1)
    rng = np.random.default_rng(23)
    for _ in range(1000):
        x = Fraction(int(rng.integers(0, 997)), 997)
        y = Fraction(int(rng.integers(0, 997)), 997)
        d0 = rot.dist(x, y)
        d1 = rot.dist(rot.apply(x), rot.apply(y))
        assert abs(d0 - d1) <= 1e-15  # exact arithmetic underneath
        # preimage of a ball has the same measure
        assert rot.ball_measure(x, 0.03) == rot.ball_measure(rot.apply(x), 0.03)


def test_rotation_doubling_exact():
    rot = make_rotation(GOLDEN)
    for eps in (0.01, 0.05, 0.12):
        assert rot.ball_measure(0, 2 * eps) == pytest.approx(
            2 * rot.ball_measure(0, eps)
        )


def test_mobius_system_basics():
    # integer translation: T(i) reduces back to i
    mob = make_mobius(UnimodularMatrix.exact(1, 1, 0, 1))
    zi = UpperHalfPoint(Fraction(0), Fraction(1))
    for p in (2, 3, 7):
        assert mob.dist(mob.iterate(zi, p), zi) == pytest.approx(0.0, abs=1e-12)
    assert first_return(mob, zi, Fraction(1, 100), cap=10) == 1


def test_mobius_isometry_on_cover_and_quotient():
    # real matrix: honest isometry of the upper half-plane
    g = UnimodularMatrix(1.0, 0.3, 0.0, 1.0)
    rng = np.random.default_rng(5)
    for _ in range(100):
        z = UpperHalfPoint(float(rng.uniform(-0.5, 0.5)), float(rng.uniform(0.8, 2)))
        w = UpperHalfPoint(float(rng.uniform(-0.5, 0.5)), float(rng.uniform(0.8, 2)))
        assert hyp_distance(g.act(z), g.act(w)) == pytest.approx(
            hyp_distance(z, w), abs=1e-9
        )
    # integer matrix: quotient distance preserved (inside the exact region)
    gamma = UnimodularMatrix.exact(2, 1, 1, 1)
    mob = make_mobius(gamma)
    for _ in range(100):
        z = UpperHalfPoint(Fraction(int(rng.integers(-40, 40)), 100),
                           Fraction(int(rng.integers(110, 200)), 100))
        w = UpperHalfPoint(z.re + Fraction(1, 37), z.im + Fraction(1, 53))
        d0 = quotient_distance(reduce_fundamental(z).point,
                               reduce_fundamental(w).point)
        d1 = quotient_distance(reduce_fundamental(gamma.act(z)).point,
                               reduce_fundamental(gamma.act(w)).point)
        if d0.exact_region and d1.exact_region:
            assert d1.value == pytest.approx(d0.value, abs=1e-9)


def test_mobius_doubling_ratio():
    for eps in (0.01, 0.05, 0.1):
        ratio = mobius_ball_measure(2 * eps) / mobius_ball_measure(eps)
        assert ratio <= 4.1
        assert ratio == pytest.approx((sinh(eps) / sinh(eps / 2)) ** 2)


def test_matrix_power_by_squaring():
    # float elliptic matrix stays bounded: compare against repeated multiply
    th = 0.7
    g = UnimodularMatrix(np.cos(th), -np.sin(th), np.sin(th), np.cos(th))
    m = UnimodularMatrix.identity()
    for p in range(1, 1001):
        m = m @ g
        if p in (1, 2, 10, 137, 500, 1000):
            fast = g.power(p)
            for a, b in zip(fast.entries(), m.entries()):
                assert abs(a - b) < 1e-9
    # exact parabolic closed form
    shear = UnimodularMatrix.exact(1, Fraction(3, 10), 0, 1)
    assert shear.power(100).entries() == (1, 30, 0, 1)
    assert shear.power(-2).entries() == (1, Fraction(-3, 5), 0, 1)
    # exact non-parabolic
    gm = UnimodularMatrix.exact(2, 1, 1, 1)
    assert gm.power(3).entries() == (gm @ gm @ gm).entries()


# --- prime visits and certificates ---------------------------------------------


def test_prime_visit_shift():
    sh = make_right_shift(4)
    assert prime_visit_times(sh, 0, 1, 0.5, 3, 10**4) == [5, 13, 17]


def test_prime_visit_rotation():
    rot = make_rotation(SQRT2M1)
    assert prime_visit_times(rot, 0, Fraction(1, 2), Fraction(1, 20), 1, 100) == [23]


def test_prime_visit_whole_space():
    rot = make_rotation(GOLDEN)
    assert prime_visit_times(rot, 0, Fraction(1, 4), Fraction(3, 5), 3, 100) == [2, 3, 5]


def test_shift_visits_match_pm():
    for q in (10, 21, 50):
        sh = make_right_shift(q)
        for a in range(1, q):
            from math import gcd

            if gcd(a, q) != 1:
                continue
            assert tuple(prime_visit_times(sh, 0, a, 0.5, 2, 300 * 2 * q)) == pm(
                q, a, 2
            ).primes


def test_early_visit_shift_example():
    sh = make_right_shift(10)
    cert = early_visit_search(sh, 0, 0.5, 2, 270)
    assert cert.q_return == 10
    assert cert.a_star == 3
    assert cert.primes == (3, 13)
    assert cert.distances == (0.0, 0.0)
    assert cert.q_bound_ok
    ok, det = verify_certificate(sh, cert, 0)
    assert ok, det


def test_early_visit_rotation_golden():
    rot = make_rotation(GOLDEN)
    cert = early_visit_search(rot, 0, Fraction(1, 10), 2, 270)
    assert cert.q_return == 2584  # Fibonacci
    assert all(d < 0.1 for d in cert.distances)
    assert cert.q_bound_ok and 1 / cert.mu_ball_quarter == pytest.approx(5400.0)
    ok, det = verify_certificate(rot, cert, 0)
    assert ok, det


def test_early_visit_degenerate_ball():
    rot = make_rotation(GOLDEN)
    cert = early_visit_search(rot, 0, Fraction(3, 5), 2, 270)
    assert cert.degenerate and cert.primes == (2, 3) and cert.q_return == 1


def test_early_visit_mobius_shear():
    g = UnimodularMatrix.exact(1, Fraction(3, 10), 0, 1)
    mob = make_mobius(g)
    x0 = UpperHalfPoint(Fraction(0), Fraction(1))
    cert = early_visit_search(mob, x0, Fraction(2, 10), 2, 270)
    assert cert.q_return == 10
    assert cert.primes == (3, 13)
    assert cert.distances == (0.0, 0.0)
    ok, det = verify_certificate(mob, cert, x0)
    assert ok, det


def test_float_mobius_matches_exact_short_orbits():
    g_exact = UnimodularMatrix.exact(1, Fraction(3, 10), 0, 1)
    g_float = UnimodularMatrix(1.0, 0.3, 0.0, 1.0)
    me, mf = make_mobius(g_exact), make_mobius(g_float)
    zi_e = UpperHalfPoint(Fraction(0), Fraction(1))
    zi_f = UpperHalfPoint(0.0, 1.0)
    assert me.certified and not mf.certified
    pe = prime_visit_times(me, zi_e, me.iterate(zi_e, 3), Fraction(1, 5), 2, 1000)
    pf = prime_visit_times(mf, zi_f, mf.iterate(zi_f, 3), Fraction(1, 5), 2, 1000)
    assert pe == pf == [3, 7]
    assert first_return(mf, zi_f, Fraction(1, 1000), cap=100) == 10


def test_certificate_serializes_and_tamper_fails():
    import dataclasses
    import json

    sh = make_right_shift(10)
    cert = early_visit_search(sh, 0, 0.5, 2, 270)
    doc = json.loads(cert.to_json())
    assert doc["tool_version"] and doc["schema_version"] == 1
    assert doc["primes"] == [3, 13]
    bad = dataclasses.replace(cert, primes=(3, 15))  # 15 is not prime
    ok, det = verify_certificate(sh, bad, 0)
    assert not ok and det["problems"]
    bad = dataclasses.replace(cert, primes=(7, 13))  # 7 != 3 mod 10
    ok, det = verify_certificate(sh, bad, 0)
    assert not ok and det["problems"]


def test_early_visit_needs_h_for_larger_m():
    rot = make_rotation(GOLDEN)
    with pytest.raises(UsageError):
        early_visit_search(rot, 0, Fraction(1, 10), 3)


def test_early_visit_honest_failure():
    # h = 1/2 cannot ever work: p_2(q, a) >= q + 2 > q h even after the
    # one allowed doubling of h
    rot = make_rotation(GOLDEN)
    with pytest.raises(SearchFailed):
        early_visit_search(rot, 0, Fraction(1, 10), 2, h=0.5)


def test_kac_examples():
    rep = kac_empirical(make_right_shift(7), 0, 0.5, 1, 100)
    assert rep.mean_return == 7.0 and rep.relative_error == 0.0

    rep = kac_empirical(
        make_rotation(SQRT2M1), 0, 0.05, n_samples=10**4, cap=10**4, seed=42
    )
    assert rep.ergodic and rep.censored == 0
    assert rep.relative_error < 0.10

    rep = kac_empirical(
        make_rotation(RealNumberSpec.rational(1, 3)), 0, 0.01, 100, 100, seed=1
    )
    assert not rep.ergodic
    assert rep.mean_return == 3.0  # period-3 cycle, not mu(B)^-1
