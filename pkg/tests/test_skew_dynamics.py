import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewlab.cocycle import AnalyticCocycle, TrigPoly
from skewlab.diophantine import cf_from_quotients
from skewlab.errors import InvalidInputError
from skewlab.presets import prime_pair
from skewlab.primes import chebyshev_theta
from skewlab.skew_dynamics import (Observable, SkewProduct, exact_star_discrepancy,
                                   nazarov_small_set, nazarov_translate_count,
                                   prime_weighted_average, reduced_residue_average,
                                   star_discrepancy_bound, weyl_sum)


@pytest.fixture(scope="module")
def T():
    cf, g, _ = prime_pair()
    return SkewProduct(cf, g)


def test_iterate_identity_and_zero_cocycle():
    cf = cf_from_quotients([1, 2, 3, 4, 5] * 4)
    g0 = AnalyticCocycle({}, 0.095)
    T = SkewProduct(cf, g0)
    x, y = 0.3, 0.6
    assert T.iterate(0, x, y) == (x, y)
    xn, yn = T.iterate(57, x, y)
    assert yn == y  # zero cocycle leaves the fiber alone
    assert xn == pytest.approx((x + float(cf.frac01(57))) % 1.0)


def test_iterate_single_step_definition(T):
    x, y = 0.21, 0.68
    x1, y1 = T.iterate(1, x, y)
    assert x1 == pytest.approx((x + float(T.cf.value)) % 1.0, abs=1e-12)
    assert y1 == pytest.approx((y + float(T.g.eval(x))) % 1.0, abs=1e-12)


def test_iterate_matches_stepwise():
    # modest cocycle so the stepwise oracle's own rounding stays under 1e-8
    cf = cf_from_quotients([1, 2, 3, 4, 5] * 4)
    g = AnalyticCocycle({2: 0.2, 5: 0.1}, 0.095)
    T = SkewProduct(cf, g)
    a = T.iterate(1000, 0.2, 0.7)
    b = T.iterate_stepwise(1000, 0.2, 0.7)
    assert abs(a[0] - b[0]) < 1e-8 and abs(a[1] - b[1]) < 1e-8


def test_semigroup_property(T):
    rng = np.random.default_rng(11)
    for _ in range(20):
        n, m = (int(v) for v in rng.integers(1, 2000, 2))
        x, y = rng.random(2)
        p1 = T.iterate(m, *T.iterate(n, x, y))
        p2 = T.iterate(n + m, x, y)
        dx = min(abs(p1[0] - p2[0]), 1 - abs(p1[0] - p2[0]))
        dy = min(abs(p1[1] - p2[1]), 1 - abs(p1[1] - p2[1]))
        assert dx + dy < 1e-9


def test_prime_average_constant_observable(T):
    avg, theta_ratio = prime_weighted_average(T, Observable(0, 0), 10**5, 0.1, 0.2)
    assert avg == pytest.approx(theta_ratio)
    assert theta_ratio == pytest.approx(chebyshev_theta(10**5) / 10**5)


def test_prime_average_zero_cocycle_direct_loop():
    cf = cf_from_quotients([1, 2, 3, 4, 5] * 4)
    g0 = AnalyticCocycle({}, 0.095)
    T = SkewProduct(cf, g0)
    from skewlab.primes import primes_in

    N = 20000
    avg, _ = prime_weighted_average(T, Observable(1, 0), N, 0.0, 0.0)
    alpha = float(cf.value)
    direct = sum(math.log(p) * complex(math.cos(2 * math.pi * p * alpha),
                                       math.sin(2 * math.pi * p * alpha))
                 for p in primes_in(2, N).tolist()) / N
    assert abs(avg - direct) < 1e-6


def test_prime_average_two_scale_decay(T):
    a_small, _ = prime_weighted_average(T, Observable(0, 1), 10**5, 0.0, 0.0)
    a_big, _ = prime_weighted_average(T, Observable(0, 1), 10**6, 0.0, 0.0)
    assert abs(a_big) < abs(a_small)


def test_reduced_residue_average_basics(T):
    # d = 1: plain Birkhoff average over z steps
    z = 100
    v = reduced_residue_average(T, Observable(0, 1), z, 1, 0.1, 0.2)
    assert abs(v) <= 1 + 1e-12
    # f = e_{0,0}, d = z prime: normalized count of reduced residues = 1
    v = reduced_residue_average(T, Observable(0, 0), 101, 101, 0.0, 0.0)
    assert v == pytest.approx(1.0)
    with pytest.raises(InvalidInputError):
        reduced_residue_average(T, Observable(0, 1), 100, 7, 0.0, 0.0)


def test_reduced_residue_average_decay(T):
    cf = T.cf
    vals = [abs(reduced_residue_average(T, Observable(0, 1), cf.q(n), cf.q(n), 0.0, 0.0))
            for n in (1, 2, 3)]
    assert vals[2] < vals[1] < vals[0]


def test_weyl_sum_examples():
    # all points equal
    v = weyl_sum(np.full(10, 0.3), 2)
    assert v == pytest.approx(complex(math.cos(2 * math.pi * 0.6),
                                      math.sin(2 * math.pi * 0.6)))
    # full cycle
    assert abs(weyl_sum(np.arange(4) / 4, 1)) < 1e-15
    # geometric series oracle
    beta, N = 0.1234, 500
    pts = (np.arange(N) * beta) % 1.0
    expect = abs(math.sin(math.pi * N * beta) / (N * math.sin(math.pi * beta)))
    assert abs(weyl_sum(pts, 1)) == pytest.approx(expect, abs=1e-9)


@given(st.integers(1, 40), st.integers(2, 200), st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_weyl_modulus_at_most_one(freq, n, seed):
    pts = np.random.default_rng(seed).random(n)
    assert abs(weyl_sum(pts, freq)) <= 1 + 1e-12


def test_star_discrepancy_grid():
    N = 1024
    pts = np.arange(N) / N
    bound = star_discrepancy_bound(pts, N)
    assert bound < 0.02
    assert exact_star_discrepancy(pts) <= bound


def test_star_discrepancy_never_undercuts():
    rng = np.random.default_rng(4)
    # single repeated point: exact discrepancy ~ 1
    pts = np.full(100, 0.5)
    assert star_discrepancy_bound(pts, 10) >= exact_star_discrepancy(pts)
    for _ in range(10):
        pts = rng.random(int(rng.integers(10, 10000)))
        assert star_discrepancy_bound(pts, 100) >= exact_star_discrepancy(pts)


def test_nazarov_small_set_constants():
    one = TrigPoly([1], [0.0], mean=1.0)
    assert nazarov_small_set(one, 0.5) == 0.0
    assert nazarov_small_set(one, 2.0) == 1.0
    cos = TrigPoly([1], [0.5])
    eps = 0.1
    # oracle: dense-grid measure of {|cos(2 pi x)| <= eps}
    xs = np.arange(1 << 20) / (1 << 20)
    dense = float(np.mean(np.abs(np.cos(2 * np.pi * xs)) <= eps))
    assert nazarov_small_set(cos, eps, grid=1 << 14) == pytest.approx(dense, abs=2e-3)
    with pytest.raises(InvalidInputError):
        nazarov_small_set(cos, 0.1, grid=512)


def test_nazarov_monotone_and_vanishing():
    cos = TrigPoly([1], [0.5])
    vals = [nazarov_small_set(cos, eps, grid=1 << 14)
            for eps in (0.5, 0.2, 0.1, 0.02, 1e-4)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-3


def test_nazarov_monotone_on_block_family():
    # actual denominator blocks: measure of {|g_n| <= eps * sup} shrinks to 0
    from skewlab.cocycle import reduce as creduce

    cf, g, _ = prime_pair()
    red = creduce(g, cf, _params_of(), 4)
    for n in red.block_indices()[:2]:
        block = red.block(n)
        sup = block.sup_norm(grid=1 << 12)[1]
        vals = [nazarov_small_set(block, eps * sup, grid=1 << 14)
                for eps in (0.5, 0.1, 0.01, 1e-4)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 0.01


def test_nazarov_translate_count(T):
    cf, g, _ = prime_pair()
    from skewlab.cocycle import reduce as creduce

    red = creduce(g, cf, _params_of(), 5)
    block = red.block(1)
    qn = cf.q(2)
    count = nazarov_translate_count(block, cf, qn, 2.0, 0.3)
    assert 0 <= count <= qn
    # tighter threshold catches fewer translates
    count_tight = nazarov_translate_count(block, cf, qn, 5.0, 0.3)
    assert count_tight <= count


def _params_of():
    from skewlab.diophantine import AnalysisParams

    return AnalysisParams(tau_prime=5e-4, delta=0.2)
