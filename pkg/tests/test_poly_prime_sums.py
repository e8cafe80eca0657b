import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewlab.poly_prime_sums import (ShiftedPoly, integer_phase_main_term, ms_gap,
                                     oscillation_classify, prime_phase_sum)
from skewlab.primes import chebyshev_theta, euler_phi, primes_in


def test_zero_phase_r1_is_theta_window():
    N, H = 10**6, 10**4
    s = prime_phase_sum(N, H, 1, 0, ShiftedPoly(N, ()))
    ps = primes_in(N, N + H)
    assert s.real == pytest.approx(float(np.sum(np.log(ps.astype(float)))))
    assert abs(s.imag) < 1e-9


def test_adversarial_half_integer_slope():
    # g(n) = (n - N)/2 flips sign with parity; matches the direct signed sum
    N, H = 10**6, 10**4
    ps = primes_in(N, N + H)
    logp = np.log(ps.astype(float))
    with pytest.warns(UserWarning):
        s = prime_phase_sum(N, H, 1, 0, ShiftedPoly(N, (0.5,)))
    direct = float(np.sum(logp * np.where((ps - N) % 2, -1.0, 1.0)))
    assert s.real == pytest.approx(direct)


def test_degree_three_matches_direct_loop():
    N, H = 10**6, 3000
    g = ShiftedPoly(N, (1e-9, 1e-11, 1e-14))
    s = prime_phase_sum(N, H, 1, 0, g)
    direct = sum(cmath.exp(2j * math.pi * ((p - N) * 1e-9 + (p - N) ** 2 * 1e-11
                                           + (p - N) ** 3 * 1e-14)) * math.log(p)
                 for p in primes_in(N, N + H).tolist())
    assert abs(s - direct) < 1e-9


def test_phase_reduction_against_exact_fractions():
    from fractions import Fraction

    g = ShiftedPoly(10**7, (0.123456789, 2.5e-9, 1.5e-16))
    x = 77_777_777
    got = g.phase01(np.array([10**7 + x], dtype=np.int64))[0]
    exact = (Fraction(0.123456789) * x + Fraction(2.5e-9) * x**2
             + Fraction(1.5e-16) * x**3) % 1
    assert got == pytest.approx(float(exact), abs=1e-12)


def test_main_term_examples():
    N, H, r = 10**5, 500, 6
    m = integer_phase_main_term(N, H, r, ShiftedPoly(N, ()))
    assert m == pytest.approx((H + 1) / euler_phi(r))
    # pure half-integer slope: bounded oscillating sum
    m2 = integer_phase_main_term(N, H, 1, ShiftedPoly(N, (0.5,)))
    assert abs(m2) <= 1.0 + 1e-12
    # quadratic phase against a direct evaluation
    g = ShiftedPoly(N, (0.0, 1 / 1024))
    direct = sum(cmath.exp(2j * math.pi * ((n - N) ** 2 / 1024))
                 for n in range(N, N + H + 1))
    assert integer_phase_main_term(N, H, 1, g) == pytest.approx(direct, abs=1e-9)


def test_ms_gap_zero_phase_is_window_pnt_defect():
    N, H = 10**6, 10**4
    gap, budget = ms_gap(N, H, 1, 0, ShiftedPoly(N, ()), 0.05)
    defect = abs((chebyshev_theta(N + H) - chebyshev_theta(N)) - (H + 1))
    assert gap == pytest.approx(defect, rel=1e-9)


def test_ms_gap_in_regime_small():
    N = 10**7
    H = int(N**0.7)
    g = ShiftedPoly(N, (1e-9, 1e-12 / H, 1e-13 / H**2, 1e-14 / H**3))
    gap, budget = ms_gap(N, H, 1, 0, g, 0.05)
    assert gap < budget


def test_oscillation_classify_examples():
    N, H = 10**6, 10**4
    assert oscillation_classify(ShiftedPoly(N, ()), H, N, 2.0) == ("non-oscillatory", 1)
    assert oscillation_classify(ShiftedPoly(N, (0.5,)), H, N, 2.0) == ("non-oscillatory", 2)
    # a quotient-generic irrational with big H: no low-height rational is close
    cls, _ = oscillation_classify(ShiftedPoly(N, (0.6180339887498949,)), 10**6, N, 2.0)
    assert cls == "oscillatory"


@given(st.integers(-3, 3), st.integers(-3, 3))
@settings(max_examples=30, deadline=None)
def test_classification_shift_invariance(s1, s2):
    # adding integers to any coefficient leaves the class and witness unchanged
    N, H = 10**6, 10**5
    base = ShiftedPoly(N, (0.37, 1.7e-7))
    shifted = ShiftedPoly(N, (0.37 + s1, 1.7e-7 + s2))
    assert oscillation_classify(base, H, N, 2.0) == oscillation_classify(shifted, H, N, 2.0)


def test_oscillatory_main_term_small():
    # for in-regime oscillatory g, the normalized main term is small
    rng = np.random.default_rng(3)
    N, H = 10**7, 10**5
    hits = 0
    for _ in range(5):
        g = ShiftedPoly(N, (rng.random(), rng.random() / H))
        cls, _ = oscillation_classify(g, H, N, 2.0)
        if cls == "oscillatory":
            hits += 1
            m = integer_phase_main_term(N, H, 1, g)
            assert abs(m) / (H / 1) < 0.1
    assert hits > 0
