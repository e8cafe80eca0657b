"""Exact combinatorial prime-decomposition identities.

Vaughan, Linnik, Heath-Brown, and Buchstab are verified in the Q-vector space
spanned by {log p}: every quantity is a LogVector of integer/rational
multiplicities per prime, so equality is exact and no floating point enters
the checks.  The partition lemma is an exhaustive finite search.
"""

import itertools
import math
from fractions import Fraction

import numpy as np

from skewlab.errors import IntegrityError, PreconditionError, ResourceError
from skewlab.primes import factorize, mobius, mobius_upto, simple_sieve


class LogVector:
    """Element of the rational vector space with basis {log p : p prime}."""

    __slots__ = ("coords",)

    def __init__(self, coords=None):
        self.coords = {p: Fraction(c) for p, c in (coords or {}).items() if c != 0}

    @classmethod
    def log_of(cls, n: int) -> "LogVector":
        """log n as sum of v_p(n) log p."""
        return cls({p: e for p, e in factorize(n)})

    @classmethod
    def von_mangoldt(cls, n: int) -> "LogVector":
        fac = factorize(n) if n > 1 else []
        if len(fac) == 1:
            return cls({fac[0][0]: 1})
        return cls()

    def __add__(self, other):
        out = dict(self.coords)
        for p, c in other.coords.items():
            out[p] = out.get(p, Fraction(0)) + c
        return LogVector(out)

    def __sub__(self, other):
        out = dict(self.coords)
        for p, c in other.coords.items():
            out[p] = out.get(p, Fraction(0)) - c
        return LogVector(out)

    def __mul__(self, scalar):
        return LogVector({p: c * scalar for p, c in self.coords.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return self.coords == other.coords

    def __hash__(self):
        return hash(frozenset(self.coords.items()))

    def is_zero(self) -> bool:
        return not self.coords

    def to_float(self) -> float:
        return sum(float(c) * math.log(p) for p, c in self.coords.items())

    def __repr__(self):
        if not self.coords:
            return "LogVector(0)"
        terms = " + ".join(f"{c}*log{p}" for p, c in sorted(self.coords.items()))
        return f"LogVector({terms})"


def _divisors(n: int):
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def vaughan_decompose(n: int, z: int):
    """The three Vaughan terms and their total, all exact LogVectors.

    term1 = sum_{d|n, d<=z} mu(d) log(n/d)
    term2 = sum_{dc|n, d,c<=z} mu(d) Lambda(c)
    term3 = sum_{dc|n, d>z, c>z} mu(d) Lambda(c)
    total = term1 - term2 + term3, which must equal Lambda(n) exactly.
    """
    if not n > z >= 1:
        raise PreconditionError(f"need n > z >= 1, got n={n}, z={z}")
    term1 = LogVector()
    term2 = LogVector()
    term3 = LogVector()
    for d in _divisors(n):
        mud = mobius(d)
        if mud == 0:
            continue
        if d <= z:
            term1 = term1 + mud * (LogVector.log_of(n) - LogVector.log_of(d))
        for c in _divisors(n // d):
            lam = LogVector.von_mangoldt(c)
            if lam.is_zero():
                continue
            if d <= z and c <= z:
                term2 = term2 + mud * lam
            elif d > z and c > z:
                term3 = term3 + mud * lam
    total = term1 - term2 + term3
    if total != LogVector.von_mangoldt(n):
        raise IntegrityError(f"Vaughan identity failed at n={n}, z={z}")
    return term1, term2, term3, total


def _ordered_factorization_counts(n: int, z: int, kmax: int):
    """d*_{k,z}(n) for k = 0..kmax: ordered factorizations into parts > 1
    whose prime factors all exceed z."""
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def admissible(m):
        return all(p > z for p, _ in factorize(m))

    @lru_cache(maxsize=None)
    def count(m, k):
        if k == 0:
            return 1 if m == 1 else 0
        if m == 1:
            return 0
        return sum(count(m // d, k - 1) for d in _divisors(m) if d > 1 and admissible(d))

    return [count(n, k) for k in range(kmax + 1)]


def linnik_check(n: int, z: int):
    """(lhs, rhs) of Linnik's identity as exact Fractions.

    lhs = -sum_k (-1)^k / k * d*_{k,z}(n); rhs = 1/a when n = p^a with p > z,
    else 0.  (The prime-power side requires the prime itself to exceed the
    sifting level, matching the generating-function identity.)
    """
    if n < 2 or z < 1:
        raise PreconditionError("need n >= 2 and z >= 1")
    kmax = sum(e for _, e in factorize(n))
    counts = _ordered_factorization_counts(n, z, kmax)
    lhs = -sum(Fraction((-1) ** k, k) * counts[k] for k in range(1, kmax + 1))
    fac = factorize(n)
    rhs = Fraction(1, fac[0][1]) if len(fac) == 1 and fac[0][0] > z else Fraction(0)
    return lhs, rhs


def _dirichlet_convolve_int(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Integer Dirichlet convolution of arrays indexed 1..N (index 0 unused)."""
    N = len(a) - 1
    out = np.zeros(N + 1, dtype=object)
    for d in range(1, N + 1):
        if a[d] == 0:
            continue
        ad = a[d]
        for m in range(d, N + 1, d):
            out[m] += ad * b[m // d]
    return out


def heathbrown_coeff_check(k: int, z: int, N: int) -> float:
    """Worst defect of the k-fold Heath-Brown decomposition on 1..N.

    With z^k >= N the remainder coefficients vanish on [1, N], so
    Lambda(n) = sum_{j<=k} (-1)^{j-1} C(k,j) (log * 1^{*(j-1)} * mu_z^{*j})(n)
    exactly.  The integer convolutions are exact; the log factor is compared
    coordinatewise per prime, so the returned defect is 0.0 unless the
    identity (or this implementation) is broken.
    """
    if k < 1:
        raise PreconditionError("k must be >= 1")
    if z**k < N:
        raise PreconditionError(f"need z^k >= N, got {z}^{k} < {N}")
    one = np.ones(N + 1, dtype=object)
    one[0] = 0
    mu = mobius_upto(N).astype(object)
    mu_z = np.where(np.arange(N + 1) <= z, mu, 0)

    weight = np.zeros(N + 1, dtype=object)  # sum_j (-1)^{j-1} C(k,j) 1^{*(j-1)} * mu_z^{*j}
    for j in range(1, k + 1):
        conv = mu_z.copy()
        for _ in range(j - 1):
            conv = _dirichlet_convolve_int(conv, mu_z)
        for _ in range(j - 1):
            conv = _dirichlet_convolve_int(conv, one)
        sign = 1 if (j - 1) % 2 == 0 else -1
        weight += sign * math.comb(k, j) * conv

    # candidate(n) = sum_{d|n} weight(n/d) * logvec(d); its coordinate at p is
    # sum_{a >= 1} (weight * 1)(n / p^a)
    weight_one = _dirichlet_convolve_int(weight, one)
    worst = Fraction(0)
    primes = simple_sieve(N)
    for p in primes:
        p = int(p)
        coord = np.zeros(N + 1, dtype=object)
        pa = p
        while pa <= N:
            for m in range(pa, N + 1, pa):
                coord[m] += weight_one[m // pa]
            pa *= p
        # Lambda(n) coordinate: 1 at n = p^a
        pa = p
        while pa <= N:
            coord[pa] -= 1
            pa *= p
        nz = np.nonzero(coord[1:])[0]
        if len(nz):
            worst = max(worst, max(abs(Fraction(coord[i + 1])) for i in nz))
    return float(worst)


def _least_prime_factor_window(lo: int, hi: int) -> np.ndarray:
    """lpf(n) for n in [lo, hi]; lpf(1) = 0 sentinel meaning 'no prime factor'."""
    n = hi - lo + 1
    lpf = np.zeros(n, dtype=np.int64)
    for p in simple_sieve(math.isqrt(hi)):
        p = int(p)
        start = ((lo + p - 1) // p) * p
        idx = np.arange(start - lo, n, p)
        sel = idx[lpf[idx] == 0]
        lpf[sel] = p
    rest = np.flatnonzero(lpf == 0) + lo
    lpf[rest - lo] = rest  # primes > sqrt(hi) and the number 1 (lpf 1 below)
    if lo <= 1 <= hi:
        lpf[1 - lo] = 0
    return lpf


def _sieved_count(lo: int, hi: int, z: int) -> int:
    """#{n in [lo, hi] : p | n => p >= z}; n = 1 counts (vacuous condition)."""
    if hi < lo:
        return 0
    lpf = _least_prime_factor_window(lo, hi)
    return int(np.count_nonzero((lpf >= z) | (lpf == 0)))


def buchstab_check(n_range, w: int, z: int):
    """(lhs, rhs) of Buchstab's identity S(A,z) = S(A,w) - sum_{w<=p<z} S(A_p,p).

    A is the integer window [lo, hi]; counts are exact enumerations.
    """
    lo, hi = map(int, n_range)
    if not 2 <= w <= z:
        raise PreconditionError(f"need 2 <= w <= z, got w={w}, z={z}")
    lhs = _sieved_count(lo, hi, z)
    rhs = _sieved_count(lo, hi, w)
    for p in simple_sieve(z - 1):
        p = int(p)
        if p < w:
            continue
        # S(A_p, p) counts m with p*m in A and q | m => q >= p
        mlo = (lo + p - 1) // p
        mhi = hi // p
        rhs -= _sieved_count(mlo, mhi, p)
    return lhs, rhs


def combi_partition(a, eta: float):
    """Partition {0..k-1} into I, J, K with |sum_I - sum_J| <= 1/3 - eta and
    sum_K <= 5/9 - 2*eta, by exhaustive search.

    Returns (I, J, K) as sorted tuples.  Raises PreconditionError when the
    hypotheses fail and IntegrityError when no partition exists on valid
    input (which would contradict the lemma).
    """
    a = [float(x) for x in a]
    k = len(a)
    if k < 4:
        raise PreconditionError("need k >= 4 parts")
    if not 0 < eta < 1e-5:
        raise PreconditionError("need eta in (0, 1e-5)")
    if abs(sum(a) - 1.0) > 1e-9:
        raise PreconditionError("parts must sum to 1")
    for i, x in enumerate(a[:-1]):
        if not 0 < x < 1 / 3 - 100 * eta:
            raise PreconditionError(f"a[{i}] = {x} outside (0, 1/3 - 100*eta)")
    if not 0 < a[-1] < 1 / 3 + 100 * eta:
        raise PreconditionError(f"a[{k - 1}] = {a[-1]} outside (0, 1/3 + 100*eta)")
    if k > 20:
        raise ResourceError("exhaustive search capped at k = 20")

    idx = range(k)
    for ksize in range(1, k - 1):
        for K in itertools.combinations(idx, ksize):
            sK = sum(a[i] for i in K)
            if sK > 5 / 9 - 2 * eta:
                continue
            rest = [i for i in idx if i not in K]
            for isize in range(1, len(rest)):
                for I in itertools.combinations(rest, isize):
                    J = tuple(i for i in rest if i not in I)
                    sI = sum(a[i] for i in I)
                    sJ = sum(a[i] for i in J)
                    if abs(sI - sJ) <= 1 / 3 - eta:
                        return tuple(I), J, K
    raise IntegrityError("no valid partition found: contradicts the partition lemma")
