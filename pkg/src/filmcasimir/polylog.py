"""Trilogarithm Li_3 on the real interval [-1, 1]."""
from fractions import Fraction
from functools import lru_cache
import math

from .constants import ZETA2, ZETA3


@lru_cache(maxsize=None)
def _bernoulli(n_max):
    # B_1 = -1/2 convention
    B = [Fraction(0)] * (n_max + 1)
    B[0] = Fraction(1)
    for m in range(1, n_max + 1):
        B[m] = -sum(math.comb(m + 1, j) * B[j] for j in range(m)) / (m + 1)
    return tuple(B)


@lru_cache(maxsize=None)
def _zeta_nonpositive(n):
    """zeta(-n) for integer n >= 0."""
    if n == 0:
        return -0.5
    B = _bernoulli(n + 1)
    return float((-1) ** n * B[n + 1] / (n + 1))


def _li3_series(z):
    total = 0.0
    zk = z
    k = 1
    while True:
        term = zk / (k * k * k)
        total += term
        if abs(term) < 1e-18 * max(abs(total), 1e-300):
            return total
        k += 1
        zk *= z


def _li3_near_one(z):
    # expansion in mu = ln z around z = 1, converges for |mu| < 2 pi
    mu = math.log(z)
    if mu == 0.0:
        return ZETA3
    total = ZETA3 + ZETA2 * mu + 0.5 * mu * mu * (1.5 - math.log(-mu))
    fact = 2.0
    mu_k = mu * mu
    for k in range(3, 40):
        fact *= k
        mu_k *= mu
        c = _zeta_nonpositive(k - 3)
        if c == 0.0:
            continue
        term = c * mu_k / fact
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
    return total


def li3(z):
    """Trilogarithm sum_k z^k / k^3 for real -1 <= z <= 1."""
    z = float(z)
    if not -1.0 <= z <= 1.0:
        raise ValueError(f"li3 is implemented for -1 <= z <= 1, got {z}")
    if abs(z) <= 0.5:
        return _li3_series(z)
    if z > 0:
        return _li3_near_one(z)
    # duplication: Li3(z) + Li3(-z) = Li3(z^2) / 4
    return 0.25 * li3(z * z) - _li3_near_one(-z)


def li3_series_truncated(z, terms):
    """Partial sum of the power series, used for the small-|z| expansion checks."""
    return sum(z ** k / k ** 3 for k in range(1, terms + 1))
