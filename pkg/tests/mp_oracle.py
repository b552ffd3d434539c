"""Arbitrary-precision bisection used to produce the frozen constants in the tests.

Independent of the package: plain bisection on the defining equations at 50 digits.
"""

import mpmath as mp

mp.mp.dps = 50


def bisect(fn, lo, hi, n=300):
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    flo = fn(lo)
    for _ in range(n):
        mid = (lo + hi) / 2
        fm = fn(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


def beta(M):
    return bisect(lambda x: (1 + M * x) * mp.exp(-x) - 1, mp.mpf("0.5"), 20)


def gamma(M, K, N):
    b = beta(M)
    c = (K - 1) * b / (N * (N - (K - 2) * b))
    return bisect(lambda x: M * x * (1 - c * x) / mp.expm1(x) - 1, mp.mpf("1e-9"), 1 / c - mp.mpf("1e-12"))
