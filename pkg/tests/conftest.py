"""Independent reference evaluations used to freeze expected values.

These go through mpmath and explicit enumeration rather than the package's
recurrences, so agreement is a real cross-check.
"""
from itertools import combinations
from math import comb

import mpmath
import numpy as np
import pytest

mpmath.mp.dps = 40


def brute_esym(values, k):
    return mpmath.fsum(mpmath.fprod(mpmath.mpf(v) for v in c) for c in combinations(values, k))


def oracle_coherence_k(populations, k):
    d = len(populations)
    s = brute_esym(populations, k)
    return float(d * mpmath.root(s / comb(d, k), k))


def oracle_l1(amplitudes):
    a = [mpmath.mpf(abs(complex(x))) for x in amplitudes]
    return float(2 * mpmath.fsum(a[i] * a[j] for i, j in combinations(range(len(a)), 2)))


def oracle_entanglement_k(schmidt, k):
    # same normalized-root shape as the coherence family, over Schmidt weights
    return oracle_coherence_k(schmidt, k)


def oracle_minor_sum(m, k):
    # sum of |k x k minors|^2 of the coefficient matrix equals S_k of its Schmidt weights
    m = mpmath.matrix(np.asarray(m).tolist())
    total = mpmath.mpf(0)
    for rows in combinations(range(m.rows), k):
        for cols in combinations(range(m.cols), k):
            sub = mpmath.matrix([[m[r, c] for c in cols] for r in rows])
            total += abs(mpmath.det(sub)) ** 2
    return total


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
