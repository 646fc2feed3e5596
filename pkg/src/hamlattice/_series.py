"""Inner summation kernel for the nonlocal-operator coefficient series.

The series terms decay only like 1/k^2, so reaching a relative term cutoff
of 1e-12 takes tens of millions of terms per coefficient; the loop is jitted
to keep that affordable.
"""

from math import exp, lgamma, log

import numpy as np
from numba import njit

_ITERATION_CAP = 2_000_000_000


@njit(cache=True)
def _sum_positive_series(p, t0, tol, cap):
    """Partial-sum the positive term series for coefficient index p.

    Starts from the k = p term t0 and applies the term-to-term ratio
    recurrence until term < tol * partial_sum.  Returns (sum, k_stop);
    a negative sum signals that the cap was hit.
    """
    s = t0
    t = t0
    k = p
    while k < cap:
        r = (2.0 * k + 1.0) ** 2 / (4.0 * (k + 1.0 - p) * (k + 2.0 + p))
        t = t * r
        k += 1
        s = s + t
        if t < tol * s:
            return s, k
    return -1.0, k


def first_term(p: int) -> float:
    """Leading (k = p) term of the positive series, evaluated in log space."""
    if p == 0:
        return 1.0
    # (2p-1)!! = (2p)! / (2^p p!)
    log_dfact = lgamma(2 * p + 1) - p * log(2.0) - lgamma(p + 1)
    return exp(2 * log_dfact - p * log(4.0) - lgamma(2 * p + 1) - log(2 * p + 1.0))


def sum_coefficient_series(p: int, tol: float):
    """Absolute value of the p-th series coefficient plus its stop index."""
    s, k_stop = _sum_positive_series(p, first_term(p), tol, _ITERATION_CAP)
    if s < 0:
        raise RuntimeError(
            f"coefficient series for p={p} did not converge within "
            f"{_ITERATION_CAP} terms; the series is provably convergent, "
            "so this indicates a bug"
        )
    return float(s), int(k_stop)


def tail_bound(p: int, k_stop: int) -> float:
    """Upper bound on the neglected tail, sum_{k > k_stop} 1/(pi k (k+1+p)) e^(1/12k)."""
    # sum 1/(k(k+c)) = (1/c) * (psi(K+c) - psi(K)); use the log approximation
    c = p + 1.0
    return float(
        exp(1.0 / (12.0 * k_stop))
        / (np.pi * c)
        * np.log((k_stop + c) / k_stop)
    )
