"""One-dimensional maximization used by every best-response computation."""

from __future__ import annotations

import math
from typing import Callable

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0  # 1/phi^2


def golden_section_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> tuple[float, float, float]:
    """Golden-section search for the maximizer of a unimodal ``f`` on [lo, hi].

    Returns ``(x_best, lo, hi)`` where ``[lo, hi]`` is the final bracket and
    ``x_best`` the best point evaluated, endpoints included.
    """
    a, b = min(lo, hi), max(lo, hi)
    fa, fb = f(a), f(b)
    h = b - a
    c = a + INV_PHI2 * h
    d = a + INV_PHI * h
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if h <= tol:
            break
        if fc >= fd:
            b, fb = d, fd
            d, fd = c, fc
            h = INV_PHI * h
            c = a + INV_PHI2 * h
            fc = f(c)
        else:
            a, fa = c, fc
            c, fc = d, fd
            h = INV_PHI * h
            d = a + INV_PHI * h
            fd = f(d)
    candidates = [(fa, a), (fc, c), (fd, d), (fb, b)]
    best = max(candidates, key=lambda pair: pair[0])[1]
    return best, a, b


def bisect_decreasing_root(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-14,
    max_iter: int = 200,
) -> float:
    """Root of a nonincreasing ``g`` on [lo, hi], clipped to the interval ends."""
    if g(lo) <= 0.0:
        return lo
    if g(hi) >= 0.0:
        return hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= tol * max(1.0, abs(mid)):
            break
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def maximize_concave(
    f: Callable[[float], float],
    df: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
) -> float:
    """Maximize a concave ``f`` on [lo, hi].

    Golden-section search brackets the maximizer; function-value comparisons
    stall near ``sqrt(eps)`` relative resolution, so the bracket is then
    widened slightly and refined by bisection on the sign of ``df``.
    """
    x, a, b = golden_section_max(f, lo, hi, tol=max(tol, 1e-12 * max(1.0, hi - lo)))
    width = max(b - a, 1e-6 * max(1.0, hi - lo))
    left, right = max(lo, a - width), min(hi, b + width)
    # noisy comparisons can push the bracket slightly off the optimum; widen until it straddles
    while left > lo and df(left) < 0.0:
        width *= 4.0
        left = max(lo, a - width)
    while right < hi and df(right) > 0.0:
        width *= 4.0
        right = min(hi, b + width)
    refined = bisect_decreasing_root(df, left, right)
    fx = f(x)
    # the derivative root is exact; only reject it if f disagrees beyond rounding
    slack = 64 * 2.220446049250313e-16 * max(1.0, abs(fx))
    return refined if f(refined) >= fx - slack else x
