"""Closed-form rate and error bounds."""

from __future__ import annotations

import math

from ..errors import ParameterError


def rand_bound(n: int, k: int, m: int) -> float:
    """Error of a random linear ``[n, k]`` code on a flat source of entropy ``m``: ``2^-(n-k-m)``."""
    gap = n - k - m
    if gap < 0:
        raise ParameterError(f"n - k - m = {gap} < 0")
    return 2.0**-gap


def converse_max_rate(n: int, m: float, eps: float) -> float:
    """Largest rate at which any code can correct a flat entropy-``m`` source with error ``eps``.

    ``1 - m/n + log2(1/(1-eps))/n``.
    """
    if not 0 <= eps < 1:
        raise ParameterError(f"need 0 <= eps < 1, got {eps}")
    return 1 - m / n + math.log2(1 / (1 - eps)) / n


def converse_holds(n: int, k: int, m: float, eps_upper: float) -> bool:
    """``k/n <= converse_max_rate(n, m, eps_upper)``; vacuously true when ``eps_upper >= 1``."""
    if eps_upper >= 1:
        return True
    return k / n <= converse_max_rate(n, m, eps_upper) + 1e-12


def hash_failure_bound(n: int, c: int) -> float:
    """``3 / n^c``."""
    return 3 / n**c


def distinguisher_floor(eps: float, k: int) -> float:
    """Expected advantage ``(1 - eps) - 2^-k`` of the decoder-based distinguisher."""
    return (1 - eps) - 2.0**-k
