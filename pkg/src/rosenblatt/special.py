"""Beta-function utilities and the closed-form cross integral.

The whole package leans on one analytic fact: for exponents g1, g2 in
(-1, -1/2) and s1 != s2,

    int_{-inf}^{min(s1,s2)} (s1-x)^g1 (s2-x)^g2 dx
        = (s2-s1)_+^(1+g1+g2) B(1+g1, -1-g1-g2)
        + (s1-s2)_+^(1+g1+g2) B(1+g2, -1-g1-g2).

Exactly one summand is nonzero.  Everything here is computed through
log-Gamma so that near-boundary exponents (second Beta argument down to
1e-6 and below) do not overflow.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import special as sp

from .errors import DivergentIntegralError, DomainError, InvalidInputError

__all__ = [
    "beta",
    "log_beta",
    "cross_integral",
    "beta_small_alpha_probe",
]


def log_beta(a: float, b: float) -> float:
    """log B(a,b) for strictly positive arguments."""
    if not (a > 0 and b > 0):
        raise DomainError(f"beta arguments must be positive, got ({a}, {b})")
    return float(sp.betaln(a, b))


def beta(a: float, b: float) -> float:
    """B(a,b) = Gamma(a)Gamma(b)/Gamma(a+b), positive arguments only."""
    return math.exp(log_beta(a, b))


def _check_exponent(g: float, name: str) -> None:
    if not (-1.0 < g < -0.5):
        raise DomainError(f"exponent {name}={g} outside the open interval (-1, -1/2)")


def cross_integral(s1: float, s2: float, g1: float, g2: float) -> float:
    """Closed form of int (s1-x)_+^g1 (s2-x)_+^g2 dx over the real line.

    Requires s1 != s2; at equal arguments the integrand behaves like
    (s-x)^(g1+g2) with g1+g2 < -1 near the upper limit and the integral
    diverges.
    """
    _check_exponent(g1, "g1")
    _check_exponent(g2, "g2")
    if s1 == s2:
        raise DivergentIntegralError(
            f"cross integral diverges at s1 = s2 = {s1} (exponent sum {g1 + g2} <= -1)",
            exponents={"g1+g2": g1 + g2},
        )
    power = 1.0 + g1 + g2
    if s2 > s1:
        return (s2 - s1) ** power * beta(1.0 + g1, -1.0 - g1 - g2)
    return (s1 - s2) ** power * beta(1.0 + g2, -1.0 - g1 - g2)


def beta_small_alpha_probe(
    beta_range: tuple[float, float],
    alphas,
    grid_size: int = 97,
) -> list[dict]:
    """Tabulate sup over beta in [b0,b1] of |alpha*B(alpha,beta) - 1|.

    alpha*B(alpha,beta) -> 1 as alpha -> 0, uniformly on compact beta
    ranges; the table lets a caller watch the deviation shrink.  Rows come
    back in the order of `alphas` (expected decreasing).
    """
    alphas = list(alphas)
    if not alphas:
        raise InvalidInputError("alphas must be a nonempty list")
    b0, b1 = beta_range
    if not (0 < b0 < b1):
        raise InvalidInputError(f"need 0 < b0 < b1, got ({b0}, {b1})")
    if any(a <= 0 for a in alphas):
        raise InvalidInputError("alphas must be strictly positive")
    if any(x <= y for x, y in zip(alphas, alphas[1:])):
        raise InvalidInputError("alphas must be strictly decreasing")

    betas = np.linspace(b0, b1, grid_size)
    rows = []
    for a in alphas:
        vals = a * np.exp(sp.betaln(a, betas))
        rows.append({"alpha": float(a), "sup_deviation": float(np.max(np.abs(vals - 1.0)))})
    return rows
