"""Discretization grids for chaos sampling.

A grid covers (x_left, horizon] with a uniform core around the origin
plus a geometric far-field extension to the left.  The far field matters:
each kernel factor decays like |x|^g with g in (-1,-1/2), so the variance
mass below -X vanishes only like X^(1+g_i+g_j), painfully slowly near the
boundary faces.  The closed-form tail estimator quantifies that and sizes
the window; where the required window exceeds what float64 can express
the grid caps out and records the achieved estimate instead.

The s-rule is the fixed quadrature in the time variable used to factorize
kernels over the grid (composite Gauss-Legendre).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .errors import GridTooSmallError, InvalidInputError
from .kernel import KernelSpec
from .special import log_beta

__all__ = [
    "GridSpec",
    "s_rule",
    "tail_fraction",
    "required_window",
    "build_grid",
    "check_tail_bound",
]

FAR_CAP = 1e250


@dataclass(eq=False)
class GridSpec:
    """Cell edges plus the s-quadrature rule and tail bookkeeping."""

    edges: np.ndarray
    core_left: float
    mesh: float
    horizon: float
    s_nodes: np.ndarray
    s_weights: np.ndarray
    s_panels: int
    s_order: int
    tail_tolerance: float
    tail_estimate: float
    enforce_tail_bound: bool = False
    ratio: float = 1.0
    fine_left: float = 0.0
    fine_ratio: int = 1

    @property
    def n_cells(self) -> int:
        return len(self.edges) - 1

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def far_left(self) -> float:
        return -float(self.edges[0])

    def to_dict(self) -> dict:
        return {
            "core_left": self.core_left,
            "mesh": self.mesh,
            "horizon": self.horizon,
            "n_cells": self.n_cells,
            "far_left": self.far_left,
            "ratio": self.ratio,
            "fine_left": self.fine_left,
            "fine_ratio": self.fine_ratio,
            "s_panels": self.s_panels,
            "s_order": self.s_order,
            "tail_tolerance": self.tail_tolerance,
            "tail_estimate": self.tail_estimate,
            "enforce_tail_bound": self.enforce_tail_bound,
        }


def s_rule(a: float, b: float, panels: int, order: int):
    """Composite Gauss-Legendre nodes/weights on [a, b]."""
    if not b > a:
        raise InvalidInputError(f"empty s-interval [{a}, {b}]")
    xi, wi = sp.roots_legendre(order)
    edges = np.linspace(a, b, panels + 1)
    mid = (edges[:-1] + edges[1:]) / 2.0
    half = (edges[1:] - edges[:-1]) / 2.0
    nodes = (mid[:, None] + half[:, None] * xi[None, :]).ravel()
    weights = (half[:, None] * wi[None, :]).ravel()
    return nodes, weights


def _pair_term(g: tuple, sigma, skip: int | None):
    """log of prod_{j != skip} B(g_j+1, -g_j-g_sigma(j)-1) and the exponent sum."""
    logs = 0.0
    alpha = 0.0
    for j in range(len(g)):
        if j == skip:
            continue
        logs += log_beta(g[j] + 1.0, -g[j] - g[sigma[j]] - 1.0)
        alpha += 1.0 + g[j] + g[sigma[j]]
    return logs, alpha


def tail_fraction(gamma, window: float, horizon: float = 1.0) -> float:
    """Estimated fraction of the process variance carried by kernel mass
    with any coordinate below -window.

    Built from the same permutation-sum reduction as the normalizing
    constant: dropping coordinate i replaces its cross integral by the
    analytic tail integral window^(1+g_i+g_sigma(i)) / |1+g_i+g_sigma(i)|.
    Union bound over coordinates; accurate for window >> horizon.
    """
    g = tuple(float(v) for v in gamma)
    q = len(g)
    t = float(horizon)
    if window <= t:
        return 1.0
    total = 0.0
    tail = 0.0
    for sigma in itertools.permutations(range(q)):
        inv = tuple(sigma.index(j) for j in range(q))
        log_c, alpha = _pair_term(g, sigma, None)
        # both orientations of the double integral carry the same exponent
        log_cm, _ = _pair_term(g, inv, None)
        full = (math.exp(log_c) + math.exp(log_cm)) / ((alpha + 1.0) * (alpha + 2.0))
        total += full * t ** (alpha + 2.0)
        for i in range(q):
            a_i = 1.0 + g[i] + g[sigma[i]]
            tail_i = window**a_i / (-a_i)
            log_rest, alpha_rest = _pair_term(g, sigma, i)
            log_rest_m, _ = _pair_term(g, inv, sigma[i])
            rest = (math.exp(log_rest) + math.exp(log_rest_m)) / (
                (alpha_rest + 1.0) * (alpha_rest + 2.0)
            )
            tail += tail_i * rest * t ** (alpha_rest + 2.0)
    return min(tail / total, 1.0)


def required_window(gamma, tolerance: float, horizon: float = 1.0, cap: float = FAR_CAP) -> float:
    """Smallest window with estimated tail fraction <= tolerance.

    Returns inf when even the cap misses the tolerance (near-face
    exponents make the requirement leave the float64 range).
    """
    if not 0 < tolerance < 1:
        raise InvalidInputError(f"tolerance must be in (0,1), got {tolerance}")
    if tail_fraction(gamma, cap, horizon) > tolerance:
        return math.inf
    lo, hi = math.log(max(horizon, 1e-6)), math.log(cap)
    for _ in range(200):  # log-window bisection; fraction is monotone
        mid = (lo + hi) / 2.0
        if tail_fraction(gamma, math.exp(mid), horizon) > tolerance:
            lo = mid
        else:
            hi = mid
    return math.exp(hi)


def build_grid(
    kernel: KernelSpec,
    n_core: int | None = None,
    core_left: float = 8.0,
    fine_left: float | None = None,
    fine_ratio: int | None = None,
    tail_tolerance: float = 1e-3,
    ratio: float | None = None,
    far_cap: float = FAR_CAP,
    s_panels: int | None = None,
    s_order: int = 4,
    enforce_tail_bound: bool = False,
) -> GridSpec:
    """Size a grid for the kernel: zoned uniform core, geometric far field.

    The variance the discretization misses sits in the near-diagonal
    strip |x_i - x_j| < mesh, and that strip's mass density falls off
    fast away from the time interval.  So the core uses a fine mesh on
    [-fine_left, horizon] and a mesh coarser by `fine_ratio` on the rest;
    0 falls exactly on an edge (increments over [0,t] then aggregate
    whole cells).  The far field extends leftward with widths growing by
    `ratio` until the tail estimate meets the tolerance or the window
    hits `far_cap`.
    """
    q = kernel.q
    if n_core is None:
        n_core = 1024 if q >= 3 else 4096
    if ratio is None:
        ratio = 1.06 if q <= 2 else 1.12
    if fine_ratio is None:
        fine_ratio = 1
    if fine_left is None:
        fine_left = 1.0
    if n_core < 8 * q:
        raise InvalidInputError(f"n_core={n_core} too small for order {q}")
    if not ratio > 1.0:
        raise InvalidInputError("far-field ratio must exceed 1")
    if not (isinstance(fine_ratio, (int, np.integer)) and fine_ratio >= 1):
        raise InvalidInputError(f"fine_ratio must be a positive integer, got {fine_ratio!r}")
    if s_panels is None:
        s_panels = 48
    t = kernel.horizon
    if not 0 < fine_left < core_left:
        raise InvalidInputError("need 0 < fine_left < core_left")

    # zoned uniform core with 0 and -fine_left snapped onto edges
    fine_span = fine_left + t
    coarse_span = core_left - fine_left
    h = (fine_span + coarse_span / fine_ratio) / n_core
    n_right = max(1, round(t / h))
    n_mid = max(1, round(fine_left / h))
    n_coarse = max(1, round(coarse_span / (fine_ratio * h)))
    right = np.linspace(0.0, t, n_right + 1)
    mid = np.linspace(-fine_left, 0.0, n_mid + 1)
    coarse = np.linspace(-core_left, -fine_left, n_coarse + 1)
    core_edges = np.concatenate([coarse[:-1], mid[:-1], right])
    h_coarse = coarse_span / n_coarse

    window = required_window(kernel.gamma.entries, tail_tolerance, horizon=t, cap=far_cap)
    target = min(max(window, core_left), far_cap)
    far = []
    x = -core_left
    w = h_coarse
    while -x < target:
        w *= ratio
        x -= w
        far.append(x)
    edges = np.concatenate([np.array(far[::-1]), core_edges]) if far else core_edges

    return GridSpec(
        edges=edges,
        core_left=core_left,
        mesh=h,
        horizon=t,
        s_nodes=s_rule(0.0, t, s_panels, s_order)[0],
        s_weights=s_rule(0.0, t, s_panels, s_order)[1],
        s_panels=s_panels,
        s_order=s_order,
        tail_tolerance=tail_tolerance,
        tail_estimate=tail_fraction(kernel.gamma.entries, -float(edges[0]), horizon=t),
        enforce_tail_bound=enforce_tail_bound,
        ratio=ratio,
        fine_left=fine_left,
        fine_ratio=int(fine_ratio),
    )


def check_tail_bound(grid: GridSpec, kernel: KernelSpec) -> None:
    """Raise when an enforcing grid misses its own tail tolerance."""
    if not grid.enforce_tail_bound:
        return
    if grid.tail_estimate > grid.tail_tolerance:
        need = required_window(kernel.gamma.entries, grid.tail_tolerance, horizon=kernel.horizon)
        raise GridTooSmallError(
            f"tail estimate {grid.tail_estimate:.3e} exceeds tolerance "
            f"{grid.tail_tolerance:.3e}; window must reach {need:.6g} "
            f"(current {grid.far_left:.6g})",
            required_window=need,
        )
