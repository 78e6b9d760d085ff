"""Kernel evaluation and the exact normalizing constant.

The order-q kernel is

    f(x_1..x_q) = A * int_0^t prod_i (s - x_i)_+^{g_i} ds,

with A chosen so that the order-q integral of f has unit variance at
t = 1.  The square of A has a closed form: a ratio of polynomial factors
in the exponent sum against a permutation sum of Beta products,

    A^2 = (2*gb + q + 1)(2*gb + q + 2)
          / (2 * sum_sigma prod_j B(g_j + 1, -g_j - g_sigma(j) - 1)),

gb being the exponent sum.  The permutation sum caps the order at 6.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy import special as sp

from .domain import GammaVector, validate
from .errors import DomainError, InvalidInputError, SizeError
from .special import log_beta

__all__ = [
    "MAX_ORDER",
    "KernelSpec",
    "ScalingMap",
    "normalizing_constant",
    "normalizing_constant_sq",
    "eval_kernel",
    "constant_face_ratio",
    "scaling_map",
]

MAX_ORDER = 6


def _as_gamma(gamma) -> GammaVector:
    if isinstance(gamma, GammaVector):
        return gamma
    return GammaVector(tuple(gamma))


def normalizing_constant_sq(gamma) -> float:
    """A^2 from the closed form; requires the vector strictly inside the region."""
    gamma = _as_gamma(gamma)
    if gamma.q > MAX_ORDER:
        raise SizeError(
            f"order {gamma.q} exceeds the cap {MAX_ORDER} (permutation sum grows as q!)"
        )
    report = validate(gamma)
    if not report.inside:
        raise DomainError(
            "normalizing constant needs a strictly admissible vector: "
            + "; ".join(report.violations)
        )
    g = gamma.entries
    q = gamma.q
    gb = gamma.gamma_bar
    denom = 0.0
    for sigma in itertools.permutations(range(q)):
        denom += math.exp(
            sum(log_beta(g[j] + 1.0, -g[j] - g[sigma[j]] - 1.0) for j in range(q))
        )
    return (2.0 * gb + q + 1.0) * (2.0 * gb + q + 2.0) / (2.0 * denom)


def normalizing_constant(gamma) -> float:
    return math.sqrt(normalizing_constant_sq(gamma))


@dataclass(frozen=True)
class KernelSpec:
    """Immutable (gamma, horizon) pair with the cached constant."""

    gamma: GammaVector
    horizon: float = 1.0
    constant: float | None = None

    def __post_init__(self):
        gamma = _as_gamma(self.gamma)
        object.__setattr__(self, "gamma", gamma)
        if not (isinstance(self.horizon, (int, float)) and self.horizon > 0):
            raise InvalidInputError(f"horizon must be positive, got {self.horizon}")
        object.__setattr__(self, "horizon", float(self.horizon))
        if self.constant is None:
            object.__setattr__(self, "constant", normalizing_constant(gamma))

    @property
    def q(self) -> int:
        return self.gamma.q

    def to_dict(self) -> dict:
        return {"gamma": list(self.gamma.entries), "t": self.horizon, "A": self.constant}

    @classmethod
    def from_dict(cls, data: dict) -> "KernelSpec":
        return cls(GammaVector(tuple(data["gamma"])), data["t"], data.get("A"))


def _graded_rule(s0: float, t: float, g_sing: float, n_first: int, gl_order: int, octaves: int):
    """Nodes and weights for int_{s0}^t F(s) (s-s0)^g_sing ds.

    First panel carries the power weight through a Gauss-Jacobi rule; the
    rest of the range is covered by doubling panels with Gauss-Legendre,
    the weight evaluated explicitly.  Caller evaluates only F at the nodes.
    """
    span = t - s0
    delta = span * 2.0 ** (-octaves)
    xi, wi = sp.roots_jacobi(n_first, 0.0, g_sing)
    nodes = [s0 + delta * (xi + 1.0) / 2.0]
    weights = [wi * (delta / 2.0) ** (1.0 + g_sing)]
    xl, wl = sp.roots_legendre(gl_order)
    for k in range(octaves):
        a = s0 + delta * 2.0**k
        b = s0 + delta * 2.0 ** (k + 1)
        mid, half = (a + b) / 2.0, (b - a) / 2.0
        s = mid + half * xl
        nodes.append(s)
        weights.append(wl * half * (s - s0) ** g_sing)
    return np.concatenate(nodes), np.concatenate(weights)


def _s_integral(gammas, x, t: float, rule: str, n_first: int, gl_order: int, octaves: int) -> float:
    """int_0^t prod_i (s - x_i)_+^{g_i} ds without the constant."""
    x = np.asarray(x, dtype=float)
    s0 = max(0.0, float(np.max(x)))
    if s0 >= t:
        return 0.0
    xmax = float(np.max(x))
    tied = (x == xmax) if xmax >= 0.0 else np.zeros(len(x), dtype=bool)
    g_sing = float(np.sum(np.asarray(gammas)[tied])) if tied.any() else 0.0
    if g_sing <= -1.0:
        # two or more coordinates tie at the lower integration limit and
        # their combined exponent makes the integral blow up
        return math.inf
    free = [(g, xi) for g, xi, is_tied in zip(gammas, x, tied) if not is_tied]

    if rule == "fixed":
        nodes, weights = _graded_rule(s0, t, g_sing, n_first, gl_order, octaves)
        vals = np.ones_like(nodes)
        for g, xi in free:
            vals *= (nodes - xi) ** g
        return float(np.dot(weights, vals))
    if rule == "adaptive":
        p = 1.0 + g_sing

        def integrand(u):
            s = s0 + u ** (1.0 / p)
            out = 1.0 / p
            for g, xi in free:
                out *= (s - xi) ** g
            return out

        val, _ = integrate.quad(
            integrand, 0.0, (t - s0) ** p, epsabs=0.0, epsrel=1e-10, limit=300
        )
        return val
    raise InvalidInputError(f"unknown rule {rule!r}")


def eval_kernel(
    spec: KernelSpec,
    x,
    mode: str = "raw",
    rule: str = "fixed",
    n_first: int = 8,
    gl_order: int = 4,
    octaves: int = 14,
) -> float:
    """Value of the kernel at a point of R^q.

    mode="raw" evaluates the kernel as defined (coordinate i against
    exponent i); mode="symmetrized" averages over all argument orders.
    The fixed rule uses n_first Jacobi nodes plus octaves*gl_order graded
    Legendre nodes (64 total at the defaults); "adaptive" substitutes the
    singular power away and lets adaptive quadrature meet ~1e-10.
    """
    x = np.asarray(x, dtype=float)
    q = spec.q
    if x.shape != (q,):
        raise InvalidInputError(f"point has shape {x.shape}, kernel order is {q}")
    g = spec.gamma.entries
    t = spec.horizon
    if mode == "raw":
        orders = [tuple(range(q))]
    elif mode == "symmetrized":
        orders = list(itertools.permutations(range(q)))
    else:
        raise InvalidInputError(f"unknown mode {mode!r}")
    total = 0.0
    for perm in orders:
        total += _s_integral(g, x[list(perm)], t, rule, n_first, gl_order, octaves)
    return spec.constant * total / len(orders)


def constant_face_ratio(gamma_tail, epsilons) -> list[dict]:
    """Track A^2/(2 eps) along the first-exponent face against the tail constant.

    gamma_tail holds the fixed coordinates g_2..g_q; each row prepends
    g_1 = -1/2 - eps.  The ratio converges to the order-(q-1) constant of
    the tail as eps goes to 0.
    """
    tail = tuple(float(v) for v in gamma_tail)
    if len(tail) == 0:
        raise SizeError("dropping the first coordinate of an order-1 vector leaves nothing")
    from .domain import BoundaryPath, Face, path_points

    path = BoundaryPath(Face.FIRST_EXPONENT_TO_HALF, GammaVector(tail), tuple(epsilons))
    target = normalizing_constant_sq(GammaVector(tail))
    rows = []
    for eps, vec in zip(path.epsilons, path_points(path)):
        ratio = normalizing_constant_sq(vec) / (2.0 * eps)
        rows.append(
            {
                "epsilon": eps,
                "ratio": ratio,
                "target": target,
                "rel_gap": abs(ratio - target) / target,
            }
        )
    return rows


@dataclass(frozen=True)
class ScalingMap:
    """Horizon rescaling c*t with the exact kernel identity exponents.

    Stretching the horizon by c rescales the kernel pointwise by
    c**kernel_exponent under x -> c*x, and the process variance picks up
    the extra q/2 from the Gaussian differentials.
    """

    source: KernelSpec
    scaled: KernelSpec
    scale: float
    kernel_exponent: float
    process_exponent: float


def scaling_map(spec: KernelSpec, c: float) -> ScalingMap:
    if not c > 0:
        raise InvalidInputError(f"scale must be positive, got {c}")
    gb = spec.gamma.gamma_bar
    scaled = KernelSpec(spec.gamma, spec.horizon * c, spec.constant)
    return ScalingMap(
        source=spec,
        scaled=scaled,
        scale=float(c),
        kernel_exponent=gb + 1.0,
        process_exponent=gb + 1.0 + spec.q / 2.0,
    )
