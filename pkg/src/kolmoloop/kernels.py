"""Covariance kernels of the iterated Kolmogorov loop and their limits.

The loop of step N has covariance

    C_N(s, t) = min(s, t) - sum_{n=0}^{N-1} (2n+1) JQ_n(s) JQ_n(t)

on [0, 1]^2, where JQ_n(t) = int_0^t Q_n.  On [-1, 1]^2 the rescaled
remainder kernel is

    R_N(x, y) = N (min(1+x, 1+y) - sum_{n=0}^{N-1} (2n+1)/2 J_n(x) J_n(y))

with J_n(x) = int_{-1}^x P_n, and its diagonal S_N(x) = R_N(x, x) converges
pointwise to the semicircle density sqrt(1-x^2)/pi.  R_N is always computed
through the finite sum above; the equivalent infinite-tail and
Christoffel-Darboux forms exist only as verification oracles because they
need truncation control.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .exact import as_fraction
from .legendre import (
    legendre_all,
    legendre_int_all,
    legendre_integral_exact,
    shifted_integral_exact,
)

__all__ = [
    "KernelConfig",
    "semicircle",
    "fluctuation_variance",
    "loop_covariance",
    "loop_covariance_exact",
    "gram_matrix",
    "rescaled_kernel",
    "diagonal_kernel",
    "diagonal_kernel_derivative",
    "cd_cross",
    "cd_cross_pair",
    "cd_cross_exact",
    "cd_sum_identity_holds",
    "rescaled_kernel_tail",
    "decorrelation_scan",
    "parseval_tail_bound_holds",
    "kernel_grid_rows",
]

KAHAN_THRESHOLD = 1000


@dataclass(frozen=True)
class KernelConfig:
    """Truncation step and exactness switch for kernel evaluation."""

    N: int
    exact: bool = False

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be positive")


def semicircle(x: float) -> float:
    """Semicircle density sqrt(1 - x^2) / pi on [-1, 1]."""
    if not -1.0 <= x <= 1.0:
        raise DomainError(f"x={x} outside [-1, 1]")
    return math.sqrt(1.0 - x * x) / math.pi


def fluctuation_variance(t: float) -> float:
    """Limit variance sqrt(t(1-t)) / pi of the rescaled loop at time t."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t={t} outside [0, 1]")
    return math.sqrt(t * (1.0 - t)) / math.pi


def _compensated_dot(terms: np.ndarray) -> np.ndarray:
    """Kahan-compensated sum over axis 0."""
    acc = np.zeros(terms.shape[1:])
    comp = np.zeros_like(acc)
    for row in terms:
        y = row - comp
        t = acc + y
        comp = (t - acc) - y
        acc = t
    return acc


def _weighted_sum(terms: np.ndarray, N: int) -> np.ndarray:
    if N >= KAHAN_THRESHOLD:
        return _compensated_dot(terms)
    return terms.sum(axis=0)


def _check01(*vals: float) -> None:
    for v in vals:
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"value {v} outside [0, 1]")


def _check_sym(*vals: float) -> None:
    for v in vals:
        if not -1.0 <= v <= 1.0:
            raise DomainError(f"value {v} outside [-1, 1]")


def loop_covariance(s: float, t: float, cfg: KernelConfig):
    """C_N(s, t); exact Fraction result when cfg.exact and inputs are rational."""
    if cfg.exact:
        return loop_covariance_exact(cfg.N, as_fraction(s), as_fraction(t))
    _check01(s, t)
    N = cfg.N
    jq = 0.5 * legendre_int_all(N - 1, np.array([2.0 * s - 1.0, 2.0 * t - 1.0]))
    weights = (2.0 * np.arange(N) + 1.0)[:, None]
    terms = weights[:, 0] * jq[:, 0] * jq[:, 1]
    return min(s, t) - float(_weighted_sum(terms[:, None], N)[0])


def loop_covariance_exact(N: int, s: Fraction, t: Fraction) -> Fraction:
    """C_N(s, t) in exact rational arithmetic."""
    s = as_fraction(s)
    t = as_fraction(t)
    if not (0 <= s <= 1 and 0 <= t <= 1):
        raise DomainError("(s, t) outside the unit square")
    total = min(s, t)
    for n in range(N):
        jq = shifted_integral_exact(n)
        total -= (2 * n + 1) * jq(s) * jq(t)
    return total


def gram_matrix(times, N: int) -> np.ndarray:
    """Covariance matrix [C_N(t_i, t_j)] on a grid, vectorized."""
    ts = np.asarray(times, dtype=float)
    if ts.size and (ts.min() < 0.0 or ts.max() > 1.0):
        raise DomainError("grid contains points outside [0, 1]")
    jq = 0.5 * legendre_int_all(N - 1, 2.0 * ts - 1.0)
    weights = (2.0 * np.arange(N) + 1.0)[:, None]
    return np.minimum.outer(ts, ts) - (weights * jq).T @ jq


def rescaled_kernel(x: float, y: float, N: int) -> float:
    """R_N(x, y) by the finite sum; never by truncating the infinite tail."""
    _check_sym(x, y)
    j = legendre_int_all(N - 1, np.array([x, y]))
    weights = (2.0 * np.arange(N) + 1.0) / 2.0
    terms = weights * j[:, 0] * j[:, 1]
    return N * (min(1.0 + x, 1.0 + y) - float(_weighted_sum(terms[:, None], N)[0]))


def diagonal_kernel(x, N: int):
    """S_N(x) = R_N(x, x); accepts scalars or arrays."""
    arr = np.asarray(x, dtype=float)
    if arr.size and (arr.min() < -1.0 or arr.max() > 1.0):
        raise DomainError("x outside [-1, 1]")
    j = legendre_int_all(N - 1, arr)
    weights = ((2.0 * np.arange(N) + 1.0) / 2.0).reshape((N,) + (1,) * arr.ndim)
    acc = _weighted_sum(weights * j * j, N)
    out = N * (1.0 + arr - acc)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def diagonal_kernel_derivative(x, N: int):
    """d/dx S_N(x) = -N P_{N-1}(x) P_N(x)."""
    arr = np.asarray(x, dtype=float)
    p = legendre_all(N, arr)
    out = -N * p[N - 1] * p[N]
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def cd_cross(n: int, x: float, y: float) -> complex:
    """Cross term D_{n+1}(x, y) = I_{n+1}(x) I_n(y) - I_n(x) I_{n+1}(y)."""
    from .legendre import legendre_integral

    return legendre_integral(n + 1, x) * legendre_integral(n, y) - legendre_integral(
        n, x
    ) * legendre_integral(n + 1, y)


def cd_cross_pair(n: int, x: float, y: float) -> tuple[complex, complex]:
    """D_{n+1}(x, y) by definition and by the one-step recursion.

    The recursion route evaluates
    ((x - y)(2n+1) I_n(x) I_n(y) + (n-1) D_n(x, y)) / (n+2) with D_n taken
    from the definition; agreement of the two routes is a test point.
    """
    from .legendre import legendre_integral

    _check_sym(x, y)
    by_def = cd_cross(n, x, y)
    inx = legendre_integral(n, x)
    iny = legendre_integral(n, y)
    by_rec = ((x - y) * (2 * n + 1) * inx * iny + (n - 1) * cd_cross(n - 1, x, y)) / (n + 2)
    return by_def, by_rec


def _integral_exact_value(n: int, x: Fraction) -> Fraction:
    val = legendre_integral_exact(n)(x)
    if val.im != 0:
        raise ArithmeticError(f"I_{n} is not real")
    return val.re


def cd_cross_exact(n: int, x: Fraction, y: Fraction) -> Fraction:
    """Exact D_{n+1}(x, y) for n >= 1 at rational points."""
    if n < 1:
        raise ValueError("exact cross terms need n >= 1")
    return _integral_exact_value(n + 1, x) * _integral_exact_value(n, y) - _integral_exact_value(
        n, x
    ) * _integral_exact_value(n + 1, y)


def cd_sum_identity_holds(N: int, x, y) -> bool:
    """Exact check of the Christoffel-Darboux style summation identity.

    (x - y) sum_{n=1}^N (2n+1) I_n(x) I_n(y)
        = N D_{N+1}(x, y) + 2 sum_{n=1}^N D_{n+1}(x, y).
    """
    x = as_fraction(x)
    y = as_fraction(y)
    if not (-1 <= x <= 1 and -1 <= y <= 1):
        raise DomainError("(x, y) outside [-1, 1]^2")
    ivals = {n: _integral_exact_value(n, x) for n in range(1, N + 2)}
    jvals = {n: _integral_exact_value(n, y) for n in range(1, N + 2)}
    lhs = (x - y) * sum((2 * n + 1) * ivals[n] * jvals[n] for n in range(1, N + 1))
    cross = {n: ivals[n + 1] * jvals[n] - ivals[n] * jvals[n + 1] for n in range(1, N + 1)}
    rhs = N * cross[N] + 2 * sum(cross[n] for n in range(1, N + 1))
    return lhs == rhs


def rescaled_kernel_tail(x: float, y: float, N: int, terms: int = 10_000) -> float:
    """R_N(x, y) through the accelerated tail (verification oracle only).

    Uses (x-y) sum_{n>=N} (2n+1) I_n I_n = 2 sum_{n>=N} D_{n+1} - (N-1) D_N
    truncated after `terms` cross terms; requires x != y.
    """
    _check_sym(x, y)
    if x == y:
        raise ValueError("the tail acceleration needs x != y")
    top = N + terms
    j = legendre_int_all(top + 1, np.array([x, y]))
    ix, iy = j[:, 0], j[:, 1]
    # cross terms D_{N+1} .. D_{top+1}
    d = ix[N + 1 : top + 2] * iy[N : top + 1] - ix[N : top + 1] * iy[N + 1 : top + 2]
    tail = 2.0 * math.fsum(d) - (N - 1) * (ix[N] * iy[N - 1] - ix[N - 1] * iy[N])
    return 0.5 * N * tail / (x - y)


def decorrelation_scan(s: float, t_offsets, beta: float, N_list) -> list[dict]:
    """Rows (N, beta, t, N * C_N(s, s + N^{-beta} t)) for a decorrelation study."""
    if not 0.0 < s < 1.0:
        raise DomainError("s must lie in (0, 1)")
    if not 0.0 < beta < 1.0:
        raise DomainError("beta must lie in (0, 1)")
    rows = []
    for N in N_list:
        for t in t_offsets:
            shifted = s + N ** (-beta) * t
            if not 0.0 <= shifted <= 1.0:
                raise DomainError(
                    f"shifted point s + N^-beta t = {shifted} leaves [0, 1] (N={N}, t={t})"
                )
            value = N * loop_covariance(s, shifted, KernelConfig(N))
            rows.append({"N": N, "beta": beta, "t": t, "value": value})
    return rows


def parseval_tail_bound_holds(s: Fraction, t: Fraction, M: int, start: int = 1) -> bool:
    """Exact Cauchy-Schwarz tail bound for the shifted-polynomial integrals.

    Checks (sum_{n=start}^M (2n+1) |JQ_n(s)| |JQ_n(t)|)^2 <= s t, squared so
    the comparison stays rational.
    """
    s = as_fraction(s)
    t = as_fraction(t)
    total = Fraction(0)
    for n in range(start, M + 1):
        jq = shifted_integral_exact(n)
        total += (2 * n + 1) * abs(jq(s)) * abs(jq(t))
    return total * total <= s * t


def kernel_grid_rows(what: str, N: int, grid: int) -> tuple[list[str], list[list[float]]]:
    """Inclusive equispaced grid evaluation for the CLI.

    `what` is one of "C" (covariance on [0,1]^2), "R" (rescaled kernel on
    [-1,1]^2) or "S" (diagonal on [-1,1]).
    """
    if grid < 2:
        raise ValueError("grid needs at least 2 points")
    if what == "S":
        xs = np.linspace(-1.0, 1.0, grid)
        vals = diagonal_kernel(xs, N)
        return ["x", "value"], [[float(x), float(v)] for x, v in zip(xs, vals)]
    if what == "C":
        ts = np.linspace(0.0, 1.0, grid)
        g = gram_matrix(ts, N)
        header = ["s", "t", "value"]
        rows = [
            [float(ts[i]), float(ts[j]), float(g[i, j])]
            for i in range(grid)
            for j in range(grid)
        ]
        return header, rows
    if what == "R":
        xs = np.linspace(-1.0, 1.0, grid)
        j = legendre_int_all(N - 1, xs)
        weights = ((2.0 * np.arange(N) + 1.0) / 2.0)[:, None]
        s = (weights * j).T @ j
        r = N * (np.minimum.outer(1.0 + xs, 1.0 + xs) - s)
        header = ["x", "y", "value"]
        rows = [
            [float(xs[i]), float(xs[j]), float(r[i, j])]
            for i in range(grid)
            for j in range(grid)
        ]
        return header, rows
    raise ValueError(f"unknown kernel kind {what!r}")
