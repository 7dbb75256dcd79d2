"""Self-verification suites behind the `verify-all` CLI command.

Checks are grouped into levels:

* ``exact``  - rational identities that must hold to the last digit;
* ``float``  - floating-point consistency and convergence checks;
* ``mc``     - reduced-scale Monte Carlo statistics (seeded, 4-sigma gates).

Each check returns (ok, detail).  These are smaller, faster versions of the
full test suite, meant for an installed-package smoke run.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np

from . import hankel, kernels, moments, sampler
from .exact import invert_matrix
from .legendre import (
    darboux_approximant,
    darboux_main_term,
    legendre_all,
    legendre_exact,
    legendre_integral_exact,
)

__all__ = ["LEVELS", "run_checks"]

LEVELS = ("exact", "float", "mc", "all")


def _check_bonnet_extended():
    from .exact import RationalPoly

    x = RationalPoly([0, 1])
    for n in range(-15, 15):
        lhs = legendre_exact(n + 1) * (n + 1)
        rhs = (legendre_exact(n) * x) * (2 * n + 1) - legendre_exact(n - 1) * n
        if lhs != rhs:
            return False, f"three-term recurrence fails at n={n}"
    return True, "n in [-15, 14]"


def _check_integral_recursion():
    from .exact import RationalPoly

    x = RationalPoly([0, 1])
    for n in range(-15, 15):
        lhs = legendre_integral_exact(n + 1) * (n + 2)
        rhs = (legendre_integral_exact(n) * x) * (2 * n + 1) - legendre_integral_exact(
            n - 1
        ) * (n - 1)
        if lhs != rhs:
            return False, f"integral recursion fails at n={n}"
    return True, "n in [-15, 14]"


def _check_orthogonality():
    for n in range(-10, 11):
        for m in range(-10, 11):
            val = (legendre_exact(n) * legendre_exact(m)).definite_integral()
            if n == m:
                if val != Fraction(2, 2 * n + 1):
                    return False, f"norm fails at n={n}"
            elif n != -m - 1 and val != 0:
                return False, f"orthogonality fails at ({n},{m})"
    return True, "|n|,|m| <= 10"


def _check_boundary():
    for n in range(1, 31):
        p = legendre_integral_exact(n)
        if p(Fraction(1)) != 0 or p(Fraction(-1)) != 0:
            return False, f"boundary value fails at n={n}"
    return True, "n in [1, 30]"


def _check_pfd_oracle():
    for a in range(0, 3):
        for k in range(0, 4):
            for n in range(a + 1, a + 7):
                if moments.moment_exact(n - a, n + a, k) != moments.pfd_moment(a, k, n):
                    return False, f"PFD mismatch at (a={a}, k={k}, n={n})"
    return True, "a<=2, k<=3, n<=a+6"


def _check_row_constraints():
    for k in range(0, 6):
        for a in range(1, 6):
            if moments.heaviside_residue(0, k, a) != moments.heaviside_residue(a, k, 0):
                return False, f"residue symmetry fails at (a={a}, k={k})"
    return True, "a<=5, k<=5"


def _check_catalan_sums():
    for a in range(0, 8):
        for k in range(0, 8):
            table = moments.weighted_row_sum(a, k)
            if table != moments.weighted_row_sum_closed(a, k):
                return False, f"closed form differs at (a={a}, k={k})"
            if table != moments.weighted_row_sum_recursed(a, k):
                return False, f"stencil recursion differs at (a={a}, k={k})"
    return True, "a,k <= 7"


def _check_idat0():
    bad = [k for k in range(9) if not moments.idat0_identity_holds(k)]
    return (not bad), f"k <= 8{'' if not bad else f', fails at {bad}'}"


def _check_moment_tail():
    for k in range(4):
        for N in (10, 40):
            if moments.loop_even_moment(k, N) != moments.loop_even_moment_tail(k, N):
                return False, f"tail identity fails at (k={k}, N={N})"
    return True, "k<=3, N in {10,40}"


def _check_cd_sum():
    pts = [(Fraction(1, 2), Fraction(-1, 3)), (Fraction(9, 10), Fraction(1, 10))]
    for N in (5, 20):
        for x, y in pts:
            if not kernels.cd_sum_identity_holds(N, x, y):
                return False, f"summation identity fails at N={N}"
    return True, "N in {5,20}, 2 point pairs"


def _check_hankel_inverse():
    for N in range(1, 11):
        hankel.build_hankel_system(N)  # verifies V1 V1inv = I on build
    two = hankel.build_hankel_system(2)
    direct = invert_matrix([list(r) for r in two.V1])
    if tuple(tuple(r) for r in direct) != two.V1inv:
        return False, "closed inverse differs from direct inversion at N=2"
    return True, "N <= 10 + direct-inversion oracle at N=2"


def _check_hankel_alpha_routes():
    for N in range(1, 9):
        sys = hankel.build_hankel_system(N)
        for l in range(1, N + 1):
            if hankel.cond_poly_from_inverse(sys, l) != sys.cond_polys[l - 1]:
                return False, f"conditioning-polynomial routes differ at (N={N}, l={l})"
    return True, "N <= 8, all l"


def _check_representation_equivalence():
    eighths = [Fraction(i, 8) for i in range(9)]
    for N in range(1, 7):
        for s in eighths:
            for t in eighths:
                if hankel.hankel_covariance(N, s, t) != kernels.loop_covariance_exact(
                    N, s, t
                ):
                    return False, f"covariances differ at (N={N}, s={s}, t={t})"
    return True, "N <= 6 on the eighths grid"


def _check_parseval_bound():
    pts = [(Fraction(1, 3), Fraction(2, 3)), (Fraction(1, 7), Fraction(5, 7))]
    for s, t in pts:
        if not kernels.parseval_tail_bound_holds(s, t, 40):
            return False, f"tail bound fails at (s={s}, t={t})"
    return True, "M = 40, 2 rational points"


def _check_r2c():
    for N in (1, 4, 16, 64):
        ss = np.linspace(0.0, 1.0, 11)
        cfg = kernels.KernelConfig(N)
        worst = 0.0
        for s in ss:
            for t in ss:
                r = kernels.rescaled_kernel(2 * s - 1, 2 * t - 1, N)
                c = kernels.loop_covariance(float(s), float(t), cfg)
                worst = max(worst, abs(r - 2 * N * c))
        if worst > 1e-9 * N:
            return False, f"consistency residual {worst:.2e} at N={N}"
    return True, "N in {1,4,16,64}, 11x11 grid"


def _check_derivative():
    for N in (50, 200):
        xs = np.linspace(-0.9, 0.9, 33)
        h = 5e-3 / N
        fd = (
            -kernels.diagonal_kernel(xs + 2 * h, N)
            + 8 * kernels.diagonal_kernel(xs + h, N)
            - 8 * kernels.diagonal_kernel(xs - h, N)
            + kernels.diagonal_kernel(xs - 2 * h, N)
        ) / (12 * h)
        an = kernels.diagonal_kernel_derivative(xs, N)
        rel = np.max(np.abs(fd - an)) / np.max(np.abs(an))
        if rel > 1e-5:
            return False, f"derivative mismatch {rel:.2e} at N={N}"
    return True, "N in {50,200}"


def _check_psd():
    ts = np.linspace(0.0, 1.0, 33)[1:-1]
    for N in (2, 16, 128):
        lam = np.linalg.eigvalsh(kernels.gram_matrix(ts, N)).min()
        if lam < -1e-10:
            return False, f"min eigenvalue {lam:.2e} at N={N}"
    return True, "31 interior points, N in {2,16,128}"


def _check_diag_monotone():
    for s in (0.1, 0.5, 0.9):
        prev = math.inf
        for N in (1, 2, 4, 8, 16, 32):
            val = kernels.loop_covariance(s, s, kernels.KernelConfig(N))
            if val > prev + 1e-15:
                return False, f"diagonal increased at (s={s}, N={N})"
            prev = val
    return True, "s in {0.1,0.5,0.9}, N <= 32"


def _check_darboux_bounded():
    thetas = np.linspace(math.pi / 6, 5 * math.pi / 6, 49)
    for n in (50, 100, 200):
        apx = darboux_approximant(0, 0, n)
        p = legendre_all(n, np.cos(thetas))[n]
        err = max(
            abs(p[i] - darboux_main_term(apx, th)) for i, th in enumerate(thetas)
        )
        if n**1.5 * err > 0.40:
            return False, f"scaled error {n**1.5 * err:.3f} at n={n}"
    return True, "n in {50,100,200}, bound 0.40"


def _check_semicircle_trend():
    for x in (0.0, 0.5):
        errs = [
            abs(kernels.diagonal_kernel(x, N) - kernels.semicircle(x))
            for N in (250, 500, 1000)
        ]
        if not (errs[0] > errs[1] > errs[2]):
            return False, f"error not decreasing at x={x}"
    return True, "x in {0, 0.5}, N in {250,500,1000}"


def _check_decorrelation():
    vals = [
        abs(N * kernels.loop_covariance(0.5, 0.5 + N**-0.5, kernels.KernelConfig(N)))
        for N in (100, 400, 1600)
    ]
    ok = vals[0] > vals[1] > vals[2]
    return ok, f"|N C_N| = {', '.join(f'{v:.2e}' for v in vals)}"


def _check_tail_acceleration():
    for x, y in ((0.3, -0.5), (0.7, 0.1)):
        for N in (10, 50):
            direct = kernels.rescaled_kernel(x, y, N)
            tail = kernels.rescaled_kernel_tail(x, y, N)
            if abs(direct - tail) > 1e-6:
                return False, f"routes differ by {abs(direct - tail):.2e} at N={N}"
    return True, "2 points, N in {10,50}"


def _check_spectral_unbiased():
    grid = sampler.PathGrid.regular(8)
    ens = sampler.sample_spectral(4, grid, 20_000, seed=20240803)
    cov, se = sampler.ensemble_covariance(ens)
    analytic = kernels.gram_matrix(np.array(grid.times), 4)
    resid = np.abs(cov - analytic)[1:-1, 1:-1]
    gate = 4 * se[1:-1, 1:-1]
    ok = bool(np.all(resid <= gate))
    return ok, f"max |z| = {np.max(resid / np.maximum(gate / 4, 1e-300)):.2f} sigma"


def _check_two_method():
    grid = sampler.PathGrid.regular(8)
    fine = sampler.PathGrid.regular(512)
    spectral_ens = sampler.sample_spectral(4, grid, 20_000, seed=7)
    pathw = sampler.sample_pathwise(4, fine, 20_000, seed=8, report_grid=grid)
    cs, ses = sampler.ensemble_covariance(spectral_ens)
    cp, sep = sampler.ensemble_covariance(pathw)
    resid = np.abs(cs - cp)[1:-1, 1:-1]
    gate = 4 * np.sqrt(ses**2 + sep**2)[1:-1, 1:-1]
    return bool(np.all(resid <= gate)), "interior 7x7 block, R=2e4"


def _check_seed_determinism():
    grid = sampler.PathGrid.regular(16)
    a = sampler.sample_spectral(4, grid, 64, seed=99)
    b = sampler.sample_spectral(4, grid, 64, seed=99, threads=4)
    if not np.array_equal(a.paths, b.paths):
        return False, "spectral ensembles differ across thread counts"
    c = sampler.sample_pathwise(4, grid, 64, seed=99)
    d = sampler.sample_pathwise(4, grid, 64, seed=99)
    return np.array_equal(c.paths, d.paths), "bit-identical across repeats/threads"


def _check_coefficient_norms():
    grid = sampler.PathGrid.regular(1024)
    ens = sampler.sample_pathwise(4, grid, 20_000, seed=11, keep_coeffs=True)
    cov, se = sampler.coefficient_covariance(ens)
    target = np.diag(1.0 / (2.0 * np.arange(4) + 1.0))
    return bool(np.all(np.abs(cov - target) <= 4 * se)), "R=2e4, M=1024, N=4"


CHECKS = [
    ("bonnet-extended", "exact", _check_bonnet_extended),
    ("integral-recursion", "exact", _check_integral_recursion),
    ("orthogonality", "exact", _check_orthogonality),
    ("integral-boundary", "exact", _check_boundary),
    ("pfd-vs-oracle", "exact", _check_pfd_oracle),
    ("residue-symmetry", "exact", _check_row_constraints),
    ("catalan-sums", "exact", _check_catalan_sums),
    ("alternating-identity", "exact", _check_idat0),
    ("moment-tail-identity", "exact", _check_moment_tail),
    ("cd-summation", "exact", _check_cd_sum),
    ("hankel-inverse", "exact", _check_hankel_inverse),
    ("hankel-alpha-routes", "exact", _check_hankel_alpha_routes),
    ("representation-equivalence", "exact", _check_representation_equivalence),
    ("parseval-tail-bound", "exact", _check_parseval_bound),
    ("rescale-consistency", "float", _check_r2c),
    ("derivative-identity", "float", _check_derivative),
    ("gram-psd", "float", _check_psd),
    ("diagonal-monotone", "float", _check_diag_monotone),
    ("darboux-bounded", "float", _check_darboux_bounded),
    ("semicircle-trend", "float", _check_semicircle_trend),
    ("decorrelation", "float", _check_decorrelation),
    ("tail-acceleration", "float", _check_tail_acceleration),
    ("spectral-unbiased", "mc", _check_spectral_unbiased),
    ("two-method-agreement", "mc", _check_two_method),
    ("seed-determinism", "mc", _check_seed_determinism),
    ("coefficient-norms", "mc", _check_coefficient_norms),
]


def run_checks(level: str = "exact") -> list[dict]:
    """Run all checks at or below the requested level; returns result rows."""
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}")
    wanted = {"exact": ("exact",), "float": ("exact", "float"), "mc": ("mc",)}.get(
        level, ("exact", "float", "mc")
    )
    results = []
    for name, lvl, fn in CHECKS:
        if lvl not in wanted:
            continue
        start = time.perf_counter()
        ok, detail = fn()
        results.append(
            {
                "check": name,
                "level": lvl,
                "status": "PASS" if ok else "FAIL",
                "detail": detail,
                "seconds": round(time.perf_counter() - start, 3),
            }
        )
    return results
