"""Monte Carlo realization of loops and their fluctuations.

Two samplers produce discrete-time loop paths on a grid:

* `sample_spectral` draws exactly from the finite-dimensional law by
  factorizing the covariance matrix of the interior grid points (the
  endpoints are deterministic zeros and stay out of the factorization);

* `sample_pathwise` simulates Brownian increments and assembles the loop
  from its stochastic-integral construction, approximating each
  int_0^1 Q_n dB by a left-endpoint Riemann sum (the Ito convention; a
  midpoint rule would target the wrong integral).  The construction is
  exact in law only as the grid is refined, with O(M^{-1/2}) weak bias.

RNG contract: path j uses the Philox counter-based generator keyed by
SeedSequence(seed, spawn_key=(first_path + j,)).  The stream attached to a
path index is a pure function of (seed, index), so ensembles are bit-stable
under chunking, threading, or splitting a run across calls via
`first_path`.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, FactorizationError
from .kernels import KernelConfig, fluctuation_variance, gram_matrix, loop_covariance
from .legendre import legendre_all, legendre_int_all

__all__ = [
    "PathGrid",
    "LoopEnsemble",
    "path_stream",
    "sample_spectral",
    "sample_pathwise",
    "ensemble_covariance",
    "fluctuation_rows",
    "pair_correlation",
    "coefficient_covariance",
]

JITTER_LADDER = (0.0, 1e-15, 1e-14, 1e-13, 1e-12)


@dataclass(frozen=True)
class PathGrid:
    """Strictly increasing time grid with pinned endpoints 0 and 1."""

    times: tuple[float, ...]

    def __post_init__(self):
        ts = self.times
        if len(ts) < 2 or ts[0] != 0.0 or ts[-1] != 1.0:
            raise DomainError("grid must run from exactly 0 to exactly 1")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise DomainError("grid times must be strictly increasing")

    @property
    def M(self) -> int:
        """Number of intervals."""
        return len(self.times) - 1

    @staticmethod
    def regular(M: int) -> "PathGrid":
        if M < 1:
            raise ValueError("M must be positive")
        return PathGrid(tuple(i / M for i in range(M)) + (1.0,))


@dataclass
class LoopEnsemble:
    """Sampled paths (R x grid points) plus the configuration that made them."""

    N: int
    grid: PathGrid
    seed: int
    method: str
    paths: np.ndarray
    coeffs: np.ndarray | None = field(default=None, repr=False)


def path_stream(seed: int, index: int) -> np.random.Generator:
    """Philox stream for one path index; fixed by (seed, index) alone."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,)))
    )


def _chunks(total: int, size: int):
    start = 0
    while start < total:
        stop = min(start + size, total)
        yield start, stop
        start = stop


def _run_chunks(worker, R: int, threads: int, chunk: int = 4096) -> None:
    spans = list(_chunks(R, chunk))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda span: worker(*span), spans))
    else:
        for span in spans:
            worker(*span)


def _factor_covariance(cov: np.ndarray) -> tuple[np.ndarray, float]:
    for jitter in JITTER_LADDER:
        try:
            return np.linalg.cholesky(cov + jitter * np.eye(len(cov))), jitter
        except np.linalg.LinAlgError:
            continue
    raise FactorizationError(
        f"covariance factorization failed after jitter escalation up to {JITTER_LADDER[-1]:g}"
    )


def sample_spectral(
    N: int, grid: PathGrid, R: int, seed: int, *, threads: int = 1, first_path: int = 0
) -> LoopEnsemble:
    """Draw R paths exactly in law on the grid via covariance factorization."""
    interior = np.array(grid.times[1:-1])
    npts = len(grid.times)
    paths = np.zeros((R, npts))
    if interior.size:
        factor, _ = _factor_covariance(gram_matrix(interior, N))

        def worker(lo, hi):
            z = np.stack(
                [
                    path_stream(seed, first_path + j).standard_normal(interior.size)
                    for j in range(lo, hi)
                ]
            )
            paths[lo:hi, 1:-1] = z @ factor.T

        _run_chunks(worker, R, threads)
    return LoopEnsemble(N, grid, seed, "spectral", paths)


def sample_pathwise(
    N: int,
    grid: PathGrid,
    R: int,
    seed: int,
    *,
    report_grid: PathGrid | None = None,
    keep_coeffs: bool = False,
    threads: int = 1,
    first_path: int = 0,
) -> LoopEnsemble:
    """Assemble R paths from simulated Brownian increments on the grid.

    Parameters
    ----------
    report_grid : optional coarser grid whose times must all appear in
        `grid`; paths are simulated on the fine grid but stored only at the
        report times (keeps memory bounded for large R).
    keep_coeffs : store the simulated stochastic-integral coefficients
        (R x N) on the ensemble for diagnostics.
    """
    times = np.array(grid.times)
    dt = np.diff(times)
    sqrt_dt = np.sqrt(dt)
    if report_grid is None:
        report_grid = grid
        keep_idx = np.arange(len(times))
    else:
        pos = {t: i for i, t in enumerate(grid.times)}
        try:
            keep_idx = np.array([pos[t] for t in report_grid.times])
        except KeyError as exc:
            raise DomainError(f"report grid time {exc.args[0]} not on the sampling grid")

    # Q_n at left endpoints for the Ito sums; (2n+1) int_0^t Q_n at kept times.
    q_left = legendre_all(N - 1, 2.0 * times[:-1] - 1.0)
    jq_kept = 0.5 * legendre_int_all(N - 1, 2.0 * times[keep_idx] - 1.0)
    weight_jq = (2.0 * np.arange(N) + 1.0)[:, None] * jq_kept

    paths = np.empty((R, len(keep_idx)))
    coeffs = np.empty((R, N)) if keep_coeffs else None

    def worker(lo, hi):
        z = np.stack(
            [
                path_stream(seed, first_path + j).standard_normal(len(dt))
                for j in range(lo, hi)
            ]
        )
        db = z * sqrt_dt
        bridge = np.concatenate([np.zeros((hi - lo, 1)), np.cumsum(db, axis=1)], axis=1)
        xi = db @ q_left.T  # (chunk, N) left-endpoint Riemann-Ito sums
        paths[lo:hi] = bridge[:, keep_idx] - xi @ weight_jq
        if coeffs is not None:
            coeffs[lo:hi] = xi

    _run_chunks(worker, R, threads)
    return LoopEnsemble(N, report_grid, seed, "pathwise", paths, coeffs)


def ensemble_covariance(ens: LoopEnsemble) -> tuple[np.ndarray, np.ndarray]:
    """Empirical covariance and its standard error, entrywise.

    Uses the known-zero-mean estimator C = X^T X / R, whose entry variance
    is (E[(X_i X_j)^2] - C_ij^2) / R; the fourth moments are estimated from
    the sample.
    """
    x = ens.paths
    r = x.shape[0]
    cov = x.T @ x / r
    second = (x * x).T @ (x * x) / r  # E[X_i^2 X_j^2] estimate
    var = np.maximum(second - cov**2, 0.0) / r
    return cov, np.sqrt(var)


def fluctuation_rows(ens: LoopEnsemble) -> list[dict]:
    """Per-gridpoint variance of sqrt(N) * path vs the analytic values.

    Requires a spectral ensemble: the pathwise construction carries
    discretization bias, so its variances are not a clean law check.
    """
    if ens.method != "spectral":
        raise ValueError("fluctuation statistics need a spectral ensemble")
    scaled = math.sqrt(ens.N) * ens.paths
    emp = (scaled * scaled).mean(axis=0)
    rows = []
    cfg = KernelConfig(ens.N)
    for i, t in enumerate(ens.grid.times):
        rows.append(
            {
                "N": ens.N,
                "t": t,
                "emp_var": float(emp[i]),
                "analytic_NCn": ens.N * loop_covariance(t, t, cfg),
                "semicircle": fluctuation_variance(t),
            }
        )
    return rows


def pair_correlation(ens: LoopEnsemble, i: int, j: int) -> float:
    """Empirical correlation between two grid points of the ensemble."""
    x, y = ens.paths[:, i], ens.paths[:, j]
    sx = float(np.sqrt((x * x).mean()))
    sy = float(np.sqrt((y * y).mean()))
    if sx == 0.0 or sy == 0.0:
        return 0.0
    return float((x * y).mean() / (sx * sy))


def coefficient_covariance(ens: LoopEnsemble) -> tuple[np.ndarray, np.ndarray]:
    """Covariance of the stored stochastic-integral coefficients.

    For an unbiased simulation this approaches diag(1/(2n+1)), the squared
    norms of the shifted polynomials.
    """
    if ens.coeffs is None:
        raise ValueError("ensemble was sampled without keep_coeffs")
    x = ens.coeffs
    r = x.shape[0]
    cov = x.T @ x / r
    second = (x * x).T @ (x * x) / r
    return cov, np.sqrt(np.maximum(second - cov**2, 0.0) / r)
