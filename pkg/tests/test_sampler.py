"""Samplers: grid handling, determinism, law checks at reduced scale.

The statistical gates are 4 standard errors with fixed seeds, giving a
per-assertion false-failure probability around 6e-5 under the null; with
fixed seeds the outcomes are deterministic anyway.  The full-scale law
checks (R = 1e5) live in the acceptance suite.
"""

import numpy as np
import pytest

from kolmoloop.errors import DomainError, FactorizationError
from kolmoloop.kernels import KernelConfig, gram_matrix, loop_covariance
from kolmoloop.sampler import (
    LoopEnsemble,
    PathGrid,
    coefficient_covariance,
    ensemble_covariance,
    fluctuation_rows,
    pair_correlation,
    path_stream,
    sample_pathwise,
    sample_spectral,
)


class TestPathGrid:
    def test_regular(self):
        g = PathGrid.regular(4)
        assert g.times == (0.0, 0.25, 0.5, 0.75, 1.0)
        assert g.M == 4

    def test_requires_pinned_endpoints(self):
        with pytest.raises(DomainError):
            PathGrid((0.0, 0.5, 0.9))
        with pytest.raises(DomainError):
            PathGrid((0.1, 0.5, 1.0))

    def test_requires_increasing(self):
        with pytest.raises(DomainError):
            PathGrid((0.0, 0.5, 0.5, 1.0))


class TestStreams:
    def test_stream_is_function_of_seed_and_index(self):
        a = path_stream(123, 7).standard_normal(4)
        b = path_stream(123, 7).standard_normal(4)
        c = path_stream(123, 8).standard_normal(4)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_seed_determinism_spectral(self):
        g = PathGrid.regular(8)
        a = sample_spectral(4, g, 50, seed=5)
        b = sample_spectral(4, g, 50, seed=5)
        assert np.array_equal(a.paths, b.paths)

    def test_thread_count_does_not_change_result(self):
        g = PathGrid.regular(8)
        a = sample_spectral(4, g, 5000, seed=5, threads=1)
        b = sample_spectral(4, g, 5000, seed=5, threads=4)
        assert np.array_equal(a.paths, b.paths)

    def test_first_path_splits_runs(self):
        g = PathGrid.regular(4)
        whole = sample_pathwise(2, g, 40, seed=3)
        head = sample_pathwise(2, g, 25, seed=3)
        tail = sample_pathwise(2, g, 15, seed=3, first_path=25)
        assert np.array_equal(whole.paths, np.vstack([head.paths, tail.paths]))

    def test_methods_have_distinct_seeded_output(self):
        g = PathGrid.regular(8)
        a = sample_spectral(2, g, 10, seed=5)
        b = sample_pathwise(2, g, 10, seed=5)
        assert not np.array_equal(a.paths, b.paths)


class TestSpectral:
    def test_paths_pinned(self):
        g = PathGrid.regular(16)
        ens = sample_spectral(8, g, 100, seed=1)
        assert np.all(ens.paths[:, 0] == 0.0)
        assert np.all(ens.paths[:, -1] == 0.0)

    def test_bridge_midpoint_variance(self):
        g = PathGrid((0.0, 0.5, 1.0))
        ens = sample_spectral(1, g, 40_000, seed=2)
        var = float((ens.paths[:, 1] ** 2).mean())
        se = float((ens.paths[:, 1] ** 4).mean() - var**2) ** 0.5 / 200.0
        assert abs(var - 0.25) <= 4 * se

    def test_zero_mean(self):
        g = PathGrid.regular(8)
        ens = sample_spectral(4, g, 40_000, seed=3)
        mean = ens.paths.mean(axis=0)
        se = ens.paths.std(axis=0) / 200.0
        assert np.all(np.abs(mean[1:-1]) <= 4 * se[1:-1])

    def test_empirical_covariance_matches_kernel(self):
        g = PathGrid.regular(8)
        n_step = 4
        ens = sample_spectral(n_step, g, 30_000, seed=4)
        cov, se = ensemble_covariance(ens)
        analytic = gram_matrix(np.array(g.times), n_step)
        inner = slice(1, -1)
        assert np.all(np.abs(cov - analytic)[inner, inner] <= 4 * se[inner, inner])

    def test_near_duplicate_points_repaired_by_jitter(self):
        times = (0.0, 0.5, 0.5 + 2e-16, 1.0)
        ens = sample_spectral(1, PathGrid(times), 10, seed=0)
        assert ens.paths.shape == (10, 4)

    def test_factorization_failure_reported(self):
        # an indefinite matrix is beyond what the jitter ladder may repair
        from kolmoloop.sampler import _factor_covariance

        with pytest.raises(FactorizationError):
            _factor_covariance(np.array([[1.0, 2.0], [2.0, 1.0]]))


class TestPathwise:
    def test_paths_start_at_zero(self):
        g = PathGrid.regular(32)
        ens = sample_pathwise(4, g, 50, seed=6)
        assert np.all(ens.paths[:, 0] == 0.0)

    def test_report_grid_subset(self):
        fine = PathGrid.regular(64)
        coarse = PathGrid.regular(8)
        ens = sample_pathwise(4, fine, 20, seed=7, report_grid=coarse)
        assert ens.paths.shape == (20, 9)
        assert ens.grid == coarse

    def test_report_grid_must_be_subset(self):
        fine = PathGrid.regular(64)
        with pytest.raises(DomainError):
            sample_pathwise(4, fine, 5, seed=7, report_grid=PathGrid((0.0, 1 / 3, 1.0)))

    def test_bridge_covariance_on_fine_grid(self):
        fine = PathGrid.regular(512)
        coarse = PathGrid.regular(4)
        ens = sample_pathwise(1, fine, 30_000, seed=8, report_grid=coarse)
        cov, se = ensemble_covariance(ens)
        analytic = gram_matrix(np.array(coarse.times), 1)
        inner = slice(1, -1)
        # 4 SE statistical gate plus a small allowance for the O(M^{-1/2}) bias
        assert np.all(
            np.abs(cov - analytic)[inner, inner] <= 4 * se[inner, inner] + 2e-3
        )

    def test_endpoint_conditioned_to_zero(self):
        # only the constant polynomial reaches t = 1 and its left-endpoint
        # sum telescopes to B_1 exactly, so the endpoint is pinned to
        # rounding error on any grid
        for M in (64, 256, 1024):
            ens = sample_pathwise(3, PathGrid.regular(M), 4000, seed=9)
            assert float((ens.paths[:, -1] ** 2).mean()) <= 1e-28

    def test_coefficient_norms(self):
        n_step = 4
        ens = sample_pathwise(
            n_step, PathGrid.regular(1024), 30_000, seed=10, keep_coeffs=True
        )
        cov, se = coefficient_covariance(ens)
        target = np.diag(1.0 / (2.0 * np.arange(n_step) + 1.0))
        assert np.all(np.abs(cov - target) <= 4 * se)

    def test_coeffs_absent_by_default(self):
        ens = sample_pathwise(2, PathGrid.regular(8), 5, seed=0)
        with pytest.raises(ValueError):
            coefficient_covariance(ens)


class TestStatistics:
    def test_two_method_agreement(self):
        coarse = PathGrid.regular(8)
        spectral_ens = sample_spectral(4, coarse, 30_000, seed=11)
        pathw = sample_pathwise(
            4, PathGrid.regular(1024), 30_000, seed=12, report_grid=coarse
        )
        cs, ses = ensemble_covariance(spectral_ens)
        cp, sep = ensemble_covariance(pathw)
        inner = slice(1, -1)
        gate = 4 * np.sqrt(ses**2 + sep**2)
        assert np.all(np.abs(cs - cp)[inner, inner] <= gate[inner, inner])

    def test_fluctuation_rows(self):
        g = PathGrid.regular(4)
        ens = sample_spectral(16, g, 20_000, seed=13)
        rows = fluctuation_rows(ens)
        assert [r["t"] for r in rows] == list(g.times)
        mid = rows[2]
        assert mid["t"] == 0.5
        assert mid["analytic_NCn"] == pytest.approx(
            16 * loop_covariance(0.5, 0.5, KernelConfig(16))
        )
        # empirical variance of sqrt(N) L at 1/2 tracks N C_N within 4 SE
        scaled = 16 * ens.paths[:, 2] ** 2
        se = float(scaled.std()) / np.sqrt(len(scaled))
        assert abs(mid["emp_var"] - mid["analytic_NCn"]) <= 4 * se

    def test_fluctuation_requires_spectral(self):
        ens = sample_pathwise(2, PathGrid.regular(8), 10, seed=1)
        with pytest.raises(ValueError):
            fluctuation_rows(ens)

    def test_variance_zero_at_endpoints(self):
        ens = sample_spectral(4, PathGrid.regular(4), 1000, seed=2)
        rows = fluctuation_rows(ens)
        assert rows[0]["emp_var"] == 0.0 and rows[-1]["emp_var"] == 0.0
        assert rows[0]["semicircle"] == 0.0

    def test_pair_correlation_diagonal(self):
        ens = sample_spectral(4, PathGrid.regular(8), 2000, seed=3)
        assert pair_correlation(ens, 2, 2) == pytest.approx(1.0)
        assert pair_correlation(ens, 0, 3) == 0.0  # pinned coordinate

    def test_off_diagonal_correlation_decays(self):
        # Corr(L_{1/4}, L_{3/4}) is -0.52 at N=2 and ~1e-3 for large N; with
        # R=3e4 the Monte Carlo noise is ~6e-3, so assert the robust trend
        g = PathGrid.regular(4)
        emp = {}
        for n_step in (2, 64, 256):
            ens = sample_spectral(n_step, g, 30_000, seed=14)
            emp[n_step] = abs(pair_correlation(ens, 1, 3))
        assert emp[2] > 0.4
        assert emp[64] < 0.05
        assert emp[256] < 0.05
