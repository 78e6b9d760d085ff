"""Sampler tests: exact second-moment engine against the independent
Wick/Isserlis oracle on tiny grids, Monte Carlo moments, reproducibility,
increment coupling, and serialization."""
import math

import numpy as np
import pytest

from rosenblatt.errors import GridTooSmallError, InvalidInputError, SizeError
from rosenblatt.grid import GridSpec, build_grid, s_rule
from rosenblatt.kernel import KernelSpec
from rosenblatt.sampler import (
    ChaosSampleBatch,
    batch_to_csv,
    discrete_second_moment,
    load_csv,
    load_npz,
    sample_chaos,
    sample_process_increment,
    save_npz,
)
from rosenblatt.wick import offdiag_expression, wick_moment

from helpers import tiny_grid, tiny_hat_tensor


def variance_se(values):
    # standard error of the sample variance from the sample's own m4
    v = np.asarray(values)
    var = np.var(v)
    m4 = np.mean((v - v.mean()) ** 4)
    return var, math.sqrt(max(m4 - var**2, 0.0) / len(v))


class TestExactEngineVsWickOracle:
    # the Gram/Mobius engine and the matching-enumeration oracle share no code
    def test_q2_tiny_grid_exact(self):
        ker = KernelSpec((-0.6, -0.7))
        grid = tiny_grid(n_cells=6, left=2.0, horizon=1.0)
        f_hat = tiny_hat_tensor(ker, grid)
        h = grid.widths[0]
        oracle = wick_moment(offdiag_expression(f_hat) ** 2, h)
        engine = discrete_second_moment(ker, grid)
        assert engine == pytest.approx(oracle, rel=1e-10)

    def test_q3_tiny_grid_exact(self):
        ker = KernelSpec((-0.55, -0.6, -0.65))
        grid = tiny_grid(n_cells=5, left=1.5, horizon=1.0)
        f_hat = tiny_hat_tensor(ker, grid)
        h = grid.widths[0]
        oracle = wick_moment(offdiag_expression(f_hat) ** 2, h)
        engine = discrete_second_moment(ker, grid)
        assert engine == pytest.approx(oracle, rel=1e-10)

    def test_q1_norm_identity(self):
        # for q=1 the second moment is just the squared norm of the
        # discretized kernel; reassemble it directly from factor columns
        from rosenblatt.sampler import factor_matrix

        ker = KernelSpec((-0.6,))
        grid = tiny_grid(n_cells=8, left=3.0, horizon=1.0)
        b = factor_matrix(grid.edges, -0.6, grid.s_nodes)
        direct = ker.constant**2 * float(np.sum((b @ grid.s_weights) ** 2))
        assert discrete_second_moment(ker, grid) == pytest.approx(direct, rel=1e-12)


class TestSampleMoments:
    def test_q2_tiny_grid_second_moment_vs_oracle(self):
        ker = KernelSpec((-0.6, -0.7))
        grid = tiny_grid(n_cells=6, left=2.0, horizon=1.0)
        f_hat = tiny_hat_tensor(ker, grid)
        oracle = wick_moment(offdiag_expression(f_hat) ** 2, grid.widths[0])
        batch = sample_chaos(ker, grid, 40000, seed=7)
        var, se = variance_se(batch.values)
        m2 = float(np.mean(batch.values**2))
        assert abs(m2 - oracle) < 4 * se

    def test_q3_tiny_grid_second_moment_vs_oracle(self):
        ker = KernelSpec((-0.55, -0.6, -0.65))
        grid = tiny_grid(n_cells=5, left=1.5, horizon=1.0)
        f_hat = tiny_hat_tensor(ker, grid)
        oracle = wick_moment(offdiag_expression(f_hat) ** 2, grid.widths[0])
        batch = sample_chaos(ker, grid, 20000, seed=11)
        _, se = variance_se(batch.values)
        m2 = float(np.mean(batch.values**2))
        assert abs(m2 - oracle) < 4 * se

    def test_q1_mean_and_variance(self):
        # linear Gaussian functional: mean 0, variance = discrete norm
        ker = KernelSpec((-0.6,))
        grid = build_grid(ker, n_core=256, s_panels=12)
        batch = sample_chaos(ker, grid, 100_000, seed=3)
        target = batch.second_moment
        var, se = variance_se(batch.values)
        assert abs(var - target) < 4 * se
        mean_se = np.std(batch.values) / math.sqrt(batch.n)
        assert abs(batch.mean()) < 4 * mean_se

    def test_mean_zero_q2_q3(self):
        for gamma, m in [((-0.6, -0.7), 20000), ((-0.55, -0.6, -0.65), 10000)]:
            ker = KernelSpec(gamma)
            grid = tiny_grid(n_cells=6, left=2.0, horizon=1.0)
            batch = sample_chaos(ker, grid, m, seed=19)
            mean_se = np.std(batch.values) / math.sqrt(m)
            assert abs(batch.mean()) < 4 * mean_se

    def test_sample_variance_matches_engine_on_default_grid(self):
        # end-to-end: MC variance vs the exact engine on a real grid
        ker = KernelSpec((-0.6, -0.7))
        grid = build_grid(ker, n_core=1024, s_panels=24)
        batch = sample_chaos(ker, grid, 8000, seed=123)
        var, se = variance_se(batch.values)
        assert abs(var - batch.second_moment) < 4 * se


class TestReproducibility:
    def test_same_seed_bit_identical(self):
        ker = KernelSpec((-0.6, -0.7))
        grid = tiny_grid(n_cells=6, left=2.0, horizon=1.0)
        a = sample_chaos(ker, grid, 500, seed=42)
        b = sample_chaos(ker, grid, 500, seed=42)
        assert np.array_equal(a.values, b.values)

    def test_chunk_layout_invariance(self):
        # realization k's noise depends only on (seed, k); the assembled
        # value can move by summation-order ulps when BLAS sees different
        # chunk shapes, nothing more
        ker = KernelSpec((-0.6, -0.7))
        grid = tiny_grid(n_cells=6, left=2.0, horizon=1.0)
        a = sample_chaos(ker, grid, 300, seed=9, chunk_size=7)
        b = sample_chaos(ker, grid, 300, seed=9, chunk_size=300)
        np.testing.assert_allclose(a.values, b.values, rtol=1e-12, atol=1e-14)

    def test_noise_streams_chunk_invariant_bitwise(self):
        from rosenblatt.sampler import _chunk_normals

        children = np.random.SeedSequence(9).spawn(20)
        whole = _chunk_normals(children, 50)
        parts = np.vstack([_chunk_normals(children[:13], 50),
                           _chunk_normals(children[13:], 50)])
        assert np.array_equal(whole, parts)

    def test_prefix_stability(self):
        # first k realizations of a longer batch equal the shorter batch
        ker = KernelSpec((-0.6,))
        grid = tiny_grid(n_cells=6, left=2.0, horizon=1.0)
        a = sample_chaos(ker, grid, 100, seed=5)
        b = sample_chaos(ker, grid, 40, seed=5)
        assert np.array_equal(a.values[:40], b.values)

    def test_different_seeds_differ(self):
        ker = KernelSpec((-0.6, -0.7))
        grid = tiny_grid(n_cells=6, left=2.0, horizon=1.0)
        a = sample_chaos(ker, grid, 100, seed=1)
        b = sample_chaos(ker, grid, 100, seed=2)
        assert not np.allclose(a.values, b.values)


class TestIncrements:
    def test_full_interval_matches_plain_call(self):
        ker = KernelSpec((-0.6, -0.7))
        grid = tiny_grid(n_cells=6, left=2.0, horizon=1.0)
        a = sample_chaos(ker, grid, 200, seed=21)
        b = sample_process_increment(ker, grid, (0.0, 1.0), 200, seed=21)
        assert np.array_equal(a.values, b.values)

    def test_degenerate_span_is_zero(self):
        ker = KernelSpec((-0.6, -0.7))
        grid = tiny_grid(n_cells=6, left=2.0, horizon=1.0)
        b = sample_process_increment(ker, grid, (0.5, 0.5), 50, seed=2)
        assert np.all(b.values == 0.0)
        assert b.second_moment == 0.0

    def test_pathwise_additivity(self):
        # Z(1) vs Z(0.5) + (Z(1)-Z(0.5)) on shared noise: only the s-rule
        # differs between the two sides, so the residual is small
        ker = KernelSpec((-0.6, -0.7))
        grid = build_grid(ker, n_core=512, s_panels=24)
        full = sample_chaos(ker, grid, 2000, seed=77)
        first = sample_process_increment(ker, grid, (0.0, 0.5), 2000, seed=77)
        second = sample_process_increment(ker, grid, (0.5, 1.0), 2000, seed=77)
        resid = full.values - first.values - second.values
        rms_ratio = np.sqrt(np.mean(resid**2) / np.mean(full.values**2))
        assert rms_ratio < 0.05

    def test_increment_scaling_ratio(self):
        # stationarity + self-similarity: E[(Z(2s)-Z(s))^2]/E[Z(s)^2] is
        # s-independent in the continuum; exact discrete m2 should agree
        # across two scales to within discretization error
        ker = KernelSpec((-0.6, -0.7))
        grid = build_grid(ker, n_core=2048, s_panels=48)
        ratios = []
        for s in (0.2, 0.4):
            inc = discrete_second_moment(ker, grid, interval=(s, 2 * s))
            base = discrete_second_moment(ker, grid, interval=(0.0, s))
            ratios.append(inc / base)
        assert ratios[0] == pytest.approx(ratios[1], rel=0.02)

    def test_span_validation(self):
        ker = KernelSpec((-0.6, -0.7))
        grid = tiny_grid(n_cells=6, left=2.0, horizon=1.0)
        with pytest.raises(InvalidInputError):
            sample_process_increment(ker, grid, (0.5, 0.2), 10, seed=1)
        with pytest.raises(InvalidInputError):
            sample_process_increment(ker, grid, (-0.1, 0.5), 10, seed=1)


class TestBrownianOutput:
    def test_terminal_brownian_variance_and_orthogonality(self):
        ker = KernelSpec((-0.6, -0.7))
        grid = build_grid(ker, n_core=512, s_panels=12)
        batch = sample_chaos(ker, grid, 20000, seed=13, return_brownian=True)
        w = batch.brownian
        var, se = variance_se(w)
        assert abs(var - 1.0) < 4 * se  # W(1) is standard
        # even chaos is uncorrelated with the first chaos
        corr = np.corrcoef(batch.values, w)[0, 1]
        assert abs(corr) < 4 / math.sqrt(batch.n)


class TestErrorsAndValidation:
    def test_order_cap(self):
        ker = KernelSpec((-0.52, -0.55, -0.6, -0.58))
        grid = tiny_grid(n_cells=6, left=2.0, horizon=1.0)
        with pytest.raises(SizeError):
            sample_chaos(ker, grid, 10, seed=1)
        with pytest.raises(SizeError):
            discrete_second_moment(ker, grid)

    def test_seed_and_count_validation(self):
        ker = KernelSpec((-0.6,))
        grid = tiny_grid(n_cells=6, left=2.0, horizon=1.0)
        with pytest.raises(InvalidInputError):
            sample_chaos(ker, grid, -1, seed=1)
        with pytest.raises(InvalidInputError):
            sample_chaos(ker, grid, 10, seed=-3)
        with pytest.raises(InvalidInputError):
            sample_chaos(ker, grid, 10, seed=1.5)

    def test_grid_too_small_enforced(self):
        # near face 1 the required window exceeds any modest cap
        ker = KernelSpec((-0.502, -0.7))
        grid = build_grid(ker, n_core=128, s_panels=8, far_cap=100.0,
                          enforce_tail_bound=True)
        assert grid.tail_estimate > grid.tail_tolerance
        with pytest.raises(GridTooSmallError) as exc:
            sample_chaos(ker, grid, 10, seed=1)
        assert exc.value.required_window > 100.0

    def test_non_enforcing_grid_samples_anyway(self):
        ker = KernelSpec((-0.502, -0.7))
        grid = build_grid(ker, n_core=128, s_panels=8, far_cap=100.0)
        batch = sample_chaos(ker, grid, 10, seed=1)
        assert batch.n == 10

    def test_empty_batch(self):
        ker = KernelSpec((-0.6,))
        grid = tiny_grid(n_cells=6, left=2.0, horizon=1.0)
        batch = sample_chaos(ker, grid, 0, seed=1)
        assert batch.n == 0 and batch.variance() == 0.0


class TestRefinement:
    def test_variance_gap_shrinks_along_doubling(self):
        # refine mesh and s-rule together; |m2 - 1| must decrease at each step
        ker = KernelSpec((-0.6, -0.7))
        gaps = []
        for n_core, s_panels in [(512, 12), (1024, 24), (2048, 48), (4096, 96)]:
            grid = build_grid(ker, n_core=n_core, s_panels=s_panels)
            gaps.append(abs(discrete_second_moment(ker, grid) - 1.0))
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 0.08


class TestSerialization:
    def test_csv_roundtrip(self, tmp_path):
        ker = KernelSpec((-0.6, -0.7))
        grid = tiny_grid(n_cells=6, left=2.0, horizon=1.0)
        batch = sample_chaos(ker, grid, 25, seed=4)
        path = tmp_path / "batch.csv"
        batch_to_csv(batch, path, extra_header={"note": "test"})
        loaded = load_csv(path)
        assert np.array_equal(loaded["values"], batch.values)  # repr round-trips
        assert loaded["header"]["hash"] == batch.content_hash()
        assert loaded["header"]["seed"] == 4
        assert loaded["header"]["note"] == "test"
        assert loaded["header"]["kernel"]["gamma"] == [-0.6, -0.7]

    def test_npz_roundtrip(self, tmp_path):
        ker = KernelSpec((-0.6, -0.7))
        grid = tiny_grid(n_cells=6, left=2.0, horizon=1.0)
        batch = sample_chaos(ker, grid, 25, seed=4, return_brownian=True)
        path = tmp_path / "batch.npz"
        save_npz(batch, path)
        loaded = load_npz(path)
        assert np.array_equal(loaded["values"], batch.values)
        assert np.array_equal(loaded["brownian"], batch.brownian)
        assert loaded["hash"] == batch.content_hash()
        assert loaded["meta"]["interval"] == [0.0, 1.0]

    def test_empty_csv(self, tmp_path):
        ker = KernelSpec((-0.6,))
        grid = tiny_grid(n_cells=6, left=2.0, horizon=1.0)
        batch = sample_chaos(ker, grid, 0, seed=1)
        path = tmp_path / "empty.csv"
        batch_to_csv(batch, path)
        loaded = load_csv(path)
        assert len(loaded["values"]) == 0
        assert loaded["header"]["n"] == 0
