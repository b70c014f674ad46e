import numpy as np
import pytest
import scipy.stats

from foudrift.fgn import (
    FgnSimulationError,
    SampleGrid,
    _dense_sample,
    _embedding_sqrt_eigs,
    cumulate_to_fbm,
    default_steps,
    fgn_autocovariance,
    simulate_fgn,
    spawn_rng,
)


def batch_increments(hurst, grid, n_paths, seed, **kw):
    return np.stack([
        simulate_fgn(hurst, grid, seed, stream=i, **kw).increments
        for i in range(n_paths)
    ])


class TestAutocovariance:
    def test_lag_zero_is_marginal_variance(self):
        assert fgn_autocovariance(0.62, 0, 1.0) == pytest.approx(1.0, rel=1e-14)
        assert fgn_autocovariance(0.62, 0, 0.1) == pytest.approx(0.1 ** 1.24, rel=1e-14)

    def test_brownian_increments_uncorrelated(self):
        for k in (1, 2, 7):
            assert fgn_autocovariance(0.5, k, 1.0) == pytest.approx(0.0, abs=1e-15)

    def test_value_at_h075(self):
        # (2^{1.5} - 2)/2, evaluated at 30 digits independently
        assert fgn_autocovariance(0.75, 1, 1.0) == pytest.approx(
            0.4142135623730950488, rel=1e-14
        )

    def test_matches_second_difference_of_motion_covariance(self):
        def second_difference(hurst, k, dt):
            r = lambda t, s: 0.5 * (t ** (2 * hurst) + s ** (2 * hurst)
                                    - abs(t - s) ** (2 * hurst))
            terms = (r((k + 1) * dt, dt), r(k * dt, dt), r((k + 1) * dt, 0.0), r(k * dt, 0.0))
            return terms[0] - terms[1] - terms[2] + terms[3], sum(abs(t) for t in terms)

        eps = np.finfo(float).eps
        for hurst in (0.51, 0.6, 0.7, 0.74):
            for k in (0, 1, 2, 5, 17):
                a = fgn_autocovariance(hurst, k, 0.3)
                b, envelope = second_difference(hurst, k, 0.3)
                # 4 rounding units of the covariance values being differenced
                assert abs(a - b) <= 4 * eps * max(abs(a), envelope)

    def test_long_memory_positivity(self):
        gam = fgn_autocovariance(0.7, np.arange(1, 200), 1.0)
        assert np.all(gam > 0)
        # partial sums keep growing: slowly decaying correlations
        assert gam[100:].sum() > 0.1 * gam[:100].sum()

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            fgn_autocovariance(1.2, 1, 1.0)
        with pytest.raises(ValueError):
            fgn_autocovariance(0.6, 1, -1.0)
        with pytest.raises(ValueError):
            fgn_autocovariance(0.6, -1, 1.0)


class TestGrid:
    def test_default_steps_power_of_two(self):
        assert default_steps(50.0) == 2048
        assert default_steps(100.0) == 4096
        assert default_steps(400.0) == 16384
        n = default_steps(1.0)
        assert 1.0 / n <= 0.025 < 2.0 / n

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            SampleGrid(-1.0, 16)
        with pytest.raises(ValueError):
            SampleGrid(1.0, 1)

    def test_dt_consistency(self):
        grid = SampleGrid(10.0, 64)
        assert grid.dt * grid.steps == pytest.approx(10.0, rel=1e-15)
        assert grid.times().shape == (65,)


class TestEmbedding:
    @pytest.mark.parametrize("hurst", [0.51, 0.55, 0.625, 0.7, 0.74])
    @pytest.mark.parametrize("steps", [2**8, 2**12, 2**16])
    def test_circulant_eigenvalues_nonnegative(self, hurst, steps):
        assert _embedding_sqrt_eigs(hurst, steps) is not None

    def test_non_power_of_two_accepted(self):
        sample = simulate_fgn(0.6, SampleGrid(1.0, 1000), seed=5)
        assert sample.increments.shape == (1000,)


class TestSimulate:
    def test_deterministic_bytes(self):
        grid = SampleGrid(10.0, 512)
        a = simulate_fgn(0.7, grid, seed=42, stream=3)
        b = simulate_fgn(0.7, grid, seed=42, stream=3)
        assert a.increments.tobytes() == b.increments.tobytes()

    def test_streams_differ(self):
        grid = SampleGrid(10.0, 256)
        a = simulate_fgn(0.7, grid, seed=42, stream=0)
        b = simulate_fgn(0.7, grid, seed=42, stream=1)
        assert not np.array_equal(a.increments, b.increments)

    def test_white_noise_case(self):
        grid = SampleGrid(1024.0, 1024)
        inc = batch_increments(0.5, grid, 400, seed=9)
        lag1 = (inc[:, :-1] * inc[:, 1:]).mean(axis=1)
        se = lag1.std(ddof=1) / np.sqrt(lag1.size)
        assert abs(lag1.mean()) <= 3 * se

    @pytest.mark.parametrize("hurst", [0.55, 0.7])
    def test_sample_autocovariance_matches(self, hurst):
        grid = SampleGrid(409.6, 4096)
        inc = batch_increments(hurst, grid, 1500, seed=17)
        for k in range(6):
            prods = inc[:, : inc.shape[1] - k] * inc[:, k:] if k else inc * inc
            per_path = prods.mean(axis=1)
            target = fgn_autocovariance(hurst, k, grid.dt)
            se = per_path.std(ddof=1) / np.sqrt(per_path.shape[0])
            assert abs(per_path.mean() - target) <= 3 * se, f"lag {k}"

    def test_marginal_chi_square(self):
        # 10^4 independent samples: first increment of independent paths
        grid = SampleGrid(256.0, 256)
        first = np.array([
            simulate_fgn(0.65, grid, seed=23, stream=i).increments[0]
            for i in range(10_000)
        ])
        z = first / np.sqrt(fgn_autocovariance(0.65, 0, grid.dt))
        edges = scipy.stats.norm.ppf(np.linspace(0.0, 1.0, 21))
        counts, _ = np.histogram(z, bins=edges)
        stat = ((counts - 500.0) ** 2 / 500.0).sum()
        p = scipy.stats.chi2.sf(stat, df=19)
        assert p >= 1e-3

    def test_dense_method_matches_law(self):
        grid = SampleGrid(64.0, 64)
        inc = batch_increments(0.7, grid, 1500, seed=31, method="dense")
        for k in (0, 1, 3):
            prods = inc[:, : inc.shape[1] - k] * inc[:, k:] if k else inc * inc
            per_path = prods.mean(axis=1)
            target = fgn_autocovariance(0.7, k, grid.dt)
            se = per_path.std(ddof=1) / np.sqrt(per_path.shape[0])
            assert abs(per_path.mean() - target) <= 3 * se

    def test_dense_failure_reports_min_eigenvalue(self):
        gamma = np.array([1.0, 0.9, -0.9])
        with pytest.raises(FgnSimulationError, match="minimal eigenvalue"):
            _dense_sample(gamma, spawn_rng(0))

    def test_seed_validation(self):
        with pytest.raises(ValueError):
            spawn_rng(-1)


class TestCumulate:
    def test_zero_increments(self):
        grid = SampleGrid(4.0, 4)
        sample = simulate_fgn(0.6, grid, seed=1)
        zero = type(sample)(
            increments=np.zeros(4), hurst=0.6, dt=1.0, seed=0, stream=0
        )
        path = cumulate_to_fbm(zero)
        assert np.array_equal(path.values, np.zeros(5))

    def test_single_increment(self):
        sample = simulate_fgn(0.6, SampleGrid(2.0, 2), seed=1)
        path = cumulate_to_fbm(sample)
        assert path.values[0] == 0.0
        assert path.values[1] == pytest.approx(sample.increments[0])
        assert path.values[2] == pytest.approx(sample.increments.sum())

    def test_terminal_variance_self_similarity(self):
        # Var(B_T) = T^{2H} exactly in law
        hurst = 0.6
        grid = SampleGrid(1.0, 2**12)
        terminal = np.array([
            cumulate_to_fbm(simulate_fgn(hurst, grid, seed=37, stream=i)).values[-1]
            for i in range(3000)
        ])
        var = terminal.var(ddof=1)
        se = var * np.sqrt(2.0 / (terminal.size - 1))
        assert abs(var - 1.0) <= 3 * se
