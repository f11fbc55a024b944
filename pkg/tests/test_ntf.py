"""Tests for the multiplicative-update CP factorization."""

import json
import math
import os

import numpy as np
import pytest

from faultband import (
    NtfConfig,
    NtfFactors,
    ParameterError,
    beta_divergence,
    decompose,
    update_step,
)


def scalar_factors(value=1.0):
    return NtfFactors(
        W=np.array([[value]]),
        H=np.array([[1.0]]),
        Q=np.array([[1.0]]),
    )


def random_rank1_tensor(rng, shape):
    w = rng.uniform(0.5, 2.0, size=shape[0])
    h = rng.uniform(0.5, 2.0, size=shape[1])
    q = rng.uniform(0.5, 2.0, size=shape[2])
    return np.einsum("i,j,m->ijm", w, h, q)


class TestBetaDivergence:
    def test_scalar_oracles(self):
        """Hand-computed divergence of c=2 against a fit of 1."""
        c = np.full((1, 1, 1), 2.0)
        f = scalar_factors()
        assert beta_divergence(c, f, 1.0) == pytest.approx(0.5, abs=1e-12)
        assert beta_divergence(c, f, 0.0) == pytest.approx(2 * math.log(2) - 1, abs=1e-12)
        assert beta_divergence(c, f, -1.0) == pytest.approx(1 - math.log(2), abs=1e-12)
        assert beta_divergence(c, f, 2.0) == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_exact_fit_scores_zero(self):
        rng = np.random.default_rng(0)
        w = rng.uniform(0.5, 1.5, size=(4, 2))
        h = rng.uniform(0.5, 1.5, size=(5, 2))
        q = rng.uniform(0.5, 1.5, size=(3, 2))
        f = NtfFactors(W=w, H=h, Q=q)
        c = f.reconstruct()
        for beta in (-1.0, 0.0, 0.5, 1.0, 2.0):
            assert beta_divergence(c, f, beta) == pytest.approx(0.0, abs=1e-9)

    def test_divergence_is_nonnegative(self):
        for seed in range(6):
            rng = np.random.default_rng(seed)
            c = rng.uniform(0.1, 2.0, size=(3, 4, 2))
            f = NtfFactors(
                W=rng.uniform(0.1, 1.0, size=(3, 2)),
                H=rng.uniform(0.1, 1.0, size=(4, 2)),
                Q=rng.uniform(0.1, 1.0, size=(2, 2)),
            )
            for beta in (-1.0, 0.0, 1.0, 2.0):
                assert beta_divergence(c, f, beta) >= 0.0

    def test_shape_mismatch_raises(self):
        with pytest.raises(ParameterError):
            beta_divergence(np.ones((2, 2, 2)), scalar_factors(), 1.0)

    def test_reconstruct_matches_triple_loop(self):
        rng = np.random.default_rng(5)
        f = NtfFactors(
            W=rng.uniform(size=(3, 2)),
            H=rng.uniform(size=(4, 2)),
            Q=rng.uniform(size=(5, 2)),
        )
        got = f.reconstruct()
        for i in range(3):
            for j in range(4):
                for m in range(5):
                    want = sum(f.W[i, k] * f.H[j, k] * f.Q[m, k] for k in range(2))
                    assert got[i, j, m] == pytest.approx(want, rel=1e-12)


class TestConfigValidation:
    def test_rejects_negative_non_special_beta(self):
        with pytest.raises(ParameterError):
            NtfConfig(beta=-0.5)
        with pytest.raises(ParameterError):
            NtfConfig(beta=-2.0)

    def test_accepts_special_and_positive_betas(self):
        for beta in (-1.0, 0.0, 0.5, 1.0, 2.0):
            assert NtfConfig(beta=beta).beta == beta

    def test_rejects_bad_rank_and_iterations(self):
        with pytest.raises(ParameterError):
            NtfConfig(rank=0)
        with pytest.raises(ParameterError):
            NtfConfig(max_iterations=0)
        with pytest.raises(ParameterError):
            NtfConfig(restarts=0)
        with pytest.raises(ParameterError):
            NtfConfig(epsilon_floor=0.0)

    def test_factor_validation(self):
        with pytest.raises(ParameterError):
            NtfFactors(W=np.array([[-1.0]]), H=np.array([[1.0]]), Q=np.array([[1.0]]))
        with pytest.raises(ParameterError):
            NtfFactors(W=np.ones((2, 2)), H=np.ones((2, 1)), Q=np.ones((2, 2)))


class TestUpdateStep:
    def test_exact_fit_is_a_fixed_point(self):
        """At a perfect reconstruction the multiplicative ratio is 1."""
        rng = np.random.default_rng(1)
        f = NtfFactors(
            W=rng.uniform(0.5, 1.5, size=(4, 2)),
            H=rng.uniform(0.5, 1.5, size=(5, 2)),
            Q=rng.uniform(0.5, 1.5, size=(3, 2)),
        )
        c = f.reconstruct()
        for beta in (-1.0, 0.0, 1.0):
            g = update_step(c, f, beta)
            assert np.allclose(g.W, f.W, rtol=1e-12, atol=1e-12)
            assert np.allclose(g.H, f.H, rtol=1e-12, atol=1e-12)
            assert np.allclose(g.Q, f.Q, rtol=1e-12, atol=1e-12)

    def test_single_update_never_increases_objective(self):
        for seed in range(5):
            rng = np.random.default_rng(seed)
            c = rng.uniform(0.05, 1.0, size=(6, 5, 4))
            f = NtfFactors(
                W=rng.uniform(0.1, 1.1, size=(6, 3)),
                H=rng.uniform(0.1, 1.1, size=(5, 3)),
                Q=rng.uniform(0.1, 1.1, size=(4, 3)),
            )
            for beta in (-1.0, 0.0, 1.0):
                before = beta_divergence(c, f, beta)
                after = beta_divergence(c, update_step(c, f, beta), beta)
                assert after <= before + 1e-10 * (1.0 + abs(before))

    def test_keeps_factors_nonnegative(self):
        rng = np.random.default_rng(2)
        c = rng.uniform(0.0, 1.0, size=(4, 4, 3))
        f = NtfFactors(
            W=rng.uniform(0.1, 1.1, size=(4, 2)),
            H=rng.uniform(0.1, 1.1, size=(4, 2)),
            Q=rng.uniform(0.1, 1.1, size=(3, 2)),
        )
        for beta in (-1.0, 0.0, 1.0):
            g = update_step(c, f, beta)
            assert np.all(g.W >= 0) and np.all(g.H >= 0) and np.all(g.Q >= 0)

    def test_inputs_left_unmodified(self):
        rng = np.random.default_rng(3)
        c = rng.uniform(0.1, 1.0, size=(3, 3, 2))
        f = NtfFactors(
            W=rng.uniform(0.1, 1.1, size=(3, 2)),
            H=rng.uniform(0.1, 1.1, size=(3, 2)),
            Q=rng.uniform(0.1, 1.1, size=(2, 2)),
        )
        w0 = f.W.copy()
        update_step(c, f, 1.0)
        assert np.array_equal(f.W, w0)

    def test_zero_tensor_entries_are_safe(self):
        """Zeros in the data must not produce NaN for any branch."""
        rng = np.random.default_rng(4)
        c = rng.uniform(0.0, 1.0, size=(5, 5, 3))
        c[0, :, :] = 0.0
        f = NtfFactors(
            W=rng.uniform(0.1, 1.1, size=(5, 2)),
            H=rng.uniform(0.1, 1.1, size=(5, 2)),
            Q=rng.uniform(0.1, 1.1, size=(3, 2)),
        )
        for beta in (-1.0, 0.0, 1.0):
            g = update_step(c, f, beta)
            assert np.all(np.isfinite(g.W))
            assert np.all(np.isfinite(g.H))
            assert np.all(np.isfinite(g.Q))

    def test_mismatched_factors_raise(self):
        c = np.ones((3, 3, 2))
        f = NtfFactors(W=np.ones((4, 2)), H=np.ones((3, 2)), Q=np.ones((2, 2)))
        with pytest.raises(ParameterError):
            update_step(c, f, 1.0)


class TestDecompose:
    def test_objective_trace_monotone(self):
        """The recorded divergence never increases beyond round-off slack."""
        for seed in range(5):
            rng = np.random.default_rng(seed)
            c = rng.uniform(0.02, 1.0, size=(8, 8, 4))
            for beta in (-1.0, 0.0, 1.0):
                f = decompose(c, NtfConfig(rank=2, beta=beta, max_iterations=60, rng_seed=seed))
                t = f.objective_trace
                assert t.size == f.iterations_run + 1
                for i in range(t.size - 1):
                    assert t[i + 1] <= t[i] + 1e-10 * (1.0 + abs(t[i]))

    def test_rank1_exact_recovery(self):
        rng = np.random.default_rng(10)
        c = random_rank1_tensor(rng, (6, 7, 5))
        f = decompose(c, NtfConfig(rank=1, beta=1.0, max_iterations=500,
                                   relative_objective_tolerance=0.0, rng_seed=0))
        rel = np.linalg.norm(f.reconstruct() - c) / np.linalg.norm(c)
        assert rel < 1e-6

    def test_constant_tensor_fits_exactly(self):
        c = np.full((4, 5, 3), 0.7)
        f = decompose(c, NtfConfig(rank=1, beta=1.0, max_iterations=200, rng_seed=1))
        assert f.objective_trace[-1] == pytest.approx(0.0, abs=1e-10)

    def test_h_columns_normalized_to_unit_max(self):
        rng = np.random.default_rng(11)
        c = rng.uniform(0.1, 1.0, size=(6, 6, 4))
        f = decompose(c, NtfConfig(rank=3, beta=1.0, max_iterations=50, rng_seed=2))
        assert np.allclose(f.H.max(axis=0), 1.0)

    def test_h_normalization_is_a_gauge_move(self):
        """Rescaling H into W must not change the reconstruction."""
        rng = np.random.default_rng(12)
        c = rng.uniform(0.1, 1.0, size=(5, 5, 3))
        f = decompose(c, NtfConfig(rank=2, beta=1.0, max_iterations=80, rng_seed=3))
        assert beta_divergence(c, f, 1.0) == pytest.approx(f.objective_trace[-1], rel=1e-6, abs=1e-9)

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(13)
        c = rng.uniform(0.05, 1.0, size=(5, 4, 3))
        cfg = NtfConfig(rank=2, beta=0.0, max_iterations=40, rng_seed=7)
        a = decompose(c, cfg)
        b = decompose(c, cfg)
        assert np.array_equal(a.W, b.W)
        assert np.array_equal(a.H, b.H)
        assert np.array_equal(a.Q, b.Q)
        d = decompose(c, NtfConfig(rank=2, beta=0.0, max_iterations=40, rng_seed=8))
        assert not np.array_equal(a.H, d.H)

    def test_restarts_keep_the_lowest_objective(self):
        """The first spawned initialisation is shared, so more restarts can
        only improve (or match) the final objective."""
        rng = np.random.default_rng(14)
        c = rng.uniform(0.05, 1.0, size=(6, 6, 3))
        single = decompose(c, NtfConfig(rank=2, beta=1.0, max_iterations=30, rng_seed=5))
        multi = decompose(c, NtfConfig(rank=2, beta=1.0, max_iterations=30, rng_seed=5, restarts=4))
        assert multi.objective_trace[-1] <= single.objective_trace[-1]

    def test_tolerance_stops_early(self):
        rng = np.random.default_rng(15)
        c = random_rank1_tensor(rng, (5, 5, 3))
        f = decompose(c, NtfConfig(rank=1, beta=1.0, max_iterations=5000,
                                   relative_objective_tolerance=1e-6, rng_seed=0))
        assert f.iterations_run < 5000

    def test_all_iterates_nonnegative(self):
        rng = np.random.default_rng(16)
        c = rng.uniform(0.0, 1.0, size=(5, 5, 3))
        for beta in (-1.0, 0.0, 1.0):
            f = decompose(c, NtfConfig(rank=2, beta=beta, max_iterations=40, rng_seed=4))
            assert np.all(f.W >= 0) and np.all(f.H >= 0) and np.all(f.Q >= 0)

    def test_carries_freq_bins_from_dependence_tensor(self, short_tensor):
        f = decompose(
            short_tensor,
            NtfConfig(rank=2, beta=1.0, max_iterations=3, rng_seed=0),
        )
        assert f.freq_bins is not None
        assert np.array_equal(f.freq_bins, short_tensor.freq_bins)


class TestExportFactors:
    def test_writes_matrices_and_metadata(self, tmp_path):
        rng = np.random.default_rng(17)
        c = rng.uniform(0.1, 1.0, size=(4, 4, 2))
        f = decompose(c, NtfConfig(rank=2, beta=1.0, max_iterations=10, rng_seed=0))
        from faultband import export_factors

        export_factors(f, str(tmp_path), stem="fac")
        for name, matrix in (("W", f.W), ("H", f.H), ("Q", f.Q)):
            path = tmp_path / f"fac_{name}.csv"
            assert path.exists()
            loaded = np.loadtxt(path, delimiter=",")
            assert np.allclose(loaded, matrix, rtol=0, atol=0)
        meta = json.loads((tmp_path / "fac.json").read_text())
        assert meta["rank"] == 2
        assert meta["beta"] == 1.0
        assert meta["iterations"] == f.iterations_run
        assert meta["final_objective"] == pytest.approx(f.objective_trace[-1])
