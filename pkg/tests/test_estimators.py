import numpy as np
import pytest
from hypothesis import given, strategies as st

from toepwhite.estimators import (
    EstimatorKind,
    estimate_covariance,
    estimate_covariance_batch,
    estimate_lags_direct,
    estimate_lags_fft,
    hadamard_trace_identity,
    oracle_biased_symbol,
    oracle_unbiased_symbol,
)
from toepwhite.model import (
    Hypothesis,
    NoiseModel,
    SourceModel,
    derive_seed,
    observe,
    sample_complex_gaussian_matrix,
    sample_noise,
)
from toepwhite.toeplitz import CovarianceSequence, spectral_norm, symbol_eval

B, U = EstimatorKind.BIASED, EstimatorKind.UNBIASED


def loop_lags(Y, kind):
    """Literal triple loop over n, t, k."""
    N, T = Y.shape
    out = []
    for k in range(T):
        acc = 0j
        for n in range(N):
            for t in range(T):
                if 0 <= t + k <= T - 1:
                    acc += Y[n, t + k] * np.conj(Y[n, t])
        out.append(acc / (N * T) if kind is B else acc / (N * (T - k)))
    return np.array(out)


def rand_block(seed, N, T):
    return sample_complex_gaussian_matrix(seed, N, T)


def test_all_ones_hand_values():
    Y = np.ones((1, 2))
    for fn in (estimate_lags_direct, estimate_lags_fft):
        assert np.allclose(fn(Y, B).lags, [1.0, 0.5])
        assert np.allclose(fn(Y, U).lags, [1.0, 1.0])


def test_zero_block():
    for fn in (estimate_lags_direct, estimate_lags_fft):
        assert np.all(fn(np.zeros((3, 5)), B).lags == 0)
    assert np.all(estimate_covariance(np.zeros((3, 5))) == 0)


def test_empty_rejected():
    with pytest.raises(ValueError):
        estimate_lags_direct(np.zeros((0, 4)))
    with pytest.raises(ValueError):
        estimate_lags_fft(np.zeros((3, 0)))


def test_direct_matches_loop_oracle():
    Y = rand_block(1, 3, 7)
    for kind in EstimatorKind:
        assert np.allclose(estimate_lags_direct(Y, kind).lags, loop_lags(Y, kind), atol=1e-14)


@given(st.integers(1, 8), st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_fft_matches_direct(N, T, seed):
    Y = rand_block(seed, N, T)
    for kind in EstimatorKind:
        d = estimate_lags_direct(Y, kind).lags
        f = estimate_lags_fft(Y, kind).lags
        assert np.abs(d - f).max() <= 1e-10 * np.abs(d).max()


def test_fft_white_noise_lag0():
    est = estimate_lags_fft(rand_block(2, 64, 512), B)
    assert est.lags[0].real == pytest.approx(1.0, abs=4 / np.sqrt(64 * 512))


@given(st.integers(1, 8), st.integers(2, 30), st.integers(0, 2**32 - 1))
def test_biased_unbiased_relation(N, T, seed):
    Y = rand_block(seed, N, T)
    rb = estimate_lags_fft(Y, B).lags
    ru = estimate_lags_fft(Y, U).lags
    k = np.arange(T)
    assert np.allclose(ru, rb * T / (T - k), rtol=1e-13, atol=0)


def test_estimate_tags_and_symmetry():
    Y = rand_block(3, 4, 9)
    est = estimate_lags_fft(Y, U)
    assert est.kind is U and (est.N, est.T) == (4, 9)
    assert est.lags[0].imag == 0 and est.lags[0].real >= 0
    M = estimate_covariance(Y, U)
    assert np.array_equal(M, M.conj().T)
    d = np.subtract.outer(np.arange(9), np.arange(9))
    for k in range(-8, 9):
        assert np.allclose(M[d == k], M[d == k][0])


@pytest.mark.parametrize("seed", range(5))
def test_biased_psd(seed):
    M = estimate_covariance(rand_block(seed, 16, 32), B)
    w = np.linalg.eigvalsh(M)
    assert w.min() >= -1e-10 * np.abs(w).max()


def test_batch_matches_single():
    Ys = np.stack([rand_block(s, 5, 12) for s in range(4)])
    Ms = estimate_covariance_batch(Ys, U)
    for Y, M in zip(Ys, Ms):
        assert np.allclose(M, estimate_covariance(Y, U), atol=1e-14)


def _sem(x):
    return np.std(x, ddof=1) / np.sqrt(len(x))


def test_expectations_k1():
    N, T = 200, 64
    model = NoiseModel.ar1(0.6, T)
    rb, ru = [], []
    for s in range(1000):
        V = sample_noise(derive_seed(21, s), model, N, T)
        rb.append(estimate_lags_fft(V, B).lags[1])
        ru.append(estimate_lags_fft(V, U).lags[1])
    rb, ru = np.real(rb), np.real(ru)
    assert abs(rb.mean() - (1 - 1 / T) * 0.6) <= 3 * _sem(rb)
    assert abs(ru.mean() - 0.6) <= 3 * _sem(ru)


def test_consistency_h0_median_decreases():
    med = []
    for T in (32, 64, 128):
        N = T // 2
        model = NoiseModel.ar1(0.6, T)
        errs = [spectral_norm(estimate_covariance(sample_noise(derive_seed(22, T, s), model, N, T), B) - model.R)
                for s in range(100)]
        med.append(np.median(errs))
    assert med[0] > med[1] > med[2]


def test_unbiased_positive_definite_mostly():
    T, N = 128, 64
    model = NoiseModel.ar1(0.6, T)
    V = np.stack([sample_noise(derive_seed(23, s), model, N, T).data for s in range(1000)])
    w = np.linalg.eigvalsh(estimate_covariance_batch(V, U))[:, 0]
    assert np.mean(w > 0) >= 0.99


def test_perturbed_model_consistency():
    med = []
    for T in (32, 64, 128):
        N = T // 2
        model = NoiseModel.ar1(0.6, T)
        src = SourceModel(N, 1.0)
        errs = []
        for s in range(100):
            Y = observe(Hypothesis.H1, derive_seed(24, T, s, 0), derive_seed(24, T, s, 1), model, src, N, T)
            errs.append(spectral_norm(estimate_covariance(Y, B) - model.R))
        med.append(np.median(errs))
    assert med[0] > med[1] > med[2]


# --- quadratic-form identities -----------------------------------------------

def test_oracles_zero():
    Y = np.zeros((3, 6))
    assert oracle_biased_symbol(Y, 1.0) == 0
    assert oracle_unbiased_symbol(Y, 1.0) == 0


def test_oracle_biased_hand_value():
    assert oracle_biased_symbol(np.ones((1, 2)), 0.0) == pytest.approx(2.0)


@pytest.mark.parametrize("lam", [0.0, 1.0, 2.5])
def test_oracle_identities_seeded(lam):
    Y = rand_block(31, 8, 16)
    for kind, fn in ((B, oracle_biased_symbol), (U, oracle_unbiased_symbol)):
        seq = CovarianceSequence(estimate_lags_direct(Y, kind).lags)
        lhs = fn(Y, lam)
        rhs = symbol_eval(seq, -lam)
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


def test_unbiased_oracle_with_ones_is_biased():
    Y = rand_block(32, 5, 11)
    for lam in (0.3, 2.0):
        assert oracle_unbiased_symbol(Y, lam, weights=np.ones((11, 11))) == pytest.approx(oracle_biased_symbol(Y, lam))


def test_hadamard_identity_examples():
    e0 = np.eye(4)[0]
    left, right = hadamard_trace_identity(e0, e0, np.eye(4), np.eye(4))
    assert left == right == 1
    rng = np.random.default_rng(7)
    c = lambda *s: rng.standard_normal(s) + 1j * rng.standard_normal(s)
    x, y, A, Bm = c(7), c(7), c(7, 7), c(7, 7)
    left, right = hadamard_trace_identity(x, y, A, Bm)
    assert abs(left - right) <= 1e-12 * abs(left)
    left, right = hadamard_trace_identity(x, y, A, np.ones((7, 7)))
    assert left == pytest.approx(np.vdot(x, A @ y), rel=1e-12)
    assert right == pytest.approx(left, rel=1e-12)


def test_hadamard_dimension_mismatch():
    with pytest.raises(ValueError):
        hadamard_trace_identity(np.ones(3), np.ones(4), np.eye(3), np.eye(3))
