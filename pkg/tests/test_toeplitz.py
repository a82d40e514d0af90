import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import toeplitz as scipy_toeplitz

from toepwhite.checks import harmonic_trace_exact, weight_trace_exact
from toepwhite.model import ar1_sequence
from toepwhite.toeplitz import (
    CovarianceSequence,
    NotPositiveSemidefinite,
    build_toeplitz,
    fourier_vector,
    hermitian_sqrt,
    power_iteration_norm,
    regularized_hermitian_inverse,
    regularized_inverse_sqrt,
    spectral_norm,
    symbol_eval,
    symbol_sup_norm,
    toeplitz_matvec,
    unbias_weights,
)


def ar1_symbol(a, lam):
    return (1 - a**2) / (1 - 2 * a * np.cos(lam) + a**2)


def random_hermitian(rng, T):
    A = rng.standard_normal((T, T)) + 1j * rng.standard_normal((T, T))
    return (A + A.conj().T) / 2


def random_sequence(rng, T):
    # lags of a PSD Toeplitz matrix: autocorrelation of a random filter
    f = rng.standard_normal(T) + 1j * rng.standard_normal(T)
    r = np.array([np.vdot(f[: T - k], f[k:]) for k in range(T)]) / T
    return CovarianceSequence(r)


# --- construction ------------------------------------------------------------

def test_build_trivial():
    assert np.array_equal(build_toeplitz(CovarianceSequence([1.0])), np.array([[1.0]]))


def test_build_ar1_entries():
    R = build_toeplitz(CovarianceSequence([1, 0.6, 0.36]))
    idx = np.arange(3)
    assert np.allclose(R, 0.6 ** np.abs(idx[:, None] - idx[None, :]))
    assert R[0, 2] == pytest.approx(0.36)


def test_build_complex_convention():
    R = build_toeplitz(CovarianceSequence([1, 1j]))
    expected = np.array([[1, -1j], [1j, 1]])
    assert np.array_equal(R, expected)
    assert np.array_equal(R, R.conj().T)


def test_build_matches_scipy():
    rng = np.random.default_rng(3)
    seq = random_sequence(rng, 9)
    # scipy: first column c, first row r; our column is r_0..r_{T-1}
    ref = scipy_toeplitz(seq.half_lags, np.conj(seq.half_lags))
    assert np.allclose(build_toeplitz(seq), ref)


def test_sequence_validation():
    with pytest.raises(ValueError):
        CovarianceSequence([])
    with pytest.raises(ValueError):
        CovarianceSequence([-1.0, 0.2])
    with pytest.raises(ValueError):
        CovarianceSequence([1 + 1j, 0.2])


# --- symbol ------------------------------------------------------------------

def test_symbol_white():
    seq = CovarianceSequence([1.0])
    assert np.allclose(symbol_eval(seq, np.linspace(0, 6, 7)), 1.0)


@pytest.mark.parametrize("lam", [0.0, math.pi, 1.3])
def test_symbol_ar1_closed_form(lam):
    seq = ar1_sequence(0.6, 512)
    assert symbol_eval(seq, lam) == pytest.approx(ar1_symbol(0.6, lam), abs=1e-12)


def test_symbol_examples():
    seq = ar1_sequence(0.6, 512)
    assert symbol_eval(seq, 0.0) == pytest.approx(4.0, abs=1e-10)
    assert symbol_eval(seq, math.pi) == pytest.approx(0.25, abs=1e-10)


def test_symbol_rejects_corrupted_lags():
    seq = CovarianceSequence([1.0, 0.5])
    object.__setattr__(seq, "half_lags", np.array([1.0 + 0.5j, 0.5]))
    with pytest.raises(ValueError):
        symbol_eval(seq, 0.3)


def test_sup_norm_examples():
    assert symbol_sup_norm(CovarianceSequence([2.5])) == pytest.approx(2.5)
    assert symbol_sup_norm(ar1_sequence(0.6, 512)) == pytest.approx(4.0, abs=1e-3)
    assert symbol_sup_norm(CovarianceSequence([0, 1])) == pytest.approx(2.0)


def test_sup_norm_grid_precondition():
    with pytest.raises(ValueError):
        symbol_sup_norm(ar1_sequence(0.6, 16), grid_size=32)


def test_symbol_grid_matches_direct():
    rng = np.random.default_rng(5)
    seq = random_sequence(rng, 12)
    from toepwhite.toeplitz import symbol_grid

    G = 64
    lam = 2 * np.pi * np.arange(G) / G
    assert np.allclose(symbol_grid(seq, G), symbol_eval(seq, lam), atol=1e-12)


@given(st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_norm_below_sup_norm(T, seed):
    seq = random_sequence(np.random.default_rng(seed), T)
    assert spectral_norm(build_toeplitz(seq)) <= symbol_sup_norm(seq) * (1 + 1e-9) + 1e-12


# --- square root / norms / inverses ------------------------------------------

def test_sqrt_trivial_cases():
    assert np.allclose(hermitian_sqrt(np.eye(4)), np.eye(4))
    assert np.allclose(hermitian_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))


@given(st.integers(1, 128), st.integers(0, 2**32 - 1))
def test_sqrt_reconstructs(T, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((T, T)) + 1j * rng.standard_normal((T, T))
    M = A @ A.conj().T
    S = hermitian_sqrt(M)
    assert np.allclose(S, S.conj().T)
    assert np.linalg.norm(S @ S - M) <= 1e-10 * np.linalg.norm(M)


def test_sqrt_seeded_T16():
    rng = np.random.default_rng(16)
    A = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
    M = A @ A.conj().T
    S = hermitian_sqrt(M)
    assert np.linalg.norm(S @ S - M, 2) <= 1e-10 * np.linalg.norm(M, 2)


def test_sqrt_rejects_indefinite():
    with pytest.raises(NotPositiveSemidefinite):
        hermitian_sqrt(np.diag([1.0, -0.1]))
    # within tolerance: clamped
    S = hermitian_sqrt(np.diag([1.0, -1e-12]))
    assert S[1, 1] == 0.0


def test_spectral_norm_examples():
    assert spectral_norm(np.eye(8)) == 1.0
    assert spectral_norm(build_toeplitz(CovarianceSequence([0, 1]))) == pytest.approx(1.0)
    seq = ar1_sequence(0.6, 256)
    n = spectral_norm(build_toeplitz(seq))
    assert 3.9 < n < 4.0
    assert n < symbol_sup_norm(seq)


def test_spectral_norm_rejects_non_hermitian():
    with pytest.raises(ValueError):
        spectral_norm(np.array([[1.0, 2.0], [0.0, 1.0]]))


@given(st.integers(1, 128), st.integers(0, 2**32 - 1))
def test_spectral_norm_vs_power_iteration(T, seed):
    M = random_hermitian(np.random.default_rng(seed), T)
    ref = power_iteration_norm(M, tol=1e-15, max_iter=200000)
    assert spectral_norm(M) == pytest.approx(ref, rel=1e-8)


def test_power_iteration_fft_matvec():
    seq = ar1_sequence(0.6, 200)
    x = np.random.default_rng(0).standard_normal(200) + 0j
    assert np.allclose(toeplitz_matvec(seq, x), build_toeplitz(seq) @ x)
    n_fast = power_iteration_norm(lambda v: toeplitz_matvec(seq, v), dim=200)
    assert n_fast == pytest.approx(spectral_norm(build_toeplitz(seq)), rel=1e-8)


def test_regularized_inverse_identity():
    inv, flag = regularized_hermitian_inverse(np.eye(3))
    assert np.allclose(inv, np.eye(3)) and flag is False


def test_regularized_inverse_flooring():
    inv, flag = regularized_hermitian_inverse(np.diag([2.0, 1e-20]), floor_ratio=1e-8)
    assert flag is True
    assert np.allclose(np.diag(inv).real, [0.5, 0.5e8])


def test_regularized_inverse_ar1():
    R = build_toeplitz(ar1_sequence(0.6, 64))
    inv, flag = regularized_hermitian_inverse(R)
    assert not flag
    assert np.abs(R @ inv - np.eye(64)).max() <= 1e-10


def test_regularized_inverse_errors():
    with pytest.raises(ValueError):
        regularized_hermitian_inverse(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        regularized_hermitian_inverse(np.eye(2), floor_ratio=0.1)


def test_inverse_sqrt_consistent_with_inverse():
    R = build_toeplitz(ar1_sequence(0.6, 32))
    S, _ = regularized_inverse_sqrt(R)
    inv, _ = regularized_hermitian_inverse(R)
    assert np.allclose(S @ S, inv)


# --- Fourier and weight matrices ---------------------------------------------

def test_fourier_examples():
    assert np.allclose(fourier_vector(4, 0.0), 0.5)
    assert np.allclose(fourier_vector(4, math.pi / 2), np.array([1, -1j, -1, 1j]) / 2)


@given(st.integers(1, 200), st.floats(-10, 10), st.floats(-10, 10))
def test_fourier_unit_norm_and_lipschitz(T, l1, l2):
    d1, d2 = fourier_vector(T, l1), fourier_vector(T, l2)
    assert np.linalg.norm(d1) == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.norm(d1 - d2) <= T * abs(l1 - l2) / math.sqrt(3) + 1e-12


def test_unbias_weights_examples():
    assert np.array_equal(unbias_weights(1), np.array([[1.0]]))
    B = unbias_weights(3)
    assert B[0, 1] == 1.5 and B[1, 2] == 1.5 and B[0, 2] == 3.0
    assert np.trace(B @ B) == pytest.approx(30.0)
    assert np.trace(unbias_weights(2) @ unbias_weights(2)) == pytest.approx(10.0)


def test_unbias_weights_structure():
    B = unbias_weights(10)
    assert np.array_equal(B, B.T)
    assert np.all(np.diag(B) == 1) and np.all(B >= 1)


@pytest.mark.parametrize("T", range(1, 65))
def test_weight_trace_identity(T):
    exact = harmonic_trace_exact(T)
    assert weight_trace_exact(T) == exact
    B = unbias_weights(T)
    assert float(np.trace(B @ B)) == pytest.approx(float(exact), rel=1e-9)


def test_harmonic_identity_small_values():
    assert harmonic_trace_exact(3) == Fraction(30)
    assert harmonic_trace_exact(2) == Fraction(10)
    assert harmonic_trace_exact(1) == Fraction(1)


def test_weight_norm_bound_constant_reported():
    # ||B|| <= sqrt(2) T (sqrt(log T) + C): fit C, only require it stays bounded
    Cs = []
    for T in (16, 64, 256):
        nb = spectral_norm(unbias_weights(T))
        Cs.append(nb / (math.sqrt(2) * T) - math.sqrt(math.log(T)))
    assert max(Cs) < 2.0
