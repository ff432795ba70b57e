# Copyright 2025 The cayley-rcs Authors
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import stats

from cayley_rcs.errors import NoConvergence, NotHermitian, SingularMatrix
from cayley_rcs.field import MACHINE
from cayley_rcs.linalg import (
    dagger,
    haar_unitary,
    haar_unitary_batch,
    hermitian_eig,
    max_abs,
    qr,
    sample_ginibre,
    solve,
    unitarity_residual,
)

entries = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_subnormal=False)


def _random_hermitian(N, rng):
    A = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    return (A + A.conj().T) / 2


def _hermitian_from(re, im):
    A = re + 1j * im
    return (A + A.conj().T) / 2


# -- unitarity_residual ---------------------------------------------------------------


def test_unitarity_residual_examples():
    assert unitarity_residual(np.eye(2, dtype=complex)) == 0
    assert unitarity_residual(np.diag([1, 2]).astype(complex)) == pytest.approx(3)


# -- hermitian_eig ------------------------------------------------------------------


def test_eig_identity():
    eig = hermitian_eig(np.eye(2, dtype=complex))
    np.testing.assert_allclose(eig.eigenvalues, [1, 1])
    np.testing.assert_allclose(eig.eigenvectors @ dagger(eig.eigenvectors), np.eye(2), atol=1e-15)


def test_eig_diagonal_is_sorted_ascending():
    eig = hermitian_eig(np.diag([1.0, -1.0]).astype(complex))
    np.testing.assert_allclose(eig.eigenvalues, [-1, 1])
    np.testing.assert_allclose(np.abs(eig.eigenvectors), [[0, 1], [1, 0]])


@pytest.mark.parametrize("N", [2, 3, 4])
def test_eig_random_reconstruction_at_machine_precision(rng, N):
    for _ in range(20):
        H = _random_hermitian(N, rng)
        eig = hermitian_eig(H)
        assert max_abs(eig.reconstruct() - H) < 1e-12
        np.testing.assert_allclose(eig.eigenvalues, np.linalg.eigvalsh(H), atol=1e-12)
        assert max_abs(dagger(eig.eigenvectors) @ eig.eigenvectors - np.eye(N)) < 1e-12


def test_eig_high_precision(rng, mp256):
    H = mp256.array(_random_hermitian(4, rng))
    eig = hermitian_eig(H)
    assert max_abs(eig.reconstruct() - H) < mp256.real(10) ** -70
    gram = dagger(eig.eigenvectors) @ eig.eigenvectors - mp256.eye(4)
    assert max_abs(gram) < mp256.real(10) ** -70
    assert all(a <= b for a, b in zip(eig.eigenvalues, eig.eigenvalues[1:]))


def test_eig_is_deterministic(rng):
    H = _random_hermitian(4, rng)
    first, second = hermitian_eig(H), hermitian_eig(H.copy())
    np.testing.assert_array_equal(first.eigenvalues, second.eigenvalues)
    np.testing.assert_array_equal(first.eigenvectors, second.eigenvectors)


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian, match="not Hermitian"):
        hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))


def test_eig_sweep_cap(rng):
    with pytest.raises(NoConvergence, match="0 sweeps"):
        hermitian_eig(_random_hermitian(4, rng), max_sweeps=0)


def test_eig_conjugate_and_negated(rng):
    H = _random_hermitian(4, rng)
    eig = hermitian_eig(H)
    assert max_abs(eig.conjugate().reconstruct() - H.conj()) < 1e-12
    negated = eig.negated()
    assert max_abs(negated.reconstruct() + H) < 1e-12
    assert list(negated.eigenvalues) == sorted(negated.eigenvalues)


@seed(5)
@settings(max_examples=150, deadline=None)
@given(
    re=arrays(np.float64, (4, 4), elements=entries),
    im=arrays(np.float64, (4, 4), elements=entries),
)
def test_eig_property_reconstruction_and_orthonormality(re, im):
    H = _hermitian_from(re, im)
    eig = hermitian_eig(H)
    scale = 1 + max_abs(H)
    assert max_abs(eig.reconstruct() - H) <= 1e-11 * scale
    assert max_abs(dagger(eig.eigenvectors) @ eig.eigenvectors - np.eye(4)) <= 1e-11


@seed(6)
@settings(max_examples=150, deadline=None)
@given(
    re=arrays(np.float64, (2, 2), elements=entries),
    im=arrays(np.float64, (2, 2), elements=entries),
)
def test_eig_property_closed_form_2x2(re, im):
    H = _hermitian_from(re, im)
    eig = hermitian_eig(H)
    scale = 1 + max_abs(H)
    assert max_abs(eig.reconstruct() - H) <= 1e-11 * scale
    assert max_abs(dagger(eig.eigenvectors) @ eig.eigenvectors - np.eye(2)) <= 1e-11


# -- solve / qr ---------------------------------------------------------------------


def test_solve_high_precision(rng, mp256):
    A = mp256.array(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    X = mp256.array(rng.normal(size=(4, 2)))
    B = A @ X
    assert max_abs(solve(A, B) - X) < mp256.real(10) ** -60


def test_solve_singular(mp256):
    A = np.array([[1, 2], [2, 4]], dtype=complex)
    with pytest.raises(SingularMatrix):
        solve(A, np.eye(2, dtype=complex))
    with pytest.raises(SingularMatrix):
        solve(mp256.array(A), mp256.eye(2))


def test_qr_high_precision(rng, mp256):
    M = mp256.array(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    Q, R = qr(M)
    assert unitarity_residual(Q) < mp256.real(10) ** -70
    assert max_abs(Q @ R - M) < mp256.real(10) ** -70
    for i in range(4):
        assert R[i, i].imag == 0 and R[i, i].real > 0
        for j in range(i):
            assert R[i, j] == 0


# -- sampling -----------------------------------------------------------------------


def test_ginibre_is_deterministic():
    first = sample_ginibre(2, np.random.default_rng(7))
    second = sample_ginibre(2, np.random.default_rng(7))
    np.testing.assert_array_equal(first, second)


def test_ginibre_mean_is_zero():
    rng = np.random.default_rng(11)
    samples = np.stack([sample_ginibre(2, rng) for _ in range(100_000)]).ravel()
    sigma = np.sqrt(0.5 / samples.size)
    assert abs(samples.real.mean()) < 3 * sigma
    assert abs(samples.imag.mean()) < 3 * sigma


def test_ginibre_second_moment():
    rng = np.random.default_rng(13)
    samples = np.stack([sample_ginibre(4, rng) for _ in range(10_000)])
    assert np.mean(np.abs(samples) ** 2) == pytest.approx(1, rel=0.05)


def test_ginibre_rejects_empty():
    with pytest.raises(ValueError):
        sample_ginibre(0, np.random.default_rng(0))


@pytest.mark.parametrize("N", [2, 4])
def test_haar_unitary_residual(rng, N):
    for _ in range(100):
        assert unitarity_residual(haar_unitary(N, rng)) < 1e-12


def test_haar_unitary_high_precision_matches_machine(mp256):
    U = haar_unitary(4, np.random.default_rng(21))
    V = haar_unitary(4, np.random.default_rng(21), field=mp256)
    assert unitarity_residual(V) < mp256.real(10) ** -70
    assert max_abs(MACHINE.array(V) - U) < 1e-12


def test_haar_marginal_is_uniform():
    rng = np.random.default_rng(17)
    draws = np.array([abs(haar_unitary(2, rng)[0, 0]) ** 2 for _ in range(20_000)])
    assert stats.kstest(draws, "uniform").pvalue > 0.01

    batch = haar_unitary_batch(2, 100_000, np.random.default_rng(18))
    assert stats.kstest(np.abs(batch[:, 0, 0]) ** 2, "uniform").pvalue > 0.01


def test_haar_left_invariance():
    M = haar_unitary(2, np.random.default_rng(3))
    U = haar_unitary_batch(2, 100_000, np.random.default_rng(4))
    V = haar_unitary_batch(2, 100_000, np.random.default_rng(5))
    bins = np.linspace(-np.pi, np.pi, 21)
    shifted, _ = np.histogram(np.angle(np.linalg.eigvals(M @ U)).ravel(), bins)
    plain, _ = np.histogram(np.angle(np.linalg.eigvals(V)).ravel(), bins)
    _, pvalue, _, _ = stats.chi2_contingency(np.stack([shifted, plain]))
    assert pvalue > 0.01


def test_haar_batch_is_unitary():
    batch = haar_unitary_batch(4, 50, np.random.default_rng(1))
    for U in batch:
        assert unitarity_residual(U) < 1e-12
