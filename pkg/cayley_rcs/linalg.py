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

"""Small dense complex linear algebra over any scalar backend.

Matrices are numpy arrays whose elements belong to a :class:`~cayley_rcs.field.Field`
(``complex128`` for the machine field, ``dtype=object`` otherwise). Gates are at
most 4x4, so the eigensolver is a closed form for 2x2 and cyclic Jacobi above.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, Optional, Tuple, TypeAlias

import numpy as np

from cayley_rcs.config import JACOBI_MAX_SWEEPS
from cayley_rcs.errors import NoConvergence, NotHermitian, SingularMatrix
from cayley_rcs.field import MACHINE, Field, infer_field

LOGGER = logging.getLogger(__name__)

SquareMatrix: TypeAlias = np.ndarray


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


def dagger(M: SquareMatrix) -> SquareMatrix:
    """Conjugate transpose."""
    return np.conj(M).T


def max_abs(M: np.ndarray) -> Any:
    """Largest entry modulus, as a real element of the matrix's field."""
    if M.size == 0:
        return 0
    return max(abs(x) for x in M.flat)


def _square_dim(M: np.ndarray) -> int:
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return M.shape[0]


def unitarity_residual(M: SquareMatrix, *, field: Optional[Field] = None) -> Any:
    """Return ``max |(M^dagger M - I)_ij|``."""
    field = field or infer_field(M)
    n = _square_dim(M)
    return max_abs(dagger(M) @ M - field.eye(n))


def hermiticity_residual(M: SquareMatrix) -> Any:
    _square_dim(M)
    return max_abs(M - dagger(M))


def solve(A: np.ndarray, B: np.ndarray, *, field: Optional[Field] = None) -> np.ndarray:
    """Solve ``A X = B`` by Gaussian elimination with partial pivoting.

    Raises
    ------
    SingularMatrix
        If a pivot vanishes at the field's precision.
    """
    field = field or infer_field(A, B)
    n = _square_dim(A)

    if field.name == MACHINE.name:
        if np.linalg.cond(A) * MACHINE.eps >= 1:
            raise SingularMatrix("matrix is singular to machine precision")
        return np.linalg.solve(A, B)

    A = np.array(A, dtype=object, copy=True)
    X = np.array(B, dtype=object, copy=True)
    vector = X.ndim == 1
    if vector:
        X = X.reshape(n, 1)

    scale = max_abs(A) or 1
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(A[r, col]))
        if field.is_negligible(A[pivot, col], scale):
            raise SingularMatrix(f"zero pivot in column {col}")
        if pivot != col:
            A[[col, pivot]] = A[[pivot, col]]
            X[[col, pivot]] = X[[pivot, col]]
        for r in range(col + 1, n):
            factor = A[r, col] / A[col, col]
            if factor == 0:
                continue
            A[r, col:] = A[r, col:] - factor * A[col, col:]
            X[r] = X[r] - factor * X[col]

    for col in range(n - 1, -1, -1):
        X[col] = (X[col] - A[col, col + 1 :] @ X[col + 1 :]) / A[col, col]

    return X.reshape(n) if vector else X


def qr(M: np.ndarray, *, field: Optional[Field] = None) -> Tuple[np.ndarray, np.ndarray]:
    """QR factorization of a square matrix.

    Uses LAPACK on the machine field and twice-iterated modified Gram-Schmidt
    otherwise, which yields a positive real diagonal in ``R``.
    """
    field = field or infer_field(M)
    n = _square_dim(M)

    if field.name == MACHINE.name:
        return np.linalg.qr(M)

    Q = field.zeros((n, n))
    R = field.zeros((n, n))
    for j in range(n):
        v = np.array(M[:, j], dtype=object, copy=True)
        for _ in range(2):
            for i in range(j):
                coeff = np.conj(Q[:, i]) @ v
                R[i, j] = R[i, j] + coeff
                v = v - coeff * Q[:, i]
        norm = field.sqrt(sum(field.abs2(x) for x in v))
        if field.is_negligible(norm, max_abs(M) or 1):
            raise SingularMatrix(f"column {j} is linearly dependent")
        R[j, j] = field.lift(norm)
        Q[:, j] = v / norm
    return Q, R


def sample_ginibre(N: int, rng: np.random.Generator, *, field: Field = MACHINE) -> SquareMatrix:
    """N x N matrix of i.i.d. standard complex Gaussians (E|z|^2 = 1).

    Entries come from Box-Muller on uniforms drawn from ``rng`` in row-major
    order, so the result depends only on the generator state.
    """
    if N < 1:
        raise ValueError(f"matrix size must be positive, got {N}")

    uniforms = rng.random((N * N, 2))
    if field.name == MACHINE.name:
        radius = np.sqrt(-np.log1p(-uniforms[:, 0]))
        angle = 2 * np.pi * uniforms[:, 1]
        return (radius * np.exp(1j * angle)).reshape(N, N)

    two_pi = 2 * field.pi
    entries = []
    for u1, u2 in uniforms:
        radius = field.sqrt(-field.log(1 - field.real(u1)))
        angle = two_pi * field.real(u2)
        entries.append(field.complex(radius * field.cos(angle), radius * field.sin(angle)))
    return np.array(entries, dtype=object).reshape(N, N)


def haar_unitary(N: int, rng: np.random.Generator, *, field: Field = MACHINE) -> SquareMatrix:
    """Haar-random unitary: QR of a Ginibre sample with R's diagonal phases divided out."""
    Z = sample_ginibre(N, rng, field=field)
    Q, R = qr(Z, field=field)
    diag = np.diag(R)
    phases = np.array([d / abs(d) for d in diag], dtype=Q.dtype)
    return Q * phases[np.newaxis, :]


def haar_unitary_batch(N: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` machine-precision Haar unitaries as a ``(count, N, N)`` array."""
    uniforms = rng.random((count, N, N, 2))
    radius = np.sqrt(-np.log1p(-uniforms[..., 0]))
    Z = radius * np.exp(2j * np.pi * uniforms[..., 1])
    Q, R = np.linalg.qr(Z)
    diag = np.diagonal(R, axis1=-2, axis2=-1)
    return Q * (diag / np.abs(diag))[:, np.newaxis, :]


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenpairs ``(h_alpha, psi_alpha)`` of a Hermitian matrix.

    ``eigenvalues`` are real and ascending, ``eigenvectors`` holds the
    orthonormal eigenvectors as columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    field: Field = MACHINE

    def __post_init__(self) -> None:
        object.__setattr__(self, "eigenvalues", _frozen(self.eigenvalues))
        object.__setattr__(self, "eigenvectors", _frozen(self.eigenvectors))

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def projector(self, alpha: int) -> SquareMatrix:
        psi = self.eigenvectors[:, alpha]
        return np.outer(psi, np.conj(psi))

    def apply_function(self, values: Any) -> SquareMatrix:
        """``sum_alpha values[alpha] |psi_alpha><psi_alpha|``."""
        V = self.eigenvectors
        scaled = V * np.asarray(values, dtype=V.dtype)[np.newaxis, :]
        return scaled @ dagger(V)

    def reconstruct(self, fn: Optional[Callable[[Any], Any]] = None) -> SquareMatrix:
        """Rebuild ``sum_alpha fn(h_alpha) |psi_alpha><psi_alpha|`` (``fn`` defaults to identity)."""
        values = [fn(h) if fn is not None else h for h in self.eigenvalues]
        return self.apply_function([self.field.lift(v) for v in values])

    def conjugate(self) -> "EigenDecomposition":
        """Decomposition of the complex conjugate matrix: same eigenvalues, conjugated vectors."""
        return EigenDecomposition(self.eigenvalues, np.conj(self.eigenvectors), self.field)

    def negated(self) -> "EigenDecomposition":
        """Decomposition of ``-h``."""
        order = list(range(self.dim - 1, -1, -1))
        return EigenDecomposition(
            -self.eigenvalues[order], self.eigenvectors[:, order], self.field
        )


def _canonical_phase(vector: np.ndarray, field: Field) -> np.ndarray:
    """Rotate the vector so its first non-negligible component is real positive."""
    threshold = field.sqrt(field.eps) if not field.exact else 0
    for component in vector:
        magnitude = abs(component)
        if magnitude > threshold:
            return vector * (np.conj(component) / magnitude)
    return vector


def _sorted_decomposition(values: list, vectors: np.ndarray, field: Field) -> EigenDecomposition:
    columns = [_canonical_phase(vectors[:, k], field) for k in range(len(values))]

    def key(k: int):
        return (
            field.to_float(values[k]),
            tuple(-float(abs(c)) for c in columns[k]),
        )

    order = sorted(range(len(values)), key=key)
    eigenvalues = field.real_array([values[k] for k in order])
    eigenvectors = np.stack([columns[k] for k in order], axis=1)
    return EigenDecomposition(eigenvalues, eigenvectors, field)


def _eig_2x2(H: SquareMatrix, field: Field) -> EigenDecomposition:
    a = H[0, 0].real
    b = H[1, 1].real
    c = H[0, 1]
    mean = (a + b) / 2
    half_gap = (a - b) / 2
    radius = field.sqrt(half_gap * half_gap + field.abs2(c))

    scale = max_abs(H) or 1
    if field.is_negligible(abs(c), scale):
        return _sorted_decomposition([a, b], field.eye(2), field)

    values = [mean - radius, mean + radius]
    vectors = field.zeros((2, 2))
    for k, sign in enumerate((-1, 1)):
        # lam - a and lam - b without cancelling against the mean
        first = field.array([c, sign * radius - half_gap])
        second = field.array([sign * radius + half_gap, np.conj(c)])
        v = first if max_abs(first) >= max_abs(second) else second
        norm = field.sqrt(sum(field.abs2(x) for x in v))
        vectors[:, k] = v / norm
    return _sorted_decomposition(values, vectors, field)


def _eig_jacobi(H: SquareMatrix, field: Field, max_sweeps: int) -> EigenDecomposition:
    n = H.shape[0]
    A = np.array(H, copy=True)
    V = field.eye(n)
    scale2 = sum(field.abs2(x) for x in A.flat)
    # rotations leave O(eps) fill-in behind, so stop a little above eps^2.
    target = (10 * n * field.eps) ** 2 * scale2

    for sweep in range(max_sweeps):
        off = sum(field.abs2(A[p, q]) for p in range(n) for q in range(p + 1, n))
        LOGGER.debug("Jacobi sweep %d: off-diagonal mass %s", sweep, off)
        if off <= target:
            values = [A[k, k].real for k in range(n)]
            return _sorted_decomposition(values, V, field)

        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                magnitude = abs(apq)
                if magnitude == 0:
                    continue
                phase = apq / magnitude
                tau = (A[q, q].real - A[p, p].real) / (2 * magnitude)
                sign = 1 if tau >= 0 else -1
                t = sign / (abs(tau) + field.sqrt(1 + tau * tau))
                c = 1 / field.sqrt(1 + t * t)
                s = t * c
                # D R with D = diag(1, conj(phase)) makes the (p, q) block real first.
                J = field.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                cols = [p, q]
                A[:, cols] = A[:, cols] @ J
                A[cols, :] = dagger(J) @ A[cols, :]
                V[:, cols] = V[:, cols] @ J
                A[p, q] = field.zero
                A[q, p] = field.zero

    raise NoConvergence(
        f"Jacobi eigensolver did not converge within {max_sweeps} sweeps"
    )


def hermitian_eig(
    H: SquareMatrix,
    tol: Any = None,
    *,
    field: Optional[Field] = None,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    H : SquareMatrix
        Hermitian to ``tol`` in the max norm.
    tol : real, optional
        Hermiticity tolerance. Defaults to the field's ``default_tol``.
    field : Field, optional
        Scalar backend; inferred from ``H`` when omitted.
    max_sweeps : int
        Jacobi sweep cap for dimensions above 2.

    Returns
    -------
    EigenDecomposition
        Ascending real eigenvalues with phase-canonical orthonormal eigenvectors.

    Raises
    ------
    NotHermitian
        If ``max |H - H^dagger| > tol``.
    NoConvergence
        If the Jacobi iteration exceeds ``max_sweeps``.
    """
    field = field or infer_field(H)
    tol = field.default_tol if tol is None else tol
    n = _square_dim(H)
    H = field.array(H)

    residual = hermiticity_residual(H)
    if residual > tol:
        raise NotHermitian(f"matrix is not Hermitian: max |H - H^dagger| = {residual}")

    H = (H + dagger(H)) / 2
    if n == 1:
        return EigenDecomposition(field.real_array([H[0, 0].real]), field.eye(1), field)
    if n == 2:
        return _eig_2x2(H, field)
    return _eig_jacobi(H, field, max_sweeps)
