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

"""The Cayley transform and the unitary path ``C(theta) = C f(theta h)``.

``f(x) = (1 + ix) / (1 - ix)`` maps the real line onto the unit circle minus
``-1``. A :class:`CayleyGate` freezes a worst-case gate ``C`` together with the
eigendecomposition of the Hermitian generator ``h`` of a companion unitary
``H = f(h)``, so the path can be evaluated at any ``theta`` (or ``z = theta - 1``)
without resampling.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Any, Optional, Tuple, Union

import numpy as np

from cayley_rcs.config import DEFAULT_BRANCH_GUARD, UNITARITY_TOL
from cayley_rcs.errors import (
    DimensionMismatch,
    NotUnitary,
    PhaseAtBranchPoint,
    SingularMatrix,
)
from cayley_rcs.field import MACHINE, Field, infer_field
from cayley_rcs.linalg import (
    EigenDecomposition,
    SquareMatrix,
    _frozen,
    haar_unitary,
    hermitian_eig,
    solve,
    unitarity_residual,
)

LOGGER = logging.getLogger(__name__)

# Companion draws are retried this many times when they land on the branch point.
MAX_RESAMPLES = 16


class Infinity(enum.Enum):
    """Distinguished argument values for :func:`cayley`."""

    NEG_INF = "-inf"


NEG_INF = Infinity.NEG_INF


def cayley(x: Union[Any, Infinity], *, field: Optional[Field] = None) -> Any:
    """Evaluate ``f(x) = (1 + ix) / (1 - ix)``; ``cayley(NEG_INF) == -1``."""
    if x is NEG_INF:
        return (field or MACHINE).lift(-1)
    field = field or infer_field(x)
    ix = field.imag_unit * x
    return (1 + ix) / (1 - ix)


def cayley_inverse_unitary(
    H: SquareMatrix,
    guard: Any = DEFAULT_BRANCH_GUARD,
    *,
    field: Optional[Field] = None,
    tol: Any = UNITARITY_TOL,
) -> EigenDecomposition:
    """Hermitian generator ``h`` with ``f(h) = H``, as an eigendecomposition.

    ``h = i (I - H)(I + H)^{-1}`` shares ``H``'s eigenvectors and has eigenvalues
    ``tan(r / 2)`` for the eigenphases ``r`` of ``H``.

    Raises
    ------
    NotUnitary
        If ``H`` is not unitary to ``tol``.
    PhaseAtBranchPoint
        If an eigenphase lies within ``guard`` of ``+-pi``.
    """
    field = field or infer_field(H)
    H = field.array(H)
    n = H.shape[0]

    residual = unitarity_residual(H, field=field)
    if residual > tol:
        raise NotUnitary(f"companion is not unitary: max |H^dagger H - I| = {residual}")

    identity = field.eye(n)
    try:
        h = solve(identity + H, field.imag_unit * (identity - H), field=field)
    except SingularMatrix:
        raise PhaseAtBranchPoint(
            "companion has an eigenvalue at -1; its Cayley generator is unbounded"
        ) from None
    h = (h + np.conj(h).T) / 2

    generator = hermitian_eig(h, field=field)
    limit = field.pi - guard
    for h_alpha in generator.eigenvalues:
        if abs(2 * field.atan(h_alpha)) > limit:
            raise PhaseAtBranchPoint(
                f"eigenphase {field.to_float(2 * field.atan(h_alpha)):.17g} is within "
                f"{guard} of pi; resample the companion or reject this gate"
            )
    return generator


@dataclass(frozen=True)
class LocalFactors:
    """Numerator polynomials ``p_alpha(theta)`` and denominator ``q(theta)`` of one gate."""

    numerators: Tuple[Any, ...]
    denominator: Any


@dataclass(frozen=True)
class ZFormFactors:
    """``r_alpha = sqrt(1 + h_alpha^2)`` and ``u_alpha = arctan(h_alpha)``."""

    moduli: Tuple[Any, ...]
    angles: Tuple[Any, ...]


@dataclass(frozen=True)
class CayleyGate:
    """A worst-case gate paired with the Cayley generator of its companion.

    Parameters
    ----------
    worst_gate : SquareMatrix
        ``C``, unitary.
    generator : EigenDecomposition
        Eigenpairs of ``h`` where ``f(h) = H`` is the companion.
    field : Field
        Scalar backend shared by both.
    """

    worst_gate: SquareMatrix
    generator: EigenDecomposition
    field: Field = MACHINE

    def __post_init__(self) -> None:
        worst = _frozen(self.field.array(self.worst_gate))
        object.__setattr__(self, "worst_gate", worst)
        if worst.shape != (self.generator.dim, self.generator.dim):
            raise DimensionMismatch(
                f"worst gate has shape {worst.shape} but the generator has "
                f"dimension {self.generator.dim}"
            )
        residual = unitarity_residual(worst, field=self.field)
        if residual > UNITARITY_TOL:
            raise NotUnitary(f"worst gate is not unitary: max |C^dagger C - I| = {residual}")

    @classmethod
    def from_unitaries(
        cls,
        worst_gate: SquareMatrix,
        companion: SquareMatrix,
        *,
        field: Field = MACHINE,
        guard: Any = DEFAULT_BRANCH_GUARD,
    ) -> "CayleyGate":
        """Build the path from ``C`` at ``theta = 0`` to ``C H`` at ``theta = 1``."""
        generator = cayley_inverse_unitary(field.array(companion), guard, field=field)
        return cls(worst_gate, generator, field)

    @classmethod
    def sample(
        cls,
        dim: int,
        rng: np.random.Generator,
        *,
        worst_gate: Optional[SquareMatrix] = None,
        field: Field = MACHINE,
        guard: Any = DEFAULT_BRANCH_GUARD,
    ) -> "CayleyGate":
        """Draw a Haar companion (and a Haar worst gate unless one is given).

        Companions whose eigenphases hit the branch-point guard are redrawn.
        """
        if worst_gate is None:
            worst_gate = haar_unitary(dim, rng, field=field)
        for attempt in range(MAX_RESAMPLES):
            companion = haar_unitary(dim, rng, field=field)
            try:
                return cls.from_unitaries(worst_gate, companion, field=field, guard=guard)
            except PhaseAtBranchPoint:
                LOGGER.debug("Companion draw %d hit the branch point, resampling", attempt)
        raise PhaseAtBranchPoint(
            f"{MAX_RESAMPLES} consecutive companion draws hit the branch point"
        )

    @property
    def dim(self) -> int:
        return self.generator.dim

    @property
    def companion(self) -> SquareMatrix:
        """``H = f(h)``."""
        return self.generator.reconstruct(lambda h: cayley(h, field=self.field))

    def conjugate(self) -> "CayleyGate":
        """The gate whose path at ``-theta`` is the complex conjugate of this one at ``theta``."""
        return CayleyGate(np.conj(self.worst_gate), self.generator.conjugate(), self.field)

    def to_field(self, field: Field) -> "CayleyGate":
        """Re-express in another backend, recomputing the generator there."""
        if field is self.field:
            return self
        # re-diagonalize at the new precision
        h = field.array(self.generator.reconstruct())
        h = (h + np.conj(h).T) / 2
        generator = hermitian_eig(h, field=field)
        return CayleyGate(field.array(self.worst_gate), generator, field)


def _theta(g: CayleyGate, theta: Any) -> Any:
    return g.field.real(theta)


def gate_at(g: CayleyGate, theta: Any) -> SquareMatrix:
    """``C f(theta h) = sum_alpha f(theta h_alpha) C |psi_alpha><psi_alpha|``."""
    theta = _theta(g, theta)
    values = [cayley(theta * h, field=g.field) for h in g.generator.eigenvalues]
    return g.worst_gate @ g.generator.apply_function(values)


def local_factors(g: CayleyGate, theta: Any) -> LocalFactors:
    """``q(theta) = prod (1 - i theta h_alpha)``, ``p_alpha = (1 + i theta h_alpha) prod_{beta != alpha} (1 - i theta h_beta)``."""
    field = g.field
    theta = _theta(g, theta)
    i = field.imag_unit
    minus = [1 - i * theta * h for h in g.generator.eigenvalues]
    plus = [1 + i * theta * h for h in g.generator.eigenvalues]

    q = field.one
    for factor in minus:
        q = q * factor

    numerators = []
    for alpha, head in enumerate(plus):
        p = head
        for beta, factor in enumerate(minus):
            if beta != alpha:
                p = p * factor
        numerators.append(p)
    return LocalFactors(tuple(numerators), q)


def factored_gate_at(g: CayleyGate, theta: Any) -> SquareMatrix:
    """``q(theta)^{-1} sum_alpha p_alpha(theta) C |psi_alpha><psi_alpha|``."""
    factors = local_factors(g, theta)
    values = [p / factors.denominator for p in factors.numerators]
    return g.worst_gate @ g.generator.apply_function(values)


def z_form_factors(g: CayleyGate) -> ZFormFactors:
    field = g.field
    hs = g.generator.eigenvalues
    return ZFormFactors(
        moduli=tuple(field.sqrt(1 + h * h) for h in hs),
        angles=tuple(field.atan(h) for h in hs),
    )


def gate_at_z(g: CayleyGate, z: Any) -> SquareMatrix:
    """The path at ``theta = 1 + z`` with the moduli ``r_alpha`` cancelled.

    With ``h = tan u``: ``1 +- i(1 + z)h = r (e^{+-iu} +- i z sin u)``, so
    ``f((1 + z)h) = (e^{iu} + i z sin u) / (e^{-iu} - i z sin u)``.
    """
    field = g.field
    z = field.real(z)
    i = field.imag_unit
    values = []
    for u in z_form_factors(g).angles:
        s = field.sin(u)
        values.append((field.exp(i * u) + i * z * s) / (field.exp(-i * u) - i * z * s))
    return g.worst_gate @ g.generator.apply_function(values)


def q_modulus_z_factor(g: CayleyGate, z: Any) -> Any:
    """``|q(1 + z)|^2 / |q(1)|^2 = prod_alpha (1 + (2z + z^2) h_alpha^2 / (1 + h_alpha^2))``."""
    field = g.field
    z = field.real(z)
    value = field.real(1)
    for h in g.generator.eigenvalues:
        value = value * (1 + (2 * z + z * z) * h * h / (1 + h * h))
    return value
