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

"""Truncated-Taylor interpolation, the comparison point for the Cayley path.

The geodesic path ``C H exp(-i h theta)`` uses the principal generator ``h``
of ``H`` (``exp(-i h) = H^dagger``), so it runs from ``C H`` at ``theta = 0`` to
``C`` at ``theta = 1``: the reverse orientation of the Cayley path. Truncating
the exponential at order ``K`` gives polynomial entries of degree ``K`` per
gate, at the price of unitarity.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field as dataclass_field
from typing import Any, Dict, Sequence, Tuple

import numpy as np

from cayley_rcs.cayley import CayleyGate
from cayley_rcs.circuit import Circuit, StateVector, apply_gate, p0
from cayley_rcs.field import MACHINE, Field
from cayley_rcs.linalg import EigenDecomposition, SquareMatrix, _frozen, unitarity_residual

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class TaylorGate:
    """Worst gate ``C``, Haar companion ``H`` and the geodesic generator of ``H``.

    ``generator`` holds the principal eigenphases ``r_alpha`` of ``H`` as
    eigenvalues, with ``H``'s eigenvectors.
    """

    worst_gate: SquareMatrix
    companion: SquareMatrix
    generator: EigenDecomposition
    field: Field = MACHINE

    def __post_init__(self) -> None:
        object.__setattr__(self, "worst_gate", _frozen(self.field.array(self.worst_gate)))
        object.__setattr__(self, "companion", _frozen(self.field.array(self.companion)))

    @classmethod
    def from_cayley_gate(cls, g: CayleyGate) -> "TaylorGate":
        """Share the pair ``(C, H)`` of a Cayley gate; ``r = 2 arctan(h)``."""
        field = g.field
        phases = field.real_array([2 * field.atan(h) for h in g.generator.eigenvalues])
        generator = EigenDecomposition(phases, g.generator.eigenvectors, field)
        return cls(g.worst_gate, g.companion, generator, field)

    @classmethod
    def from_unitaries(
        cls, worst_gate: SquareMatrix, companion: SquareMatrix, *, field: Field = MACHINE
    ) -> "TaylorGate":
        return cls.from_cayley_gate(CayleyGate.from_unitaries(worst_gate, companion, field=field))

    @property
    def dim(self) -> int:
        return self.generator.dim

    def _apply(self, values: Sequence[Any]) -> SquareMatrix:
        return self.worst_gate @ self.companion @ self.generator.apply_function(values)


def geodesic_gate(g: TaylorGate, theta: Any) -> SquareMatrix:
    """``C H exp(-i h theta)``."""
    field = g.field
    theta = field.real(theta)
    i = field.imag_unit
    return g._apply([field.exp(-i * theta * r) for r in g.generator.eigenvalues])


def truncated_gate(g: TaylorGate, theta: Any, K: int) -> SquareMatrix:
    """``C H sum_{k=0}^{K} (-i h theta)^k / k!``; not unitary for ``K >= 1``."""
    if K < 0:
        raise ValueError(f"truncation order must be non-negative, got K={K}")
    field = g.field
    theta = field.real(theta)
    i = field.imag_unit
    values = []
    for r in g.generator.eigenvalues:
        x = -i * theta * r
        term = field.one
        total = field.one
        for k in range(1, K + 1):
            term = term * x / k
            total = total + term
        values.append(total)
    return g._apply(values)


def _p0_of(gates: Sequence[SquareMatrix], circuit: Circuit) -> Any:
    state = StateVector.zero(circuit.n, field=circuit.field)
    for matrix, qubits in zip(gates, circuit.architecture.placements):
        state = apply_gate(state, matrix, qubits)
    return circuit.field.abs2(state.amplitudes[0])


@dataclass(frozen=True)
class TruncationRow:
    theta: float
    gate_residuals: Tuple[float, ...]
    singular_values: Tuple[Tuple[float, ...], ...]
    p0_truncated: float
    p0_geodesic: float
    deviation: float
    p0_cayley: float
    cayley_deviation: float


@dataclass(frozen=True)
class TruncationReport:
    K: int
    truncated_degree: int
    cayley_degree: int
    rows: Tuple[TruncationRow, ...] = dataclass_field(default_factory=tuple)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "K": self.K,
            "truncated_degree": self.truncated_degree,
            "cayley_degree": self.cayley_degree,
            "rows": [row.__dict__ for row in self.rows],
        }


def truncation_experiment(circuit: Circuit, thetas: Sequence[float], K: int) -> TruncationReport:
    """Compare the order-``K`` truncated circuit with the exact geodesic circuit.

    Each row reports the per-gate unitarity residual and singular values of
    the truncated gates, and ``p0`` of the truncated circuit against two
    references:

    - ``deviation``: the geodesic circuit at the same ``theta``, which the
      truncation approximates.
    - ``cayley_deviation``: the Cayley path at ``1 - theta``, the matching
      orientation. The two paths share their endpoints only, so this
      difference is a truncation error at ``theta`` in ``{0, 1}`` and a path
      difference in between.

    Degrees: ``2 m K`` for the truncated amplitude, ``2 D`` for the Cayley path.
    """
    field = circuit.field
    taylor_gates = [TaylorGate.from_cayley_gate(g) for g in circuit.gates]

    rows = []
    for theta in thetas:
        truncated = [truncated_gate(g, theta, K) for g in taylor_gates]
        exact = [geodesic_gate(g, theta) for g in taylor_gates]
        residuals = tuple(field.to_float(unitarity_residual(M, field=field)) for M in truncated)
        singular_values = tuple(
            tuple(float(s) for s in np.linalg.svd(MACHINE.array(M), compute_uv=False))
            for M in truncated
        )
        p_truncated = _p0_of(truncated, circuit)
        p_geodesic = _p0_of(exact, circuit)
        p_cayley = p0(circuit, 1 - field.real(theta))
        rows.append(
            TruncationRow(
                theta=float(theta),
                gate_residuals=residuals,
                singular_values=singular_values,
                p0_truncated=field.to_float(p_truncated),
                p0_geodesic=field.to_float(p_geodesic),
                deviation=field.to_float(abs(p_truncated - p_geodesic)),
                p0_cayley=field.to_float(p_cayley),
                cayley_deviation=field.to_float(abs(p_truncated - p_cayley)),
            )
        )
        LOGGER.info(
            "Truncation K=%d theta=%g: max gate residual %.3g, p0 deviation %.3g",
            K, theta, max(residuals, default=0.0), rows[-1].deviation,
        )

    return TruncationReport(
        K=K,
        truncated_degree=2 * circuit.m * K,
        cayley_degree=2 * circuit.degree,
        rows=tuple(rows),
    )


def max_generator_norm(circuit: Circuit) -> float:
    """Largest geodesic eigenphase magnitude over the circuit's companions."""
    return max(
        (abs(float(2 * math.atan(float(h)))) for g in circuit.gates for h in g.generator.eigenvalues),
        default=0.0,
    )
