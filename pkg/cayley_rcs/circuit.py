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

"""Circuits along the Cayley path and their statevector simulation.

Index convention: character ``j`` of a bitstring is qubit ``j``, and qubit 0
is the most significant bit of the amplitude index. A gate acting on
``qubits = (a, b)`` uses the same convention on its own 4-dimensional space,
so ``a`` is the high bit of the gate's row and column indices.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dataclass_field
from typing import Any, Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from cayley_rcs.cayley import (
    CayleyGate,
    gate_at,
    local_factors,
    q_modulus_z_factor,
)
from cayley_rcs.config import FEYNMAN_MAX_GATES, FEYNMAN_MAX_QUBITS
from cayley_rcs.errors import DimensionMismatch, TooLarge
from cayley_rcs.field import MACHINE, Field
from cayley_rcs.linalg import SquareMatrix, _frozen

LOGGER = logging.getLogger(__name__)

Bitstring = Union[str, Sequence[int]]


@dataclass(frozen=True)
class Architecture:
    """Gate placements on ``n`` qubits, in application order."""

    n: int
    placements: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        placements = tuple(tuple(int(q) for q in p) for p in self.placements)
        object.__setattr__(self, "placements", placements)
        if self.n < 1:
            raise ValueError(f"an architecture needs at least one qubit, got n={self.n}")
        for k, qubits in enumerate(placements):
            if len(qubits) not in (1, 2):
                raise ValueError(f"placement {k} acts on {len(qubits)} qubits; use 1 or 2")
            if len(set(qubits)) != len(qubits):
                raise ValueError(f"placement {k} repeats a qubit: {qubits}")
            if any(q < 0 or q >= self.n for q in qubits):
                raise ValueError(f"placement {k} uses a qubit outside 0..{self.n - 1}: {qubits}")

    @classmethod
    def parse(cls, n: int, text: str) -> "Architecture":
        """Parse ``"0-1,1-2,0"``: comma-separated placements, qubits joined by ``-``."""
        placements = []
        for chunk in text.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            try:
                placements.append(tuple(int(q) for q in chunk.split("-")))
            except ValueError:
                raise ValueError(f"cannot parse placement {chunk!r}; expected e.g. '0-1'") from None
        return cls(n, tuple(placements))

    @property
    def m(self) -> int:
        return len(self.placements)

    def dims(self) -> Tuple[int, ...]:
        return tuple(2 ** len(q) for q in self.placements)


@dataclass(frozen=True)
class Circuit:
    """``C(theta) = C_m(theta) ... C_1(theta)`` over an architecture."""

    architecture: Architecture
    gates: Tuple[CayleyGate, ...]
    field: Field = MACHINE

    def __post_init__(self) -> None:
        gates = tuple(self.gates)
        object.__setattr__(self, "gates", gates)
        if len(gates) != self.architecture.m:
            raise DimensionMismatch(
                f"architecture has {self.architecture.m} placements but {len(gates)} gates were given"
            )
        for k, (gate, dim) in enumerate(zip(gates, self.architecture.dims())):
            if gate.dim != dim:
                raise DimensionMismatch(
                    f"gate {k} has dimension {gate.dim} but its placement "
                    f"{self.architecture.placements[k]} needs {dim}"
                )

    @classmethod
    def sample(
        cls,
        architecture: Architecture,
        rng: np.random.Generator,
        *,
        field: Field = MACHINE,
        worst_gates: Optional[Sequence[SquareMatrix]] = None,
    ) -> "Circuit":
        """Haar companions for every placement; Haar worst gates unless given."""
        gates = []
        for k, dim in enumerate(architecture.dims()):
            worst = None if worst_gates is None else worst_gates[k]
            gates.append(CayleyGate.sample(dim, rng, worst_gate=worst, field=field))
        return cls(architecture, tuple(gates), field)

    @property
    def n(self) -> int:
        return self.architecture.n

    @property
    def m(self) -> int:
        return self.architecture.m

    @property
    def degree(self) -> int:
        """``D = sum_k N_k``, the degree of ``Q(theta)`` and of the polynomial amplitude."""
        return sum(g.dim for g in self.gates)

    def conjugate(self) -> "Circuit":
        return Circuit(self.architecture, tuple(g.conjugate() for g in self.gates), self.field)

    def with_companions(self, rng: np.random.Generator) -> "Circuit":
        """Same worst gates, fresh Haar companions."""
        return Circuit.sample(
            self.architecture,
            rng,
            field=self.field,
            worst_gates=[g.worst_gate for g in self.gates],
        )

    def to_field(self, field: Field) -> "Circuit":
        if field is self.field:
            return self
        return Circuit(self.architecture, tuple(g.to_field(field) for g in self.gates), field)

    def appended(self, other: "Circuit") -> "Circuit":
        """Apply ``other`` after this circuit."""
        if other.n != self.n:
            raise DimensionMismatch(f"cannot append a {other.n}-qubit circuit to a {self.n}-qubit one")
        architecture = Architecture(self.n, self.architecture.placements + other.architecture.placements)
        return Circuit(architecture, self.gates + other.gates, self.field)


@dataclass(frozen=True)
class StateVector:
    """``2^n`` amplitudes, qubit 0 most significant."""

    n: int
    amplitudes: np.ndarray = dataclass_field(repr=False)

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (2**self.n,):
            raise DimensionMismatch(
                f"a {self.n}-qubit state needs {2 ** self.n} amplitudes, got shape {self.amplitudes.shape}"
            )
        object.__setattr__(self, "amplitudes", _frozen(self.amplitudes))

    @classmethod
    def zero(cls, n: int, *, field: Field = MACHINE) -> "StateVector":
        amplitudes = field.zeros(2**n)
        amplitudes[0] = field.one
        return cls(n, amplitudes)

    def norm(self) -> Any:
        return sum(abs(a) ** 2 for a in self.amplitudes) ** 0.5

    def __getitem__(self, y: Bitstring) -> Any:
        return self.amplitudes[basis_index(y, self.n)]


def basis_index(y: Union[Bitstring, int], n: int) -> int:
    """Integer index of a bitstring, qubit 0 most significant."""
    if isinstance(y, (int, np.integer)):
        if not 0 <= y < 2**n:
            raise DimensionMismatch(f"basis index {y} is out of range for {n} qubits")
        return int(y)
    bits = [int(c) for c in y]
    if len(bits) != n:
        raise DimensionMismatch(f"bitstring has length {len(bits)} but the circuit has {n} qubits")
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"bitstring must contain only 0 and 1, got {y!r}")
    index = 0
    for b in bits:
        index = (index << 1) | b
    return index


def apply_gate(state: StateVector, gate: SquareMatrix, qubits: Iterable[int]) -> StateVector:
    """Apply ``gate`` to ``qubits`` (identity elsewhere)."""
    qubits = tuple(qubits)
    k = len(qubits)
    n = state.n
    if gate.shape != (2**k, 2**k):
        raise DimensionMismatch(f"a {gate.shape} gate cannot act on {k} qubit(s)")
    if len(set(qubits)) != k or any(q < 0 or q >= n for q in qubits):
        raise DimensionMismatch(f"invalid qubits {qubits} for a {n}-qubit state")

    psi = state.amplitudes.reshape((2,) * n)
    psi = np.moveaxis(psi, qubits, tuple(range(k))).reshape(2**k, -1)
    psi = (gate @ psi).reshape((2,) * n)
    psi = np.moveaxis(psi, tuple(range(k)), qubits)
    return StateVector(n, psi.reshape(2**n))


def evolve(circuit: Circuit, theta: Any) -> StateVector:
    """``C(theta) |0^n>``."""
    state = StateVector.zero(circuit.n, field=circuit.field)
    for gate, qubits in zip(circuit.gates, circuit.architecture.placements):
        state = apply_gate(state, gate_at(gate, theta), qubits)
    return state


def amplitude(circuit: Circuit, theta: Any, y: Bitstring) -> Any:
    """``<y| C(theta) |0^n>``."""
    index = basis_index(y, circuit.n)
    if circuit.m == 0:
        return circuit.field.one if index == 0 else circuit.field.zero
    return evolve(circuit, theta).amplitudes[index]


def p0(circuit: Circuit, theta: Any) -> Any:
    """``|<0^n| C(theta) |0^n>|^2``."""
    return circuit.field.abs2(amplitude(circuit, theta, "0" * circuit.n))


def q_product(circuit: Circuit, theta: Any) -> Any:
    """``Q(theta) = prod_k q_k(theta)``."""
    value = circuit.field.one
    for gate in circuit.gates:
        value = value * local_factors(gate, theta).denominator
    return value


def q_product_z_modulus(circuit: Circuit, z: Any) -> Any:
    """``|Q(1 + z)|^2 / |Q(1)|^2``, which stays close to one for small ``|z|``."""
    value = circuit.field.real(1)
    for gate in circuit.gates:
        value = value * q_modulus_z_factor(gate, z)
    return value


def polynomial_amplitude(circuit: Circuit, theta: Any) -> Any:
    """``<0^n| P(theta) |0^n> = Q(theta) <0^n| C(theta) |0^n>``, a polynomial of degree ``D``."""
    return q_product(circuit, theta) * amplitude(circuit, theta, "0" * circuit.n)


def _bit(x: int, qubit: int, n: int) -> int:
    return (x >> (n - 1 - qubit)) & 1


def _local_index(x: int, qubits: Tuple[int, ...], n: int) -> int:
    index = 0
    for q in qubits:
        index = (index << 1) | _bit(x, q, n)
    return index


def _with_local_bits(x: int, qubits: Tuple[int, ...], local: int, n: int) -> int:
    k = len(qubits)
    for i, q in enumerate(qubits):
        mask = 1 << (n - 1 - q)
        if (local >> (k - 1 - i)) & 1:
            x |= mask
        else:
            x &= ~mask
    return x


def feynman_amplitude(circuit: Circuit, theta: Any, y0: Bitstring, ym: Bitstring) -> Any:
    """``<y_m| C(theta) |y_0>`` as an explicit sum over intermediate bitstrings.

    Only paths that agree with the gate's support are enumerated, each weighted
    by the product of the matrix elements ``<y_k| C_k(theta) |y_{k-1}>``.

    Raises
    ------
    TooLarge
        If ``n > 6`` or ``m > 6``.
    """
    n, m = circuit.n, circuit.m
    if n > FEYNMAN_MAX_QUBITS or m > FEYNMAN_MAX_GATES:
        raise TooLarge(
            f"path sum over n={n}, m={m} exceeds the limit "
            f"n <= {FEYNMAN_MAX_QUBITS}, m <= {FEYNMAN_MAX_GATES}; use amplitude() instead"
        )
    start = basis_index(y0, n)
    target = basis_index(ym, n)
    field = circuit.field
    matrices = [gate_at(g, theta) for g in circuit.gates]
    placements = circuit.architecture.placements

    def paths(k: int, x: int, weight: Any) -> Any:
        if k == m:
            return weight if x == target else field.zero
        qubits = placements[k]
        column = _local_index(x, qubits, n)
        total = field.zero
        for row in range(2 ** len(qubits)):
            element = matrices[k][row, column]
            if element == 0:
                continue
            total = total + paths(k + 1, _with_local_bits(x, qubits, row, n), weight * element)
        return total

    return paths(0, start, field.one)
