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

"""File formats: circuit JSON, sample and series CSV, run manifests.

Circuit file::

    {
      "n": 2,
      "companion_seed": 11,
      "gates": [
        {"qubits": [0, 1], "unitary": [[[re, im], ...], ...]},
        {"qubits": [0, 1], "haar_seed": 5, "companion": [[[re, im], ...], ...]}
      ]
    }

``unitary`` is the worst gate ``C_k``; without it the gate is drawn from
``haar_seed``. ``companion`` is ``H_k``; without it the companion is drawn from
``SeedSequence([companion_seed, k])``.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from dataclasses import asdict, dataclass, field as dataclass_field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from cayley_rcs.cayley import CayleyGate
from cayley_rcs.circuit import Architecture, Circuit
from cayley_rcs.config import UNITARITY_TOL
from cayley_rcs.errors import CircuitFileError, PhaseAtBranchPoint
from cayley_rcs.field import MACHINE, Field
from cayley_rcs.interp import SamplePoint
from cayley_rcs.linalg import haar_unitary, unitarity_residual

LOGGER = logging.getLogger(__name__)

PathLike = Union[str, "os.PathLike[str]"]


def encode_matrix(M: np.ndarray) -> List[List[List[float]]]:
    """Nested ``[re, im]`` pairs, row-major, at double precision."""
    return [[[float(complex(x).real), float(complex(x).imag)] for x in row] for row in M]


def decode_matrix(data: Any, where: str) -> np.ndarray:
    try:
        M = np.array([[complex(float(re), float(im)) for re, im in row] for row in data])
    except (TypeError, ValueError):
        raise CircuitFileError(f"{where}: expected a square matrix of [re, im] pairs") from None
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise CircuitFileError(f"{where}: expected a square matrix, got shape {M.shape}")
    return M


@dataclass(frozen=True, eq=False)
class GateSpec:
    qubits: Tuple[int, ...]
    unitary: Optional[np.ndarray] = None
    haar_seed: Optional[int] = None
    companion: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return 2 ** len(self.qubits)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"qubits": list(self.qubits)}
        if self.unitary is not None:
            data["unitary"] = encode_matrix(self.unitary)
        if self.haar_seed is not None:
            data["haar_seed"] = self.haar_seed
        if self.companion is not None:
            data["companion"] = encode_matrix(self.companion)
        return data


@dataclass(frozen=True)
class CircuitFile:
    n: int
    gates: Tuple[GateSpec, ...]
    companion_seed: Optional[int] = None

    @classmethod
    def loads(cls, text: str) -> "CircuitFile":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise CircuitFileError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: PathLike) -> "CircuitFile":
        return cls.loads(Path(path).read_text())

    @classmethod
    def from_dict(cls, data: Any) -> "CircuitFile":
        if not isinstance(data, dict):
            raise CircuitFileError("circuit file must hold a JSON object")
        n = data.get("n")
        if not isinstance(n, int) or n < 1:
            raise CircuitFileError(f"'n' must be a positive integer, got {n!r}")
        companion_seed = data.get("companion_seed")
        if companion_seed is not None and not isinstance(companion_seed, int):
            raise CircuitFileError(f"'companion_seed' must be an integer, got {companion_seed!r}")
        raw_gates = data.get("gates")
        if not isinstance(raw_gates, list):
            raise CircuitFileError("'gates' must be a list")
        gates = tuple(_parse_gate(k, g, n) for k, g in enumerate(raw_gates))
        return cls(n, gates, companion_seed)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"n": self.n}
        if self.companion_seed is not None:
            data["companion_seed"] = self.companion_seed
        data["gates"] = [g.to_dict() for g in self.gates]
        return data

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def dump(self, path: PathLike) -> None:
        Path(path).write_text(self.dumps())
        LOGGER.info("Wrote circuit file %s", path)

    @property
    def architecture(self) -> Architecture:
        return Architecture(self.n, tuple(g.qubits for g in self.gates))

    def to_circuit(self, *, field: Field = MACHINE) -> Circuit:
        """Materialize worst gates and companions, drawing seeded ones as needed."""
        gates = []
        for k, spec in enumerate(self.gates):
            if spec.unitary is not None:
                worst = field.array(spec.unitary)
            else:
                worst = haar_unitary(spec.dim, np.random.default_rng(spec.haar_seed), field=field)
            try:
                if spec.companion is not None:
                    gate = CayleyGate.from_unitaries(worst, spec.companion, field=field)
                else:
                    rng = np.random.default_rng(np.random.SeedSequence([self.companion_seed or 0, k]))
                    gate = CayleyGate.sample(spec.dim, rng, worst_gate=worst, field=field)
            except PhaseAtBranchPoint as e:
                raise CircuitFileError(f"gate {k}: {e}") from e
            gates.append(gate)
        return Circuit(self.architecture, tuple(gates), field)

    @classmethod
    def from_circuit(cls, circuit: Circuit) -> "CircuitFile":
        """Explicit worst gates and companions, so reloading reproduces the circuit."""
        gates = tuple(
            GateSpec(
                qubits=qubits,
                unitary=MACHINE.array(g.worst_gate),
                companion=MACHINE.array(g.companion),
            )
            for g, qubits in zip(circuit.gates, circuit.architecture.placements)
        )
        return cls(circuit.n, gates)


def _parse_gate(k: int, data: Any, n: int) -> GateSpec:
    where = f"gate {k}"
    if not isinstance(data, dict):
        raise CircuitFileError(f"{where}: expected an object")
    qubits = data.get("qubits")
    if (
        not isinstance(qubits, list)
        or len(qubits) not in (1, 2)
        or not all(isinstance(q, int) for q in qubits)
    ):
        raise CircuitFileError(f"{where}: 'qubits' must be a list of one or two integers")
    if len(set(qubits)) != len(qubits) or any(q < 0 or q >= n for q in qubits):
        raise CircuitFileError(f"{where}: qubits {qubits} must be distinct and below n={n}")
    dim = 2 ** len(qubits)

    haar_seed = data.get("haar_seed")
    if haar_seed is not None and not isinstance(haar_seed, int):
        raise CircuitFileError(f"{where}: 'haar_seed' must be an integer")

    matrices = {}
    for key in ("unitary", "companion"):
        if data.get(key) is None:
            matrices[key] = None
            continue
        M = decode_matrix(data[key], f"{where} {key}")
        if M.shape != (dim, dim):
            raise CircuitFileError(f"{where}: {key} has shape {M.shape}, expected ({dim}, {dim})")
        residual = unitarity_residual(M, field=MACHINE)
        if residual > UNITARITY_TOL:
            raise CircuitFileError(f"{where}: {key} is not unitary (residual {residual:.3g})")
        matrices[key] = M

    if matrices["unitary"] is None and haar_seed is None:
        raise CircuitFileError(f"{where}: needs either 'unitary' or 'haar_seed'")
    return GateSpec(tuple(qubits), matrices["unitary"], haar_seed, matrices["companion"])


# -- CSV ----------------------------------------------------------------------------


def _format_value(x: Any) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return repr(float(x))


def write_samples_csv(path: PathLike, points: Sequence[SamplePoint]) -> None:
    """``node,value`` for real data, ``node,re,im`` when any value is complex."""
    is_complex = any(getattr(p.value, "imag", 0) != 0 for p in points)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["node", "re", "im"] if is_complex else ["node", "value"])
        for p in points:
            if is_complex:
                writer.writerow([_format_value(p.node), _format_value(p.value.real), _format_value(p.value.imag)])
            else:
                writer.writerow([_format_value(p.node), _format_value(getattr(p.value, "real", p.value))])


def read_samples_csv(path: PathLike, *, field: Field = MACHINE) -> List[SamplePoint]:
    points = []
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header not in (["node", "value"], ["node", "re", "im"]):
            raise ValueError(f"{path}: unexpected header {header}")
        for line, row in enumerate(reader, start=2):
            try:
                node = field.real(row[0])
                if len(header) == 2:
                    value = field.real(row[1])
                else:
                    value = field.complex(row[1], row[2])
            except (ValueError, IndexError, ZeroDivisionError) as e:
                raise ValueError(f"{path}, line {line}: {e}") from None
            points.append(SamplePoint(node, value))
    return points


# -- manifests and reports ---------------------------------------------------------


@dataclass
class RunManifest:
    command: str
    config: Dict[str, Any]
    seeds: Dict[str, Any]
    backend: str
    precision_bits: int
    version: str
    wall_time: float = 0.0
    extra: Dict[str, Any] = dataclass_field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _json_default(value: Any) -> Any:
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, Fraction):
        return _format_value(value)
    if isinstance(value, tuple):
        return list(value)
    return str(value)


def dumps_json(payload: Dict[str, Any]) -> str:
    # Infinity is kept as the JSON extension token; bounds overflow doubles routinely.
    return json.dumps(payload, indent=2, default=_json_default) + "\n"


def write_json_report(path: Optional[PathLike], payload: Dict[str, Any], manifest: RunManifest) -> str:
    """Embed the manifest under ``"manifest"`` and write (or just return) the JSON text."""
    text = dumps_json({**payload, "manifest": manifest.to_dict()})
    if path is not None:
        Path(path).write_text(text)
        LOGGER.info("Wrote report %s", path)
    return text


def write_csv_series(
    path: PathLike, header: Sequence[str], rows: Sequence[Sequence[Any]], manifest: RunManifest
) -> Path:
    """Write the CSV plus a ``<path>.manifest.json`` sidecar; returns the sidecar path."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([_format_value(x) if isinstance(x, (float, Fraction)) else x for x in row])
    sidecar = Path(f"{os.fspath(path)}.manifest.json")
    sidecar.write_text(dumps_json(manifest.to_dict()))
    LOGGER.info("Wrote %s and %s", path, sidecar)
    return sidecar

