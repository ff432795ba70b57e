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

import math

import numpy as np
import pytest

from cayley_rcs.cayley import CayleyGate
from cayley_rcs.circuit import StateVector, apply_gate
from cayley_rcs.linalg import haar_unitary, max_abs, unitarity_residual
from cayley_rcs.taylor import (
    TaylorGate,
    geodesic_gate,
    max_generator_norm,
    truncated_gate,
    truncation_experiment,
)


def _taylor_gates(count, dim, seed):
    rng = np.random.default_rng(seed)
    return [TaylorGate.from_cayley_gate(CayleyGate.sample(dim, rng)) for _ in range(count)]


def _small_phase_gate(dim, seed):
    """Companion with eigenphases of magnitude at most 1."""
    rng = np.random.default_rng(seed)
    V = haar_unitary(dim, rng)
    phases = rng.uniform(-1, 1, size=dim)
    companion = V @ np.diag(np.exp(1j * phases)) @ V.conj().T
    return TaylorGate.from_unitaries(haar_unitary(dim, rng), companion)


def test_from_cayley_gate_shares_the_pair():
    g = CayleyGate.sample(4, np.random.default_rng(1))
    taylor = TaylorGate.from_cayley_gate(g)
    np.testing.assert_array_equal(taylor.worst_gate, g.worst_gate)
    np.testing.assert_array_equal(taylor.companion, g.companion)
    assert taylor.dim == 4
    assert all(abs(r) < math.pi for r in taylor.generator.eigenvalues)


def test_geodesic_endpoints():
    for g in _taylor_gates(20, 4, 2):
        assert max_abs(geodesic_gate(g, 0) - g.worst_gate @ g.companion) < 1e-12
        assert max_abs(geodesic_gate(g, 1) - g.worst_gate) < 1e-12
        assert unitarity_residual(geodesic_gate(g, 0.4)) < 1e-12


def test_order_zero_is_the_unitary_endpoint():
    for g in _taylor_gates(10, 4, 3):
        for theta in (0.0, 0.5, 1.0):
            M = truncated_gate(g, theta, 0)
            assert max_abs(M - g.worst_gate @ g.companion) < 1e-12
            assert unitarity_residual(M) < 1e-12


def test_first_order_singular_values():
    for g in _taylor_gates(10, 2, 4):
        singular = np.sort(np.linalg.svd(truncated_gate(g, 1, 1), compute_uv=False))
        expected = np.sort([math.sqrt(1 + r * r) for r in g.generator.eigenvalues])
        np.testing.assert_allclose(singular, expected, atol=1e-12)


def test_high_order_is_unitary_for_small_generators():
    for seed in range(5):
        g = _small_phase_gate(4, seed)
        assert unitarity_residual(truncated_gate(g, 1, 30)) < 1e-14


def test_negative_order_is_rejected():
    with pytest.raises(ValueError, match="non-negative"):
        truncated_gate(_taylor_gates(1, 2, 5)[0], 1, -1)


def test_truncation_degrees(make_circuit):
    report = truncation_experiment(make_circuit(2, "0-1,0-1", 6), [1.0], 2)
    assert report.truncated_degree == 8
    assert report.cayley_degree == 16


def test_high_order_truncation_matches_geodesic(make_circuit):
    report = truncation_experiment(make_circuit(2, "0-1,1", 7), [0.0, 0.5, 1.0], 40)
    for row in report.rows:
        assert row.deviation < 1e-12
        assert max(row.gate_residuals) < 1e-12


def test_geodesic_endpoints_match_the_cayley_path(make_circuit):
    report = truncation_experiment(make_circuit(2, "0-1,1", 8), [0.0, 0.5, 1.0], 3)
    start, middle, end = report.rows
    assert start.p0_geodesic == pytest.approx(start.p0_cayley, abs=1e-12)
    assert end.p0_geodesic == pytest.approx(end.p0_cayley, abs=1e-12)
    # the paths part ways between their endpoints
    assert abs(middle.p0_geodesic - middle.p0_cayley) > 1e-9
    data = report.to_dict()
    assert data["K"] == 3
    assert len(data["rows"]) == 3
    assert data["rows"][1]["theta"] == 0.5
    assert set(data["rows"][1]) >= {"p0_cayley", "cayley_deviation"}


def test_cayley_deviation_is_the_truncation_error_at_the_endpoints(make_circuit):
    circuit = make_circuit(2, "0-1,1", 8)
    for K in (1, 40):
        start, end = truncation_experiment(circuit, [0.0, 1.0], K).rows
        for row in (start, end):
            assert row.cayley_deviation == pytest.approx(row.deviation, abs=1e-12)
            assert row.cayley_deviation == pytest.approx(abs(row.p0_truncated - row.p0_cayley))
    high = truncation_experiment(circuit, [1.0], 40).rows[0]
    assert high.cayley_deviation < 1e-12


def test_first_order_errors_accumulate_with_depth(make_circuit):
    first = make_circuit(2, "0-1", 9)
    longer = first.appended(make_circuit(2, "0-1,0-1", 10))

    def norm_after(circuit):
        state = StateVector.zero(2)
        for g, qubits in zip(circuit.gates, circuit.architecture.placements):
            state = apply_gate(state, truncated_gate(TaylorGate.from_cayley_gate(g), 1, 1), qubits)
        return state.norm()

    # every first-order factor has singular values sqrt(1 + r^2) >= 1
    assert 1 < norm_after(first) <= norm_after(longer)


def test_max_generator_norm(make_circuit):
    value = max_generator_norm(make_circuit(2, "0-1,1", 11))
    assert 0 < value < math.pi
