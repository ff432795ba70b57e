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
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from numpy.polynomial import polynomial as P

from cayley_rcs.cayley import (
    NEG_INF,
    CayleyGate,
    cayley,
    cayley_inverse_unitary,
    factored_gate_at,
    gate_at,
    gate_at_z,
    local_factors,
    q_modulus_z_factor,
    z_form_factors,
)
from cayley_rcs.errors import DimensionMismatch, NotUnitary, PhaseAtBranchPoint
from cayley_rcs.field import MACHINE
from cayley_rcs.linalg import haar_unitary, max_abs, unitarity_residual


def _gates(count, dim, seed):
    rng = np.random.default_rng(seed)
    return [CayleyGate.sample(dim, rng) for _ in range(count)]


def _diagonal_gate():
    # companion diag(i, -i) has generator diag(1, -1)
    return CayleyGate.from_unitaries(np.eye(2), np.diag([1j, -1j]))


# -- cayley ---------------------------------------------------------------------------


def test_cayley_examples(mp256):
    assert cayley(0.0) == 1
    assert abs(cayley(1.0) - 1j) < 1e-15
    assert cayley(NEG_INF) == -1
    assert abs(cayley(mp256.real(1)) - mp256.imag_unit) < mp256.real(10) ** -70


@seed(7)
@settings(max_examples=200, deadline=None)
@given(x=st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
def test_cayley_has_unit_modulus(x):
    value = cayley(x)
    assert abs(abs(value) - 1) < 1e-14
    assert value != -1


# -- cayley_inverse_unitary -------------------------------------------------------------


def test_inverse_of_identity_is_zero():
    generator = cayley_inverse_unitary(np.eye(4, dtype=complex))
    np.testing.assert_allclose(generator.eigenvalues, 0, atol=1e-15)


def test_inverse_of_quarter_turns():
    generator = cayley_inverse_unitary(np.diag([1j, -1j]))
    np.testing.assert_allclose(generator.eigenvalues, [-1, 1], atol=1e-14)


@pytest.mark.parametrize("dim", [2, 4])
def test_inverse_round_trip(dim):
    rng = np.random.default_rng(31)
    for _ in range(50):
        H = haar_unitary(dim, rng)
        generator = cayley_inverse_unitary(H)
        assert max_abs(generator.reconstruct(cayley) - H) < 1e-10


def test_inverse_round_trip_high_precision(mp256):
    H = haar_unitary(4, np.random.default_rng(32), field=mp256)
    generator = cayley_inverse_unitary(H)
    rebuilt = generator.reconstruct(lambda h: cayley(h, field=mp256))
    assert max_abs(rebuilt - H) < mp256.real(10) ** -60


def test_inverse_rejects_branch_point():
    with pytest.raises(PhaseAtBranchPoint):
        cayley_inverse_unitary(np.diag([-1, 1]).astype(complex))
    near = np.diag([np.exp(1j * (math.pi - 1e-10)), 1])
    with pytest.raises(PhaseAtBranchPoint, match="within"):
        cayley_inverse_unitary(near)


def test_inverse_rejects_non_unitary():
    with pytest.raises(NotUnitary):
        cayley_inverse_unitary(np.diag([1, 2]).astype(complex))


# -- CayleyGate -----------------------------------------------------------------------


def test_gate_validation():
    generator = cayley_inverse_unitary(np.eye(2, dtype=complex))
    with pytest.raises(DimensionMismatch):
        CayleyGate(np.eye(4), generator)
    with pytest.raises(NotUnitary):
        CayleyGate(np.diag([1, 2]), generator)


def test_gate_is_frozen():
    g = _gates(1, 2, 1)[0]
    with pytest.raises(ValueError):
        g.worst_gate[0, 0] = 0


def test_sample_is_deterministic():
    first = CayleyGate.sample(4, np.random.default_rng(9))
    second = CayleyGate.sample(4, np.random.default_rng(9))
    np.testing.assert_array_equal(gate_at(first, 0.3), gate_at(second, 0.3))


def test_sample_keeps_given_worst_gate():
    worst = haar_unitary(2, np.random.default_rng(2))
    g = CayleyGate.sample(2, np.random.default_rng(3), worst_gate=worst)
    np.testing.assert_array_equal(g.worst_gate, worst)


def test_sample_gives_up_after_repeated_branch_hits():
    # a guard of pi rejects every nonzero eigenphase
    with pytest.raises(PhaseAtBranchPoint, match="consecutive"):
        CayleyGate.sample(2, np.random.default_rng(0), guard=math.pi)


# -- gate_at ----------------------------------------------------------------------------


@pytest.mark.parametrize("dim", [2, 4])
def test_path_endpoints(dim):
    for g in _gates(50, dim, 40 + dim):
        assert max_abs(gate_at(g, 0) - g.worst_gate) < 1e-12
        assert max_abs(gate_at(g, 1) - g.worst_gate @ g.companion) < 1e-12


def test_path_is_unitary_everywhere():
    rng = np.random.default_rng(50)
    gates = _gates(50, 2, 51) + _gates(50, 4, 52)
    for g in gates:
        for theta in rng.uniform(-2, 2, size=100):
            assert unitarity_residual(gate_at(g, theta)) < 1e-10


def test_path_unitary_at_interior_point():
    g = _gates(1, 4, 53)[0]
    assert unitarity_residual(gate_at(g, 0.37)) < 1e-12


def test_conjugate_gate_reverses_the_path():
    for g in _gates(10, 4, 54):
        for theta in (0.3, 1.0, 1.7):
            assert max_abs(gate_at(g.conjugate(), -theta) - np.conj(gate_at(g, theta))) < 1e-12


def test_to_field_agrees_with_machine(mp256):
    g = _gates(1, 4, 55)[0]
    lifted = g.to_field(mp256)
    assert lifted.field is mp256
    assert g.to_field(MACHINE) is g
    assert max_abs(MACHINE.array(gate_at(lifted, 0.8)) - gate_at(g, 0.8)) < 1e-12


# -- factorization ------------------------------------------------------------------------


def test_local_factors_at_zero():
    g = _gates(1, 4, 60)[0]
    factors = local_factors(g, 0)
    assert factors.denominator == 1
    assert all(p == 1 for p in factors.numerators)


def test_local_factors_closed_form():
    factors = local_factors(_diagonal_gate(), 1)
    assert abs(factors.denominator - 2) < 1e-15


def test_factored_form_matches_path():
    for g in _gates(10, 4, 61):
        assert max_abs(factored_gate_at(g, 0.5) - gate_at(g, 0.5)) < 1e-12


def test_q_times_gate_is_polynomial_of_degree_dim():
    g = _gates(1, 4, 62)[0]

    def scaled(theta):
        return local_factors(g, theta).denominator * gate_at(g, theta)

    nodes = np.cos(np.pi * (np.arange(5) + 0.5) / 5)
    values = np.stack([scaled(x) for x in nodes])
    tol = 1e-9 * (1 + np.abs(values).max())
    fresh = np.array([-0.9, -0.35, 0.1, 0.55, 0.95])
    for i in range(4):
        for j in range(4):
            re = P.polyfit(nodes, values[:, i, j].real, 4)
            im = P.polyfit(nodes, values[:, i, j].imag, 4)
            for x in fresh:
                fitted = P.polyval(x, re) + 1j * P.polyval(x, im)
                assert abs(fitted - scaled(x)[i, j]) < tol


# -- z form -----------------------------------------------------------------------------


def test_z_form_examples():
    g = _gates(1, 4, 70)[0]
    assert max_abs(gate_at_z(g, 0) - gate_at(g, 1)) < 1e-12
    assert max_abs(gate_at_z(g, -1) - g.worst_gate) < 1e-12
    assert max_abs(gate_at_z(g, 0.01) - gate_at(g, 1.01)) < 1e-12


def test_z_form_agrees_with_theta_form():
    rng = np.random.default_rng(71)
    for g in _gates(20, 4, 72):
        for z in rng.uniform(-1, 1, size=20):
            assert max_abs(gate_at_z(g, z) - gate_at(g, 1 + z)) < 1e-10


def test_z_form_factors_ranges():
    for g in _gates(20, 4, 73):
        factors = z_form_factors(g)
        assert all(r >= 1 for r in factors.moduli)
        assert all(-math.pi / 2 < u < math.pi / 2 for u in factors.angles)


def test_q_modulus_z_factor_matches_direct_ratio():
    for g in _gates(10, 4, 74):
        base = abs(local_factors(g, 1).denominator) ** 2
        for z in (-0.5, -0.01, 0.0, 0.02, 0.3):
            direct = abs(local_factors(g, 1 + z).denominator) ** 2 / base
            assert q_modulus_z_factor(g, z) == pytest.approx(direct, rel=1e-12)
