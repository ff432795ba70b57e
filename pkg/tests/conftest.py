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

from typing import Callable

import numpy as np
import pytest

from cayley_rcs.circuit import Architecture, Circuit
from cayley_rcs.field import MACHINE, Field, mp_field

# n=2 with two 2-qubit gates: the reference configuration of the reduction tests.
REFERENCE_ARCHITECTURE = Architecture(2, ((0, 1), (0, 1)))
REFERENCE_SEED = 2024


@pytest.fixture(scope="function")
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def mp256() -> Field:
    return mp_field(256)


@pytest.fixture(scope="session")
def mp512() -> Field:
    return mp_field(512)


@pytest.fixture(scope="session")
def make_circuit() -> Callable[..., Circuit]:
    """Factory for seeded random circuits: ``make_circuit(n, "0-1,1", seed, field=...)``."""

    def make(n: int, placements: str, seed: int, *, field: Field = MACHINE) -> Circuit:
        architecture = Architecture.parse(n, placements)
        return Circuit.sample(architecture, np.random.default_rng(seed), field=field)

    return make


@pytest.fixture(scope="session")
def reference_circuit(mp512: Field) -> Circuit:
    return Circuit.sample(
        REFERENCE_ARCHITECTURE, np.random.default_rng(REFERENCE_SEED), field=mp512
    )


def pytest_configure(config):
    """Configure pytest with custom markers and settings."""
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )


@pytest.hookimpl(tryfirst=True, hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """Name the scalar backend of a failing test in its report."""
    outcome = yield
    rep = outcome.get_result()

    funcargs = getattr(item, "funcargs", {})
    fields = [v for v in funcargs.values() if isinstance(v, Field)]
    if fields and rep.failed and call.when == "call":
        names = ", ".join(sorted({f.name for f in fields}))
        print(f"\n[FAILED on backend {names}] Test: {item.name}")
