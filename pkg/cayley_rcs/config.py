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

"""Library-wide defaults and environment configuration."""

from __future__ import annotations

import os

PRECISION_BITS_ENV = "CAYLEY_RCS_PRECISION_BITS"

MACHINE_PRECISION_BITS = 53
DEFAULT_PRECISION_BITS = 512

# Eigenphases within this distance of ±π are rejected by the inverse Cayley map.
DEFAULT_BRANCH_GUARD = 1e-8

JACOBI_MAX_SWEEPS = 100

# Unitarity tolerance applied to user supplied gates (circuit files, worst gates).
UNITARITY_TOL = 1e-8

# Floating-mode acceptance residual for rational fits, relative to data scale.
FLOAT_ACCEPT_RTOL = 1e-6

# Floating-mode fits assert max |node| <= this.
MAX_FLOAT_NODE = 1.5

FEYNMAN_MAX_QUBITS = 6
FEYNMAN_MAX_GATES = 6

TVD_GRID = 400
TVD_MIN_SAMPLES = 1000


def default_precision_bits() -> int:
    """Return the high-precision mantissa bits, honouring ``CAYLEY_RCS_PRECISION_BITS``."""
    raw = os.getenv(PRECISION_BITS_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_PRECISION_BITS

    try:
        bits = int(raw)
    except ValueError:
        raise ValueError(
            f"{PRECISION_BITS_ENV} must be an integer number of mantissa bits, "
            f"got {raw!r}"
        ) from None

    if bits < MACHINE_PRECISION_BITS:
        raise ValueError(
            f"{PRECISION_BITS_ENV}={bits} is below machine precision; "
            f"use at least {MACHINE_PRECISION_BITS}"
        )
    return bits
