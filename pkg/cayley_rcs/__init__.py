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

"""Cayley-path interpolation for worst-to-average-case reductions of random circuit sampling."""

from importlib.metadata import PackageNotFoundError, version

# Resolved from the installed distribution; source checkouts fall back to a dev marker.
try:
    __version__ = version("cayley-rcs")
except PackageNotFoundError:  # pragma: no cover - only hits in an uninstalled checkout
    __version__ = "0.0.0+unknown"

from cayley_rcs.cayley import CayleyGate, cayley, cayley_inverse_unitary, gate_at
from cayley_rcs.circuit import Architecture, Circuit, StateVector, amplitude, evolve, p0
from cayley_rcs.errors import CayleyRcsError, DecodeFailed, PrecisionInsufficient
from cayley_rcs.field import EXACT, MACHINE, Field, field_for_precision, mp_field
from cayley_rcs.haar_stats import estimate_tvd
from cayley_rcs.interp import RationalFunction, SamplePoint, bw_decode, fit_rational
from cayley_rcs.reduction import (
    OracleModel,
    ReductionConfig,
    paturi_bound,
    robustness_bound,
    run_reduction,
)

__all__ = [
    "Architecture",
    "CayleyGate",
    "CayleyRcsError",
    "Circuit",
    "DecodeFailed",
    "EXACT",
    "Field",
    "MACHINE",
    "OracleModel",
    "PrecisionInsufficient",
    "RationalFunction",
    "ReductionConfig",
    "SamplePoint",
    "StateVector",
    "amplitude",
    "bw_decode",
    "cayley",
    "cayley_inverse_unitary",
    "estimate_tvd",
    "evolve",
    "field_for_precision",
    "fit_rational",
    "gate_at",
    "mp_field",
    "p0",
    "paturi_bound",
    "robustness_bound",
    "run_reduction",
]
