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

"""Exception hierarchy shared by every cayley_rcs module."""

from __future__ import annotations

from typing import Any, Optional


class CayleyRcsError(Exception):
    """Base class for all errors raised by cayley_rcs."""


# linalg-core


class NotHermitian(CayleyRcsError, ValueError):
    """A matrix expected to be Hermitian is not, to the requested tolerance."""


class NotUnitary(CayleyRcsError, ValueError):
    """A matrix expected to be unitary is not, to the requested tolerance."""


class NoConvergence(CayleyRcsError):
    """An iterative eigensolver hit its sweep cap."""


class SingularMatrix(CayleyRcsError, ValueError):
    """A linear system has no unique solution at the working precision."""


class UnsupportedOperation(CayleyRcsError, TypeError):
    """The scalar backend cannot perform this operation (e.g. sqrt on rationals)."""


# cayley-path


class PhaseAtBranchPoint(CayleyRcsError, ValueError):
    """A unitary has an eigenphase too close to ±π for the inverse Cayley map."""


# circuit-sim


class DimensionMismatch(CayleyRcsError, ValueError):
    """Gate, state or bitstring sizes do not agree."""


class TooLarge(CayleyRcsError, ValueError):
    """An exponential-cost computation was asked for beyond its size guard."""


# rational-interp


class PoleProximity(CayleyRcsError, ArithmeticError):
    """A rational function was evaluated (numerically) at a root of its denominator."""


class DegenerateSystem(CayleyRcsError):
    """The linearized interpolation system has no acceptable solution."""


class DuplicateNodes(CayleyRcsError, ValueError):
    """Sample nodes are not pairwise distinct."""


class NodeRangeError(CayleyRcsError, ValueError):
    """Floating-point fits require nodes affinely mapped into [-1, 1]."""


class TooManyErrors(CayleyRcsError):
    """Berlekamp-Welch decoding could not certify a unique answer."""


# haar-stats


class UnsupportedDimension(CayleyRcsError, ValueError):
    """The estimator does not support this gate dimension."""


# reduction-harness


class ConfigError(CayleyRcsError, ValueError):
    """A reduction configuration violates one of its invariants."""


class _ReportError(CayleyRcsError):
    def __init__(self, message: str, report: Optional[Any] = None):
        super().__init__(message)
        self.report = report


class DecodeFailed(_ReportError):
    """The reduction could not decode the oracle samples.

    The partially filled report is available as ``.report``.
    """


class PrecisionInsufficient(_ReportError):
    """The decoded function failed validation at held-out nodes.

    The partially filled report is available as ``.report``.
    """


# cli


class CircuitFileError(CayleyRcsError, ValueError):
    """A circuit file is malformed or fails validation."""
