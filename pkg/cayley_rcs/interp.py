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

"""Rational interpolation and Berlekamp-Welch decoding of rational functions.

A rational function ``F = A / B`` with ``deg A <= k1`` and ``deg B <= k2`` is
recovered from samples ``(x_i, f_i)`` through the linearized system
``A(x_i) - f_i B(x_i) = 0``. With ``t`` corrupted samples the same system is
solved at degrees ``(k1 + t, k2 + t)``: the error locator ``E`` multiplies both
``A`` and ``B`` and cancels in the quotient.

The exact backend takes the kernel by row reduction over the rationals and
cancels common factors with Euclid's algorithm. Floating backends take the
smallest right singular vector of the design matrix, locate the agreement set
and refit on it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np

from cayley_rcs.config import FLOAT_ACCEPT_RTOL, MAX_FLOAT_NODE
from cayley_rcs.errors import (
    DegenerateSystem,
    DuplicateNodes,
    NodeRangeError,
    PoleProximity,
    TooManyErrors,
)
from cayley_rcs.field import EXACT, MACHINE, Field, infer_field

LOGGER = logging.getLogger(__name__)

ReduceMode = Literal["exact", "approximate"]


@dataclass(frozen=True)
class Polynomial:
    """Coefficients in ascending degree, padded to ``declared_degree + 1``."""

    coeffs: Tuple[Any, ...]
    declared_degree: Optional[int] = None

    def __post_init__(self) -> None:
        coeffs = list(self.coeffs)
        declared = len(coeffs) - 1 if self.declared_degree is None else int(self.declared_degree)
        if declared < 0:
            raise ValueError("a polynomial needs a declared degree of at least 0")
        zero = coeffs[0] * 0 if coeffs else 0
        while len(coeffs) < declared + 1:
            coeffs.append(zero)
        if any(c != 0 for c in coeffs[declared + 1 :]):
            raise ValueError(
                f"polynomial of degree {_actual_degree(coeffs)} exceeds its declared degree {declared}"
            )
        object.__setattr__(self, "coeffs", tuple(coeffs[: declared + 1]))
        object.__setattr__(self, "declared_degree", declared)

    @property
    def degree(self) -> int:
        """Actual degree; -1 for the zero polynomial."""
        return _actual_degree(self.coeffs)

    def is_zero(self) -> bool:
        return self.degree < 0

    def __call__(self, x: Any) -> Any:
        value = self.coeffs[-1] * 1
        for c in reversed(self.coeffs[:-1]):
            value = value * x + c
        return value

    def magnitude(self, x: Any) -> Any:
        """``sum |c_i| |x|^i``, the scale of rounding errors in ``self(x)``."""
        ax = abs(x)
        value = abs(self.coeffs[-1])
        for c in reversed(self.coeffs[:-1]):
            value = value * ax + abs(c)
        return value

    def scaled(self, factor: Any) -> "Polynomial":
        return Polynomial(tuple(c * factor for c in self.coeffs), self.declared_degree)

    def with_declared_degree(self, degree: int) -> "Polynomial":
        return Polynomial(self.coeffs, degree)


def _actual_degree(coeffs: Sequence[Any]) -> int:
    for k in range(len(coeffs) - 1, -1, -1):
        if coeffs[k] != 0:
            return k
    return -1


@dataclass(frozen=True)
class RationalFunction:
    """``numerator / denominator`` with declared degree bounds ``(k1, k2)``."""

    numerator: Polynomial
    denominator: Polynomial
    field: Optional[Field] = dataclass_field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.denominator.is_zero():
            raise ValueError("the denominator of a rational function cannot be identically zero")
        if self.field is None:
            object.__setattr__(
                self, "field", infer_field(self.numerator.coeffs, self.denominator.coeffs)
            )

    @property
    def degrees(self) -> Tuple[int, int]:
        return self.numerator.declared_degree, self.denominator.declared_degree

    def __call__(self, theta: Any) -> Any:
        return evaluate(self, theta)

    def normalized(self) -> "RationalFunction":
        """Scale so the leading denominator coefficient is 1.

        On floating backends coefficients below ``default_tol`` relative to the
        largest one are skipped when choosing the leading coefficient.
        """
        coeffs = self.denominator.coeffs
        lead = None
        if self.field.exact:
            lead = coeffs[self.denominator.degree]
        else:
            biggest = max(abs(c) for c in coeffs)
            for c in reversed(coeffs):
                if abs(c) > self.field.default_tol * biggest:
                    lead = c
                    break
        inverse = 1 / lead
        return RationalFunction(
            self.numerator.scaled(inverse), self.denominator.scaled(inverse), self.field
        )

    def scaled(self, factor: Any) -> "RationalFunction":
        return RationalFunction(self.numerator.scaled(factor), self.denominator, self.field)


@dataclass(frozen=True)
class SamplePoint:
    """An evaluation ``(node, value)``."""

    node: Any
    value: Any


@dataclass(frozen=True)
class DecodeResult:
    """Outcome of Berlekamp-Welch decoding."""

    function: RationalFunction
    disagreeing_indices: Tuple[int, ...]
    agreement_size: int
    diagnostics: Dict[str, Any] = dataclass_field(default_factory=dict, compare=False)


def evaluate(F: RationalFunction, theta: Any) -> Any:
    """Horner evaluation of ``numerator(theta) / denominator(theta)``.

    Raises
    ------
    PoleProximity
        If the denominator vanishes at ``theta`` at the backend's precision.
    """
    den = F.denominator(theta)
    if F.field.is_negligible(den, F.denominator.magnitude(theta)):
        raise PoleProximity(f"denominator vanishes at theta={theta}")
    return F.numerator(theta) / den


def chebyshev_nodes(k: int, *, field: Field = MACHINE) -> List[Any]:
    """``k`` Chebyshev points of the first kind on ``[-1, 1]``, ascending."""
    if k < 1:
        raise ValueError(f"need at least one node, got k={k}")
    pi = field.pi
    return [field.cos((2 * j + 1) * pi / (2 * k)) for j in range(k - 1, -1, -1)]


# -- exact polynomial arithmetic over the rationals -----------------------------


def _trim(coeffs: Sequence[Fraction]) -> List[Fraction]:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _poly_divmod(a: Sequence[Fraction], b: Sequence[Fraction]) -> Tuple[List[Fraction], List[Fraction]]:
    a, b = _trim(a), _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    quotient = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    remainder = list(a)
    while len(remainder) >= len(b) and remainder:
        shift = len(remainder) - len(b)
        factor = remainder[-1] / b[-1]
        quotient[shift] = factor
        for i, c in enumerate(b):
            remainder[shift + i] -= factor * c
        remainder = _trim(remainder)
    return quotient, remainder


def _poly_gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> List[Fraction]:
    """Monic gcd by Euclid's algorithm."""
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _poly_divmod(a, b)[1]
    if not a:
        return [Fraction(1)]
    lead = a[-1]
    return [c / lead for c in a]


# -- linear algebra of the linearized system ------------------------------------


def _exact_kernel(rows: List[List[Fraction]], ncols: int) -> List[List[Fraction]]:
    """Basis of the right kernel by reduced row echelon form."""
    matrix = [list(r) for r in rows]
    pivots = []
    row = 0
    for col in range(ncols):
        pivot = next((r for r in range(row, len(matrix)) if matrix[r][col] != 0), None)
        if pivot is None:
            continue
        matrix[row], matrix[pivot] = matrix[pivot], matrix[row]
        lead = matrix[row][col]
        matrix[row] = [v / lead for v in matrix[row]]
        for r in range(len(matrix)):
            if r != row and matrix[r][col] != 0:
                factor = matrix[r][col]
                matrix[r] = [v - factor * p for v, p in zip(matrix[r], matrix[row])]
        pivots.append(col)
        row += 1
        if row == len(matrix):
            break

    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        vector = [Fraction(0)] * ncols
        vector[free] = Fraction(1)
        for r, col in enumerate(pivots):
            vector[col] = -matrix[r][free]
        basis.append(vector)
    return basis


def _design_rows(points: Sequence[SamplePoint], k1: int, k2: int, scale: Any) -> List[List[Any]]:
    rows = []
    for p in points:
        powers = [p.node**j for j in range(max(k1, k2) + 1)]
        f = p.value / scale
        rows.append(powers[: k1 + 1] + [-f * x for x in powers[: k2 + 1]])
    return rows


def _float_null_vector(rows: List[List[Any]], field: Field) -> Tuple[List[Any], Dict[str, float]]:
    """Right singular vector of the smallest singular value, plus conditioning figures."""
    ncols = len(rows[0])
    if field.name == MACHINE.name:
        M = np.array(rows, dtype=np.complex128)
        _, sigma, vh = np.linalg.svd(M, full_matrices=True)
        vector = list(np.conj(vh[-1]))
        sigma = list(sigma) + [0.0] * (ncols - len(sigma))
    else:
        ctx = field.ctx
        padded = [list(r) for r in rows] + [[0] * ncols for _ in range(max(ncols - len(rows), 0))]
        _, S, V = ctx.svd_c(ctx.matrix(padded), full_matrices=False, compute_uv=True)
        sigma = [S[k] for k in range(ncols)]
        smallest = min(range(ncols), key=lambda k: sigma[k])
        vector = [ctx.conj(V[smallest, j]) for j in range(ncols)]
        sigma = sorted(sigma, reverse=True)

    largest = float(sigma[0]) or 1.0
    diagnostics = {
        "smallest_singular_ratio": float(sigma[-1]) / largest,
        "second_smallest_singular_ratio": float(sigma[-2]) / largest if ncols > 1 else 0.0,
    }
    return vector, diagnostics


def _check_nodes(points: Sequence[SamplePoint], field: Field) -> None:
    nodes = [p.node for p in points]
    if not field.exact:
        worst = max((abs(x) for x in nodes), default=0)
        if worst > MAX_FLOAT_NODE:
            raise NodeRangeError(
                f"max |node| = {field.to_float(worst):.6g} exceeds {MAX_FLOAT_NODE}; map the "
                f"nodes affinely into [-1, 1] before fitting"
            )
    ordered = sorted(nodes, key=lambda x: field.to_float(x) if not field.exact else x)
    for a, b in zip(ordered, ordered[1:]):
        if a == b:
            raise DuplicateNodes(f"node {a} appears more than once")


def _data_scale(points: Sequence[SamplePoint], field: Field) -> Any:
    if field.exact:
        return Fraction(1)
    scale = max((abs(p.value) for p in points), default=0)
    return scale if scale != 0 else field.real(1)


def _split(vector: Sequence[Any], k1: int, k2: int, field: Field) -> Tuple[Polynomial, Polynomial]:
    lift = field.lift if not field.exact else field.real
    coeffs = [lift(v) for v in vector]
    return Polynomial(tuple(coeffs[: k1 + 1]), k1), Polynomial(tuple(coeffs[k1 + 1 :]), k2)


def _agrees(F: RationalFunction, point: SamplePoint, tolerance: Any) -> bool:
    try:
        value = evaluate(F, point.node)
    except PoleProximity:
        return False
    if F.field.exact:
        return value == point.value
    return abs(value - point.value) <= tolerance


def reduce_common_factor(
    num: Polynomial, den: Polynomial, mode: ReduceMode = "exact"
) -> RationalFunction:
    """Cancel the common factor of ``num`` and ``den``.

    ``exact`` divides out the polynomial gcd over the rationals. ``approximate``
    is a documented pass-through: floating callers evaluate ``num / den``
    directly and validate by held-out agreement instead.
    """
    if den.is_zero():
        raise ValueError("the denominator cannot be identically zero")
    if mode == "approximate":
        return RationalFunction(num, den).normalized()
    if mode != "exact":
        raise ValueError(f"unknown reduction mode {mode!r}; use 'exact' or 'approximate'")

    a = [Fraction(c) for c in num.coeffs]
    b = [Fraction(c) for c in den.coeffs]
    g = _poly_gcd(a, b)
    reduced_num = _trim(_poly_divmod(a, g)[0]) if _trim(a) else []
    reduced_den = _trim(_poly_divmod(b, g)[0])
    numerator = Polynomial(tuple(reduced_num) or (Fraction(0),))
    denominator = Polynomial(tuple(reduced_den))
    return RationalFunction(numerator, denominator, EXACT).normalized()


def fit_rational(
    points: Sequence[SamplePoint],
    k1: int,
    k2: int,
    *,
    field: Optional[Field] = None,
    rtol: Any = FLOAT_ACCEPT_RTOL,
) -> RationalFunction:
    """Fit ``F = A / B`` with ``deg A <= k1``, ``deg B <= k2`` through ``points``.

    Parameters
    ----------
    points : sequence of SamplePoint
        At least ``k1 + k2 + 1`` samples with distinct nodes. Floating backends
        require ``|node| <= 1.5``.
    k1, k2 : int
        Degree bounds of numerator and denominator.
    field : Field, optional
        Backend; inferred from the samples when omitted.
    rtol : float
        Floating-mode acceptance residual, relative to ``max |f_i|``.

    Returns
    -------
    RationalFunction
        Normalized so the leading denominator coefficient is 1.

    Raises
    ------
    DegenerateSystem
        If the kernel is trivial (exact) or the fit misses the data by more
        than ``rtol``.
    DuplicateNodes
        If two nodes coincide.
    """
    points = list(points)
    if k1 < 0 or k2 < 0:
        raise ValueError(f"degree bounds must be non-negative, got ({k1}, {k2})")
    if len(points) < k1 + k2 + 1:
        raise ValueError(
            f"a degree ({k1}, {k2}) fit needs at least {k1 + k2 + 1} points, got {len(points)}"
        )
    field = field or infer_field([p.node for p in points], [p.value for p in points])
    points = [SamplePoint(field.real(p.node), _lift_value(field, p.value)) for p in points]
    _check_nodes(points, field)

    if field.exact:
        basis = _exact_kernel(_design_rows(points, k1, k2, Fraction(1)), k1 + k2 + 2)
        if not basis:
            raise DegenerateSystem(f"no rational function of degree ({k1}, {k2}) fits the data")
        num, den = _split(basis[0], k1, k2, field)
        F = reduce_common_factor(num, den, "exact")
        F = RationalFunction(F.numerator.with_declared_degree(k1), F.denominator.with_declared_degree(k2), field)
        misses = [i for i, p in enumerate(points) if not _agrees(F, p, 0)]
        if misses:
            raise DegenerateSystem(
                f"the degree ({k1}, {k2}) kernel solution misses samples {misses}; the data is "
                f"not consistent with these degree bounds"
            )
        return F

    scale = _data_scale(points, field)
    vector, diagnostics = _float_null_vector(_design_rows(points, k1, k2, scale), field)
    num, den = _split(vector, k1, k2, field)
    if den.is_zero():
        raise DegenerateSystem("the null vector has a vanishing denominator")
    F = RationalFunction(num.scaled(scale), den, field).normalized()

    tolerance = rtol * scale
    residual = field.real(0)
    for p in points:
        try:
            residual = max(residual, abs(evaluate(F, p.node) - p.value))
        except PoleProximity:
            raise DegenerateSystem(f"fitted denominator vanishes at node {p.node}") from None
    LOGGER.debug(
        "Rational fit (%d, %d) on %d points: residual %s, singular ratio %.3g",
        k1, k2, len(points), residual, diagnostics["smallest_singular_ratio"],
    )
    if residual > tolerance:
        raise DegenerateSystem(
            f"fit residual {field.to_float(residual):.3g} exceeds the acceptance tolerance "
            f"{field.to_float(tolerance):.3g}"
        )
    return F


def _lift_value(field: Field, value: Any) -> Any:
    return field.real(value) if field.exact else field.lift(value)


def bw_decode_detailed(
    points: Sequence[SamplePoint],
    k1: int,
    k2: int,
    t: int,
    *,
    field: Optional[Field] = None,
    rtol: Any = FLOAT_ACCEPT_RTOL,
) -> DecodeResult:
    """Berlekamp-Welch decoding of a degree ``(k1, k2)`` rational function.

    Up to ``t`` samples may be wrong. The decoded function is accepted only if
    it has degree at most ``(k1, k2)`` and agrees with at least
    ``len(points) - t`` samples.

    Raises
    ------
    TooManyErrors
        If ``len(points) <= k1 + k2 + 2t`` or no function within the error
        budget explains the data.
    DuplicateNodes
        If two nodes coincide.
    """
    points = list(points)
    n = len(points)
    if t < 0:
        raise ValueError(f"error budget must be non-negative, got t={t}")
    if n <= k1 + k2 + 2 * t:
        raise TooManyErrors(
            f"{n} points cannot certify a degree ({k1}, {k2}) function with {t} errors; "
            f"need more than k1 + k2 + 2t = {k1 + k2 + 2 * t}"
        )
    field = field or infer_field([p.node for p in points], [p.value for p in points])
    points = [SamplePoint(field.real(p.node), _lift_value(field, p.value)) for p in points]
    _check_nodes(points, field)

    if field.exact:
        return _bw_exact(points, k1, k2, t, field)
    return _bw_floating(points, k1, k2, t, field, rtol)


def bw_decode(
    points: Sequence[SamplePoint],
    k1: int,
    k2: int,
    t: int,
    *,
    field: Optional[Field] = None,
    rtol: Any = FLOAT_ACCEPT_RTOL,
) -> RationalFunction:
    """Decoded function only; see :func:`bw_decode_detailed`."""
    return bw_decode_detailed(points, k1, k2, t, field=field, rtol=rtol).function


def _bw_exact(points: List[SamplePoint], k1: int, k2: int, t: int, field: Field) -> DecodeResult:
    n = len(points)
    ncols = k1 + k2 + 2 * t + 2
    basis = _exact_kernel(_design_rows(points, k1 + t, k2 + t, Fraction(1)), ncols)
    if not basis:
        raise TooManyErrors("the linearized system has only the trivial solution")
    num, den = _split(basis[0], k1 + t, k2 + t, field)
    if den.is_zero():
        raise TooManyErrors("the kernel solution has a vanishing denominator")

    F = reduce_common_factor(num, den, "exact")
    if F.numerator.degree > k1 or F.denominator.degree > k2:
        raise TooManyErrors(
            f"reduced function has degree ({F.numerator.degree}, {F.denominator.degree}), "
            f"above the bound ({k1}, {k2})"
        )
    F = RationalFunction(
        F.numerator.with_declared_degree(k1), F.denominator.with_declared_degree(k2), field
    )
    disagreeing = tuple(i for i, p in enumerate(points) if not _agrees(F, p, 0))
    if n - len(disagreeing) < n - t:
        raise TooManyErrors(
            f"decoded function agrees with {n - len(disagreeing)} of {n} samples; "
            f"at least {n - t} are required"
        )
    return DecodeResult(
        F, disagreeing, n - len(disagreeing), {"kernel_dimension": len(basis)}
    )


def _bw_floating(
    points: List[SamplePoint], k1: int, k2: int, t: int, field: Field, rtol: Any
) -> DecodeResult:
    n = len(points)
    scale = _data_scale(points, field)
    tolerance = rtol * scale

    vector, diagnostics = _float_null_vector(_design_rows(points, k1 + t, k2 + t, scale), field)
    num, den = _split(vector, k1 + t, k2 + t, field)
    if den.is_zero():
        raise TooManyErrors("the null vector has a vanishing denominator")
    located = RationalFunction(num.scaled(scale), den, field)

    agreeing = [i for i, p in enumerate(points) if _agrees(located, p, tolerance)]
    if len(agreeing) < n - t:
        raise TooManyErrors(
            f"error locator leaves {len(agreeing)} of {n} samples in agreement; "
            f"at least {n - t} are required"
        )

    try:
        F = fit_rational([points[i] for i in agreeing], k1, k2, field=field, rtol=rtol)
    except DegenerateSystem as e:
        raise TooManyErrors(f"refit on the agreement set failed: {e}") from e

    disagreeing = tuple(i for i, p in enumerate(points) if not _agrees(F, p, tolerance))
    if n - len(disagreeing) < n - t:
        raise TooManyErrors(
            f"decoded function agrees with {n - len(disagreeing)} of {n} samples; "
            f"at least {n - t} are required"
        )
    LOGGER.debug("Berlekamp-Welch: %d of %d samples disagree", len(disagreeing), n)
    return DecodeResult(F, disagreeing, n - len(disagreeing), diagnostics)
