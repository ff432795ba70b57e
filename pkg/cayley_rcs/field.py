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

"""Scalar backends.

Three fields share one interface:

- ``MACHINE``: IEEE doubles, matrices are ``complex128`` arrays.
- ``MPField(bits)``: mpmath numbers from a private ``MPContext`` with the
  given mantissa bits, matrices are ``dtype=object`` arrays.
- ``EXACT``: ``fractions.Fraction``; real only, no transcendental functions.

Every numeric routine in the package takes a ``field`` and uses it to build
scalars and arrays, so the same code runs on all three. Each MPField owns
its context and never changes its precision after construction, which keeps
concurrent use of distinct fields safe.
"""

from __future__ import annotations

import abc
import functools
import math
from fractions import Fraction
from typing import Any, Iterable, Optional, Tuple, Union

import mpmath
import numpy as np

from cayley_rcs.config import MACHINE_PRECISION_BITS
from cayley_rcs.errors import UnsupportedOperation

Shape = Union[int, Tuple[int, ...]]


class Field(abc.ABC):
    """A scalar backend: element constructors, constants and elementary functions."""

    name: str = "abstract"
    exact: bool = False
    bits: Optional[int] = None

    # -- element construction ------------------------------------------------

    @abc.abstractmethod
    def real(self, value: Any) -> Any:
        """Convert ``value`` to a real element of this field."""

    @abc.abstractmethod
    def lift(self, value: Any) -> Any:
        """Convert ``value`` to this field's general (complex where available) element."""

    def complex(self, re: Any, im: Any = 0) -> Any:
        if im == 0:
            return self.lift(self.real(re))
        return self.lift(self.real(re)) + self.imag_unit * self.real(im)

    @property
    def zero(self) -> Any:
        return self.lift(0)

    @property
    def one(self) -> Any:
        return self.lift(1)

    @property
    @abc.abstractmethod
    def imag_unit(self) -> Any:
        ...

    @property
    @abc.abstractmethod
    def eps(self) -> Any:
        """Unit roundoff; zero for the exact field."""

    @property
    @abc.abstractmethod
    def default_tol(self) -> Any:
        ...

    # -- arrays --------------------------------------------------------------

    @abc.abstractmethod
    def array(self, values: Any) -> np.ndarray:
        """Build an array of general elements from nested sequences or an ndarray."""

    @abc.abstractmethod
    def real_array(self, values: Any) -> np.ndarray:
        ...

    def zeros(self, shape: Shape) -> np.ndarray:
        return self.array(np.zeros(shape))

    def eye(self, n: int) -> np.ndarray:
        return self.array(np.eye(n))

    # -- elementary functions --------------------------------------------------

    @property
    @abc.abstractmethod
    def pi(self) -> Any:
        ...

    @abc.abstractmethod
    def sqrt(self, x: Any) -> Any:
        ...

    @abc.abstractmethod
    def exp(self, x: Any) -> Any:
        ...

    @abc.abstractmethod
    def log(self, x: Any) -> Any:
        ...

    @abc.abstractmethod
    def sin(self, x: Any) -> Any:
        ...

    @abc.abstractmethod
    def cos(self, x: Any) -> Any:
        ...

    @abc.abstractmethod
    def tan(self, x: Any) -> Any:
        ...

    @abc.abstractmethod
    def atan(self, x: Any) -> Any:
        ...

    # -- helpers shared by all backends --------------------------------------

    def is_negligible(self, x: Any, scale: Any = 1) -> bool:
        """True when ``|x|`` is zero at this field's precision relative to ``scale``."""
        if self.exact:
            return x == 0
        return abs(x) <= self.eps * scale

    def abs2(self, x: Any) -> Any:
        return (x * x.conjugate()).real

    def to_float(self, x: Any) -> float:
        return float(x.real)

    def to_complex(self, x: Any) -> complex:
        return complex(x)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


def _as_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        return Fraction(float(value))
    if isinstance(value, mpmath.mpf) or hasattr(value, "man_exp"):
        if not mpmath.isfinite(value):
            raise ValueError(f"cannot represent {value} as a fraction")
        # man_exp holds the magnitude; the sign is read separately
        man, exp = value.man_exp
        magnitude = Fraction(int(man)) * Fraction(2) ** int(exp)
        return -magnitude if value < 0 else magnitude
    return Fraction(float(value))


def _has_imaginary_part(value: Any) -> bool:
    imag = getattr(value, "imag", 0)
    return imag != 0


class MachineField(Field):
    """IEEE double precision."""

    name = "machine"
    bits = MACHINE_PRECISION_BITS

    def real(self, value: Any) -> float:
        if isinstance(value, str):
            value = Fraction(value)
        if _has_imaginary_part(value):
            raise ValueError(f"expected a real value, got {value!r}")
        return float(value.real) if hasattr(value, "real") else float(value)

    def lift(self, value: Any) -> complex:
        if isinstance(value, str):
            value = Fraction(value)
        return complex(value)

    @property
    def imag_unit(self) -> complex:
        return 1j

    @property
    def eps(self) -> float:
        return float(np.finfo(np.float64).eps)

    @property
    def default_tol(self) -> float:
        return 1e-10

    def array(self, values: Any) -> np.ndarray:
        if isinstance(values, np.ndarray) and values.dtype == object:
            return np.vectorize(complex, otypes=[np.complex128])(values)
        return np.array(values, dtype=np.complex128)

    def real_array(self, values: Any) -> np.ndarray:
        if isinstance(values, np.ndarray) and values.dtype == object:
            return np.vectorize(self.real, otypes=[np.float64])(values)
        return np.array(values, dtype=np.float64)

    @property
    def pi(self) -> float:
        return math.pi

    def sqrt(self, x: Any) -> Any:
        return np.sqrt(x)

    def exp(self, x: Any) -> Any:
        return np.exp(x)

    def log(self, x: Any) -> Any:
        return np.log(x)

    def sin(self, x: Any) -> Any:
        return np.sin(x)

    def cos(self, x: Any) -> Any:
        return np.cos(x)

    def tan(self, x: Any) -> Any:
        return np.tan(x)

    def atan(self, x: Any) -> Any:
        return np.arctan(x)


class MPField(Field):
    """Software floating point with ``bits`` mantissa bits, backed by mpmath."""

    def __init__(self, bits: int):
        if bits < MACHINE_PRECISION_BITS:
            raise ValueError(
                f"high precision backend needs at least {MACHINE_PRECISION_BITS} "
                f"mantissa bits, got {bits}"
            )
        self.bits = int(bits)
        self.name = f"mpmath-{self.bits}"
        self.ctx = mpmath.MPContext()
        self.ctx.prec = self.bits
        self._lift = np.frompyfunc(self.lift, 1, 1)
        self._real = np.frompyfunc(self.real, 1, 1)

    def _mpf(self, value: Any) -> Any:
        if isinstance(value, Fraction):
            return self.ctx.mpf(value.numerator) / value.denominator
        if isinstance(value, np.integer):
            return self.ctx.mpf(int(value))
        return self.ctx.mpf(value)

    def real(self, value: Any) -> Any:
        if isinstance(value, str):
            value = Fraction(value)
        if _has_imaginary_part(value):
            raise ValueError(f"expected a real value, got {value!r}")
        return self._mpf(value.real if hasattr(value, "real") else value)

    def lift(self, value: Any) -> Any:
        if isinstance(value, str):
            value = Fraction(value)
        re = value.real if hasattr(value, "real") else value
        im = getattr(value, "imag", 0)
        return self.ctx.mpc(self._mpf(re), self._mpf(im))

    @property
    def imag_unit(self) -> Any:
        return self.ctx.mpc(0, 1)

    @property
    def eps(self) -> Any:
        return self.ctx.eps

    @property
    def default_tol(self) -> Any:
        return self.ctx.mpf(2) ** (-(self.bits // 2))

    def array(self, values: Any) -> np.ndarray:
        return np.asarray(self._lift(np.array(values, dtype=object)), dtype=object)

    def real_array(self, values: Any) -> np.ndarray:
        return np.asarray(self._real(np.array(values, dtype=object)), dtype=object)

    @property
    def pi(self) -> Any:
        return +self.ctx.pi

    def sqrt(self, x: Any) -> Any:
        return self.ctx.sqrt(x)

    def exp(self, x: Any) -> Any:
        return self.ctx.exp(x)

    def log(self, x: Any) -> Any:
        return self.ctx.log(x)

    def sin(self, x: Any) -> Any:
        return self.ctx.sin(x)

    def cos(self, x: Any) -> Any:
        return self.ctx.cos(x)

    def tan(self, x: Any) -> Any:
        return self.ctx.tan(x)

    def atan(self, x: Any) -> Any:
        return self.ctx.atan(x)


class ExactField(Field):
    """Exact rational arithmetic. Real values only."""

    name = "exact"
    exact = True

    def __init__(self) -> None:
        self._real = np.frompyfunc(self.real, 1, 1)

    def real(self, value: Any) -> Fraction:
        if _has_imaginary_part(value):
            raise UnsupportedOperation(
                "the exact backend holds rationals only; complex values need "
                "the machine or high precision backend"
            )
        if hasattr(value, "real") and not isinstance(value, (str, Fraction)):
            value = value.real
        return _as_fraction(value)

    def lift(self, value: Any) -> Fraction:
        return self.real(value)

    @property
    def imag_unit(self) -> Any:
        raise UnsupportedOperation("the exact backend has no imaginary unit")

    @property
    def eps(self) -> Fraction:
        return Fraction(0)

    @property
    def default_tol(self) -> Fraction:
        return Fraction(0)

    def array(self, values: Any) -> np.ndarray:
        return np.asarray(self._real(np.array(values, dtype=object)), dtype=object)

    def real_array(self, values: Any) -> np.ndarray:
        return self.array(values)

    def _unsupported(self, what: str) -> UnsupportedOperation:
        return UnsupportedOperation(
            f"{what} is not available on the exact backend; use the machine or "
            f"high precision backend"
        )

    @property
    def pi(self) -> Any:
        raise self._unsupported("pi")

    def sqrt(self, x: Any) -> Any:
        raise self._unsupported("sqrt")

    def exp(self, x: Any) -> Any:
        raise self._unsupported("exp")

    def log(self, x: Any) -> Any:
        raise self._unsupported("log")

    def sin(self, x: Any) -> Any:
        raise self._unsupported("sin")

    def cos(self, x: Any) -> Any:
        raise self._unsupported("cos")

    def tan(self, x: Any) -> Any:
        raise self._unsupported("tan")

    def atan(self, x: Any) -> Any:
        raise self._unsupported("atan")


MACHINE = MachineField()
EXACT = ExactField()


@functools.lru_cache(maxsize=None)
def mp_field(bits: int) -> MPField:
    """Shared MPField for ``bits`` mantissa bits."""
    return MPField(bits)


def field_for_precision(bits: Optional[int]) -> Field:
    """``None`` or 53 bits selects the machine field, more bits an mpmath field."""
    if bits is None or bits == MACHINE_PRECISION_BITS:
        return MACHINE
    return mp_field(bits)


def _field_of_scalar(value: Any) -> Optional[Field]:
    if isinstance(value, Fraction):
        return EXACT
    context = getattr(value, "context", None)
    prec = getattr(context, "prec", None)
    if prec is not None:
        return mp_field(int(prec))
    return None


def infer_field(*values: Any) -> Field:
    """Guess the backend from scalars or arrays; defaults to the machine field."""
    for value in _iter_scalars(values):
        field = _field_of_scalar(value)
        if field is not None:
            return field
    return MACHINE


def _iter_scalars(values: Iterable[Any]) -> Iterable[Any]:
    for value in values:
        if isinstance(value, np.ndarray):
            if value.dtype != object or value.size == 0:
                continue
            yield value.flat[0]
        elif isinstance(value, (list, tuple)):
            yield from _iter_scalars(value)
        else:
            yield value
