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

"""Eigenphase statistics of Haar gates deformed along the Cayley path.

A Haar unitary ``H = f(h)`` has eigenphases ``r`` distributed with the Weyl
density. Along the path, ``f(theta h)`` has eigenphases
``nu = 2 arctan(theta tan(r / 2))`` and the same eigenvectors, so the
deformed distribution differs from Haar only through its phase density.
Everything here runs at machine precision on numpy arrays; phase vectors are
read along the last axis.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike

from cayley_rcs.config import TVD_GRID, TVD_MIN_SAMPLES
from cayley_rcs.errors import UnsupportedDimension
from cayley_rcs.linalg import haar_unitary_batch

LOGGER = logging.getLogger(__name__)

SUPPORTED_DIMS = (2, 4)

TvdMethod = Literal["auto", "quadrature", "monte-carlo"]


@dataclass(frozen=True)
class PhaseVector:
    """Eigenphases ``r_alpha`` in ``[-pi, pi)``."""

    phases: Tuple[float, ...]

    def __post_init__(self) -> None:
        phases = tuple(float(r) for r in self.phases)
        for r in phases:
            if not -math.pi <= r < math.pi:
                raise ValueError(f"phase {r} is outside [-pi, pi)")
        object.__setattr__(self, "phases", phases)

    def __array__(self, dtype=None, copy=None) -> np.ndarray:
        return np.asarray(self.phases, dtype=dtype or np.float64)

    def __len__(self) -> int:
        return len(self.phases)


@dataclass(frozen=True)
class TvdEstimate:
    value: float
    std_error: float
    samples: int
    method: str = "quadrature"

    def __post_init__(self) -> None:
        if self.std_error < 0:
            raise ValueError(f"standard error must be non-negative, got {self.std_error}")


def phase_map(r: ArrayLike, theta: float) -> np.ndarray:
    """``nu = 2 arctan(theta tan(r / 2))``."""
    return 2 * np.arctan(theta * np.tan(np.asarray(r, dtype=np.float64) / 2))


def inverse_phase_map(nu: ArrayLike, theta: float) -> np.ndarray:
    return phase_map(nu, 1 / theta)


def jacobian_factor(r: ArrayLike, theta: float) -> np.ndarray:
    """``|dr / dnu| = (1 + theta^2 + cos(r)(1 - theta^2)) / (2 theta)``."""
    if theta <= 0:
        raise ValueError(f"the Jacobian is defined for theta > 0, got {theta}")
    r = np.asarray(r, dtype=np.float64)
    return (1 + theta**2 + np.cos(r) * (1 - theta**2)) / (2 * theta)


def weyl_density(phases: Union[PhaseVector, ArrayLike]) -> np.ndarray:
    """``(N!)^-1 (2 pi)^-N prod_{a<b} |e^{i r_a} - e^{i r_b}|^2`` along the last axis."""
    r = np.asarray(phases, dtype=np.float64)
    N = r.shape[-1]
    z = np.exp(1j * r)
    value = np.ones(r.shape[:-1])
    for a in range(N):
        for b in range(a + 1, N):
            value = value * np.abs(z[..., a] - z[..., b]) ** 2
    return value / (math.factorial(N) * (2 * math.pi) ** N)


def deformed_density(nus: Union[PhaseVector, ArrayLike], theta: float) -> np.ndarray:
    """Density of the eigenphases of ``f(theta h)`` for Haar ``f(h)``.

    The Weyl density at ``r(nu)`` times the product of Jacobian factors.
    """
    if theta <= 0:
        raise ValueError(f"the deformed density is defined for theta > 0, got {theta}")
    r = inverse_phase_map(np.asarray(nus, dtype=np.float64), theta)
    return weyl_density(r) * np.prod(jacobian_factor(r, theta), axis=-1)


def sample_haar_phases(N: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Eigenphases of ``count`` Haar unitaries, shape ``(count, N)``, each row sorted."""
    unitaries = haar_unitary_batch(N, count, rng)
    return np.sort(np.angle(np.linalg.eigvals(unitaries)), axis=-1)


def _grid_tvd(theta: float, grid: int) -> float:
    h = 2 * math.pi / grid
    axis = -math.pi + h * (np.arange(grid) + 0.5)
    a, b = np.meshgrid(axis, axis, indexing="ij")
    nus = np.stack([a, b], axis=-1)
    difference = np.abs(weyl_density(nus) - deformed_density(nus, theta))
    return 0.5 * float(difference.sum()) * h * h


def _monte_carlo_tvd(N: int, theta: float, samples: int, rng: np.random.Generator) -> Tuple[float, float]:
    # 1/2 E_mu |1 - rho / mu| with mu the Weyl density, sampled through Haar draws.
    phases = sample_haar_phases(N, samples, rng)
    mu = weyl_density(phases)
    rho = deformed_density(phases, theta)
    keep = mu > 0
    terms = 0.5 * np.abs(1 - rho[keep] / mu[keep])
    value = float(terms.mean())
    std_error = float(terms.std(ddof=1) / math.sqrt(len(terms))) if len(terms) > 1 else 0.0
    return value, std_error


def estimate_tvd(
    N: int,
    theta: float,
    samples: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    *,
    method: TvdMethod = "auto",
    grid: int = TVD_GRID,
) -> TvdEstimate:
    """Total variation distance between Haar and ``f(theta h)`` eigenphases.

    Parameters
    ----------
    N : int
        Gate dimension, 2 or 4.
    theta : float
        Path parameter, ``theta > 0``.
    samples : int, optional
        Monte-Carlo sample count; at least 1000, ``grid**2`` when omitted.
        Quadrature has no sample count and rejects it; its resolution is
        ``grid``.
    rng : numpy.random.Generator, optional
        Required for Monte-Carlo estimates.
    method : {"auto", "quadrature", "monte-carlo"}
        ``auto`` uses midpoint quadrature on a ``grid x grid`` torus for N=2 and
        Monte Carlo for N=4.
    grid : int
        Quadrature resolution per axis.

    Returns
    -------
    TvdEstimate
        For quadrature, ``std_error`` is the difference between the full grid
        and a half-resolution grid and ``samples`` is ``grid**2``.
    """
    if N not in SUPPORTED_DIMS:
        raise UnsupportedDimension(f"TVD estimation supports N in {SUPPORTED_DIMS}, got N={N}")
    if samples is not None and samples < TVD_MIN_SAMPLES:
        raise ValueError(f"need at least {TVD_MIN_SAMPLES} samples, got {samples}")
    if theta <= 0:
        raise ValueError(f"theta must be positive, got {theta}")

    if method == "auto":
        method = "quadrature" if N == 2 else "monte-carlo"
    if method == "quadrature":
        if N != 2:
            raise UnsupportedDimension(f"grid quadrature is implemented for N=2 only, got N={N}")
        if samples is not None:
            raise ValueError(
                f"quadrature takes no sample count (got samples={samples}); "
                "set grid, or use method='monte-carlo'"
            )
        value = _grid_tvd(theta, grid)
        coarse = _grid_tvd(theta, max(grid // 2, 2))
        estimate = TvdEstimate(value, abs(value - coarse), grid * grid, "quadrature")
    elif method == "monte-carlo":
        if rng is None:
            raise ValueError("Monte-Carlo TVD estimation needs a seeded generator")
        if samples is None:
            samples = grid * grid
        value, std_error = _monte_carlo_tvd(N, theta, samples, rng)
        estimate = TvdEstimate(value, std_error, samples, "monte-carlo")
    else:
        raise ValueError(f"unknown method {method!r}")

    LOGGER.info(
        "TVD N=%d theta=%.6g: %.6g +- %.2g (%s)",
        N, theta, estimate.value, estimate.std_error, estimate.method,
    )
    return estimate


def circuit_tvd_proxy(
    m: int,
    N: int,
    delta: float,
    *,
    samples: Optional[int] = None,
    seed: int = 0,
) -> float:
    """``m`` times the per-gate TVD at ``theta = 1 - delta``.

    An additive bound bookkeeping for the circuit distribution; no universal
    constant is claimed.
    """
    if m < 1:
        raise ValueError(f"need at least one gate, got m={m}")
    if delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    if delta == 0:
        return 0.0
    per_gate = estimate_tvd(N, 1 - delta, samples, np.random.default_rng(seed))
    return m * per_gate.value


@dataclass(frozen=True)
class TvdRow:
    delta: float
    theta: float
    tvd: float
    std_error: float
    samples: int


def tvd_sweep(
    N: int,
    deltas: Iterable[float],
    *,
    samples: Optional[int] = None,
    seed: int = 0,
    sides: Sequence[int] = (-1,),
) -> List[TvdRow]:
    """Estimate the TVD at ``theta = 1 + side * delta`` for each delta and side.

    ``samples`` is passed to :func:`estimate_tvd` and only applies to Monte
    Carlo, so leave it unset for N=2.
    """
    rows = []
    for delta in deltas:
        for side in sides:
            theta = 1 + side * delta
            estimate = estimate_tvd(N, theta, samples, np.random.default_rng(seed))
            rows.append(TvdRow(delta, theta, estimate.value, estimate.std_error, estimate.samples))
    return rows
