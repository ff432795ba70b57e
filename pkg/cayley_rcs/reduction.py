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

"""Worst-to-average reduction experiments.

An oracle answers ``p0(theta)`` near ``theta = 1`` (the average case), possibly
with planted corruptions and additive noise. :func:`run_reduction` samples it
on a grid in ``[1 - delta, 1 + delta]``, rescales the nodes to ``u in [-1, 1]``,
decodes a low-degree function and extrapolates to the worst case ``theta = 0``,
i.e. ``u = -1 / delta``.
"""

from __future__ import annotations

import dataclasses
import logging
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np

from cayley_rcs.circuit import Circuit, p0, q_product
from cayley_rcs.config import FLOAT_ACCEPT_RTOL, default_precision_bits
from cayley_rcs.errors import (
    ConfigError,
    DecodeFailed,
    DegenerateSystem,
    PoleProximity,
    PrecisionInsufficient,
    TooManyErrors,
)
from cayley_rcs.field import Field, field_for_precision
from cayley_rcs.interp import (
    DecodeResult,
    RationalFunction,
    SamplePoint,
    bw_decode_detailed,
    evaluate,
    fit_rational,
)

LOGGER = logging.getLogger(__name__)

OracleKind = Literal["exact", "corrupt", "additive_noise", "corrupt_and_noise"]
GridKind = Literal["uniform-spaced", "uniform-random"]
DegreeMode = Literal["polynomial", "rational"]

ORACLE_KINDS = ("exact", "corrupt", "additive_noise", "corrupt_and_noise")
GRID_KINDS = ("uniform-spaced", "uniform-random")
DEGREE_MODES = ("polynomial", "rational")

# stream ids under an oracle seed
_CORRUPTION_STREAM = 0
_NOISE_STREAM = 1
_CALL_STREAM = 2
_VALIDATION_STREAM = 3
_GRID_STREAM = 4

O1_NOTE = "robustness bound takes the unquantified (1 + o(1)) factor as 1"


# -- oracles ----------------------------------------------------------------------


@dataclass(frozen=True)
class OracleModel:
    """How the oracle departs from the true ``p0``.

    ``corrupt`` replaces ``floor(fraction * L)`` grid answers with uniform
    values in ``[0, 1]``; ``additive_noise`` adds ``uniform(-eps, eps)`` to
    every answer.
    """

    kind: OracleKind = "exact"
    fraction: float = 0.0
    eps: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ORACLE_KINDS:
            raise ConfigError(f"unknown oracle kind {self.kind!r}; choose one of {ORACLE_KINDS}")
        if not 0 <= self.fraction < 1:
            raise ConfigError(f"corruption fraction must lie in [0, 1), got {self.fraction}")
        if self.eps < 0:
            raise ConfigError(f"noise amplitude must be non-negative, got {self.eps}")

    @classmethod
    def exact(cls, seed: int = 0) -> "OracleModel":
        return cls("exact", seed=seed)

    @classmethod
    def corrupt(cls, fraction: float, seed: int = 0) -> "OracleModel":
        return cls("corrupt", fraction=fraction, seed=seed)

    @classmethod
    def additive_noise(cls, eps: float, seed: int = 0) -> "OracleModel":
        return cls("additive_noise", eps=eps, seed=seed)

    @classmethod
    def corrupt_and_noise(cls, fraction: float, eps: float, seed: int = 0) -> "OracleModel":
        return cls("corrupt_and_noise", fraction=fraction, eps=eps, seed=seed)

    @property
    def corrupts(self) -> bool:
        return self.kind in ("corrupt", "corrupt_and_noise")

    @property
    def noisy(self) -> bool:
        return self.kind in ("additive_noise", "corrupt_and_noise")

    def corruption_count(self, L: int) -> int:
        return int(math.floor(self.fraction * L + 1e-9)) if self.corrupts else 0


@dataclass(frozen=True)
class OracleSamples:
    values: Tuple[Any, ...]
    corrupted_indices: Tuple[int, ...]


class Oracle:
    """Answers ``p0(theta)`` for a fixed circuit under an :class:`OracleModel`.

    Grid queries are deterministic given the model seed. Single calls draw
    from their own stream, so they depend on the call order as well.
    """

    def __init__(self, circuit: Circuit, model: OracleModel):
        self.circuit = circuit
        self.model = model
        self.field: Field = circuit.field
        self._call_rng = np.random.default_rng([model.seed, _CALL_STREAM])

    def exact(self, theta: Any) -> Any:
        return p0(self.circuit, theta)

    def _noise(self, u: float) -> Any:
        return self.field.real(u) * self.field.real(self.model.eps)

    def __call__(self, theta: Any) -> Any:
        value = self.exact(theta)
        if self.model.corrupts and self._call_rng.random() < self.model.fraction:
            value = self.field.real(self._call_rng.random())
        if self.model.noisy:
            value = value + self._noise(self._call_rng.uniform(-1, 1))
        return value

    def _exact_values(self, thetas: Sequence[Any], threads: int) -> List[Any]:
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                return list(pool.map(self.exact, thetas))
        return [self.exact(theta) for theta in thetas]

    def query(self, thetas: Sequence[Any], *, threads: int = 1) -> OracleSamples:
        """Answer a whole grid, planting corruptions at seeded indices."""
        L = len(thetas)
        values = self._exact_values(thetas, threads)

        corrupted: Tuple[int, ...] = ()
        count = self.model.corruption_count(L)
        if count:
            rng = np.random.default_rng([self.model.seed, _CORRUPTION_STREAM])
            corrupted = tuple(sorted(int(i) for i in rng.choice(L, size=count, replace=False)))
            for i in corrupted:
                values[i] = self.field.real(rng.random())
                LOGGER.debug("Corrupted oracle answer at grid index %d", i)

        if self.model.noisy:
            rng = np.random.default_rng([self.model.seed, _NOISE_STREAM])
            for i, u in enumerate(rng.uniform(-1, 1, size=L)):
                values[i] = values[i] + self._noise(u)
        return OracleSamples(tuple(values), corrupted)

    def validate(self, thetas: Sequence[Any], *, threads: int = 1) -> Tuple[Any, ...]:
        """Held-out answers: noise applies, planted corruption does not."""
        values = self._exact_values(thetas, threads)
        if self.model.noisy:
            rng = np.random.default_rng([self.model.seed, _VALIDATION_STREAM])
            for i, u in enumerate(rng.uniform(-1, 1, size=len(values))):
                values[i] = values[i] + self._noise(u)
        return tuple(values)


def make_oracle(circuit: Circuit, model: OracleModel) -> Oracle:
    return Oracle(circuit, model)


# -- configuration ----------------------------------------------------------------


@dataclass(frozen=True)
class ReductionConfig:
    """Parameters of one reduction experiment.

    Parameters
    ----------
    delta : float
        Half-width of the sampling interval ``[1 - delta, 1 + delta]``, in ``(0, 1)``.
    L : int
        Grid size.
    t : int
        Error budget of the Berlekamp-Welch decoder.
    grid_kind : {"uniform-spaced", "uniform-random"}
    precision_bits : int
        53 for machine precision, more for mpmath. Defaults to
        ``CAYLEY_RCS_PRECISION_BITS`` or 512.
    degree_mode : {"polynomial", "rational"}
        ``polynomial`` fits ``|Q|^2 p0`` of degree ``2D``; ``rational`` fits
        ``p0`` as a ``(2D, 2D)`` rational function.
    validation_points : int
        Held-out nodes checked after decoding.
    rtol : float
        Acceptance residual relative to the data scale.
    repeats : int
        Independent companion draws for :func:`run_repeated_reduction`.
    seed : int
        Seed for random grids and companion redraws.
    threads : int
        Worker threads for oracle calls.
    """

    delta: float
    L: int
    t: int = 0
    grid_kind: GridKind = "uniform-spaced"
    precision_bits: int = dataclass_field(default_factory=default_precision_bits)
    degree_mode: DegreeMode = "polynomial"
    validation_points: int = 4
    rtol: float = FLOAT_ACCEPT_RTOL
    repeats: int = 1
    seed: int = 0
    threads: int = 1

    def __post_init__(self) -> None:
        if not 0 < self.delta < 1:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if self.L < 2:
            raise ConfigError(f"the grid needs at least 2 nodes, got L={self.L}")
        if self.t < 0:
            raise ConfigError(f"error budget must be non-negative, got t={self.t}")
        if self.grid_kind not in GRID_KINDS:
            raise ConfigError(f"unknown grid kind {self.grid_kind!r}; choose one of {GRID_KINDS}")
        if self.degree_mode not in DEGREE_MODES:
            raise ConfigError(f"unknown degree mode {self.degree_mode!r}; choose one of {DEGREE_MODES}")
        if self.precision_bits < 53:
            raise ConfigError(f"precision must be at least 53 bits, got {self.precision_bits}")
        if self.validation_points < 0 or self.repeats < 1 or self.threads < 1:
            raise ConfigError("validation_points must be >= 0, repeats and threads >= 1")

    def degrees(self, circuit: Circuit) -> Tuple[int, int]:
        d = 2 * circuit.degree
        return (d, 0) if self.degree_mode == "polynomial" else (d, d)

    def check(self, circuit: Circuit) -> Tuple[int, int]:
        """Degree bounds for ``circuit``; raises :class:`ConfigError` if the grid is too small."""
        k1, k2 = self.degrees(circuit)
        total = k1 + k2 + 2 * self.t
        if self.L <= total:
            if self.degree_mode == "rational" and all(g.dim == 4 for g in circuit.gates):
                degrees = f"(k1, k2) = (8m, 8m) = ({k1}, {k2})"
            else:
                degrees = f"(k1, k2) = ({k1}, {k2})"
            raise ConfigError(
                f"grid too small: need L > k1 + k2 + 2t = {total} for {degrees} and "
                f"t={self.t}, got L={self.L}"
            )
        return k1, k2

    def field(self) -> Field:
        return field_for_precision(self.precision_bits)


# -- bounds -------------------------------------------------------------------------


@dataclass(frozen=True)
class Bound:
    """A bound and its base-2 logarithm; ``value`` is ``inf`` past double range."""

    value: float
    log2: float


def _bound_from_log(log_e: float) -> Bound:
    log2 = log_e / math.log(2)
    if log_e > 709:
        return Bound(math.inf, log2)
    return Bound(math.exp(log_e), log2)


def paturi_bound(d: int, delta: float, eps: float) -> Bound:
    """``eps * exp(2d(1 + 1/delta))``: growth at ``u = -1/delta`` of a degree-``d``
    polynomial bounded by ``eps`` on the sampling interval."""
    if d < 0 or delta <= 0 or eps < 0:
        raise ValueError(f"need d >= 0, delta > 0, eps >= 0; got d={d}, delta={delta}, eps={eps}")
    if eps == 0:
        return Bound(0.0, -math.inf)
    return _bound_from_log(math.log(eps) + 2 * d * (1 + 1 / delta))


def robustness_bound(m: int, delta: float, eps: float) -> Bound:
    """``eps * exp(32 m (1 + 1/delta))``, with the ``(1 + o(1))`` factor set to 1."""
    if m < 1 or delta <= 0 or eps < 0:
        raise ValueError(f"need m >= 1, delta > 0, eps >= 0; got m={m}, delta={delta}, eps={eps}")
    if eps == 0:
        return Bound(0.0, -math.inf)
    return _bound_from_log(math.log(eps) + 32 * m * (1 + 1 / delta))


def robustness_threshold(m: int, delta: float, n: int) -> Bound:
    """``2^-n exp(-32 m (1 + 1/delta))``: the oracle error keeping the amplified error below ``2^-n``."""
    if m < 1 or delta <= 0 or n < 0:
        raise ValueError(f"need m >= 1, delta > 0, n >= 0; got m={m}, delta={delta}, n={n}")
    log_e = -n * math.log(2) - 32 * m * (1 + 1 / delta)
    return Bound(math.exp(log_e), log_e / math.log(2))


# -- reports ------------------------------------------------------------------------


@dataclass
class ReductionReport:
    true_p0_at_0: float
    estimated_p0_at_0: Optional[float] = None
    abs_error: Optional[float] = None
    decode_status: str = "pending"
    corrupted_indices: Tuple[int, ...] = ()
    disagreeing_indices: Tuple[int, ...] = ()
    condition_diagnostics: Dict[str, Any] = dataclass_field(default_factory=dict)
    paturi_bound_at_minus_1: float = 0.0
    log2_paturi_bound: float = -math.inf
    config: Dict[str, Any] = dataclass_field(default_factory=dict)
    model: Dict[str, Any] = dataclass_field(default_factory=dict)
    high_precision: Dict[str, str] = dataclass_field(default_factory=dict)
    notes: Tuple[str, ...] = (O1_NOTE,)

    def to_dict(self) -> Dict[str, Any]:
        data = dataclasses.asdict(self)
        data["corrupted_indices"] = list(self.corrupted_indices)
        data["disagreeing_indices"] = list(self.disagreeing_indices)
        data["notes"] = list(self.notes)
        return data


@dataclass
class RepeatedReductionReport:
    median_estimate: float
    true_p0_at_0: float
    abs_error: float
    reports: List[ReductionReport]
    failures: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "median_estimate": self.median_estimate,
            "true_p0_at_0": self.true_p0_at_0,
            "abs_error": self.abs_error,
            "failures": self.failures,
            "reports": [r.to_dict() for r in self.reports],
        }


@dataclass
class AmplificationReport:
    eps: float
    trials: int
    errors: List[float]
    max_error: float
    median_error: float
    paturi_bound: float
    log2_paturi_bound: float
    ratio: Optional[float]

    @property
    def bound_holds(self) -> bool:
        return self.max_error <= self.paturi_bound

    def to_dict(self) -> Dict[str, Any]:
        data = dataclasses.asdict(self)
        data["bound_holds"] = self.bound_holds
        return data


# -- the reduction --------------------------------------------------------------------


def _grid(config: ReductionConfig, field: Field) -> Tuple[List[Any], List[Any]]:
    """Rescaled grid and validation nodes ``u`` in ``[-1, 1]``."""
    L = config.L
    V = config.validation_points
    if config.grid_kind == "uniform-spaced":
        nodes = [field.real(Fraction(2 * i, L - 1) - 1) for i in range(L)]
        intervals = np.linspace(0, L - 2, V).round().astype(int) if V else []
        held_out = [(nodes[i] + nodes[i + 1]) / 2 for i in sorted(set(int(i) for i in intervals))]
    else:
        rng = np.random.default_rng([config.seed, _GRID_STREAM])
        nodes = [field.real(u) for u in np.sort(rng.uniform(-1, 1, size=L))]
        held_out = [field.real(u) for u in rng.uniform(-1, 1, size=V)]
    return nodes, held_out


def _to_theta(u: Any, delta: Any) -> Any:
    return 1 + delta * u


def _high_precision(value: Any) -> str:
    return str(value.real) if hasattr(value, "real") else str(value)


def run_reduction(circuit: Circuit, config: ReductionConfig, model: OracleModel) -> ReductionReport:
    """Sample the oracle near ``theta = 1``, decode, and extrapolate to ``theta = 0``.

    Raises
    ------
    ConfigError
        If ``L <= k1 + k2 + 2t``.
    DecodeFailed
        If Berlekamp-Welch decoding fails; ``.report`` holds the partial report.
    PrecisionInsufficient
        If the decoded function misses held-out nodes; ``.report`` holds the
        partial report.
    """
    field = config.field()
    circuit = circuit.to_field(field)
    k1, k2 = config.check(circuit)
    delta = field.real(config.delta)

    true_value = p0(circuit, 0)
    bound = paturi_bound(k1, config.delta, model.eps)
    report = ReductionReport(
        true_p0_at_0=field.to_float(true_value),
        paturi_bound_at_minus_1=bound.value,
        log2_paturi_bound=bound.log2,
        config=dataclasses.asdict(config),
        model=dataclasses.asdict(model),
        high_precision={"true_p0_at_0": _high_precision(true_value)},
    )
    LOGGER.info(
        "Reduction: n=%d m=%d degree (%d, %d), L=%d t=%d delta=%g, %s oracle, %s backend",
        circuit.n, circuit.m, k1, k2, config.L, config.t, config.delta, model.kind, field.name,
    )

    nodes, held_out = _grid(config, field)
    oracle = make_oracle(circuit, model)
    samples = oracle.query([_to_theta(u, delta) for u in nodes], threads=config.threads)
    report.corrupted_indices = samples.corrupted_indices

    def weight(u: Any) -> Any:
        if config.degree_mode == "polynomial":
            return field.abs2(q_product(circuit, _to_theta(u, delta)))
        return field.real(1)

    weights = [weight(u) for u in nodes]
    points = [SamplePoint(u, v * w) for u, v, w in zip(nodes, samples.values, weights)]

    scale = max(abs(p.value) for p in points)
    noise_floor = 2 * field.real(model.eps) * max(weights)
    # noisy answers cannot be fit tighter than the noise they carry
    fit_rtol = field.real(config.rtol) + (noise_floor / scale if scale else 0)

    try:
        decoded = _decode(points, k1, k2, config.t, fit_rtol)
    except TooManyErrors as e:
        report.decode_status = "decode_failed"
        raise DecodeFailed(f"decoding failed: {e}", report) from e
    except DegenerateSystem as e:
        report.decode_status = "precision_insufficient"
        raise PrecisionInsufficient(f"interpolation failed: {e}", report) from e

    F = decoded.function
    report.disagreeing_indices = decoded.disagreeing_indices
    report.condition_diagnostics.update(decoded.diagnostics)
    report.condition_diagnostics["agreement_size"] = decoded.agreement_size

    residual = _validation_residual(F, oracle, held_out, delta, weight, config)
    tolerance = config.rtol * scale + noise_floor
    report.condition_diagnostics["validation_residual"] = field.to_float(residual)
    if residual > tolerance:
        report.decode_status = "precision_insufficient"
        raise PrecisionInsufficient(
            f"validation residual {field.to_float(residual):.3g} at {len(held_out)} held-out nodes "
            f"exceeds {field.to_float(tolerance):.3g}; raise precision_bits or delta",
            report,
        )

    try:
        # |Q(0)|^2 = 1, so the polynomial extrapolates straight to p0(0)
        estimate = evaluate(F, -1 / delta).real
    except PoleProximity as e:
        report.decode_status = "precision_insufficient"
        raise PrecisionInsufficient(f"extrapolation hit a pole: {e}", report) from e

    error = abs(estimate - true_value)
    report.estimated_p0_at_0 = field.to_float(estimate)
    report.abs_error = field.to_float(error)
    report.high_precision["estimated_p0_at_0"] = _high_precision(estimate)
    report.high_precision["abs_error"] = _high_precision(error)
    report.decode_status = "decoded"
    LOGGER.info(
        "Reduction decoded: estimate %.17g, truth %.17g, abs error %.3g",
        report.estimated_p0_at_0, report.true_p0_at_0, report.abs_error,
    )
    return report


def _decode(points: List[SamplePoint], k1: int, k2: int, t: int, rtol: Any) -> DecodeResult:
    if t == 0:
        F = fit_rational(points, k1, k2, rtol=rtol)
        return DecodeResult(F, (), len(points))
    return bw_decode_detailed(points, k1, k2, t, rtol=rtol)


def _validation_residual(
    F: RationalFunction,
    oracle: Oracle,
    held_out: Sequence[Any],
    delta: Any,
    weight,
    config: ReductionConfig,
) -> Any:
    residual = oracle.field.real(0)
    if not held_out:
        return residual
    values = oracle.validate([_to_theta(u, delta) for u in held_out], threads=config.threads)
    for u, value in zip(held_out, values):
        try:
            predicted = evaluate(F, u)
        except PoleProximity:
            return oracle.field.real(math.inf)
        residual = max(residual, abs(predicted - value * weight(u)))
    return residual


def run_repeated_reduction(
    circuit: Circuit, config: ReductionConfig, model: OracleModel
) -> RepeatedReductionReport:
    """Repeat over independent Haar companions and take the median estimate.

    Run ``k`` uses the given companions for ``k = 0`` and fresh ones drawn
    from ``SeedSequence([seed, k])`` afterwards; the oracle seed is shifted
    by ``k``.
    """
    reports = []
    failures = 0
    for k in range(config.repeats):
        instance = circuit if k == 0 else circuit.with_companions(np.random.default_rng([config.seed, k]))
        run_model = dataclasses.replace(model, seed=model.seed + k)
        try:
            reports.append(run_reduction(instance, config, run_model))
        except (DecodeFailed, PrecisionInsufficient) as e:
            LOGGER.warning("Repetition %d failed: %s", k, e)
            failures += 1

    if not reports:
        raise DecodeFailed(f"all {config.repeats} repetitions failed")
    median = statistics.median(r.estimated_p0_at_0 for r in reports)
    truth = reports[0].true_p0_at_0
    return RepeatedReductionReport(median, truth, abs(median - truth), reports, failures)


def empirical_amplification(
    circuit: Circuit, config: ReductionConfig, eps: float, trials: int
) -> AmplificationReport:
    """Run the reduction with ``additive_noise(eps)`` for ``trials`` seeds.

    The observed extrapolation errors are compared with
    ``paturi_bound(2D, delta, eps)``.
    """
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    if config.degree_mode != "polynomial":
        raise ConfigError("error amplification is measured in polynomial degree mode")

    errors = []
    for k in range(trials):
        report = run_reduction(circuit, config, OracleModel.additive_noise(eps, seed=config.seed + k))
        errors.append(report.abs_error)

    bound = paturi_bound(2 * circuit.degree, config.delta, eps)
    max_error = max(errors)
    ratio = max_error / bound.value if bound.value > 0 else None
    LOGGER.info(
        "Amplification eps=%g over %d trials: max error %.3g, bound %.3g",
        eps, trials, max_error, bound.value,
    )
    return AmplificationReport(
        eps=eps,
        trials=trials,
        errors=errors,
        max_error=max_error,
        median_error=statistics.median(errors),
        paturi_bound=bound.value,
        log2_paturi_bound=bound.log2,
        ratio=ratio,
    )
