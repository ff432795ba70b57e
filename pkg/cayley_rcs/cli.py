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

"""Command-line entry point.

Exit codes: 0 success, 1 usage or input error, 2 decoding failed,
3 precision insufficient, 4 any other error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from cayley_rcs import __version__
from cayley_rcs.cayley import gate_at
from cayley_rcs.circuit import Architecture
from cayley_rcs.circuit_io import (
    CircuitFile,
    GateSpec,
    RunManifest,
    write_csv_series,
    write_json_report,
)
from cayley_rcs.config import DEFAULT_PRECISION_BITS, MACHINE_PRECISION_BITS, default_precision_bits
from cayley_rcs.errors import (
    CayleyRcsError,
    CircuitFileError,
    ConfigError,
    DecodeFailed,
    PrecisionInsufficient,
)
from cayley_rcs.field import MACHINE, field_for_precision
from cayley_rcs.haar_stats import tvd_sweep
from cayley_rcs.linalg import haar_unitary, max_abs, unitarity_residual
from cayley_rcs.reduction import (
    OracleModel,
    ReductionConfig,
    empirical_amplification,
    paturi_bound,
    robustness_bound,
    robustness_threshold,
    run_reduction,
    run_repeated_reduction,
)
from cayley_rcs.taylor import max_generator_norm, truncation_experiment

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DECODE_FAILED = 2
EXIT_PRECISION = 3
EXIT_ERROR = 4

# Endpoint equality is checked entrywise to this tolerance.
ENDPOINT_TOL = 1e-12


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1, keeping 2 for decode failures."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _manifest(command: str, args: argparse.Namespace, started: float, *, precision_bits: int, **extra: Any) -> RunManifest:
    config = {k: v for k, v in vars(args).items() if k not in ("func", "verbose")}
    seeds = {k: v for k, v in config.items() if "seed" in k}
    return RunManifest(
        command=command,
        config=config,
        seeds=seeds,
        backend=field_for_precision(precision_bits).name,
        precision_bits=precision_bits,
        version=__version__,
        wall_time=time.perf_counter() - started,
        extra=extra,
    )


def _emit(args: argparse.Namespace, payload: Dict[str, Any], manifest: RunManifest) -> None:
    text = write_json_report(args.out, payload, manifest)
    if args.out is None:
        sys.stdout.write(text)


# -- commands -----------------------------------------------------------------------


def cmd_haar_sample(args: argparse.Namespace) -> int:
    """Write ``count`` Haar unitaries as circuit-file gates on qubits ``0..log2(N)-1``."""
    started = time.perf_counter()
    rng = np.random.default_rng(args.seed)
    arity = 1 if args.N == 2 else 2
    gates = tuple(
        GateSpec(tuple(range(arity)), unitary=haar_unitary(args.N, rng)) for _ in range(args.count)
    )
    text = CircuitFile(arity, gates).dumps()
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    LOGGER.info("Sampled %d Haar unitaries in %.2fs", args.count, time.perf_counter() - started)
    return EXIT_OK


def cmd_random_circuit(args: argparse.Namespace) -> int:
    """Seeded circuit file: ``haar_seed`` per gate, companions from ``companion_seed``."""
    architecture = Architecture.parse(args.n, args.placements)
    seeds = np.random.SeedSequence(args.seed).generate_state(architecture.m)
    gates = tuple(
        GateSpec(qubits, haar_seed=int(s)) for qubits, s in zip(architecture.placements, seeds)
    )
    text = CircuitFile(args.n, gates, companion_seed=args.seed).dumps()
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_path_check(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    circuit = CircuitFile.load(args.circuit_file).to_circuit(field=MACHINE)
    rows = []
    for theta in args.thetas:
        matrices = [gate_at(g, theta) for g in circuit.gates]
        row: Dict[str, Any] = {
            "theta": theta,
            "unitarity_residuals": [float(unitarity_residual(M)) for M in matrices],
        }
        if theta == 0:
            row["endpoint_equals_worst_gate"] = all(
                max_abs(M - g.worst_gate) < ENDPOINT_TOL for M, g in zip(matrices, circuit.gates)
            )
        if theta == 1:
            row["endpoint_equals_product"] = all(
                max_abs(M - g.worst_gate @ g.companion) < ENDPOINT_TOL
                for M, g in zip(matrices, circuit.gates)
            )
        rows.append(row)
    manifest = _manifest("path-check", args, started, precision_bits=MACHINE_PRECISION_BITS)
    _emit(args, {"n": circuit.n, "m": circuit.m, "checks": rows}, manifest)
    return EXIT_OK


def _reduction_config(args: argparse.Namespace) -> ReductionConfig:
    return ReductionConfig(
        delta=args.delta,
        L=args.L,
        t=args.t,
        grid_kind=args.grid,
        precision_bits=args.precision_bits,
        degree_mode=args.mode,
        validation_points=args.validation_points,
        repeats=args.repeats,
        seed=args.seed,
        threads=args.threads,
    )


def _oracle_model(args: argparse.Namespace) -> OracleModel:
    if args.model == "exact":
        return OracleModel.exact(args.seed)
    if args.model == "corrupt":
        return OracleModel.corrupt(args.frac, args.seed)
    if args.model == "additive_noise":
        return OracleModel.additive_noise(args.eps, args.seed)
    return OracleModel.corrupt_and_noise(args.frac, args.eps, args.seed)


def cmd_reduce(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    config = _reduction_config(args)
    model = _oracle_model(args)
    circuit = CircuitFile.load(args.circuit_file).to_circuit(field=config.field())
    config.check(circuit)

    status = EXIT_OK
    try:
        if config.repeats > 1:
            payload = run_repeated_reduction(circuit, config, model).to_dict()
        else:
            payload = run_reduction(circuit, config, model).to_dict()
    except DecodeFailed as e:
        LOGGER.error("%s", e)
        payload, status = _partial(e), EXIT_DECODE_FAILED
    except PrecisionInsufficient as e:
        LOGGER.error("%s", e)
        payload, status = _partial(e), EXIT_PRECISION

    manifest = _manifest("reduce", args, started, precision_bits=config.precision_bits)
    _emit(args, payload, manifest)
    return status


def _partial(error: CayleyRcsError) -> Dict[str, Any]:
    report = getattr(error, "report", None)
    payload = report.to_dict() if report is not None else {}
    payload["error"] = str(error)
    return payload


def cmd_amplify(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    config = ReductionConfig(
        delta=args.delta,
        L=args.L,
        precision_bits=args.precision_bits,
        seed=args.seed,
        threads=args.threads,
    )
    circuit = CircuitFile.load(args.circuit_file).to_circuit(field=config.field())
    report = empirical_amplification(circuit, config, args.eps, args.trials)
    manifest = _manifest("amplify", args, started, precision_bits=config.precision_bits)
    _emit(args, report.to_dict(), manifest)
    return EXIT_OK


def cmd_tvd(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    sides = (-1, 1) if args.both_sides else (-1,)
    rows = tvd_sweep(args.N, args.deltas, samples=args.samples, seed=args.seed, sides=sides)
    manifest = _manifest("tvd", args, started, precision_bits=MACHINE_PRECISION_BITS)
    write_csv_series(
        args.out,
        ["delta", "theta", "tvd", "std_error", "samples"],
        [[r.delta, r.theta, r.tvd, r.std_error, r.samples] for r in rows],
        manifest,
    )
    return EXIT_OK


def cmd_bounds(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    if args.d is None and args.m is None:
        raise UsageError("bounds needs --d (Paturi bound) and/or --m (robustness bound)")
    payload: Dict[str, Any] = {"delta": args.delta, "eps": args.eps}
    if args.d is not None:
        bound = paturi_bound(args.d, args.delta, args.eps)
        payload["paturi_bound"] = {"d": args.d, "value": bound.value, "log2": bound.log2}
    if args.m is not None:
        bound = robustness_bound(args.m, args.delta, args.eps)
        payload["robustness_bound"] = {"m": args.m, "value": bound.value, "log2": bound.log2}
        if args.n is not None:
            threshold = robustness_threshold(args.m, args.delta, args.n)
            payload["robustness_threshold"] = {
                "m": args.m,
                "n": args.n,
                "value": threshold.value,
                "log2": threshold.log2,
            }
    manifest = _manifest("bounds", args, started, precision_bits=MACHINE_PRECISION_BITS)
    _emit(args, payload, manifest)
    return EXIT_OK


def cmd_truncate(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    circuit = CircuitFile.load(args.circuit_file).to_circuit(field=MACHINE)
    report = truncation_experiment(circuit, args.thetas, args.K)
    manifest = _manifest(
        "truncate", args, started,
        precision_bits=MACHINE_PRECISION_BITS,
        max_generator_norm=max_generator_norm(circuit),
    )
    if args.out.endswith(".json"):
        write_json_report(args.out, report.to_dict(), manifest)
        return EXIT_OK
    write_csv_series(
        args.out,
        ["theta", "max_gate_residual", "p0_truncated", "p0_geodesic", "deviation",
         "p0_cayley", "cayley_deviation", "truncated_degree", "cayley_degree"],
        [
            [row.theta, max(row.gate_residuals, default=0.0), row.p0_truncated, row.p0_geodesic,
             row.deviation, row.p0_cayley, row.cayley_deviation, report.truncated_degree,
             report.cayley_degree]
            for row in report.rows
        ],
        manifest,
    )
    return EXIT_OK


# -- parser -------------------------------------------------------------------------


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="cayley-rcs",
        description="Cayley-path interpolation, rational decoding and reduction experiments.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    p = sub.add_parser("haar-sample", help="sample Haar unitaries")
    p.add_argument("--N", type=int, required=True, choices=(2, 4))
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_haar_sample)

    p = sub.add_parser("random-circuit", help="write a seeded circuit file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--placements", required=True, help="e.g. '0-1,1-2,0'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_random_circuit)

    p = sub.add_parser("path-check", help="unitarity and endpoint checks along the path")
    p.add_argument("circuit_file")
    p.add_argument("--thetas", type=_floats, default=[0.0, 0.5, 1.0])
    p.add_argument("--out")
    p.set_defaults(func=cmd_path_check)

    p = sub.add_parser("reduce", help="run a worst-to-average reduction")
    p.add_argument("circuit_file")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--t", type=int, default=0)
    p.add_argument("--grid", choices=("uniform-spaced", "uniform-random"), default="uniform-spaced")
    p.add_argument(
        "--model", choices=("exact", "corrupt", "additive_noise", "corrupt_and_noise"), default="exact"
    )
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--frac", type=float, default=0.0)
    p.add_argument("--precision-bits", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("polynomial", "rational"), default="polynomial")
    p.add_argument("--validation-points", type=int, default=4)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("amplify", help="measure error amplification under additive noise")
    p.add_argument("circuit_file")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--precision-bits", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_amplify)

    p = sub.add_parser("tvd", help="per-gate TVD to Haar as a CSV series")
    p.add_argument("--N", type=int, default=2)
    p.add_argument("--deltas", type=_floats, required=True)
    p.add_argument("--samples", type=int, help="Monte-Carlo sample count (N=4 only)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--both-sides", action="store_true", help="also estimate theta = 1 + delta")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tvd)

    p = sub.add_parser("bounds", help="Paturi and robustness bounds")
    p.add_argument("--d", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("truncate", help="truncated-Taylor comparison")
    p.add_argument("circuit_file")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--thetas", type=_floats, default=[0.0, 0.5, 1.0])
    p.add_argument("--out", required=True, help="CSV, or JSON when the name ends in .json")
    p.set_defaults(func=cmd_truncate)

    return parser


def _configure_logging(verbose: int) -> None:
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)

    if getattr(args, "precision_bits", DEFAULT_PRECISION_BITS) is None:
        try:
            args.precision_bits = default_precision_bits()
        except ValueError as e:
            parser.error(str(e))

    handler: Callable[[argparse.Namespace], int] = args.func
    try:
        return handler(args)
    except (UsageError, ConfigError, CircuitFileError) as e:
        print(f"cayley-rcs {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DecodeFailed as e:
        print(f"cayley-rcs {args.command}: decoding failed: {e}", file=sys.stderr)
        return EXIT_DECODE_FAILED
    except PrecisionInsufficient as e:
        print(f"cayley-rcs {args.command}: precision insufficient: {e}", file=sys.stderr)
        return EXIT_PRECISION
    except (CayleyRcsError, OSError) as e:
        print(f"cayley-rcs {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR
    except ValueError as e:
        print(f"cayley-rcs {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
