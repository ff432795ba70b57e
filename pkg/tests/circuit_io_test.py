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

import json
import math
from fractions import Fraction

import numpy as np
import pytest

from cayley_rcs.cayley import gate_at
from cayley_rcs.circuit import amplitude
from cayley_rcs.circuit_io import (
    CircuitFile,
    RunManifest,
    decode_matrix,
    encode_matrix,
    read_samples_csv,
    write_csv_series,
    write_json_report,
    write_samples_csv,
)
from cayley_rcs.errors import CircuitFileError
from cayley_rcs.field import EXACT, MACHINE
from cayley_rcs.interp import SamplePoint
from cayley_rcs.linalg import haar_unitary, max_abs


def _seeded_file():
    return {
        "n": 2,
        "companion_seed": 11,
        "gates": [
            {"qubits": [0, 1], "haar_seed": 5},
            {"qubits": [1], "haar_seed": 6},
        ],
    }


def _manifest():
    return RunManifest(
        command="test",
        config={"delta": 0.5},
        seeds={"seed": 1},
        backend="machine",
        precision_bits=53,
        version="0.1.0",
    )


# -- matrices ---------------------------------------------------------------------------------


def test_encode_matrix_pairs():
    assert encode_matrix(np.array([[1j, 2]])) == [[[0.0, 1.0], [2.0, 0.0]]]


def test_decode_matrix_rejects_malformed_data():
    with pytest.raises(CircuitFileError, match="gate 3 unitary"):
        decode_matrix([[1, 2]], "gate 3 unitary")
    with pytest.raises(CircuitFileError, match="square"):
        decode_matrix([[[1, 0], [0, 0]]], "gate 0 unitary")


# -- circuit files ------------------------------------------------------------------------------


def test_seeded_file_is_deterministic():
    first = CircuitFile.from_dict(_seeded_file()).to_circuit()
    second = CircuitFile.from_dict(_seeded_file()).to_circuit()
    assert first.architecture.placements == ((0, 1), (1,))
    for a, b in zip(first.gates, second.gates):
        np.testing.assert_array_equal(gate_at(a, 0.7), gate_at(b, 0.7))


def test_haar_seed_sets_the_worst_gate():
    circuit = CircuitFile.from_dict(_seeded_file()).to_circuit()
    expected = haar_unitary(4, np.random.default_rng(5))
    np.testing.assert_array_equal(circuit.gates[0].worst_gate, expected)


def test_explicit_matrices_reproduce_the_circuit(make_circuit, tmp_path):
    circuit = make_circuit(2, "0-1,0", 12)
    path = tmp_path / "circuit.json"
    CircuitFile.from_circuit(circuit).dump(path)
    reloaded = CircuitFile.load(path).to_circuit()
    for theta in (0.0, 0.6, 1.0):
        for y in ("00", "01", "11"):
            assert abs(amplitude(reloaded, theta, y) - amplitude(circuit, theta, y)) < 1e-12


def test_file_loads_at_high_precision(mp256):
    circuit = CircuitFile.from_dict(_seeded_file()).to_circuit(field=mp256)
    assert circuit.field is mp256
    machine = CircuitFile.from_dict(_seeded_file()).to_circuit()
    assert abs(MACHINE.lift(amplitude(circuit, 0.5, "00")) - amplitude(machine, 0.5, "00")) < 1e-12


def test_dumps_is_stable():
    text = CircuitFile.from_dict(_seeded_file()).dumps()
    assert json.loads(text) == _seeded_file()
    assert text == CircuitFile.loads(text).dumps()


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda d: d.update(n=0), "'n' must be a positive integer"),
        (lambda d: d.update(gates="none"), "'gates' must be a list"),
        (lambda d: d.update(companion_seed="x"), "'companion_seed'"),
        (lambda d: d["gates"][1].update(qubits=[2]), "gate 1: qubits"),
        (lambda d: d["gates"][1].update(qubits=[0, 1, 2]), "gate 1: 'qubits'"),
        (lambda d: d["gates"][0].pop("haar_seed"), "gate 0: needs either"),
        (lambda d: d["gates"][0].update(haar_seed=1.5), "gate 0: 'haar_seed'"),
        (lambda d: d["gates"][1].update(unitary=[[[1, 0], [0, 0]], [[0, 0], [2, 0]]]), "gate 1: unitary is not unitary"),
        (lambda d: d["gates"][1].update(companion=[[[1, 0]]]), r"gate 1: companion has shape \(1, 1\)"),
        (lambda d: d["gates"].append("X"), "gate 2: expected an object"),
    ],
)
def test_malformed_files_name_the_problem(mutate, message):
    data = _seeded_file()
    mutate(data)
    with pytest.raises(CircuitFileError, match=message):
        CircuitFile.from_dict(data)


def test_invalid_json_reports_its_location():
    with pytest.raises(CircuitFileError, match="line 1"):
        CircuitFile.loads("{not json")
    with pytest.raises(CircuitFileError, match="JSON object"):
        CircuitFile.loads("[1, 2]")


def test_companion_at_the_branch_point_is_reported():
    data = {
        "n": 1,
        "gates": [{"qubits": [0], "haar_seed": 1, "companion": [[[-1, 0], [0, 0]], [[0, 0], [1, 0]]]}],
    }
    with pytest.raises(CircuitFileError, match="gate 0"):
        CircuitFile.from_dict(data).to_circuit()


# -- CSV and reports ------------------------------------------------------------------------------


def test_exact_samples_survive_csv(tmp_path):
    path = tmp_path / "samples.csv"
    points = [SamplePoint(Fraction(1, 3), Fraction(-2, 7)), SamplePoint(Fraction(1, 2), Fraction(5))]
    write_samples_csv(path, points)
    assert path.read_text().splitlines()[0] == "node,value"
    assert read_samples_csv(path, field=EXACT) == points


def test_complex_samples_use_two_columns(tmp_path):
    path = tmp_path / "samples.csv"
    write_samples_csv(path, [SamplePoint(0.25, 1 + 2j), SamplePoint(-0.5, 0.5)])
    assert path.read_text().splitlines()[0] == "node,re,im"
    points = read_samples_csv(path)
    assert points[0].value == 1 + 2j
    assert points[1].node == -0.5


def test_read_samples_rejects_bad_files(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n1,2\n")
    with pytest.raises(ValueError, match="unexpected header"):
        read_samples_csv(path)
    path.write_text("node,value\n0.5,abc\n")
    with pytest.raises(ValueError, match="line 2"):
        read_samples_csv(path)


def test_json_report_embeds_the_manifest(tmp_path):
    path = tmp_path / "report.json"
    text = write_json_report(path, {"bound": math.inf, "indices": (1, 2)}, _manifest())
    assert path.read_text() == text
    data = json.loads(text)
    assert data["bound"] == math.inf
    assert data["indices"] == [1, 2]
    assert data["manifest"]["command"] == "test"
    assert write_json_report(None, {}, _manifest()).startswith("{")


def test_csv_series_writes_a_sidecar(tmp_path):
    path = tmp_path / "series.csv"
    sidecar = write_csv_series(path, ["delta", "tvd"], [[0.01, 0.002], [0.02, 0.004]], _manifest())
    assert sidecar.name == "series.csv.manifest.json"
    assert path.read_text().splitlines() == ["delta,tvd", "0.01,0.002", "0.02,0.004"]
    assert json.loads(sidecar.read_text())["precision_bits"] == 53
