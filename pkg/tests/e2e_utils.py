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

import logging
import os
import shlex
import subprocess
import sys
import typing
from dataclasses import dataclass
from pathlib import Path
from tempfile import TemporaryFile

LOGGER = logging.getLogger(__file__)

REPO_ROOT = Path(__file__).resolve().parent.parent


@dataclass(frozen=True)
class CliResult:
    returncode: int
    output: str


def run_cli(
    *args: str,
    cwd: typing.Optional[os.PathLike] = None,
    env: typing.Optional[typing.Dict[str, str]] = None,
    timeout: float = 300,
) -> CliResult:
    """Run ``python -m cayley_rcs`` with ``args`` to completion.

    The repository root is put on ``PYTHONPATH`` so the source tree is used
    when the package is not installed. stdout and stderr are merged.
    """
    pythonpath = os.pathsep.join(
        p for p in (str(REPO_ROOT), os.environ.get("PYTHONPATH", "")) if p
    )
    command = [sys.executable, "-m", "cayley_rcs", *[str(a) for a in args]]
    LOGGER.info("Running command: %s", shlex.join(command))
    # A temp file rather than subprocess.PIPE, which can deadlock once the
    # pipe buffer fills up.
    with TemporaryFile("w+") as stdout_file:
        completed = subprocess.run(
            command,
            cwd=str(cwd) if cwd is not None else None,
            stdout=stdout_file,
            stderr=subprocess.STDOUT,
            text=True,
            env={**os.environ, "PYTHONPATH": pythonpath, **(env or {})},
            timeout=timeout,
        )
        stdout_file.seek(0)
        output = stdout_file.read()
    if completed.returncode != 0:
        LOGGER.info("Command exited with %d:\n%s", completed.returncode, output)
    return CliResult(completed.returncode, output)
