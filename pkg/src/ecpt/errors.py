############################################################################
# SPDX-License-Identifier: Apache-2.0
#
# Licensed to the Apache Software Foundation (ASF) under one or more
# contributor license agreements.  See the NOTICE file distributed with
# this work for additional information regarding copyright ownership.  The
# ASF licenses this file to you under the Apache License, Version 2.0 (the
# "License"); you may not use this file except in compliance with the
# License.  You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.  See the
# License for the specific language governing permissions and limitations
# under the License.
#
############################################################################

"""ECPT errors and exit codes."""

from enum import IntEnum
from typing import Optional

###############################################################################
# Class: ExitCode
###############################################################################


class ExitCode(IntEnum):
    """Process exit codes."""

    SUCCESS = 0
    VALIDATION = 1
    USAGE = 2
    CONFIG = 3
    IO = 4
    NUMERIC = 5
    PRECONDITION = 6

    def __str__(self) -> str:
        """Return enum string."""
        return self.name


###############################################################################
# Class: EcptError
###############################################################################


class EcptError(Exception):
    """Base class for all ECPT errors."""

    exit_code = ExitCode.VALIDATION


class ConfigError(EcptError, ValueError):
    """Invalid run configuration."""

    exit_code = ExitCode.CONFIG


class IdxFormatError(EcptError, ValueError):
    """IDX file with unexpected magic number or dimensions."""

    exit_code = ExitCode.IO


class ConsistencyError(EcptError, ValueError):
    """Image and label files do not describe the same set."""

    exit_code = ExitCode.IO


class TruncatedFileError(EcptError, IOError):
    """File shorter than its header announces."""

    exit_code = ExitCode.IO


class PreconditionError(EcptError, ValueError):
    """Operation called on inputs it does not accept."""

    exit_code = ExitCode.PRECONDITION


class PaddingError(PreconditionError):
    """Plaintext is not a multiple of the AES block size."""


class CoverageInfeasibleError(PreconditionError):
    """Requested miscoverage level too small for the calibration size."""


class ArchitectureError(EcptError, ValueError):
    """Layer dimensions do not chain."""

    exit_code = ExitCode.CONFIG


class ParameterError(EcptError, ValueError):
    """Algorithm parameter infeasible for the given input."""

    exit_code = ExitCode.CONFIG


class NumericError(EcptError, ArithmeticError):
    """Non-finite values where finite ones are required."""

    exit_code = ExitCode.NUMERIC


class DegenerateCalibrationError(NumericError):
    """Calibration scores with zero mean."""


class TrainingError(NumericError):
    """Training diverged."""

    def __init__(self, epoch: int, msg: Optional[str] = None) -> None:
        """Initialize training error."""
        self.epoch = epoch
        super().__init__(msg or f"training diverged at epoch {epoch}")


class ValidationError(EcptError):
    """A validation suite failed."""

    exit_code = ExitCode.VALIDATION
