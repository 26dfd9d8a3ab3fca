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

"""Split conformal prediction with p-value and e-value thresholds.

Nonconformity score of a candidate pair ``(x, y)`` is the model's
cross-entropy at label ``y``. Calibration keeps the scores of the true
labels of the calibration half; a label enters a prediction set iff its
score is strictly below the threshold.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, List, Tuple

import numpy as np

from ecpt.dataset import NUM_CLASSES, ImageSet, dataset_arrays
from ecpt.errors import (
    CoverageInfeasibleError,
    DegenerateCalibrationError,
    NumericError,
    PreconditionError,
)
from ecpt.logger import logger
from ecpt.mlp import MlpModel, cross_entropy, forward

# absorbs representation error of (1 - eps) * (n + 1) before flooring
_INDEX_TOLERANCE = 1e-9

###############################################################################
# Class: RuleKind
###############################################################################


class RuleKind(Enum):
    """Prediction set rule."""

    P_VALUE = "p_value"
    E_VALUE = "e_value"

    def __str__(self) -> str:
        """Return enum string."""
        return self.value


###############################################################################
# Class: Rule
###############################################################################


@dataclass(frozen=True)
class Rule:
    """Rule with its level (epsilon for p-values, alpha for e-values)."""

    kind: RuleKind
    level: float

    def __str__(self) -> str:
        """Return rule tag, e.g. ``p_value(0.4)``."""
        return f"{self.kind}({self.level:g})"

    @classmethod
    def p_value(cls, epsilon: float) -> "Rule":
        """Create p-value rule."""
        return cls(RuleKind.P_VALUE, epsilon)

    @classmethod
    def e_value(cls, alpha: float) -> "Rule":
        """Create e-value rule."""
        return cls(RuleKind.E_VALUE, alpha)


###############################################################################
# Class: CalibrationScores
###############################################################################


@dataclass(frozen=True, eq=False)
class CalibrationScores:
    """Ascending nonconformity scores of the calibration set."""

    scores: np.ndarray
    source: str = ""

    def __post_init__(self) -> None:
        """Validate and freeze scores."""
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.ndim != 1:
            raise PreconditionError("scores must be one-dimensional")
        if not np.all(np.isfinite(scores)) or np.any(scores < 0):
            raise NumericError("scores must be finite and non-negative")
        if np.any(np.diff(scores) < 0):
            raise PreconditionError("scores must be sorted ascending")

        scores.flags.writeable = False
        object.__setattr__(self, "scores", scores)

    @classmethod
    def from_unsorted(
        cls, scores: np.ndarray, source: str = ""
    ) -> "CalibrationScores":
        """Create from scores in any order."""
        return cls(np.sort(np.asarray(scores, dtype=np.float64)), source)

    @property
    def n(self) -> int:
        """Get number of calibration scores."""
        return int(self.scores.size)

    @property
    def mean(self) -> float:
        """Get mean score."""
        return float(np.mean(self.scores)) if self.n else 0.0

    def histogram(self, bins: int = 50) -> Tuple[np.ndarray, np.ndarray]:
        """Return fixed-width bin counts and edges over ``[0, max score]``."""
        top = float(self.scores[-1]) if self.n else 0.0
        # a zero-width range still needs a positive upper edge
        top = top if top > 0 else 1.0
        return np.histogram(self.scores, bins=bins, range=(0.0, top))

    def sorted_curve(self) -> Tuple[np.ndarray, np.ndarray]:
        """Return 1-based ranks and the sorted scores."""
        return np.arange(1, self.n + 1), self.scores


###############################################################################
# Class: PredictionSet
###############################################################################


@dataclass(frozen=True)
class PredictionSet:
    """Labels kept for one test example."""

    labels: FrozenSet[int]
    example_id: int
    rule: Rule
    threshold: float

    def __contains__(self, label: object) -> bool:
        """Check if label is in the set."""
        return label in self.labels

    def __len__(self) -> int:
        """Return set size."""
        return len(self.labels)

    @property
    def size(self) -> int:
        """Get set size."""
        return len(self.labels)


def score(model: MlpModel, x: np.ndarray, y: int) -> float:
    """Return the nonconformity score of candidate pair ``(x, y)``."""
    return float(cross_entropy(forward(model, x), y))


def score_matrix(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Return ``(n, 10)`` scores of every candidate label of each input."""
    probs = np.asarray(forward(model, np.atleast_2d(x)), dtype=np.float64)
    labels = np.arange(NUM_CLASSES)
    return np.stack(
        [cross_entropy(probs, np.full(len(probs), y)) for y in labels],
        axis=1,
    )


def calibrate(model: MlpModel, cal: ImageSet) -> CalibrationScores:
    """Score the calibration set at its true labels."""
    if cal.count == 0:
        raise PreconditionError("empty calibration set")

    x, y = dataset_arrays(cal)
    probs = forward(model, x)
    scores = cross_entropy(probs, y)

    source = f"{model.arch_id}:{model.train_seed}:{cal.fingerprint()[:16]}"
    result = CalibrationScores.from_unsorted(scores, source)
    logger.info(
        f"calibration: n={result.n} mean={result.mean:.6f} "
        f"max={result.scores[-1]:.6f}"
    )
    return result


def p_index(n: int, epsilon: float) -> int:
    """Return 1-based order statistic index ``floor((1 - eps)(n + 1))``."""
    if not 0 < epsilon < 1:
        raise PreconditionError(f"epsilon must be in (0, 1), got {epsilon}")
    k = math.floor((1 - epsilon) * (n + 1) + _INDEX_TOLERANCE)
    if k < 1 or k > n:
        raise CoverageInfeasibleError(
            f"order statistic {k} out of range 1..{n} for epsilon {epsilon}"
        )
    return k


def p_threshold(cal: CalibrationScores, epsilon: float) -> float:
    """Return the p-value rule threshold."""
    if cal.n < 1:
        raise PreconditionError("empty calibration scores")
    return float(cal.scores[p_index(cal.n, epsilon) - 1])


def e_factor(alpha: float, n: int) -> float:
    """Return ``(1/alpha) / (1 + (1 - 1/alpha) / n)``."""
    if not 0 < alpha <= 1:
        raise PreconditionError(f"alpha must be in (0, 1], got {alpha}")
    if n < 1:
        raise PreconditionError("empty calibration scores")

    denom = 1 + (1 - 1 / alpha) / n
    if denom <= 0:
        raise CoverageInfeasibleError(
            f"alpha {alpha} too small for n={n} calibration scores"
        )
    return (1 / alpha) / denom


def e_threshold(cal: CalibrationScores, alpha: float) -> float:
    """Return the e-value (bounded from below) rule threshold."""
    factor = e_factor(alpha, cal.n)
    mean = cal.mean
    if mean <= 0:
        raise DegenerateCalibrationError("calibration scores have zero mean")
    return factor * mean


def threshold(cal: CalibrationScores, rule: Rule) -> float:
    """Return threshold of a rule."""
    if rule.kind is RuleKind.P_VALUE:
        return p_threshold(cal, rule.level)
    return e_threshold(cal, rule.level)


def _check_threshold(value: float) -> None:
    """Check threshold is finite."""
    if not math.isfinite(value):
        raise NumericError(f"threshold must be finite, got {value}")


def predict_set(
    model: MlpModel,
    x: np.ndarray,
    threshold: float,
    rule: Rule,
    example_id: int = 0,
) -> PredictionSet:
    """Return labels whose score is strictly below the threshold."""
    _check_threshold(threshold)
    scores = score_matrix(model, x)[0]
    labels = frozenset(int(y) for y in np.flatnonzero(scores < threshold))
    return PredictionSet(labels, example_id, rule, threshold)


def predict_sets(
    model: MlpModel, x: np.ndarray, threshold: float, rule: Rule
) -> List[PredictionSet]:
    """Return prediction sets for a batch of inputs."""
    _check_threshold(threshold)
    keep = score_matrix(model, x) < threshold
    return [
        PredictionSet(
            frozenset(int(y) for y in np.flatnonzero(row)), i, rule, threshold
        )
        for i, row in enumerate(keep)
    ]
