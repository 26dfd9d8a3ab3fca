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

"""Monte Carlo checks of the p-value and e-value coverage bounds."""

import math
from dataclasses import dataclass
from typing import Callable, Dict, Tuple

import numpy as np

from ecpt.conformal import e_factor
from ecpt.errors import PreconditionError
from ecpt.logger import logger

Sampler = Callable[[np.random.Generator, Tuple[int, int]], np.ndarray]

# elements drawn per simulation chunk
_CHUNK_ELEMENTS = 2_000_000

PARETO_SHAPE = 1.5


def _uniform(rng: np.random.Generator, shape: Tuple[int, int]) -> np.ndarray:
    return rng.uniform(0.0, 1.0, size=shape)


def _exponential(
    rng: np.random.Generator, shape: Tuple[int, int]
) -> np.ndarray:
    return rng.exponential(1.0, size=shape)


def _pareto(rng: np.random.Generator, shape: Tuple[int, int]) -> np.ndarray:
    # numpy draws Lomax; shift to classical Pareto with scale 1
    return rng.pareto(PARETO_SHAPE, size=shape) + 1.0


def _constant(rng: np.random.Generator, shape: Tuple[int, int]) -> np.ndarray:
    return np.ones(shape)


SAMPLERS: Dict[str, Sampler] = {
    "uniform": _uniform,
    "exponential": _exponential,
    "pareto": _pareto,
    "constant": _constant,
}

###############################################################################
# Class: MonteCarloResult
###############################################################################


@dataclass(frozen=True)
class MonteCarloResult:
    """Outcome of a Monte Carlo bound check."""

    lemma: str
    dist: str
    n: int
    level: float
    trials: int
    frequency: float
    sigma: float
    passed: bool

    def __str__(self) -> str:
        """Return one-line summary."""
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{self.lemma} {self.dist:<11} n={self.n:<5} "
            f"level={self.level:g} freq={self.frequency:.4f} "
            f"sigma={self.sigma:.4f} {status}"
        )


def get_sampler(dist: str) -> Sampler:
    """Get score sampler by name."""
    try:
        return SAMPLERS[dist]
    except KeyError:
        raise PreconditionError(f"unknown score sampler '{dist}'") from None


def _check_args(n: int, level: float, trials: int) -> None:
    if n < 1 or trials < 1:
        raise PreconditionError("n and trials must be positive")
    if not 0 < level <= 1:
        raise PreconditionError(f"level must be in (0, 1], got {level}")


def mc_validate_lemma1(
    n: int, epsilon: float, trials: int, dist: str = "uniform", seed: int = 0
) -> MonteCarloResult:
    """Estimate ``P{U / (n + 1) > eps}`` for exchangeable scores.

    ``U`` counts the scores among ``L_1..L_{n+1}`` that are at least as
    large as ``L_{n+1}``. The bound holds if the frequency is at least
    ``1 - eps`` minus three binomial standard deviations.
    """
    _check_args(n, epsilon, trials)
    sampler = get_sampler(dist)
    rng = np.random.default_rng(seed)
    step = max(1, _CHUNK_ELEMENTS // (n + 1))

    hits = 0
    for start in range(0, trials, step):
        rows = min(step, trials - start)
        scores = sampler(rng, (rows, n + 1))
        u = np.sum(scores >= scores[:, -1:], axis=1)
        hits += int(np.sum(u / (n + 1) > epsilon))

    freq = hits / trials
    sigma = math.sqrt(epsilon * (1 - epsilon) / trials)
    result = MonteCarloResult(
        "lemma1",
        dist,
        n,
        epsilon,
        trials,
        freq,
        sigma,
        freq >= 1 - epsilon - 3 * sigma,
    )
    logger.debug(str(result))
    return result


def mc_validate_lemma2(
    n: int, alpha: float, trials: int, dist: str = "exponential", seed: int = 0
) -> MonteCarloResult:
    """Estimate the rate of ``L_{n+1} >= factor(alpha, n) * mean(L_1..L_n)``.

    The bound holds if the rate is at most ``alpha`` plus three binomial
    standard deviations.
    """
    _check_args(n, alpha, trials)
    sampler = get_sampler(dist)
    factor = e_factor(alpha, n)
    rng = np.random.default_rng(seed)
    step = max(1, _CHUNK_ELEMENTS // (n + 1))

    violations = 0
    for start in range(0, trials, step):
        rows = min(step, trials - start)
        scores = sampler(rng, (rows, n + 1))
        mean = scores[:, :-1].mean(axis=1)
        violations += int(np.sum(scores[:, -1] >= factor * mean))

    rate = violations / trials
    sigma = math.sqrt(alpha * (1 - alpha) / trials)
    result = MonteCarloResult(
        "lemma2",
        dist,
        n,
        alpha,
        trials,
        rate,
        sigma,
        rate <= alpha + 3 * sigma,
    )
    logger.debug(str(result))
    return result
