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

import numpy as np
import pytest

from ecpt.errors import PreconditionError
from ecpt.lemmas import (
    SAMPLERS,
    get_sampler,
    mc_validate_lemma1,
    mc_validate_lemma2,
)


def test_lemmas_samplers():
    rng = np.random.default_rng(0)
    assert set(SAMPLERS) == {"uniform", "exponential", "pareto", "constant"}
    assert get_sampler("pareto")(rng, (100, 3)).min() >= 1.0
    assert np.all(get_sampler("constant")(rng, (2, 2)) == 1.0)
    assert get_sampler("uniform")(rng, (4, 5)).shape == (4, 5)

    with pytest.raises(PreconditionError):
        get_sampler("cauchy")


@pytest.mark.parametrize("dist", ["uniform", "exponential", "pareto"])
@pytest.mark.parametrize("n", [50, 500])
def test_lemmas_lemma1(dist, n):
    res = mc_validate_lemma1(n, 0.4, 2000, dist, seed=n)
    assert res.passed
    assert res.trials == 2000
    assert res.sigma == pytest.approx(np.sqrt(0.24 / 2000))
    # continuous scores: P{U > eps (n + 1)} is about 1 - eps
    assert abs(res.frequency - 0.6) < 0.05


@pytest.mark.parametrize("dist", ["uniform", "exponential", "pareto"])
def test_lemmas_lemma2(dist):
    res = mc_validate_lemma2(50, 0.4, 2000, dist, seed=1)
    assert res.passed
    assert res.frequency <= 0.4 + 3 * res.sigma


def test_lemmas_constant_scores():
    # ties: every score counts, bound still holds
    res = mc_validate_lemma1(10, 0.4, 100, "constant")
    assert res.frequency == 1.0 and res.passed

    # L_last equals factor * mean only if factor <= 1
    res = mc_validate_lemma2(10, 0.4, 100, "constant")
    assert res.frequency == 0.0 and res.passed


def test_lemmas_seeded():
    a = mc_validate_lemma1(20, 0.3, 500, seed=5)
    b = mc_validate_lemma1(20, 0.3, 500, seed=5)
    assert a == b
    assert "lemma1" in str(a) and "PASS" in str(a)


def test_lemmas_errors():
    with pytest.raises(PreconditionError):
        mc_validate_lemma1(0, 0.4, 10)
    with pytest.raises(PreconditionError):
        mc_validate_lemma1(10, 0.4, 0)
    with pytest.raises(PreconditionError):
        mc_validate_lemma2(10, 1.5, 10)


@pytest.mark.slow
def test_lemmas_full_grid():
    for dist in ("uniform", "exponential", "pareto"):
        for n in (50, 500, 5000):
            assert mc_validate_lemma1(n, 0.4, 10_000, dist, seed=n).passed
            assert mc_validate_lemma2(n, 0.4, 10_000, dist, seed=n).passed
