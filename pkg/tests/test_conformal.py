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

import math

import numpy as np
import pytest

from ecpt.conformal import (
    CalibrationScores,
    Rule,
    RuleKind,
    calibrate,
    e_factor,
    e_threshold,
    p_index,
    p_threshold,
    predict_set,
    predict_sets,
    score,
    score_matrix,
    threshold,
)
from ecpt.dataset import dataset_arrays, split_test
from ecpt.errors import (
    CoverageInfeasibleError,
    DegenerateCalibrationError,
    NumericError,
    PreconditionError,
)


def test_conformal_rule():
    assert str(Rule.p_value(0.4)) == "p_value(0.4)"
    assert str(Rule.e_value(0.25)) == "e_value(0.25)"
    assert Rule.p_value(0.4).kind is RuleKind.P_VALUE
    assert Rule.e_value(0.4) == Rule(RuleKind.E_VALUE, 0.4)


def test_conformal_scores():
    cal = CalibrationScores.from_unsorted(np.array([3.0, 1.0, 2.0]), "x")
    assert cal.scores.tolist() == [1.0, 2.0, 3.0]
    assert cal.n == 3
    assert cal.mean == pytest.approx(2.0)
    assert cal.source == "x"

    ranks, curve = cal.sorted_curve()
    assert ranks.tolist() == [1, 2, 3]
    assert np.all(np.diff(curve) >= 0)

    counts, edges = cal.histogram(bins=4)
    assert counts.sum() == 3
    assert edges[0] == 0.0 and edges[-1] == 3.0

    # constant scores fill one bin
    counts, _ = CalibrationScores(np.full(10, 0.5)).histogram()
    assert np.count_nonzero(counts) == 1 and counts.sum() == 10

    with pytest.raises(PreconditionError):
        CalibrationScores(np.array([2.0, 1.0]))
    with pytest.raises(NumericError):
        CalibrationScores(np.array([-1.0, 1.0]))
    with pytest.raises(NumericError):
        CalibrationScores(np.array([1.0, np.inf]))


def test_conformal_p_index():
    # 0.6 * 5001 = 3000.6
    assert p_index(5000, 0.4) == 3000
    assert p_index(9, 0.9) == 1
    assert p_index(99, 0.1) == 90
    assert p_index(10, 0.01) == 10

    with pytest.raises(CoverageInfeasibleError):
        p_index(10, 0.95)
    with pytest.raises(PreconditionError):
        p_index(10, 0.0)
    with pytest.raises(PreconditionError):
        p_index(10, 1.0)


def test_conformal_p_threshold():
    cal = CalibrationScores(np.arange(1.0, 5001.0))
    assert p_threshold(cal, 0.4) == 3000.0
    assert threshold(cal, Rule.p_value(0.4)) == 3000.0

    with pytest.raises(PreconditionError):
        p_threshold(CalibrationScores(np.array([])), 0.4)


def test_conformal_p_threshold_sorted_oracle():
    rng = np.random.default_rng(11)
    for _ in range(100):
        n = int(rng.integers(1, 1001))
        eps = float(rng.uniform(0.001, 0.999))
        raw = rng.exponential(2.0, n)
        cal = CalibrationScores.from_unsorted(raw)

        k = math.floor((1 - eps) * (n + 1))
        if not 1 <= k <= n:
            with pytest.raises(CoverageInfeasibleError):
                p_threshold(cal, eps)
            continue
        assert p_threshold(cal, eps) == sorted(raw.tolist())[k - 1]


def test_conformal_e_factor():
    assert e_factor(0.4, 5000) == pytest.approx(2.5 / 0.9997, rel=1e-12)
    assert e_factor(0.4, 5000) == pytest.approx(2.50075022, rel=1e-8)
    assert e_factor(1.0, 10) == 1.0
    # large n approaches 1/alpha
    assert e_factor(0.2, 10**9) == pytest.approx(5.0)

    with pytest.raises(CoverageInfeasibleError):
        e_factor(0.1, 5)
    with pytest.raises(CoverageInfeasibleError):
        e_factor(0.1, 9)
    with pytest.raises(PreconditionError):
        e_factor(0.0, 10)
    with pytest.raises(PreconditionError):
        e_factor(1.5, 10)


def test_conformal_e_threshold():
    scores = np.random.default_rng(0).exponential(1.7, 5000)
    cal = CalibrationScores.from_unsorted(scores)
    thr = e_threshold(cal, 0.4)
    assert thr / cal.mean == pytest.approx(e_factor(0.4, 5000), rel=1e-9)
    assert threshold(cal, Rule.e_value(0.4)) == thr

    with pytest.raises(DegenerateCalibrationError):
        e_threshold(CalibrationScores(np.zeros(10)), 0.4)


def test_conformal_calibrate(tiny_model, small_set):
    cal = calibrate(tiny_model, small_set)
    assert cal.n == 40
    assert np.all(np.diff(cal.scores) >= 0)
    assert cal.source.startswith("tiny:0:")

    x, y = dataset_arrays(small_set)
    expected = sorted(score(tiny_model, x[i], int(y[i])) for i in range(40))
    assert np.allclose(cal.scores, expected)

    with pytest.raises(PreconditionError):
        calibrate(tiny_model, small_set.subset(np.arange(0)))


def test_conformal_predict_set_strict(tiny_model, small_set):
    x, _ = dataset_arrays(small_set)
    row = score_matrix(tiny_model, x[0])[0]
    order = np.argsort(row)

    rule = Rule.p_value(0.4)
    # threshold equal to a score excludes that label
    thr = float(row[order[3]])
    s = predict_set(tiny_model, x[0], thr, rule, example_id=7)
    assert s.labels == frozenset(int(k) for k in order[:3])
    assert s.example_id == 7
    assert s.rule == rule
    assert len(s) == s.size == 3
    assert int(order[0]) in s
    assert int(order[3]) not in s

    assert predict_set(tiny_model, x[0], 0.0, rule).size == 0
    assert predict_set(tiny_model, x[0], 1e9, rule).size == 10

    with pytest.raises(NumericError):
        predict_set(tiny_model, x[0], np.inf, rule)
    with pytest.raises(NumericError):
        predict_sets(tiny_model, x, np.nan, rule)


def test_conformal_predict_sets_nested(tiny_model, small_set):
    x, _ = dataset_arrays(small_set)
    rule = Rule.p_value(0.4)
    small = predict_sets(tiny_model, x, 2.0, rule)
    large = predict_sets(tiny_model, x, 3.0, rule)

    assert [s.example_id for s in small] == list(range(40))
    for a, b in zip(small, large):
        assert a.labels <= b.labels
        one = predict_set(tiny_model, x[a.example_id], 2.0, rule, a.example_id)
        assert a == one


def test_conformal_sets_agree_with_scores(tiny_model, small_set):
    pair = split_test(small_set)
    cal = calibrate(tiny_model, pair.calibration)
    x, y = dataset_arrays(pair.calibration)

    rule = Rule.p_value(0.4)
    thr = p_threshold(cal, 0.4)
    sets = predict_sets(tiny_model, x, thr, rule)
    hits = sum(int(label) in s for s, label in zip(sets, y))

    # a true label is kept iff its own score is below the threshold
    assert hits == int(np.sum(cal.scores < thr))
    assert hits <= p_index(cal.n, 0.4) - 1
