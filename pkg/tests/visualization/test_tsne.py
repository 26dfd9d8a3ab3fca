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

import csv

import numpy as np
import pytest
from scipy.spatial.distance import pdist

from ecpt.errors import ParameterError, PreconditionError
from ecpt.visualization.tsne import (
    KL_TAIL,
    Embedding2D,
    joint_probabilities,
    separation_ratio,
    tsne,
    write_embedding,
)


def blobs(per_class=20, classes=3, dim=10, seed=0):
    rng = np.random.default_rng(seed)
    centers = rng.normal(0, 10, (classes, dim))
    labels = np.repeat(np.arange(classes), per_class)
    data = centers[labels] + rng.normal(0, 0.5, (len(labels), dim))
    return data, labels


def test_tsne_joint_probabilities():
    data, _ = blobs()
    p = joint_probabilities(data, 5.0)
    assert p.shape == (60, 60)
    assert np.allclose(p, p.T)
    assert p.sum() == pytest.approx(1.0, abs=1e-6)


def test_tsne_pairs_and_outlier():
    data = np.array(
        [
            [0.0, 0.0, 0.0],
            [0.1, 0.0, 0.0],
            [5.0, 0.0, 0.0],
            [5.1, 0.0, 0.0],
            [20.0, 20.0, 0.0],
        ]
    )
    emb = tsne(data, perplexity=1.5, iterations=300)
    d = np.linalg.norm(emb.points[:, None] - emb.points[None], axis=-1)

    assert d[0, 1] < d[0, 4]
    assert d[2, 3] < d[2, 4]
    assert d[0, 1] < d[0, 2]


def test_tsne_clusters():
    data, labels = blobs()
    emb = tsne(data, perplexity=5.0, iterations=300, labels=labels)

    assert emb.points.shape == (60, 2)
    assert np.all(np.isfinite(emb.points))
    assert np.array_equal(emb.labels, labels)
    assert emb.perplexity == 5.0 and emb.iterations == 300
    assert separation_ratio(emb.points, labels) < 0.5
    assert emb.kl_divergence == emb.kl_trace[-1][1]


def test_tsne_deterministic():
    data, _ = blobs(per_class=10)
    a = tsne(data, perplexity=3.0, iterations=100, seed=1, init="random")
    b = tsne(data, perplexity=3.0, iterations=100, seed=1, init="random")
    c = tsne(data, perplexity=3.0, iterations=100, seed=2, init="random")
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)

    a = tsne(data, perplexity=3.0, iterations=100)
    b = tsne(data, perplexity=3.0, iterations=100)
    assert np.array_equal(a.points, b.points)


def test_tsne_row_permutation():
    data, _ = blobs(per_class=10)
    perm = np.random.default_rng(3).permutation(len(data))

    a = tsne(data, perplexity=3.0, iterations=100)
    b = tsne(data[perm], perplexity=3.0, iterations=100)
    assert np.allclose(a.points[perm], b.points, rtol=1e-5, atol=1e-6)


def test_tsne_kl_tail_non_increasing():
    data, labels = blobs(per_class=30)
    emb = tsne(data, perplexity=10.0, iterations=600, learning_rate=10.0)

    iters = [it for it, _ in emb.kl_trace]
    assert iters[0] == 0 and 50 in iters
    assert iters[-1] == 600

    tail = np.array([kl for it, kl in emb.kl_trace if it >= 600 - KL_TAIL])
    assert len(tail) == KL_TAIL + 1
    assert np.all(np.diff(tail) <= 1e-6)


def test_tsne_errors():
    data, _ = blobs(per_class=3)
    with pytest.raises(ParameterError):
        tsne(data, perplexity=5.0)
    with pytest.raises(ParameterError):
        tsne(data, perplexity=2.0, iterations=0)
    with pytest.raises(ParameterError):
        tsne(data, perplexity=2.0, init="umap")

    with pytest.raises(PreconditionError):
        Embedding2D(np.zeros((3, 3)), np.zeros(3), 1.0, 1, 0)
    with pytest.raises(PreconditionError):
        Embedding2D(np.zeros((3, 2)), np.zeros(2), 1.0, 1, 0)


def test_tsne_separation_ratio():
    points = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])
    labels = np.array([0, 0, 1, 1])
    # intra pairs at distance 1, inter pairs at 10 and sqrt(101)
    inter = (10.0 * 2 + np.sqrt(101.0) * 2) / 4
    assert separation_ratio(points, labels) == pytest.approx(1.0 / inter)

    rng = np.random.default_rng(0)
    noise = rng.normal(size=(400, 2))
    ratio = separation_ratio(noise, rng.integers(0, 10, 400))
    assert ratio == pytest.approx(1.0, abs=0.05)

    with pytest.raises(PreconditionError):
        separation_ratio(points, np.zeros(4))
    with pytest.raises(PreconditionError):
        separation_ratio(points[:2], np.array([0, 1]))


def test_tsne_write_embedding(tmp_path):
    emb = Embedding2D(
        np.array([[1.0, -2.0], [0.5, 0.25]]), np.array([3, 7]), 1.0, 1, 0
    )
    path = str(tmp_path / "out" / "tsne.csv")
    write_embedding(emb, path)

    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows == [
        ["x", "y", "label"],
        ["1.000000", "-2.000000", "3"],
        ["0.500000", "0.250000", "7"],
    ]
    assert pdist(emb.points).shape == (1,)
