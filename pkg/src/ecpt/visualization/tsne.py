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

"""Exact t-SNE embedding.

Conditional Gaussian bandwidths are found by bisection on the entropy of
each row, the symmetrized affinities are matched by a Student-t kernel in
two dimensions and the KL divergence is minimized by gradient descent with
momentum, adaptive gains and early exaggeration.
"""

import csv
import os
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.spatial.distance import pdist, squareform

from ecpt.errors import ParameterError, PreconditionError
from ecpt.logger import logger

PERPLEXITY_TOL = 1e-5
BISECTION_STEPS = 100

EARLY_EXAGGERATION = 12.0
EXAGGERATION_ITERS = 250
INITIAL_MOMENTUM = 0.5
FINAL_MOMENTUM = 0.8
MIN_GAIN = 0.01
GRAD_CLIP = 100.0

# KL is logged every KL_EVERY iterations and at each of the last KL_TAIL
KL_EVERY = 50
KL_TAIL = 100

_P_FLOOR = 1e-12

###############################################################################
# Class: Embedding2D
###############################################################################


@dataclass(eq=False)
class Embedding2D:
    """Two-dimensional embedding of labelled points."""

    points: np.ndarray
    labels: np.ndarray
    perplexity: float
    iterations: int
    seed: int
    kl_trace: List[Tuple[int, float]] = field(default_factory=list)

    def __post_init__(self) -> None:
        """Validate embedding."""
        if self.points.ndim != 2 or self.points.shape[1] != 2:
            raise PreconditionError("points must have shape (n, 2)")
        if self.points.shape[0] != len(self.labels):
            raise PreconditionError("one label per point required")

    @property
    def kl_divergence(self) -> float:
        """Get final KL divergence."""
        return self.kl_trace[-1][1] if self.kl_trace else float("nan")


def _conditional_affinities(
    sqdist: np.ndarray, perplexity: float
) -> np.ndarray:
    """Return row-normalized Gaussian affinities of the given perplexity."""
    n = sqdist.shape[0]
    target = np.log(perplexity)

    # shifting a row does not change its distribution, keeps exp() in range
    d = sqdist + np.diag(np.full(n, np.inf))
    d -= d.min(axis=1, keepdims=True)
    np.fill_diagonal(d, 0.0)
    offdiag = ~np.eye(n, dtype=bool)

    beta = np.ones(n)
    lo = np.full(n, -np.inf)
    hi = np.full(n, np.inf)
    active = np.arange(n)
    p = np.empty_like(d)

    for _ in range(BISECTION_STEPS):
        rows = d[active]
        pr = np.exp(-rows * beta[active, None]) * offdiag[active]
        sump = pr.sum(axis=1)
        h = np.log(sump) + beta[active] * (rows * pr).sum(axis=1) / sump
        p[active] = pr / sump[:, None]

        diff = h - target
        done = np.abs(diff) <= PERPLEXITY_TOL
        up = diff > 0

        b = beta[active]
        lo[active] = np.where(up, b, lo[active])
        hi[active] = np.where(up, hi[active], b)
        grow = np.where(np.isinf(hi[active]), b * 2, (b + hi[active]) / 2)
        shrink = np.where(np.isinf(lo[active]), b / 2, (b + lo[active]) / 2)
        beta[active] = np.where(done, b, np.where(up, grow, shrink))

        active = active[~done]
        if not active.size:
            break

    if active.size:
        logger.debug(f"t-SNE: {active.size} rows did not reach perplexity")
    logger.debug(f"t-SNE: mean sigma {np.mean(np.sqrt(1 / beta)):.4f}")
    return p


def joint_probabilities(data: np.ndarray, perplexity: float) -> np.ndarray:
    """Return symmetrized input affinities ``P``."""
    sqdist = squareform(pdist(data, "sqeuclidean"))
    cond = _conditional_affinities(sqdist, perplexity)
    p = (cond + cond.T) / (2.0 * data.shape[0])
    return np.maximum(p, _P_FLOOR)


def _pca_init(data: np.ndarray) -> np.ndarray:
    """Project on two principal axes, scaled to standard deviation 1e-4."""
    centered = data - data.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    axes = vt[:2]
    # fix SVD sign ambiguity
    signs = np.sign(axes[np.arange(2), np.argmax(np.abs(axes), axis=1)])
    y = centered @ (axes * signs[:, None]).T
    std = y[:, 0].std()
    return y / std * 1e-4 if std > 0 else y


def _student_t(y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Return unnormalized kernel ``num`` and normalized ``Q``."""
    num = 1.0 / (1.0 + squareform(pdist(y, "sqeuclidean")))
    np.fill_diagonal(num, 0.0)
    q = np.maximum(num / num.sum(), _P_FLOOR)
    return num, q


def _kl(p: np.ndarray, q: np.ndarray) -> float:
    """Return KL divergence of ``P`` from ``Q`` over off-diagonal pairs."""
    kl = p * np.log(p / q)
    return float(kl.sum() - np.trace(kl))


def tsne(
    data: np.ndarray,
    perplexity: float = 30.0,
    iterations: int = 1000,
    seed: int = 2024,
    labels: Optional[np.ndarray] = None,
    learning_rate: float = 200.0,
    init: str = "pca",
) -> Embedding2D:
    """Embed rows of ``data`` in two dimensions.

    ``init="pca"`` starts from the principal axes, so the result follows any
    row permutation of the input; ``init="random"`` draws the start from a
    normal distribution seeded with ``seed``.
    """
    data = np.asarray(data, dtype=np.float64)
    n = data.shape[0]
    if perplexity <= 0 or n < 3 * perplexity:
        raise ParameterError(
            f"perplexity {perplexity} infeasible for {n} points"
        )
    if iterations < 1:
        raise ParameterError("iterations must be positive")
    if labels is None:
        labels = np.zeros(n, dtype=np.int64)

    p = joint_probabilities(data, perplexity)

    if init == "pca":
        y = _pca_init(data)
    elif init == "random":
        y = np.random.default_rng(seed).normal(0.0, 1e-4, size=(n, 2))
    else:
        raise ParameterError(f"unknown init '{init}'")

    update = np.zeros_like(y)
    gains = np.ones_like(y)
    trace: List[Tuple[int, float]] = []

    for it in range(iterations):
        early = it < EXAGGERATION_ITERS
        exaggeration = EARLY_EXAGGERATION if early else 1.0
        momentum = INITIAL_MOMENTUM if early else FINAL_MOMENTUM

        num, q = _student_t(y)
        if it % KL_EVERY == 0 or it >= iterations - KL_TAIL:
            trace.append((it, _kl(p, q)))
            if it % KL_EVERY == 0:
                logger.info(f"t-SNE iteration {it}: KL {trace[-1][1]:.6f}")

        pq = (exaggeration * p - q) * num
        grad = 4.0 * (pq.sum(axis=1)[:, None] * y - pq @ y)
        np.clip(grad, -GRAD_CLIP, GRAD_CLIP, out=grad)

        same = (grad > 0) == (update > 0)
        gains = np.where(same, gains * 0.8, gains + 0.2)
        np.maximum(gains, MIN_GAIN, out=gains)

        update = momentum * update - learning_rate * gains * grad
        y = y + update
        y -= y.mean(axis=0)

    _, q = _student_t(y)
    trace.append((iterations, _kl(p, q)))

    return Embedding2D(
        points=y,
        labels=np.asarray(labels),
        perplexity=perplexity,
        iterations=iterations,
        seed=seed,
        kl_trace=trace,
    )


def separation_ratio(points: np.ndarray, labels: np.ndarray) -> float:
    """Return mean intra-class distance over mean inter-class distance.

    Lower values mean better separated classes; about 1 means no class
    structure.
    """
    labels = np.asarray(labels)
    dist = pdist(np.asarray(points, dtype=np.float64))
    i, j = np.triu_indices(len(labels), k=1)
    same = labels[i] == labels[j]
    if not same.any() or same.all():
        raise PreconditionError("need both intra- and inter-class pairs")
    return float(dist[same].mean() / dist[~same].mean())


def write_embedding(embedding: Embedding2D, path: str) -> None:
    """Write embedding as ``x,y,label`` CSV."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="UTF8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["x", "y", "label"])
        for (x, y), label in zip(embedding.points, embedding.labels):
            writer.writerow([f"{x:.6f}", f"{y:.6f}", int(label)])
