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

"""Fully connected classifier trained with minibatch SGD."""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple, Union

import numpy as np

from ecpt.dataset import IMAGE_SIZE, NUM_CLASSES, ImageSet, dataset_arrays
from ecpt.errors import (
    ArchitectureError,
    NumericError,
    PreconditionError,
    TrainingError,
)
from ecpt.logger import logger

# loss clamp, keeps nonconformity scores finite
EPS_FLOOR = 1e-12

GRADCHECK_MAX_PARAMS = 10_000
GRADCHECK_FLOOR = 1e-5

_EVAL_CHUNK = 4096

###############################################################################
# Class: Activation
###############################################################################


class Activation(Enum):
    """Layer activation."""

    RELU = "relu"
    SOFTMAX = "softmax"

    def __str__(self) -> str:
        """Return enum string."""
        return self.value


###############################################################################
# Class: Optimizer
###############################################################################


class Optimizer(Enum):
    """Parameter update rule."""

    SGD = "sgd"
    SGD_MOMENTUM = "sgd_momentum"

    def __str__(self) -> str:
        """Return enum string."""
        return self.value


###############################################################################
# Class: Architecture
###############################################################################


@dataclass(frozen=True)
class Architecture:
    """Layer widths from input to output."""

    arch_id: str
    dims: Tuple[int, ...]

    def __post_init__(self) -> None:
        """Validate layer chain."""
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 2 or any(d <= 0 for d in dims):
            raise ArchitectureError(f"invalid layer dimensions {dims}")
        if dims[-1] != NUM_CLASSES:
            raise ArchitectureError(
                f"output width must be {NUM_CLASSES}, got {dims[-1]}"
            )
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_hidden(
        cls,
        hidden: Tuple[int, ...],
        arch_id: str = "custom",
        input_dim: int = IMAGE_SIZE,
    ) -> "Architecture":
        """Build architecture from hidden layer widths."""
        return cls(arch_id, (input_dim, *hidden, NUM_CLASSES))


REFERENCE_ARCH = Architecture("ref-v1", (IMAGE_SIZE, 512, 256, NUM_CLASSES))

###############################################################################
# Class: Layer
###############################################################################


@dataclass(eq=False)
class Layer:
    """Dense layer: ``activation(x @ weight.T + bias)``."""

    weight: np.ndarray
    bias: np.ndarray
    activation: Activation

    @property
    def fan_in(self) -> int:
        """Get input width."""
        return int(self.weight.shape[1])

    @property
    def fan_out(self) -> int:
        """Get output width."""
        return int(self.weight.shape[0])


###############################################################################
# Class: MlpModel
###############################################################################


@dataclass(eq=False)
class MlpModel:
    """Multilayer perceptron with ReLU hidden layers and softmax output."""

    layers: List[Layer]
    arch_id: str = "custom"
    train_seed: int = 0

    def __post_init__(self) -> None:
        """Validate layer chain."""
        if not self.layers:
            raise ArchitectureError("model without layers")

        for i, layer in enumerate(self.layers):
            if layer.bias.shape != (layer.fan_out,):
                raise ArchitectureError(f"layer {i}: bias shape mismatch")
            if i and self.layers[i - 1].fan_out != layer.fan_in:
                raise ArchitectureError(
                    f"layer {i}: input width {layer.fan_in} does not match "
                    f"previous output width {self.layers[i - 1].fan_out}"
                )
            last = i == len(self.layers) - 1
            expected = Activation.SOFTMAX if last else Activation.RELU
            if layer.activation is not expected:
                raise ArchitectureError(
                    f"layer {i}: expected {expected} activation"
                )

        if self.output_dim != NUM_CLASSES:
            raise ArchitectureError(
                f"output width must be {NUM_CLASSES}, got {self.output_dim}"
            )

    @property
    def dims(self) -> Tuple[int, ...]:
        """Get layer widths from input to output."""
        return (self.input_dim, *(layer.fan_out for layer in self.layers))

    @property
    def input_dim(self) -> int:
        """Get input width."""
        return self.layers[0].fan_in

    @property
    def output_dim(self) -> int:
        """Get output width."""
        return self.layers[-1].fan_out

    @property
    def n_params(self) -> int:
        """Get number of trainable parameters."""
        return sum(ly.weight.size + ly.bias.size for ly in self.layers)

    @property
    def dtype(self) -> np.dtype:
        """Get parameter dtype."""
        return self.layers[0].weight.dtype

    def copy(self, dtype: Optional[type] = None) -> "MlpModel":
        """Return a deep copy, optionally cast to another dtype."""
        if dtype is None:
            dtype = self.dtype
        layers = [
            Layer(
                ly.weight.astype(dtype, copy=True),
                ly.bias.astype(dtype, copy=True),
                ly.activation,
            )
            for ly in self.layers
        ]
        return MlpModel(layers, self.arch_id, self.train_seed)


###############################################################################
# Class: TrainConfig
###############################################################################


@dataclass(frozen=True)
class TrainConfig:
    """Training hyperparameters."""

    batch_size: int = 64
    epochs: int = 32
    learning_rate: float = 0.01
    optimizer: Optimizer = Optimizer.SGD
    momentum: float = 0.9
    seed: int = 2024
    shuffle_each_epoch: bool = True

    def __post_init__(self) -> None:
        """Validate hyperparameters."""
        if self.batch_size <= 0 or self.epochs <= 0:
            raise PreconditionError("batch size and epochs must be positive")
        if self.learning_rate <= 0:
            raise PreconditionError("learning rate must be positive")


@dataclass(frozen=True)
class EpochStats:
    """Training statistics of one epoch."""

    epoch: int
    loss: float
    accuracy: float


@dataclass(eq=False)
class TrainResult:
    """Trained model with its per-epoch trace."""

    model: MlpModel
    trace: List[EpochStats] = field(default_factory=list)

    @property
    def final_loss(self) -> float:
        """Get training loss of the last epoch."""
        return self.trace[-1].loss

    @property
    def final_accuracy(self) -> float:
        """Get training accuracy of the last epoch."""
        return self.trace[-1].accuracy


def init_model(arch: Architecture, seed: int) -> MlpModel:
    """Create a model with Glorot-uniform weights and zero biases."""
    rng = np.random.default_rng(seed)
    layers = []
    pairs = list(zip(arch.dims[:-1], arch.dims[1:]))

    for i, (fan_in, fan_out) in enumerate(pairs):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weight = rng.uniform(-bound, bound, size=(fan_out, fan_in))
        act = Activation.SOFTMAX if i == len(pairs) - 1 else Activation.RELU
        layers.append(
            Layer(
                weight.astype(np.float32),
                np.zeros(fan_out, dtype=np.float32),
                act,
            )
        )

    return MlpModel(layers, arch.arch_id, seed)


def _softmax(z: np.ndarray) -> np.ndarray:
    """Row-wise softmax."""
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _forward_pass(
    model: MlpModel, x: np.ndarray
) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """Run the network, keeping pre-activations and activations."""
    acts = [x]
    pre = []
    for layer in model.layers:
        z = acts[-1] @ layer.weight.T + layer.bias
        pre.append(z)
        if layer.activation is Activation.RELU:
            acts.append(np.maximum(z, 0))
        else:
            acts.append(_softmax(z))
    return pre, acts


def forward(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Return class probabilities for one input or a batch of inputs."""
    x = np.asarray(x, dtype=model.dtype)
    if not np.all(np.isfinite(x)):
        raise NumericError("non-finite model input")

    single = x.ndim == 1
    batch = x[None, :] if single else x
    if batch.shape[1] != model.input_dim:
        raise PreconditionError(
            f"input width {batch.shape[1]}, model expects {model.input_dim}"
        )

    if batch.shape[0] <= _EVAL_CHUNK:
        probs = _forward_pass(model, batch)[1][-1]
    else:
        probs = np.concatenate(
            [
                _forward_pass(model, batch[i : i + _EVAL_CHUNK])[1][-1]
                for i in range(0, batch.shape[0], _EVAL_CHUNK)
            ]
        )
    return probs[0] if single else probs


def cross_entropy(
    probs: np.ndarray, label: Union[int, np.ndarray]
) -> Union[float, np.ndarray]:
    """Return ``-log(max(probs[label], EPS_FLOOR))``.

    Accepts one distribution with an integer label, or a batch of
    distributions with an array of labels.
    """
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(label, dtype=np.int64)

    if np.any(labels < 0) or np.any(labels >= probs.shape[-1]):
        raise IndexError(f"label out of range 0..{probs.shape[-1] - 1}")

    if probs.ndim == 1:
        picked = probs[labels]
    else:
        picked = probs[np.arange(probs.shape[0]), labels]

    loss = -np.log(np.maximum(picked, EPS_FLOOR))
    # -log(1.0) is -0.0
    loss = np.abs(loss)
    return float(loss) if np.ndim(loss) == 0 else loss


def _backprop(
    model: MlpModel, x: np.ndarray, y: np.ndarray
) -> Tuple[float, List[Tuple[np.ndarray, np.ndarray]], np.ndarray]:
    """Return mean loss, gradients and output probabilities of a batch."""
    x = np.atleast_2d(np.asarray(x, dtype=model.dtype))
    y = np.atleast_1d(np.asarray(y, dtype=np.int64))
    n = x.shape[0]

    pre, acts = _forward_pass(model, x)
    probs = acts[-1]
    loss = float(np.mean(cross_entropy(probs, y)))

    delta = probs.copy()
    delta[np.arange(n), y] -= 1
    delta /= n

    grads: List[Tuple[np.ndarray, np.ndarray]] = []
    for i in range(len(model.layers) - 1, -1, -1):
        grads.append((delta.T @ acts[i], delta.sum(axis=0)))
        if i:
            delta = (delta @ model.layers[i].weight) * (pre[i - 1] > 0)

    grads.reverse()
    return loss, grads, probs


def backprop(
    model: MlpModel, x: np.ndarray, y: np.ndarray
) -> Tuple[float, List[Tuple[np.ndarray, np.ndarray]]]:
    """Return mean cross-entropy and its parameter gradients on a batch."""
    loss, grads, _ = _backprop(model, x, y)
    return loss, grads


def _epoch_order(cfg: TrainConfig, epoch: int, n: int) -> np.ndarray:
    """Return sample order for an epoch."""
    if not cfg.shuffle_each_epoch:
        return np.arange(n)
    return np.random.default_rng([cfg.seed, epoch]).permutation(n)


def train_arrays(
    model: MlpModel, x: np.ndarray, y: np.ndarray, cfg: TrainConfig
) -> TrainResult:
    """Train a copy of a model on normalized inputs and integer labels."""
    n = x.shape[0]
    if n == 0:
        raise PreconditionError("cannot train on an empty dataset")

    model = model.copy()
    model.train_seed = cfg.seed
    x = np.asarray(x, dtype=model.dtype)
    y = np.asarray(y, dtype=np.int64)

    velocity = [
        (np.zeros_like(ly.weight), np.zeros_like(ly.bias))
        for ly in model.layers
    ]
    lr = model.dtype.type(cfg.learning_rate)
    mu = model.dtype.type(cfg.momentum)
    result = TrainResult(model)

    for epoch in range(1, cfg.epochs + 1):
        order = _epoch_order(cfg, epoch, n)
        loss_sum = 0.0
        hits = 0

        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            xb, yb = x[idx], y[idx]

            loss, grads, probs = _backprop(model, xb, yb)
            hits += int(np.sum(np.argmax(probs, axis=1) == yb))
            loss_sum += loss * len(idx)

            for layer, (dw, db), vel in zip(model.layers, grads, velocity):
                if cfg.optimizer is Optimizer.SGD_MOMENTUM:
                    vel[0] *= mu
                    vel[0] -= lr * dw
                    vel[1] *= mu
                    vel[1] -= lr * db
                    layer.weight += vel[0]
                    layer.bias += vel[1]
                else:
                    layer.weight -= lr * dw
                    layer.bias -= lr * db

        epoch_loss = loss_sum / n
        if not np.isfinite(epoch_loss):
            raise TrainingError(epoch)

        stats = EpochStats(epoch, epoch_loss, hits / n)
        result.trace.append(stats)
        logger.info(
            f"epoch {epoch}/{cfg.epochs}: loss {stats.loss:.4f} "
            f"accuracy {stats.accuracy:.4f}"
        )

    return result


def train(model: MlpModel, data: ImageSet, cfg: TrainConfig) -> TrainResult:
    """Train a copy of a model on an image set."""
    if data.count == 0:
        raise PreconditionError("cannot train on an empty dataset")
    x, y = dataset_arrays(data)
    return train_arrays(model, x, y, cfg)


def predict(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Return the most probable class of each input."""
    return np.argmax(forward(model, x), axis=-1)


def accuracy_arrays(model: MlpModel, x: np.ndarray, y: np.ndarray) -> float:
    """Return fraction of correctly classified inputs."""
    if len(y) == 0:
        return 0.0
    return float(np.mean(predict(model, x) == np.asarray(y)))


def accuracy(model: MlpModel, data: ImageSet) -> float:
    """Return classification accuracy on an image set."""
    x, y = dataset_arrays(data)
    return accuracy_arrays(model, x, y)


def _param_views(model: MlpModel) -> List[np.ndarray]:
    """Return flat views of all parameters, layer by layer."""
    views = []
    for layer in model.layers:
        views.append(layer.weight.reshape(-1))
        views.append(layer.bias.reshape(-1))
    return views


def gradient_check(
    model: MlpModel,
    x: np.ndarray,
    label: int,
    step: float = 1e-5,
    samples: int = 200,
    seed: int = 0,
) -> float:
    """Compare backprop gradients with central finite differences.

    Runs in float64 on a copy of the model, on ``samples`` parameters drawn
    with ``seed`` (all parameters if the model is smaller). Returns the
    largest relative error ``|a - n| / max(|a|, |n|, GRADCHECK_FLOOR)``.
    """
    if model.n_params > GRADCHECK_MAX_PARAMS:
        raise PreconditionError(
            f"gradient check needs at most {GRADCHECK_MAX_PARAMS} "
            f"parameters, model has {model.n_params}"
        )

    work = model.copy(dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)[None, :]
    y = np.array([label])

    _, grads = backprop(work, x, y)
    analytic = np.concatenate(
        [np.concatenate([dw.ravel(), db.ravel()]) for dw, db in grads]
    )

    views = _param_views(work)
    offsets = np.cumsum([0] + [v.size for v in views])
    total = int(offsets[-1])
    if total <= samples:
        picked = np.arange(total)
    else:
        rng = np.random.default_rng(seed)
        picked = np.sort(rng.choice(total, size=samples, replace=False))

    def loss_at() -> float:
        return float(cross_entropy(_forward_pass(work, x)[1][-1][0], label))

    worst = 0.0
    for flat in picked:
        k = int(np.searchsorted(offsets, flat, side="right") - 1)
        view, j = views[k], flat - offsets[k]

        orig = view[j]
        view[j] = orig + step
        plus = loss_at()
        view[j] = orig - step
        minus = loss_at()
        view[j] = orig

        numeric = (plus - minus) / (2 * step)
        a = analytic[flat]
        err = abs(a - numeric) / max(abs(a), abs(numeric), GRADCHECK_FLOOR)
        worst = max(worst, err)

    logger.debug(f"gradient check: {len(picked)} params, max err {worst:g}")
    return worst
