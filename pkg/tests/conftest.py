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

import os

import numpy as np
import pytest

from ecpt.dataset import IMAGE_SIDE, IMAGE_SIZE, ImageSet
from ecpt.envconfig import EnvConfig
from ecpt.lib.idx.idx_parser import write_idx
from ecpt.mlp import Architecture, init_model


def make_images(count, seed=0):
    """Synthetic digits: class c lights up a band of rows."""
    rng = np.random.default_rng(seed)
    labels = np.arange(count) % 10
    rng.shuffle(labels)
    images = rng.integers(0, 30, (count, IMAGE_SIDE, IMAGE_SIDE))
    for i, c in enumerate(labels):
        images[i, 2 * c + 3 : 2 * c + 7, 4:24] = rng.integers(180, 256, 20)
    return images.astype(np.uint8), labels.astype(np.uint8)


def write_mnist(path, train=200, test=100, gz=False):
    os.makedirs(path, exist_ok=True)
    ext = ".gz" if gz else ""
    for prefix, count, seed in (("train", train, 1), ("t10k", test, 2)):
        images, labels = make_images(count, seed)
        write_idx(
            os.path.join(path, f"{prefix}-images-idx3-ubyte{ext}"), images
        )
        write_idx(
            os.path.join(path, f"{prefix}-labels-idx1-ubyte{ext}"), labels
        )
    return str(path)


@pytest.fixture
def mnist_dir(tmp_path):
    return write_mnist(tmp_path / "mnist")


@pytest.fixture
def small_set():
    images, labels = make_images(40, seed=3)
    return ImageSet(images.reshape(-1, IMAGE_SIZE), labels)


@pytest.fixture
def tiny_model():
    return init_model(Architecture("tiny", (IMAGE_SIZE, 16, 10)), seed=0)


@pytest.fixture
def small_conf(tmp_path, mnist_dir):
    conf = {
        "data": {"dir": mnist_dir},
        "output": {"dir": str(tmp_path / "result")},
        "train": {
            "hidden": [32],
            "arch": "small",
            "epochs": 3,
            "batch_size": 16,
            "learning_rate": 0.1,
        },
        "viz": {"samples": 60, "iterations": 60, "perplexity": 5.0},
        "validate": {"trials": 200},
    }
    return EnvConfig(conf)
