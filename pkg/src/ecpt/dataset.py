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

"""MNIST image sets: loading, splitting and pixel scaling."""

import hashlib
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

import numpy as np

from ecpt.errors import ConsistencyError, IdxFormatError, PreconditionError
from ecpt.lib.idx.idx_parser import (
    IDX_IMAGES_MAGIC,
    IDX_LABELS_MAGIC,
    IdxParser,
)
from ecpt.logger import logger

IMAGE_SIDE = 28
IMAGE_SIZE = IMAGE_SIDE * IMAGE_SIDE
NUM_CLASSES = 10

DEFAULT_SPLIT_SEED = 2024

# standard MNIST distribution file names
MNIST_FILES = {
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
}

###############################################################################
# Class: Provenance
###############################################################################


class Provenance(Enum):
    """Where image bytes come from."""

    PLAINTEXT = "plaintext"
    ENCRYPTED_FIXED = "encrypted_fixed"
    ENCRYPTED_PER_SAMPLE = "encrypted_per_sample"

    def __str__(self) -> str:
        """Return enum string."""
        return self.value

    @property
    def encrypted(self) -> bool:
        """Check if images are ciphertexts."""
        return self is not Provenance.PLAINTEXT


###############################################################################
# Class: ImageSet
###############################################################################


@dataclass(frozen=True, eq=False)
class ImageSet:
    """Images (one 784-byte row each) with their plaintext labels."""

    images: np.ndarray
    labels: np.ndarray
    provenance: Provenance = Provenance.PLAINTEXT

    def __post_init__(self) -> None:
        """Validate and freeze arrays."""
        images = np.array(self.images, dtype=np.uint8)
        raw_labels = np.asarray(self.labels)

        if images.ndim != 2 or images.shape[1] != IMAGE_SIZE:
            raise PreconditionError(
                f"images must have shape (n, {IMAGE_SIZE}), "
                f"got {images.shape}"
            )
        if raw_labels.ndim != 1 or len(raw_labels) != images.shape[0]:
            raise ConsistencyError(
                f"{images.shape[0]} images but {raw_labels.size} labels"
            )
        if raw_labels.size and not (
            raw_labels.min() >= 0 and raw_labels.max() < NUM_CLASSES
        ):
            raise PreconditionError("labels must be in 0..9")
        labels = raw_labels.astype(np.uint8)

        images.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        """Return number of images."""
        return self.count

    @property
    def count(self) -> int:
        """Get number of images."""
        return int(self.images.shape[0])

    def subset(self, indices: np.ndarray) -> "ImageSet":
        """Return a new set with the selected rows."""
        indices = np.asarray(indices, dtype=np.int64)
        return ImageSet(
            self.images[indices], self.labels[indices], self.provenance
        )

    def fingerprint(self) -> str:
        """Return SHA-256 over provenance, images and labels."""
        h = hashlib.sha256()
        h.update(str(self.provenance).encode())
        h.update(self.images.tobytes())
        h.update(self.labels.tobytes())
        return h.hexdigest()


###############################################################################
# Class: SplitPair
###############################################################################


@dataclass(frozen=True, eq=False)
class SplitPair:
    """Calibration and conformal-test halves of a test set."""

    calibration: ImageSet
    cp_test: ImageSet
    split_seed: int
    calibration_idx: np.ndarray = field(repr=False)
    cp_test_idx: np.ndarray = field(repr=False)


def load_idx(images_path: str, labels_path: str) -> ImageSet:
    """Load an image set from a pair of IDX files."""
    images = IdxParser(images_path)
    labels = IdxParser(labels_path)

    if images.magic != IDX_IMAGES_MAGIC:
        raise IdxFormatError(
            f"{images_path}: magic 0x{images.magic:08x}, "
            f"expected 0x{IDX_IMAGES_MAGIC:08x}"
        )
    if labels.magic != IDX_LABELS_MAGIC:
        raise IdxFormatError(
            f"{labels_path}: magic 0x{labels.magic:08x}, "
            f"expected 0x{IDX_LABELS_MAGIC:08x}"
        )
    if images.dims[1:] != (IMAGE_SIDE, IMAGE_SIDE):
        raise IdxFormatError(
            f"{images_path}: image dimensions {images.dims[1:]}, "
            f"expected ({IMAGE_SIDE}, {IMAGE_SIDE})"
        )
    if images.count != labels.count:
        raise ConsistencyError(
            f"{images.count} images in {images_path} but "
            f"{labels.count} labels in {labels_path}"
        )

    logger.debug(f"loaded {images.count} images from {images_path}")
    return ImageSet(images.array(), labels.array().reshape(-1))


def _find_file(data_dir: str, name: str) -> str:
    """Find a distribution file, plain or gzip-compressed."""
    for candidate in (name, name + ".gz"):
        path = os.path.join(data_dir, candidate)
        if os.path.exists(path):
            return path
    raise FileNotFoundError(f"{name}[.gz] not found in {data_dir}")


def load_mnist(data_dir: str, part: str) -> ImageSet:
    """Load the ``train`` or ``test`` part of MNIST from a directory."""
    try:
        images_name, labels_name = MNIST_FILES[part]
    except KeyError:
        raise ValueError(f"unknown MNIST part '{part}'") from None

    return load_idx(
        _find_file(data_dir, images_name), _find_file(data_dir, labels_name)
    )


def split_test(
    test: ImageSet, split_seed: int = DEFAULT_SPLIT_SEED
) -> SplitPair:
    """Split a test set into calibration and conformal-test halves.

    Indices are shuffled with a seeded permutation; the first half goes to
    calibration, the second half to the conformal test set.
    """
    if test.count % 2:
        raise PreconditionError(
            f"test set size must be even, got {test.count}"
        )

    perm = np.random.default_rng(split_seed).permutation(test.count)
    half = test.count // 2
    cal_idx, cp_idx = perm[:half], perm[half:]

    return SplitPair(
        calibration=test.subset(cal_idx),
        cp_test=test.subset(cp_idx),
        split_seed=split_seed,
        calibration_idx=cal_idx,
        cp_test_idx=cp_idx,
    )


def normalize(image: np.ndarray, dtype: type = np.float32) -> np.ndarray:
    """Scale pixel bytes to ``[0, 1]``.

    Works on a single 784-byte image or a ``(n, 784)`` batch; plaintext and
    ciphertext bytes are treated alike.
    """
    image = np.asarray(image, dtype=np.uint8)
    if image.shape[-1] != IMAGE_SIZE:
        raise PreconditionError(
            f"image length must be {IMAGE_SIZE}, got {image.shape[-1]}"
        )
    return image.astype(dtype) / dtype(255.0)


def dataset_arrays(data: ImageSet) -> Tuple[np.ndarray, np.ndarray]:
    """Return normalized inputs and integer labels of a set."""
    return normalize(data.images), data.labels.astype(np.int64)
