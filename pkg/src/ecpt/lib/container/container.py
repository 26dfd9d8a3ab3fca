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

"""Image set container.

Byte layout (header integers little-endian)::

    offset  size        field
    0       4           magic b"ECIS"
    4       2           version (1)
    6       1           cipher mode (0 none, 1 fixed, 2 per_sample)
    7       1           provenance (0 plaintext, 1 encrypted_fixed,
                        2 encrypted_per_sample)
    8       4           record count N
    12      4           record size (784)
    16      N * 784     image records, row-major bytes
    ...     N           label bytes
"""

import os
import struct

import numpy as np

from ecpt.dataset import IMAGE_SIZE, ImageSet, Provenance
from ecpt.errors import IdxFormatError, TruncatedFileError
from ecpt.logger import logger

CONTAINER_MAGIC = b"ECIS"
CONTAINER_VERSION = 1

_HEADER = struct.Struct("<4sHBBII")

_PROVENANCE_CODES = {
    Provenance.PLAINTEXT: 0,
    Provenance.ENCRYPTED_FIXED: 1,
    Provenance.ENCRYPTED_PER_SAMPLE: 2,
}
_CODES_PROVENANCE = {v: k for k, v in _PROVENANCE_CODES.items()}

# cipher mode code mirrors provenance: plaintext sets were never encrypted
_MODE_NAMES = {0: "none", 1: "fixed", 2: "per_sample"}


def save_imageset(path: str, data: ImageSet) -> None:
    """Store an image set in a container file."""
    code = _PROVENANCE_CODES[data.provenance]
    header = _HEADER.pack(
        CONTAINER_MAGIC, CONTAINER_VERSION, code, code, data.count, IMAGE_SIZE
    )

    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "wb") as f:
        f.write(header)
        f.write(data.images.tobytes())
        f.write(data.labels.tobytes())

    logger.info(f"stored {data.count} {data.provenance} images in {path}")


def load_imageset(path: str) -> ImageSet:
    """Load an image set from a container file."""
    with open(path, "rb") as f:
        raw = f.read()

    if len(raw) < _HEADER.size:
        raise TruncatedFileError(f"{path}: missing container header")

    magic, version, mode, prov, count, size = _HEADER.unpack_from(raw)
    if magic != CONTAINER_MAGIC or version != CONTAINER_VERSION:
        raise IdxFormatError(f"{path}: not an image set container")
    if size != IMAGE_SIZE or mode not in _MODE_NAMES or mode != prov:
        raise IdxFormatError(f"{path}: unsupported container header")

    expected = _HEADER.size + count * (IMAGE_SIZE + 1)
    if len(raw) < expected:
        raise TruncatedFileError(
            f"{path}: expected {expected} bytes, got {len(raw)}"
        )

    body = np.frombuffer(raw, dtype=np.uint8, offset=_HEADER.size)
    images = body[: count * IMAGE_SIZE].reshape(count, IMAGE_SIZE)
    labels = body[count * IMAGE_SIZE : count * (IMAGE_SIZE + 1)]

    logger.debug(f"{path}: {count} records, mode {_MODE_NAMES[mode]}")
    return ImageSet(images.copy(), labels.copy(), _CODES_PROVENANCE[prov])
