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

"""Model persistence.

Byte layout (all integers and floats little-endian)::

    4       magic b"ECML"
    2       version (1)
    2       arch_id length L
    L       arch_id, UTF-8
    8       training seed (signed)
    4       number of layers K
    K * 9   per layer: fan_out (u32), fan_in (u32), activation (u8:
            0 relu, 1 softmax)
    ...     per layer: weight (fan_out x fan_in, row-major float32),
            then bias (fan_out float32)
"""

import os
import struct

import numpy as np

from ecpt.errors import IdxFormatError, TruncatedFileError
from ecpt.mlp import Activation, Layer, MlpModel

MODEL_MAGIC = b"ECML"
MODEL_VERSION = 1

_ACT_CODES = {Activation.RELU: 0, Activation.SOFTMAX: 1}
_CODES_ACT = {v: k for k, v in _ACT_CODES.items()}
_F32 = np.dtype("<f4")


def save_model(path: str, model: MlpModel) -> None:
    """Store a model in a binary file."""
    arch = model.arch_id.encode("utf-8")
    chunks = [
        struct.pack("<4sHH", MODEL_MAGIC, MODEL_VERSION, len(arch)),
        arch,
        struct.pack("<qI", model.train_seed, len(model.layers)),
    ]
    for layer in model.layers:
        chunks.append(
            struct.pack(
                "<IIB",
                layer.fan_out,
                layer.fan_in,
                _ACT_CODES[layer.activation],
            )
        )
    for layer in model.layers:
        chunks.append(layer.weight.astype(_F32).tobytes(order="C"))
        chunks.append(layer.bias.astype(_F32).tobytes())

    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "wb") as f:
        f.write(b"".join(chunks))


def load_model(path: str) -> MlpModel:
    """Load a model stored with :func:`save_model`."""
    with open(path, "rb") as f:
        raw = f.read()

    try:
        magic, version, alen = struct.unpack_from("<4sHH", raw, 0)
        if magic != MODEL_MAGIC or version != MODEL_VERSION:
            raise IdxFormatError(f"{path}: not a model file")
        pos = 8
        arch_id = raw[pos : pos + alen].decode("utf-8")
        pos += alen
        seed, nlayers = struct.unpack_from("<qI", raw, pos)
        pos += 12

        shapes = []
        for _ in range(nlayers):
            fan_out, fan_in, act = struct.unpack_from("<IIB", raw, pos)
            shapes.append((fan_out, fan_in, _CODES_ACT[act]))
            pos += 9
    except (struct.error, KeyError) as e:
        raise TruncatedFileError(f"{path}: corrupted model header") from e

    layers = []
    for fan_out, fan_in, act in shapes:
        size = (fan_out * fan_in + fan_out) * _F32.itemsize
        if len(raw) < pos + size:
            raise TruncatedFileError(f"{path}: truncated weights")
        block = np.frombuffer(raw, dtype=_F32, count=size // 4, offset=pos)
        weight = block[: fan_out * fan_in].reshape(fan_out, fan_in)
        bias = block[fan_out * fan_in :]
        layers.append(
            Layer(
                weight.astype(np.float32), bias.astype(np.float32), act
            )
        )
        pos += size

    return MlpModel(layers, arch_id, seed)
