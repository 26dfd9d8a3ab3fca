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

"""Digit rendering as portable graymap (P5) files."""

import os
from typing import List

import numpy as np
from PIL import Image

from ecpt.dataset import IMAGE_SIDE, IMAGE_SIZE
from ecpt.errors import PreconditionError


def _to_image(image: np.ndarray) -> Image.Image:
    """Convert 784 bytes to a 28x28 grayscale image."""
    data = np.asarray(image, dtype=np.uint8).reshape(-1)
    if data.size != IMAGE_SIZE:
        raise PreconditionError(
            f"image length must be {IMAGE_SIZE}, got {data.size}"
        )
    return Image.frombytes("L", (IMAGE_SIDE, IMAGE_SIDE), data.tobytes())


def _save(img: Image.Image, path: str) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    # mode L is written as binary P5 with maxval 255
    img.save(path, format="PPM")


def render_digit(image: np.ndarray, path: str) -> str:
    """Write one image as a 28x28 graymap, return the path."""
    _save(_to_image(image), path)
    return path


def render_pair(
    plain: np.ndarray, cipher: np.ndarray, outdir: str, index: int
) -> List[str]:
    """Write a plaintext digit, its ciphertext and both side by side."""
    left, right = _to_image(plain), _to_image(cipher)
    pair = Image.new("L", (2 * IMAGE_SIDE, IMAGE_SIDE))
    pair.paste(left, (0, 0))
    pair.paste(right, (IMAGE_SIDE, 0))

    paths = [
        render_digit(plain, os.path.join(outdir, f"digit_{index}_plain.pgm")),
        render_digit(
            cipher, os.path.join(outdir, f"digit_{index}_cipher.pgm")
        ),
    ]
    pair_path = os.path.join(outdir, f"digit_{index}_pair.pgm")
    _save(pair, pair_path)
    return paths + [pair_path]
