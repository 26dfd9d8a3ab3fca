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

"""Cipher common interface."""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np
from Crypto.Cipher import AES

from ecpt.dataset import ImageSet, Provenance
from ecpt.errors import ConfigError, PaddingError, PreconditionError
from ecpt.logger import logger

BLOCK_SIZE = 16

# fixed key and IV of the reference experiment, used as raw ASCII bytes
DEFAULT_KEY = b"abs2kas126oZbdXs"
DEFAULT_IV = b"1nsdjah72MdnJ12a"
DEFAULT_CIPHER_SEED = 2024

###############################################################################
# Class: CipherMode
###############################################################################


class CipherMode(Enum):
    """Key schedule across images."""

    FIXED = "fixed"
    PER_SAMPLE = "per_sample"

    def __str__(self) -> str:
        """Return enum string."""
        return self.value


###############################################################################
# Class: Padding
###############################################################################


class Padding(Enum):
    """Padding policy."""

    NONE = "none"

    def __str__(self) -> str:
        """Return enum string."""
        return self.value


def parse_key(text: str) -> bytes:
    """Parse a key or IV given as ASCII text or ``hex:`` prefixed digits."""
    if text.startswith("hex:"):
        try:
            return bytes.fromhex(text[4:])
        except ValueError as e:
            raise ConfigError(f"invalid hex key '{text}': {e}") from e
    try:
        return text.encode("ascii")
    except UnicodeEncodeError as e:
        raise ConfigError(f"key must be ASCII or hex: {e}") from e


###############################################################################
# Class: CipherConfig
###############################################################################


@dataclass(frozen=True)
class CipherConfig:
    """Cipher configuration."""

    key: bytes = DEFAULT_KEY
    iv: bytes = DEFAULT_IV
    mode: CipherMode = CipherMode.FIXED
    seed: int = DEFAULT_CIPHER_SEED
    padding: Padding = Padding.NONE

    def __post_init__(self) -> None:
        """Validate key material."""
        if len(self.key) != BLOCK_SIZE:
            raise ConfigError(
                f"key must be {BLOCK_SIZE} bytes, got {len(self.key)}"
            )
        if len(self.iv) != BLOCK_SIZE:
            raise ConfigError(
                f"iv must be {BLOCK_SIZE} bytes, got {len(self.iv)}"
            )

    @property
    def provenance(self) -> Provenance:
        """Get provenance of sets encrypted with this configuration."""
        if self.mode is CipherMode.PER_SAMPLE:
            return Provenance.ENCRYPTED_PER_SAMPLE
        return Provenance.ENCRYPTED_FIXED


def _check_lengths(data: bytes, key: bytes, iv: bytes) -> None:
    """Check block alignment and key material sizes."""
    if len(key) != BLOCK_SIZE or len(iv) != BLOCK_SIZE:
        raise ConfigError(f"key and iv must be {BLOCK_SIZE} bytes")
    if not data or len(data) % BLOCK_SIZE:
        raise PaddingError(
            f"data length {len(data)} is not a positive multiple of "
            f"{BLOCK_SIZE} (padding=none)"
        )


def aes128_cbc_encrypt(plaintext: bytes, key: bytes, iv: bytes) -> bytes:
    """Encrypt with AES-128 in CBC mode, no padding."""
    plaintext = bytes(plaintext)
    _check_lengths(plaintext, key, iv)
    return AES.new(key, AES.MODE_CBC, iv=iv).encrypt(plaintext)


def aes128_cbc_decrypt(ciphertext: bytes, key: bytes, iv: bytes) -> bytes:
    """Decrypt AES-128-CBC data produced by :func:`aes128_cbc_encrypt`."""
    ciphertext = bytes(ciphertext)
    _check_lengths(ciphertext, key, iv)
    return AES.new(key, AES.MODE_CBC, iv=iv).decrypt(ciphertext)


###############################################################################
# Class: CipherCommon
###############################################################################


class CipherCommon(ABC):
    """Cipher common interface."""

    def __init__(self, cfg: CipherConfig):
        """Initialize common cipher."""
        self._cfg = cfg

    @property
    def config(self) -> CipherConfig:
        """Get cipher configuration."""
        return self._cfg

    @property
    @abstractmethod
    def name(self) -> str:
        """Get cipher name."""

    @abstractmethod
    def key_iv(self, index: int) -> Tuple[bytes, bytes]:
        """Get key and IV used for the image at a given index."""

    def encrypt_image(self, image: np.ndarray, index: int = 0) -> np.ndarray:
        """Encrypt one image."""
        key, iv = self.key_iv(index)
        ct = aes128_cbc_encrypt(np.asarray(image, np.uint8), key, iv)
        return np.frombuffer(ct, dtype=np.uint8)

    def decrypt_image(self, image: np.ndarray, index: int = 0) -> np.ndarray:
        """Decrypt one image."""
        key, iv = self.key_iv(index)
        pt = aes128_cbc_decrypt(np.asarray(image, np.uint8), key, iv)
        return np.frombuffer(pt, dtype=np.uint8)

    def encrypt_dataset(self, data: ImageSet, start: int = 0) -> ImageSet:
        """Encrypt all images of a plaintext set; labels stay plaintext.

        Image ``i`` is encrypted as global index ``start + i``. Partitions
        of one corpus must use disjoint index ranges so that per-sample
        keys are never shared between them.
        """
        if start < 0:
            raise PreconditionError(f"start index must be >= 0, got {start}")
        if data.provenance.encrypted:
            raise PreconditionError(
                f"set is already encrypted ({data.provenance})"
            )

        out = np.empty_like(data.images)
        for i, image in enumerate(data.images):
            out[i] = self.encrypt_image(image, start + i)

        logger.info(f"{self.name}: encrypted {data.count} images")
        return ImageSet(out, data.labels, self._cfg.provenance)
