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

"""IDX file parser.

IDX is the container of the MNIST distribution: a big-endian header
(magic number and one 32-bit size per dimension) followed by raw data.
Files may be gzip-compressed.
"""

import gzip
import os
import struct
from typing import Tuple

import numpy as np

from ecpt.errors import IdxFormatError, TruncatedFileError

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801

_GZIP_MAGIC = b"\x1f\x8b"
_UBYTE_TYPE = 0x08


class IdxParser:
    """IDX file parser for unsigned byte tensors."""

    def __init__(self, idx_path: str):
        """Initialize IDX file parser."""
        if not os.path.exists(idx_path):
            raise FileNotFoundError(f"IDX file not found: {idx_path}")

        self.idx_path = idx_path
        self._raw = self._read(idx_path)
        self._magic, self._dims = self._parse_header()
        self._check_size()

    @staticmethod
    def _read(path: str) -> bytes:
        """Read file, decompressing gzip transparently."""
        with open(path, "rb") as f:
            raw = f.read()
        if raw[:2] == _GZIP_MAGIC:
            try:
                raw = gzip.decompress(raw)
            except EOFError as e:
                raise TruncatedFileError(f"{path}: {e}") from e
        return raw

    def _parse_header(self) -> Tuple[int, Tuple[int, ...]]:
        """Parse magic number and dimension sizes."""
        if len(self._raw) < 4:
            raise TruncatedFileError(f"{self.idx_path}: missing IDX header")

        (magic,) = struct.unpack(">I", self._raw[:4])
        if magic >> 16 != 0 or (magic >> 8) & 0xFF != _UBYTE_TYPE:
            raise IdxFormatError(
                f"{self.idx_path}: bad magic number 0x{magic:08x}"
            )

        ndim = magic & 0xFF
        if ndim == 0:
            raise IdxFormatError(f"{self.idx_path}: zero dimensions")

        end = 4 + 4 * ndim
        if len(self._raw) < end:
            raise TruncatedFileError(f"{self.idx_path}: truncated header")

        dims = struct.unpack(f">{ndim}I", self._raw[4:end])
        return magic, dims

    def _check_size(self) -> None:
        """Check data section length against the header."""
        expected = int(np.prod(self._dims, dtype=np.int64))
        actual = len(self._raw) - self.header_size
        if actual < expected:
            raise TruncatedFileError(
                f"{self.idx_path}: expected {expected} data bytes, "
                f"got {actual}"
            )
        if actual > expected:
            raise IdxFormatError(
                f"{self.idx_path}: {actual - expected} trailing bytes"
            )

    @property
    def magic(self) -> int:
        """Get magic number."""
        return self._magic

    @property
    def dims(self) -> Tuple[int, ...]:
        """Get dimension sizes."""
        return self._dims

    @property
    def count(self) -> int:
        """Get number of items (first dimension)."""
        return self._dims[0]

    @property
    def header_size(self) -> int:
        """Get header length in bytes."""
        return 4 + 4 * len(self._dims)

    @property
    def data(self) -> bytes:
        """Get raw data section."""
        return self._raw[self.header_size :]

    def array(self) -> np.ndarray:
        """Get data as ``(count, item_size)`` unsigned byte array."""
        arr = np.frombuffer(self.data, dtype=np.uint8)
        return arr.reshape(self.count, -1)


def write_idx(path: str, data: np.ndarray) -> None:
    """Write unsigned byte array as IDX file, gzip if path ends in .gz."""
    data = np.ascontiguousarray(data, dtype=np.uint8)
    magic = (_UBYTE_TYPE << 8) | data.ndim
    header = struct.pack(f">I{data.ndim}I", magic, *data.shape)
    raw = header + data.tobytes()

    if path.endswith(".gz"):
        # mtime fixed so identical data gives identical files
        raw = gzip.compress(raw, mtime=0)

    with open(path, "wb") as f:
        f.write(raw)
