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

"""Per-sample key and IV cipher."""

import hashlib
from typing import Tuple

from .common import BLOCK_SIZE, CipherCommon

###############################################################################
# Class: CipherPerSample
###############################################################################


class CipherPerSample(CipherCommon):
    """This class implements encryption with a fresh key and IV per image.

    Key material for global image index ``i`` is ``SHA-256(tag:seed:i)``
    split into key and IV, so any subset of indices can be encrypted
    independently (serially or in parallel) with the same result. Test images
    are indexed after the training images.
    """

    _TAG = b"ecpt-per-sample"

    def key_iv(self, index: int) -> Tuple[bytes, bytes]:
        """Get key and IV derived for the image at a given index."""
        digest = hashlib.sha256(
            b"%s:%d:%d" % (self._TAG, self._cfg.seed, index)
        ).digest()
        return digest[:BLOCK_SIZE], digest[BLOCK_SIZE:]

    @property
    def name(self) -> str:
        """Get cipher name."""
        return "per_sample"
