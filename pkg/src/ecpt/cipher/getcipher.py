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

"""Get cipher from configuration."""

from ecpt.dataset import ImageSet

from .common import CipherCommon, CipherConfig, CipherMode
from .fixed import CipherFixed
from .persample import CipherPerSample

###############################################################################
# Function: get_cipher
###############################################################################


def get_cipher(cfg: CipherConfig) -> CipherCommon:
    """Get cipher for a given configuration."""
    cipher: CipherCommon

    if cfg.mode is CipherMode.FIXED:
        cipher = CipherFixed(cfg)
    elif cfg.mode is CipherMode.PER_SAMPLE:
        cipher = CipherPerSample(cfg)
    else:
        raise ValueError("unsupported cipher mode")

    return cipher


def encrypt_dataset(
    data: ImageSet, cfg: CipherConfig, start: int = 0
) -> ImageSet:
    """Encrypt a plaintext set according to a configuration."""
    return get_cipher(cfg).encrypt_dataset(data, start)
