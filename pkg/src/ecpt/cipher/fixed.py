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

"""Fixed key and IV cipher."""

from typing import Tuple

from .common import CipherCommon

###############################################################################
# Class: CipherFixed
###############################################################################


class CipherFixed(CipherCommon):
    """This class implements deterministic encryption with one key and IV."""

    def key_iv(self, index: int) -> Tuple[bytes, bytes]:
        """Get key and IV (the same for every image)."""
        return self._cfg.key, self._cfg.iv

    @property
    def name(self) -> str:
        """Get cipher name."""
        return "fixed"
