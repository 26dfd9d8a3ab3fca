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

"""Run manifests."""

import hashlib
import os
from datetime import datetime, timezone
from typing import Any, Dict, List, Tuple

from ecpt import __version__
from ecpt.envconfig import EnvConfig
from ecpt.logger import logger


def file_sha256(path: str) -> str:
    """Return SHA-256 digest of a file."""
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class RunManifest:
    """Resolved configuration plus results of one command.

    The file is a valid ``key=value`` config: results use ``result.*`` keys
    and the creation time is a comment, so it is left out of :meth:`digest`.
    """

    def __init__(self, command: str, config: EnvConfig) -> None:
        """Initialize run manifest."""
        self._command = command
        self._config = config
        self._results: List[Tuple[str, str]] = [
            ("result.version", __version__)
        ]

    def add(self, key: str, value: Any) -> None:
        """Add result entry."""
        self._results.append((f"result.{key}", str(value)))

    def update(self, values: Dict[str, Any]) -> None:
        """Add several result entries (keys may carry the prefix)."""
        for key, value in values.items():
            self.add(key.removeprefix("result."), value)

    def add_file(self, key: str, path: str) -> str:
        """Add fingerprint of an output file."""
        digest = file_sha256(path)
        self.add(f"{key}.sha256", digest)
        return digest

    def body(self) -> str:
        """Return reproducible manifest body."""
        results = "".join(f"{k}={v}\n" for k, v in self._results)
        return (
            f"# ecpt {self._command} manifest\n"
            + self._config.dump()
            + results
        )

    def digest(self) -> str:
        """Return SHA-256 of the manifest body."""
        return hashlib.sha256(self.body().encode()).hexdigest()

    def write(self, outdir: str) -> str:
        """Write ``<command>.manifest`` into a directory."""
        os.makedirs(outdir, exist_ok=True)
        path = os.path.join(outdir, f"{self._command}.manifest")
        created = datetime.now(timezone.utc).isoformat(timespec="seconds")
        with open(path, "w", encoding="UTF8") as f:
            f.write(f"# created {created}\n")
            f.write(self.body())
        logger.info(f"manifest written to {path}")
        return path
