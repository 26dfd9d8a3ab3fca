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

"""The ECPT logging module."""

import logging

import click

LOG_FORMAT = "%(levelname)s: %(message)s"

logger = logging.getLogger("ecpt")

logger.propagate = True
logger.handlers = []


class ClickHandler(logging.Handler):
    """Write log records to stderr through ``click.echo``."""

    def emit(self, record: logging.LogRecord) -> None:
        """Emit log record."""
        try:
            click.echo(self.format(record), err=True)
        except Exception:  # pragma: no cover
            self.handleError(record)


def setup_logging(debug: bool = False) -> None:
    """Attach the console handler once and set the log level."""
    if not any(isinstance(h, ClickHandler) for h in logger.handlers):
        handler = ClickHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)

    logger.setLevel(logging.DEBUG if debug else logging.INFO)
