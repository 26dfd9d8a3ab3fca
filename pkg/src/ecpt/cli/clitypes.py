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

"""Module containing the Click types."""

from typing import Any, Dict, Optional

import click
from click.core import ParameterSource

from ecpt.cli.environment import Environment

REGIME_CHOICE = click.Choice(
    ["plaintext", "fixed", "per_sample", "per-sample"]
)
MODE_CHOICE = click.Choice(["fixed", "per_sample", "per-sample"])


def norm_choice(value: Optional[str]) -> Optional[str]:
    """Accept dashed spelling of choice values."""
    return value.replace("-", "_") if value else value


############################################################################
# Decorator: runenv_options
############################################################################


# common run env options
_runenv_options = (
    click.option(
        "--confpath",
        type=click.Path(resolve_path=False),
        default="./external/config.yaml",
        help="Path to run configuration file (YAML or key=value, a run "
        "manifest works too). Can be also set with environment "
        "variable ECPT_CONFPATH. Default: ./external/config.yaml",
        envvar="ECPT_CONFPATH",
    ),
    click.option(
        "--datadir",
        type=click.Path(resolve_path=False),
        default=None,
        help="Directory with MNIST IDX files. Default: ./external/mnist",
    ),
    click.option(
        "--resdir",
        type=click.Path(resolve_path=False),
        default=None,
        help="Where to store the results. Default: ./result",
    ),
)


def cli_runenv_options(fn: Any) -> Any:
    """Decorate command with common run env options decorator."""
    for decorator in reversed(_runenv_options):
        fn = decorator(fn)
    return fn


############################################################################
# Decorator: cipher_options
############################################################################


_cipher_options = (
    click.option(
        "--key",
        default=None,
        help="AES-128 key, 16 ASCII characters or 'hex:' and 32 digits.",
    ),
    click.option(
        "--iv",
        default=None,
        help="CBC initialization vector, same format as --key.",
    ),
)


def cli_cipher_options(fn: Any) -> Any:
    """Decorate command with cipher key options decorator."""
    for decorator in reversed(_cipher_options):
        fn = decorator(fn)
    return fn


############################################################################
# Function: set_runenv
############################################################################


def set_runenv(
    ctx: Environment,
    command: str,
    confpath: str,
    overrides: Dict[str, Any],
    **kwargs: Any,
) -> None:
    """Store parsed command in environment."""
    source = click.get_current_context().get_parameter_source("confpath")

    ctx.command = command
    ctx.confpath = confpath
    ctx.confrequired = source is not ParameterSource.DEFAULT
    ctx.overrides = {
        "data.dir": kwargs.get("datadir"),
        "output.dir": kwargs.get("resdir"),
        "cipher.key": kwargs.get("key"),
        "cipher.iv": kwargs.get("iv"),
        **overrides,
    }
