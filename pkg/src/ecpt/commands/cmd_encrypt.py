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

"""Module containing ECPT encrypt command."""

import click

from ecpt.cli.clitypes import (
    MODE_CHOICE,
    cli_cipher_options,
    cli_runenv_options,
    norm_choice,
    set_runenv,
)
from ecpt.cli.environment import Environment, pass_environment

###############################################################################
# Command: cmd_encrypt
###############################################################################


@click.command(name="encrypt")
@click.option(
    "--mode",
    type=MODE_CHOICE,
    default=None,
    help="Key schedule: one fixed key for all images, or a key derived "
    "per image. Default: fixed",
)
@click.option(
    "--seed",
    type=int,
    default=None,
    help="Seed of per-sample key derivation. Default: 2024",
)
@cli_cipher_options
@cli_runenv_options
@pass_environment
def cmd_encrypt(
    ctx: Environment,
    confpath: str,
    mode: str,
    seed: int,
    **kwargs,
) -> bool:
    """Encrypt MNIST train and test sets."""
    overrides = {"cipher.mode": norm_choice(mode), "cipher.seed": seed}
    set_runenv(ctx, "encrypt", confpath, overrides, **kwargs)

    return True
