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

"""Module containing ECPT train command."""

import click

from ecpt.cli.clitypes import (
    REGIME_CHOICE,
    cli_cipher_options,
    cli_runenv_options,
    norm_choice,
    set_runenv,
)
from ecpt.cli.environment import Environment, pass_environment

###############################################################################
# Command: cmd_train
###############################################################################


@click.command(name="train")
@click.option(
    "--data",
    type=REGIME_CHOICE,
    default=None,
    help="Data regime to train on. Default: fixed",
)
@click.option("--epochs", type=int, default=None, help="Default: 32")
@click.option("--batch-size", type=int, default=None, help="Default: 64")
@click.option("--lr", type=float, default=None, help="Default: 0.01")
@click.option(
    "--optimizer",
    type=click.Choice(["sgd", "sgd_momentum"]),
    default=None,
    help="Default: sgd",
)
@click.option(
    "--hidden",
    default=None,
    help="Hidden layer widths, comma separated. Default: 512,256",
)
@click.option("--seed", type=int, default=None, help="Default: 2024")
@click.option(
    "--repeats",
    type=int,
    default=None,
    help="Train N models with seeds seed..seed+N-1 and report mean/std.",
)
@click.option(
    "--resume",
    type=click.Path(resolve_path=False),
    default=None,
    help="Start training from a saved model file.",
)
@cli_cipher_options
@cli_runenv_options
@pass_environment
def cmd_train(
    ctx: Environment,
    confpath: str,
    data: str,
    **kwargs,
) -> bool:
    """Train the classifier and evaluate test accuracy."""
    overrides = {
        "data.regime": norm_choice(data),
        "train.epochs": kwargs.pop("epochs"),
        "train.batch_size": kwargs.pop("batch_size"),
        "train.learning_rate": kwargs.pop("lr"),
        "train.optimizer": kwargs.pop("optimizer"),
        "train.hidden": kwargs.pop("hidden"),
        "train.seed": kwargs.pop("seed"),
        "train.repeats": kwargs.pop("repeats"),
        "train.resume": kwargs.pop("resume"),
    }
    set_runenv(ctx, "train", confpath, overrides, **kwargs)

    return True
