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

"""Module containing ECPT conformal command."""

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
# Command: cmd_conformal
###############################################################################


@click.command(name="conformal")
@click.option(
    "--data",
    type=REGIME_CHOICE,
    default=None,
    help="Data regime of the model and test set. Default: fixed",
)
@click.option(
    "--rule",
    type=click.Choice(["p", "e", "both"]),
    default=None,
    help="Prediction set rule. Default: both",
)
@click.option("--epsilon", type=float, default=None, help="Default: 0.4")
@click.option("--alpha", type=float, default=None, help="Default: 0.4")
@click.option(
    "--split-seed",
    type=int,
    default=None,
    help="Seed of the calibration/test split. Default: 2024",
)
@click.option(
    "--summary/--no-summary",
    default=None,
    help="Skip per-example records in the reports.",
)
@click.option(
    "--model",
    type=click.Path(resolve_path=False),
    default=None,
    help="Model file. Default: <resdir>/model_<data>.ecml",
)
@cli_cipher_options
@cli_runenv_options
@pass_environment
def cmd_conformal(
    ctx: Environment,
    confpath: str,
    data: str,
    **kwargs,
) -> bool:
    """Build conformal prediction sets and coverage reports."""
    overrides = {
        "data.regime": norm_choice(data),
        "conformal.rule": kwargs.pop("rule"),
        "conformal.epsilon": kwargs.pop("epsilon"),
        "conformal.alpha": kwargs.pop("alpha"),
        "conformal.split_seed": kwargs.pop("split_seed"),
        "conformal.summary": kwargs.pop("summary"),
        "conformal.model": kwargs.pop("model"),
    }
    set_runenv(ctx, "conformal", confpath, overrides, **kwargs)

    return True
