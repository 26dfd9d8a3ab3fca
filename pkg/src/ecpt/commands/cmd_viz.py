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

"""Module containing ECPT viz command."""

import click

from ecpt.cli.clitypes import (
    REGIME_CHOICE,
    cli_cipher_options,
    cli_runenv_options,
    norm_choice,
    set_runenv,
)
from ecpt.cli.environment import Environment, pass_environment
from ecpt.pipeline import FIGURES

###############################################################################
# Command: cmd_viz
###############################################################################


@click.command(name="viz")
@click.option(
    "--figure",
    type=click.Choice(FIGURES),
    required=True,
    help="t-SNE embeddings, digit/ciphertext rasters or calibration CSVs.",
)
@click.option(
    "--regime",
    type=click.Choice(["all", *REGIME_CHOICE.choices]),
    default="all",
    help="Data regime to draw. Default: all",
)
@click.option(
    "--data",
    type=REGIME_CHOICE,
    default=None,
    help="Default data regime. Default: fixed",
)
@click.option("--index", type=int, default=0, help="Digit index. Default: 0")
@click.option("--perplexity", type=float, default=None, help="Default: 30")
@click.option("--iterations", type=int, default=None, help="Default: 1000")
@click.option(
    "--samples",
    type=int,
    default=None,
    help="Number of leading training images to embed. Default: 10000",
)
@click.option("--seed", type=int, default=None, help="Default: 2024")
@click.option(
    "--model",
    type=click.Path(resolve_path=False),
    default=None,
    help="Model file for calibration figures.",
)
@cli_cipher_options
@cli_runenv_options
@pass_environment
def cmd_viz(
    ctx: Environment,
    confpath: str,
    figure: str,
    regime: str,
    data: str,
    index: int,
    **kwargs,
) -> bool:
    """Write figure artifacts (CSV and PGM)."""
    overrides = {
        "data.regime": norm_choice(data),
        "viz.perplexity": kwargs.pop("perplexity"),
        "viz.iterations": kwargs.pop("iterations"),
        "viz.samples": kwargs.pop("samples"),
        "viz.seed": kwargs.pop("seed"),
        "conformal.model": kwargs.pop("model"),
    }
    set_runenv(ctx, "viz", confpath, overrides, **kwargs)
    ctx.options = {
        "figure": figure,
        "regime": norm_choice(regime),
        "index": index,
    }

    return True
