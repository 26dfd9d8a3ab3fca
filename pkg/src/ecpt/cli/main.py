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

"""Module containing the CLI logic for ECPT."""

import sys

import click

from ecpt.cli.environment import Environment, pass_environment
from ecpt.errors import EcptError, ExitCode
from ecpt.evaluation import render_table
from ecpt.logger import logger, setup_logging
from ecpt.pipeline import Pipeline
from ecpt.plugins_loader import commands_list

###############################################################################
# Function: main
###############################################################################


@click.group()
@click.option(
    "--debug/--no-debug",
    default=False,
    is_flag=True,
)
@click.option(
    "--verbose/--no-verbose",
    default=False,
    is_flag=True,
)
@pass_environment
def main(ctx: Environment, debug: bool, verbose: bool) -> bool:
    """ECPT - Encrypted Conformal Prediction Toolkit."""
    ctx.debug = debug
    ctx.verbose = verbose

    setup_logging(debug)

    # handle work after all commands are parsed
    click.get_current_context().call_on_close(cli_on_close)

    # check if --help was called
    if "--help" in sys.argv[1:]:  # pragma: no cover
        ctx.helpnow = True

    return True


def run_command(ctx: Environment) -> None:
    """Run parsed command."""
    cfg = ctx.run_config()
    if ctx.verbose:
        click.echo(cfg.dump(), nl=False)

    pipe = Pipeline(cfg)
    opts = ctx.options

    if ctx.command == "encrypt":
        for path in pipe.encrypt():
            click.echo(path)

    elif ctx.command == "train":
        summary = pipe.train()
        click.echo(
            f"{summary.regime}: test accuracy {summary.test_mean:.4f} "
            f"+/- {summary.test_std:.4f} over "
            f"{len(summary.test_accuracy)} run(s)"
        )

    elif ctx.command == "conformal":
        for report in pipe.conformal().values():
            click.echo(render_table(report))

    elif ctx.command == "viz":
        pipe.viz(
            opts["figure"],
            regime=opts.get("regime", "all"),
            index=opts.get("index", 0),
        )

    elif ctx.command == "validate":
        validator = pipe.validate()
        for res in validator.results:
            click.echo(str(res))

    elif ctx.command == "reproduce":
        for comparison in pipe.reproduce():
            click.echo(str(comparison))

    else:  # pragma: no cover
        raise AssertionError(f"unknown command {ctx.command}")


@pass_environment
def cli_on_close(ctx: Environment) -> bool:
    """Handle all work on Click close."""
    if ctx.helpnow or ctx.command is None:  # pragma: no cover
        # do nothing if help was called
        return True

    try:
        run_command(ctx)
    except EcptError as e:
        logger.error(f"{type(e).__name__}: {e}")
        sys.exit(int(e.exit_code))
    except OSError as e:
        logger.error(f"I/O error: {e}")
        sys.exit(int(ExitCode.IO))

    return True


###############################################################################
# Function: click_final_init
###############################################################################


def click_final_init() -> None:
    """Handle final Click initialization."""
    # add interfaces
    for cmd in commands_list:
        main.add_command(cmd)


# final click initialization
click_final_init()
