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

"""Module containing ECPT validate command."""

import click

from ecpt.cli.clitypes import cli_runenv_options, set_runenv
from ecpt.cli.environment import Environment, pass_environment

###############################################################################
# Command: cmd_validate
###############################################################################


@click.command(name="validate")
@click.option(
    "--trials",
    type=int,
    default=None,
    help="Monte Carlo trials and CBC round trips per check. Default: 10000",
)
@click.option("--seed", type=int, default=None, help="Default: 2024")
@cli_runenv_options
@pass_environment
def cmd_validate(
    ctx: Environment,
    confpath: str,
    trials: int,
    seed: int,
    **kwargs,
) -> bool:
    """Run cipher, gradient and coverage property suites."""
    overrides = {"validate.trials": trials, "validate.seed": seed}
    set_runenv(ctx, "validate", confpath, overrides, **kwargs)

    return True
