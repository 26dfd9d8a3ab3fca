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

"""Module containing ECPT reproduce-paper command."""

import click

from ecpt.cli.clitypes import (
    cli_cipher_options,
    cli_runenv_options,
    set_runenv,
)
from ecpt.cli.environment import Environment, pass_environment

###############################################################################
# Command: cmd_reproduce
###############################################################################


@click.command(name="reproduce-paper")
@cli_cipher_options
@cli_runenv_options
@pass_environment
def cmd_reproduce(ctx: Environment, confpath: str, **kwargs) -> bool:
    """Run the whole experiment and compare with published numbers.

    Encrypts, embeds, trains on all three data regimes, builds prediction
    sets on the fixed-key model and writes reproduce_summary.txt.
    """
    set_runenv(ctx, "reproduce", confpath, {}, **kwargs)

    return True
