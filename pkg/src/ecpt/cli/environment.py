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

"""Module containing the Click environment."""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import click

from ecpt.envconfig import EnvConfig
from ecpt.errors import ConfigError

###############################################################################
# Class: DEnvironmentData
###############################################################################


@dataclass
class DEnvironmentData:
    """Environment data."""

    helpnow: bool = False
    debug: bool = False
    verbose: bool = False
    command: Optional[str] = None
    confpath: Optional[str] = None
    confrequired: bool = False
    overrides: Dict[str, Any] = field(default_factory=dict)
    options: Dict[str, Any] = field(default_factory=dict)


###############################################################################
# Class: Environment
###############################################################################


class Environment(DEnvironmentData):
    """A class with application environment."""

    def __init__(self) -> None:
        """Initialize environment."""
        super().__init__()

    def run_config(self) -> EnvConfig:
        """Resolve run configuration of the parsed command."""
        if self.command is None:
            raise ConfigError("no command parsed")
        return EnvConfig(
            self.confpath, self.overrides, required=self.confrequired
        )


###############################################################################
# Decorator: pass_environment
###############################################################################


# custom environment decorator
pass_environment = click.make_pass_decorator(Environment, ensure=True)
