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

import ecpt
import ecpt.ext_commands
import ecpt.plugins_loader


def test_extplugins():
    assert ecpt.__version__

    assert isinstance(ecpt.ext_commands.commands_list, list)

    names = {cmd.name for cmd in ecpt.plugins_loader.commands_list}
    assert names == {
        "encrypt",
        "train",
        "conformal",
        "viz",
        "validate",
        "reproduce-paper",
    }


def test_extplugins_duplicates(mocker):
    mocker.patch.object(ecpt.plugins_loader, "commands_list", [])
    ecpt.plugins_loader.add_commands(ecpt.ext_commands.commands_list)
    ecpt.plugins_loader.add_commands(ecpt.ext_commands.commands_list[:2])
    assert len(ecpt.plugins_loader.commands_list) == 6
