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

import pytest
import yaml

from ecpt.cipher.common import CipherMode
from ecpt.conformal import Rule
from ecpt.envconfig import DEFAULTS, EnvConfig
from ecpt.errors import ConfigError
from ecpt.mlp import Optimizer


def test_envconfig_defaults(tmp_path):
    conf = EnvConfig()
    assert conf.config == DEFAULTS
    assert conf["train.epochs"] == 32
    assert conf["train.hidden"] == (512, 256)
    assert conf.get("xxx") is None
    assert conf.get("xxx", 1) == 1

    cipher = conf.cipher_config()
    assert cipher.key == b"abs2kas126oZbdXs"
    assert cipher.iv == b"1nsdjah72MdnJ12a"
    assert cipher.mode is CipherMode.FIXED
    assert conf.cipher_config("per_sample").mode is CipherMode.PER_SAMPLE

    assert conf.architecture().dims == (784, 512, 256, 10)
    assert conf.architecture().arch_id == "ref-v1"

    train = conf.train_config()
    assert train.batch_size == 64
    assert train.learning_rate == 0.01
    assert train.optimizer is Optimizer.SGD
    assert train.seed == 2024
    assert conf.train_config(seed=5).seed == 5

    assert conf.rules() == [Rule.p_value(0.4), Rule.e_value(0.4)]

    # missing file at a default location means defaults
    assert EnvConfig(str(tmp_path / "none.yaml")).config == DEFAULTS

    with pytest.raises(TypeError):
        EnvConfig(1)


def test_envconfig_yaml(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(
        yaml.safe_dump(
            {
                "train": {"epochs": 3, "hidden": [64, 32], "shuffle": "no"},
                "conformal": {"rule": "p", "epsilon": 0.2},
                "cipher": {"key": "hex:" + "00" * 16},
            }
        )
    )
    conf = EnvConfig(str(path), required=True)
    assert conf["train.epochs"] == 3
    assert conf["train.hidden"] == (64, 32)
    assert conf["train.shuffle"] is False
    assert conf.rules() == [Rule.p_value(0.2)]
    assert conf.cipher_config().key == bytes(16)

    # flags beat the file, None means "not given"
    conf = EnvConfig(
        str(path), {"train.epochs": 7, "train.seed": None}, required=True
    )
    assert conf["train.epochs"] == 7
    assert conf["train.seed"] == 2024

    path.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        EnvConfig(str(path))


def test_envconfig_kv(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text(
        "# comment\n"
        "\n"
        "train.hidden=128\n"
        "train.optimizer = sgd_momentum\n"
        "viz.perplexity=12\n"
        "result.p_value.coverage=0.5\n"
    )
    conf = EnvConfig(str(path))
    assert conf["train.hidden"] == (128,)
    assert conf["viz.perplexity"] == 12.0
    assert conf.train_config().optimizer is Optimizer.SGD_MOMENTUM
    assert conf.get("result.p_value.coverage") is None

    path.write_text("train.hidden\n")
    with pytest.raises(ConfigError):
        EnvConfig(str(path))


def test_envconfig_errors(tmp_path):
    with pytest.raises(ConfigError):
        EnvConfig(str(tmp_path / "missing.yaml"), required=True)
    with pytest.raises(ConfigError):
        EnvConfig({"train": {"epochz": 3}})
    with pytest.raises(ConfigError):
        EnvConfig({"train": {"epochs": "many"}})
    with pytest.raises(ConfigError):
        EnvConfig({"train": {"shuffle": "maybe"}})
    with pytest.raises(ConfigError):
        EnvConfig({"conformal": {"rule": "q"}})
    with pytest.raises(ConfigError):
        EnvConfig({"cipher": {"mode": "ecb"}})
    with pytest.raises(ConfigError):
        EnvConfig({"cipher": {"key": "short"}}).cipher_config()


def test_envconfig_dump_roundtrip(tmp_path):
    conf = EnvConfig({"train": {"hidden": [10, 20]}, "data": {"dir": "x"}})
    text = conf.dump()
    assert "train.hidden=10,20\n" in text
    assert "train.shuffle=true\n" in text
    assert text.splitlines() == sorted(text.splitlines())

    path = tmp_path / "dump.conf"
    path.write_text(text)
    assert EnvConfig(str(path)).config == conf.config

    derived = conf.derive({"data.regime": "plaintext"})
    assert derived["data.regime"] == "plaintext"
    assert derived["train.hidden"] == (10, 20)
    assert conf["data.regime"] == "fixed"


def test_envconfig_shipped_files():
    # documented defaults match the built-in ones
    doc = EnvConfig("./docs/config.yaml", required=True)
    assert doc.config == DEFAULTS

    ref = EnvConfig("./config/reference.yaml", required=True)
    assert ref["train.hidden"] == (512, 256)
    assert ref["output.dir"] == "./result/reference"

    smoke = EnvConfig("./config/smoke.yaml", required=True)
    assert smoke.architecture().dims == (784, 64, 10)
    assert smoke["data.dir"] == DEFAULTS["data.dir"]
