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

import os
import shutil

import pytest  # type: ignore
import yaml
from click.testing import CliRunner

from ecpt.cipher.common import aes128_cbc_encrypt
from ecpt.cli.main import main

SMALL_CONFIG = {
    "train": {
        "hidden": [32],
        "arch": "small",
        "epochs": 3,
        "batch_size": 16,
        "learning_rate": 0.1,
    },
    "viz": {"samples": 60, "iterations": 60, "perplexity": 5.0},
    "validate": {"trials": 200},
}


@pytest.fixture
def runner(mocker):
    return CliRunner()


@pytest.fixture
def runenv(tmp_path, mnist_dir):
    confpath = tmp_path / "config.yaml"
    with open(confpath, "w") as f:
        yaml.safe_dump(SMALL_CONFIG, f)
    resdir = str(tmp_path / "result")
    args = [
        f"--confpath={confpath}",
        f"--datadir={mnist_dir}",
        f"--resdir={resdir}",
    ]
    return args, resdir


def test_main(runner):
    result = runner.invoke(main)
    assert result.exit_code == 2

    args = ["--help"]
    result = runner.invoke(main, args)
    assert result.exit_code == 0

    for cmd in (
        "encrypt",
        "train",
        "conformal",
        "viz",
        "validate",
        "reproduce-paper",
    ):
        result = runner.invoke(main, [cmd, "--help"])
        assert result.exit_code == 0

    result = runner.invoke(main, ["decrypt"])
    assert result.exit_code == 2


def test_main_encrypt(runner, runenv):
    args, resdir = runenv

    result = runner.invoke(main, ["encrypt", *args])
    assert result.exit_code == 0
    assert os.path.exists(os.path.join(resdir, "fixed_test.ecis"))

    result = runner.invoke(
        main, ["--verbose", "encrypt", "--mode=per-sample", *args]
    )
    assert result.exit_code == 0
    assert "cipher.mode=per_sample" in result.output
    assert os.path.exists(os.path.join(resdir, "per_sample_train.ecis"))

    result = runner.invoke(
        main, ["encrypt", "--key=hex:00112233445566778899aabbccddeeff", *args]
    )
    assert result.exit_code == 0

    # wrong key length
    result = runner.invoke(main, ["encrypt", "--key=short", *args])
    assert result.exit_code == 3

    result = runner.invoke(main, ["encrypt", "--mode=plaintext", *args])
    assert result.exit_code == 2


def test_main_errors(runner, runenv, tmp_path):
    args, resdir = runenv

    # missing data
    result = runner.invoke(
        main,
        ["encrypt", f"--datadir={tmp_path / 'nothing'}", f"--resdir={resdir}"],
    )
    assert result.exit_code == 4

    # explicit config path must exist
    result = runner.invoke(
        main, ["encrypt", f"--confpath={tmp_path / 'missing.yaml'}"]
    )
    assert result.exit_code == 3

    # no model trained yet
    result = runner.invoke(main, ["conformal", *args])
    assert result.exit_code == 6


def test_main_train_conformal_viz(runner, runenv):
    args, resdir = runenv

    result = runner.invoke(main, ["train", "--data=plaintext", *args])
    assert result.exit_code == 0
    assert "plaintext: test accuracy" in result.output
    model = os.path.join(resdir, "model_plaintext.ecml")
    assert os.path.exists(model)

    result = runner.invoke(
        main, ["train", "--repeats=2", "--epochs=2", "--hidden=16", *args]
    )
    assert result.exit_code == 0
    assert "over 2 run(s)" in result.output

    result = runner.invoke(main, ["conformal", "--summary", *args])
    assert result.exit_code == 0
    assert "p_value" in result.output
    assert "e_value" in result.output
    assert os.path.exists(os.path.join(resdir, "conformal_fixed.manifest"))

    result = runner.invoke(
        main,
        [
            "conformal",
            "--data=plaintext",
            "--rule=p",
            "--epsilon=0.1",
            f"--model={model}",
            *args,
        ],
    )
    assert result.exit_code == 0

    result = runner.invoke(main, ["viz", "--figure=calibration", *args])
    assert result.exit_code == 0

    result = runner.invoke(
        main, ["viz", "--figure=digit", "--index=5", "--regime=fixed", *args]
    )
    assert result.exit_code == 0
    assert os.path.exists(os.path.join(resdir, "digit_5_pair.pgm"))

    result = runner.invoke(
        main, ["viz", "--figure=tsne", "--regime=plaintext", *args]
    )
    assert result.exit_code == 0
    assert os.path.exists(os.path.join(resdir, "tsne_plaintext.csv"))

    result = runner.invoke(
        main, ["viz", "--figure=digit", "--index=100", *args]
    )
    assert result.exit_code == 6


def test_main_manifest_as_config(runner, runenv):
    args, resdir = runenv

    result = runner.invoke(main, ["train", "--data=plaintext", *args])
    assert result.exit_code == 0

    manifest = os.path.join(resdir, "train_plaintext.manifest")
    result = runner.invoke(
        main, ["--verbose", "train", f"--confpath={manifest}"]
    )
    assert result.exit_code == 0
    assert "train.arch=small" in result.output
    assert "data.regime=plaintext" in result.output


def test_main_resume_in_manifest(runner, runenv, tmp_path):
    args, resdir = runenv

    result = runner.invoke(main, ["train", "--data=plaintext", *args])
    assert result.exit_code == 0
    stored = str(tmp_path / "start.ecml")
    shutil.copyfile(os.path.join(resdir, "model_plaintext.ecml"), stored)

    result = runner.invoke(
        main,
        ["train", "--data=plaintext", "--epochs=1", f"--resume={stored}"]
        + args,
    )
    assert result.exit_code == 0

    manifest = os.path.join(resdir, "train_plaintext.manifest")
    with open(manifest) as f:
        assert f"train.resume={stored}\n" in f.read()

    result = runner.invoke(
        main, ["--verbose", "train", f"--confpath={manifest}"]
    )
    assert result.exit_code == 0
    assert f"train.resume={stored}" in result.output


def test_main_validate(runner, runenv, mocker):
    args, resdir = runenv

    result = runner.invoke(main, ["validate", "--trials=200", *args])
    assert result.exit_code == 0
    assert os.path.exists(os.path.join(resdir, "validate.manifest"))

    result = runner.invoke(main, ["validate", "--trials=0", *args])
    assert result.exit_code != 0

    def broken(plaintext, key, iv):
        return bytes(len(plaintext))

    mocker.patch("ecpt.validate.aes128_cbc_encrypt", broken)
    result = runner.invoke(main, ["validate", "--trials=20", *args])
    assert result.exit_code == 1

    mocker.patch(
        "ecpt.validate.aes128_cbc_encrypt",
        lambda p, k, i: aes128_cbc_encrypt(p, k, i),
    )
    result = runner.invoke(main, ["validate", "--trials=20", *args])
    assert result.exit_code == 0
