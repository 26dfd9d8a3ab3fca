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

import numpy as np
import pytest

from ecpt.errors import IdxFormatError, TruncatedFileError
from ecpt.lib.model.model_io import load_model, save_model
from ecpt.mlp import Architecture, forward, init_model


def test_model_io(tmp_path):
    model = init_model(Architecture("net-a", (784, 32, 16, 10)), seed=5)
    path = str(tmp_path / "models" / "m.ecml")
    save_model(path, model)

    loaded = load_model(path)
    assert loaded.arch_id == "net-a"
    assert loaded.train_seed == 5
    assert loaded.dims == (784, 32, 16, 10)
    for a, b in zip(model.layers, loaded.layers):
        assert a.activation is b.activation
        assert np.array_equal(a.weight, b.weight)
        assert np.array_equal(a.bias, b.bias)

    x = np.random.default_rng(0).uniform(0, 1, (3, 784)).astype(np.float32)
    assert np.array_equal(forward(model, x), forward(loaded, x))


def test_model_io_errors(tmp_path):
    model = init_model(Architecture("net-b", (784, 8, 10)), seed=1)
    path = tmp_path / "m.ecml"
    save_model(str(path), model)
    raw = path.read_bytes()

    path.write_bytes(b"NOPE" + raw[4:])
    with pytest.raises(IdxFormatError):
        load_model(str(path))

    path.write_bytes(raw[:10])
    with pytest.raises(TruncatedFileError):
        load_model(str(path))

    path.write_bytes(raw[:-4])
    with pytest.raises(TruncatedFileError):
        load_model(str(path))

    with pytest.raises(FileNotFoundError):
        load_model(str(tmp_path / "missing.ecml"))
