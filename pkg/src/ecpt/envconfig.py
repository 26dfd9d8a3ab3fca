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

"""Run configuration handler."""

import os
import pprint
from typing import Any, Dict, List, Optional, Tuple, Union

import yaml

from ecpt.cipher.common import CipherConfig, CipherMode, Padding, parse_key
from ecpt.conformal import Rule
from ecpt.errors import ConfigError
from ecpt.logger import logger
from ecpt.mlp import Architecture, Optimizer, TrainConfig

# built-in defaults reproduce the reference experiment
DEFAULTS: Dict[str, Any] = {
    "data.dir": "./external/mnist",
    "data.regime": "fixed",
    "output.dir": "./result",
    "cipher.key": "abs2kas126oZbdXs",
    "cipher.iv": "1nsdjah72MdnJ12a",
    "cipher.mode": "fixed",
    "cipher.seed": 2024,
    "cipher.padding": "none",
    "train.arch": "ref-v1",
    "train.hidden": (512, 256),
    "train.batch_size": 64,
    "train.epochs": 32,
    "train.learning_rate": 0.01,
    "train.optimizer": "sgd",
    "train.momentum": 0.9,
    "train.seed": 2024,
    "train.shuffle": True,
    "train.repeats": 1,
    "train.resume": "",
    "conformal.split_seed": 2024,
    "conformal.epsilon": 0.4,
    "conformal.alpha": 0.4,
    "conformal.rule": "both",
    "conformal.summary": False,
    "conformal.model": "",
    "viz.perplexity": 30.0,
    "viz.iterations": 1000,
    "viz.learning_rate": 200.0,
    "viz.seed": 2024,
    "viz.samples": 10000,
    "viz.bins": 50,
    "validate.trials": 10000,
    "validate.seed": 2024,
}

CHOICES: Dict[str, Tuple[str, ...]] = {
    "data.regime": ("plaintext", "fixed", "per_sample"),
    "cipher.mode": ("fixed", "per_sample"),
    "cipher.padding": ("none",),
    "train.optimizer": ("sgd", "sgd_momentum"),
    "conformal.rule": ("p", "e", "both"),
}

# manifest-only keys, ignored when a manifest is read back as config
_RESULT_PREFIX = "result."

_TRUE = ("1", "true", "yes", "y", "on")
_FALSE = ("0", "false", "no", "n", "off")


def _flatten(cfg: Dict, prefix: str = "") -> Dict[str, Any]:
    """Flatten nested sections to dotted keys."""
    flat: Dict[str, Any] = {}
    for k, v in cfg.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            flat.update(_flatten(v, key + "."))
        else:
            flat[key] = v
    return flat


def _coerce(key: str, value: Any) -> Any:  # noqa: C901
    """Convert a value to the type of the key's default."""
    default = DEFAULTS[key]
    try:
        if isinstance(default, bool):
            if isinstance(value, bool):
                return value
            text = str(value).strip().lower()
            if text in _TRUE:
                return True
            if text in _FALSE:
                return False
            raise ValueError(f"not a boolean: {value}")
        if isinstance(default, tuple):
            if isinstance(value, str):
                value = [v for v in value.split(",") if v.strip()]
            return tuple(int(v) for v in value)
        if isinstance(default, int):
            return int(value)
        if isinstance(default, float):
            return float(value)
        return str(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid value for '{key}': {e}") from e


class EnvConfig:
    """This class handles run configuration.

    Values come from built-in defaults, then a config file (YAML or flat
    ``key=value``), then explicit overrides such as CLI flags.
    """

    def __init__(
        self,
        cfg: Union[str, Dict, None] = None,
        overrides: Optional[Dict[str, Any]] = None,
        required: bool = False,
    ) -> None:
        """Initialize run configuration."""
        self._cfg_values: Dict[str, Any] = dict(DEFAULTS)

        if isinstance(cfg, str):
            loaded = self._load_config(cfg, required)
        elif isinstance(cfg, dict):
            loaded = _flatten(cfg)
        elif cfg is None:
            loaded = {}
        else:
            raise TypeError("invalid configuration")

        self._apply(loaded)
        overrides = overrides or {}
        self._apply({k: v for k, v in overrides.items() if v is not None})

        logger.debug("run config:\n" + pprint.pformat(self._cfg_values))

    def _load_config(self, path: str, required: bool) -> Dict[str, Any]:
        """Load configuration file."""
        if not os.path.exists(path):
            if required:
                raise ConfigError(f"configuration file not found: {path}")
            logger.info(f"no configuration file at {path}, using defaults")
            return {}

        if path.endswith((".yaml", ".yml")):
            with open(path, "r") as f:
                values = yaml.safe_load(f) or {}
            if not isinstance(values, dict):
                raise ConfigError(f"{path}: top level must be a mapping")
            return _flatten(values)

        return self._load_kv(path)

    @staticmethod
    def _load_kv(path: str) -> Dict[str, Any]:
        """Load flat ``key=value`` file."""
        values = {}
        with open(path, "r") as f:
            for num, line in enumerate(f, 1):
                line = line.strip()
                # ignore all commented lines
                if not line or line[0] == "#":
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{num}: expected key=value")
                name, val = line.split("=", 1)
                values[name.strip()] = val.strip()
        return values

    def _apply(self, values: Dict[str, Any]) -> None:
        """Validate and merge values."""
        for key, value in values.items():
            if key.startswith(_RESULT_PREFIX):
                continue
            if key not in DEFAULTS:
                raise ConfigError(f"unknown configuration key '{key}'")
            value = _coerce(key, value)
            if key in CHOICES and value not in CHOICES[key]:
                raise ConfigError(
                    f"'{key}' must be one of {', '.join(CHOICES[key])}"
                )
            self._cfg_values[key] = value

    def __getitem__(self, key: str) -> Any:
        """Get configuration value."""
        return self._cfg_values[key]

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value or default."""
        return self._cfg_values.get(key, default)

    @property
    def config(self) -> Dict[str, Any]:
        """Return resolved configuration."""
        return dict(self._cfg_values)

    def derive(self, overrides: Dict[str, Any]) -> "EnvConfig":
        """Return a copy with some values replaced."""
        return EnvConfig(self.config, overrides)

    def dump(self) -> str:
        """Return resolved configuration as sorted ``key=value`` lines."""
        lines = []
        for key in sorted(self._cfg_values):
            value = self._cfg_values[key]
            if isinstance(value, tuple):
                value = ",".join(str(v) for v in value)
            elif isinstance(value, bool):
                value = str(value).lower()
            lines.append(f"{key}={value}")
        return "\n".join(lines) + "\n"

    def cipher_config(self, mode: Optional[str] = None) -> CipherConfig:
        """Return cipher configuration, optionally for another mode."""
        return CipherConfig(
            key=parse_key(self["cipher.key"]),
            iv=parse_key(self["cipher.iv"]),
            mode=CipherMode(mode or self["cipher.mode"]),
            seed=self["cipher.seed"],
            padding=Padding(self["cipher.padding"]),
        )

    def architecture(self) -> Architecture:
        """Return model architecture."""
        return Architecture.from_hidden(
            self["train.hidden"], arch_id=self["train.arch"]
        )

    def train_config(self, seed: Optional[int] = None) -> TrainConfig:
        """Return training configuration, optionally with another seed."""
        return TrainConfig(
            batch_size=self["train.batch_size"],
            epochs=self["train.epochs"],
            learning_rate=self["train.learning_rate"],
            optimizer=Optimizer(self["train.optimizer"]),
            momentum=self["train.momentum"],
            seed=self["train.seed"] if seed is None else seed,
            shuffle_each_epoch=self["train.shuffle"],
        )

    def rules(self) -> List[Rule]:
        """Return conformal rules selected by ``conformal.rule``."""
        rule = self["conformal.rule"]
        rules = []
        if rule in ("p", "both"):
            rules.append(Rule.p_value(self["conformal.epsilon"]))
        if rule in ("e", "both"):
            rules.append(Rule.e_value(self["conformal.alpha"]))
        return rules
