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

"""Experiment runner behind the CLI commands."""

import csv
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ecpt.cipher.getcipher import encrypt_dataset, get_cipher
from ecpt.conformal import (
    CalibrationScores,
    RuleKind,
    calibrate,
    e_factor,
    p_index,
    predict_sets,
    threshold,
)
from ecpt.dataset import (
    ImageSet,
    SplitPair,
    dataset_arrays,
    load_mnist,
    normalize,
    split_test,
)
from ecpt.envconfig import EnvConfig
from ecpt.errors import ConfigError, ConsistencyError, PreconditionError
from ecpt.evaluation import PredictionReport, build_report, write_report
from ecpt.lib.container.container import load_imageset, save_imageset
from ecpt.lib.model.model_io import load_model, save_model
from ecpt.logger import logger
from ecpt.manifest import RunManifest
from ecpt.mlp import MlpModel, accuracy, init_model, train
from ecpt.validate import EncryptFn, Validator
from ecpt.visualization.lossplots import loss_plots
from ecpt.visualization.raster import render_pair
from ecpt.visualization.tsne import separation_ratio, tsne, write_embedding

REGIMES = ("plaintext", "fixed", "per_sample")
FIGURES = ("tsne", "digit", "calibration")

###############################################################################
# Class: TrainSummary
###############################################################################


@dataclass
class TrainSummary:
    """Accuracies of all training repeats of one regime."""

    regime: str
    model_path: str
    train_accuracy: List[float] = field(default_factory=list)
    test_accuracy: List[float] = field(default_factory=list)

    @property
    def test_mean(self) -> float:
        """Get mean test accuracy."""
        return float(np.mean(self.test_accuracy))

    @property
    def test_std(self) -> float:
        """Get test accuracy standard deviation."""
        return float(np.std(self.test_accuracy))

    def results(self) -> Dict[str, str]:
        """Return manifest entries."""
        tr = np.asarray(self.train_accuracy)
        te = np.asarray(self.test_accuracy)
        return {
            "repeats": str(len(te)),
            "train_accuracy": ",".join(f"{a:.6f}" for a in tr),
            "test_accuracy": ",".join(f"{a:.6f}" for a in te),
            "train_accuracy.mean": f"{tr.mean():.6f}",
            "train_accuracy.std": f"{tr.std():.6f}",
            "test_accuracy.mean": f"{te.mean():.6f}",
            "test_accuracy.std": f"{te.std():.6f}",
        }


###############################################################################
# Class: Comparison
###############################################################################


@dataclass(frozen=True)
class Comparison:
    """Measured value against a published reference and its band."""

    name: str
    measured: float
    reference: float
    low: float
    high: float

    @property
    def ok(self) -> bool:
        """Check if the measured value is inside the band."""
        return self.low <= self.measured <= self.high

    def __str__(self) -> str:
        """Return table row."""
        status = "ok" if self.ok else "OUT"
        return (
            f"{self.name:<28} {self.measured:>10.4f} {self.reference:>10.4f}"
            f"   [{self.low:.4f}, {self.high:.4f}] {status}"
        )


# published numbers: (reference, low, high)
REFERENCE: Dict[str, Tuple[float, float, float]] = {
    "plaintext.test_accuracy": (0.9811, 0.97, 1.0),
    "fixed.test_accuracy": (0.3688, 0.30, 0.45),
    "per_sample.test_accuracy": (0.0956, 0.08, 0.12),
    "p_value.index": (3000, 3000, 3000),
    "p_value.coverage": (0.593, 0.56, 0.64),
    "p_value.max_size": (5, 0, 5),
    "p_value.mode_size": (2, 0, 3),
    "e_value.threshold": (4.29327, 4.29327 * 0.75, 4.29327 * 1.25),
    "e_value.coverage": (0.9776, 0.90, 1.0),
    "e_value.mode_size": (7, 6, 10),
    "e_over_p.coverage_gap": (0.3846, 1e-12, 1.0),
    "separation.ordered": (1, 1, 1),
}

###############################################################################
# Class: Pipeline
###############################################################################


class Pipeline:
    """Run experiment stages for one configuration.

    Plaintext and encrypted sets are cached and shared with pipelines
    derived through :meth:`derive`.
    """

    def __init__(
        self,
        cfg: EnvConfig,
        cache: Optional[Dict[Tuple, ImageSet]] = None,
    ) -> None:
        """Initialize pipeline."""
        self._cfg = cfg
        self._cache = cache if cache is not None else {}

    @property
    def config(self) -> EnvConfig:
        """Get run configuration."""
        return self._cfg

    @property
    def outdir(self) -> str:
        """Get output directory."""
        return self._cfg["output.dir"]

    def derive(self, overrides: Dict) -> "Pipeline":
        """Get pipeline for a modified configuration."""
        return Pipeline(self._cfg.derive(overrides), self._cache)

    def _rebound(self, overrides: Dict[str, Any]) -> Optional["Pipeline"]:
        """Get derived pipeline if explicit arguments change the config.

        Stages fold their arguments into the configuration this way, so the
        manifest they write is enough to run them again.
        """
        changed = {
            k: v
            for k, v in overrides.items()
            if v is not None and v != self._cfg[k]
        }
        return self.derive(changed) if changed else None

    def _out(self, name: str) -> str:
        os.makedirs(self.outdir, exist_ok=True)
        return os.path.join(self.outdir, name)

    def dataset(self, part: str, regime: str = "plaintext") -> ImageSet:
        """Get ``train`` or ``test`` set in a data regime."""
        if regime not in REGIMES:
            raise ConfigError(f"unknown data regime '{regime}'")

        cipher = None
        if regime != "plaintext":
            cipher = self._cfg.cipher_config(regime)

        key = (self._cfg["data.dir"], part, cipher)
        if key not in self._cache:
            if cipher is None:
                data = load_mnist(self._cfg["data.dir"], part)
            else:
                data = encrypt_dataset(
                    self.dataset(part), cipher, self.start_index(part)
                )
            self._cache[key] = data
        return self._cache[key]

    def start_index(self, part: str) -> int:
        """Get global index of the first image of a partition."""
        if part == "train":
            return 0
        return self.dataset("train").count

    def model_path(self, regime: str) -> str:
        """Get default model file of a regime."""
        return os.path.join(self.outdir, f"model_{regime}.ecml")

    def trained_path(self, regime: str) -> str:
        """Get model file used for a regime, ``conformal.model`` if set."""
        return self._cfg["conformal.model"] or self.model_path(regime)

    def load_trained(self, regime: str) -> MlpModel:
        """Load model trained for a regime."""
        path = self.trained_path(regime)
        if not os.path.exists(path):
            raise PreconditionError(
                f"no model at {path}, run 'ecpt train' first"
            )
        return load_model(path)

    def split(self, regime: str) -> SplitPair:
        """Split the test set of a regime into calibration and CP test."""
        return split_test(
            self.dataset("test", regime), self._cfg["conformal.split_seed"]
        )

    def encrypt(self, mode: Optional[str] = None) -> List[str]:
        """Encrypt train and test sets and write container files."""
        mode = mode or self._cfg["cipher.mode"]
        if mode not in REGIMES[1:]:
            raise ConfigError(f"unknown cipher mode '{mode}'")
        other = self._rebound({"cipher.mode": mode})
        if other is not None:
            return other.encrypt()

        manifest = RunManifest(f"encrypt_{mode}", self._cfg)
        paths = []
        for part in ("train", "test"):
            data = self.dataset(part, mode)
            path = self._out(f"{mode}_{part}.ecis")
            save_imageset(path, data)
            if load_imageset(path).fingerprint() != data.fingerprint():
                raise ConsistencyError(f"{path}: read-back mismatch")
            manifest.add(f"{part}.count", data.count)
            manifest.add(f"{part}.fingerprint", data.fingerprint())
            manifest.add_file(f"{part}.file", path)
            paths.append(path)

        manifest.write(self.outdir)
        return paths

    def _write_trace(self, regime: str, trace: List) -> str:
        path = self._out(f"train_{regime}_trace.csv")
        with open(path, "w", encoding="UTF8", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["epoch", "loss", "accuracy"])
            for s in trace:
                writer.writerow(
                    [s.epoch, f"{s.loss:.6f}", f"{s.accuracy:.6f}"]
                )
        return path

    def train(
        self, regime: Optional[str] = None, resume: Optional[str] = None
    ) -> TrainSummary:
        """Train ``train.repeats`` models and evaluate them on the test set.

        Repeat ``r`` uses seed ``train.seed + r``; the first model is saved.
        With ``resume`` every repeat starts from the stored model.
        """
        other = self._rebound({"data.regime": regime, "train.resume": resume})
        if other is not None:
            return other.train()

        regime = self._cfg["data.regime"]
        repeats = self._cfg["train.repeats"]
        if repeats < 1:
            raise PreconditionError("train.repeats must be positive")

        train_set = self.dataset("train", regime)
        test_set = self.dataset("test", regime)
        arch = self._cfg.architecture()

        manifest = RunManifest(f"train_{regime}", self._cfg)
        stored = None
        if self._cfg["train.resume"]:
            manifest.add_file("resume", self._cfg["train.resume"])
            stored = load_model(self._cfg["train.resume"])
            if stored.dims != arch.dims:
                logger.warning(
                    f"resumed model has dims {stored.dims}, "
                    f"config says {arch.dims}"
                )
        summary = TrainSummary(regime, self.model_path(regime))

        for r in range(repeats):
            seed = self._cfg["train.seed"] + r
            start = stored if stored is not None else init_model(arch, seed)

            result = train(start, train_set, self._cfg.train_config(seed))
            test_acc = accuracy(result.model, test_set)
            summary.train_accuracy.append(result.final_accuracy)
            summary.test_accuracy.append(test_acc)
            logger.info(
                f"{regime} repeat {r + 1}/{repeats}: train accuracy "
                f"{result.final_accuracy:.4f}, test accuracy {test_acc:.4f}"
            )

            if r == 0:
                save_model(summary.model_path, result.model)
                manifest.add_file("model", summary.model_path)
                trace = self._write_trace(regime, result.trace)
                manifest.add_file("trace", trace)

        manifest.update(summary.results())
        manifest.write(self.outdir)
        return summary

    def conformal(
        self, regime: Optional[str] = None, model_path: Optional[str] = None
    ) -> Dict[RuleKind, PredictionReport]:
        """Calibrate, build prediction sets and write reports."""
        other = self._rebound(
            {"data.regime": regime, "conformal.model": model_path}
        )
        if other is not None:
            return other.conformal()

        regime = self._cfg["data.regime"]
        model = self.load_trained(regime)
        pair = self.split(regime)
        cal = calibrate(model, pair.calibration)
        x, y = dataset_arrays(pair.cp_test)

        manifest = RunManifest(f"conformal_{regime}", self._cfg)
        manifest.add_file("model", self.trained_path(regime))
        manifest.add("calibration.fingerprint", pair.calibration.fingerprint())
        manifest.add("calibration.n", cal.n)
        manifest.add("calibration.mean", f"{cal.mean:.9f}")
        manifest.add("calibration.source", cal.source)

        reports: Dict[RuleKind, PredictionReport] = {}
        for rule in self._cfg.rules():
            thr = threshold(cal, rule)
            if rule.kind is RuleKind.P_VALUE:
                manifest.add("p_value.index", p_index(cal.n, rule.level))
            else:
                factor = e_factor(rule.level, cal.n)
                manifest.add("e_value.factor", f"{factor:.9f}")

            sets = predict_sets(model, x, thr, rule)
            report = build_report(sets, y, self._cfg["conformal.summary"])
            manifest.update(report.summary())
            for path in write_report(report, self.outdir):
                manifest.add_file(os.path.basename(path), path)
            reports[rule.kind] = report

        if len(reports) == 2:
            p, e = reports[RuleKind.P_VALUE], reports[RuleKind.E_VALUE]
            manifest.add("e_covers_p", str(e.coverage >= p.coverage).lower())
            if e.coverage < p.coverage:
                logger.warning(
                    f"e-value coverage {e.coverage:.4f} below p-value "
                    f"coverage {p.coverage:.4f}"
                )

        for path in loss_plots(cal, self.outdir, self._cfg["viz.bins"]):
            manifest.add_file(os.path.basename(path), path)

        manifest.write(self.outdir)
        return reports

    def embed(self, regime: str) -> Tuple[str, float]:
        """Embed the first ``viz.samples`` training images of a regime."""
        data = self.dataset("train", regime)
        sub = data.subset(np.arange(min(self._cfg["viz.samples"], data.count)))
        emb = tsne(
            normalize(sub.images, np.float64),
            perplexity=self._cfg["viz.perplexity"],
            iterations=self._cfg["viz.iterations"],
            seed=self._cfg["viz.seed"],
            labels=sub.labels,
            learning_rate=self._cfg["viz.learning_rate"],
        )
        path = self._out(f"tsne_{regime}.csv")
        write_embedding(emb, path)
        ratio = separation_ratio(emb.points, emb.labels)
        logger.info(
            f"t-SNE {regime}: KL {emb.kl_divergence:.4f}, "
            f"intra/inter distance ratio {ratio:.4f}"
        )
        return path, ratio

    def viz_tsne(self, regime: str = "all") -> Dict[str, float]:
        """Write t-SNE embeddings, return intra/inter distance ratios."""
        regimes = REGIMES if regime == "all" else (regime,)
        manifest = RunManifest("viz_tsne", self._cfg)
        ratios = {}
        for reg in regimes:
            path, ratios[reg] = self.embed(reg)
            manifest.add(f"{reg}.separation_ratio", f"{ratios[reg]:.6f}")
            manifest.add_file(os.path.basename(path), path)
        manifest.write(self.outdir)
        return ratios

    def viz_digit(self, index: int = 0, regime: str = "all") -> List[str]:
        """Render a test digit next to its ciphertext."""
        mode = regime if regime in REGIMES[1:] else self._cfg["cipher.mode"]
        test = self.dataset("test")
        if not 0 <= index < test.count:
            raise PreconditionError(
                f"digit index {index} out of range 0..{test.count - 1}"
            )

        plain = test.images[index]
        cipher = get_cipher(self._cfg.cipher_config(mode))
        ct = cipher.encrypt_image(plain, self.start_index("test") + index)
        paths = render_pair(plain, ct, self.outdir, index)

        manifest = RunManifest("viz_digit", self._cfg)
        manifest.add("index", index)
        manifest.add("mode", mode)
        for path in paths:
            manifest.add_file(os.path.basename(path), path)
        manifest.write(self.outdir)
        return paths

    def viz_calibration(
        self, regime: str = "all", model_path: Optional[str] = None
    ) -> CalibrationScores:
        """Write calibration score histogram and sorted curve."""
        other = self._rebound(
            {
                "data.regime": regime if regime in REGIMES else None,
                "conformal.model": model_path,
            }
        )
        if other is not None:
            return other.viz_calibration()

        regime = self._cfg["data.regime"]
        model = self.load_trained(regime)
        cal = calibrate(model, self.split(regime).calibration)

        manifest = RunManifest("viz_calibration", self._cfg)
        manifest.add_file("model", self.trained_path(regime))
        manifest.add("calibration.n", cal.n)
        for path in loss_plots(cal, self.outdir, self._cfg["viz.bins"]):
            manifest.add_file(os.path.basename(path), path)
        manifest.write(self.outdir)
        return cal

    def viz(
        self,
        figure: str,
        regime: str = "all",
        index: int = 0,
        model_path: Optional[str] = None,
    ) -> None:
        """Produce one figure's artifacts."""
        if figure == "tsne":
            self.viz_tsne(regime)
        elif figure == "digit":
            self.viz_digit(index, regime)
        elif figure == "calibration":
            self.viz_calibration(regime, model_path)
        else:
            raise ConfigError(f"unknown figure '{figure}'")

    def validate(self, encrypt: Optional[EncryptFn] = None) -> Validator:
        """Run property suites; raise if any fails."""
        try:
            images = self.dataset("test").images
        except FileNotFoundError:
            logger.info("MNIST test set not found, using random images")
            images = None

        validator = Validator(
            trials=self._cfg["validate.trials"],
            seed=self._cfg["validate.seed"],
            encrypt=encrypt,
            images=images,
        )
        validator.run()

        manifest = RunManifest("validate", self._cfg)
        for res in validator.results:
            manifest.add(f"{res.name}.passed", str(res.passed).lower())
            manifest.add(f"{res.name}.checks", res.checks)
        manifest.write(self.outdir)

        validator.check()
        return validator

    def reproduce(self) -> List[Comparison]:
        """Run the full experiment and compare against published numbers."""
        for mode in REGIMES[1:]:
            self.encrypt(mode)

        ratios = self.viz_tsne("all")

        accuracies = {}
        for regime in REGIMES:
            summary = self.derive({"data.regime": regime}).train()
            accuracies[regime] = summary.test_mean

        reports = self.derive(
            {"data.regime": "fixed", "conformal.rule": "both"}
        ).conformal()
        p, e = reports[RuleKind.P_VALUE], reports[RuleKind.E_VALUE]
        n_cal = self.dataset("test", "fixed").count // 2

        measured = {
            "plaintext.test_accuracy": accuracies["plaintext"],
            "fixed.test_accuracy": accuracies["fixed"],
            "per_sample.test_accuracy": accuracies["per_sample"],
            "p_value.index": p_index(n_cal, p.rule.level),
            "p_value.coverage": p.coverage,
            "p_value.max_size": int(np.flatnonzero(p.size_histogram)[-1]),
            "p_value.mode_size": int(np.argmax(p.size_histogram)),
            "e_value.threshold": e.threshold,
            "e_value.coverage": e.coverage,
            "e_value.mode_size": int(np.argmax(e.size_histogram)),
            "e_over_p.coverage_gap": e.coverage - p.coverage,
            "separation.ordered": float(
                ratios["plaintext"] < ratios["fixed"] < ratios["per_sample"]
            ),
        }
        comparisons = [
            Comparison(name, float(measured[name]), *REFERENCE[name])
            for name in REFERENCE
        ]

        path = self._out("reproduce_summary.txt")
        with open(path, "w", encoding="UTF8") as f:
            f.write(f"{'quantity':<28} {'measured':>10} {'reference':>10}\n")
            for c in comparisons:
                f.write(str(c) + "\n")

        manifest = RunManifest("reproduce", self._cfg)
        for c in comparisons:
            manifest.add(c.name, f"{c.measured:.6f}")
        within = all(c.ok for c in comparisons)
        manifest.add("within_bands", str(within).lower())
        manifest.add_file("summary", path)
        manifest.write(self.outdir)

        for c in comparisons:
            if not c.ok:
                logger.warning(f"outside reference band: {c}")
        return comparisons
