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

"""Coverage and set-size evaluation of prediction sets."""

import csv
import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ecpt.conformal import PredictionSet, Rule
from ecpt.dataset import NUM_CLASSES
from ecpt.errors import PreconditionError
from ecpt.logger import logger

###############################################################################
# Class: ExampleRecord
###############################################################################


@dataclass(frozen=True)
class ExampleRecord:
    """Prediction set of one example with its true label."""

    example_id: int
    labels: Tuple[int, ...]
    true_label: int
    hit: bool


###############################################################################
# Class: PredictionReport
###############################################################################


@dataclass(eq=False)
class PredictionReport:
    """Coverage and set-size distribution of one rule on one test set."""

    rule: Rule
    threshold: float
    coverage_count: int
    total: int
    size_histogram: np.ndarray
    per_example: Optional[List[ExampleRecord]] = None

    def __post_init__(self) -> None:
        """Validate report invariants."""
        if int(np.sum(self.size_histogram)) != self.total:
            raise PreconditionError("set-size histogram does not sum to total")
        if not 0 <= self.coverage_count <= self.total:
            raise PreconditionError("coverage count out of range")

    @property
    def coverage(self) -> float:
        """Get realized coverage."""
        return self.coverage_count / self.total if self.total else 0.0

    @property
    def mean_size(self) -> float:
        """Get mean prediction set size."""
        if not self.total:
            return 0.0
        sizes = np.arange(len(self.size_histogram))
        return float(np.dot(sizes, self.size_histogram) / self.total)

    def summary(self) -> Dict[str, str]:
        """Return scalar fields as manifest entries."""
        prefix = f"result.{self.rule.kind}"
        return {
            f"{prefix}.rule": str(self.rule),
            f"{prefix}.threshold": f"{self.threshold:.6f}",
            f"{prefix}.coverage_count": str(self.coverage_count),
            f"{prefix}.total": str(self.total),
            f"{prefix}.coverage": f"{self.coverage:.6f}",
            f"{prefix}.mean_size": f"{self.mean_size:.6f}",
            f"{prefix}.size_histogram": ",".join(
                str(int(c)) for c in self.size_histogram
            ),
        }


def _check_lengths(sets: Sequence[PredictionSet], labels: Sequence) -> None:
    if len(sets) != len(labels):
        raise PreconditionError(
            f"{len(sets)} prediction sets but {len(labels)} labels"
        )


def coverage(
    sets: Sequence[PredictionSet], labels: Sequence[int]
) -> Tuple[int, float]:
    """Return number and fraction of sets containing the true label."""
    _check_lengths(sets, labels)
    hits = sum(1 for s, y in zip(sets, labels) if int(y) in s)
    return hits, hits / len(sets) if sets else 0.0


def size_histogram(sets: Sequence[PredictionSet]) -> np.ndarray:
    """Return counts of sets of each size ``0..10``."""
    sizes = np.array([s.size for s in sets], dtype=np.int64)
    return np.bincount(sizes, minlength=NUM_CLASSES + 1).astype(np.int64)


def build_report(
    sets: Sequence[PredictionSet],
    labels: Sequence[int],
    summary: bool = False,
) -> PredictionReport:
    """Aggregate prediction sets into a report."""
    if not sets:
        raise PreconditionError("no prediction sets to report")
    _check_lengths(sets, labels)

    rules = {s.rule for s in sets}
    if len(rules) != 1:
        raise PreconditionError("prediction sets mix several rules")

    hits, _ = coverage(sets, labels)
    records = None
    if not summary:
        records = [
            ExampleRecord(
                s.example_id, tuple(sorted(s.labels)), int(y), int(y) in s
            )
            for s, y in zip(sets, labels)
        ]

    report = PredictionReport(
        rule=sets[0].rule,
        threshold=sets[0].threshold,
        coverage_count=hits,
        total=len(sets),
        size_histogram=size_histogram(sets),
        per_example=records,
    )
    logger.info(
        f"{report.rule}: threshold {report.threshold:.6f} coverage "
        f"{report.coverage_count}/{report.total} ({report.coverage:.4f}) "
        f"mean size {report.mean_size:.3f}"
    )
    return report


def render_table(report: PredictionReport) -> str:
    """Render the set-size distribution as an aligned text table."""
    sizes = [str(k) for k in range(len(report.size_histogram))]
    counts = [str(int(c)) for c in report.size_histogram]
    width = [max(len(a), len(b)) for a, b in zip(sizes, counts)]

    head = "Size of label set"
    row = "Number of examples"
    pad = max(len(head), len(row))

    def line(title: str, cells: List[str]) -> str:
        body = " | ".join(c.rjust(w) for c, w in zip(cells, width))
        return f"| {title.ljust(pad)} | {body} |"

    sep = "+" + "-" * (len(line(head, sizes)) - 2) + "+"
    return "\n".join(
        [
            f"Label set size distribution ({report.rule})",
            f"threshold: {report.threshold:.6f}",
            sep,
            line(head, sizes),
            sep,
            line(row, counts),
            sep,
            f"coverage: {report.coverage_count}/{report.total} "
            f"({100 * report.coverage:.2f}%)",
            f"mean set size: {report.mean_size:.3f}",
            "",
        ]
    )


def write_report(report: PredictionReport, outdir: str) -> List[str]:
    """Write text table and CSV files of a report, return their paths."""
    os.makedirs(outdir, exist_ok=True)
    prefix = os.path.join(outdir, f"report_{report.rule.kind}")
    paths = []

    txt = prefix + ".txt"
    with open(txt, "w", encoding="UTF8") as f:
        f.write(render_table(report))
    paths.append(txt)

    hist = prefix + "_sizes.csv"
    with open(hist, "w", encoding="UTF8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["size", "count"])
        writer.writerows(enumerate(int(c) for c in report.size_histogram))
    paths.append(hist)

    if report.per_example is not None:
        per = prefix + "_examples.csv"
        with open(per, "w", encoding="UTF8", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["example_id", "labels", "true_label", "hit"])
            for r in report.per_example:
                writer.writerow(
                    [
                        r.example_id,
                        " ".join(str(y) for y in r.labels),
                        r.true_label,
                        int(r.hit),
                    ]
                )
        paths.append(per)

    logger.info(f"report {report.rule} written to {prefix}.*")
    return paths
