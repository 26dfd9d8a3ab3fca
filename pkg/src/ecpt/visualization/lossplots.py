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

"""Calibration score histogram and sorted-curve CSV files."""

import csv
import os
from typing import Tuple

from ecpt.conformal import CalibrationScores
from ecpt.errors import PreconditionError

DEFAULT_BINS = 50


def loss_plots(
    cal: CalibrationScores, outdir: str, bins: int = DEFAULT_BINS
) -> Tuple[str, str]:
    """Write histogram and sorted-curve CSVs of calibration scores.

    ``calibration_histogram.csv`` has columns ``bin,left,right,count``;
    ``calibration_sorted.csv`` has columns ``rank,score``.
    """
    if cal.n == 0:
        raise PreconditionError("no calibration scores to plot")

    os.makedirs(outdir, exist_ok=True)
    counts, edges = cal.histogram(bins)
    hist_path = os.path.join(outdir, "calibration_histogram.csv")
    with open(hist_path, "w", encoding="UTF8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["bin", "left", "right", "count"])
        for i, c in enumerate(counts):
            writer.writerow(
                [i, f"{edges[i]:.6f}", f"{edges[i + 1]:.6f}", int(c)]
            )

    ranks, scores = cal.sorted_curve()
    curve_path = os.path.join(outdir, "calibration_sorted.csv")
    with open(curve_path, "w", encoding="UTF8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["rank", "score"])
        for r, s in zip(ranks, scores):
            writer.writerow([int(r), f"{s:.8f}"])

    return hist_path, curve_path
