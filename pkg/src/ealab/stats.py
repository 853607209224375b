"""Summary statistics shared by the takeover lab and the sweep harness.

No distributional assumptions: runtimes are heavy-tailed at small lambda, so
the summary keeps mean, standard error, median, and the 10/90 quantiles side
by side. Budget-exhausted samples are censored: counted, never averaged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SampleStats:
    """Mean, standard error, and empirical quantiles of completed samples.

    `count` covers completed samples only; `exhausted` counts censored runs.
    stderr is NaN for fewer than two samples. Quantiles use numpy's default
    linear interpolation.
    """

    count: int
    mean: float
    stderr: float
    median: float
    q10: float
    q90: float
    exhausted: int = 0


def summarize(samples, exhausted: int = 0) -> SampleStats:
    xs = np.asarray(list(samples), dtype=float)
    if xs.size == 0:
        nan = float("nan")
        return SampleStats(0, nan, nan, nan, nan, nan, exhausted)
    mean = float(xs.mean())
    if xs.size >= 2:
        stderr = float(xs.std(ddof=1) / math.sqrt(xs.size))
    else:
        stderr = float("nan")
    q10, median, q90 = (float(q) for q in np.quantile(xs, [0.1, 0.5, 0.9]))
    return SampleStats(int(xs.size), mean, stderr, median, q10, q90, exhausted)
