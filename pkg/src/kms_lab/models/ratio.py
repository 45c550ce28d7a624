"""Heuristic ratio-set diagnostic: log-RN values -beta c(s) at recurrences s.

Each sample point is pushed by the model's candidate recurrences; those that
land back in a small cell of the point contribute their log Radon-Nikodym
value.  Values are binned at 1e-9 so histograms from independent chunks merge
by addition, in any order.
"""
from __future__ import annotations

import csv
import io
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import InsufficientRecurrences
from .base import ModelSystem

BIN_DIGITS = 9
CHUNK = 16


@dataclass
class RatioHistogram:
    counts: Counter = field(default_factory=Counter)
    samples: int = 0
    misses: int = 0  # candidate recurrences that did not return to the cell

    def add(self, value: float):
        self.counts[round(float(value), BIN_DIGITS) + 0.0] += 1

    def merge(self, other: "RatioHistogram") -> "RatioHistogram":
        return RatioHistogram(self.counts + other.counts, self.samples + other.samples,
                              self.misses + other.misses)

    @property
    def values(self) -> list[float]:
        return sorted(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def lattice_residual(self, step: float) -> float:
        """max distance of an observed value from step * Z."""
        return max((abs(v - step * round(v / step)) for v in self.counts), default=float("inf"))

    def max_abs(self) -> float:
        return max((abs(v) for v in self.counts), default=float("inf"))

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["log_rn_value", "count"])
        for v in self.values:
            writer.writerow([repr(v), self.counts[v]])
        return out.getvalue()

    def to_json(self) -> dict:
        return {"samples": self.samples, "recorded": self.total, "misses": self.misses,
                "distinct_values": len(self.counts),
                "histogram": [[v, self.counts[v]] for v in self.values]}


def _chunk(model: ModelSystem, n: int, seed_seq: np.random.SeedSequence, cell) -> RatioHistogram:
    rng = np.random.default_rng(seed_seq)
    hist = RatioHistogram(samples=n)
    for _ in range(n):
        pt = model.sample_point(rng)
        for s in model.recurrences(pt, cell):
            if model.close(pt, model.act(pt, s), cell):
                hist.add(model.log_rn(s))
            else:
                hist.misses += 1
    return hist


def ratio_set_sampler(model: ModelSystem, samples: int, seed: int, cell=None,
                      workers: int = 1) -> RatioHistogram:
    """Histogram of log-RN values at recurrences; identical for any ``workers``."""
    if samples <= 0:
        raise InsufficientRecurrences("no samples requested", RatioHistogram())
    sizes = [CHUNK] * (samples // CHUNK) + ([samples % CHUNK] if samples % CHUNK else [])
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(model, n, s, cell) for n, s in zip(sizes, seeds)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(_chunk, *zip(*jobs)))
    else:
        parts = [_chunk(*job) for job in jobs]
    hist = RatioHistogram()
    for part in parts:
        hist = hist.merge(part)
    if hist.total == 0:
        raise InsufficientRecurrences("no recurrence returned to its cell", hist)
    return hist
