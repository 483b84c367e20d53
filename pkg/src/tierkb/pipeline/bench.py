"""Storage and reasoning-cost benchmarks over scaled sample tables.

The space benchmark measures how the serialized knowledge-base text grows as
the populated sample table grows; the time benchmark measures reasoning wall
time over the same growth. Both emit small CSV tables plus least-squares
summaries (goodness of linear fit for space, log-log growth exponent for
time).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from ..dataset import GLASS_SEED, glass_csv_bytes, synthesize_glass
from ..kb.builders import GLASS_PROPERTY_MAP, build_glass_ontology, populate_into_ontology
from ..kb.text import serialize_kb
from ..reasoner import BenchmarkTable, benchmark_reasoning

DEFAULT_SPACE_SCALES = (1, 2, 4, 8)
DEFAULT_TIME_SCALES = (1, 2, 4, 8, 16)


@dataclass(frozen=True)
class LinearFit:
    """Least-squares line fit with its coefficient of determination."""

    slope: float
    intercept: float
    r_squared: float


def linear_fit(xs, ys) -> LinearFit:
    """Ordinary least squares of y against x."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.size < 2:
        raise ValueError("need at least two paired points to fit a line")
    slope, intercept = np.polyfit(xs, ys, 1)
    predicted = slope * xs + intercept
    ss_res = float(np.sum((ys - predicted) ** 2))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return LinearFit(slope=float(slope), intercept=float(intercept), r_squared=r_squared)


@dataclass(frozen=True)
class SpaceRow:
    scale: int
    raw_bytes: int
    kb_bytes: int

    @property
    def ratio(self) -> float:
        return self.kb_bytes / self.raw_bytes


@dataclass(frozen=True)
class SpaceTable:
    rows: tuple[SpaceRow, ...]

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["scale", "raw_bytes", "kb_bytes", "ratio"])
        for row in self.rows:
            writer.writerow([row.scale, row.raw_bytes, row.kb_bytes, f"{row.ratio:.3f}"])
        return out.getvalue()

    def fit(self) -> LinearFit:
        """Least-squares fit of stored bytes against scale."""
        return linear_fit([r.scale for r in self.rows], [r.kb_bytes for r in self.rows])


def bench_space(scales=DEFAULT_SPACE_SCALES, seed: int | None = None) -> SpaceTable:
    """Serialized size of the populated sample store at each scale factor.

    Every scaled table is populated fully labeled (individuals, one data
    assertion per attribute, one class assertion per row) and serialized
    without running the reasoner, so the measurement isolates representation
    overhead against the raw CSV bytes.
    """
    if not scales or any(s <= 0 for s in scales):
        raise ValueError("scales must be positive")
    if list(scales) != sorted(scales):
        raise ValueError("scales must be ascending")
    rows = []
    for scale in scales:
        data = synthesize_glass(seed=GLASS_SEED if seed is None else seed, scale=scale)
        kb = build_glass_ontology()
        populate_into_ontology(kb, data, GLASS_PROPERTY_MAP)
        rows.append(
            SpaceRow(
                scale=scale,
                raw_bytes=len(glass_csv_bytes(data)),
                kb_bytes=len(serialize_kb(kb).encode("utf-8")),
            )
        )
    return SpaceTable(rows=tuple(rows))


def bench_time(scales=DEFAULT_TIME_SCALES, seed: int | None = None) -> BenchmarkTable:
    """Reasoning wall time over scaled stores (rule set included)."""
    return benchmark_reasoning(list(scales), seed=seed)


def growth_exponent(table: BenchmarkTable) -> float:
    """Log-log slope of reasoning time against scale: 1.0 is linear growth,
    2.0 quadratic."""
    points = [(row.scale, row.reason_ms) for row in table.rows if row.reason_ms > 0]
    if len(points) < 2:
        raise ValueError("need at least two positive timings")
    fit = linear_fit(
        [math.log(s) for s, _ in points], [math.log(ms) for _, ms in points]
    )
    return fit.slope
