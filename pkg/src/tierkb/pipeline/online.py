"""In-mission training variant of the two-tier diagnoser.

Instead of a classifier fitted on a prerecorded corpus, the mission starts
with no model at all: a live-stream prefix is buffered as nominal-condition
training rows while windows queue up in a bounded buffer, a classifier is
fitted mid-mission against synthetic fault exemplars generated on the spot,
and diagnosis then drains the backlog and continues window by window. When
fitting diverges the mission degrades to threshold rules alone and says so in
the report.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..dataset import (
    FAULT_KINDS,
    Dataset,
    DatasetSchema,
    FaultScenario,
    Instance,
    merge_datasets,
)
from ..errors import DivergenceError
from ..kb.model import ClassAtom, Rule
from ..learners import predict_label
from ..learners.mlp import MlpParams, train_mlp
from .mission import (
    CONDITION_CLASSES,
    DEFAULT_HIDDEN,
    DEFAULT_PERSISTENCE,
    DEFAULT_SCALE,
    DEFAULT_WINDOW_S,
    MissionDiagnoser,
    WindowDiagnosis,
    majority_label,
    mission_dataset,
    window_spans,
)

#: Seed offset separating contrast-exemplar missions from everything else.
CONTRAST_SEED_OFFSET = 300


@dataclass(frozen=True)
class QueuedWindow:
    """One produced-but-not-yet-diagnosed telemetry window."""

    index: int
    t_start: float
    t_end: float
    values: np.ndarray


class WindowQueue:
    """Bounded FIFO that drops the oldest entry when pushed past capacity."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("queue capacity must be >= 1")
        self.capacity = capacity
        self._items: list = []
        self.dropped: list = []

    def __len__(self):
        return len(self._items)

    def push(self, item) -> None:
        self._items.append(item)
        if len(self._items) > self.capacity:
            self.dropped.append(self._items.pop(0))

    def pop(self):
        """Oldest entry, or None when empty."""
        if not self._items:
            return None
        return self._items.pop(0)


def fallback_escalation_rule() -> Rule:
    """Degraded-mode bridge: treat any alarmed window as a navigation-stack
    interface fault, the one condition the reference thresholds can name."""
    return Rule(
        name="fallback_alarm_escalation",
        body=(ClassAtom(cls="alarmed_window", term="?x"),),
        head=ClassAtom(cls="UpNormalLidarInterrupt", term="?x"),
    )


def contrast_corpus(schema: DatasetSchema, scale: float, seed: int) -> Dataset:
    """Synthetic exemplars for in-mission training: one nominal mission plus
    one mission per fault kind, all simulated on the planned route at the
    live mission's scale and onset so frozen-state faults are rehearsed at
    the route point where they could actually strike."""
    parts = [
        mission_dataset(
            FaultScenario(kind="baseline", seed=seed + CONTRAST_SEED_OFFSET), scale
        )[0]
    ]
    for i, kind in enumerate(FAULT_KINDS):
        scenario = FaultScenario(
            kind=kind, seed=seed + CONTRAST_SEED_OFFSET + 1 + i
        )
        parts.append(mission_dataset(scenario, scale)[0])
    merged = merge_datasets(parts)
    if merged.schema.attributes != schema.attributes:
        raise ValueError("contrast corpus schema does not match the live stream")
    return merged


@dataclass(frozen=True)
class OnlineReport:
    """Outcome of one mission diagnosed with in-mission training."""

    scenario: str
    seed: int
    scale: float
    window_s: float
    persistence: int
    queue_capacity: int
    trained_in_loop: bool
    fallback: bool
    fallback_reason: str | None
    train_rows: int
    contrast_rows: int
    dropped_windows: int
    dropped_indices: tuple[int, ...]
    windows: tuple[WindowDiagnosis, ...]
    final_verdict: str
    final_condition: str
    consistent: bool
    conflicts: tuple[str, ...]
    timing: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "scale": self.scale,
            "window_s": self.window_s,
            "persistence": self.persistence,
            "queue_capacity": self.queue_capacity,
            "trained_in_loop": self.trained_in_loop,
            "fallback": self.fallback,
            "fallback_reason": self.fallback_reason,
            "train_rows": self.train_rows,
            "contrast_rows": self.contrast_rows,
            "dropped_windows": self.dropped_windows,
            "dropped_indices": list(self.dropped_indices),
            "windows": [w.to_dict() for w in self.windows],
            "final_verdict": self.final_verdict,
            "final_condition": self.final_condition,
            "consistent": self.consistent,
            "conflicts": list(self.conflicts),
            "timing": dict(self.timing),
        }


def run_online(
    kind: str = "baseline",
    scale: float = DEFAULT_SCALE,
    seed: int = 0,
    window_s: float = DEFAULT_WINDOW_S,
    persistence: int = DEFAULT_PERSISTENCE,
    train_fraction: float = 0.4,
    queue_capacity: int = 8,
    hidden: int = DEFAULT_HIDDEN,
    mlp_params: MlpParams | None = None,
) -> OnlineReport:
    """Run one mission with the classifier trained inside the mission loop.

    The producer emits aligned windows in time order into the bounded queue.
    Until ``train_fraction`` of the mission has streamed, the consumer only
    buffers rows as nominal training examples; it then fits the classifier on
    that prefix merged with generated fault exemplars, drains the queued
    backlog, and diagnoses the rest as it arrives. ``mlp_params`` overrides
    the fitting hyperparameters (the seed and hidden size arguments are then
    ignored); a diverging fit degrades the mission to threshold rules only.
    """
    if not (0.0 < train_fraction < 1.0):
        raise ValueError("train_fraction must lie in (0, 1)")
    started = time.perf_counter()
    scenario = FaultScenario(kind=kind, seed=seed)
    dataset, times = mission_dataset(scenario, scale)
    features = dataset.features()
    train_end = float(times[0]) + train_fraction * (float(times[-1]) - float(times[0]))

    queue = WindowQueue(queue_capacity)
    diagnoser = MissionDiagnoser(persistence=persistence)
    model = None
    fallback = False
    fallback_reason = None
    trained = False
    prefix_rows: list[Instance] = []
    train_rows = 0
    contrast_rows = 0
    train_s = 0.0
    diagnose_s = 0.0

    def consume(window: QueuedWindow) -> None:
        nonlocal diagnose_s
        if model is not None:
            labels = [predict_label(model, row) for row in window.values]
            condition = majority_label(labels, model.schema.class_values)
        else:
            condition = None
        t0 = time.perf_counter()
        diagnoser.observe(window.t_start, window.t_end, window.values, condition)
        diagnose_s += time.perf_counter() - t0

    spans = window_spans(times, window_s)
    for index, (start, end, t_lo) in enumerate(spans):
        queue.push(QueuedWindow(index, t_lo, t_lo + window_s, features[start:end]))
        if not trained:
            if t_lo + window_s <= train_end + 1e-9:
                prefix_rows.extend(
                    Instance(values=inst.values, label="Normal")
                    for inst in dataset.instances[start:end]
                )
                continue
            trained = True
            live = Dataset(
                schema=dataset.schema,
                instances=tuple(prefix_rows),
                provenance="live-prefix",
            )
            contrast = contrast_corpus(dataset.schema, scale, seed)
            merged = merge_datasets([live, contrast])
            train_rows = len(merged.instances)
            contrast_rows = len(contrast.instances)
            params = (
                mlp_params
                if mlp_params is not None
                else MlpParams(hidden=hidden, seed=seed)
            )
            t0 = time.perf_counter()
            try:
                model = train_mlp(merged, params)
            except DivergenceError as exc:
                fallback = True
                fallback_reason = str(exc)
                diagnoser.kb.add_rule(fallback_escalation_rule())
            train_s = time.perf_counter() - t0
        while (queued := queue.pop()) is not None:
            consume(queued)
    while (queued := queue.pop()) is not None:
        consume(queued)

    return OnlineReport(
        scenario=kind,
        seed=seed,
        scale=scale,
        window_s=window_s,
        persistence=persistence,
        queue_capacity=queue_capacity,
        trained_in_loop=model is not None,
        fallback=fallback,
        fallback_reason=fallback_reason,
        train_rows=train_rows,
        contrast_rows=contrast_rows,
        dropped_windows=len(queue.dropped),
        dropped_indices=tuple(w.index for w in queue.dropped),
        windows=tuple(diagnoser.windows),
        final_verdict=diagnoser.final_verdict,
        final_condition=diagnoser.final_condition,
        consistent=not diagnoser.conflicts,
        conflicts=tuple(diagnoser.conflicts),
        timing={
            "train_s": train_s,
            "diagnose_s": diagnose_s,
            "total_s": time.perf_counter() - started,
        },
    )
