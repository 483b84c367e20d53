"""Two-tier fault diagnosis for simulated robot missions.

The neural tier labels each one-second telemetry window with a mission
condition; the symbolic tier receives the window as an individual (channel
means plus the predicted condition), saturates the robot knowledge base, and
turns persistent anomalies into mission verdicts with an inference trace as
evidence. Threshold rules that compare live channels against stored reference
measurements run alongside the classifier and flag symptomatic windows
independently.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..dataset import (
    FAULT_KINDS,
    SCENARIO_KINDS,
    STREAM_NAMES,
    STREAM_SPECS,
    Dataset,
    FaultScenario,
    align_streams,
    generate_telemetry,
    merge_datasets,
    scenario_label,
)
from ..kb.builders import build_jackal_ontology
from ..kb.model import KnowledgeBase
from ..learners import predict_label
from ..learners.mlp import MlpModel, MlpParams, train_mlp
from ..reasoner import apply_rules, check_consistency
from ..rulegen import make_threshold_rule

#: Window condition classes: nominal plus one class per fault kind.
CONDITION_CLASSES = ("Normal",) + tuple(sorted(scenario_label(k) for k in FAULT_KINDS))

#: Conditions that demand an immediate abort once persistent.
SEVERE_CONDITIONS = ("UpNormalFlatTyre", "UpNormalUnseenObstacle")

#: Aligned-dataset attribute names, in stream declaration order.
MISSION_ATTRIBUTES = tuple(
    f"{name}_{ch}" for name in STREAM_NAMES for ch in STREAM_SPECS[name][1]
)

#: Aligned attribute -> data property asserted on window individuals.
MISSION_PROPERTY_MAP = {attr: f"has_{attr}" for attr in MISSION_ATTRIBUTES}

VERDICT_NORMAL = "Normal"
VERDICT_INTERMITTENT = "ContinueIntermittent"
VERDICT_LIDAR_FAULTY = "LidarFaulty"
VERDICT_DEGRADED_IMU = "ContinueDegradedIMU"
VERDICT_REPLAN = "ReplanOnDrift"
VERDICT_EMERGENCY = "EmergencyReturn"

#: Escalation order; verdict comparisons pick the most severe.
VERDICT_SEVERITY = {
    VERDICT_NORMAL: 0,
    VERDICT_INTERMITTENT: 1,
    VERDICT_LIDAR_FAULTY: 2,
    VERDICT_DEGRADED_IMU: 2,
    VERDICT_REPLAN: 2,
    VERDICT_EMERGENCY: 3,
}

#: Final verdict each scenario kind should produce under defaults.
EXPECTED_VERDICTS = {
    "baseline": VERDICT_NORMAL,
    "weightedBaseline": VERDICT_NORMAL,
    "lidarInterrupt": VERDICT_LIDAR_FAULTY,
    "imuInterrupt": VERDICT_DEGRADED_IMU,
    "odomDrift": VERDICT_REPLAN,
    "flatTyre": VERDICT_EMERGENCY,
    "unseenObstacle": VERDICT_EMERGENCY,
}

DEFAULT_SCALE = 0.05
DEFAULT_WINDOW_S = 1.0
DEFAULT_PERSISTENCE = 3
DEFAULT_HIDDEN = 16
#: Distinct-noise training missions generated per scenario kind.
DEFAULT_TRAIN_REPS = 2


def prepare_mission_kb() -> KnowledgeBase:
    """Robot knowledge base extended with the mission vocabulary.

    Adds the condition taxonomy (Normal versus anomaly subclasses, declared
    disjoint), the telemetry-window class with one data property per aligned
    channel, the symptom classes, and two reference-threshold rules: a status
    code above the alarm reference flags ``alarmed_window``; forward speed
    below the minimum reference flags ``low_motion_window``.
    """
    kb = build_jackal_ontology()
    kb.add_class("mission_condition")
    kb.add_class("anomaly_condition", parents=["mission_condition"])
    kb.add_class("Normal", parents=["mission_condition"])
    for cls in CONDITION_CLASSES[1:]:
        kb.add_class(cls, parents=["anomaly_condition"])
    kb.add_disjoint("Normal", "anomaly_condition")

    kb.add_class("telemetry_window")
    kb.add_class("alarmed_window", parents=["telemetry_window"])
    kb.add_class("low_motion_window", parents=["telemetry_window"])
    for attr in MISSION_ATTRIBUTES:
        kb.add_data_property(MISSION_PROPERTY_MAP[attr], "telemetry_window")

    kb.add_rule(
        make_threshold_rule(
            "alarm_status_watch",
            kb,
            ref_individual="ind_REF_status_alarm",
            ref_property="reference_value",
            live_property=MISSION_PROPERTY_MAP["move_base_status_status_code"],
            comparator="greaterThan",
            head_class="alarmed_window",
        )
    )
    kb.add_rule(
        make_threshold_rule(
            "low_motion_watch",
            kb,
            ref_individual="ind_REF_min_forward_speed",
            ref_property="reference_value",
            live_property=MISSION_PROPERTY_MAP["odometry_filtered_vx"],
            comparator="lessThan",
            head_class="low_motion_window",
        )
    )
    return kb


def window_spans(times, window_s: float) -> list[tuple[int, int, float]]:
    """Group sorted timestamps into fixed-width windows anchored at the first.

    Returns ``(start_row, end_row, window_start_time)`` triples; ``end_row``
    is exclusive. Rows fall into the window holding their timestamp, so a
    trailing partial window is kept and empty windows never appear.
    """
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        raise ValueError("cannot window an empty timestamp sequence")
    if np.any(np.diff(times) < 0):
        raise ValueError("timestamps must be nondecreasing")
    if not (window_s > 0):
        raise ValueError("window width must be positive")
    slots = np.floor((times - times[0]) / window_s).astype(int)
    spans = []
    start = 0
    for i in range(1, len(slots) + 1):
        if i == len(slots) or slots[i] != slots[start]:
            spans.append((start, i, float(times[0] + slots[start] * window_s)))
            start = i
    return spans


def majority_label(labels, order) -> str:
    """Most frequent label; ties resolve to the earliest entry of ``order``."""
    if not labels:
        raise ValueError("cannot take a majority of zero labels")
    counts: dict[str, int] = {}
    for lab in labels:
        counts[lab] = counts.get(lab, 0) + 1
    best = max(counts.values())
    for lab in order:
        if counts.get(lab, 0) == best:
            return lab
    raise ValueError("labels do not appear in the given order")


def verdict_for(condition: str, run_length: int, persistence: int) -> str:
    """Mission verdict for a condition seen in ``run_length`` consecutive
    windows. Severe conditions escalate to an emergency return once the run
    reaches ``persistence``; interface faults need a run of two to name the
    faulty subsystem; any shorter anomaly run counts as intermittent."""
    if condition == "Normal":
        return VERDICT_NORMAL
    if condition in SEVERE_CONDITIONS:
        return VERDICT_EMERGENCY if run_length >= persistence else VERDICT_INTERMITTENT
    if run_length < 2:
        return VERDICT_INTERMITTENT
    if condition == "UpNormalLidarInterrupt":
        return VERDICT_LIDAR_FAULTY
    if condition == "UpNormalImuInterrupt":
        return VERDICT_DEGRADED_IMU
    if condition == "UpNormalOdomDrift":
        return VERDICT_REPLAN
    raise ValueError(f"no verdict mapping for condition {condition!r}")


@dataclass(frozen=True)
class WindowDiagnosis:
    """One diagnosed telemetry window: the asserted condition, the symptom
    classes the rules inferred, the verdict given the anomaly run so far, and
    the evidence (trace lines mentioning this window's individual)."""

    index: int
    individual: str
    t_start: float
    t_end: float
    rows: int
    condition: str
    symptoms: tuple[str, ...]
    run_length: int
    verdict: str
    evidence: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "individual": self.individual,
            "t_start": self.t_start,
            "t_end": self.t_end,
            "rows": self.rows,
            "condition": self.condition,
            "symptoms": list(self.symptoms),
            "run_length": self.run_length,
            "verdict": self.verdict,
            "evidence": list(self.evidence),
        }


class MissionDiagnoser:
    """Sequential window-by-window diagnosis over one mission knowledge base.

    Each observed window becomes a ``win_<k>`` individual carrying channel
    means and the classifier's condition; the store is then saturated and
    checked. Verdicts escalate with consecutive same-condition anomaly runs
    and never de-escalate across a mission.
    """

    def __init__(self, kb: KnowledgeBase | None = None, persistence: int = DEFAULT_PERSISTENCE):
        if persistence < 1:
            raise ValueError("persistence must be >= 1")
        self.kb = kb if kb is not None else prepare_mission_kb()
        self.persistence = persistence
        self.windows: list[WindowDiagnosis] = []
        self.conflicts: list[str] = []
        self._run_condition: str | None = None
        self._run_length = 0
        self._symptom_classes = sorted(
            self.kb.subclasses("telemetry_window") - {"telemetry_window"}
        )

    def observe(
        self,
        t_start: float,
        t_end: float,
        values: np.ndarray,
        condition: str | None,
    ) -> WindowDiagnosis:
        """Diagnose one window from its row-feature matrix.

        ``condition`` is the neural tier's majority label, or None when no
        classifier is available; in that case the condition is whatever
        anomaly the rules infer for the window (default Normal).
        """
        values = np.asarray(values, dtype=float)
        if values.ndim != 2 or values.shape[1] != len(MISSION_ATTRIBUTES):
            raise ValueError(
                f"expected a (rows, {len(MISSION_ATTRIBUTES)}) matrix, got {values.shape}"
            )
        index = len(self.windows)
        name = f"win_{index}"
        self.kb.add_individual(name, classes=["telemetry_window"])
        means = values.mean(axis=0)
        for attr, mean in zip(MISSION_ATTRIBUTES, means):
            self.kb.assert_data(MISSION_PROPERTY_MAP[attr], name, float(mean))
        if condition is not None:
            self.kb.assert_class(name, condition)

        _, trace = apply_rules(self.kb)
        evidence = tuple(str(entry) for entry in trace.for_individual(name))
        conflict = check_consistency(self.kb)
        if conflict is not None:
            self.conflicts.append(conflict.describe())

        window_classes = {
            a.cls for a in self.kb.class_assertions() if a.individual == name
        }
        symptoms = tuple(c for c in self._symptom_classes if c in window_classes)
        if condition is None:
            inferred = sorted(window_classes.intersection(CONDITION_CLASSES[1:]))
            condition = inferred[0] if inferred else "Normal"

        if condition == "Normal":
            self._run_condition, self._run_length = None, 0
        elif condition == self._run_condition:
            self._run_length += 1
        else:
            self._run_condition, self._run_length = condition, 1
        verdict = verdict_for(condition, self._run_length, self.persistence)

        diagnosis = WindowDiagnosis(
            index=index,
            individual=name,
            t_start=float(t_start),
            t_end=float(t_end),
            rows=values.shape[0],
            condition=condition,
            symptoms=symptoms,
            run_length=self._run_length,
            verdict=verdict,
            evidence=evidence,
        )
        self.windows.append(diagnosis)
        return diagnosis

    @property
    def final_verdict(self) -> str:
        """Most severe window verdict; ties go to the latest window."""
        verdict = VERDICT_NORMAL
        for w in self.windows:
            if VERDICT_SEVERITY[w.verdict] >= VERDICT_SEVERITY[verdict]:
                verdict = w.verdict
        return verdict

    @property
    def final_condition(self) -> str:
        """Condition of the window that set the final verdict."""
        verdict = self.final_verdict
        for w in reversed(self.windows):
            if w.verdict == verdict:
                return w.condition
        return "Normal"


@dataclass(frozen=True)
class MissionReport:
    """Outcome of one diagnosed mission."""

    scenario: str
    seed: int
    scale: float
    window_s: float
    persistence: int
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
            "windows": [w.to_dict() for w in self.windows],
            "final_verdict": self.final_verdict,
            "final_condition": self.final_condition,
            "consistent": self.consistent,
            "conflicts": list(self.conflicts),
            "timing": dict(self.timing),
        }


def training_scenarios(seed: int, reps: int = DEFAULT_TRAIN_REPS) -> list[FaultScenario]:
    """Training-corpus missions: ``reps`` distinct-noise replicates of every
    scenario kind, seeded disjointly from the evaluation missions."""
    out = []
    for rep in range(reps):
        for i, kind in enumerate(SCENARIO_KINDS):
            out.append(FaultScenario(kind=kind, seed=seed + 100 * (rep + 1) + i))
    return out


def mission_dataset(scenario: FaultScenario, scale: float) -> tuple[Dataset, np.ndarray]:
    """Aligned per-row dataset for one mission plus the row timestamps."""
    streams = generate_telemetry(scenario, scale=scale)
    dataset = align_streams(streams, class_values=CONDITION_CLASSES)
    times = min(streams.values(), key=len).t
    return dataset, times


def train_condition_classifier(
    scale: float = DEFAULT_SCALE,
    seed: int = 0,
    hidden: int = DEFAULT_HIDDEN,
    reps: int = DEFAULT_TRAIN_REPS,
) -> tuple[MlpModel, int]:
    """Train the window classifier on the merged training-mission corpus.

    Returns the model and the number of training rows.
    """
    parts = [
        mission_dataset(sc, scale)[0] for sc in training_scenarios(seed, reps)
    ]
    merged = merge_datasets(parts)
    model = train_mlp(merged, MlpParams(hidden=hidden, seed=seed))
    return model, len(merged.instances)


def run_mission(
    model: MlpModel,
    scenario: FaultScenario,
    scale: float = DEFAULT_SCALE,
    window_s: float = DEFAULT_WINDOW_S,
    persistence: int = DEFAULT_PERSISTENCE,
) -> MissionReport:
    """Stream one mission through the two-tier diagnoser window by window."""
    started = time.perf_counter()
    dataset, times = mission_dataset(scenario, scale)
    features = dataset.features()
    predictions = [predict_label(model, inst) for inst in dataset.instances]

    diagnoser = MissionDiagnoser(persistence=persistence)
    reason_s = 0.0
    for start, end, t_lo in window_spans(times, window_s):
        condition = majority_label(predictions[start:end], model.schema.class_values)
        t0 = time.perf_counter()
        diagnoser.observe(t_lo, t_lo + window_s, features[start:end], condition)
        reason_s += time.perf_counter() - t0
    return MissionReport(
        scenario=scenario.kind,
        seed=scenario.seed,
        scale=scale,
        window_s=window_s,
        persistence=persistence,
        windows=tuple(diagnoser.windows),
        final_verdict=diagnoser.final_verdict,
        final_condition=diagnoser.final_condition,
        consistent=not diagnoser.conflicts,
        conflicts=tuple(diagnoser.conflicts),
        timing={
            "diagnose_s": reason_s,
            "total_s": time.perf_counter() - started,
        },
    )


@dataclass(frozen=True)
class Experiment2Report:
    """Fault-injection sweep: one mission report per scenario kind, all
    diagnosed with a single classifier trained on held-out missions."""

    scale: float
    seed: int
    window_s: float
    persistence: int
    train_rows: int
    missions: tuple[MissionReport, ...]
    timing: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "scale": self.scale,
            "seed": self.seed,
            "window_s": self.window_s,
            "persistence": self.persistence,
            "train_rows": self.train_rows,
            "missions": [m.to_dict() for m in self.missions],
            "timing": dict(self.timing),
        }

    def mission_for(self, kind: str) -> MissionReport:
        for mission in self.missions:
            if mission.scenario == kind:
                return mission
        raise KeyError(f"no mission for scenario kind {kind!r}")

    def summary(self) -> str:
        lines = [
            f"fault sweep: scale={self.scale} seed={self.seed} "
            f"window={self.window_s}s persistence={self.persistence} "
            f"train_rows={self.train_rows}"
        ]
        for m in self.missions:
            anomalies = sum(1 for w in m.windows if w.condition != "Normal")
            lines.append(
                f"  {m.scenario:18s} windows={len(m.windows):3d} "
                f"anomalous={anomalies:3d} verdict={m.final_verdict} "
                f"({m.final_condition})"
            )
        return "\n".join(lines)


def run_experiment2(
    scenario_kinds: tuple[str, ...] | None = None,
    scale: float = DEFAULT_SCALE,
    seed: int = 0,
    window_s: float = DEFAULT_WINDOW_S,
    persistence: int = DEFAULT_PERSISTENCE,
    hidden: int = DEFAULT_HIDDEN,
) -> Experiment2Report:
    """Train the classifier once, then diagnose one evaluation mission per
    scenario kind (seeded ``seed + kind_index``)."""
    if scenario_kinds is None:
        scenario_kinds = SCENARIO_KINDS
    unknown = [k for k in scenario_kinds if k not in SCENARIO_KINDS]
    if unknown:
        raise ValueError(f"unknown scenario kinds {unknown}")
    started = time.perf_counter()
    model, train_rows = train_condition_classifier(scale=scale, seed=seed, hidden=hidden)
    train_s = time.perf_counter() - started

    missions = []
    for kind in scenario_kinds:
        scenario = FaultScenario(kind=kind, seed=seed + SCENARIO_KINDS.index(kind))
        missions.append(
            run_mission(model, scenario, scale=scale, window_s=window_s, persistence=persistence)
        )
    return Experiment2Report(
        scale=scale,
        seed=seed,
        window_s=window_s,
        persistence=persistence,
        train_rows=train_rows,
        missions=tuple(missions),
        timing={"train_s": train_s, "total_s": time.perf_counter() - started},
    )
