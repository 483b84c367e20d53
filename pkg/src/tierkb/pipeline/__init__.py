"""End-to-end flows built on the learners, the knowledge base, and the
reasoner: configuration handling, the batch sample-identification flow, the
fault-injection mission sweep, the in-mission training variant, and the
storage/reasoning benchmarks."""

from .bench import (
    LinearFit,
    SpaceRow,
    SpaceTable,
    bench_space,
    bench_time,
    growth_exponent,
    linear_fit,
)
from .config import load_config, parse_config, resolve
from .experiment1 import Experiment1Report, run_experiment1
from .mission import (
    CONDITION_CLASSES,
    EXPECTED_VERDICTS,
    Experiment2Report,
    MissionDiagnoser,
    MissionReport,
    WindowDiagnosis,
    majority_label,
    prepare_mission_kb,
    run_experiment2,
    run_mission,
    train_condition_classifier,
    verdict_for,
    window_spans,
)
from .online import OnlineReport, QueuedWindow, WindowQueue, contrast_corpus, run_online

__all__ = [
    "CONDITION_CLASSES",
    "EXPECTED_VERDICTS",
    "Experiment1Report",
    "Experiment2Report",
    "LinearFit",
    "MissionDiagnoser",
    "MissionReport",
    "OnlineReport",
    "QueuedWindow",
    "SpaceRow",
    "SpaceTable",
    "WindowDiagnosis",
    "WindowQueue",
    "bench_space",
    "bench_time",
    "contrast_corpus",
    "growth_exponent",
    "linear_fit",
    "load_config",
    "majority_label",
    "parse_config",
    "prepare_mission_kb",
    "resolve",
    "run_experiment1",
    "run_experiment2",
    "run_mission",
    "run_online",
    "train_condition_classifier",
    "verdict_for",
    "window_spans",
]
