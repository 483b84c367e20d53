import numpy as np
import pytest

import tierkb.pipeline.online as online
from tierkb.dataset import FAULT_KINDS, FaultScenario
from tierkb.errors import DivergenceError
from tierkb.kb import ClassAtom
from tierkb.pipeline.mission import CONDITION_CLASSES, mission_dataset, VERDICT_EMERGENCY
from tierkb.pipeline.online import (
    QueuedWindow,
    WindowQueue,
    contrast_corpus,
    fallback_escalation_rule,
    run_online,
)


class TestWindowQueue:
    def test_capacity_validation(self):
        with pytest.raises(ValueError):
            WindowQueue(0)

    def test_fifo_order(self):
        q = WindowQueue(3)
        for k in range(3):
            q.push(k)
        assert len(q) == 3
        assert [q.pop(), q.pop(), q.pop()] == [0, 1, 2]
        assert q.pop() is None
        assert q.dropped == []

    def test_overflow_drops_oldest(self):
        q = WindowQueue(2)
        for k in range(5):
            q.push(k)
        assert q.dropped == [0, 1, 2]
        assert [q.pop(), q.pop()] == [3, 4]
        assert len(q) == 0


class TestFallbackRule:
    def test_shape_and_validity_against_mission_kb(self):
        rule = fallback_escalation_rule()
        assert rule.body == (ClassAtom("alarmed_window", "?x"),)
        assert rule.head == ClassAtom("UpNormalLidarInterrupt", "?x")
        from tierkb.pipeline.mission import prepare_mission_kb

        prepare_mission_kb().validate_rule(rule)


class TestContrastCorpus:
    def test_covers_every_condition(self):
        live, _ = mission_dataset(FaultScenario(kind="baseline", seed=0), scale=0.02)
        corpus = contrast_corpus(live.schema, scale=0.02, seed=0)
        assert corpus.schema.attributes == live.schema.attributes
        labels = set(corpus.labels())
        assert labels == set(CONDITION_CLASSES)
        assert len(corpus) > len(live) * (len(FAULT_KINDS))

    def test_schema_mismatch_rejected(self):
        from tierkb.dataset import GLASS_SCHEMA

        with pytest.raises(ValueError):
            contrast_corpus(GLASS_SCHEMA, scale=0.02, seed=0)


class TestRunOnline:
    def test_train_fraction_validation(self):
        with pytest.raises(ValueError):
            run_online(train_fraction=0.0)
        with pytest.raises(ValueError):
            run_online(train_fraction=1.0)

    def test_baseline_mission_stays_normal(self):
        report = run_online(kind="baseline", seed=0)
        assert report.trained_in_loop
        assert not report.fallback
        assert report.train_rows > report.contrast_rows > 0
        assert report.final_verdict == "Normal"
        assert report.consistent
        assert report.dropped_windows == 0
        # training happens after the prefix: early windows carry no classifier
        # conditions other than what the rules say, later ones are classified
        assert len(report.windows) >= 10
        payload = report.to_dict()
        assert payload["scenario"] == "baseline"
        assert payload["windows"][0]["individual"] == "win_0"

    def test_fault_mission_detected_after_in_loop_training(self):
        report = run_online(kind="unseenObstacle", seed=0)
        assert report.trained_in_loop
        assert report.final_verdict == VERDICT_EMERGENCY
        assert report.final_condition == "UpNormalUnseenObstacle"
        assert report.consistent

    def test_small_queue_drops_backlog(self):
        report = run_online(kind="baseline", seed=0, queue_capacity=2)
        assert report.dropped_windows > 0
        assert report.dropped_indices == tuple(range(report.dropped_windows))
        full = run_online(kind="baseline", seed=0)
        assert len(report.windows) == len(full.windows) - report.dropped_windows

    def test_divergence_falls_back_to_rules_only(self, monkeypatch):
        def exploding_train(dataset, params):
            raise DivergenceError("loss became non-finite at epoch 3", epoch=3)

        monkeypatch.setattr(online, "train_mlp", exploding_train)
        report = run_online(kind="lidarInterrupt", seed=0)
        assert report.fallback
        assert not report.trained_in_loop
        assert "non-finite" in report.fallback_reason
        # degraded mode still names the one condition the thresholds can see:
        # alarmed windows escalate through the fallback rule
        assert report.final_condition == "UpNormalLidarInterrupt"
        assert report.final_verdict == "LidarFaulty"
        anomalous = [w for w in report.windows if w.condition != "Normal"]
        assert anomalous and all("alarmed_window" in w.symptoms for w in anomalous)

    def test_divergence_on_quiet_mission_stays_normal(self, monkeypatch):
        monkeypatch.setattr(
            online,
            "train_mlp",
            lambda dataset, params: (_ for _ in ()).throw(DivergenceError("diverged", epoch=1)),
        )
        report = run_online(kind="baseline", seed=0)
        assert report.fallback
        assert report.final_verdict == "Normal"
