import pytest

from tierkb.dataset import Dataset, Instance, load_glass
from tierkb.kb import GLASS_PROPERTY_MAP, build_glass_ontology, populate_into_ontology
from tierkb.learners import train_j48
from tierkb.pipeline import load_config, parse_config, resolve, run_experiment1
from tierkb.reasoner import apply_rules, check_consistency
from tierkb.rulegen import compile_tree_to_rules


class TestParseConfig:
    def test_pairs_comments_blanks(self):
        text = (
            "# run settings\n"
            "eval.folds = 10\n"
            "\n"
            "mission.run.scenario = flatTyre  # trailing comment\n"
            "eval.algo=j48\n"
        )
        assert parse_config(text) == {
            "eval.folds": "10",
            "mission.run.scenario": "flatTyre",
            "eval.algo": "j48",
        }

    def test_last_duplicate_wins(self):
        assert parse_config("a = 1\na = 2\n") == {"a": "2"}

    def test_value_may_contain_equals(self):
        assert parse_config("fmt = a=b\n") == {"fmt": "a=b"}

    def test_malformed_lines(self):
        with pytest.raises(ValueError):
            parse_config("just words\n")
        with pytest.raises(ValueError):
            parse_config(" = value\n")

    def test_load_config(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("eval.seed = 3\n")
        assert load_config(str(path)) == {"eval.seed": "3"}
        assert load_config(None) == {}


class TestResolve:
    def test_flag_beats_config_beats_default(self):
        config = {"eval.folds": "5"}
        assert resolve(config, "eval.folds", 7, 10, kind=int) == 7
        assert resolve(config, "eval.folds", None, 10, kind=int) == 5
        assert resolve({}, "eval.folds", None, 10, kind=int) == 10

    def test_casting(self):
        assert resolve({"k": "2.5"}, "k", None, 1.0, kind=float) == 2.5
        assert resolve({"k": "yes"}, "k", None, False, kind=bool) is True
        assert resolve({"k": "false"}, "k", None, True, kind=bool) is False
        assert resolve({"k": "plain"}, "k", None, "d") == "plain"

    def test_bad_casts(self):
        with pytest.raises(ValueError):
            resolve({"k": "many"}, "k", None, 1, kind=int)
        with pytest.raises(ValueError):
            resolve({"k": "maybe"}, "k", None, False, kind=bool)


class TestBatchGlassFlow:
    def test_full_agreement_on_bundled_table(self):
        report = run_experiment1()
        assert report.n_samples == 214
        assert report.rule_count >= 1
        assert report.agreement_rate == 1.0
        assert len(report.sample_types) == 214
        assert report.wall_time_s > 0.0
        summary = report.summary()
        assert "agreement with tree: 100.00 %" in summary
        assert "samples: 214" in summary

    def test_empty_dataset_short_circuits(self):
        empty = load_glass().subset([])
        report = run_experiment1(empty)
        assert report.n_samples == 0
        assert report.sample_types == {}
        assert report.agreement_rate == 1.0

    def test_conflicting_labels_detected_when_not_stripped(self):
        # the flow strips labels before population; this shows why: pinning
        # every sample to one type class while the rules claim otherwise
        # lands samples in two disjoint classes
        data = load_glass()
        pinned = Dataset(
            schema=data.schema,
            instances=tuple(
                Instance(values=i.values, label=data.schema.class_values[0])
                for i in data.instances
            ),
            provenance="relabeled",
        )
        tree = train_j48(data)
        kb = build_glass_ontology()
        for rule in compile_tree_to_rules(
            tree, GLASS_PROPERTY_MAP, {c: c for c in tree.schema.class_values}
        ):
            kb.add_rule(rule)
        populate_into_ontology(kb, pinned, GLASS_PROPERTY_MAP)
        apply_rules(kb)
        assert check_consistency(kb) is not None
