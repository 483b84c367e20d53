import functools

import numpy as np
import pytest

from tierkb.dataset import (
    NOMINAL,
    NUMERIC,
    AttributeSpec,
    Dataset,
    DatasetSchema,
    Instance,
    load_glass,
)
from tierkb.kb import (
    BUILTIN_OPS,
    GLASS_PROPERTY_MAP,
    GLASS_SAMPLE,
    Builtin,
    ClassAssertion,
    ClassAtom,
    DataAtom,
    build_glass_ontology,
    build_jackal_ontology,
)
from tierkb.learners import J48Params, train_j48
from tierkb.learners.tree import DecisionTree, Leaf, Split
from tierkb.reasoner import apply_rules
from tierkb.rulegen import (
    compile_model_predictions,
    compile_tree_to_rules,
    make_threshold_rule,
    review_rules,
)

IDENTITY_GLASS_CLASSES = {c: c for c in load_glass().schema.class_values}


def fired_heads(rules, values_by_prop):
    """Replay rule bodies against a {data property -> value} row; class-atom
    guards are taken as satisfied. Returns the head classes of firing rules."""
    heads = []
    for rule in rules:
        binding = {}
        ok = True
        for atom in rule.body:
            if isinstance(atom, DataAtom):
                binding[atom.value] = values_by_prop[atom.prop]
            elif isinstance(atom, Builtin):
                left = binding[atom.left] if isinstance(atom.left, str) else atom.left
                right = binding[atom.right] if isinstance(atom.right, str) else atom.right
                if not BUILTIN_OPS[atom.op](left, right):
                    ok = False
                    break
        if ok:
            heads.append(rule.head.cls)
    return heads


@functools.lru_cache(maxsize=1)
def glass_tree():
    return train_j48(load_glass())


def random_dataset(rng, n_rows=60, n_attrs=3, n_classes=3):
    class_values = tuple(f"c{i}" for i in range(n_classes))
    schema = DatasetSchema(
        attributes=tuple(AttributeSpec(f"a{i}", NUMERIC) for i in range(n_attrs)),
        class_attribute=AttributeSpec("label", NOMINAL, values=class_values),
    )
    values = rng.normal(size=(n_rows, n_attrs))
    labels = rng.integers(0, n_classes, size=n_rows)
    instances = tuple(
        Instance(values=tuple(float(v) for v in row), label=class_values[y])
        for row, y in zip(values, labels)
    )
    return Dataset(schema=schema, instances=instances, provenance="synthetic")


def small_schema():
    return DatasetSchema(
        attributes=(AttributeSpec("depth", NUMERIC), AttributeSpec("width", NUMERIC)),
        class_attribute=AttributeSpec("label", NOMINAL, values=("low", "high")),
    )


class TestCompileTree:
    def test_glass_rules_replay_every_row(self):
        tree = glass_tree()
        rules = compile_tree_to_rules(tree, GLASS_PROPERTY_MAP, IDENTITY_GLASS_CLASSES)
        assert [r.name for r in rules] == [f"tree_rule_{k}" for k in range(1, len(rules) + 1)]
        for instance in load_glass().instances:
            row = {
                GLASS_PROPERTY_MAP[a.name]: v
                for a, v in zip(tree.schema.attributes, instance.values)
            }
            heads = fired_heads(rules, row)
            assert heads == [tree.predict_label(instance.values)]

    def test_repeated_attribute_reuses_one_binding(self):
        tree = DecisionTree(
            root=Split(
                attribute=0,
                threshold=5.0,
                left=Split(
                    attribute=0,
                    threshold=2.0,
                    left=Leaf("low", 0, (4.0, 0.0)),
                    right=Leaf("high", 1, (0.0, 3.0)),
                ),
                right=Leaf("high", 1, (1.0, 6.0)),
            ),
            schema=small_schema(),
            params=J48Params(),
        )
        rules = compile_tree_to_rules(
            tree, {"depth": "has_depth", "width": "has_width"}, {"low": "Low", "high": "High"}
        )
        assert rules[0].body == (
            DataAtom("has_depth", "?x", "?v1"),
            Builtin("lessThanOrEqual", "?v1", 5.0),
            Builtin("lessThanOrEqual", "?v1", 2.0),
        )
        assert rules[0].head == ClassAtom("Low", "?x")
        assert rules[1].body == (
            DataAtom("has_depth", "?x", "?v1"),
            Builtin("lessThanOrEqual", "?v1", 5.0),
            Builtin("greaterThan", "?v1", 2.0),
        )
        assert rules[2].body == (
            DataAtom("has_depth", "?x", "?v1"),
            Builtin("greaterThan", "?v1", 5.0),
        )
        assert rules[2].head == ClassAtom("High", "?x")

    def test_single_leaf_needs_base_guard(self):
        tree = DecisionTree(
            root=Leaf("low", 0, (5.0, 1.0)), schema=small_schema(), params=J48Params()
        )
        maps = ({"depth": "has_depth", "width": "has_width"}, {"low": "Low", "high": "High"})
        with pytest.raises(ValueError):
            compile_tree_to_rules(tree, *maps)
        rules = compile_tree_to_rules(tree, *maps, base_class="Thing")
        assert rules == [
            type(rules[0])(
                name="tree_rule_1", body=(ClassAtom("Thing", "?x"),), head=ClassAtom("Low", "?x")
            )
        ]

    def test_incomplete_maps_rejected(self):
        tree = glass_tree()
        partial_props = dict(GLASS_PROPERTY_MAP)
        del partial_props["Mg"]
        with pytest.raises(ValueError):
            compile_tree_to_rules(tree, partial_props, IDENTITY_GLASS_CLASSES)
        partial_classes = dict(IDENTITY_GLASS_CLASSES)
        del partial_classes["headlamps"]
        with pytest.raises(ValueError):
            compile_tree_to_rules(tree, GLASS_PROPERTY_MAP, partial_classes)

    def test_random_trees_replay(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            data = random_dataset(rng)
            tree = train_j48(data)
            property_map = {a.name: f"has_{a.name}" for a in data.schema.attributes}
            class_map = {c: c for c in data.schema.class_values}
            rules = compile_tree_to_rules(tree, property_map, class_map, base_class="Row")
            for instance in data.instances:
                row = {
                    property_map[a.name]: v
                    for a, v in zip(data.schema.attributes, instance.values)
                }
                assert fired_heads(rules, row) == [tree.predict_label(instance.values)]


class TestModelPredictions:
    def test_assertions_match_model_argmax(self):
        tree = glass_tree()
        data = load_glass()
        assertions = compile_model_predictions(tree, data, IDENTITY_GLASS_CLASSES)
        assert len(assertions) == len(data)
        for k, (assertion, instance) in enumerate(zip(assertions, data.instances), start=1):
            assert assertion == ClassAssertion(f"sample_{k}", tree.predict_label(instance.values))

    def test_class_map_must_cover_model(self):
        partial = dict(IDENTITY_GLASS_CLASSES)
        del partial["containers"]
        with pytest.raises(ValueError):
            compile_model_predictions(glass_tree(), load_glass(), partial)


class TestThresholdRule:
    def test_structure(self):
        kb = build_jackal_ontology()
        rule = make_threshold_rule(
            "overheat_watch",
            kb,
            ref_individual="ind_REF_left_motor_temperature",
            ref_property="reference_value",
            live_property="temperature",
            comparator="greaterThan",
            head_class="state2",
        )
        assert rule.body == (
            DataAtom("reference_value", "ind_REF_left_motor_temperature", "?vref"),
            DataAtom("temperature", "?x", "?vlive"),
            Builtin("greaterThan", "?vlive", "?vref"),
        )
        assert rule.head == ClassAtom("state2", "?x")

    def test_fires_exactly_per_comparator_semantics(self):
        for comparator, op in BUILTIN_OPS.items():
            for live in (50.0, 55.0, 60.0):
                kb = build_jackal_ontology()
                kb.add_rule(
                    make_threshold_rule(
                        "watch",
                        kb,
                        ref_individual="ind_REF_left_motor_temperature",
                        ref_property="reference_value",
                        live_property="temperature",
                        comparator=comparator,
                        head_class="state2",
                    )
                )
                kb.assert_data("temperature", "ind_left_motor", live)
                apply_rules(kb)
                derived = ClassAssertion("ind_left_motor", "state2") in kb.assertions
                assert derived == op(live, 55.0), (comparator, live)

    def test_undeclared_references_rejected(self):
        kb = build_jackal_ontology()
        with pytest.raises(ValueError):
            make_threshold_rule(
                "r", kb, "ghost", "reference_value", "temperature", "greaterThan", "state2"
            )
        with pytest.raises(ValueError):
            make_threshold_rule(
                "r",
                kb,
                "ind_REF_status_alarm",
                "ghost_prop",
                "temperature",
                "greaterThan",
                "state2",
            )
        with pytest.raises(ValueError):
            make_threshold_rule(
                "r",
                kb,
                "ind_REF_status_alarm",
                "reference_value",
                "temperature",
                "greaterThan",
                "GhostState",
            )


class TestReviewRules:
    def test_auto_mode_approves_all(self, tmp_path):
        rules = compile_tree_to_rules(glass_tree(), GLASS_PROPERTY_MAP, IDENTITY_GLASS_CLASSES)
        log = tmp_path / "review.log"
        approved = review_rules(rules, mode="auto", log_path=str(log))
        assert approved == rules
        lines = log.read_text().splitlines()
        assert lines == [f"approve {r.name}" for r in rules]

    def test_unknown_mode_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            review_rules([], mode="committee", log_path=str(tmp_path / "x.log"))

    def test_interactive_approve_reject_edit(self, tmp_path):
        from tierkb.kb.model import Rule

        kb = build_glass_ontology()
        rules = [
            Rule(
                name=f"r{i}",
                body=(DataAtom("hasRI", "?x", "?v"), Builtin("greaterThan", "?v", 1.5)),
                head=ClassAtom("headlamps", "?x"),
            )
            for i in range(1, 4)
        ]
        answers = iter(
            [
                "x",  # unrecognized -> re-prompt
                "a",
                "e garbage",  # malformed -> re-prompt
                "e rule r2b: hasNa(?x,?v) ^ lessThan(?v,10.0) -> containers(?x)",
                "r",
            ]
        )
        shown = []
        log = tmp_path / "review.log"
        approved = review_rules(
            rules,
            mode="interactive",
            log_path=str(log),
            kb=kb,
            input_fn=lambda prompt: next(answers),
            output_fn=shown.append,
        )
        assert [r.name for r in approved] == ["r1", "r2b"]
        assert approved[1].body[0] == DataAtom("hasNa", "?x", "?v")
        assert any(line.startswith("rejected edit:") for line in shown)
        assert "unrecognized answer" in shown
        lines = log.read_text().splitlines()
        assert lines[0] == "approve r1"
        assert lines[1].startswith("edit r2 -> rule r2b:")
        assert lines[2] == "reject r3"

    def test_log_appends_across_calls(self, tmp_path):
        from tierkb.kb.model import Rule

        rule = Rule(
            name="keep",
            body=(DataAtom("hasRI", "?x", "?v"), Builtin("greaterThan", "?v", 1.5)),
            head=ClassAtom("headlamps", "?x"),
        )
        log = tmp_path / "review.log"
        review_rules([rule], mode="auto", log_path=str(log))
        review_rules([rule], mode="auto", log_path=str(log))
        assert log.read_text().splitlines() == ["approve keep", "approve keep"]
