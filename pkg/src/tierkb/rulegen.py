"""Coupling compiler: turns trained-model knowledge into knowledge-base form.

Decision trees compile to one Horn rule per root-to-leaf path (transparent
models); other classifiers couple through per-instance class assertions of
their predictions (opaque models). A review hook lets a human approve,
reject, or edit compiled rules before they enter a knowledge base.
"""

from __future__ import annotations

import numpy as np

from .dataset import Dataset
from .errors import RuleValidationError
from .kb.model import (
    Builtin,
    ClassAssertion,
    ClassAtom,
    DataAtom,
    KnowledgeBase,
    Rule,
)
from .learners import predict
from .learners.tree import DecisionTree

SUBJECT_VAR = "?x"


def compile_tree_to_rules(
    tree: DecisionTree,
    property_map: dict[str, str],
    class_map: dict[str, str],
    base_class: str | None = None,
) -> list[Rule]:
    """One rule per leaf, named ``tree_rule_<k>`` in left-to-right leaf order.

    Each split on the path contributes a value-binding data atom (emitted once
    per attribute) and a comparison builtin: ``lessThanOrEqual`` on the <=
    branch, ``greaterThan`` on the > branch. The head is the class atom of the
    leaf's mapped class. A single-leaf tree compiles to one rule guarded only
    by the base-class atom (default: the tree schema's class-attribute-free
    root concept must be supplied via ``base_class``).
    """
    feature_names = [a.name for a in tree.schema.attributes]
    missing = [n for n in feature_names if n not in property_map]
    if missing:
        raise ValueError(f"property map misses attributes {missing}")
    missing_classes = [c for c in tree.schema.class_values if c not in class_map]
    if missing_classes:
        raise ValueError(f"class map misses classes {missing_classes}")
    paths = tree.paths()
    if not paths:
        raise ValueError("tree has no leaves")
    rules = []
    for k, (conditions, leaf) in enumerate(paths, start=1):
        value_vars: dict[str, str] = {}
        atoms: list = []
        for attr_index, threshold, is_le in conditions:
            attr = feature_names[attr_index]
            var = value_vars.get(attr)
            if var is None:
                var = f"?v{len(value_vars) + 1}"
                value_vars[attr] = var
                atoms.append(DataAtom(prop=property_map[attr], subject=SUBJECT_VAR, value=var))
            op = "lessThanOrEqual" if is_le else "greaterThan"
            atoms.append(Builtin(op=op, left=var, right=float(threshold)))
        if not atoms:
            if base_class is None:
                raise ValueError("single-leaf tree needs a base_class guard atom")
            atoms.append(ClassAtom(cls=base_class, term=SUBJECT_VAR))
        head = ClassAtom(cls=class_map[leaf.label], term=SUBJECT_VAR)
        rules.append(Rule(name=f"tree_rule_{k}", body=tuple(atoms), head=head))
    return rules


def compile_model_predictions(
    model, data: Dataset, class_map: dict[str, str]
) -> list[ClassAssertion]:
    """One asserted class per instance: the model's argmax prediction mapped
    through ``class_map``, attached to the generated ``sample_<k>`` names that
    ``populate_into_ontology`` gives the same instances."""
    missing_classes = [c for c in model.schema.class_values if c not in class_map]
    if missing_classes:
        raise ValueError(f"class map misses classes {missing_classes}")
    class_values = model.schema.class_values
    out = []
    for k, instance in enumerate(data.instances, start=1):
        probs = predict(model, instance)
        label = class_values[int(np.argmax(probs))]
        out.append(ClassAssertion(individual=f"sample_{k}", cls=class_map[label]))
    return out


def make_threshold_rule(
    name: str,
    kb: KnowledgeBase,
    ref_individual: str,
    ref_property: str,
    live_property: str,
    comparator: str,
    head_class: str,
) -> Rule:
    """Reference-versus-live comparison rule: bind the stored reference value
    and the live value, compare live against reference, classify the live
    subject into ``head_class`` when the comparison holds."""
    if ref_individual not in kb.individuals:
        raise ValueError(f"undeclared reference individual {ref_individual!r}")
    for prop in (ref_property, live_property):
        if prop not in kb.data_properties:
            raise ValueError(f"undeclared data property {prop!r}")
    if head_class not in kb.classes:
        raise ValueError(f"undeclared class {head_class!r}")
    rule = Rule(
        name=name,
        body=(
            DataAtom(prop=ref_property, subject=ref_individual, value="?vref"),
            DataAtom(prop=live_property, subject="?x", value="?vlive"),
            Builtin(op=comparator, left="?vlive", right="?vref"),
        ),
        head=ClassAtom(cls=head_class, term="?x"),
    )
    kb.validate_rule(rule)
    return rule


def review_rules(
    rules: list[Rule],
    mode: str = "auto",
    log_path: str = "rules_review.log",
    kb: KnowledgeBase | None = None,
    input_fn=input,
    output_fn=print,
) -> list[Rule]:
    """Human gate between compilation and the knowledge base.

    ``auto`` approves everything; ``interactive`` shows each rule and accepts
    ``a`` (approve), ``r`` (reject), or ``e <rule text>`` (replace with the
    edited rule, reparsed and revalidated; malformed edits re-prompt). Every
    decision is appended to ``log_path``, one line per rule.
    """
    if mode not in ("auto", "interactive"):
        raise ValueError(f"unknown review mode {mode!r}")
    decisions: list[str] = []
    approved: list[Rule] = []
    if mode == "auto":
        for rule in rules:
            approved.append(rule)
            decisions.append(f"approve {rule.name}")
    else:
        from .kb.text import parse_kb, serialize_kb

        for rule in rules:
            output_fn(str(rule))
            while True:
                answer = input_fn("approve/reject/edit [a/r/e <text>]: ").strip()
                if answer == "a":
                    approved.append(rule)
                    decisions.append(f"approve {rule.name}")
                    break
                if answer == "r":
                    decisions.append(f"reject {rule.name}")
                    break
                if answer.startswith("e ") or answer.startswith("e\t"):
                    edited_text = answer[2:].strip()
                    try:
                        base = kb.copy() if kb is not None else KnowledgeBase()
                        base.rules.clear()
                        context = serialize_kb(base) if kb is not None else ""
                        reparsed = parse_kb(context + edited_text + "\n")
                        if len(reparsed.rules) != 1:
                            raise RuleValidationError("edit must contain exactly one rule")
                        (edited,) = reparsed.rules.values()
                    except Exception as exc:
                        output_fn(f"rejected edit: {exc}")
                        continue
                    approved.append(edited)
                    decisions.append(f"edit {rule.name} -> {edited}")
                    break
                output_fn("unrecognized answer")
    with open(log_path, "a", encoding="utf-8") as fh:
        for line in decisions:
            fh.write(line + "\n")
    return approved
