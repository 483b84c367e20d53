"""Versioned text serialization for trained models.

Format: UTF-8 lines, first line ``tierkb-model 1 <kind>`` with kind in
{tree, nb, mlp}, then the schema (one ``attribute`` line per input column,
one ``class_attribute`` line), then kind-specific sections. Floats are
written with repr() so a round trip within a version is value-exact;
attribute units are percent-encoded to keep the format line-oriented.
"""

from __future__ import annotations

import urllib.parse

import numpy as np

from ..dataset import NOMINAL, AttributeSpec, DatasetSchema
from ..errors import ModelFormatError
from .bayes import NaiveBayesModel
from .mlp import MlpModel, MlpParams
from .tree import DecisionTree, J48Params, Leaf, Split

FORMAT_VERSION = 1


def _schema_lines(schema: DatasetSchema) -> list[str]:
    lines = []
    for a in schema.attributes:
        line = f"attribute {a.name}"
        if a.unit is not None:
            line += f" unit={urllib.parse.quote(a.unit)}"
        lines.append(line)
    cls = schema.class_attribute
    lines.append(f"class_attribute {cls.name} values={','.join(cls.values)}")
    return lines


def _floats(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def save_model(model) -> bytes:
    """Serialize a trained tree/nb/mlp model into the versioned text format."""
    if isinstance(model, DecisionTree):
        kind, body = "tree", _tree_lines(model)
    elif isinstance(model, NaiveBayesModel):
        kind, body = "nb", _nb_lines(model)
    elif isinstance(model, MlpModel):
        kind, body = "mlp", _mlp_lines(model)
    else:
        raise TypeError(f"cannot serialize model of type {type(model).__name__}")
    lines = [f"tierkb-model {FORMAT_VERSION} {kind}"]
    lines.extend(_schema_lines(model.schema))
    lines.extend(body)
    lines.append("end")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _tree_lines(model: DecisionTree) -> list[str]:
    lines = [f"params min_leaf={model.params.min_leaf} confidence={repr(model.params.confidence)}"]

    def walk(node):
        if isinstance(node, Leaf):
            lines.append(f"leaf {node.label} {_floats(node.counts)}")
        else:
            lines.append(f"split {node.attribute} {repr(node.threshold)}")
            walk(node.left)
            walk(node.right)

    walk(model.root)
    return lines


def _nb_lines(model: NaiveBayesModel) -> list[str]:
    lines = [f"priors {_floats(model.priors)}"]
    for c in range(len(model.priors)):
        lines.append(f"means {c} {_floats(model.means[c])}")
        lines.append(f"vars {c} {_floats(model.variances[c])}")
    return lines


def _mlp_lines(model: MlpModel) -> list[str]:
    p = model.params
    lines = [
        "params "
        f"hidden={p.hidden} learning_rate={repr(p.learning_rate)} "
        f"momentum={repr(p.momentum)} epochs={p.epochs} seed={p.seed}",
        f"mean {_floats(model.input_mean)}",
        f"std {_floats(model.input_std)}",
    ]
    for j, row in enumerate(model.w1):
        lines.append(f"w1 {j} {_floats(row)}")
    lines.append(f"b1 {_floats(model.b1)}")
    for j, row in enumerate(model.w2):
        lines.append(f"w2 {j} {_floats(row)}")
    lines.append(f"b2 {_floats(model.b2)}")
    return lines


class _Reader:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0

    def peek(self) -> str | None:
        return self.lines[self.pos] if self.pos < len(self.lines) else None

    def next(self) -> str:
        line = self.peek()
        if line is None:
            raise ModelFormatError("unexpected end of model document", line=self.pos + 1)
        self.pos += 1
        return line

    def fail(self, message: str):
        raise ModelFormatError(f"line {self.pos}: {message}", line=self.pos)


def load_model(source):
    """Parse a model document produced by :func:`save_model`."""
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    reader = _Reader(text)
    header = reader.next().split()
    if len(header) != 3 or header[0] != "tierkb-model":
        reader.fail("expected 'tierkb-model <version> <kind>' header")
    if int(header[1]) != FORMAT_VERSION:
        reader.fail(f"unsupported model format version {header[1]}")
    kind = header[2]

    attributes = []
    while reader.peek() is not None and reader.peek().startswith("attribute "):
        parts = reader.next().split()
        unit = None
        for tok in parts[2:]:
            if tok.startswith("unit="):
                unit = urllib.parse.unquote(tok[5:])
        attributes.append(AttributeSpec(parts[1], unit=unit))
    cls_line = reader.next().split()
    if cls_line[0] != "class_attribute" or not cls_line[2].startswith("values="):
        reader.fail("expected class_attribute declaration")
    schema = DatasetSchema(
        attributes=tuple(attributes),
        class_attribute=AttributeSpec(
            cls_line[1], NOMINAL, values=tuple(cls_line[2][len("values="):].split(","))
        ),
    )

    if kind == "tree":
        model = _read_tree(reader, schema)
    elif kind == "nb":
        model = _read_nb(reader, schema)
    elif kind == "mlp":
        model = _read_mlp(reader, schema)
    else:
        reader.fail(f"unknown model kind {kind!r}")
    if reader.next() != "end":
        reader.fail("expected 'end' terminator")
    return model


def _kv(parts: list[str]) -> dict[str, str]:
    return dict(tok.split("=", 1) for tok in parts)


def _read_tree(reader: _Reader, schema: DatasetSchema) -> DecisionTree:
    parts = reader.next().split()
    if parts[0] != "params":
        reader.fail("expected tree params line")
    kv = _kv(parts[1:])
    params = J48Params(min_leaf=int(kv["min_leaf"]), confidence=float(kv["confidence"]))

    def read_node():
        parts = reader.next().split()
        if parts[0] == "leaf":
            label = parts[1]
            counts = tuple(float(v) for v in parts[2:])
            return Leaf(label=label, label_index=schema.class_values.index(label), counts=counts)
        if parts[0] == "split":
            attribute = int(parts[1])
            threshold = float(parts[2])
            left = read_node()
            right = read_node()
            return Split(attribute=attribute, threshold=threshold, left=left, right=right)
        reader.fail(f"expected 'split' or 'leaf', got {parts[0]!r}")

    return DecisionTree(root=read_node(), schema=schema, params=params)


def _read_nb(reader: _Reader, schema: DatasetSchema) -> NaiveBayesModel:
    parts = reader.next().split()
    if parts[0] != "priors":
        reader.fail("expected priors line")
    priors = tuple(float(v) for v in parts[1:])
    means = [None] * len(priors)
    variances = [None] * len(priors)
    for _ in range(len(priors)):
        m = reader.next().split()
        v = reader.next().split()
        if m[0] != "means" or v[0] != "vars" or m[1] != v[1]:
            reader.fail("expected paired means/vars lines")
        c = int(m[1])
        means[c] = tuple(float(x) for x in m[2:])
        variances[c] = tuple(float(x) for x in v[2:])
    return NaiveBayesModel(
        schema=schema, priors=priors, means=tuple(means), variances=tuple(variances)
    )


def _read_mlp(reader: _Reader, schema: DatasetSchema) -> MlpModel:
    parts = reader.next().split()
    if parts[0] != "params":
        reader.fail("expected mlp params line")
    kv = _kv(parts[1:])
    params = MlpParams(
        hidden=int(kv["hidden"]),
        learning_rate=float(kv["learning_rate"]),
        momentum=float(kv["momentum"]),
        epochs=int(kv["epochs"]),
        seed=int(kv["seed"]),
    )

    def vector(tag):
        parts = reader.next().split()
        if parts[0] != tag:
            reader.fail(f"expected {tag!r} line")
        return np.array([float(v) for v in parts[1:]])

    def matrix(tag, rows):
        out = []
        for j in range(rows):
            parts = reader.next().split()
            if parts[0] != tag or int(parts[1]) != j:
                reader.fail(f"expected {tag!r} row {j}")
            out.append([float(v) for v in parts[2:]])
        return np.array(out)

    mean = vector("mean")
    std = vector("std")
    w1 = matrix("w1", len(schema.attributes))
    b1 = vector("b1")
    w2 = matrix("w2", params.hidden)
    b2 = vector("b2")
    return MlpModel(
        schema=schema, params=params, input_mean=mean, input_std=std, w1=w1, b1=b1, w2=w2, b2=b2
    )
