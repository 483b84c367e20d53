"""Forward-chaining inference to fixpoint over a knowledge base.

One saturation engine drives both taxonomy/property-characteristic closure
and Horn-rule application: each iteration matches axioms (and, for
``apply_rules``, rule bodies) only against facts new since the previous
iteration, so reaching the fixpoint costs work proportional to what was
derived rather than to the whole store. Derivations within an iteration are
sorted before insertion, which makes traces and provenance reproducible
across processes regardless of hash randomization.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field

from .errors import KbIntegrityError
from .kb.model import (
    BUILTIN_OPS,
    PROVENANCE_CLOSURE,
    Assertion,
    Builtin,
    ClassAssertion,
    ClassAtom,
    DataAssertion,
    DataAtom,
    KnowledgeBase,
    ObjectAssertion,
    ObjectAtom,
    Rule,
    RuleAtom,
    is_variable,
    rule_provenance,
)


@dataclass(frozen=True)
class TraceEntry:
    assertion: Assertion
    source: str
    iteration: int

    def __str__(self):
        return f"iter {self.iteration}: {self.assertion} <= {self.source}"


@dataclass
class InferenceTrace:
    """Ordered log of derived assertions with their producing axiom or rule
    and the saturation iteration that added them (indices nondecreasing)."""

    entries: list[TraceEntry] = field(default_factory=list)

    def to_text(self) -> str:
        return "".join(f"{entry}\n" for entry in self.entries)

    def for_individual(self, name: str) -> list[TraceEntry]:
        out = []
        for entry in self.entries:
            a = entry.assertion
            if isinstance(a, ClassAssertion):
                mentioned = (a.individual,)
            elif isinstance(a, ObjectAssertion):
                mentioned = (a.subject, a.obj)
            else:
                mentioned = (a.subject,)
            if name in mentioned:
                out.append(entry)
        return out

    def __len__(self):
        return len(self.entries)


class _Indexes:
    """Incremental fact indexes over one knowledge base."""

    def __init__(self, kb: KnowledgeBase):
        self.kb = kb
        self.ancestors = {name: frozenset(kb.ancestors(name)) for name in kb.classes}
        self.members: dict[str, set[str]] = {name: set() for name in kb.classes}
        self.classes_of: dict[str, set[str]] = {name: set() for name in kb.individuals}
        self.obj_out: dict[str, dict[str, set[str]]] = {p: {} for p in kb.object_properties}
        self.obj_in: dict[str, dict[str, set[str]]] = {p: {} for p in kb.object_properties}
        self.data_vals: dict[str, dict[str, set[float]]] = {p: {} for p in kb.data_properties}
        for assertion in kb.assertions:
            self.insert(assertion)

    def insert(self, assertion: Assertion):
        if isinstance(assertion, ClassAssertion):
            self.members[assertion.cls].add(assertion.individual)
            self.classes_of[assertion.individual].add(assertion.cls)
        elif isinstance(assertion, ObjectAssertion):
            self.obj_out[assertion.prop].setdefault(assertion.subject, set()).add(assertion.obj)
            self.obj_in[assertion.prop].setdefault(assertion.obj, set()).add(assertion.subject)
        else:
            self.data_vals[assertion.prop].setdefault(assertion.subject, set()).add(
                assertion.value
            )


def _closure_candidates(idx: _Indexes, delta: list[Assertion]) -> list[tuple[Assertion, str]]:
    kb = idx.kb
    out: list[tuple[Assertion, str]] = []
    reflexive_by_domain: dict[str, list[str]] = {}
    expands: list = []
    for prop in kb.object_properties.values():
        if prop.has("reflexive"):
            reflexive_by_domain.setdefault(prop.domain, []).append(prop.name)
        if prop.expands_to is not None:
            expands.append(prop)
    for fact in delta:
        if isinstance(fact, ClassAssertion):
            for parent in idx.ancestors[fact.cls]:
                out.append((ClassAssertion(fact.individual, parent), "closure(subclass)"))
            for prop_name in reflexive_by_domain.get(fact.cls, ()):
                out.append(
                    (ObjectAssertion(prop_name, fact.individual, fact.individual), "closure(reflexive)")
                )
            for prop in expands:
                if fact.cls == prop.domain:
                    for y in idx.members[prop.range]:
                        out.append(
                            (ObjectAssertion(prop.expands_to, fact.individual, y), "closure(expansion)")
                        )
                if fact.cls == prop.range:
                    for x in idx.members[prop.domain]:
                        out.append(
                            (ObjectAssertion(prop.expands_to, x, fact.individual), "closure(expansion)")
                        )
        elif isinstance(fact, ObjectAssertion):
            prop = kb.object_properties[fact.prop]
            out.append((ClassAssertion(fact.subject, prop.domain), "closure(domain)"))
            out.append((ClassAssertion(fact.obj, prop.range), "closure(range)"))
            if prop.has("symmetric"):
                out.append((ObjectAssertion(fact.prop, fact.obj, fact.subject), "closure(symmetric)"))
            if prop.has("transitive"):
                for c in idx.obj_out[fact.prop].get(fact.obj, ()):
                    out.append((ObjectAssertion(fact.prop, fact.subject, c), "closure(transitive)"))
                for z in idx.obj_in[fact.prop].get(fact.subject, ()):
                    out.append((ObjectAssertion(fact.prop, z, fact.obj), "closure(transitive)"))
            if prop.inverse is not None:
                out.append(
                    (ObjectAssertion(prop.inverse, fact.obj, fact.subject), "closure(inverse)")
                )
    return out


def _match_atom(idx: _Indexes, atom: RuleAtom, binding: dict):
    """Yield extended bindings for one non-builtin atom against the full
    fact indexes, consistent with the given partial binding."""

    def value_of(term):
        if is_variable(term):
            return binding.get(term)
        return term

    if isinstance(atom, ClassAtom):
        t = value_of(atom.term)
        if t is None:
            for ind in idx.members[atom.cls]:
                yield {**binding, atom.term: ind}
        elif t in idx.members[atom.cls]:
            yield binding
    elif isinstance(atom, ObjectAtom):
        s, o = value_of(atom.subject), value_of(atom.obj)
        if s is not None:
            objs = idx.obj_out[atom.prop].get(s, ())
            if o is not None:
                if o in objs:
                    yield binding
            else:
                for obj in objs:
                    yield {**binding, atom.obj: obj}
        elif o is not None:
            for subj in idx.obj_in[atom.prop].get(o, ()):
                yield {**binding, atom.subject: subj}
        else:
            for subj, objs in idx.obj_out[atom.prop].items():
                for obj in objs:
                    extended = {**binding, atom.subject: subj}
                    if atom.obj == atom.subject:
                        if obj == subj:
                            yield extended
                    else:
                        yield {**extended, atom.obj: obj}
    elif isinstance(atom, DataAtom):
        s, v = value_of(atom.subject), value_of(atom.value)
        if s is not None:
            values = idx.data_vals[atom.prop].get(s, ())
            if v is not None:
                if v in values:
                    yield binding
            else:
                for value in values:
                    yield {**binding, atom.value: value}
        else:
            for subj, values in idx.data_vals[atom.prop].items():
                if v is not None:
                    if v in values:
                        yield {**binding, atom.subject: subj}
                else:
                    for value in values:
                        yield {**binding, atom.subject: subj, atom.value: value}
    else:  # pragma: no cover - callers never pass builtins here
        raise TypeError("builtin atoms are evaluated, not matched")


def _seed_binding(atom: RuleAtom, fact: Assertion) -> dict | None:
    """Binding from unifying one non-builtin atom with one concrete fact."""
    if isinstance(atom, ClassAtom) and isinstance(fact, ClassAssertion):
        pairs = [(atom.cls, fact.cls), (atom.term, fact.individual)]
    elif isinstance(atom, ObjectAtom) and isinstance(fact, ObjectAssertion):
        pairs = [(atom.prop, fact.prop), (atom.subject, fact.subject), (atom.obj, fact.obj)]
    elif isinstance(atom, DataAtom) and isinstance(fact, DataAssertion):
        pairs = [(atom.prop, fact.prop), (atom.subject, fact.subject), (atom.value, fact.value)]
    else:
        return None
    binding: dict = {}
    for term, value in pairs:
        if is_variable(term):
            if binding.get(term, value) != value:
                return None
            binding[term] = value
        elif term != value:
            return None
    return binding


def _rule_candidates(
    idx: _Indexes, rules: list[Rule], delta: list[Assertion]
) -> list[tuple[Assertion, str]]:
    out: list[tuple[Assertion, str]] = []
    for rule in rules:
        source = f"rule({rule.name})"
        non_builtin = [i for i, atom in enumerate(rule.body) if not isinstance(atom, Builtin)]
        for seed_pos in non_builtin:
            seeds = []
            for fact in delta:
                binding = _seed_binding(rule.body[seed_pos], fact)
                if binding is not None:
                    seeds.append(binding)
            if not seeds:
                continue
            bindings = seeds
            for pos, atom in enumerate(rule.body):
                if pos == seed_pos or not bindings:
                    continue
                if isinstance(atom, Builtin):
                    op = BUILTIN_OPS[atom.op]
                    left = atom.left
                    right = atom.right
                    bindings = [
                        b
                        for b in bindings
                        if op(
                            b[left] if is_variable(left) else left,
                            b[right] if is_variable(right) else right,
                        )
                    ]
                else:
                    bindings = [
                        extended for b in bindings for extended in _match_atom(idx, atom, b)
                    ]
            head = rule.head
            for b in bindings:
                if isinstance(head, ClassAtom):
                    term = b[head.term] if is_variable(head.term) else head.term
                    out.append((ClassAssertion(term, head.cls), source))
                elif isinstance(head, ObjectAtom):
                    s = b[head.subject] if is_variable(head.subject) else head.subject
                    o = b[head.obj] if is_variable(head.obj) else head.obj
                    out.append((ObjectAssertion(head.prop, s, o), source))
                else:
                    s = b[head.subject] if is_variable(head.subject) else head.subject
                    v = b[head.value] if is_variable(head.value) else head.value
                    out.append((DataAssertion(head.prop, s, float(v)), source))
    return out


def _saturate(kb: KnowledgeBase, rules: list[Rule], trace: InferenceTrace | None) -> KnowledgeBase:
    idx = _Indexes(kb)
    delta = sorted(kb.assertions, key=lambda a: a.sort_key())
    iteration = 1
    while delta:
        candidates = _closure_candidates(idx, delta)
        if rules:
            candidates.extend(_rule_candidates(idx, rules, delta))
        fresh: dict[Assertion, str] = {}
        for assertion, source in sorted(
            candidates, key=lambda pair: (pair[0].sort_key(), pair[1])
        ):
            if assertion not in kb.assertions and assertion not in fresh:
                fresh[assertion] = source
        delta = []
        for assertion, source in fresh.items():
            provenance = (
                PROVENANCE_CLOSURE
                if source.startswith("closure(")
                else rule_provenance(source[len("rule(") : -1])
            )
            if isinstance(assertion, ClassAssertion):
                tagged = ClassAssertion(assertion.individual, assertion.cls, provenance)
            elif isinstance(assertion, ObjectAssertion):
                tagged = ObjectAssertion(assertion.prop, assertion.subject, assertion.obj, provenance)
            else:
                tagged = DataAssertion(assertion.prop, assertion.subject, assertion.value, provenance)
            kb.assertions.add(tagged)
            idx.insert(tagged)
            delta.append(tagged)
            if trace is not None:
                trace.entries.append(TraceEntry(tagged, source, iteration))
        iteration += 1
    return kb


def closure(kb: KnowledgeBase, trace: InferenceTrace | None = None) -> KnowledgeBase:
    """Saturate the store under the structural axioms, in place.

    Fixpoint of: subclass lifting of class assertions; domain/range typing
    from object assertions; symmetric, transitive, inverse, and reflexive
    property characteristics; and schema-level expansion of every property
    that declares an ``expands_to`` counterpart (the counterpart is asserted
    between all members of the property's domain and range classes).
    Additions carry closure provenance. Returns the same knowledge base.
    """
    kb.check_integrity()
    return _saturate(kb, [], trace)


def apply_rules(kb: KnowledgeBase) -> tuple[KnowledgeBase, InferenceTrace]:
    """Run the rule set and the structural axioms to their joint least
    fixpoint, in place; semi-naive, so each iteration only rematches against
    facts derived in the one before. Returns the store and the trace."""
    kb.check_integrity()
    trace = InferenceTrace()
    rules = [kb.rules[name] for name in sorted(kb.rules)]
    _saturate(kb, rules, trace)
    return kb, trace


@dataclass(frozen=True)
class ConflictReport:
    """One detected inconsistency: the kind of violation, the names involved
    (individual and classes, or subject and property), and the witnessing
    assertions, all present in the knowledge base."""

    kind: str
    culprits: tuple[str, ...]
    witnesses: tuple[Assertion, ...]

    def describe(self) -> str:
        facts = ", ".join(str(w) for w in self.witnesses)
        return f"{self.kind}: {' / '.join(self.culprits)} [{facts}]"


def find_conflicts(kb: KnowledgeBase) -> list[ConflictReport]:
    """All disjointness and functional-property violations, in canonical
    order (disjointness first; alphabetical within each kind). Runs closure
    on the store first."""
    closure(kb)
    idx = _Indexes(kb)
    out: list[ConflictReport] = []
    for a, b in sorted(kb.disjoint):
        for ind in sorted(idx.members[a] & idx.members[b]):
            out.append(
                ConflictReport(
                    kind="disjointness-violation",
                    culprits=(ind, a, b),
                    witnesses=(ClassAssertion(ind, a), ClassAssertion(ind, b)),
                )
            )
    for prop in sorted(kb.object_properties):
        if not kb.object_properties[prop].has("functional"):
            continue
        for subj in sorted(idx.obj_out[prop]):
            fillers = sorted(idx.obj_out[prop][subj])
            if len(fillers) > 1:
                out.append(
                    ConflictReport(
                        kind="functional-violation",
                        culprits=(subj, prop),
                        witnesses=tuple(ObjectAssertion(prop, subj, o) for o in fillers),
                    )
                )
    return out


def check_consistency(kb: KnowledgeBase) -> ConflictReport | None:
    """First conflict in canonical order, or None when the store is
    consistent. Runs closure on the store first."""
    conflicts = find_conflicts(kb)
    return conflicts[0] if conflicts else None


def query(kb: KnowledgeBase, pattern: RuleAtom) -> list[dict[str, str | float]]:
    """All bindings of a single-atom pattern against asserted plus inferred
    facts, sorted by the bound values in variable order. Constants in the
    pattern filter; builtins are not queryable."""
    if isinstance(pattern, Builtin):
        raise ValueError("builtin atoms cannot be queried")
    if isinstance(pattern, ClassAtom):
        if pattern.cls not in kb.classes:
            raise KbIntegrityError(f"undeclared class {pattern.cls!r}")
        terms = [pattern.term]
    elif isinstance(pattern, ObjectAtom):
        if pattern.prop not in kb.object_properties:
            raise KbIntegrityError(f"undeclared object property {pattern.prop!r}")
        terms = [pattern.subject, pattern.obj]
    else:
        if pattern.prop not in kb.data_properties:
            raise KbIntegrityError(f"undeclared data property {pattern.prop!r}")
        terms = [pattern.subject]
    for term in terms:
        if isinstance(term, str) and not is_variable(term) and term not in kb.individuals:
            raise KbIntegrityError(f"undeclared individual {term!r}")
    idx = _Indexes(kb)
    variables = sorted({t for t in _atom_terms(pattern) if is_variable(t)})
    results = [
        {v: b[v] for v in variables} for b in _match_atom(idx, pattern, {})
    ]
    unique = {tuple(str(b[v]) for v in variables): b for b in results}
    return [unique[key] for key in sorted(unique)]


def _atom_terms(atom: RuleAtom):
    if isinstance(atom, ClassAtom):
        return (atom.term,)
    if isinstance(atom, ObjectAtom):
        return (atom.subject, atom.obj)
    if isinstance(atom, DataAtom):
        return (atom.subject, atom.value)
    return (atom.left, atom.right)


@dataclass(frozen=True)
class BenchmarkRow:
    scale: int
    raw_bytes: int
    kb_bytes: int
    individuals: int
    assertions: int
    reason_ms: float


@dataclass(frozen=True)
class BenchmarkTable:
    rows: tuple[BenchmarkRow, ...]

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["scale", "raw_bytes", "kb_bytes", "individuals", "assertions", "reason_ms"])
        for row in self.rows:
            writer.writerow(
                [row.scale, row.raw_bytes, row.kb_bytes, row.individuals, row.assertions,
                 f"{row.reason_ms:.3f}"]
            )
        return out.getvalue()


def benchmark_reasoning(scales: list[int], seed: int | None = None) -> BenchmarkTable:
    """Reasoning wall time versus store size: populate the glass knowledge
    base with rule set at each scale factor, run the reasoner, and record raw
    input bytes, reasoned-store bytes, counts, and elapsed milliseconds."""
    from .dataset import GLASS_SEED, glass_csv_bytes, synthesize_glass
    from .kb.builders import (
        GLASS_PROPERTY_MAP,
        build_glass_ontology,
        populate_into_ontology,
    )
    from .kb.text import serialize_kb
    from .learners.tree import train_j48
    from .rulegen import compile_tree_to_rules

    if not scales or any(s <= 0 for s in scales):
        raise ValueError("scales must be positive")
    if list(scales) != sorted(scales):
        raise ValueError("scales must be ascending")
    base = synthesize_glass(seed=GLASS_SEED if seed is None else seed)
    tree = train_j48(base)
    rules = compile_tree_to_rules(
        tree, GLASS_PROPERTY_MAP, {c: c for c in base.schema.class_values}
    )
    rows = []
    for scale in scales:
        data = synthesize_glass(seed=GLASS_SEED if seed is None else seed, scale=scale)
        raw = len(glass_csv_bytes(data))
        kb = build_glass_ontology()
        for rule in rules:
            kb.add_rule(rule)
        populate_into_ontology(kb, data.without_labels(), GLASS_PROPERTY_MAP)
        start = time.perf_counter()
        apply_rules(kb)
        elapsed_ms = (time.perf_counter() - start) * 1000.0
        rows.append(
            BenchmarkRow(
                scale=scale,
                raw_bytes=raw,
                kb_bytes=len(serialize_kb(kb).encode("utf-8")),
                individuals=len(kb.individuals),
                assertions=len(kb.assertions),
                reason_ms=elapsed_ms,
            )
        )
    return BenchmarkTable(rows=tuple(rows))
