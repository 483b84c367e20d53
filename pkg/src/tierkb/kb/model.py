"""Knowledge-base store: ontology classes, properties, individuals,
assertions with provenance, and Horn rules with numeric builtins.

The store is monotonic: assertions are only ever added. Provenance tags every
assertion as hand-asserted ("asserted"), derived by a closure axiom
("closure"), or derived by a named rule ("rule:<name>"); provenance does not
participate in equality, so a fact derived twice is a single set member.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from ..errors import KbIntegrityError, RuleValidationError

PROVENANCE_ASSERTED = "asserted"
PROVENANCE_CLOSURE = "closure"


def rule_provenance(rule_name: str) -> str:
    return f"rule:{rule_name}"


CHARACTERISTICS = ("functional", "transitive", "symmetric", "reflexive")

BUILTIN_OPS = {
    "greaterThan": lambda a, b: a > b,
    "lessThan": lambda a, b: a < b,
    "greaterThanOrEqual": lambda a, b: a >= b,
    "lessThanOrEqual": lambda a, b: a <= b,
    "equal": lambda a, b: a == b,
    "notEqual": lambda a, b: a != b,
}

#: A rule term is a variable ("?x"), an individual name, or a float constant.
Term = str | float


def is_variable(term: Term) -> bool:
    return isinstance(term, str) and term.startswith("?")


@dataclass(frozen=True)
class OntologyClass:
    name: str
    parents: frozenset[str] = frozenset()
    annotations: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class ObjectPropertyDef:
    name: str
    domain: str
    range: str
    characteristics: frozenset[str] = frozenset()
    inverse: str | None = None
    expands_to: str | None = None

    def __post_init__(self):
        unknown = self.characteristics - set(CHARACTERISTICS)
        if unknown:
            raise KbIntegrityError(f"unknown property characteristics {sorted(unknown)}")

    def has(self, characteristic: str) -> bool:
        return characteristic in self.characteristics


@dataclass(frozen=True)
class DataPropertyDef:
    name: str
    domain: str
    value_type: str = "float"

    def __post_init__(self):
        if self.value_type != "float":
            raise KbIntegrityError(f"unsupported data value type {self.value_type!r}")


@dataclass(frozen=True)
class Individual:
    name: str
    classes: frozenset[str] = frozenset()


@dataclass(frozen=True)
class ClassAssertion:
    individual: str
    cls: str
    provenance: str = field(default=PROVENANCE_ASSERTED, compare=False)

    def sort_key(self):
        return (0, self.individual, self.cls, "")

    def __str__(self):
        return f"{self.cls}({self.individual})"


@dataclass(frozen=True)
class ObjectAssertion:
    prop: str
    subject: str
    obj: str
    provenance: str = field(default=PROVENANCE_ASSERTED, compare=False)

    def sort_key(self):
        return (1, self.prop, self.subject, self.obj)

    def __str__(self):
        return f"{self.prop}({self.subject},{self.obj})"


@dataclass(frozen=True)
class DataAssertion:
    prop: str
    subject: str
    value: float
    provenance: str = field(default=PROVENANCE_ASSERTED, compare=False)

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise KbIntegrityError(f"non-finite data value for {self.prop}({self.subject})")

    def sort_key(self):
        return (2, self.prop, self.subject, repr(self.value))

    def __str__(self):
        return f"{self.prop}({self.subject},{repr(self.value)})"


Assertion = ClassAssertion | ObjectAssertion | DataAssertion


def _term_str(term: Term) -> str:
    return repr(term) if isinstance(term, float) else term


@dataclass(frozen=True)
class ClassAtom:
    cls: str
    term: Term

    def __str__(self):
        return f"{self.cls}({_term_str(self.term)})"


@dataclass(frozen=True)
class ObjectAtom:
    prop: str
    subject: Term
    obj: Term

    def __str__(self):
        return f"{self.prop}({_term_str(self.subject)},{_term_str(self.obj)})"


@dataclass(frozen=True)
class DataAtom:
    prop: str
    subject: Term
    value: Term

    def __str__(self):
        return f"{self.prop}({_term_str(self.subject)},{_term_str(self.value)})"


@dataclass(frozen=True)
class Builtin:
    op: str
    left: Term
    right: Term

    def __post_init__(self):
        if self.op not in BUILTIN_OPS:
            raise RuleValidationError(f"unknown builtin {self.op!r}")

    def __str__(self):
        return f"{self.op}({_term_str(self.left)},{_term_str(self.right)})"


RuleAtom = ClassAtom | ObjectAtom | DataAtom | Builtin


def atom_variables(atom: RuleAtom) -> list[str]:
    if isinstance(atom, ClassAtom):
        terms = [atom.term]
    elif isinstance(atom, ObjectAtom):
        terms = [atom.subject, atom.obj]
    elif isinstance(atom, DataAtom):
        terms = [atom.subject, atom.value]
    else:
        terms = [atom.left, atom.right]
    return [t for t in terms if is_variable(t)]


@dataclass(frozen=True)
class Rule:
    name: str
    body: tuple[RuleAtom, ...]
    head: RuleAtom

    def __post_init__(self):
        if isinstance(self.head, Builtin):
            raise RuleValidationError(f"rule {self.name!r}: head may not be a builtin")
        if not any(not isinstance(a, Builtin) for a in self.body):
            raise RuleValidationError(f"rule {self.name!r}: body needs a non-builtin atom")
        bound: set[str] = set()
        data_bound: set[str] = set()
        for atom in self.body:
            if isinstance(atom, Builtin):
                for t in (atom.left, atom.right):
                    if is_variable(t):
                        if t not in bound:
                            raise RuleValidationError(
                                f"rule {self.name!r}: builtin uses unbound variable {t}"
                            )
                        if t not in data_bound:
                            raise RuleValidationError(
                                f"rule {self.name!r}: builtin variable {t} is not numeric"
                            )
                    elif not isinstance(t, float):
                        raise RuleValidationError(
                            f"rule {self.name!r}: builtin constant {t!r} is not numeric"
                        )
            else:
                if isinstance(atom, DataAtom) and is_variable(atom.value):
                    data_bound.add(atom.value)
                bound.update(atom_variables(atom))
        missing = set(atom_variables(self.head)) - bound
        if missing:
            raise RuleValidationError(
                f"rule {self.name!r}: head variables {sorted(missing)} unbound in body"
            )

    def __str__(self):
        body = " ^ ".join(str(a) for a in self.body)
        return f"rule {self.name}: {body} -> {self.head}"


class KnowledgeBase:
    """Mutable single-writer store with referential-integrity checking."""

    def __init__(self):
        self.classes: dict[str, OntologyClass] = {}
        self.object_properties: dict[str, ObjectPropertyDef] = {}
        self.data_properties: dict[str, DataPropertyDef] = {}
        self.disjoint: set[tuple[str, str]] = set()
        self.individuals: dict[str, Individual] = {}
        self.assertions: set[Assertion] = set()
        self.rules: dict[str, Rule] = {}

    # -- declarations -----------------------------------------------------

    def _require_class(self, name: str, context: str):
        if name not in self.classes:
            raise KbIntegrityError(f"{context}: undeclared class {name!r}")

    def _require_individual(self, name: str, context: str):
        if name not in self.individuals:
            raise KbIntegrityError(f"{context}: undeclared individual {name!r}")

    def add_class(self, name: str, parents=(), annotations=()) -> OntologyClass:
        if name in self.classes:
            raise KbIntegrityError(f"duplicate class {name!r}")
        for p in parents:
            self._require_class(p, f"class {name}")
        cls = OntologyClass(
            name=name, parents=frozenset(parents), annotations=tuple(sorted(annotations))
        )
        self.classes[name] = cls
        self._check_acyclic(name)
        return cls

    def add_subclass(self, child: str, parent: str):
        self._require_class(child, "subclass")
        self._require_class(parent, "subclass")
        cls = self.classes[child]
        self.classes[child] = replace(cls, parents=cls.parents | {parent})
        self._check_acyclic(child)

    def annotate_class(self, name: str, key: str, value: str):
        self._require_class(name, "annotation")
        cls = self.classes[name]
        self.classes[name] = replace(
            cls, annotations=tuple(sorted(set(cls.annotations) | {(key, value)}))
        )

    def _check_acyclic(self, start: str):
        seen: set[str] = set()
        stack = [start]
        while stack:
            node = stack.pop()
            for parent in self.classes[node].parents:
                if parent == start:
                    raise KbIntegrityError(f"subclass cycle through {start!r}")
                if parent not in seen:
                    seen.add(parent)
                    stack.append(parent)

    def ancestors(self, name: str) -> set[str]:
        """Strict superclasses, transitively."""
        self._require_class(name, "ancestors")
        out: set[str] = set()
        stack = list(self.classes[name].parents)
        while stack:
            node = stack.pop()
            if node not in out:
                out.add(node)
                stack.extend(self.classes[node].parents)
        return out

    def subclasses(self, name: str) -> set[str]:
        """Strict subclasses, transitively."""
        self._require_class(name, "subclasses")
        return {c for c in self.classes if name in self.ancestors(c)}

    def add_object_property(
        self,
        name: str,
        domain: str,
        range: str,
        characteristics=(),
        inverse: str | None = None,
        expands_to: str | None = None,
    ) -> ObjectPropertyDef:
        if name in self.object_properties or name in self.data_properties:
            raise KbIntegrityError(f"duplicate property {name!r}")
        self._require_class(domain, f"objprop {name}")
        self._require_class(range, f"objprop {name}")
        prop = ObjectPropertyDef(
            name=name,
            domain=domain,
            range=range,
            characteristics=frozenset(characteristics),
            inverse=inverse,
            expands_to=expands_to,
        )
        if prop.inverse is None:
            for other in self.object_properties.values():
                if other.inverse == name:
                    prop = replace(prop, inverse=other.name)
                    break
        self.object_properties[name] = prop
        if prop.inverse is not None:
            other = self.object_properties.get(prop.inverse)
            if other is not None:
                if other.inverse is None:
                    self.object_properties[prop.inverse] = replace(other, inverse=name)
                elif other.inverse != name:
                    raise KbIntegrityError(
                        f"objprop {name}: inverse {prop.inverse!r} already paired "
                        f"with {other.inverse!r}"
                    )
        return prop

    def add_data_property(self, name: str, domain: str) -> DataPropertyDef:
        if name in self.data_properties or name in self.object_properties:
            raise KbIntegrityError(f"duplicate property {name!r}")
        self._require_class(domain, f"dataprop {name}")
        prop = DataPropertyDef(name=name, domain=domain)
        self.data_properties[name] = prop
        return prop

    def add_disjoint(self, a: str, b: str):
        self._require_class(a, "disjoint")
        self._require_class(b, "disjoint")
        if a == b:
            raise KbIntegrityError(f"class {a!r} cannot be disjoint with itself")
        self.disjoint.add((min(a, b), max(a, b)))

    def add_individual(self, name: str, classes=()) -> Individual:
        if name in self.individuals:
            raise KbIntegrityError(f"duplicate individual {name!r}")
        for c in classes:
            self._require_class(c, f"individual {name}")
        ind = Individual(name=name, classes=frozenset(classes))
        self.individuals[name] = ind
        for c in classes:
            self.assertions.add(ClassAssertion(individual=name, cls=c))
        return ind

    # -- assertions -------------------------------------------------------

    def assert_class(self, individual: str, cls: str, provenance: str = PROVENANCE_ASSERTED):
        self._require_individual(individual, "class assertion")
        self._require_class(cls, "class assertion")
        assertion = ClassAssertion(individual=individual, cls=cls, provenance=provenance)
        if assertion not in self.assertions:
            self.assertions.add(assertion)
            if provenance == PROVENANCE_ASSERTED:
                ind = self.individuals[individual]
                self.individuals[individual] = replace(ind, classes=ind.classes | {cls})
        return assertion

    def assert_object(
        self, prop: str, subject: str, obj: str, provenance: str = PROVENANCE_ASSERTED
    ):
        if prop not in self.object_properties:
            raise KbIntegrityError(f"object assertion: undeclared property {prop!r}")
        self._require_individual(subject, "object assertion")
        self._require_individual(obj, "object assertion")
        assertion = ObjectAssertion(prop=prop, subject=subject, obj=obj, provenance=provenance)
        self.assertions.add(assertion)
        return assertion

    def assert_data(
        self, prop: str, subject: str, value: float, provenance: str = PROVENANCE_ASSERTED
    ):
        if prop not in self.data_properties:
            raise KbIntegrityError(f"data assertion: undeclared property {prop!r}")
        self._require_individual(subject, "data assertion")
        assertion = DataAssertion(
            prop=prop, subject=subject, value=float(value), provenance=provenance
        )
        self.assertions.add(assertion)
        return assertion

    def add_rule(self, rule: Rule):
        if rule.name in self.rules:
            raise KbIntegrityError(f"duplicate rule {rule.name!r}")
        self.validate_rule(rule)
        self.rules[rule.name] = rule

    def validate_rule(self, rule: Rule):
        """Check every vocabulary reference in the rule against declarations."""
        for atom in rule.body + (rule.head,):
            if isinstance(atom, ClassAtom):
                if atom.cls not in self.classes:
                    raise RuleValidationError(
                        f"rule {rule.name!r}: undeclared class {atom.cls!r}"
                    )
                self._check_rule_individual(rule, atom.term)
            elif isinstance(atom, ObjectAtom):
                if atom.prop not in self.object_properties:
                    raise RuleValidationError(
                        f"rule {rule.name!r}: undeclared object property {atom.prop!r}"
                    )
                self._check_rule_individual(rule, atom.subject)
                self._check_rule_individual(rule, atom.obj)
            elif isinstance(atom, DataAtom):
                if atom.prop not in self.data_properties:
                    raise RuleValidationError(
                        f"rule {rule.name!r}: undeclared data property {atom.prop!r}"
                    )
                self._check_rule_individual(rule, atom.subject)

    def _check_rule_individual(self, rule: Rule, term: Term):
        if isinstance(term, str) and not is_variable(term) and term not in self.individuals:
            raise RuleValidationError(f"rule {rule.name!r}: undeclared individual {term!r}")

    # -- views ------------------------------------------------------------

    def class_assertions(self) -> list[ClassAssertion]:
        return [a for a in self.assertions if isinstance(a, ClassAssertion)]

    def object_assertions(self) -> list[ObjectAssertion]:
        return [a for a in self.assertions if isinstance(a, ObjectAssertion)]

    def data_assertions(self) -> list[DataAssertion]:
        return [a for a in self.assertions if isinstance(a, DataAssertion)]

    def members_of(self, cls: str) -> set[str]:
        return {a.individual for a in self.assertions if isinstance(a, ClassAssertion) and a.cls == cls}

    def copy(self) -> "KnowledgeBase":
        out = KnowledgeBase()
        out.classes = dict(self.classes)
        out.object_properties = dict(self.object_properties)
        out.data_properties = dict(self.data_properties)
        out.disjoint = set(self.disjoint)
        out.individuals = dict(self.individuals)
        out.assertions = set(self.assertions)
        out.rules = dict(self.rules)
        return out

    def __eq__(self, other):
        if not isinstance(other, KnowledgeBase):
            return NotImplemented
        return (
            self.classes == other.classes
            and self.object_properties == other.object_properties
            and self.data_properties == other.data_properties
            and self.disjoint == other.disjoint
            and self.individuals == other.individuals
            and self.assertions == other.assertions
            and self.rules == other.rules
        )

    def check_integrity(self):
        """Raise if any component references an undeclared name."""
        for cls in self.classes.values():
            for p in cls.parents:
                self._require_class(p, f"class {cls.name}")
        for prop in self.object_properties.values():
            self._require_class(prop.domain, f"objprop {prop.name}")
            self._require_class(prop.range, f"objprop {prop.name}")
            if prop.inverse is not None and prop.inverse not in self.object_properties:
                raise KbIntegrityError(
                    f"objprop {prop.name}: undeclared inverse {prop.inverse!r}"
                )
            if prop.expands_to is not None and prop.expands_to not in self.object_properties:
                raise KbIntegrityError(
                    f"objprop {prop.name}: undeclared expansion {prop.expands_to!r}"
                )
        for prop in self.data_properties.values():
            self._require_class(prop.domain, f"dataprop {prop.name}")
        for a, b in self.disjoint:
            self._require_class(a, "disjoint")
            self._require_class(b, "disjoint")
        for ind in self.individuals.values():
            for c in ind.classes:
                self._require_class(c, f"individual {ind.name}")
        for assertion in self.assertions:
            if isinstance(assertion, ClassAssertion):
                self._require_individual(assertion.individual, "class assertion")
                self._require_class(assertion.cls, "class assertion")
            elif isinstance(assertion, ObjectAssertion):
                if assertion.prop not in self.object_properties:
                    raise KbIntegrityError(f"assertion references undeclared {assertion.prop!r}")
                self._require_individual(assertion.subject, "object assertion")
                self._require_individual(assertion.obj, "object assertion")
            else:
                if assertion.prop not in self.data_properties:
                    raise KbIntegrityError(f"assertion references undeclared {assertion.prop!r}")
                self._require_individual(assertion.subject, "data assertion")
        for rule in self.rules.values():
            self.validate_rule(rule)
