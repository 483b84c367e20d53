import pytest

from tierkb.errors import KbIntegrityError, KbParseError
from tierkb.kb import (
    Builtin,
    ClassAssertion,
    ClassAtom,
    DataAssertion,
    DataAtom,
    KnowledgeBase,
    ObjectAssertion,
    Rule,
    build_jackal_ontology,
    parse_kb,
    serialize_kb,
)
from tierkb.reasoner import apply_rules

DOC = """\
# telemetry vocabulary
class component
class sensor
subclass sensor component
annotation sensor meaning senses the world
class reading
objprop reports domain=sensor range=reading functional inverse=reported_by
objprop reported_by domain=reading range=sensor
objprop near domain=component range=component symmetric
dataprop level domain=reading type=float
disjoint sensor reading
individual lidar : sensor
individual ping_1 : reading
individual spare_part
assert lidar reports ping_1
data ping_1 level 7.25   # inline comment
rule hot: level(?r,?v) ^ greaterThan(?v,5.0) -> reading(?r)
"""


def fact_keys(kb):
    keys = set()
    for a in kb.assertions:
        if isinstance(a, ClassAssertion):
            keys.add(("class", a.individual, a.cls))
        elif isinstance(a, ObjectAssertion):
            keys.add(("object", a.prop, a.subject, a.obj))
        else:
            keys.add(("data", a.prop, a.subject, a.value))
    return keys


class TestParse:
    def test_full_document(self):
        kb = parse_kb(DOC)
        assert set(kb.classes) == {"component", "sensor", "reading"}
        assert kb.classes["sensor"].parents == frozenset({"component"})
        assert kb.classes["sensor"].annotations == (("meaning", "senses the world"),)
        assert kb.object_properties["reports"].has("functional")
        assert kb.object_properties["reports"].inverse == "reported_by"
        assert kb.object_properties["reported_by"].inverse == "reports"
        assert kb.object_properties["near"].has("symmetric")
        assert kb.disjoint == {("reading", "sensor")}
        assert set(kb.individuals) == {"lidar", "ping_1", "spare_part"}
        assert kb.individuals["spare_part"].classes == frozenset()
        assert ObjectAssertion("reports", "lidar", "ping_1") in kb.assertions
        assert DataAssertion("level", "ping_1", 7.25) in kb.assertions
        assert kb.rules["hot"].body == (
            DataAtom("level", "?r", "?v"),
            Builtin("greaterThan", "?v", 5.0),
        )

    def test_comments_and_blank_lines_ignored(self):
        kb = parse_kb("# nothing\n\nclass A\n   # indented comment\n")
        assert set(kb.classes) == {"A"}

    def test_forward_inverse_reference_allowed(self):
        kb = parse_kb("class C\nobjprop a domain=C range=C inverse=b\nobjprop b domain=C range=C\n")
        assert kb.object_properties["b"].inverse == "a"

    def test_dangling_inverse_rejected_at_end(self):
        with pytest.raises(KbIntegrityError):
            parse_kb("class C\nobjprop a domain=C range=C inverse=ghost\n")

    def test_expansion_flag_round_trips(self):
        text = (
            "class C\n"
            "objprop may_touch domain=C range=C\n"
            "objprop touches domain=C range=C expands_to=may_touch\n"
        )
        kb = parse_kb(text)
        assert kb.object_properties["touches"].expands_to == "may_touch"
        assert "expands_to=may_touch" in serialize_kb(kb)


class TestParseErrors:
    def check(self, text, line, token=None):
        with pytest.raises(KbParseError) as err:
            parse_kb(text)
        assert err.value.line == line
        if token is not None:
            assert err.value.token == token
        return err.value

    def test_unknown_statement(self):
        err = self.check("class A\nfrobnicate A\n", line=2, token="frobnicate")
        assert "frobnicate" in str(err)

    def test_bad_identifier(self):
        self.check("class 9lives\n", line=1, token="9lives")

    def test_missing_kv(self):
        self.check("class C\nobjprop p domain=C rnage=C\n", line=2, token="rnage=C")

    def test_unknown_flag(self):
        self.check("class C\nobjprop p domain=C range=C sparkly\n", line=2, token="sparkly")

    def test_bad_data_type(self):
        self.check("class C\ndataprop d domain=C type=int\n", line=2, token="int")

    def test_bad_float(self):
        self.check(
            "class C\ndataprop d domain=C type=float\nindividual i : C\ndata i d seven\n",
            line=4,
            token="seven",
        )

    def test_malformed_rule_atom(self):
        self.check("class C\nrule r: C(?x -> C(?x)\n", line=2)

    def test_unknown_atom_name(self):
        self.check("class C\nrule r: Ghost(?x) -> C(?x)\n", line=2, token="Ghost")

    def test_class_atom_arity(self):
        self.check("class C\nrule r: C(?x,?y) -> C(?x)\n", line=2, token="C")

    def test_class_atom_numeric_argument(self):
        self.check("class C\nrule r: C(3.5) -> C(3.5)\n", line=2, token="C")

    def test_data_atom_constant_string_value(self):
        self.check(
            "class C\ndataprop d domain=C type=float\nrule r: d(?x,hot) -> C(?x)\n",
            line=3,
            token="d",
        )

    def test_rule_without_arrow(self):
        self.check("class C\nrule r: C(?x)\n", line=2)

    def test_integrity_error_wrapped_with_line(self):
        err = self.check("class A\nclass A\n", line=2)
        assert "A" in str(err)

    def test_undeclared_use_reports_line(self):
        self.check("subclass A B\n", line=1)


class TestSerialize:
    def test_round_trip_equality(self):
        kb = parse_kb(DOC)
        again = parse_kb(serialize_kb(kb))
        assert again == kb
        assert serialize_kb(again) == serialize_kb(kb)

    def test_canonical_order_independence(self):
        a = KnowledgeBase()
        a.add_class("B")
        a.add_class("A")
        a.add_data_property("z_level", "A")
        a.add_data_property("a_level", "A")
        a.add_individual("i2", classes=["B"])
        a.add_individual("i1", classes=["A"])
        a.assert_data("z_level", "i1", 2.0)
        a.assert_data("a_level", "i1", 1.0)

        b = KnowledgeBase()
        b.add_class("A")
        b.add_class("B")
        b.add_data_property("a_level", "A")
        b.add_data_property("z_level", "A")
        b.add_individual("i1", classes=["A"])
        b.add_individual("i2", classes=["B"])
        b.assert_data("a_level", "i1", 1.0)
        b.assert_data("z_level", "i1", 2.0)

        assert serialize_kb(a) == serialize_kb(b)

    def test_float_repr_survives(self):
        kb = KnowledgeBase()
        kb.add_class("C")
        kb.add_data_property("d", "C")
        kb.add_individual("i", classes=["C"])
        kb.assert_data("d", "i", 0.1)
        again = parse_kb(serialize_kb(kb))
        assert DataAssertion("d", "i", 0.1) in again.assertions

    def test_rule_round_trip(self):
        kb = KnowledgeBase()
        kb.add_class("C")
        kb.add_class("Hot")
        kb.add_data_property("temp", "C")
        kb.add_rule(
            Rule(
                name="hot",
                body=(
                    ClassAtom("C", "?x"),
                    DataAtom("temp", "?x", "?v"),
                    Builtin("greaterThanOrEqual", "?v", 40.0),
                ),
                head=ClassAtom("Hot", "?x"),
            )
        )
        again = parse_kb(serialize_kb(kb))
        assert again.rules["hot"] == kb.rules["hot"]

    def test_reasoned_kb_reparses_with_same_facts(self):
        kb = parse_kb(
            "class C\n"
            "objprop part_of domain=C range=C transitive\n"
            "individual a : C\nindividual b : C\nindividual c : C\n"
            "assert a part_of b\nassert b part_of c\n"
        )
        apply_rules(kb)
        assert ObjectAssertion("part_of", "a", "c") in kb.assertions
        again = parse_kb(serialize_kb(kb))
        assert fact_keys(again) == fact_keys(kb)

    def test_jackal_ontology_round_trips(self):
        kb = build_jackal_ontology()
        again = parse_kb(serialize_kb(kb))
        assert again == kb
        assert serialize_kb(again) == serialize_kb(kb)
