"""Symbolic tier: knowledge-base store, text format, and prebuilt ontologies."""

from .builders import (
    GLASS_ATTRIBUTE_ROOT,
    GLASS_PROPERTY_MAP,
    GLASS_ROOT,
    GLASS_SAMPLE,
    GLASS_TYPE_CLASSES,
    GLASS_TYPE_ROOT,
    GlassOntologyModel,
    ROBOT_REFERENCE_VALUES,
    attribute_profile,
    build_glass_ontology,
    build_jackal_ontology,
    glass_ontology_view,
    populate_into_ontology,
)
from .model import (
    BUILTIN_OPS,
    CHARACTERISTICS,
    PROVENANCE_ASSERTED,
    PROVENANCE_CLOSURE,
    Assertion,
    Builtin,
    ClassAssertion,
    ClassAtom,
    DataAssertion,
    DataAtom,
    DataPropertyDef,
    Individual,
    KnowledgeBase,
    ObjectAssertion,
    ObjectAtom,
    ObjectPropertyDef,
    OntologyClass,
    Rule,
    RuleAtom,
    Term,
    atom_variables,
    is_variable,
    rule_provenance,
)
from .text import parse_kb, serialize_kb

__all__ = [
    "Assertion",
    "BUILTIN_OPS",
    "Builtin",
    "CHARACTERISTICS",
    "ClassAssertion",
    "ClassAtom",
    "DataAssertion",
    "DataAtom",
    "DataPropertyDef",
    "GLASS_ATTRIBUTE_ROOT",
    "GLASS_PROPERTY_MAP",
    "GLASS_ROOT",
    "GLASS_SAMPLE",
    "GLASS_TYPE_CLASSES",
    "GLASS_TYPE_ROOT",
    "GlassOntologyModel",
    "Individual",
    "KnowledgeBase",
    "ObjectAssertion",
    "ObjectAtom",
    "ObjectPropertyDef",
    "OntologyClass",
    "PROVENANCE_ASSERTED",
    "PROVENANCE_CLOSURE",
    "ROBOT_REFERENCE_VALUES",
    "Rule",
    "RuleAtom",
    "Term",
    "atom_variables",
    "attribute_profile",
    "build_glass_ontology",
    "build_jackal_ontology",
    "glass_ontology_view",
    "is_variable",
    "parse_kb",
    "populate_into_ontology",
    "rule_provenance",
    "serialize_kb",
]
