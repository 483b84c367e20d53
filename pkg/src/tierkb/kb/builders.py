"""Prebuilt ontologies and dataset-to-ABox population.

Two domain ontologies ship with the package: the forensic-glass model (type
and attribute taxonomies plus per-attribute data properties) and the ground
robot model (component taxonomy, connection/causation object properties,
diagnoser-state classes, and reference-measurement individuals for threshold
rules). ``populate_into_ontology`` turns tabular instances into individuals
with one data assertion per attribute.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..dataset import Dataset, GLASS_CLASS_COUNTS, GLASS_CLASS_NAMES, GLASS_SCHEMA
from ..errors import PopulationError
from .model import DataPropertyDef, KnowledgeBase, Rule

GLASS_ROOT = "GlassConcept"
GLASS_SAMPLE = "GlassSample"
GLASS_TYPE_ROOT = "GlassType"
GLASS_ATTRIBUTE_ROOT = "GlassAttribute"

#: Dataset attribute name -> data property asserted on each sample.
GLASS_PROPERTY_MAP = {a.name: f"has{a.name}" for a in GLASS_SCHEMA.attributes}

#: The six glass-type class names observed in the 214-row table.
GLASS_TYPE_CLASSES = tuple(GLASS_CLASS_NAMES[c] for c in sorted(GLASS_CLASS_COUNTS))


def build_glass_ontology() -> KnowledgeBase:
    """TBox for the glass domain: six pairwise-disjoint type classes under
    GlassType, nine attribute classes under GlassAttribute, the generic
    has_value property on attributes, and hasRI..hasFe on samples. No ABox."""
    kb = KnowledgeBase()
    kb.add_class(GLASS_ROOT)
    kb.add_class(GLASS_SAMPLE, parents=[GLASS_ROOT])
    kb.add_class(GLASS_TYPE_ROOT, parents=[GLASS_ROOT])
    kb.add_class(GLASS_ATTRIBUTE_ROOT, parents=[GLASS_ROOT])
    for name in GLASS_TYPE_CLASSES:
        kb.add_class(name, parents=[GLASS_TYPE_ROOT])
    for i, a in enumerate(GLASS_TYPE_CLASSES):
        for b in GLASS_TYPE_CLASSES[i + 1 :]:
            kb.add_disjoint(a, b)
    for attr in GLASS_SCHEMA.attributes:
        kb.add_class(attr.name, parents=[GLASS_ATTRIBUTE_ROOT])
    kb.add_data_property("has_value", GLASS_ATTRIBUTE_ROOT)
    for attr in GLASS_SCHEMA.attributes:
        kb.add_data_property(GLASS_PROPERTY_MAP[attr.name], GLASS_SAMPLE)
    return kb


def populate_into_ontology(kb: KnowledgeBase, data: Dataset, mapping: dict[str, str]) -> KnowledgeBase:
    """Add one individual per instance (named ``sample_<k>``, 1-based) with a
    data assertion per mapped attribute; labeled instances also get a class
    assertion for their label. The individuals' base class is the shared
    domain of the mapped data properties. Mutates and returns ``kb``."""
    feature_names = [a.name for a in data.schema.attributes]
    missing = [n for n in feature_names if n not in mapping]
    if missing:
        raise ValueError(f"mapping misses attributes {missing}")
    domains = set()
    for name in feature_names:
        prop = kb.data_properties.get(mapping[name])
        if prop is None:
            raise ValueError(f"mapping target {mapping[name]!r} is not a declared data property")
        domains.add(prop.domain)
    if len(domains) > 1:
        raise ValueError(f"mapped properties span several domains {sorted(domains)}")
    base_class = domains.pop() if domains else None
    for k, instance in enumerate(data.instances, start=1):
        name = f"sample_{k}"
        if name in kb.individuals:
            raise PopulationError(f"individual {name!r} already exists")
        classes = [base_class] if base_class is not None else []
        if instance.label is not None:
            classes.append(instance.label)
        kb.add_individual(name, classes=classes)
        for attr_name, value in zip(feature_names, instance.values):
            kb.assert_data(mapping[attr_name], name, float(value))
    return kb


@dataclass(frozen=True)
class GlassOntologyModel:
    """Structured view of a populated glass knowledge base: the type-class
    set, the attribute-class set, the rule set, the sample individuals, and
    the shared value property."""

    type_classes: tuple[str, ...]
    attribute_classes: tuple[str, ...]
    rules: tuple[Rule, ...]
    sample_individuals: tuple[str, ...]
    has_value: DataPropertyDef

    def __post_init__(self):
        if not set(self.type_classes).isdisjoint(self.attribute_classes):
            raise ValueError("type and attribute classes overlap")


def glass_ontology_view(kb: KnowledgeBase) -> GlassOntologyModel:
    """Project a glass knowledge base onto its structured view."""
    return GlassOntologyModel(
        type_classes=tuple(sorted(kb.subclasses(GLASS_TYPE_ROOT))),
        attribute_classes=tuple(sorted(kb.subclasses(GLASS_ATTRIBUTE_ROOT))),
        rules=tuple(kb.rules[name] for name in sorted(kb.rules)),
        sample_individuals=tuple(sorted(kb.members_of(GLASS_SAMPLE))),
        has_value=kb.data_properties["has_value"],
    )


def attribute_profile(kb: KnowledgeBase, individual: str) -> dict[str, float]:
    """Attribute-class -> value map for one glass sample individual."""
    prop_to_attr = {prop: attr for attr, prop in GLASS_PROPERTY_MAP.items()}
    out: dict[str, float] = {}
    for assertion in kb.data_assertions():
        if assertion.subject == individual and assertion.prop in prop_to_attr:
            out[prop_to_attr[assertion.prop]] = assertion.value
    return out


# ---------------------------------------------------------------------------
# Ground-robot ontology
# ---------------------------------------------------------------------------

#: Default reference measurements (name -> threshold value).
ROBOT_REFERENCE_VALUES = {
    "ind_REF_left_motor_temperature": 55.0,
    "ind_REF_right_motor_temperature": 55.0,
    "ind_REF_status_alarm": 3.5,
    "ind_REF_min_forward_speed": 0.02,
}


def build_jackal_ontology() -> KnowledgeBase:
    """TBox/ABox for the ground robot: component taxonomy, connection and
    causation properties (with the schema-level high-temperature expansion),
    diagnoser-state classes, a representative set of component individuals,
    and reference-measurement individuals carrying threshold values."""
    kb = KnowledgeBase()

    # Component taxonomy.
    kb.add_class("component")
    for name in ("chassis", "external_device", "internal_system", "sensor", "actuator"):
        kb.add_class(name, parents=["component"])
    kb.add_class("temp_sensor", parents=["sensor"])
    kb.add_class("lidar_sensor", parents=["sensor", "external_device"])
    kb.add_class("imu_sensor", parents=["sensor", "internal_system"])
    kb.add_class("wheel_encoder", parents=["sensor"])
    kb.add_class("motor", parents=["actuator"])
    kb.add_class("wheel", parents=["chassis"])
    kb.add_class("battery", parents=["internal_system"])
    kb.add_class("software", parents=["internal_system"])
    kb.add_class("ros_package", parents=["software"])
    kb.add_disjoint("sensor", "actuator")
    kb.add_disjoint("software", "actuator")

    # Diagnoser states for the motor-temperature diagnoser.
    kb.add_class("diagnoser_state")
    kb.annotate_class("diagnoser_state", "note", "per-component diagnoser automaton states")
    kb.add_class("state1", parents=["diagnoser_state"])
    kb.annotate_class("state1", "meaning", "nominal operation")
    kb.add_class("state2", parents=["diagnoser_state"])
    kb.annotate_class("state2", "meaning", "overheated operation")
    kb.add_class("state3", parents=["diagnoser_state"])
    kb.annotate_class("state3", "meaning", "sensor reading faulty")
    kb.add_class("state4", parents=["diagnoser_state"])
    kb.annotate_class("state4", "meaning", "vulnerable to heat damage")
    kb.add_class("motor_left_resting", parents=["diagnoser_state"])

    # Connection / causation model.
    kb.add_object_property("is_connected_to", "component", "component", characteristics=["symmetric"])
    kb.add_object_property(
        "is_part_of", "component", "component", characteristics=["transitive"], inverse="has_part"
    )
    kb.add_object_property("has_part", "component", "component", characteristics=["transitive"])
    kb.add_object_property("monitors", "sensor", "component")
    kb.add_object_property("drives", "motor", "wheel", characteristics=["functional"])
    kb.add_object_property("mounted_on", "sensor", "chassis")
    kb.add_object_property(
        "causes_high_temp_to", "state2", "state4", expands_to="may_causes_high_temp_to"
    )
    kb.add_object_property("may_causes_high_temp_to", "state2", "state4")

    # Measurements.
    kb.add_class("reference_measurement")
    kb.add_data_property("reference_value", "reference_measurement")
    kb.add_data_property("temperature", "component")

    # Representative individuals.
    kb.add_individual("ind_base_chassis", classes=["chassis"])
    kb.add_individual("ind_left_motor", classes=["motor"])
    kb.add_individual("ind_right_motor", classes=["motor"])
    kb.add_individual("ind_left_wheel", classes=["wheel"])
    kb.add_individual("ind_right_wheel", classes=["wheel"])
    kb.add_individual("ind_front_lidar", classes=["lidar_sensor"])
    kb.add_individual("ind_main_imu", classes=["imu_sensor"])
    kb.add_individual("ind_left_temp_sensor", classes=["temp_sensor"])
    kb.add_individual("ind_right_temp_sensor", classes=["temp_sensor"])
    kb.add_individual("ind_battery_pack", classes=["battery"])
    kb.add_individual("ind_nav_stack", classes=["ros_package"])

    kb.assert_object("is_part_of", "ind_left_wheel", "ind_base_chassis")
    kb.assert_object("is_part_of", "ind_right_wheel", "ind_base_chassis")
    kb.assert_object("drives", "ind_left_motor", "ind_left_wheel")
    kb.assert_object("drives", "ind_right_motor", "ind_right_wheel")
    kb.assert_object("monitors", "ind_left_temp_sensor", "ind_left_motor")
    kb.assert_object("monitors", "ind_right_temp_sensor", "ind_right_motor")
    kb.assert_object("mounted_on", "ind_front_lidar", "ind_base_chassis")
    kb.assert_object("mounted_on", "ind_main_imu", "ind_base_chassis")
    kb.assert_object("is_connected_to", "ind_battery_pack", "ind_left_motor")
    kb.assert_object("is_connected_to", "ind_battery_pack", "ind_right_motor")

    for name, value in ROBOT_REFERENCE_VALUES.items():
        kb.add_individual(name, classes=["reference_measurement"])
        kb.assert_data("reference_value", name, value)
    return kb
