import pytest

from tierkb.dataset import GLASS_SCHEMA, load_glass
from tierkb.errors import PopulationError
from tierkb.kb import (
    GLASS_ATTRIBUTE_ROOT,
    GLASS_PROPERTY_MAP,
    GLASS_ROOT,
    GLASS_SAMPLE,
    GLASS_TYPE_CLASSES,
    GLASS_TYPE_ROOT,
    GlassOntologyModel,
    ROBOT_REFERENCE_VALUES,
    ClassAssertion,
    DataAssertion,
    attribute_profile,
    build_glass_ontology,
    build_jackal_ontology,
    glass_ontology_view,
    populate_into_ontology,
)

ATTRIBUTE_NAMES = tuple(a.name for a in GLASS_SCHEMA.attributes)


class TestGlassOntology:
    def test_taxonomy_shape(self):
        kb = build_glass_ontology()
        for root in (GLASS_SAMPLE, GLASS_TYPE_ROOT, GLASS_ATTRIBUTE_ROOT):
            assert kb.classes[root].parents == frozenset({GLASS_ROOT})
        assert kb.subclasses(GLASS_TYPE_ROOT) == set(GLASS_TYPE_CLASSES)
        assert kb.subclasses(GLASS_ATTRIBUTE_ROOT) == set(ATTRIBUTE_NAMES)
        assert len(GLASS_TYPE_CLASSES) == 6

    def test_type_classes_pairwise_disjoint(self):
        kb = build_glass_ontology()
        assert len(kb.disjoint) == 15
        for i, a in enumerate(GLASS_TYPE_CLASSES):
            for b in GLASS_TYPE_CLASSES[i + 1 :]:
                assert tuple(sorted((a, b))) in kb.disjoint

    def test_data_properties(self):
        kb = build_glass_ontology()
        assert kb.data_properties["has_value"].domain == GLASS_ATTRIBUTE_ROOT
        for attr in ATTRIBUTE_NAMES:
            assert kb.data_properties[GLASS_PROPERTY_MAP[attr]].domain == GLASS_SAMPLE

    def test_no_abox(self):
        kb = build_glass_ontology()
        assert not kb.individuals
        assert not kb.assertions


class TestPopulate:
    def test_full_population(self):
        data = load_glass()
        kb = populate_into_ontology(build_glass_ontology(), data, GLASS_PROPERTY_MAP)
        assert len(kb.members_of(GLASS_SAMPLE)) == 214
        assert len(list(kb.data_assertions())) == 214 * 9
        first = data.instances[0]
        assert ClassAssertion("sample_1", first.label) in kb.assertions
        assert DataAssertion(GLASS_PROPERTY_MAP["RI"], "sample_1", first.values[0]) in kb.assertions

    def test_unlabeled_rows_get_base_class_only(self):
        data = load_glass().without_labels()
        kb = populate_into_ontology(build_glass_ontology(), data, GLASS_PROPERTY_MAP)
        assert kb.individuals["sample_7"].classes == frozenset({GLASS_SAMPLE})

    def test_double_population_rejected(self):
        data = load_glass()
        kb = populate_into_ontology(build_glass_ontology(), data, GLASS_PROPERTY_MAP)
        with pytest.raises(PopulationError):
            populate_into_ontology(kb, data, GLASS_PROPERTY_MAP)

    def test_mapping_must_cover_schema(self):
        bad = dict(GLASS_PROPERTY_MAP)
        del bad["Fe"]
        with pytest.raises(ValueError):
            populate_into_ontology(build_glass_ontology(), load_glass(), bad)

    def test_mapping_targets_must_be_declared(self):
        bad = dict(GLASS_PROPERTY_MAP, Fe="hasIron")
        with pytest.raises(ValueError):
            populate_into_ontology(build_glass_ontology(), load_glass(), bad)

    def test_mapping_must_share_one_domain(self):
        bad = dict(GLASS_PROPERTY_MAP, Fe="has_value")
        with pytest.raises(ValueError):
            populate_into_ontology(build_glass_ontology(), load_glass(), bad)


class TestGlassView:
    def test_view_of_populated_kb(self):
        kb = populate_into_ontology(build_glass_ontology(), load_glass(), GLASS_PROPERTY_MAP)
        view = glass_ontology_view(kb)
        assert view.type_classes == tuple(sorted(GLASS_TYPE_CLASSES))
        assert view.attribute_classes == tuple(sorted(ATTRIBUTE_NAMES))
        assert len(view.sample_individuals) == 214
        assert view.sample_individuals == tuple(sorted(view.sample_individuals))
        assert view.has_value.domain == GLASS_ATTRIBUTE_ROOT
        assert view.rules == ()

    def test_overlapping_view_rejected(self):
        with pytest.raises(ValueError):
            GlassOntologyModel(
                type_classes=("A",),
                attribute_classes=("A",),
                rules=(),
                sample_individuals=(),
                has_value=build_glass_ontology().data_properties["has_value"],
            )

    def test_attribute_profile(self):
        data = load_glass()
        kb = populate_into_ontology(build_glass_ontology(), data, GLASS_PROPERTY_MAP)
        profile = attribute_profile(kb, "sample_3")
        assert set(profile) == set(ATTRIBUTE_NAMES)
        expected = dict(zip(ATTRIBUTE_NAMES, data.instances[2].values))
        assert profile == expected
        assert attribute_profile(kb, "nobody") == {}


class TestRobotOntology:
    def test_component_taxonomy(self):
        kb = build_jackal_ontology()
        assert kb.ancestors("temp_sensor") == {"sensor", "component"}
        assert kb.classes["lidar_sensor"].parents == frozenset({"sensor", "external_device"})
        assert ("actuator", "sensor") in kb.disjoint
        assert ("actuator", "software") in kb.disjoint

    def test_property_characteristics(self):
        kb = build_jackal_ontology()
        props = kb.object_properties
        assert props["is_connected_to"].has("symmetric")
        assert props["is_part_of"].has("transitive")
        assert props["is_part_of"].inverse == "has_part"
        assert props["has_part"].inverse == "is_part_of"
        assert props["drives"].has("functional")
        assert props["causes_high_temp_to"].expands_to == "may_causes_high_temp_to"

    def test_state_annotations(self):
        kb = build_jackal_ontology()
        for name in ("state1", "state2", "state3", "state4"):
            assert kb.classes[name].parents == frozenset({"diagnoser_state"})
            assert any(key == "meaning" for key, _ in kb.classes[name].annotations)

    def test_reference_individuals_carry_thresholds(self):
        kb = build_jackal_ontology()
        for name, value in ROBOT_REFERENCE_VALUES.items():
            assert "reference_measurement" in kb.individuals[name].classes
            assert DataAssertion("reference_value", name, value) in kb.assertions

    def test_component_individuals_connected(self):
        kb = build_jackal_ontology()
        assert kb.members_of("motor") == {"ind_left_motor", "ind_right_motor"}
        assert kb.members_of("temp_sensor") == {"ind_left_temp_sensor", "ind_right_temp_sensor"}
        monitors = {
            (a.subject, a.obj) for a in kb.object_assertions() if a.prop == "monitors"
        }
        assert ("ind_left_temp_sensor", "ind_left_motor") in monitors

    def test_integrity(self):
        build_jackal_ontology().check_integrity()
