"""Tests for input validation and the seeded instance generators."""
import json

import pytest

from src.core.errors import SchemaError
from src.dmodules.conn import is_integrable
from src.dmodules.pullback import compare_pullbacks
from src.validators.instance_generator import instance_rng, random_family, random_operator, random_ring
from src.validators.schema_validator import SchemaValidator


@pytest.fixture
def validator():
    return SchemaValidator()


def write_json(path, document) -> str:
    path.write_text(json.dumps(document), encoding='utf-8')
    return str(path)


class TestLoad:

    def test_missing_file(self, validator, tmp_path):
        with pytest.raises(SchemaError):
            validator.load(str(tmp_path / 'absent.json'))

    def test_invalid_json(self, validator, tmp_path):
        path = tmp_path / 'broken.json'
        path.write_text('{"vars": [', encoding='utf-8')
        with pytest.raises(SchemaError):
            validator.load(str(path))

    def test_top_level_must_be_object(self, validator, tmp_path):
        with pytest.raises(SchemaError):
            validator.load(write_json(tmp_path / 'list.json', [1, 2]))

    def test_entries(self, validator, inputs_dir):
        document = validator.load(str(inputs_dir / 'connections.json'))
        assert len(validator.entries(document, 'connections')) == 2
        single = validator.load(str(inputs_dir / 'trivial_connection.json'))
        assert validator.entries(single, 'connections') == [single]

    def test_empty_entry_list(self, validator):
        with pytest.raises(SchemaError):
            validator.entries({'families': []}, 'families')


class TestConnections:

    def test_corpus_connections_are_flat(self, validator, inputs_dir):
        document = validator.load(str(inputs_dir / 'connections.json'))
        for entry in validator.entries(document, 'connections'):
            assert is_integrable(validator.connection(entry))

    def test_corrupted_connection_loads(self, validator, inputs_dir):
        C = validator.connection(validator.load(str(inputs_dir / 'corrupted_connection.json')))
        assert not is_integrable(C)

    def test_missing_rank(self, validator):
        with pytest.raises(SchemaError):
            validator.connection({'vars': ['x']})

    def test_unknown_direction(self, validator):
        with pytest.raises(SchemaError):
            validator.connection({'vars': ['x'], 'rank': 1, 'matrices': {'y': [['1']]}})

    def test_wrong_shape(self, validator):
        with pytest.raises(SchemaError):
            validator.connection({'vars': ['x'], 'rank': 2, 'matrices': {'x': [['1']]}})

    def test_undeclared_denominator(self, validator):
        with pytest.raises(SchemaError):
            validator.connection({'vars': ['x'], 'rank': 1, 'matrices': {'x': [['1/x']]}})


class TestMapsAndFamilies:

    def test_squaring_map(self, validator, inputs_dir):
        f, C = validator.pullback_input(validator.load(str(inputs_dir / 'squaring_map.json')))
        comparison = compare_pullbacks(f, C)
        assert comparison.equal
        assert comparison.to_dict()['matrices'] == {'x': [['2/(3*x)']]}

    def test_connection_must_live_on_the_target(self, validator):
        document = {
            'source': {'vars': ['x']},
            'target': {'vars': ['y']},
            'components': ['x^2'],
            'connection': {'vars': ['x'], 'rank': 1, 'matrices': {'x': [['1']]}},
        }
        with pytest.raises(SchemaError):
            validator.pullback_input(document)

    def test_family(self, validator, inputs_dir):
        f = validator.family(validator.load(str(inputs_dir / 'family_quadratic.json')))
        assert f.name == 'quadratic'
        assert f.degree == 2

    def test_non_integrable_twist(self, validator, inputs_dir):
        with pytest.raises(SchemaError):
            validator.family(validator.load(str(inputs_dir / 'nonintegrable_twist.json')))

    def test_family_needs_h(self, validator):
        with pytest.raises(SchemaError):
            validator.family({'name': 'headless'})


class TestInstanceGenerator:

    def test_streams_are_deterministic(self):
        first = instance_rng(7, 'weyl', 3)
        second = instance_rng(7, 'weyl', 3)
        ring = random_ring(first)
        assert ring == random_ring(second)
        assert random_operator(first, ring, 2) == random_operator(second, ring, 2)

    def test_streams_differ_by_index(self):
        draws = {instance_rng(7, 'weyl', i).random() for i in range(5)}
        assert len(draws) == 5

    @pytest.mark.parametrize('twisted', [False, True])
    def test_random_families_are_valid(self, twisted):
        f = random_family(instance_rng(11, 'test_validators', int(twisted)), twisted=twisted)
        assert f.rank == 1
