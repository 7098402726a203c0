"""Tests for inverse images along polynomial maps."""
import pytest

from src.core.errors import RingMismatch, ShapeMismatch, UndeclaredDenominator
from src.dmodules.conn import Connection, is_integrable
from src.dmodules.exactalg import LocRing
from src.dmodules.pullback import PolyMap, compare_pullbacks, compose_maps, pullback_connection, pullback_dmodule
from src.validators.instance_generator import (
    instance_rng, random_composable_maps, random_integrable_connection, random_pullback_instance,
)

SEEDS = range(4)


@pytest.fixture(scope='module')
def squaring():
    source = LocRing(('x',), ['x'])
    target = LocRing(('y',), ['y'])
    f = PolyMap(source, target, ['x^2'])
    C = Connection(target, 1, {'y': [['1/(3*y)']]})
    return f, C


class TestPolyMap:

    def test_component_count(self, plane):
        with pytest.raises(ShapeMismatch):
            PolyMap(plane, plane, ['x'])

    def test_denominator_must_pull_back_to_unit(self):
        with pytest.raises(UndeclaredDenominator):
            PolyMap(LocRing(('x',)), LocRing(('y',), ['y']), ['x^2'])

    def test_factor_of_a_declared_denominator_pulls_back(self):
        f = PolyMap(LocRing(('x',), ['x^2 - x']), LocRing(('y',), ['y']), ['x'])
        assert f.pull(f.target.parse('1/y')) == f.source.parse('1/x')

    def test_jacobian(self, plane):
        f = PolyMap(plane, LocRing(('u',)), ['x^2*y'])
        assert f.jacobian() == [[plane.parse('2*x*y'), plane.parse('x^2')]]

    def test_composition(self, plane):
        line = LocRing(('t',))
        f = PolyMap(line, plane, ['t', 't^2'])
        g = PolyMap(plane, LocRing(('u',)), ['x + y'])
        assert compose_maps(g, f).components == (line.parse('t + t^2'),)

    def test_composition_needs_matching_chart(self, plane):
        line = LocRing(('t',))
        f = PolyMap(line, line, ['t'])
        g = PolyMap(plane, line, ['x'])
        with pytest.raises(RingMismatch):
            compose_maps(g, f)


class TestInverseImage:

    def test_squaring_map(self, squaring):
        f, C = squaring
        expected = [[f.source.parse('2/(3*x)')]]
        assert pullback_connection(f, C).matrices['x'] == expected
        assert pullback_dmodule(f, C).matrices['x'] == expected

    def test_comparison_report(self, squaring):
        f, C = squaring
        comparison = compare_pullbacks(f, C)
        assert comparison.equal
        assert comparison.witness is None
        assert comparison.to_dict()['matrices'] == {'x': [['2/(3*x)']]}

    def test_identity_map(self, plane):
        C = Connection(plane, 1, {'x': [['y']], 'y': [['x']]})
        assert pullback_connection(PolyMap.identity(plane), C) == C

    def test_target_must_match(self, squaring, plane):
        f, _ = squaring
        with pytest.raises(RingMismatch):
            pullback_connection(f, Connection.trivial(plane))

    @pytest.mark.parametrize('seed', SEEDS)
    def test_routes_agree_on_random_instances(self, seed):
        f, C = random_pullback_instance(instance_rng(seed, 'test_pullback', 0))
        assert compare_pullbacks(f, C).equal

    @pytest.mark.parametrize('seed', SEEDS)
    def test_functoriality(self, seed):
        f, g, C = random_composable_maps(instance_rng(seed, 'test_pullback', 1))
        assert pullback_connection(compose_maps(g, f), C) == pullback_connection(f, pullback_connection(g, C))

    @pytest.mark.parametrize('seed', SEEDS)
    def test_flatness_preserved(self, seed):
        rng = instance_rng(seed, 'test_pullback', 2)
        f, _ = random_pullback_instance(rng)
        _, flat, _ = random_integrable_connection(rng, f.target, degree=2)
        assert is_integrable(pullback_connection(f, flat))
