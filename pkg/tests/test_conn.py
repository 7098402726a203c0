"""Tests for connections, the derivation action, jet sections and De Rham complexes."""
import pytest

from src.core.errors import NonIntegrableError, ShapeMismatch
from src.dmodules.conn import (
    Connection, act_derivation, apply_operator, curvature, de_rham, differential_sequence_check, from_d_action,
    gauge_transform, is_integrable, is_morphism, is_zero_matrix, jet_section, jet_to_connection, lie_bracket,
    lie_compatible, relative_connection, section_property, to_d_action,
)
from src.dmodules.weyl import WeylOp
from src.validators.instance_generator import (
    instance_rng, random_connection, random_derivation, random_integrable_connection, random_ring, random_vector,
)

SEEDS = range(4)


@pytest.fixture(scope='module')
def corrupted(plane):
    return Connection(plane, 2, {'x': [['0', '1'], ['0', '0']], 'y': [['0', '0'], ['1', '0']]})


@pytest.fixture(scope='module')
def exponential(plane):
    """nabla = d + y dx + x dy, flat since d(xy) is closed."""
    return Connection(plane, 1, {'x': [['y']], 'y': [['x']]})


class TestCurvature:

    def test_trivial_is_integrable(self, plane):
        assert is_integrable(Connection.trivial(plane, 2))

    def test_exact_form_is_integrable(self, exponential):
        assert is_integrable(exponential)

    def test_non_commuting_constants_are_curved(self, corrupted):
        F = curvature(corrupted)[('x', 'y')]
        assert not is_zero_matrix(F)
        assert not is_integrable(corrupted)

    def test_shape_mismatch(self, plane):
        with pytest.raises(ShapeMismatch):
            Connection(plane, 2, {'x': [['1']]})


class TestDerivationAction:

    def test_action_of_coordinate_derivation(self, exponential, plane):
        m = [plane.parse('x^2')]
        assert act_derivation(exponential, [1, 0], m) == [plane.parse('2*x + x^2*y')]
        assert act_derivation(exponential, [1, 0], m) == exponential.covariant('x', m)

    def test_matrix_is_linear_in_the_derivation(self, exponential, plane):
        g = plane.parse('x - y')
        assert to_d_action(exponential, [g, 0]) == [[plane.parse('x*y - y^2')]]

    def test_round_trip(self, exponential, plane):
        action = {'x': to_d_action(exponential, [1, 0]), 'y': to_d_action(exponential, [0, 1])}
        assert from_d_action(plane, action) == exponential

    def test_lie_bracket(self, plane):
        bracket = lie_bracket(plane, ['x', 0], [0, 'x'], ('x', 'y'))
        assert bracket == [plane.zero, plane.gen('x')]

    @pytest.mark.parametrize('seed', SEEDS)
    def test_lie_compatibility_on_integrable(self, seed):
        rng = instance_rng(seed, 'test_conn', 0)
        ring = random_ring(rng)
        _, C, _ = random_integrable_connection(rng, ring)
        a, b = random_derivation(rng, ring), random_derivation(rng, ring)
        m = random_vector(rng, ring, C.rank)
        assert lie_compatible(C, a, b, m)

    def test_lie_compatibility_fails_when_curved(self, corrupted, plane):
        m = [plane.one, plane.zero]
        assert not lie_compatible(corrupted, [1, 0], [0, 1], m)

    def test_operator_action(self, exponential, plane):
        m = [plane.parse('x*y')]
        d_x = WeylOp.derivation(plane, 'x')
        assert apply_operator(exponential, d_x, m) == exponential.covariant('x', m)
        twice = apply_operator(exponential, d_x * d_x, m)
        assert twice == exponential.covariant('x', exponential.covariant('x', m))


class TestJetSection:

    @pytest.mark.parametrize('seed', SEEDS)
    def test_round_trip(self, seed):
        rng = instance_rng(seed, 'test_conn', 1)
        C = random_connection(rng, random_ring(rng))
        J = jet_section(C)
        assert section_property(J)
        assert jet_to_connection(J) == C


class TestMorphisms:

    def test_gauge_transform_is_morphism(self, plane):
        C = Connection.trivial(plane, 2)
        g = [['1', 'x'], ['0', '1']]
        C_prime = gauge_transform(C, g)
        assert is_integrable(C_prime)
        assert is_morphism([[plane.parse(a) for a in row] for row in g], C, C_prime)

    def test_identity_is_not_a_morphism_between_different_connections(self, exponential, plane):
        assert not is_morphism([[plane.one]], Connection.trivial(plane), exponential)

    @pytest.mark.parametrize('seed', SEEDS)
    def test_generated_gauge(self, seed):
        rng = instance_rng(seed, 'test_conn', 2)
        ring = random_ring(rng)
        C_seed, C, g = random_integrable_connection(rng, ring)
        assert is_morphism(g, C_seed, C)


class TestDeRham:

    def test_square_zero_iff_flat(self, exponential, corrupted):
        assert de_rham(exponential).is_complex
        assert not de_rham(corrupted, require_complex=False).is_complex

    def test_curved_connection_has_no_complex(self, corrupted):
        with pytest.raises(NonIntegrableError):
            de_rham(corrupted)

    def test_relative_complex_of_curved_connection(self, corrupted):
        relative = de_rham(corrupted, 'relative', fiber_vars=['x'])
        assert relative.forms == ('x',)
        assert relative.is_complex

    def test_relative_needs_fiber(self, exponential):
        with pytest.raises(ShapeMismatch):
            de_rham(exponential, 'relative')

    def test_relative_connection(self, exponential):
        relative = relative_connection(exponential, ['x'])
        assert relative.directions == ('x',)
        assert relative.matrices['x'] == exponential.matrices['x']

    def test_labels(self, exponential):
        complex_ = de_rham(exponential)
        assert complex_.labels(1) == ['dx*e1', 'dy*e1']
        assert complex_.labels(2) == ['dx^dy*e1']

    def test_differential_of_function(self, exponential, plane):
        complex_ = de_rham(exponential)
        one = [plane.one]
        assert complex_.apply(0, one) == [plane.parse('y'), plane.parse('x')]
        assert complex_.apply(1, complex_.apply(0, one)) == [plane.zero]

    def test_cotangent_sequence(self, plane):
        certificate = differential_sequence_check(plane, ['x'])
        assert certificate['passed']
        assert certificate['base_vars'] == ['y']
