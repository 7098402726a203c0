"""Tests for the involution, the left/right exchange and the transfer module on the product chart."""
import pytest

from src.checks.transfer_suite import CONTROL_OPERATORS, product_chart, structure_checks
from src.core.constants import CHART_CAVEAT
from src.core.errors import RingMismatch, ShapeMismatch
from src.dmodules.conn import Connection, apply_operator
from src.dmodules.exactalg import LocRing
from src.dmodules.transfer import (
    OmegaD, TransferChart, TransferElem, alpha_morphism, descend, exchange_left_right, exchange_right_left,
    involution, involution_intertwines, lambda_closed_form, lambda_map, left_base_action, nabla_transfer,
    relative_differential, tensor_descend, transfer_elements_equal, transfer_report,
)
from src.dmodules.weyl import WeylOp, transpose
from src.validators.instance_generator import (
    instance_rng, random_connection, random_integrable_connection, random_operator, random_ring, random_vector,
)

SEEDS = range(4)
HAND_OPERATORS = ['d_y', 'y*d_y', 'x*d_y^2 + d_x', 'x^2*y*d_x*d_y + 3*y', 'd_y^3 - x*d_y']


def op(chart: TransferChart, text: str) -> WeylOp:
    return WeylOp.parse(chart.ring, text)


class TestChart:

    def test_overlap(self, plane):
        with pytest.raises(ShapeMismatch):
            TransferChart(plane, ('x',), ('x', 'y'))

    def test_cover(self, plane):
        with pytest.raises(ShapeMismatch):
            TransferChart(plane, ('x',), ())

    def test_sign(self, plane):
        with pytest.raises(ValueError):
            TransferChart(plane, ('x',), ('y',), 2)

    def test_fiber_derivations_are_not_transfer_elements(self, chart):
        with pytest.raises(ShapeMismatch):
            TransferElem(chart, op(chart, 'd_x'))

    def test_foreign_operator(self, chart, laurent):
        with pytest.raises(RingMismatch):
            lambda_map(chart, WeylOp.derivation(laurent, 'x'))

    def test_report_carries_caveat(self, chart):
        report = transfer_report(chart)
        assert report['chart_caveat'] == CHART_CAVEAT
        assert report['fiber'] == ['x'] and report['base'] == ['y']


class TestInvolution:

    @pytest.mark.parametrize('seed', SEEDS)
    def test_laws(self, seed):
        rng = instance_rng(seed, 'test_transfer', 0)
        ring = random_ring(rng)
        P, Q = random_operator(rng, ring, 2), random_operator(rng, ring, 2)
        e = OmegaD(ring, P)
        assert involution(involution(e)) == e
        assert involution_intertwines(e, Q)

    def test_unit_is_fixed(self, plane):
        unit = OmegaD(plane, WeylOp.scalar(plane, 1))
        assert involution(unit) == unit


class TestExchange:

    @pytest.mark.parametrize('seed', SEEDS)
    def test_round_trip(self, seed):
        rng = instance_rng(seed, 'test_transfer', 1)
        C = random_connection(rng, random_ring(rng), degree=2)
        assert exchange_right_left(exchange_left_right(C)) == C

    @pytest.mark.parametrize('seed', SEEDS)
    def test_right_action_is_transposed_left_action(self, seed):
        rng = instance_rng(seed, 'test_transfer', 2)
        ring = random_ring(rng)
        _, C, _ = random_integrable_connection(rng, ring)
        P = random_operator(rng, ring, 2)
        m = random_vector(rng, ring, C.rank)
        assert exchange_left_right(C).act(P, m) == apply_operator(C, transpose(P), m)

    def test_right_derivation(self, plane):
        R = exchange_left_right(Connection(plane, 1, {'x': [['y']], 'y': [['x']]}))
        assert R.act_derivation('x', [plane.parse('x')]) == [plane.parse('-1 - x*y')]


class TestTransferModule:

    def test_lambda_on_generators(self, chart):
        assert lambda_map(chart, op(chart, 'd_y')).operator == -op(chart, 'd_y')
        assert not lambda_map(chart, op(chart, 'd_x'))
        assert lambda_map(chart, op(chart, 'x*y')).operator == op(chart, 'x*y')

    @pytest.mark.parametrize('text', HAND_OPERATORS)
    def test_structure_identities(self, chart, text):
        P = op(chart, text)
        assert lambda_map(chart, P) == lambda_closed_form(chart, P)
        assert not lambda_map(chart, relative_differential(chart, [P]))
        assert transfer_elements_equal(alpha_morphism(chart, P), nabla_transfer(lambda_map(chart, P)))

    @pytest.mark.parametrize('seed', SEEDS)
    def test_structure_identities_on_random_operators(self, chart, seed):
        P = random_operator(instance_rng(seed, 'test_transfer', 3), chart.ring, 3)
        assert all(result.passed for result in structure_checks(chart, P))

    def test_sign_flip_breaks_an_identity(self):
        flipped = product_chart(sign=-1)
        failures = [result.name for text in CONTROL_OPERATORS
                    for result in structure_checks(flipped, op(flipped, text)) if not result.passed]
        assert failures

    def test_relative_differential_arity(self, chart):
        with pytest.raises(ShapeMismatch):
            relative_differential(chart, [])

    def test_left_base_action_rejects_fiber_data(self, chart):
        unit = TransferElem.unit(chart)
        with pytest.raises(ShapeMismatch):
            left_base_action(op(chart, 'd_x'), unit)
        with pytest.raises(ShapeMismatch):
            left_base_action(op(chart, 'x'), unit)

    def test_left_base_action(self, chart):
        unit = TransferElem.unit(chart)
        assert left_base_action(op(chart, 'd_y'), unit).operator == -op(chart, 'd_y')


class TestDescent:

    def test_unit(self, chart):
        assert descend(TransferElem.unit(chart)) == WeylOp.scalar(chart.ring, 1)

    @pytest.mark.parametrize('text', HAND_OPERATORS)
    def test_descend_inverts_lambda(self, chart, text):
        image = lambda_map(chart, op(chart, text))
        assert lambda_map(chart, descend(image)) == image

    def test_tensor_descend_of_unit(self, chart):
        C = Connection(chart.ring, 1, {'x': [['y']], 'y': [['x']]})
        m = [chart.ring.parse('x + y^2')]
        assert tensor_descend(chart, TransferElem.unit(chart), C, m) == m

    def test_tensor_descend_needs_matching_ring(self, chart):
        with pytest.raises(RingMismatch):
            tensor_descend(chart, TransferElem.unit(chart), Connection.trivial(LocRing(('x',))), [1])
