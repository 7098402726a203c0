"""
Suite for the involution, left/right exchange and the transfer-module maps.
"""
from typing import Hashable, Iterable, List

from ..core.base_suite import BaseSuite, CheckResult, SuiteResult
from ..core.constants import CHART_CAVEAT, Limits, ReportKeys
from ..core.logger import get_logger
from ..dmodules.conn import apply_operator, differential_sequence_check
from ..dmodules.exactalg import LocRing
from ..dmodules.transfer import (
    OmegaD, TransferChart, alpha_morphism, descend, exchange_left_right, exchange_right_left,
    involution, involution_intertwines, lambda_closed_form, lambda_map, nabla_transfer, operator_list,
    relative_differential, transfer_elements_equal, transfer_report,
)
from ..dmodules.weyl import WeylOp, format_operator, transpose
from ..validators.instance_generator import (
    instance_rng, random_connection, random_integrable_connection, random_operator, random_ring, random_vector,
)

logger = get_logger(__name__)

CONTROL_OPERATORS = ('d_y', 'y*d_y', 'x*d_y^2 + d_x')


def product_chart(sign: int = 1) -> TransferChart:
    """X = A^2 with fiber x over base y."""
    return TransferChart(LocRing(('x', 'y')), ('x',), ('y',), sign)


def structure_checks(chart: TransferChart, P: WeylOp) -> List[CheckResult]:
    """The lambda square, lambda o d_{X/Y} = 0 and alpha = nabla o lambda on one operator."""
    image = lambda_map(chart, P)
    results = []

    square = image == lambda_closed_form(chart, P)
    results.append(CheckResult('lambda_square_commutes', square,
                               witness=None if square else format_operator(P)))

    killed = not lambda_map(chart, relative_differential(chart, [P]))
    results.append(CheckResult('lambda_kills_relative_differential', killed,
                               witness=None if killed else format_operator(P)))

    alpha = alpha_morphism(chart, P)
    nabla = nabla_transfer(image)
    agrees = transfer_elements_equal(alpha, nabla)
    witness = None
    if not agrees:
        witness = {'P': format_operator(P), 'alpha': operator_list(alpha), 'nabla_lambda': operator_list(nabla)}
    results.append(CheckResult('alpha_equals_nabla_lambda', agrees, witness=witness))
    return results


class TransferSuite(BaseSuite):
    """
    Involution and exchange laws on random charts (n <= 2), transfer identities on the
    product chart, and a sign-flipped control that must be detected.
    """

    name = 'transfer'

    def build_instances(self) -> Iterable[Hashable]:
        keys = [('random', i) for i in range(self.instance_count(Limits.TRANSFER_INSTANCES))]
        return keys + [('control', 0)]

    def check_instance(self, key: Hashable) -> List[CheckResult]:
        kind, index = key
        if kind == 'control':
            return [self._sign_control(), self._cotangent_sequence()]

        rng = instance_rng(self.seed, self.name, index)
        ring = random_ring(rng)
        P = random_operator(rng, ring, self.order_cap)
        Q = random_operator(rng, ring, self.order_cap)
        e = OmegaD(ring, P)
        results = []

        twice = involution(involution(e)) == e
        results.append(CheckResult('involution_squares_to_identity', twice,
                                   witness=None if twice else format_operator(P)))
        unit = OmegaD(ring, WeylOp.scalar(ring, 1))
        results.append(CheckResult('involution_fixes_unit', involution(unit) == unit))
        swaps = involution_intertwines(e, Q)
        results.append(CheckResult('involution_swaps_right_structures', swaps,
                                   witness=None if swaps else [format_operator(P), format_operator(Q)]))

        C = random_connection(rng, ring, degree=2)
        round_trip = exchange_right_left(exchange_left_right(C)) == C
        results.append(CheckResult('exchange_round_trip', round_trip))

        _, flat, _ = random_integrable_connection(rng, ring)
        m = random_vector(rng, ring, flat.rank)
        right = exchange_left_right(flat).act(P, m)
        left = apply_operator(flat, transpose(P), m)
        results.append(CheckResult('right_action_is_transposed_left_action', right == left,
                                   witness=None if right == left else format_operator(P)))

        chart = product_chart()
        T = random_operator(rng, chart.ring, self.order_cap)
        results.extend(structure_checks(chart, T))

        image = lambda_map(chart, T)
        lifted = descend(image)
        descends = lambda_map(chart, lifted) == image
        results.append(CheckResult('descend_inverts_lambda', descends,
                                   witness=None if descends else str(image)))
        return results

    def _sign_control(self) -> CheckResult:
        """With the base derivations acting with the wrong sign some identity must break."""
        chart = product_chart(sign=-1)
        broken = []
        for text in CONTROL_OPERATORS:
            P = WeylOp.parse(chart.ring, text)
            broken.extend(f"{r.name}: {text}" for r in structure_checks(chart, P) if not r.passed)
        return CheckResult('sign_flip_detected', bool(broken), detail={'violations': broken})

    def _cotangent_sequence(self) -> CheckResult:
        chart = product_chart()
        certificate = differential_sequence_check(chart.ring, chart.fiber)
        return CheckResult('cotangent_sequence_exact', certificate['passed'], detail=certificate)

    def format_output(self, checks: List[CheckResult]) -> SuiteResult:
        result = super().format_output(checks)
        report = transfer_report(product_chart())
        result.extra['chart'] = {'fiber': report['fiber'], 'base': report['base']}
        result.extra[ReportKeys.CHART_CAVEAT] = CHART_CAVEAT
        return result
