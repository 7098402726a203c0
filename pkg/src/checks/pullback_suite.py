"""
Suite comparing the two inverse images: chain rule on matrices vs the D-module action.
"""
from fractions import Fraction
from typing import Hashable, Iterable, List

from ..core.base_suite import BaseSuite, CheckResult, SuiteResult
from ..core.constants import Limits
from ..core.logger import get_logger
from ..dmodules.conn import Connection, format_matrix, is_integrable
from ..dmodules.exactalg import LocRing
from ..dmodules.pullback import PolyMap, compare_pullbacks, compose_maps, pullback_connection
from ..validators.instance_generator import (
    instance_rng, random_composable_maps, random_integrable_connection, random_pullback_instance,
)
from ..validators.schema_validator import SchemaValidator

logger = get_logger(__name__)

HAND_CONSTANT = Fraction(1, 3)


def squaring_instance(c: Fraction = HAND_CONSTANT):
    """f(x) = x^2 into Q[y, 1/y] with A_y = (c/y); both routes must give (2c/x)."""
    X = LocRing(('x',), ['x'])
    Y = LocRing(('y',), ['y'])
    f = PolyMap(X, Y, ['x^2'])
    C = Connection(Y, 1, {'y': [[f"{c}/y"]]})
    expected = [[X.parse(f"{2 * c}/x")]]
    return f, C, expected


def comparison_check(name: str, f: PolyMap, C: Connection) -> CheckResult:
    comparison = compare_pullbacks(f, C)
    return CheckResult(name, comparison.equal, detail=comparison.to_dict(), witness=comparison.witness)


class PullbackSuite(BaseSuite):
    """
    compare_pullbacks on the squaring instance, on input files and on seeded random
    (f, C); functoriality on composable pairs; flatness preserved under pullback.
    """

    name = 'pullback'

    def build_instances(self) -> Iterable[Hashable]:
        keys = [('hand', 0)]
        if self.inputs:
            return keys + [('file', i) for i in range(len(self.inputs))]
        keys += [('random', i) for i in range(self.instance_count(Limits.PULLBACK_INSTANCES))]
        pairs = min(Limits.FUNCTORIALITY_PAIRS, self.instance_count(Limits.FUNCTORIALITY_PAIRS))
        keys += [('compose', i) for i in range(pairs)]
        return keys

    def check_instance(self, key: Hashable) -> List[CheckResult]:
        kind, index = key
        if kind == 'hand':
            f, C, expected = squaring_instance()
            result = comparison_check('squaring_instance', f, C)
            pulled = pullback_connection(f, C).matrices['x']
            matches = pulled == expected
            return [result, CheckResult('squaring_instance_value', matches,
                                        detail={'matrix': format_matrix(pulled), 'expected': format_matrix(expected)})]
        if kind == 'file':
            f, C = SchemaValidator(self.debug).pullback_input(self.inputs[index], f"map[{index}]")
            return [comparison_check(f'input_{index}', f, C)]

        rng = instance_rng(self.seed, f"{self.name}:{kind}", index)
        if kind == 'random':
            f, C = random_pullback_instance(rng)
            results = [comparison_check('routes_agree', f, C)]
            _, flat, _ = random_integrable_connection(rng, f.target, degree=2)
            pulled = pullback_connection(f, flat)
            results.append(CheckResult('flatness_preserved', is_integrable(pulled)))
            return results

        f, g, C = random_composable_maps(rng)
        direct = pullback_connection(compose_maps(g, f), C)
        stepwise = pullback_connection(f, pullback_connection(g, C))
        witness = None if direct == stepwise else {'f': f.to_dict(), 'g': g.to_dict()}
        return [CheckResult('functoriality', direct == stepwise, witness=witness)]

    def format_output(self, checks: List[CheckResult]) -> SuiteResult:
        result = super().format_output(checks)
        hand = next((c for c in checks if c.name == 'squaring_instance_value'), None)
        if hand is not None:
            result.extra['squaring_instance'] = hand.detail
        return result
