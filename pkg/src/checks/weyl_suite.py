"""
Suite for the Weyl algebra laws: associativity, module action, transposition, symbols.
"""
from typing import Hashable, Iterable, List

from ..core.base_suite import BaseSuite, CheckResult
from ..core.constants import Limits
from ..core.logger import get_logger
from ..dmodules.exactalg import LocRing
from ..dmodules.weyl import WeylOp, adjoint_check, apply, format_operator, order_and_symbol, transpose, weyl_mul
from ..validators.instance_generator import instance_rng, random_elem, random_operator, random_polynomial_operator

logger = get_logger(__name__)

SYMBOL_EVERY = 2
ADJOINT_EVERY = 10


def _witness(*operators: WeylOp) -> List[str]:
    return [format_operator(P) for P in operators]


class WeylLawSuite(BaseSuite):
    """Exact ring, action and anti-automorphism laws on seeded random operators."""

    name = 'weyl'

    def build_instances(self) -> Iterable[Hashable]:
        return list(range(self.instance_count(Limits.WEYL_INSTANCES)))

    def check_instance(self, key: Hashable) -> List[CheckResult]:
        index = key
        rng = instance_rng(self.seed, self.name, index)
        ring = LocRing(('x', 'y')[:1 + index % 2], ['x'] if rng.random() < 0.3 else [])
        order = self.order_cap
        P = random_operator(rng, ring, order)
        Q = random_operator(rng, ring, order)
        R = random_operator(rng, ring, order)
        m = random_elem(rng, ring)
        results = []

        left = weyl_mul(weyl_mul(P, Q), R)
        right = weyl_mul(P, weyl_mul(Q, R))
        results.append(CheckResult('associativity', left == right,
                                   witness=None if left == right else _witness(P, Q, R)))

        action = apply(P, apply(Q, m)) == apply(weyl_mul(P, Q), m)
        results.append(CheckResult('left_module_action', action,
                                   witness=None if action else _witness(P, Q) + [str(m)]))

        involutive = transpose(transpose(P)) == P
        results.append(CheckResult('transpose_involutive', involutive,
                                   witness=None if involutive else _witness(P)))

        anti = transpose(weyl_mul(P, Q)) == weyl_mul(transpose(Q), transpose(P))
        results.append(CheckResult('transpose_anti_automorphism', anti,
                                   witness=None if anti else _witness(P, Q)))

        if index % SYMBOL_EVERY == 0:
            _, sp = order_and_symbol(P)
            _, sq = order_and_symbol(Q)
            PQ = weyl_mul(P, Q)
            multiplicative = bool(PQ) and order_and_symbol(PQ)[1] == sp * sq
            results.append(CheckResult('symbol_multiplicative', multiplicative,
                                       witness=None if multiplicative else _witness(P, Q)))

        if index % ADJOINT_EVERY == 0:
            line = LocRing(('x',))
            T = random_polynomial_operator(rng, line, order=2)
            adjoint = adjoint_check(T, k_max=6)
            results.append(CheckResult('transpose_integration_by_parts', adjoint,
                                       witness=None if adjoint else _witness(T)))
        return results
