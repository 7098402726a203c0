"""
Suite comparing the three Gauss-Manin routes on the corpus, on input families and on
seeded random families.
"""
from typing import Dict, Hashable, Iterable, List, Optional

from ..core.base_suite import BaseSuite, CheckResult, SuiteResult
from ..core.constants import CHART_CAVEAT, Limits, ReportKeys
from ..core.errors import DModuleError, ReductionStuck
from ..core.logger import get_logger
from ..dmodules.exactalg import RatFun
from ..dmodules.gaussmanin import (
    Family, GMMatrix, certify_basis, compare_routes, corpus_families, gm_leibniz_check, gm_route_b, gm_route_c,
)
from ..validators.instance_generator import instance_rng, random_family
from ..validators.schema_validator import SchemaValidator

logger = get_logger(__name__)

# Hand-derived matrices on the quotient basis, in the base variable lam.
CORPUS_ORACLE: Dict[str, List[List[str]]] = {
    'linear': [['0']],
    'quadratic': [['-1/(2*lam)']],
    'cubic': [['-2/(3*lam)', '0'], ['0', '-1/(3*lam)']],
    'trivial': [],
    'twisted_linear': [['1']],
    'gaussian': [['-1/(2*lam)']],
}

CONTROL_FAMILY = 'quadratic'
LEIBNIZ_SHIFT = 1


def oracle_matrix(f: Family, rows: List[List[str]]) -> List[List[RatFun]]:
    return [[RatFun.from_fraction(f.base_space, f.base_ring.parse(text).to_fraction()) for text in row]
            for row in rows]


def family_checks(f: Family, full: bool, label: Optional[str] = None) -> List[CheckResult]:
    """Route comparison report, basis certificate and Leibniz rescaling for one family."""
    label = label or f.name
    try:
        report = compare_routes(f, full=full)
    except ReductionStuck as e:
        logger.warning(f"{label}: no H^1 basis, {e}")
        return [CheckResult(f"routes_{label}", False, detail={'error': str(e)}, stuck=e.certificate)]
    results = [CheckResult(f"routes_{label}", report.passed, detail=report.to_dict(), stuck=report.stuck)]
    if report.stuck is not None:
        return results
    try:
        certificate = certify_basis(f, full)
        results.append(CheckResult(f"basis_{label}", certificate['passed'], detail=certificate))
        if report.basis:
            leibniz = gm_leibniz_check(f, f"{f.base_var} + {LEIBNIZ_SHIFT}", full)
            results.append(CheckResult(f"leibniz_{label}", leibniz['passed'], detail=leibniz))
    except ReductionStuck as e:
        results.append(CheckResult(f"basis_{label}", False, detail={'error': str(e)}, stuck=e.certificate))
    return results


class GaussManinSuite(BaseSuite):
    """
    compare_routes with the d1 and H^0 cross-checks, oracle values on the corpus,
    random families with and without admissible twists, and the sign-flipped
    transfer control on x^2 - lam.
    """

    name = 'gaussmanin'

    def __init__(self, *args, full_h1: bool = False, **kwargs):
        super().__init__(*args, **kwargs)
        self.full_h1 = full_h1

    def build_instances(self) -> Iterable[Hashable]:
        if self.inputs:
            return [('file', i) for i in range(len(self.inputs))]
        keys = [('corpus', name) for name in corpus_families()]
        keys += [('random', i) for i in range(self.instance_count(Limits.RANDOM_FAMILIES))]
        keys.append(('control', CONTROL_FAMILY))
        return keys

    def check_instance(self, key: Hashable) -> List[CheckResult]:
        kind, ident = key
        if kind == 'file':
            f = SchemaValidator(self.debug).family(self.inputs[ident], f"family[{ident}]")
            return family_checks(f, self.full_h1)
        if kind == 'corpus':
            f = corpus_families()[ident]
            results = family_checks(f, self.full_h1)
            if not self.full_h1:
                results.append(self._oracle(f, ident))
            return results
        if kind == 'control':
            return [self._sign_control(corpus_families()[ident])]

        rng = instance_rng(self.seed, self.name, ident)
        try:
            f = random_family(rng, twisted=ident % 2 == 1)
        except DModuleError as e:
            logger.warning(f"Random family {ident} rejected: {e}")
            return [CheckResult(f"random_{ident}", False, detail={'error': str(e)})]
        return family_checks(f, self.full_h1, label=f"random_{ident}")

    def _oracle(self, f: Family, name: str) -> CheckResult:
        expected = oracle_matrix(f, CORPUS_ORACLE[name])
        try:
            computed = gm_route_c(f)
        except ReductionStuck as e:
            return CheckResult(f"oracle_{name}", False, detail={'error': str(e)}, stuck=e.certificate)
        return CheckResult(f"oracle_{name}", computed.entries == expected,
                           detail={'computed': computed.strings(), 'expected': CORPUS_ORACLE[name]})

    def _sign_control(self, f: Family) -> CheckResult:
        """Route b with the base derivations acting with the wrong sign must disagree with route c."""
        reference = gm_route_c(f)
        try:
            flipped: GMMatrix = gm_route_b(f, base_action_sign=-1)
        except DModuleError as e:
            return CheckResult('sign_flip_detected', True, detail={'family': f.name, 'error': str(e)})
        detected = not flipped.agrees_with(reference)
        return CheckResult('sign_flip_detected', detected,
                           detail={'family': f.name, 'flipped_route_b': flipped.strings(),
                                   'route_c': reference.strings()})

    def format_output(self, checks: List[CheckResult]) -> SuiteResult:
        result = super().format_output(checks)
        result.extra['full_h1'] = self.full_h1
        result.extra[ReportKeys.CHART_CAVEAT] = CHART_CAVEAT
        return result
