"""
Suite certifying the truncated resolutions and the homotopy lemma on the Leray cone.
"""
from typing import Hashable, Iterable, List

from ..core.base_suite import BaseSuite, CheckResult, SuiteResult
from ..core.logger import get_logger
from ..dmodules.homalg import (
    ChainMap, check_degree_cap, homology_dims, induced_map, leray_cone_chart, mapping_cone, same_map,
    truncated_exactness,
)

logger = get_logger(__name__)

RESOLUTIONS = ('leftDR', 'rightSpencer')
TWO_VARIABLE_OFFSET = 2


class HomalgSuite(BaseSuite):
    """
    Graded (and, for n = 1, filtered) exactness certificates of the De Rham and
    Spencer resolutions, and the Leray cone certificate: homotopies, quasi-isomorphism
    to the relative complex, cone bookkeeping and d1 agreement.
    """

    name = 'homalg'

    @property
    def one_variable_bound(self) -> int:
        return self.degree_cap

    @property
    def two_variable_bound(self) -> int:
        return max(1, self.degree_cap - TWO_VARIABLE_OFFSET)

    def build_instances(self) -> Iterable[Hashable]:
        check_degree_cap(self.degree_cap)
        keys = [('exactness', kind, 1, True) for kind in RESOLUTIONS]
        keys += [('exactness', kind, 2, True) for kind in RESOLUTIONS]
        keys += [('exactness', kind, 1, False) for kind in RESOLUTIONS]
        keys += [('leray',)]
        return keys

    def check_instance(self, key: Hashable) -> List[CheckResult]:
        if key[0] == 'exactness':
            _, kind, n, graded = key
            bound = self.one_variable_bound if n == 1 else self.two_variable_bound
            certificate = truncated_exactness(kind, n, bound, graded)
            label = f"{kind}_n{n}_D{bound}_{'graded' if graded else 'filtered'}"
            return [CheckResult(f"exactness_{label}", certificate.passed, detail=certificate.to_dict())]
        return self._leray_checks()

    def _leray_checks(self) -> List[CheckResult]:
        chart = leray_cone_chart(self.two_variable_bound)
        certificate = chart.certificate()
        results = [CheckResult(name, passed) for name, passed in certificate['homotopies'].items()]
        results.append(CheckResult('cone_quasi_isomorphic_to_relative', certificate['quasi_isomorphism'],
                                   detail={'cone': certificate['cone_homology'],
                                           'relative': certificate['relative_homology']}))
        results.append(CheckResult('cone_exact_sequence_bookkeeping', certificate['exact_sequence']))
        results.append(CheckResult('e1_d1_routes_agree', certificate['e1_d1_agrees'],
                                   detail={'routes': certificate['e1_routes']}))

        cone_of_identity = mapping_cone(ChainMap.identity(chart.total)).complex
        acyclic = all(dim == 0 for dim in homology_dims(cone_of_identity).values())
        results.append(CheckResult('cone_of_identity_acyclic', acyclic))

        lemma = chart.lemma
        lo, hi = chart.cone.complex.saturated
        equal = all(same_map(induced_map(lemma.Psi, q), induced_map(lemma.identity, q))
                    for q in range(lo, hi + 1))
        results.append(CheckResult('homotopic_maps_induce_equal_homology', equal))
        return results

    def format_output(self, checks: List[CheckResult]) -> SuiteResult:
        result = super().format_output(checks)
        result.extra['degree_bounds'] = {'n1': self.one_variable_bound, 'n2': self.two_variable_bound}
        return result
