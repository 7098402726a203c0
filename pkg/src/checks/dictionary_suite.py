"""
Suite for the connection / derivation action / jet section dictionary.
"""
from typing import Any, Dict, Hashable, Iterable, List, Optional, Tuple

from ..core.base_suite import BaseSuite, CheckResult
from ..core.constants import Limits
from ..core.logger import get_logger
from ..dmodules.conn import (
    Connection, act_derivation, curvature, de_rham, format_matrix, from_d_action, is_integrable,
    is_morphism, is_zero_matrix, jet_section, jet_to_connection, lie_compatible, mat_scale,
    mat_vec, section_property, to_d_action,
)
from ..validators.instance_generator import (
    instance_rng, random_connection, random_derivation, random_elem, random_integrable_connection,
    random_ring, random_vector,
)
from ..validators.schema_validator import SchemaValidator

logger = get_logger(__name__)


def _unit(C: Connection, k: int) -> List[Any]:
    return [C.ring.one if i == k else C.ring.zero for i in range(len(C.directions))]


def round_trip_checks(C: Connection, rng) -> List[CheckResult]:
    """Exact identities that hold for every connection."""
    results = []

    action = {v: to_d_action(C, _unit(C, k)) for k, v in enumerate(C.directions)}
    rebuilt = from_d_action(C.ring, action, C.rank, C.directions)
    results.append(CheckResult('nabla_to_delta_round_trip', rebuilt == C,
                               witness=None if rebuilt == C else C.to_dict()))

    J = jet_section(C)
    back = jet_to_connection(J)
    results.append(CheckResult('jet_section_round_trip', back == C,
                               witness=None if back == C else C.to_dict()))
    results.append(CheckResult('jet_section_splits_projection', section_property(J)))

    g = random_elem(rng, C.ring, 2)
    k = rng.randrange(len(C.directions))
    scaled = [g if i == k else C.ring.zero for i in range(len(C.directions))]
    linear = to_d_action(C, scaled) == mat_scale(g, C.matrices[C.directions[k]])
    results.append(CheckResult('delta_is_o_linear', linear,
                               witness=None if linear else {'coefficient': str(g), 'direction': C.directions[k]}))

    flat = is_integrable(C)
    square_zero = de_rham(C, require_complex=False).is_complex
    results.append(CheckResult('de_rham_square_zero_iff_flat', square_zero == flat,
                               witness=None if square_zero == flat else {'flat': flat, 'd_squared_zero': square_zero}))
    return results


def integrable_checks(C: Connection, rng) -> List[CheckResult]:
    """Lie compatibility of the derivation action, on random derivations and sections."""
    a = random_derivation(rng, C.ring)
    b = random_derivation(rng, C.ring)
    m = random_vector(rng, C.ring, C.rank)
    compatible = lie_compatible(C, a, b, m)
    witness = None
    if not compatible:
        witness = {'a': [str(x) for x in a], 'b': [str(x) for x in b], 'm': [str(x) for x in m]}
    return [CheckResult('lie_compatibility', compatible, witness=witness)]


def morphism_checks(C: Connection, C_prime: Connection, g) -> List[CheckResult]:
    """g: C -> C' is a morphism, and it intertwines the derivation actions on generators."""
    results = [CheckResult('gauge_is_morphism', is_morphism(g, C, C_prime))]
    intertwines = True
    for k in range(len(C.directions)):
        derivation = _unit(C, k)
        for j in range(C.rank):
            e_j = [C.ring.one if i == j else C.ring.zero for i in range(C.rank)]
            left = act_derivation(C_prime, derivation, mat_vec(g, e_j))
            right = mat_vec(g, act_derivation(C, derivation, e_j))
            if left != right:
                intertwines = False
    results.append(CheckResult('morphism_intertwines_d_action', intertwines))
    return results


def first_curvature(C: Connection) -> Optional[Dict[str, Any]]:
    for (vi, vj), F in curvature(C).items():
        if not is_zero_matrix(F):
            return {'pair': [vi, vj], 'curvature': format_matrix(F)}
    return None


class DictionarySuite(BaseSuite):
    """
    Round trips nabla <-> Delta <-> delta, d o d = 0 iff flat, Lie compatibility on
    integrable instances and gauge morphisms. Input connections may declare
    "integrable": true, which is then checked.
    """

    name = 'dictionary'

    def build_instances(self) -> Iterable[Hashable]:
        if self.inputs:
            return [('file', i) for i in range(len(self.inputs))]
        return [('random', i) for i in range(self.instance_count(Limits.DICTIONARY_INSTANCES))]

    def _file_instance(self, index: int) -> Tuple[Connection, Optional[bool]]:
        document = self.inputs[index]
        C = SchemaValidator(self.debug).connection(document, f"connection[{index}]")
        declared = document.get('integrable')
        return C, declared

    def check_instance(self, key: Hashable) -> List[CheckResult]:
        source, index = key
        rng = instance_rng(self.seed, self.name, index)
        if source == 'file':
            C, declared = self._file_instance(index)
            results = round_trip_checks(C, rng)
            if declared is not None:
                flat = is_integrable(C)
                results.append(CheckResult('declared_integrability', flat == bool(declared),
                                           detail={'declared': bool(declared), 'computed': flat},
                                           witness=first_curvature(C) if declared and not flat else None))
            if is_integrable(C):
                results.extend(integrable_checks(C, rng))
            return results

        ring = random_ring(rng)
        if index % 2 == 0:
            C_seed, C, g = random_integrable_connection(rng, ring)
            results = round_trip_checks(C, rng)
            results.extend(integrable_checks(C, rng))
            results.extend(morphism_checks(C_seed, C, g))
            return results
        C = random_connection(rng, ring)
        results = round_trip_checks(C, rng)
        if is_integrable(C):
            results.extend(integrable_checks(C, rng))
        return results
