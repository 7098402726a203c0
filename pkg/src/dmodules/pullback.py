"""
Inverse images of connections along polynomial maps between affine charts.

Two independent constructions are provided: the chain-rule formula on
connection matrices and the generator-level D_X-action on f^*M, whose
agreement is checked by compare_pullbacks().
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from ..core.errors import RingMismatch, ShapeMismatch, UndeclaredDenominator
from ..core.logger import get_logger
from .conn import (Connection, Matrix, Vector, act_derivation, first_difference, format_matrix,
                   mat_add, mat_scale, zero_matrix)
from .exactalg import LocElem, LocRing, evaluate_poly, format_poly

logger = get_logger(__name__)


class PolyMap:
    """
    f: X -> Y given by component functions f_1..f_m on the source chart.

    Every declared denominator of the target must pull back to a unit of the
    source; this is checked at construction.
    """

    def __init__(self, source: LocRing, target: LocRing, components: Sequence):
        if len(components) != target.nvars:
            raise ShapeMismatch(
                f"Map into {target.nvars} variables needs {target.nvars} components, got {len(components)}")
        self.source = source
        self.target = target
        self.components: Tuple[LocElem, ...] = tuple(source.convert(c) for c in components)
        self._check_denominators()

    def _check_denominators(self) -> None:
        for d in self.target.denominators:
            image = evaluate_poly(d, self.source, self.components)
            try:
                image.inverse()
            except (UndeclaredDenominator, ZeroDivisionError) as e:
                logger.error(f"Denominator '{format_poly(d)}' pulls back to non-unit '{image}'")
                raise UndeclaredDenominator(
                    f"f^*({format_poly(d)}) = {image} is not a unit of {self.source!r}") from e

    @classmethod
    def identity(cls, ring: LocRing) -> 'PolyMap':
        return cls(ring, ring, ring.gens)

    def pull(self, a: LocElem) -> LocElem:
        """a o f for a function on the target."""
        return self.target.convert(a).substitute(self.source, self.components)

    def pull_matrix(self, A: Matrix) -> Matrix:
        return [[self.pull(a) for a in row] for row in A]

    def jacobian(self) -> List[List[LocElem]]:
        """J[k][i] = d f_k / d x_i."""
        return [[fk.diff(i) for i in range(self.source.nvars)] for fk in self.components]

    def __eq__(self, other) -> bool:
        return (isinstance(other, PolyMap) and self.source == other.source
                and self.target == other.target and self.components == other.components)

    def __hash__(self) -> int:
        return hash((self.source, self.target, self.components))

    def to_dict(self) -> Dict:
        return {
            'source': list(self.source.variables),
            'target': list(self.target.variables),
            'components': [str(c) for c in self.components],
        }


def compose_maps(g: PolyMap, f: PolyMap) -> PolyMap:
    """g o f for f: X -> Y and g: Y -> Z."""
    if f.target != g.source:
        raise RingMismatch("Maps are not composable: target of f differs from source of g")
    return PolyMap(f.source, g.target, [f.pull(c) for c in g.components])


def _check_target(f: PolyMap, C: Connection) -> None:
    if C.ring != f.target:
        raise RingMismatch(f"Connection over {C.ring!r}, map targets {f.target!r}")
    if C.directions != f.target.variables:
        raise ShapeMismatch("Inverse images need an absolute connection on the target")


def pullback_connection(f: PolyMap, C: Connection) -> Connection:
    """
    Chain rule on connection matrices: B_i = sum_k (d f_k / d x_i) (A_k o f).

    Raises:
        RingMismatch: If C does not live on the target of f
        UndeclaredDenominator: If a substituted entry leaves the source ring
    """
    _check_target(f, C)
    jacobian = f.jacobian()
    pulled = {y: f.pull_matrix(C.matrices[y]) for y in f.target.variables}
    matrices = {}
    for i, x in enumerate(f.source.variables):
        B = zero_matrix(f.source, C.rank, C.rank)
        for k, y in enumerate(f.target.variables):
            if jacobian[k][i]:
                B = mat_add(B, mat_scale(jacobian[k][i], pulled[y]))
        matrices[x] = B
    return Connection(f.source, C.rank, matrices)


# ============================================================================
# D-MODULE ROUTE: d(a (x) m) = d(a) (x) m + a * sum_k d(f_k) (x) eta_k(m)
# ============================================================================

@dataclass
class PulledTensor:
    """Finite sum of pure tensors a (x) m in O_X (x)_{f^-1 O_Y} f^-1 M."""
    terms: List[Tuple[LocElem, Vector]] = field(default_factory=list)

    def flatten(self, f: PolyMap) -> Vector:
        """Identify a (x) m with a * (m o f) in the free module O_X^r."""
        if not self.terms:
            raise ShapeMismatch("Empty tensor has no rank")
        rank = len(self.terms[0][1])
        result = [f.source.zero] * rank
        for a, m in self.terms:
            if not a:
                continue
            result = [r + a * f.pull(x) for r, x in zip(result, m)]
        return result


def _unit(ring: LocRing, size: int, index: int) -> List[LocElem]:
    return [ring.one if k == index else ring.zero for k in range(size)]


def pullback_action(f: PolyMap, C: Connection, var: str, tensor: PulledTensor) -> PulledTensor:
    """
    Action of d/d(var) on a pulled-back tensor, term by term through the
    derivation actions eta_k = Delta_{d/dy_k} of the target module.
    """
    _check_target(f, C)
    i = f.source.index(var)
    m_vars = f.target.nvars
    derivatives = [fk.diff(i) for fk in f.components]
    result: List[Tuple[LocElem, Vector]] = []
    for a, m in tensor.terms:
        da = a.diff(i)
        if da:
            result.append((da, list(m)))
        for k in range(m_vars):
            if not derivatives[k] or not a:
                continue
            eta = act_derivation(C, _unit(f.target, m_vars, k), m)
            result.append((a * derivatives[k], eta))
    return PulledTensor(result)


def pullback_dmodule(f: PolyMap, C: Connection) -> Connection:
    """
    The D_X-structure of f^*M on the generators 1 (x) e_j, re-expressed as
    connection matrices on the free module O_X^r.
    """
    _check_target(f, C)
    matrices = {}
    for x in f.source.variables:
        columns = []
        for j in range(C.rank):
            generator = PulledTensor([(f.source.one, _unit(f.target, C.rank, j))])
            image = pullback_action(f, C, x, generator)
            columns.append(image.flatten(f) if image.terms else [f.source.zero] * C.rank)
        matrices[x] = [[columns[j][l] for j in range(C.rank)] for l in range(C.rank)]
    return Connection(f.source, C.rank, matrices)


@dataclass
class PullbackComparison:
    equal: bool
    connection_route: Connection
    dmodule_route: Connection
    witness: Optional[Dict[str, str]] = None

    def to_dict(self) -> Dict:
        return {
            'equal': self.equal,
            'matrices': {x: format_matrix(M) for x, M in self.connection_route.matrices.items()},
            'witness': self.witness,
        }


def compare_pullbacks(f: PolyMap, C: Connection) -> PullbackComparison:
    """Exact equality of the two inverse images, with the first differing entry on mismatch."""
    via_connection = pullback_connection(f, C)
    via_dmodule = pullback_dmodule(f, C)
    witness = None
    for x in f.source.variables:
        difference = first_difference(via_connection.matrices[x], via_dmodule.matrices[x])
        if difference is not None:
            witness = {'direction': x, **difference}
            logger.debug(f"Inverse images differ along {x}: {difference}")
            break
    return PullbackComparison(witness is None, via_connection, via_dmodule, witness)
