"""
Left/right exchange and transfer modules on a product chart X = F x Y.

D_{Y<-X} = omega_{X/Y} (x) f^*D_Y: with omega_{X/Y} = dx_1^...^dx_d fixed, an
element omega (x) sum_b c_b(x, y) d_y^b is stored as the WeylOp R = sum c_b d_y^b
(no fiber derivations). Structures:

    left D_X on f^*D_Y        P . R = D_f(P o R)       (f^*D_Y = D_X / D_X d_x)
    right D_X on D_{Y<-X}     (omega (x) R) . Q = omega (x) (Q* . R)
    left f^-1 D_Y             eta . (omega (x) R) = omega (x) R o eta*
    lambda                    omega (x) P -> (omega (x) 1) . P = omega (x) D_f(P*)
    nabla_{Y<-X}              e -> sum_i dy_i (x) (d_{y_i} . e)
    alpha                     omega (x) P -> sum_i dy_i (x) omega (x) D_f((d_{y_i} P)*)

The right action is evaluated generator by generator; on base derivations it
is scaled by ``base_action_sign`` (+1 is the consistent assignment).
"""
from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence, Tuple

from ..core.constants import CHART_CAVEAT
from ..core.errors import LiftFailure, RingMismatch, ShapeMismatch
from ..core.logger import get_logger
from .conn import Connection, Matrix, Vector, apply_operator, mat_scale
from .exactalg import LocElem, LocRing
from .weyl import WeylOp, format_operator, transpose, weyl_mul

logger = get_logger(__name__)


# ============================================================================
# CHART
# ============================================================================

@dataclass(frozen=True)
class TransferChart:
    """Product chart: ring variables split into fiber and base variables."""
    ring: LocRing
    fiber: Tuple[str, ...]
    base: Tuple[str, ...]
    base_action_sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'fiber', tuple(self.fiber))
        object.__setattr__(self, 'base', tuple(self.base))
        if set(self.fiber) & set(self.base):
            raise ShapeMismatch(f"Fiber {self.fiber} and base {self.base} overlap")
        if sorted(self.fiber + self.base) != sorted(self.ring.variables):
            raise ShapeMismatch(f"Fiber {self.fiber} and base {self.base} do not cover {self.ring.variables}")
        if self.base_action_sign not in (1, -1):
            raise ValueError("base_action_sign must be +1 or -1")

    @property
    def fiber_positions(self) -> Tuple[int, ...]:
        return tuple(self.ring.index(v) for v in self.fiber)

    @property
    def base_positions(self) -> Tuple[int, ...]:
        return tuple(self.ring.index(v) for v in self.base)

    def is_base_operator(self, P: WeylOp) -> bool:
        """No fiber derivations."""
        return all(alpha[i] == 0 for alpha in P.terms for i in self.fiber_positions)

    def is_base_function(self, c: LocElem) -> bool:
        return not any(c.depends_on(v) for v in self.fiber)

    def check(self, P: WeylOp) -> WeylOp:
        if P.ring != self.ring:
            raise RingMismatch(f"Operator over {P.ring!r} used on chart over {self.ring!r}")
        return P

    def with_sign(self, sign: int) -> 'TransferChart':
        return TransferChart(self.ring, self.fiber, self.base, sign)


# ============================================================================
# omega_X(D_X) AND THE INVOLUTION
# ============================================================================

@dataclass(frozen=True)
class OmegaD:
    """omega (x) P with omega = dv_1^...^dv_n."""
    ring: LocRing
    operator: WeylOp

    def right_multiply(self, Q: WeylOp) -> 'OmegaD':
        """First right structure: right multiplication on D_X."""
        return OmegaD(self.ring, weyl_mul(self.operator, Q))

    def right_tensor(self, Q: WeylOp) -> 'OmegaD':
        """
        Second right structure, from omega . a = a omega and
        omega . d_i = -Lie_{d_i}(omega) = 0 on the tensor product:
        (omega (x) P) . a = omega (x) a P, (omega (x) P) . d_i = -omega (x) d_i P.
        """
        result = WeylOp(self.ring)
        for alpha, c in Q.terms.items():
            current = weyl_mul(WeylOp.scalar(self.ring, c), self.operator)
            for i, k in enumerate(alpha):
                for _ in range(k):
                    current = -weyl_mul(WeylOp.derivation(self.ring, i), current)
            result = result + current
        return OmegaD(self.ring, result)

    def __str__(self) -> str:
        return f"omega (x) {format_operator(self.operator)}"


def involution(e: OmegaD) -> OmegaD:
    """iota(omega (x) P) = omega (x) P*."""
    return OmegaD(e.ring, transpose(e.operator))


def involution_intertwines(e: OmegaD, Q: WeylOp) -> bool:
    """iota(e .1 Q) == iota(e) .2 Q."""
    return involution(e.right_multiply(Q)) == involution(e).right_tensor(Q)


# ============================================================================
# LEFT/RIGHT EXCHANGE FOR CONNECTIONS
# ============================================================================

@dataclass
class RightConnection:
    """
    Right D_X-module omega (x) O^r: (omega (x) m) . d_i = omega (x) (-d_i m + R_i m),
    (omega (x) m) . a = omega (x) a m.
    """
    ring: LocRing
    rank: int
    matrices: Dict[str, Matrix]

    def act_derivation(self, var: str, m: Vector) -> Vector:
        R = self.matrices[var]
        return [-x.diff(var) + sum((R[k][j] * m[j] for j in range(self.rank) if R[k][j] and m[j]), self.ring.zero)
                for k, x in enumerate(m)]

    def act(self, P: WeylOp, m: Vector) -> Vector:
        """(omega (x) m) . P, generator by generator: m . (c d^alpha) = ((m . c) . d) ... ."""
        result = [self.ring.zero] * self.rank
        for alpha, c in P.terms.items():
            image = [c * x for x in m]
            for i, k in enumerate(alpha):
                for _ in range(k):
                    image = self.act_derivation(self.ring.variables[i], image)
            result = [r + y for r, y in zip(result, image)]
        return result


def exchange_left_right(C: Connection) -> RightConnection:
    """omega (x) M: R_i = -A_i."""
    return RightConnection(C.ring, C.rank, {v: mat_scale(-1, C.matrices[v]) for v in C.directions})


def exchange_right_left(R: RightConnection) -> Connection:
    """N (x) omega^-1: A_i = -R_i."""
    return Connection(R.ring, R.rank, {v: mat_scale(-1, M) for v, M in R.matrices.items()},
                      tuple(R.matrices))


# ============================================================================
# D_{Y<-X}
# ============================================================================

class TransferElem:
    """omega_{X/Y} (x) R with R a base-derivation operator over the chart ring."""

    __slots__ = ('chart', 'operator')

    def __init__(self, chart: TransferChart, operator: WeylOp):
        chart.check(operator)
        if not chart.is_base_operator(operator):
            raise ShapeMismatch(f"'{operator}' contains fiber derivations; not an element of f^*D_Y")
        self.chart = chart
        self.operator = operator

    @classmethod
    def unit(cls, chart: TransferChart) -> 'TransferElem':
        return cls(chart, WeylOp.scalar(chart.ring, 1))

    @classmethod
    def zero(cls, chart: TransferChart) -> 'TransferElem':
        return cls(chart, WeylOp(chart.ring))

    def __add__(self, other: 'TransferElem') -> 'TransferElem':
        return TransferElem(self.chart, self.operator + other.operator)

    def __sub__(self, other: 'TransferElem') -> 'TransferElem':
        return TransferElem(self.chart, self.operator - other.operator)

    def __neg__(self) -> 'TransferElem':
        return TransferElem(self.chart, -self.operator)

    def __eq__(self, other) -> bool:
        return isinstance(other, TransferElem) and self.operator == other.operator

    def __hash__(self) -> int:
        return hash(self.operator)

    def __bool__(self) -> bool:
        return bool(self.operator)

    def __str__(self) -> str:
        top = '^'.join(f"d{v}" for v in self.chart.fiber)
        return f"{top} (x) ({format_operator(self.operator)})"

    def __repr__(self) -> str:
        return f"TransferElem({self})"


def d_f(chart: TransferChart, Q: WeylOp) -> WeylOp:
    """Canonical D_X -> f^*D_Y, Q -> Q . (1 (x) 1): drop every term with a fiber derivation."""
    chart.check(Q)
    fiber = chart.fiber_positions
    return WeylOp(chart.ring, {alpha: c for alpha, c in Q.terms.items() if not any(alpha[i] for i in fiber)})


def left_on_pullback(chart: TransferChart, P: WeylOp, R: WeylOp) -> WeylOp:
    """Left D_X-action on f^*D_Y = D_X / D_X d_x."""
    return d_f(chart, weyl_mul(P, R))


def _right_generator(chart: TransferChart, R: WeylOp, var_index: int) -> WeylOp:
    """(omega (x) R) . d_v."""
    ring = chart.ring
    image = -d_f(chart, weyl_mul(WeylOp.derivation(ring, var_index), R))
    if var_index in chart.base_positions and chart.base_action_sign == -1:
        image = -image
    return image


def right_actions_on_transfer(e: TransferElem, Q: WeylOp) -> TransferElem:
    """
    Right D_X-action on D_{Y<-X}, generator by generator: functions multiply,
    d_x gives -d_x(c), d_y gives -d_y(c) (x) d^b - c (x) d^(b + 1).

    Raises:
        RingMismatch: If Q lives on another chart
    """
    chart = e.chart
    chart.check(Q)
    result = WeylOp(chart.ring)
    for alpha, c in Q.terms.items():
        current = WeylOp(chart.ring, {beta: c * coefficient for beta, coefficient in e.operator.terms.items()})
        for i, k in enumerate(alpha):
            for _ in range(k):
                current = _right_generator(chart, current, i)
        result = result + current
    return TransferElem(chart, result)


def lambda_map(chart: TransferChart, P: WeylOp) -> TransferElem:
    """lambda(omega_{X/Y} (x) P) = (omega_{X/Y} (x) 1) . P."""
    return right_actions_on_transfer(TransferElem.unit(chart), P)


def lambda_closed_form(chart: TransferChart, P: WeylOp) -> TransferElem:
    """The other side of the commuting square: transpose, then D_f."""
    return TransferElem(chart, d_f(chart, transpose(chart.check(P))))


def relative_differential(chart: TransferChart, components: Sequence[WeylOp]) -> WeylOp:
    """
    Top-degree part of d_{X/Y} on Omega^{d-1}_{X/Y}(D_X): the component j sits on the form
    with dx_j omitted and d(w_j (x) P_j) = (-1)^j omega (x) d_{x_j} P_j.
    """
    if len(components) != len(chart.fiber):
        raise ShapeMismatch(f"Expected {len(chart.fiber)} components, got {len(components)}")
    result = WeylOp(chart.ring)
    for j, (position, P) in enumerate(zip(chart.fiber_positions, components)):
        image = weyl_mul(WeylOp.derivation(chart.ring, position), chart.check(P))
        result = result + (-image if j % 2 else image)
    return result


def left_base_action(eta: WeylOp, e: TransferElem) -> TransferElem:
    """
    Left f^-1 D_Y-structure: eta . (omega (x) R) = omega (x) R o eta*.

    Raises:
        ShapeMismatch: If eta is not an operator pulled back from the base
    """
    chart = e.chart
    chart.check(eta)
    if not chart.is_base_operator(eta) or not all(chart.is_base_function(c) for c in eta.terms.values()):
        raise ShapeMismatch(f"'{eta}' is not a base operator")
    return TransferElem(chart, weyl_mul(e.operator, transpose(eta)))


def nabla_transfer(e: TransferElem) -> Dict[str, TransferElem]:
    """nabla_{Y<-X}(e) = sum_i dy_i (x) (d_{y_i} . e), keyed by base variable."""
    chart = e.chart
    return {y: left_base_action(WeylOp.derivation(chart.ring, y), e) for y in chart.base}


def base_function_action(a: LocElem, e: TransferElem) -> TransferElem:
    """a . e for a function pulled back from the base."""
    return left_base_action(WeylOp.scalar(e.chart.ring, a), e)


def alpha_morphism(chart: TransferChart, P: WeylOp) -> Dict[str, TransferElem]:
    """alpha(omega (x) P) = sum_i dy_i (x) omega (x) D_f((d_{y_i} P)*)."""
    chart.check(P)
    return {y: TransferElem(chart, d_f(chart, transpose(weyl_mul(WeylOp.derivation(chart.ring, y), P))))
            for y in chart.base}


def descend(e: TransferElem, max_steps: int = 64) -> WeylOp:
    """
    An operator Q on X with (omega (x) 1) . Q = e, built from the top order down
    through the right action.

    Raises:
        LiftFailure: If the remainder does not shrink
    """
    chart = e.chart
    ring = chart.ring
    remainder = e.operator
    Q = WeylOp(ring)
    for _ in range(max_steps):
        if not remainder:
            return Q
        order = remainder.order()
        top = {beta: c for beta, c in remainder.terms.items() if sum(beta) == order}
        sign = (-chart.base_action_sign) ** order
        step = WeylOp(ring, {beta: c * sign for beta, c in top.items()})
        image = lambda_map(chart, step).operator
        new_remainder = remainder - image
        if new_remainder and new_remainder.order() >= order and \
                any(sum(beta) == order for beta in new_remainder.terms):
            logger.error(f"Descent stalled at order {order} for {e}")
            raise LiftFailure(f"Cannot write {e} as (omega (x) 1) . Q", offending_class=str(e))
        Q = Q + step
        remainder = new_remainder
    raise LiftFailure(f"Descent of {e} did not terminate", offending_class=str(e))


def transfer_report(chart: TransferChart) -> Dict[str, object]:
    logger.debug(CHART_CAVEAT)
    return {'fiber': list(chart.fiber), 'base': list(chart.base), 'chart_caveat': CHART_CAVEAT}


def tensor_descend(chart: TransferChart, e: TransferElem, C: Connection, m: Vector) -> Vector:
    """
    D_{Y<-X} (x)_{D_X} M -> omega_{X/Y} (x) M on elements e (x) m: write e = (omega (x) 1) . Q and
    move Q across the tensor sign.
    """
    if C.ring != chart.ring:
        raise RingMismatch("Connection and chart live over different rings")
    return apply_operator(C, descend(e), m)


def transfer_elements_equal(a: Mapping[str, TransferElem], b: Mapping[str, TransferElem]) -> bool:
    return a.keys() == b.keys() and all(a[k] == b[k] for k in a)


def operator_list(elements: Mapping[str, TransferElem]) -> List[str]:
    return [f"d{k} (x) ({format_operator(v.operator)})" for k, v in elements.items()]
