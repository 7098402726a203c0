"""
Gauss-Manin connections of one-parameter families of punctured affine lines.

A Family is the chart X = Spec Q[x, lam][1/h, 1/b_1..1/b_s] over the base
Y = Spec Q[lam][1/b_1..1/b_s], carrying an integrable twist connection
(A_x, A_lam) on O_X^r. Relative 1-forms v dx are brought into a canonical
complement of the image of nabla_x = d/dx + A_x by Hermite reduction in
K[x], K = Q(lam), and the Gauss-Manin matrix is read off in three ways:

    a  connecting morphism of the Leray filtration, through the absolute De Rham differential
    b  transfer structure: nabla_{Y<-X} on omega (x) 1, descended to an operator on M
    c  differentiation along lam followed by reduction

Convention: column j of a Gauss-Manin matrix holds the coordinates of
nabla_lam(basis_j) in the same basis.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sympy.polys.fields import FracElement
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import PolyElement

from ..core.constants import CHART_CAVEAT, Limits, ReportKeys
from ..core.errors import (DModuleError, LiftFailure, NonIntegrableError, ReductionStuck, ShapeMismatch,
                           UndeclaredDenominator, VariableMismatch, ZeroInputError)
from ..core.logger import get_logger
from .conn import Connection, DRComplex, Vector, apply_operator, de_rham, format_matrix, is_integrable
from .exactalg import (LocElem, LocRing, RatFun, UnivariateField, format_frac_element, format_poly,
                       poly_ring, uni_gcd_bezout)
from .homalg import E1Page, FilteredModel, d1_routes_agree
from .transfer import TransferChart, TransferElem, alpha_morphism, descend, nabla_transfer
from .weyl import WeylOp, format_operator

logger = get_logger(__name__)

ROUTES = ('a', 'b', 'c')


# ============================================================================
# LINEAR ALGEBRA OVER K = Q(lam)
# ============================================================================

def _deg(p: PolyElement) -> int:
    return p.degree() if p else -1


def _coeff(p: PolyElement, k: int, zero):
    return p.get((k,), zero)


def _det(M: List[List[Any]], zero, one):
    """Cofactor expansion; ranks stay small."""
    n = len(M)
    if n == 0:
        return one
    if n == 1:
        return M[0][0]
    total = zero
    for j in range(n):
        if not M[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _det(minor, zero, one)
        total = total - term if j % 2 else total + term
    return total


def _adjugate(M: List[List[Any]], zero, one) -> List[List[Any]]:
    n = len(M)
    if n == 1:
        return [[one]]
    adj = [[zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:i] + row[i + 1:] for k, row in enumerate(M) if k != j]
            cofactor = _det(minor, zero, one)
            adj[i][j] = -cofactor if (i + j) % 2 else cofactor
    return adj


def _rref_over(domain, rows: Sequence[Sequence[Any]], ncols: int) -> Tuple[Dict[int, Dict[int, Any]], Tuple[int, ...]]:
    sparse = {}
    for i, row in enumerate(rows):
        clean = {j: domain.convert(v) for j, v in enumerate(row) if v}
        if clean:
            sparse[i] = clean
    if not sparse or ncols == 0:
        return {}, ()
    R, pivots = DomainMatrix(sparse, (len(rows), ncols), domain).rref()
    return R.to_sparse().rep, tuple(pivots)


def _kernel_over(domain, rows: Sequence[Sequence[Any]], ncols: int) -> List[List[Any]]:
    R, pivots = _rref_over(domain, rows, ncols)
    basis = []
    for free in range(ncols):
        if free in pivots:
            continue
        v = [domain.zero] * ncols
        v[free] = domain.one
        for r, p in enumerate(pivots):
            c = R.get(r, {}).get(free)
            if c:
                v[p] = -c
        basis.append(v)
    return basis


def _solve_over(domain, columns: Sequence[Sequence[Any]], target: Sequence[Any]) -> Optional[List[Any]]:
    """Coefficients a with sum_j a_j columns[j] = target, or None."""
    ncols = len(columns)
    rows = [[columns[j][i] for j in range(ncols)] + [target[i]] for i in range(len(target))]
    R, pivots = _rref_over(domain, rows, ncols + 1)
    if ncols in pivots:
        return None
    solution = [domain.zero] * ncols
    for r, p in enumerate(pivots):
        solution[p] = R.get(r, {}).get(ncols, domain.zero)
    return solution


# ============================================================================
# FAMILIES
# ============================================================================

class Family:
    """
    Smooth affine family of relative dimension 1 with an integrable twist.

    Args:
        h: Fiber denominator, squarefree in the fiber variable over Q(lam), or a constant
        fiber_var: Fiber coordinate
        base_var: Base coordinate
        base_denominators: Polynomials in the base variable made invertible on the base
        rank: Rank of the twist module
        A_x, A_lam: Twist matrices (default zero)
        name: Label used in reports

    Raises:
        UndeclaredDenominator: If h is not squarefree in x over the localized base, or a
            Bezout cofactor or the leading coefficient of h is not a base unit
        NonIntegrableError: If the twist has nonzero curvature
    """

    def __init__(self, h: Any, fiber_var: str = 'x', base_var: str = 'lam',
                 base_denominators: Sequence[Any] = (), rank: int = 1,
                 A_x: Optional[Sequence[Sequence[Any]]] = None, A_lam: Optional[Sequence[Sequence[Any]]] = None,
                 name: Optional[str] = None):
        if fiber_var == base_var:
            raise VariableMismatch(f"Fiber and base variable are both '{fiber_var}'")
        if rank < 1:
            raise ShapeMismatch(f"Family rank must be positive, got {rank}")
        self.fiber_var = fiber_var
        self.base_var = base_var
        self.rank = rank
        variables = (fiber_var, base_var)
        plain = LocRing(variables)
        self.h: PolyElement = plain.convert(h).num
        if not self.h:
            raise ZeroInputError("The fiber denominator h is zero")
        self.space = UnivariateField(variables, fiber_var)
        self.base_space = UnivariateField((base_var,), base_var)
        self.K = self.space.domain

        base_polys = []
        for d in base_denominators:
            p = plain.convert(d).num
            if p.degree(0) > 0:
                raise UndeclaredDenominator(f"Base denominator '{format_poly(p)}' depends on '{fiber_var}'")
            base_polys.append(p)
        self.base_ring = LocRing((base_var,), [self._to_base_poly(p) for p in base_polys])

        h_uni = self.space.to_uni_poly(self.h)
        self.degree = _deg(h_uni)
        if self.degree == 0 and not self.h.is_ground:
            raise UndeclaredDenominator(f"h = {format_poly(self.h)} does not involve '{fiber_var}'")
        self.lc = h_uni.LC
        self.hm = h_uni.monic()
        self.hp = self.hm.diff(self.space.x)
        self.ring = LocRing(variables, ([self.h] if self.degree > 0 else []) + base_polys)
        self._check_fiber_denominator(h_uni)

        zero_twist = [[0] * rank for _ in range(rank)]
        self.connection = Connection(self.ring, rank, {fiber_var: A_x or zero_twist,
                                                       base_var: A_lam or zero_twist})
        if not is_integrable(self.connection):
            logger.error(f"Twist of family '{name or format_poly(self.h)}' is not integrable")
            raise NonIntegrableError("Twist connection has nonzero curvature")
        self.name = name or format_poly(self.h)
        self.twisted = any(a for row in self.connection.matrices[fiber_var] for a in row)
        self._prepare_twist()

    # -- validation ---------------------------------------------------------

    def _to_base_poly(self, p: PolyElement) -> PolyElement:
        """Polynomial in (x, lam) free of x -> Q[lam]."""
        return poly_ring((self.base_var,)).from_dict({(m[1],): c for m, c in p.items()})

    def _require_base_unit(self, p: PolyElement, what: str) -> None:
        """p in the coefficient ring Q[lam] must factor over the base denominators."""
        poly = self.base_ring.ring.from_dict(dict(p.items()))
        try:
            self.base_ring.factor_denominator(poly)
        except (UndeclaredDenominator, ZeroDivisionError) as e:
            logger.error(f"{what} '{format_poly(poly)}' is not a unit of the base")
            raise UndeclaredDenominator(
                f"{what} '{format_poly(poly)}' is not invertible on {self.base_ring!r}") from e

    def _check_fiber_denominator(self, h_uni: PolyElement) -> None:
        self._require_base_unit(self.lc.numer, "Leading coefficient of h")
        if self.degree <= 0:
            return
        g, s, t = uni_gcd_bezout(h_uni, h_uni.diff(self.space.x))
        if g != self.space.ring.one:
            raise UndeclaredDenominator(f"h = {format_poly(self.h)} is not squarefree in '{self.fiber_var}'")
        for cofactor in (s, t):
            for c in cofactor.values():
                self._require_base_unit(c.denom, "Bezout cofactor denominator")

    def _prepare_twist(self) -> None:
        """B = monic(h) * A_x as polynomials in x over K; pole order along h at most one."""
        hm_frac = self.space.from_uni_poly(self.hm)
        self.ax_frac = [[a.to_fraction() for a in row] for row in self.connection.matrices[self.fiber_var]]
        self.alam_frac = [[a.to_fraction() for a in row] for row in self.connection.matrices[self.base_var]]
        self.regular = True
        self.B: List[List[PolyElement]] = []
        for row in self.ax_frac:
            B_row = []
            for a in row:
                rf = RatFun.from_fraction(self.space, a * hm_frac)
                if rf.den != self.space.ring.one:
                    self.regular = False
                B_row.append(rf.num)
            self.B.append(B_row)
        self.twist_degree = max((_deg(b) for row in self.B for b in row), default=-1)
        self.infinity_bound = max(self.degree - 1, self.twist_degree)

    # -- conversions -----------------------------------------------------------

    @property
    def field(self):
        return self.ring.field

    @property
    def fiber_gen(self):
        return self.ring.field.gens[0]

    @property
    def base_gen(self):
        return self.ring.field.gens[1]

    def to_fractions(self, v: Sequence[Any]) -> List[FracElement]:
        if len(v) != self.rank:
            raise ShapeMismatch(f"Vector of length {len(v)} for rank {self.rank}")
        result = []
        for entry in v:
            if isinstance(entry, FracElement):
                result.append(entry)
            else:
                result.append(self.ring.convert(entry).to_fraction())
        return result

    def to_ratfun(self, c) -> RatFun:
        """K element -> canonical rational function of the base variable."""
        ring = self.base_space.ring
        return RatFun(self.base_space, ring.from_dict(dict(c.numer.items())), ring.from_dict(dict(c.denom.items())))

    def to_coeff(self, f: RatFun):
        coeff_field = self.space.coeff_field
        return coeff_field.new(coeff_field.ring.from_dict(dict(f.num.items())),
                               coeff_field.ring.from_dict(dict(f.den.items())))

    def nabla_fiber(self, v: Sequence[FracElement]) -> List[FracElement]:
        return [x.diff(self.fiber_gen) + sum((a * y for a, y in zip(row, v)), self.field.zero)
                for x, row in zip(v, self.ax_frac)]

    def nabla_base(self, v: Sequence[FracElement]) -> List[FracElement]:
        return [x.diff(self.base_gen) + sum((a * y for a, y in zip(row, v)), self.field.zero)
                for x, row in zip(v, self.alam_frac)]

    @cached_property
    def absolute_complex(self) -> DRComplex:
        return de_rham(self.connection, 'absolute')

    @cached_property
    def chart(self) -> TransferChart:
        return TransferChart(self.ring, (self.fiber_var,), (self.base_var,))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'fiber_var': self.fiber_var,
            'base_var': self.base_var,
            'h': format_poly(self.h),
            'base_denominators': [format_poly(d) for d in self.base_ring.denominators],
            'rank': self.rank,
            'A_x': format_matrix(self.connection.matrices[self.fiber_var]),
            'A_lam': format_matrix(self.connection.matrices[self.base_var]),
        }

    def __repr__(self) -> str:
        return f"Family({self.name}, rank={self.rank})"


# ============================================================================
# HERMITE REDUCTION
# ============================================================================

@dataclass
class ReducedForm:
    """v = reduced + nabla_x(exact); ``numerators`` are the reduced numerators over monic(h)."""
    numerators: List[PolyElement]
    reduced: List[FracElement]
    exact: List[FracElement]

    def is_zero(self) -> bool:
        return not any(self.numerators)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'reduced': [format_frac_element(f) for f in self.reduced],
            'exact': [format_frac_element(f) for f in self.exact],
        }


def _over_h(f: Family, v: Sequence[FracElement]) -> Tuple[List[PolyElement], int]:
    """
    Common representation v = N / monic(h)^k with N in K[x]^r.

    A reduced denominator may be any divisor of a power of h; the least such
    power is used and the cofactor moves into the numerator.
    """
    one = f.space.ring.one
    numerators, orders = [], []
    for entry in v:
        rf = RatFun.from_fraction(f.space, entry)
        if rf.den != one and f.degree <= 0:
            raise UndeclaredDenominator(f"'{format_frac_element(entry)}' has a pole in '{f.fiber_var}'")
        power, k = one, 0
        while True:
            cofactor, remainder = divmod(power, rf.den)
            if not remainder:
                break
            if k >= _deg(rf.den):
                raise UndeclaredDenominator(f"'{format_frac_element(entry)}' has a pole outside h")
            power, k = power * f.hm, k + 1
        numerators.append(rf.num * cofactor)
        orders.append(k)
    k = max(orders, default=0)
    return [N * f.hm ** (k - o) for N, o in zip(numerators, orders)], k


def _stuck(message: str, **certificate) -> ReductionStuck:
    logger.warning(message)
    return ReductionStuck(message, certificate={k: str(v) if not isinstance(v, (int, bool)) else v
                                                for k, v in certificate.items()})


def hermite_reduce(f: Family, v: Sequence[Any], verify: bool = True) -> ReducedForm:
    """
    Decompose v dx into a reduced representative plus nabla_x of an exact part.

    Poles of order k >= 2 along h are lowered by solving
    (B - (k-1) h') U = N mod h; the degree at infinity is lowered by
    monomial steps x^m e until deg N < max(deg h - 1, deg B).

    Raises:
        ReductionStuck: On a singular pole-order or degree step, or an irregular twist
    """
    if not f.regular:
        raise _stuck("Twist has a pole of order > 1 along h", step='twist', family=f.name)
    K = f.K
    ring = f.space.ring
    r = f.rank
    v_frac = f.to_fractions(v)
    N, k = _over_h(f, v_frac)
    exact_parts: List[Tuple[List[PolyElement], int]] = []

    while k >= 2:
        M = [[f.B[i][j] - (f.hp * (k - 1) if i == j else ring.zero) for j in range(r)] for i in range(r)]
        det = _det(M, ring.zero, ring.one).rem(f.hm)
        g, s, _ = uni_gcd_bezout(det, f.hm) if det else (ring.zero, ring.zero, ring.zero)
        if g != ring.one:
            raise _stuck(f"Pole-order step {k} is singular for {f.name}",
                         step='pole', order=k, determinant=det, family=f.name)
        adj = _adjugate(M, ring.zero, ring.one)
        U = [(sum((adj[i][j] * N[j] for j in range(r)), ring.zero) * s).rem(f.hm) for i in range(r)]
        next_N = []
        for i in range(r):
            image = f.hm * U[i].diff(f.space.x) + sum((M[i][j] * U[j] for j in range(r)), ring.zero)
            quotient, remainder = divmod(N[i] - image, f.hm)
            if remainder:
                raise _stuck("Pole-order step left a remainder", step='pole-division', order=k, family=f.name)
            next_N.append(quotient)
        logger.debug(f"{f.name}: pole order {k} -> {k - 1}")
        exact_parts.append((U, k - 1))
        N, k = next_N, k - 1

    if k == 0:
        N = [p * f.hm for p in N]

    delta = f.infinity_bound
    top_from_h = f.degree - 1 == delta
    top_from_B = f.twist_degree == delta
    while any(N):
        d = max(_deg(p) for p in N)
        if d < delta:
            break
        m = d - delta
        L = [[(K.convert(m) if top_from_h and i == j else K.zero)
              + (_coeff(f.B[i][j], delta, K.zero) if top_from_B else K.zero)
              for j in range(r)] for i in range(r)]
        det = _det(L, K.zero, K.one)
        if not det:
            if not f.twisted and m == 0:
                break
            raise _stuck(f"Degree step at x^{d} is singular for {f.name}",
                         step='infinity', shift=m, degree=d, family=f.name)
        top = [_coeff(p, d, K.zero) for p in N]
        adj = _adjugate(L, K.zero, K.one)
        c = [sum((adj[i][j] * top[j] for j in range(r)), K.zero) / det for i in range(r)]
        P = [ring.from_dict({(m,): ci}) if ci else ring.zero for ci in c]
        for i in range(r):
            image = f.hm * P[i].diff(f.space.x) + sum((f.B[i][j] * P[j] for j in range(r)), ring.zero)
            N[i] = N[i] - image
        logger.debug(f"{f.name}: degree step x^{d}")
        exact_parts.append((P, 0))

    hm_frac = f.space.from_uni_poly(f.hm)
    reduced = [f.space.from_uni_poly(p) / hm_frac for p in N]
    exact = [f.field.zero] * r
    for U, power in exact_parts:
        scale = hm_frac ** power
        exact = [e + f.space.from_uni_poly(u) / scale for e, u in zip(exact, U)]
    form = ReducedForm(N, reduced, exact)
    if verify:
        rebuilt = [a + b for a, b in zip(reduced, f.nabla_fiber(exact))]
        if rebuilt != v_frac:
            raise _stuck("Reduction does not reproduce its input", step='verification', family=f.name)
    return form


# ============================================================================
# H^1 BASIS AND COORDINATES
# ============================================================================

@dataclass(frozen=True)
class BasisClass:
    label: str
    vector: Tuple[LocElem, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {'label': self.label, 'form': [str(a) for a in self.vector]}


def _basis_label(f: Family, element: LocElem, j: int) -> str:
    suffix = f"*e{j + 1}" if f.rank > 1 else ''
    return f"({element}) d{f.fiber_var}{suffix}"


def h1_basis(f: Family, full: bool = False) -> List[BasisClass]:
    """
    Monomial classes x^k/h (x) e_j of H^1_dR(X/Y).

    Untwisted with deg h >= 2, the class x^(deg h - 1)/h is taken modulo the
    line of dlog(h), which ``full`` adds back as the last class of each block.

    Raises:
        ReductionStuck: For an irregular twist
    """
    if not f.regular:
        raise _stuck("Twist has a pole of order > 1 along h", step='twist', family=f.name)
    ring = f.ring
    x = ring.gen(f.fiber_var)
    h = ring.convert(f.h)
    n = f.degree
    if f.twisted:
        exponents, with_dlog = range(f.infinity_bound), False
    elif n == 0:
        exponents, with_dlog = range(0), False
    elif n == 1:
        exponents, with_dlog = range(1), False
    else:
        exponents, with_dlog = range(n - 1), full
    basis = []
    for j in range(f.rank):
        elements = [x ** k / h for k in exponents]
        if with_dlog:
            elements.append(h.diff(f.fiber_var) / h)
        for element in elements:
            vector = tuple(element if i == j else ring.zero for i in range(f.rank))
            basis.append(BasisClass(_basis_label(f, element, j), vector))
    return basis


def coordinates(f: Family, form: ReducedForm, full: bool = False) -> List[Any]:
    """Coordinates (in K) of a reduced form against h1_basis(f, full)."""
    K = f.K
    n = f.degree
    coords = []
    for N in form.numerators:
        if f.twisted:
            coords.extend(_coeff(N, k, K.zero) * f.lc for k in range(f.infinity_bound))
        elif n == 1:
            coords.append(_coeff(N, 0, K.zero) * f.lc)
        elif n >= 2:
            a = _coeff(N, n - 1, K.zero) / K.convert(n)
            N = N - f.hp * a
            coords.extend(_coeff(N, k, K.zero) * f.lc for k in range(n - 1))
            if full:
                coords.append(a)
    return coords


def classify(f: Family, v: Sequence[Any], full: bool = False) -> List[Any]:
    return coordinates(f, hermite_reduce(f, v), full)


def gm_image(f: Family, v: Sequence[Any], full: bool = False) -> List[Any]:
    """Coordinates of nabla_lam(v dx): the Gauss-Manin contribution of a relative form."""
    return classify(f, f.nabla_base(f.to_fractions(v)), full)


def certify_basis(f: Family, full: bool = False, degree: int = 3, pole: int = 2) -> Dict[str, Any]:
    """
    Independence: each basis class reduces to its own unit vector.
    Consistency: nabla_x of x^k / h^e (k <= degree, e <= pole) reduces to zero.
    """
    basis = h1_basis(f, full)
    K = f.K
    independent = True
    for index, cls in enumerate(basis):
        expected = [K.one if i == index else K.zero for i in range(len(basis))]
        if classify(f, cls.vector, full) != expected:
            independent = False
            logger.debug(f"{f.name}: basis class {cls.label} does not reduce to itself")
    x = f.fiber_gen
    h = f.field(f.h)
    exact_reduce_to_zero = True
    for e in range(pole + 1):
        for k in range(degree + 1):
            for j in range(f.rank):
                w = [x ** k / h ** e if i == j else f.field.zero for i in range(f.rank)]
                if any(classify(f, f.nabla_fiber(w), full)):
                    exact_reduce_to_zero = False
    return {
        'dimension': len(basis),
        'independent': independent,
        'exact_reduce_to_zero': exact_reduce_to_zero,
        'passed': independent and exact_reduce_to_zero,
    }


# ============================================================================
# GAUSS-MANIN MATRICES
# ============================================================================

@dataclass
class GMMatrix:
    route: str
    labels: List[str]
    entries: List[List[RatFun]]

    @property
    def size(self) -> int:
        return len(self.labels)

    def agrees_with(self, other: 'GMMatrix') -> bool:
        return self.labels == other.labels and self.entries == other.entries

    def strings(self) -> List[List[str]]:
        return [[str(e) for e in row] for row in self.entries]

    def to_dict(self) -> Dict[str, Any]:
        return {'route': self.route, ReportKeys.BASIS: self.labels, ReportKeys.GM_MATRIX: self.strings()}


def _assemble(f: Family, route: str, basis: List[BasisClass], columns: List[List[Any]]) -> GMMatrix:
    g = len(basis)
    for j, column in enumerate(columns):
        if len(column) != g:
            raise ShapeMismatch(f"Route {route}: column {j} has {len(column)} coordinates for {g} classes")
    entries = [[f.to_ratfun(columns[j][i]) for j in range(g)] for i in range(g)]
    return GMMatrix(route, [b.label for b in basis], entries)


def gm_route_a(f: Family, full: bool = False) -> GMMatrix:
    """
    Lift omega dx to (omega dx, 0) in the absolute complex, differentiate, and reduce
    the dlam^dx coefficient of the result.
    """
    basis = h1_basis(f, full)
    complex_ = f.absolute_complex
    r = f.rank
    columns = []
    for cls in basis:
        lifted = list(cls.vector) + [f.ring.zero] * r
        top = complex_.apply(1, lifted)
        columns.append(classify(f, [-c for c in top], full))
    return _assemble(f, 'a', basis, columns)


def transfer_operator(f: Family, base_action_sign: int = 1) -> Tuple[WeylOp, bool]:
    """
    The operator Q with (omega (x) 1) . Q = nabla_{Y<-X}(omega (x) 1), and whether
    the alpha morphism gives the same element.
    """
    chart = f.chart if base_action_sign == 1 else f.chart.with_sign(base_action_sign)
    unit = TransferElem.unit(chart)
    nabla = nabla_transfer(unit)[f.base_var]
    alpha = alpha_morphism(chart, WeylOp.scalar(chart.ring, 1))[f.base_var]
    Q = descend(nabla)
    logger.debug(f"{f.name}: transfer descends to {format_operator(Q)}")
    return Q, alpha == nabla


def gm_route_b(f: Family, full: bool = False, base_action_sign: int = 1) -> GMMatrix:
    """Transport d/dlam through D_{Y<-X} (x)_{D_X} M and reduce."""
    basis = h1_basis(f, full)
    Q, _ = transfer_operator(f, base_action_sign)
    columns = [classify(f, apply_operator(f.connection, Q, list(cls.vector)), full) for cls in basis]
    return _assemble(f, 'b', basis, columns)


def gm_route_c(f: Family, full: bool = False) -> GMMatrix:
    basis = h1_basis(f, full)
    columns = [gm_image(f, cls.vector, full) for cls in basis]
    return _assemble(f, 'c', basis, columns)


def gauss_manin(f: Family, route: str = 'c', full: bool = False, base_action_sign: int = 1) -> GMMatrix:
    if route == 'a':
        return gm_route_a(f, full)
    if route == 'b':
        return gm_route_b(f, full, base_action_sign)
    if route == 'c':
        return gm_route_c(f, full)
    raise ValueError(f"Unknown Gauss-Manin route '{route}'")


# ============================================================================
# PICARD-FUCHS OPERATORS
# ============================================================================

@dataclass
class PicardFuchs:
    """L = d^k + sum_{i<k} coefficients[i] d^i, monic in d/d(base_var)."""
    label: str
    base_var: str
    coefficients: List[RatFun]

    @property
    def order(self) -> int:
        return len(self.coefficients)

    def __str__(self) -> str:
        derivation = f"d_{self.base_var}"
        pieces = [derivation if self.order == 1 else f"{derivation}^{self.order}"]
        for i in reversed(range(self.order)):
            c = self.coefficients[i]
            if not c:
                continue
            text = str(c)
            negative = text.startswith('-')
            body = text[1:] if negative else text
            if i:
                power = derivation if i == 1 else f"{derivation}^{i}"
                if body != '1':
                    body = f"{body}*{power}" if ('+' not in body and ' - ' not in body) else f"({body})*{power}"
                else:
                    body = power
            pieces.append(f" - {body}" if negative else f" + {body}")
        return ''.join(pieces)

    def to_dict(self) -> Dict[str, Any]:
        return {'class': self.label, 'operator': str(self), 'order': self.order}


def picard_fuchs(f: Family, G: GMMatrix, index: int) -> PicardFuchs:
    """
    Minimal monic operator annihilating basis class ``index``: iterate
    c_{k+1} = c_k' + G c_k until c_k falls into the span of its predecessors.
    """
    g = G.size
    if not 0 <= index < g:
        raise ShapeMismatch(f"Class index {index} outside a basis of size {g}")
    K = f.K
    M = [[f.to_coeff(e) for e in row] for row in G.entries]
    c = [K.one if i == index else K.zero for i in range(g)]
    chain = [c]
    for _ in range(g):
        c = [f.space.coeff_diff(c[i], f.base_var) + sum((M[i][l] * c[l] for l in range(g)), K.zero)
             for i in range(g)]
        solution = _solve_over(K, chain, c)
        if solution is not None:
            return PicardFuchs(G.labels[index], f.base_var, [f.to_ratfun(-a) for a in solution])
        chain.append(c)
    raise LiftFailure(f"No relation found for class {index}", offending_class=index)


# ============================================================================
# H^0: HORIZONTAL SECTIONS
# ============================================================================

@dataclass
class H0Section:
    """s = numerators / monic(h)^pole with nabla_x s = 0."""
    numerators: List[PolyElement]
    pole: int
    vector: List[FracElement]

    @property
    def label(self) -> str:
        return '(' + ', '.join(format_frac_element(a) for a in self.vector) + ')'


def _horizontal_pole(f: Family) -> int:
    return Limits.H0_EXTRA_DEGREE if f.degree > 0 else 0


def h0_basis(f: Family) -> List[H0Section]:
    """
    Kernel of nabla_x on the ansatz P / monic(h)^E with deg P <= E deg h + E,
    E = Limits.H0_EXTRA_DEGREE: solutions of h P' - E h' P + B P = 0 over K.
    """
    if not f.regular:
        raise _stuck("Twist has a pole of order > 1 along h", step='twist', family=f.name)
    K = f.K
    ring = f.space.ring
    r = f.rank
    pole = _horizontal_pole(f)
    bound = pole * max(f.degree, 0) + Limits.H0_EXTRA_DEGREE
    unknowns = [(j, e) for j in range(r) for e in range(bound + 1)]
    images = []
    for j, e in unknowns:
        monomial = ring.from_dict({(e,): K.one})
        column = []
        for i in range(r):
            image = f.B[i][j] * monomial
            if i == j:
                image = image + f.hm * monomial.diff(f.space.x) - f.hp * monomial * pole
            column.append(image)
        images.append(column)
    top = max((_deg(p) for column in images for p in column), default=-1)
    rows = [[_coeff(column[i], t, K.zero) for column in images] for i in range(r) for t in range(top + 1)]
    sections = []
    hm_frac = f.space.from_uni_poly(f.hm)
    for v in _kernel_over(K, rows, len(unknowns)):
        numerators = [ring.zero] * r
        for (j, e), c in zip(unknowns, v):
            if c:
                numerators[j] = numerators[j] + ring.from_dict({(e,): c})
        vector = [f.space.from_uni_poly(p) / hm_frac ** pole for p in numerators]
        sections.append(H0Section(numerators, pole, vector))
    return sections


def _h0_coordinates(f: Family, sections: List[H0Section], t: Sequence[FracElement]) -> List[Any]:
    """
    Raises:
        LiftFailure: If t is not a K-combination of the sections
    """
    K = f.K
    pole = _horizontal_pole(f)
    hm_frac = f.space.from_uni_poly(f.hm)
    numerators = []
    for entry in t:
        rf = RatFun.from_fraction(f.space, entry * hm_frac ** pole)
        if rf.den != f.space.ring.one:
            raise LiftFailure("Section leaves the horizontal ansatz", offending_class=format_frac_element(entry))
        numerators.append(rf.num)
    top = max([_deg(p) for p in numerators] + [_deg(p) for s in sections for p in s.numerators] + [0])

    def flatten(polys: Sequence[PolyElement]) -> List[Any]:
        return [_coeff(p, k, K.zero) for p in polys for k in range(top + 1)]

    solution = _solve_over(K, [flatten(s.numerators) for s in sections], flatten(numerators))
    if solution is None:
        raise LiftFailure("Not a combination of horizontal sections")
    return solution


def gm_h0(f: Family, sections: Optional[List[H0Section]] = None) -> GMMatrix:
    """Gauss-Manin connection on H^0: nabla_lam of horizontal sections."""
    sections = h0_basis(f) if sections is None else sections
    columns = [_h0_coordinates(f, sections, f.nabla_base(s.vector)) for s in sections]
    g = len(sections)
    entries = [[f.to_ratfun(columns[j][i]) for j in range(g)] for i in range(g)]
    return GMMatrix('h0', [s.label for s in sections], entries)


# ============================================================================
# LEIBNIZ AND WELL-DEFINEDNESS
# ============================================================================

def gm_leibniz_check(f: Family, a: Any, full: bool = False) -> Dict[str, Any]:
    """
    Rescale every basis class by a(lam): the matrix must become G + (a'/a) I.

    Raises:
        ShapeMismatch: If a depends on the fiber variable or vanishes
    """
    a_elem = f.ring.convert(a)
    if not a_elem or a_elem.depends_on(f.fiber_var):
        raise ShapeMismatch(f"Rescaling factor '{a_elem}' must be a nonzero function of {f.base_var}")
    K = f.K
    a_frac = a_elem.to_fraction()
    a_coeff = f.space.field_to_coeff(a_frac)
    shift = f.space.coeff_diff(a_coeff, f.base_var) / a_coeff
    G = gm_route_c(f, full)
    basis = h1_basis(f, full)
    columns = []
    for cls in basis:
        scaled = [a_frac * x for x in f.to_fractions(cls.vector)]
        columns.append([c / a_coeff for c in gm_image(f, scaled, full)])
    G_scaled = _assemble(f, 'c', basis, columns)
    expected = [[e + (f.to_ratfun(shift) if i == j else f.to_ratfun(K.zero)) for j, e in enumerate(row)]
                for i, row in enumerate(G.entries)]
    passed = G_scaled.entries == expected
    return {
        'factor': str(a_elem),
        'log_derivative': str(f.to_ratfun(shift)),
        'original': G.strings(),
        'rescaled': G_scaled.strings(),
        'passed': passed,
    }


# ============================================================================
# LERAY FILTRATION OF THE FAMILY
# ============================================================================

class FamilyFiltration(FilteredModel):
    """
    Absolute De Rham complex of the family filtered by F^1 = dlam ^ (relative complex)[-1].

    gr^0 is the relative complex; E1^{0,1} = H^1(X/Y) with the h1_basis classes,
    E1^{0,0} = H^0(X/Y) with the horizontal sections.
    """

    TOP = 2

    def __init__(self, family: Family, full: bool = False, sections: Optional[List[H0Section]] = None):
        self.family = family
        self.full = full
        self.complex = family.absolute_complex
        self.basis = h1_basis(family, full)
        self._sections = sections

    @property
    def sections(self) -> List[H0Section]:
        if self._sections is None:
            self._sections = h0_basis(self.family)
        return self._sections

    def _loc(self, vector: Sequence[FracElement]) -> List[LocElem]:
        try:
            return [self.family.ring.from_fraction(a) for a in vector]
        except UndeclaredDenominator as e:
            raise LiftFailure("Horizontal section is not an element of the chart ring") from e

    def graded_classes(self, q: int) -> List[Any]:
        if q == 1:
            return [list(cls.vector) for cls in self.basis]
        if q == 0:
            return [s.vector for s in self.sections]
        return []

    def lift(self, q: int, cls: Any) -> Vector:
        r = self.family.rank
        if q == 1:
            return list(cls) + [self.family.ring.zero] * r
        if q == 0:
            return self._loc(cls)
        raise LiftFailure(f"No graded classes in degree {q}")

    def differential(self, q: int, element: Vector) -> Vector:
        return self.complex.apply(q, element)

    def restrict(self, q: int, element: Vector) -> Vector:
        r = self.family.rank
        if q == 2:
            return [-c for c in element]
        if q == 1:
            if any(element[:r]):
                raise LiftFailure("Element has a fiber component; not in F^1")
            return list(element[r:])
        raise LiftFailure(f"F^1 has no degree {q} term in this model")

    def sub_coordinates(self, q: int, element: Vector) -> List[RatFun]:
        f = self.family
        if q == 2:
            return [f.to_ratfun(c) for c in classify(f, element, self.full)]
        if q == 1:
            return [f.to_ratfun(c) for c in _h0_coordinates(f, self.sections, f.to_fractions(element))]
        raise LiftFailure(f"No coordinates in degree {q}")

    def sub_dimension(self, q: int) -> int:
        if q == 2:
            return len(self.basis)
        if q == 1:
            return len(self.sections)
        return 0

    # -- cone and homotopy models ------------------------------------------

    def include(self, q: int, element: Vector) -> Vector:
        """i: S^q -> T^q, the inverse of restrict."""
        r = self.family.rank
        if q == 2:
            return [-c for c in element]
        if q == 1:
            return [self.family.ring.zero] * r + list(element)
        raise LiftFailure(f"F^1 has no degree {q} term in this model")

    def sub_differential(self, q: int, element: Vector) -> Vector:
        if q + 1 > self.TOP:
            return []
        return self.restrict(q + 1, self.differential(q, self.include(q, element)))

    def available_routes(self, q: int) -> Tuple[str, ...]:
        return ('lift', 'cone', 'psi')

    def _cone_cycle(self, q: int, cls: Any) -> Tuple[Vector, Vector]:
        """(-s, t) in cone^q = S^{q+1} + T^q, checked against [[-d_S, 0], [i, d_T]]."""
        t = self.lift(q, cls)
        a = [-c for c in self.restrict(q + 1, self.differential(q, t))]
        upper = self.sub_differential(q + 1, a)
        lower = [u + v for u, v in zip(self.include(q + 1, a), self.differential(q, t))]
        if any(upper) or any(lower):
            raise LiftFailure(f"Lifted class is not a cone cycle in degree {q}")
        return a, t

    def cone_image(self, q: int, cls: Any) -> List[RatFun]:
        a, _ = self._cone_cycle(q, cls)
        return self.sub_coordinates(q + 1, [-c for c in a])

    def psi_image(self, q: int, cls: Any) -> List[RatFun]:
        """psi = (0, phi^-1 d) in degree TOP - 1 and (-1, 0) below."""
        a, t = self._cone_cycle(q, cls)
        if q == self.TOP - 1:
            image = self.restrict(self.TOP, self.differential(q, t))
        else:
            image = [-c for c in a]
        return self.sub_coordinates(q + 1, image)


# ============================================================================
# ROUTE COMPARISON
# ============================================================================

@dataclass
class GaussManinReport:
    family: Family
    basis: List[BasisClass]
    matrices: Dict[str, GMMatrix]
    failures: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    e1: Optional[E1Page] = None
    e1_agrees: Optional[bool] = None
    d1_routes_agree: Optional[bool] = None
    alpha_agrees: Optional[bool] = None
    h0: List[H0Section] = field(default_factory=list)
    h0_matrix: Optional[GMMatrix] = None
    h0_e1_agrees: Optional[bool] = None
    picard_fuchs: List[PicardFuchs] = field(default_factory=list)

    @property
    def routes_agree(self) -> bool:
        if self.failures or not self.matrices:
            return False
        reference = next(iter(self.matrices.values()))
        return all(M.agrees_with(reference) for M in self.matrices.values())

    @property
    def verdict(self) -> str:
        if self.failures:
            return 'incomparable'
        return 'equal' if self.routes_agree else 'different'

    @property
    def stuck(self) -> Optional[Dict[str, Any]]:
        for failure in self.failures.values():
            if failure.get('stuck'):
                return failure.get('certificate', {})
        return None

    @property
    def passed(self) -> bool:
        return (self.routes_agree and self.e1_agrees is not False and self.h0_e1_agrees is not False
                and self.alpha_agrees is not False and self.d1_routes_agree is not False)

    def to_dict(self) -> Dict[str, Any]:
        reference = next(iter(self.matrices.values()), None)
        return {
            'family': self.family.to_dict(),
            ReportKeys.BASIS: [b.label for b in self.basis],
            ReportKeys.GM_MATRIX: reference.strings() if reference else [],
            ReportKeys.ROUTES_AGREE: self.routes_agree,
            'verdict': self.verdict,
            ReportKeys.ROUTES: {name: M.strings() for name, M in self.matrices.items()},
            'failures': self.failures,
            ReportKeys.E1_CHECK: self.e1_agrees,
            ReportKeys.D1_ROUTES: self.d1_routes_agree,
            'alpha_equals_nabla_lambda': self.alpha_agrees,
            ReportKeys.H0: {
                'basis': [s.label for s in self.h0],
                'gm_matrix': self.h0_matrix.strings() if self.h0_matrix else [],
                'e1_d1_agrees': self.h0_e1_agrees,
            },
            ReportKeys.PICARD_FUCHS: [str(op) for op in self.picard_fuchs],
            ReportKeys.CHART_CAVEAT: CHART_CAVEAT,
        }


def compare_routes(f: Family, full: bool = False, base_action_sign: int = 1,
                   with_e1: bool = True, with_h0: bool = True) -> GaussManinReport:
    """
    All three Gauss-Manin matrices on the shared H^1 basis, the d1 cross-check
    of the Leray filtration, H^0, and a Picard-Fuchs operator per class.

    Route failures are recorded per route; the basis itself must exist.
    """
    basis = h1_basis(f, full)
    report = GaussManinReport(f, basis, {})
    for route in ROUTES:
        try:
            report.matrices[route] = gauss_manin(f, route, full, base_action_sign)
        except ReductionStuck as e:
            report.failures[route] = {'error': str(e), 'stuck': True, 'certificate': e.certificate}
        except DModuleError as e:
            logger.warning(f"Route {route} failed on {f.name}: {e}")
            report.failures[route] = {'error': str(e), 'stuck': False}

    try:
        _, report.alpha_agrees = transfer_operator(f, base_action_sign)
    except DModuleError as e:
        logger.warning(f"Transfer operator unavailable on {f.name}: {e}")

    if with_e1 and 'a' in report.matrices:
        try:
            report.d1_routes_agree, pages = d1_routes_agree(FamilyFiltration(f, full), 1)
            report.e1 = pages['lift']
            report.e1_agrees = report.e1.matrix() == report.matrices['a'].entries
        except DModuleError as e:
            logger.warning(f"E1 page failed on {f.name}: {e}")
            report.e1_agrees = False

    if with_h0:
        try:
            report.h0 = h0_basis(f)
            report.h0_matrix = gm_h0(f, report.h0)
            filtration = FamilyFiltration(f, full, sections=report.h0)
            h0_routes_agree, pages = d1_routes_agree(filtration, 0)
            report.h0_e1_agrees = pages['lift'].matrix() == report.h0_matrix.entries
            report.d1_routes_agree = report.d1_routes_agree is not False and h0_routes_agree
        except DModuleError as e:
            logger.warning(f"H0 failed on {f.name}: {e}")
            report.h0_e1_agrees = False

    reference = report.matrices.get('c') or next(iter(report.matrices.values()), None)
    if reference is not None and report.routes_agree:
        report.picard_fuchs = [picard_fuchs(f, reference, i) for i in range(reference.size)]
    logger.debug(f"{f.name}: verdict {report.verdict}")
    return report


# ============================================================================
# CORPUS
# ============================================================================

def corpus_families() -> Dict[str, Family]:
    """Hand-checked families shared by the CLI, the smoke script and the tests."""
    return {
        'linear': Family('x - lam', name='linear'),
        'quadratic': Family('x^2 - lam', base_denominators=['lam'], name='quadratic'),
        'cubic': Family('x^3 - lam', base_denominators=['lam'], name='cubic'),
        'trivial': Family('1', name='trivial'),
        'twisted_linear': Family('x - lam', A_lam=[['1']], name='twisted_linear'),
        'gaussian': Family('1', base_denominators=['lam'], A_x=[['lam*x']], A_lam=[['x^2/2']], name='gaussian'),
    }
