"""
Exact arithmetic foundation: rationals, multivariate polynomials over Q,
localized rings K[x][1/h_1..1/h_s] and univariate rational-function utilities.

Polynomials are sympy ``PolyElement`` values in graded-lex rings; a ring is
identified by its ordered variable list, so two polynomials are comparable
exactly when they were built over the same list.
"""
from fractions import Fraction
from functools import reduce
from math import gcd as int_gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from sympy import QQ
from sympy.polys.fields import FracElement, FracField
from sympy.polys.orderings import grlex
from sympy.polys.polyerrors import ExactQuotientFailed
from sympy.polys.rings import PolyElement, PolyRing

from ..core.errors import (ParseError, RingMismatch, UndeclaredDenominator,
                           UnknownVariable, VariableMismatch, ZeroInputError)
from ..core.logger import get_logger
from ..core.parser import parse_expression

logger = get_logger(__name__)

MPoly = PolyElement
Rat = type(QQ(1))


def rat(numerator: Union[int, Fraction, Rat], denominator: int = 1) -> Rat:
    """Canonical rational numerator/denominator (gcd 1, positive denominator)."""
    if isinstance(numerator, Fraction):
        return QQ(numerator.numerator, numerator.denominator * denominator)
    if QQ.of_type(numerator):
        return numerator / QQ(denominator)
    return QQ(int(numerator), int(denominator))


def poly_ring(variables: Sequence[str]) -> PolyRing:
    """The graded-lex polynomial ring Q[variables] (cached by sympy)."""
    if not variables:
        raise ValueError("A polynomial ring needs at least one variable")
    return PolyRing(list(variables), QQ, grlex)


def variable_names(ring: PolyRing) -> Tuple[str, ...]:
    return tuple(str(symbol) for symbol in ring.symbols)


def var_index(ring: PolyRing, name: Union[str, int]) -> int:
    """Position of a variable given by name or index."""
    names = variable_names(ring)
    if isinstance(name, int):
        if 0 <= name < len(names):
            return name
        raise UnknownVariable(f"Variable index {name} outside {names}")
    if name not in names:
        raise UnknownVariable(f"Unknown variable '{name}' (ring variables: {', '.join(names)})")
    return names.index(name)


def poly_arith(a: MPoly, b: MPoly, op: str) -> MPoly:
    """
    Exact add/sub/mul of two polynomials over the same variable list.

    Raises:
        VariableMismatch: If the operands come from different rings
    """
    if a.ring != b.ring:
        raise VariableMismatch(
            f"Variable lists differ: {variable_names(a.ring)} vs {variable_names(b.ring)}")
    if op == 'add':
        return a + b
    if op == 'sub':
        return a - b
    if op == 'mul':
        return a * b
    raise ValueError(f"Unsupported polynomial operation '{op}'")


def exact_divide(a: MPoly, b: MPoly) -> Optional[MPoly]:
    """a / b when b divides a exactly, otherwise None."""
    try:
        return a.exquo(b)
    except ExactQuotientFailed:
        return None


def primitive_positive(p: MPoly) -> Tuple[Rat, MPoly]:
    """
    Split p = c * q with q integer-primitive and positive graded-lex leading coefficient.
    """
    if not p:
        raise ZeroInputError("Zero polynomial has no primitive part")
    common, cleared = p.clear_denoms()
    content = reduce(int_gcd, (int(QQ.numer(c)) for c in cleared.values()))
    if cleared.LC < 0:
        content = -content
    q = cleared.quo_ground(QQ(content))
    return QQ(content) / QQ(int(common)), q


def is_squarefree(p: MPoly) -> bool:
    """Squarefree test via gcd(p, all partial derivatives)."""
    g = p
    for gen in p.ring.gens:
        g = g.gcd(p.diff(gen))
        if g.is_ground:
            return True
    return g.is_ground


# ============================================================================
# PRINTING
# ============================================================================

def _format_rational(c: Rat) -> str:
    numer, denom = int(QQ.numer(c)), int(QQ.denom(c))
    return str(numer) if denom == 1 else f"{numer}/{denom}"


def _format_monomial(monom: Tuple[int, ...], names: Sequence[str]) -> str:
    factors = []
    for name, exponent in zip(names, monom):
        if exponent == 1:
            factors.append(name)
        elif exponent > 1:
            factors.append(f"{name}^{exponent}")
    return '*'.join(factors)


def format_poly(p: MPoly, names: Optional[Sequence[str]] = None) -> str:
    """Graded-lex, explicit '*', no unary '+'."""
    if not p:
        return '0'
    names = names or variable_names(p.ring)
    pieces = []
    for index, (monom, coeff) in enumerate(p.terms()):
        negative = coeff < 0
        magnitude = -coeff if negative else coeff
        monomial = _format_monomial(monom, names)
        if not monomial:
            body = _format_rational(magnitude)
        elif magnitude == 1:
            body = monomial
        else:
            body = f"{_format_rational(magnitude)}*{monomial}"
        if index == 0:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return ''.join(pieces)


def _is_atomic(p: MPoly) -> bool:
    if len(p) != 1 or p.LC != 1:
        return False
    return sum(1 for e in p.LM if e) == 1


def format_fraction(numer: MPoly, denom: MPoly) -> str:
    """
    Print numer/denom with both sides integer-normalized.

    The denominator is made integer-primitive with positive leading
    coefficient; the rational factor is distributed so that both sides have
    integer coefficients.
    """
    if not numer:
        return '0'
    c_num, n = primitive_positive(numer)
    c_den, d = primitive_positive(denom)
    ratio = c_num / c_den
    n = n.mul_ground(QQ(QQ.numer(ratio)))
    d = d.mul_ground(QQ(QQ.denom(ratio)))
    if d == d.ring.one:
        return format_poly(n)
    left = format_poly(n) if len(n) == 1 else f"({format_poly(n)})"
    right = format_poly(d) if _is_atomic(d) else f"({format_poly(d)})"
    return f"{left}/{right}"


def format_frac_element(f: FracElement) -> str:
    return format_fraction(f.numer, f.denom)


# ============================================================================
# LOCALIZED RINGS
# ============================================================================

class LocRing:
    """
    Localization Q[v_1..v_n][1/d_1..1/d_s] with a fixed declared denominator set.

    Each declared denominator is normalized to its integer-primitive form with
    positive leading coefficient; the set must be squarefree, non-constant and
    pairwise coprime.
    """

    def __init__(self, variables: Sequence[str], denominators: Iterable[Union[str, MPoly]] = ()):
        self.variables: Tuple[str, ...] = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise VariableMismatch(f"Repeated variable in {self.variables}")
        self.ring = poly_ring(self.variables)
        self.field = FracField(list(self.variables), QQ, grlex)
        normalized = []
        for d in denominators:
            p = self._to_poly(d)
            if p.is_ground:
                raise UndeclaredDenominator(f"Denominator '{format_poly(p)}' is constant")
            _, p = primitive_positive(p)
            if not is_squarefree(p):
                raise UndeclaredDenominator(f"Denominator '{format_poly(p)}' is not squarefree")
            for q in normalized:
                if not p.gcd(q).is_ground:
                    raise UndeclaredDenominator(
                        f"Denominators '{format_poly(p)}' and '{format_poly(q)}' are not coprime")
            if p not in normalized:
                normalized.append(p)
        self.denominators: Tuple[MPoly, ...] = tuple(normalized)
        self._zero_exps = (0,) * len(self.denominators)

    def _to_poly(self, value: Union[str, MPoly]) -> MPoly:
        if isinstance(value, str):
            f = parse_expression(value, _FieldAlgebra(self.field))
            if not f.denom.is_ground:
                raise ParseError(f"Expected a polynomial, got '{value}'", value)
            return f.numer.quo_ground(f.denom.LC)
        if isinstance(value, PolyElement):
            if value.ring != self.ring:
                raise VariableMismatch(
                    f"Polynomial over {variable_names(value.ring)} used in ring over {self.variables}")
            return value
        return self.ring.ground_new(rat(value))

    def __eq__(self, other) -> bool:
        return (isinstance(other, LocRing) and self.variables == other.variables
                and self.denominators == other.denominators)

    def __hash__(self) -> int:
        return hash((self.variables, self.denominators))

    def __repr__(self) -> str:
        dens = ', '.join(format_poly(d) for d in self.denominators)
        return f"LocRing([{', '.join(self.variables)}], [{dens}])"

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def zero(self) -> 'LocElem':
        return LocElem(self, self.ring.zero, self._zero_exps)

    @property
    def one(self) -> 'LocElem':
        return LocElem(self, self.ring.one, self._zero_exps)

    def gen(self, name: Union[str, int]) -> 'LocElem':
        return LocElem(self, self.ring.gens[var_index(self.ring, name)], self._zero_exps)

    @property
    def gens(self) -> List['LocElem']:
        return [self.gen(i) for i in range(self.nvars)]

    def index(self, name: Union[str, int]) -> int:
        return var_index(self.ring, name)

    def den_power(self, exps: Sequence[int]) -> MPoly:
        result = self.ring.one
        for d, e in zip(self.denominators, exps):
            if e:
                result *= d ** e
        return result

    def element(self, num: MPoly, exps: Optional[Sequence[int]] = None) -> 'LocElem':
        """Canonical element num / prod d_i^{exps_i}."""
        exps = list(exps) if exps is not None else list(self._zero_exps)
        if not num:
            return self.zero
        for i, d in enumerate(self.denominators):
            while exps[i] > 0:
                q = exact_divide(num, d)
                if q is None:
                    break
                num = q
                exps[i] -= 1
        return LocElem(self, num, tuple(exps))

    def factor_denominator(self, den: MPoly) -> Tuple[MPoly, List[int]]:
        """
        Write 1/den = m / prod d_i^{k_i} with m a polynomial.

        A factor of den shared with a declared d_i is a unit even when it is a
        proper divisor of d_i; its cofactor d_i/g moves into m.

        Raises:
            UndeclaredDenominator: If a non-unit factor remains
        """
        if not den:
            raise ZeroDivisionError("Division by zero in localized ring")
        multiplier = self.ring.one
        exps = []
        for d in self.denominators:
            k = 0
            g = den.gcd(d)
            while not g.is_ground:
                den = den.exquo(g)
                multiplier *= d.exquo(g)
                k += 1
                g = den.gcd(d)
            exps.append(k)
        if not den.is_ground:
            raise UndeclaredDenominator(
                f"'{format_poly(den)}' is not a unit of {self!r}")
        return multiplier.quo_ground(den.LC), exps

    def fraction(self, num: MPoly, den: MPoly) -> 'LocElem':
        """num/den, with den factored over the declared denominators."""
        num = self._to_poly(num)
        den = self._to_poly(den)
        multiplier, exps = self.factor_denominator(den)
        return self.element(num * multiplier, exps)

    def from_fraction(self, f: FracElement) -> 'LocElem':
        if f.field != self.field:
            raise RingMismatch("Fraction belongs to a different variable list")
        return self.fraction(f.numer, f.denom)

    def parse(self, text: str) -> 'LocElem':
        """Parse an element string (polynomial grammar plus '/')."""
        return self.from_fraction(parse_expression(text, _FieldAlgebra(self.field)))

    def convert(self, value) -> 'LocElem':
        if isinstance(value, LocElem):
            if value.parent is self or value.parent == self:
                return value
            raise RingMismatch(f"Element of {value.parent!r} used in {self!r}")
        if isinstance(value, PolyElement):
            return self.element(self._to_poly(value))
        if isinstance(value, FracElement):
            return self.from_fraction(value)
        if isinstance(value, str):
            return self.parse(value)
        return self.element(self.ring.ground_new(rat(value)))

    def with_denominators(self, extra: Iterable[Union[str, MPoly]]) -> 'LocRing':
        """Same variables, declared set enlarged by ``extra``."""
        polys = list(self.denominators)
        for d in extra:
            _, p = primitive_positive(self._to_poly(d))
            if p not in polys:
                polys.append(p)
        return LocRing(self.variables, polys)


class LocElem:
    """
    Canonical element num / prod d_i^{e_i} of a LocRing.

    No declared denominator with positive exponent divides the numerator, so
    the representation is unique and equality is structural.
    """

    __slots__ = ('parent', 'num', 'exps')

    def __init__(self, parent: LocRing, num: MPoly, exps: Tuple[int, ...]):
        self.parent = parent
        self.num = num
        self.exps = exps

    # -- structure ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, LocElem):
            try:
                other = self.parent.convert(other)
            except (RingMismatch, TypeError, ValueError):
                return False
        return self.parent == other.parent and self.num == other.num and self.exps == other.exps

    def __hash__(self) -> int:
        return hash((self.num, self.exps))

    def __bool__(self) -> bool:
        return bool(self.num)

    @property
    def is_zero(self) -> bool:
        return not self.num

    @property
    def denominator(self) -> MPoly:
        return self.parent.den_power(self.exps)

    def canonical(self) -> 'LocElem':
        return self.parent.element(self.num, self.exps)

    def is_constant(self) -> bool:
        return self.num.is_ground and not any(self.exps)

    def constant_value(self) -> Rat:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self.num.LC if self.num else QQ(0)

    def depends_on(self, name: Union[str, int]) -> bool:
        i = self.parent.index(name)
        if self.num.degree(i) > 0:
            return True
        return any(e and d.degree(i) > 0 for d, e in zip(self.parent.denominators, self.exps))

    # -- arithmetic --------------------------------------------------------

    def __neg__(self) -> 'LocElem':
        return LocElem(self.parent, -self.num, self.exps)

    def __add__(self, other) -> 'LocElem':
        other = self.parent.convert(other)
        if not other.num:
            return self
        if not self.num:
            return other
        exps = tuple(max(a, b) for a, b in zip(self.exps, other.exps))
        left = self.num * self.parent.den_power([e - a for e, a in zip(exps, self.exps)])
        right = other.num * self.parent.den_power([e - b for e, b in zip(exps, other.exps)])
        return self.parent.element(left + right, exps)

    __radd__ = __add__

    def __sub__(self, other) -> 'LocElem':
        return self + (-self.parent.convert(other))

    def __rsub__(self, other) -> 'LocElem':
        return self.parent.convert(other) - self

    def __mul__(self, other) -> 'LocElem':
        other = self.parent.convert(other)
        if not self.num or not other.num:
            return self.parent.zero
        exps = tuple(a + b for a, b in zip(self.exps, other.exps))
        return self.parent.element(self.num * other.num, exps)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> 'LocElem':
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = self.parent.one
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def is_unit(self) -> bool:
        if not self.num:
            return False
        try:
            self.parent.factor_denominator(self.num)
        except UndeclaredDenominator:
            return False
        return True

    def inverse(self) -> 'LocElem':
        """
        Raises:
            UndeclaredDenominator: If the numerator is not a unit
        """
        multiplier, exps = self.parent.factor_denominator(self.num)
        return self.parent.element(self.parent.den_power(self.exps) * multiplier, exps)

    def __truediv__(self, other) -> 'LocElem':
        return self * self.parent.convert(other).inverse()

    def __rtruediv__(self, other) -> 'LocElem':
        return self.parent.convert(other) * self.inverse()

    # -- calculus and conversions -----------------------------------------

    def diff(self, name: Union[str, int]) -> 'LocElem':
        return partial_derivative(self, name)

    def to_fraction(self) -> FracElement:
        return self.parent.field.new(self.num, self.denominator)

    def substitute(self, target: LocRing, images: Sequence['LocElem']) -> 'LocElem':
        """
        Replace variable i by images[i] (elements of ``target``).

        Raises:
            UndeclaredDenominator: If a denominator's image is not a unit of target
        """
        numerator = evaluate_poly(self.num, target, images)
        if not any(self.exps):
            return numerator
        den_image = evaluate_poly(self.denominator, target, images)
        return numerator * den_image.inverse()

    def __str__(self) -> str:
        if not any(self.exps):
            return format_poly(self.num, self.parent.variables)
        return format_fraction(self.num, self.denominator)

    def __repr__(self) -> str:
        return f"LocElem({self})"


def evaluate_poly(p: MPoly, target: LocRing, images: Sequence[LocElem]) -> LocElem:
    """Evaluate a polynomial at elements of ``target``."""
    if len(images) != p.ring.ngens:
        raise VariableMismatch(f"Expected {p.ring.ngens} images, got {len(images)}")
    images = [target.convert(img) for img in images]
    powers: Dict[Tuple[int, int], LocElem] = {}

    def power(i: int, e: int) -> LocElem:
        key = (i, e)
        if key not in powers:
            powers[key] = images[i] ** e
        return powers[key]

    result = target.zero
    for monom, coeff in p.terms():
        term = target.convert(coeff)
        for i, e in enumerate(monom):
            if e:
                term = term * power(i, e)
        result = result + term
    return result


def partial_derivative(p: LocElem, name: Union[str, int]) -> LocElem:
    """
    Exact partial derivative with the quotient rule on declared denominators.

    Raises:
        UnknownVariable: If ``name`` is not a ring variable
    """
    ring = p.parent
    i = ring.index(name)
    gen = ring.ring.gens[i]
    if not p.num:
        return ring.zero
    active = [k for k, e in enumerate(p.exps) if e]
    if not active:
        return ring.element(p.num.diff(gen), p.exps)
    dens = ring.denominators
    product = ring.ring.one
    for k in active:
        product *= dens[k]
    numer = p.num.diff(gen) * product
    for k in active:
        cofactor = product.exquo(dens[k])
        numer -= p.num * dens[k].diff(gen) * cofactor * p.exps[k]
    exps = tuple(e + 1 if e else 0 for e in p.exps)
    return ring.element(numer, exps)


class _FieldAlgebra:
    """Parser callbacks evaluating into a sympy fraction field."""

    def __init__(self, field: FracField):
        self.field = field
        self.names = [str(s) for s in field.symbols]

    def integer(self, value):
        return self.field(value)

    def variable(self, name):
        if name not in self.names:
            raise UnknownVariable(f"Unknown variable '{name}' (expected one of {', '.join(self.names)})")
        return self.field.gens[self.names.index(name)]

    def derivation(self, name):
        raise ParseError(f"Derivation token 'd_{name}' is not allowed in a function expression")

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        if not b:
            raise ParseError("Division by zero in expression")
        return a / b

    def neg(self, a):
        return -a

    def power(self, a, exponent):
        return a ** exponent


def parse_poly(text: str, variables: Sequence[str]) -> MPoly:
    """Parse a polynomial string over the given variables."""
    field = FracField(list(variables), QQ, grlex)
    f = parse_expression(text, _FieldAlgebra(field))
    if not f.denom.is_ground:
        raise ParseError(f"Expected a polynomial, got '{text}'", text)
    return f.numer.quo_ground(f.denom.LC)


# ============================================================================
# UNIVARIATE VIEW AND RATIONAL FUNCTIONS
# ============================================================================

class UnivariateField:
    """
    Q(v_1..v_n) seen as K(var) with K = Q(remaining variables).

    ``ring`` is K[var]; conversions go to and from the ambient fraction
    field over the full variable list.
    """

    def __init__(self, variables: Sequence[str], var: str):
        self.variables = tuple(variables)
        if var not in self.variables:
            raise UnknownVariable(f"'{var}' not in {self.variables}")
        self.var = var
        self.index = self.variables.index(var)
        self.params = tuple(v for v in self.variables if v != var)
        self.field = FracField(list(self.variables), QQ, grlex)
        if self.params:
            self.coeff_field = FracField(list(self.params), QQ, grlex)
            self.domain = self.coeff_field.to_domain()
        else:
            self.coeff_field = None
            self.domain = QQ
        self.ring = PolyRing([var], self.domain, grlex)
        self.x = self.ring.gens[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, UnivariateField) and (self.variables, self.var) == (other.variables, other.var)

    def __hash__(self) -> int:
        return hash((self.variables, self.var))

    def coeff_from_poly(self, terms: Dict[Tuple[int, ...], Rat]):
        if self.coeff_field is None:
            return terms.get((), QQ(0))
        return self.coeff_field.new(self.coeff_field.ring.from_dict(terms))

    def to_uni_poly(self, p: MPoly) -> PolyElement:
        """Ambient polynomial -> K[var]."""
        grouped: Dict[int, Dict[Tuple[int, ...], Rat]] = {}
        for monom, coeff in p.items():
            rest = monom[:self.index] + monom[self.index + 1:]
            grouped.setdefault(monom[self.index], {})[rest] = coeff
        return self.ring.from_dict({(e,): self.coeff_from_poly(t) for e, t in grouped.items()})

    def _lift_param_poly(self, q: MPoly, exponent: int) -> MPoly:
        terms = {}
        for rest, coeff in q.items():
            terms[rest[:self.index] + (exponent,) + rest[self.index:]] = coeff
        return self.field.ring.from_dict(terms)

    def coeff_to_field(self, c) -> FracElement:
        """K element -> ambient fraction field."""
        if self.coeff_field is None:
            return self.field(c)
        return self.field.new(self._lift_param_poly(c.numer, 0), self._lift_param_poly(c.denom, 0))

    def field_to_coeff(self, f: FracElement):
        """Ambient fraction free of ``var`` -> K element."""
        if f.numer.degree(self.index) > 0 or f.denom.degree(self.index) > 0:
            raise VariableMismatch(f"Expression depends on '{self.var}'")
        num = self.to_uni_poly(f.numer)
        den = self.to_uni_poly(f.denom)
        return self.domain.quo(num.coeff(1) if num else self.domain.zero, den.coeff(1))

    def from_uni_poly(self, q: PolyElement) -> FracElement:
        result = self.field.zero
        for (e,), coeff in q.items():
            if self.coeff_field is None:
                result += self.field.new(self.field.ring.from_dict({self._mono(e): coeff}))
            else:
                numer = self._lift_param_poly(coeff.numer, e)
                denom = self._lift_param_poly(coeff.denom, 0)
                result += self.field.new(numer, denom)
        return result

    def _mono(self, e: int) -> Tuple[int, ...]:
        monom = [0] * len(self.variables)
        monom[self.index] = e
        return tuple(monom)

    def coeff_diff(self, c, param: str):
        """Derivative of a K element with respect to a parameter."""
        if self.coeff_field is None:
            return QQ(0)
        return c.diff(self.coeff_field.gens[self.params.index(param)])

    def poly_diff_param(self, q: PolyElement, param: str) -> PolyElement:
        return self.ring.from_dict({m: self.coeff_diff(c, param) for m, c in q.items()})


def uni_gcd_bezout(a: PolyElement, b: PolyElement) -> Tuple[PolyElement, PolyElement, PolyElement]:
    """
    Extended gcd in K[x] via sympy's ``gcdex``: returns (g, u, v) with u*a + v*b = g, g monic.

    Raises:
        ZeroInputError: If both inputs are zero
    """
    if not a and not b:
        raise ZeroInputError("gcd of two zero polynomials is undefined")
    if not b:
        return a.monic(), a.ring.one.quo_ground(a.LC), a.ring.zero
    u, v, g = a.gcdex(b)
    return g, u, v


def uni_gcd(a: PolyElement, b: PolyElement) -> PolyElement:
    return a.gcd(b)


def squarefree_decompose(p: PolyElement) -> List[Tuple[PolyElement, int]]:
    """
    Monic pairwise coprime squarefree factors with multiplicities, highest first.

    Raises:
        ZeroInputError: On the zero polynomial
    """
    if not p:
        raise ZeroInputError("Cannot decompose the zero polynomial")
    _, factors = p.sqf_list()
    return sorted(((factor.monic(), multiplicity) for factor, multiplicity in factors),
                  key=lambda item: -item[1])


def partial_fractions(num: PolyElement, den: PolyElement):
    """
    Decompose num/den in K(x).

    Returns:
        (polynomial part, [(factor f, power j, numerator a)]) with
        num/den = poly + sum a / f^j and deg a < deg f
    """
    if not den:
        raise ZeroDivisionError("Zero denominator")
    poly_part, remainder = divmod(num, den)
    lc = den.LC
    remainder = remainder.quo_ground(lc)
    blocks = squarefree_decompose(den)
    pieces = []
    rest_den = den.monic()
    for factor, multiplicity in blocks:
        block = factor ** multiplicity
        others = rest_den.exquo(block)
        _, _, v = uni_gcd_bezout(block, others)
        numerator_block = (remainder * v).rem(block)
        remainder = (remainder - numerator_block * others).exquo(block)
        rest_den = others
        power = multiplicity
        while numerator_block and power > 0:
            quotient, coefficient = divmod(numerator_block, factor)
            if coefficient:
                pieces.append((factor, power, coefficient))
            numerator_block = quotient
            power -= 1
    return poly_part, pieces


class RatFun:
    """
    Element of K(var) as num/den in K[var], den monic and gcd(num, den) = 1.
    """

    __slots__ = ('space', 'num', 'den')

    def __init__(self, space: UnivariateField, num: PolyElement, den: Optional[PolyElement] = None):
        den = den if den is not None else space.ring.one
        if not den:
            raise ZeroDivisionError("RatFun with zero denominator")
        if not num:
            num, den = space.ring.zero, space.ring.one
        else:
            g = uni_gcd(num, den)
            if g.degree() > 0:
                num, den = num.exquo(g), den.exquo(g)
            lc = den.LC
            num, den = num.quo_ground(lc), den.monic()
        self.space = space
        self.num = num
        self.den = den

    @classmethod
    def from_fraction(cls, space: UnivariateField, f: FracElement) -> 'RatFun':
        return cls(space, space.to_uni_poly(f.numer), space.to_uni_poly(f.denom))

    def to_fraction(self) -> FracElement:
        return self.space.from_uni_poly(self.num) / self.space.from_uni_poly(self.den)

    def _coerce(self, other) -> 'RatFun':
        if isinstance(other, RatFun):
            if other.space != self.space:
                raise VariableMismatch("RatFun values over different spaces")
            return other
        if isinstance(other, FracElement):
            return RatFun.from_fraction(self.space, other)
        return RatFun(self.space, self.space.ring.ground_new(self.space.domain.convert(other)))

    def __add__(self, other) -> 'RatFun':
        other = self._coerce(other)
        return RatFun(self.space, self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> 'RatFun':
        return RatFun(self.space, -self.num, self.den)

    def __sub__(self, other) -> 'RatFun':
        return self + (-self._coerce(other))

    def __mul__(self, other) -> 'RatFun':
        other = self._coerce(other)
        return RatFun(self.space, self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> 'RatFun':
        other = self._coerce(other)
        if not other.num:
            raise ZeroDivisionError("RatFun division by zero")
        return RatFun(self.space, self.num * other.den, self.den * other.num)

    def __eq__(self, other) -> bool:
        try:
            other = self._coerce(other)
        except (VariableMismatch, TypeError):
            return False
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __bool__(self) -> bool:
        return bool(self.num)

    def diff(self) -> 'RatFun':
        x = self.space.x
        return RatFun(self.space, self.num.diff(x) * self.den - self.num * self.den.diff(x), self.den ** 2)

    def __str__(self) -> str:
        return format_frac_element(self.to_fraction())

    def __repr__(self) -> str:
        return f"RatFun({self})"
