"""
Differential operators on an affine chart: normally ordered Weyl operators
with coefficients in a localized ring.

An operator is a map from derivation exponent vectors alpha to nonzero
coefficients c_alpha; it denotes sum c_alpha * d^alpha with every
coefficient to the left of every derivation.
"""
from functools import lru_cache
from itertools import product
from math import comb
from typing import Dict, Iterator, Sequence, Tuple, Union

from ..core.constants import DERIVATION_PREFIX, SYMBOL_PREFIX
from ..core.errors import ParseError, RingMismatch, ZeroInputError
from ..core.logger import get_logger
from ..core.parser import parse_expression
from .exactalg import LocElem, LocRing, poly_ring

logger = get_logger(__name__)

MultiIndex = Tuple[int, ...]


def sub_indices(alpha: MultiIndex) -> Iterator[MultiIndex]:
    """All gamma with 0 <= gamma <= alpha componentwise."""
    return product(*(range(a + 1) for a in alpha))


def multi_binomial(alpha: MultiIndex, gamma: MultiIndex) -> int:
    result = 1
    for a, g in zip(alpha, gamma):
        result *= comb(a, g)
    return result


def iterated_derivative(c: LocElem, gamma: MultiIndex, cache: Dict) -> LocElem:
    """d^gamma(c), memoized per (coefficient, gamma) in ``cache``."""
    key = (id(c), gamma)
    if key in cache:
        return cache[key][1]
    result = c
    for i, g in enumerate(gamma):
        for _ in range(g):
            result = result.diff(i)
    cache[key] = (c, result)
    return result


class WeylOp:
    """Normally ordered differential operator over a LocRing."""

    __slots__ = ('ring', 'terms')

    def __init__(self, ring: LocRing, terms: Dict[MultiIndex, LocElem] = None):
        self.ring = ring
        clean = {}
        for alpha, coeff in (terms or {}).items():
            coeff = ring.convert(coeff)
            if coeff:
                clean[tuple(alpha)] = coeff
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def scalar(cls, ring: LocRing, c) -> 'WeylOp':
        return cls(ring, {(0,) * ring.nvars: ring.convert(c)})

    @classmethod
    def derivation(cls, ring: LocRing, name: Union[str, int]) -> 'WeylOp':
        alpha = [0] * ring.nvars
        alpha[ring.index(name)] = 1
        return cls(ring, {tuple(alpha): ring.one})

    @classmethod
    def from_derivation(cls, ring: LocRing, coefficients: Sequence) -> 'WeylOp':
        """The vector field sum_i a_i d_i as an operator."""
        terms = {}
        for i, a in enumerate(coefficients):
            alpha = [0] * ring.nvars
            alpha[i] = 1
            terms[tuple(alpha)] = a
        return cls(ring, terms)

    @classmethod
    def parse(cls, ring: LocRing, text: str) -> 'WeylOp':
        return parse_expression(text, _OperatorAlgebra(ring))

    # -- structure ---------------------------------------------------------

    @property
    def zero_index(self) -> MultiIndex:
        return (0,) * self.ring.nvars

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def order(self) -> int:
        if not self.terms:
            raise ZeroInputError("The zero operator has no order")
        return max(sum(alpha) for alpha in self.terms)

    def coefficient(self, alpha: MultiIndex) -> LocElem:
        return self.terms.get(tuple(alpha), self.ring.zero)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeylOp):
            try:
                other = WeylOp.scalar(self.ring, other)
            except (RingMismatch, TypeError, ValueError):
                return False
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def _check(self, other: 'WeylOp') -> None:
        if self.ring != other.ring:
            raise RingMismatch(f"Operators over {self.ring!r} and {other.ring!r}")

    def _coerce(self, other) -> 'WeylOp':
        if isinstance(other, WeylOp):
            self._check(other)
            return other
        return WeylOp.scalar(self.ring, other)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other) -> 'WeylOp':
        other = self._coerce(other)
        terms = dict(self.terms)
        for alpha, coeff in other.terms.items():
            terms[alpha] = terms[alpha] + coeff if alpha in terms else coeff
        return WeylOp(self.ring, terms)

    __radd__ = __add__

    def __neg__(self) -> 'WeylOp':
        return WeylOp(self.ring, {alpha: -c for alpha, c in self.terms.items()})

    def __sub__(self, other) -> 'WeylOp':
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> 'WeylOp':
        return self._coerce(other) - self

    def __mul__(self, other) -> 'WeylOp':
        return weyl_mul(self, self._coerce(other))

    def __rmul__(self, other) -> 'WeylOp':
        return weyl_mul(self._coerce(other), self)

    def __pow__(self, k: int) -> 'WeylOp':
        return compose_power(self, k)

    def scale(self, c) -> 'WeylOp':
        """Left multiplication by a function."""
        c = self.ring.convert(c)
        return WeylOp(self.ring, {alpha: c * coeff for alpha, coeff in self.terms.items()})

    def __str__(self) -> str:
        return format_operator(self)

    def __repr__(self) -> str:
        return f"WeylOp({self})"


def weyl_mul(P: WeylOp, Q: WeylOp) -> WeylOp:
    """
    Normally ordered product via d^alpha c = sum_gamma C(alpha, gamma) d^gamma(c) d^(alpha - gamma).

    Raises:
        RingMismatch: If P and Q live over different rings
    """
    P._check(Q)
    ring = P.ring
    cache: Dict = {}
    terms: Dict[MultiIndex, LocElem] = {}
    for alpha, c in P.terms.items():
        for beta, d in Q.terms.items():
            for gamma in sub_indices(alpha):
                coefficient = c * iterated_derivative(d, gamma, cache)
                if not coefficient:
                    continue
                binomial = multi_binomial(alpha, gamma)
                if binomial != 1:
                    coefficient = coefficient * binomial
                target = tuple(a - g + b for a, g, b in zip(alpha, gamma, beta))
                terms[target] = terms[target] + coefficient if target in terms else coefficient
    return WeylOp(ring, terms)


def compose_power(P: WeylOp, k: int) -> WeylOp:
    if k < 0:
        raise ValueError("Operator powers must be nonnegative")
    result = WeylOp.scalar(P.ring, 1)
    for _ in range(k):
        result = weyl_mul(result, P)
    return result


def commutator(P: WeylOp, Q: WeylOp) -> WeylOp:
    return weyl_mul(P, Q) - weyl_mul(Q, P)


def transpose(P: WeylOp) -> WeylOp:
    """
    (c d^alpha)* = (-1)^|alpha| d^alpha o c, normal-ordered term by term.
    """
    ring = P.ring
    cache: Dict = {}
    terms: Dict[MultiIndex, LocElem] = {}
    for alpha, c in P.terms.items():
        sign = -1 if sum(alpha) % 2 else 1
        for gamma in sub_indices(alpha):
            coefficient = iterated_derivative(c, gamma, cache)
            if not coefficient:
                continue
            coefficient = coefficient * (sign * multi_binomial(alpha, gamma))
            target = tuple(a - g for a, g in zip(alpha, gamma))
            terms[target] = terms[target] + coefficient if target in terms else coefficient
    return WeylOp(ring, terms)


def apply(P: WeylOp, m: LocElem) -> LocElem:
    """
    Action of P on a function (O_X as the tautological left D_X-module).

    Raises:
        RingMismatch: If m is not an element of P's ring
    """
    m = P.ring.convert(m)
    cache: Dict = {}
    result = P.ring.zero
    for alpha, c in P.terms.items():
        result = result + c * iterated_derivative(m, alpha, cache)
    return result


# ============================================================================
# ORDER FILTRATION AND PRINCIPAL SYMBOL
# ============================================================================

@lru_cache(maxsize=None)
def symbol_ring(ring: LocRing) -> LocRing:
    """Ring over (x_1..x_n, xi_1..xi_n) with the same declared denominators."""
    names = list(ring.variables) + [f"{SYMBOL_PREFIX}{v}" for v in ring.variables]
    doubled = poly_ring(names)
    padding = (0,) * ring.nvars
    dens = [doubled.from_dict({monom + padding: c for monom, c in d.items()}) for d in ring.denominators]
    return LocRing(names, dens)


def order_and_symbol(P: WeylOp) -> Tuple[int, LocElem]:
    """
    Order and principal symbol sum_{|alpha| = order} c_alpha xi^alpha.

    Raises:
        ZeroInputError: For the zero operator
    """
    order = P.order()
    target = symbol_ring(P.ring)
    n = P.ring.nvars
    symbol = target.zero
    for alpha, c in P.terms.items():
        if sum(alpha) != order:
            continue
        numerator = target.ring.from_dict({monom + (0,) * n: coeff for monom, coeff in c.num.items()})
        xi = target.ring.from_dict({(0,) * n + tuple(alpha): 1})
        symbol = symbol + target.element(numerator * xi, c.exps)
    return order, symbol


# ============================================================================
# FORMAL ADJOINT
# ============================================================================

def residue(f: LocElem) -> int:
    """Coefficient of x^-1 of an element of Q[x, 1/x]."""
    ring = f.parent
    if ring.nvars != 1 or any(d != ring.ring.gens[0] for d in ring.denominators):
        raise RingMismatch("Residue pairing needs the ring Q[x, 1/x]")
    e = f.exps[0] if f.exps else 0
    return f.num.coeff(ring.ring.gens[0] ** (e - 1)) if e >= 1 else 0


def adjoint_check(P: WeylOp, k_max: int = 6) -> bool:
    """
    Integration by parts against the residue pairing on Q[x, 1/x]:
    res((P x^a) x^-b) = res(x^a (P* x^-b)) for a <= k_max and all b that can pair.
    """
    if P.ring.nvars != 1:
        raise RingMismatch("adjoint_check works on one-variable charts")
    laurent = LocRing(P.ring.variables, [P.ring.variables[0]])
    lifted = WeylOp(laurent, {alpha: laurent.element(c.num, [0]) for alpha, c in P.terms.items()
                              if not any(c.exps)})
    if len(lifted.terms) != len(P.terms):
        raise RingMismatch("adjoint_check needs polynomial coefficients")
    star = transpose(lifted)
    x = laurent.gen(0)
    span = k_max + (lifted.order() if lifted else 0) + max(
        (c.num.degree() for c in lifted.terms.values()), default=0) + 2
    for a in range(k_max + 1):
        for b in range(1, span + 1):
            f = x ** a
            g = laurent.element(laurent.ring.one, [b])
            if residue(apply(lifted, f) * g) != residue(f * apply(star, g)):
                logger.debug(f"Adjoint identity fails for x^{a}, x^-{b}")
                return False
    return True


# ============================================================================
# PRINTING AND PARSING
# ============================================================================

def _derivation_string(alpha: MultiIndex, names: Sequence[str]) -> str:
    parts = []
    for name, k in zip(names, alpha):
        if k == 1:
            parts.append(f"{DERIVATION_PREFIX}{name}")
        elif k > 1:
            parts.append(f"{DERIVATION_PREFIX}{name}^{k}")
    return '*'.join(parts)


def format_operator(P: WeylOp) -> str:
    """Normally ordered, derivation degree descending."""
    if not P.terms:
        return '0'
    names = P.ring.variables
    ordered = sorted(P.terms.items(), key=lambda item: (-sum(item[0]), tuple(-a for a in item[0])))
    pieces = []
    for index, (alpha, c) in enumerate(ordered):
        der = _derivation_string(alpha, names)
        text = str(c)
        negative = text.startswith('-') and ' ' not in text
        if negative and index > 0:
            text = text[1:]
        if not der:
            body = f"({text})" if ' ' in text and index > 0 else text
        elif text == '1':
            body = der
        elif text == '-1':
            body = f"-{der}"
        else:
            body = f"({text})*{der}" if ' ' in text else f"{text}*{der}"
        if index == 0:
            pieces.append(body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return ''.join(pieces)


class _OperatorAlgebra:
    """Parser callbacks evaluating into WeylOp."""

    def __init__(self, ring: LocRing):
        self.ring = ring

    def integer(self, value):
        return WeylOp.scalar(self.ring, value)

    def variable(self, name):
        return WeylOp.scalar(self.ring, self.ring.gen(name))

    def derivation(self, name):
        return WeylOp.derivation(self.ring, name)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return weyl_mul(a, b)

    def div(self, a, b):
        if any(sum(alpha) for alpha in b.terms) or not b.terms:
            raise ParseError("Operators can only be divided by nonzero functions")
        return weyl_mul(a, WeylOp.scalar(self.ring, b.coefficient(b.zero_index).inverse()))

    def neg(self, a):
        return -a

    def power(self, a, exponent):
        return compose_power(a, exponent)
