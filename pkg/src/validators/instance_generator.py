"""
Seeded random instances for the property suites.

Every generator takes an explicit random.Random so a (seed, index) pair
always rebuilds the same instance, in any worker process.
"""
import random
from fractions import Fraction
from typing import List, Optional, Tuple

from sympy import Symbol, discriminant, factor_list

from ..core.constants import Limits
from ..core.logger import get_logger
from ..dmodules.conn import Connection, Matrix, gauge_transform, mat_mul
from ..dmodules.exactalg import LocElem, LocRing, MPoly, format_poly
from ..dmodules.gaussmanin import Family
from ..dmodules.pullback import PolyMap
from ..dmodules.weyl import WeylOp

logger = get_logger(__name__)

FIBER_VAR = 'x'
BASE_VAR = 'lam'
TWIST_DENOMINATOR = 7


def instance_rng(seed: int, suite: str, index: int) -> random.Random:
    """Independent stream per (seed, suite, instance)."""
    return random.Random(f"{seed}:{suite}:{index}")


def _coefficient(rng: random.Random) -> int:
    value = 0
    while value == 0:
        value = rng.randint(-Limits.COEFF_RANGE, Limits.COEFF_RANGE)
    return value


def _exponents(nvars: int, degree: int) -> List[Tuple[int, ...]]:
    if nvars == 0:
        return [()]
    result = []
    for first in range(degree + 1):
        for rest in _exponents(nvars - 1, degree - first):
            result.append((first,) + rest)
    return result


def random_poly(rng: random.Random, ring: LocRing, degree: int = Limits.MAX_COEFF_DEGREE,
                max_terms: int = 3, allow_zero: bool = True) -> MPoly:
    """Sparse polynomial with total degree at most ``degree`` and small integer coefficients."""
    monomials = _exponents(ring.nvars, degree)
    terms = rng.randint(0 if allow_zero else 1, max_terms)
    chosen = rng.sample(monomials, min(terms, len(monomials)))
    return ring.ring.from_dict({m: _coefficient(rng) for m in chosen}) if chosen else ring.ring.zero


def random_elem(rng: random.Random, ring: LocRing, degree: int = Limits.MAX_COEFF_DEGREE,
                allow_zero: bool = True) -> LocElem:
    """Random polynomial over a random power product of the declared denominators."""
    exps = [rng.randint(0, 1) for _ in ring.denominators]
    return ring.element(random_poly(rng, ring, degree, allow_zero=allow_zero), exps)


def random_ring(rng: random.Random, max_vars: int = 2) -> LocRing:
    """Q[x] or Q[x, y], sometimes localized at x."""
    variables = ('x', 'y')[:rng.randint(1, max_vars)]
    denominators = ['x'] if rng.random() < 0.5 else []
    return LocRing(variables, denominators)


def random_matrix(rng: random.Random, ring: LocRing, rows: int, cols: int,
                  degree: int = Limits.MAX_COEFF_DEGREE) -> Matrix:
    return [[random_elem(rng, ring, degree) for _ in range(cols)] for _ in range(rows)]


def random_operator(rng: random.Random, ring: LocRing, order: int = Limits.DEFAULT_ORDER_CAP,
                    degree: int = Limits.MAX_COEFF_DEGREE, max_terms: int = 3) -> WeylOp:
    """Nonzero operator of order at most ``order`` with polynomial-or-localized coefficients."""
    alphas = _exponents(ring.nvars, order)
    while True:
        chosen = rng.sample(alphas, min(rng.randint(1, max_terms), len(alphas)))
        P = WeylOp(ring, {alpha: random_elem(rng, ring, degree) for alpha in chosen})
        if P:
            return P


def random_polynomial_operator(rng: random.Random, ring: LocRing, order: int = 2,
                               degree: int = Limits.MAX_COEFF_DEGREE) -> WeylOp:
    """Operator with polynomial coefficients (no denominators)."""
    alphas = _exponents(ring.nvars, order)
    while True:
        chosen = rng.sample(alphas, min(rng.randint(1, 3), len(alphas)))
        P = WeylOp(ring, {alpha: ring.element(random_poly(rng, ring, degree)) for alpha in chosen})
        if P:
            return P


def random_derivation(rng: random.Random, ring: LocRing, degree: int = 2) -> List[LocElem]:
    return [random_elem(rng, ring, degree) for _ in ring.variables]


def random_vector(rng: random.Random, ring: LocRing, rank: int, degree: int = 2) -> List[LocElem]:
    return [random_elem(rng, ring, degree) for _ in range(rank)]


def random_connection(rng: random.Random, ring: LocRing, rank: Optional[int] = None,
                      degree: int = Limits.MAX_COEFF_DEGREE) -> Connection:
    """Arbitrary matrices: integrable only by accident (or always, when n = 1)."""
    rank = rank or rng.randint(1, Limits.MAX_RANK)
    return Connection(ring, rank, {v: random_matrix(rng, ring, rank, rank, degree) for v in ring.variables})


def random_unipotent(rng: random.Random, ring: LocRing, rank: int, degree: int = 2) -> Matrix:
    """Upper unitriangular polynomial matrix: invertible over any chart."""
    g = []
    for i in range(rank):
        row = []
        for j in range(rank):
            if i == j:
                row.append(ring.one)
            elif j > i:
                row.append(ring.element(random_poly(rng, ring, degree, max_terms=2)))
            else:
                row.append(ring.zero)
        g.append(row)
    return g


def random_integrable_connection(rng: random.Random, ring: LocRing, rank: Optional[int] = None,
                                 degree: int = 2) -> Tuple[Connection, Connection, Matrix]:
    """
    Gauge transform of a diagonal gradient connection (A_v = diag(d_v phi_k)).

    Returns:
        (seed connection, transformed connection, gauge matrix g: seed -> transformed)
    """
    rank = rank or rng.randint(1, Limits.MAX_RANK)
    potentials = [random_elem(rng, ring, degree) for _ in range(rank)]
    matrices = {}
    for v in ring.variables:
        matrices[v] = [[potentials[i].diff(v) if i == j else ring.zero for j in range(rank)]
                       for i in range(rank)]
    seed_connection = Connection(ring, rank, matrices)
    g = random_unipotent(rng, ring, rank)
    if rng.random() < 0.5:
        g = mat_mul(g, [list(row) for row in zip(*random_unipotent(rng, ring, rank))])
    return seed_connection, gauge_transform(seed_connection, g), g


def random_map(rng: random.Random, source: LocRing, target: LocRing,
               degree: int = Limits.MAX_COEFF_DEGREE) -> PolyMap:
    """
    Components are random polynomials, except that a target variable which is itself a
    declared denominator is sent to a monomial unit c x^k (the source must then invert x).
    """
    components = []
    unit_targets = {format_poly(d) for d in target.denominators}
    invertible_source = source.variables[0] in {format_poly(d) for d in source.denominators}
    for y in target.variables:
        if y in unit_targets:
            if not invertible_source:
                components.append(source.convert(_coefficient(rng)))
                continue
            x = source.gen(0)
            components.append(x ** rng.randint(1, degree) * _coefficient(rng))
        else:
            components.append(source.element(random_poly(rng, source, degree, allow_zero=False)))
    return PolyMap(source, target, components)


def random_pullback_instance(rng: random.Random) -> Tuple[PolyMap, Connection]:
    """A map X -> Y with n, m <= 2 and a connection on Y of rank <= MAX_RANK."""
    source = random_ring(rng)
    target = random_ring(rng)
    if target.denominators and not source.denominators:
        source = source.with_denominators([source.variables[0]])
    f = random_map(rng, source, target)
    C = random_connection(rng, target, degree=2)
    return f, C


def random_composable_maps(rng: random.Random, degree: int = 2) -> Tuple[PolyMap, PolyMap, Connection]:
    """f: A^1 -> A^1 and g: A^1 -> A^1 with a rank-1 connection on the last copy."""
    X = LocRing(('x',))
    Y = LocRing(('y',))
    Z = LocRing(('z',))
    f = random_map(rng, X, Y, degree)
    g = random_map(rng, Y, Z, degree)
    C = random_connection(rng, Z, rank=rng.randint(1, 2), degree=2)
    return f, g, C


# ============================================================================
# FAMILIES
# ============================================================================

def _discriminant_factors(h: MPoly) -> List[str]:
    """Irreducible factors in the base variable of disc_x(h), as polynomial strings."""
    x = Symbol(FIBER_VAR)
    disc = discriminant(h.as_expr(), x)
    _, factors = factor_list(disc)
    ring = h.ring
    names = []
    for factor, _ in factors:
        p = ring.from_expr(factor)
        if not p.is_ground:
            names.append(format_poly(p))
    return names


def random_family(rng: random.Random, twisted: bool = False, name: Optional[str] = None) -> Family:
    """
    Monic squarefree h(x, lam) with deg_x h <= MAX_FAMILY_DEGREE and lam-degree
    <= MAX_FAMILY_BASE_DEGREE; the base inverts the discriminant factors. A twisted
    family carries A_x = c h_x / h, A_lam = c h_lam / h + a(lam) with c = k/7 (k not
    divisible by 7), so no pole-order or degree step of the reduction is singular.
    """
    plain = LocRing((FIBER_VAR, BASE_VAR))
    R = plain.ring
    x, lam = R.gens
    while True:
        n = rng.randint(1, Limits.MAX_FAMILY_DEGREE)
        h = x ** n
        lower = rng.sample(range(n), min(n, rng.randint(1, 2)))
        for k in lower:
            coefficient = R.zero
            for e in range(Limits.MAX_FAMILY_BASE_DEGREE + 1):
                if rng.random() < 0.5:
                    coefficient += _coefficient(rng) * lam ** e
            h += coefficient * x ** k
        if h.degree(1) <= 0:
            h += lam
        if discriminant(h.as_expr(), Symbol(FIBER_VAR)) != 0:
            break
    base_denominators = _discriminant_factors(h) if n > 1 else []
    label = name or format_poly(h)
    if not twisted:
        return Family(h, FIBER_VAR, BASE_VAR, base_denominators, name=label)

    k = 0
    while k % TWIST_DENOMINATOR == 0:
        k = rng.randint(-TWIST_DENOMINATOR + 1, TWIST_DENOMINATOR - 1)
    c = Fraction(k, TWIST_DENOMINATOR)
    a = _coefficient(rng) * lam ** rng.randint(0, 1) if rng.random() < 0.5 else R.zero
    h_text = format_poly(h)
    A_x = f"({c})*({format_poly(h.diff(x))})/({h_text})"
    lam_part = format_poly(h.diff(lam))
    A_lam = f"({c})*({lam_part})/({h_text}) + ({format_poly(a)})"
    return Family(h, FIBER_VAR, BASE_VAR, base_denominators, A_x=[[A_x]], A_lam=[[A_lam]],
                  name=f"{label} [c={c}]")

