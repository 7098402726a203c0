"""
Connections on free modules over a chart ring and the dictionary between
connection matrices (nabla), derivation actions (Delta), jet sections
(delta = c + nabla) and the left D_X-module structure.

Convention: nabla(e_j) = sum_i dv_i (x) (column j of A_i), so on a module
element m the covariant derivative along v_i is d_i(m) + A_i m, and the
curvature component (i, j) is d_i A_j - d_j A_i + [A_i, A_j].
"""
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from ..core.errors import NonIntegrableError, RingMismatch, ShapeMismatch, UndeclaredDenominator
from ..core.logger import get_logger
from .exactalg import LocElem, LocRing
from .weyl import WeylOp, apply, weyl_mul

logger = get_logger(__name__)

Matrix = List[List[LocElem]]
Vector = List[LocElem]


# ============================================================================
# MATRIX HELPERS OVER A LOCALIZED RING
# ============================================================================

def zero_matrix(ring: LocRing, rows: int, cols: int) -> Matrix:
    return [[ring.zero for _ in range(cols)] for _ in range(rows)]


def identity_matrix(ring: LocRing, size: int) -> Matrix:
    return [[ring.one if i == j else ring.zero for j in range(size)] for i in range(size)]


def shape(M: Matrix) -> Tuple[int, int]:
    return len(M), (len(M[0]) if M else 0)


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    (n, k), (k2, m) = shape(A), shape(B)
    if k != k2:
        raise ShapeMismatch(f"Cannot multiply {n}x{k} by {k2}x{m}")
    ring = _ring_of(A, B)
    result = zero_matrix(ring, n, m)
    for i in range(n):
        for j in range(m):
            total = ring.zero
            for t in range(k):
                if A[i][t] and B[t][j]:
                    total = total + A[i][t] * B[t][j]
            result[i][j] = total
    return result


def mat_add(A: Matrix, B: Matrix) -> Matrix:
    if shape(A) != shape(B):
        raise ShapeMismatch(f"Cannot add {shape(A)} and {shape(B)}")
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A: Matrix, B: Matrix) -> Matrix:
    if shape(A) != shape(B):
        raise ShapeMismatch(f"Cannot subtract {shape(A)} and {shape(B)}")
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(c, A: Matrix) -> Matrix:
    return [[c * a for a in row] for row in A]


def mat_diff(A: Matrix, var: Union[str, int]) -> Matrix:
    return [[a.diff(var) for a in row] for row in A]


def mat_vec(A: Matrix, v: Vector) -> Vector:
    if shape(A)[1] != len(v):
        raise ShapeMismatch(f"Cannot apply {shape(A)} matrix to vector of length {len(v)}")
    ring = _ring_of(A) if A else v[0].parent
    return [sum((a * x for a, x in zip(row, v) if a and x), ring.zero) for row in A]


def is_zero_matrix(A: Matrix) -> bool:
    return all(not a for row in A for a in row)


def mat_equal(A: Matrix, B: Matrix) -> bool:
    return shape(A) == shape(B) and all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def first_difference(A: Matrix, B: Matrix) -> Optional[Dict[str, str]]:
    """Witness entry of the first mismatch, or None."""
    if shape(A) != shape(B):
        return {'entry': 'shape', 'left': str(shape(A)), 'right': str(shape(B))}
    for i, (ra, rb) in enumerate(zip(A, B)):
        for j, (a, b) in enumerate(zip(ra, rb)):
            if a != b:
                return {'entry': f"({i},{j})", 'left': str(a), 'right': str(b)}
    return None


def mat_inverse(A: Matrix) -> Matrix:
    """
    Inverse over the localized ring (determinant must be a unit).

    Raises:
        UndeclaredDenominator: If the inverse leaves the ring
    """
    ring = _ring_of(A)
    domain = ring.field.to_domain()
    dm = DomainMatrix([[a.to_fraction() for a in row] for row in A], shape(A), domain)
    if not dm.det():
        raise UndeclaredDenominator("Singular matrix has no inverse")
    inverse = dm.inv().to_list()
    return [[ring.from_fraction(f) for f in row] for row in inverse]


def format_matrix(A: Matrix) -> List[List[str]]:
    return [[str(a) for a in row] for row in A]


def _ring_of(*matrices: Matrix) -> LocRing:
    for M in matrices:
        for row in M:
            for a in row:
                return a.parent
    raise ShapeMismatch("Empty matrix carries no ring")


# ============================================================================
# CONNECTIONS
# ============================================================================

class Connection:
    """
    Free module O^r with one r x r matrix per coordinate direction.

    ``directions`` lists the variables the connection differentiates along;
    it is every ring variable for an absolute connection and the fiber
    variables for a relative one.
    """

    def __init__(self, ring: LocRing, rank: int, matrices: Union[Mapping[str, Matrix], Sequence[Matrix]] = None,
                 directions: Optional[Sequence[str]] = None):
        self.ring = ring
        self.rank = rank
        self.directions: Tuple[str, ...] = tuple(directions) if directions is not None else ring.variables
        for v in self.directions:
            ring.index(v)
        if matrices is None:
            matrices = {}
        if not isinstance(matrices, Mapping):
            if len(matrices) != len(self.directions):
                raise ShapeMismatch(f"Expected {len(self.directions)} matrices, got {len(matrices)}")
            matrices = dict(zip(self.directions, matrices))
        unknown = set(matrices) - set(self.directions)
        if unknown:
            raise ShapeMismatch(f"Matrices given for non-directions {sorted(unknown)}")
        self.matrices: Dict[str, Matrix] = {}
        for v in self.directions:
            M = matrices.get(v)
            if M is None:
                M = zero_matrix(ring, rank, rank)
            if shape(M) != (rank, rank) and not (rank == 0 and not M):
                raise ShapeMismatch(f"Matrix for '{v}' has shape {shape(M)}, expected {(rank, rank)}")
            self.matrices[v] = [[ring.convert(a) for a in row] for row in M]

    @classmethod
    def trivial(cls, ring: LocRing, rank: int = 1, directions: Optional[Sequence[str]] = None) -> 'Connection':
        return cls(ring, rank, {}, directions)

    def matrix(self, var: Union[str, int]) -> Matrix:
        if isinstance(var, int):
            var = self.ring.variables[var]
        if var not in self.matrices:
            raise ShapeMismatch(f"Connection does not differentiate along '{var}'")
        return self.matrices[var]

    def covariant(self, var: Union[str, int], m: Vector) -> Vector:
        """nabla along a coordinate: d_v(m) + A_v m."""
        if len(m) != self.rank:
            raise ShapeMismatch(f"Vector of length {len(m)} for rank {self.rank}")
        A = self.matrix(var)
        image = mat_vec(A, m)
        return [x.diff(var) + y for x, y in zip(m, image)]

    def __eq__(self, other) -> bool:
        return (isinstance(other, Connection) and self.ring == other.ring and self.rank == other.rank
                and self.directions == other.directions
                and all(mat_equal(self.matrices[v], other.matrices[v]) for v in self.directions))

    def to_dict(self) -> Dict:
        return {
            'vars': list(self.ring.variables),
            'rank': self.rank,
            'matrices': {v: format_matrix(M) for v, M in self.matrices.items()},
        }


def curvature(C: Connection) -> Dict[Tuple[str, str], Matrix]:
    """Components d_i A_j - d_j A_i + [A_i, A_j] for every pair i < j of directions."""
    components = {}
    for vi, vj in combinations(C.directions, 2):
        Ai, Aj = C.matrices[vi], C.matrices[vj]
        F = mat_sub(mat_diff(Aj, vi), mat_diff(Ai, vj))
        if C.rank:
            F = mat_add(F, mat_sub(mat_mul(Ai, Aj), mat_mul(Aj, Ai)))
        components[(vi, vj)] = F
    return components


def is_integrable(C: Connection) -> bool:
    return all(is_zero_matrix(F) for F in curvature(C).values())


# ============================================================================
# DERIVATION ACTION (Delta)
# ============================================================================

def to_d_action(C: Connection, derivation: Sequence) -> Matrix:
    """
    Contraction of nabla with the derivation sum_i a_i d_i: the matrix sum_i a_i A_i.

    The full operator on module elements is m -> sum_i a_i d_i(m) + (this matrix) m,
    see act_derivation().
    """
    if len(derivation) != len(C.directions):
        raise ShapeMismatch(f"Derivation has {len(derivation)} components, expected {len(C.directions)}")
    result = zero_matrix(C.ring, C.rank, C.rank)
    for a, v in zip(derivation, C.directions):
        a = C.ring.convert(a)
        if a:
            result = mat_add(result, mat_scale(a, C.matrices[v]))
    return result


def act_derivation(C: Connection, derivation: Sequence, m: Vector) -> Vector:
    """Delta_derivation(m)."""
    M = to_d_action(C, derivation)
    image = mat_vec(M, m)
    result = list(image)
    for a, v in zip(derivation, C.directions):
        a = C.ring.convert(a)
        if a:
            result = [r + a * x.diff(v) for r, x in zip(result, m)]
    return result


def lie_bracket(ring: LocRing, a: Sequence, b: Sequence, directions: Sequence[str]) -> Vector:
    """[sum a_i d_i, sum b_i d_i] as a coefficient vector."""
    a = [ring.convert(x) for x in a]
    b = [ring.convert(x) for x in b]
    result = []
    for k in range(len(directions)):
        total = ring.zero
        for i, v in enumerate(directions):
            total = total + a[i] * b[k].diff(v) - b[i] * a[k].diff(v)
        result.append(total)
    return result


def lie_compatible(C: Connection, a: Sequence, b: Sequence, m: Vector) -> bool:
    """Delta_[a,b](m) == Delta_a(Delta_b m) - Delta_b(Delta_a m)."""
    bracket = lie_bracket(C.ring, a, b, C.directions)
    left = act_derivation(C, bracket, m)
    ab = act_derivation(C, a, act_derivation(C, b, m))
    ba = act_derivation(C, b, act_derivation(C, a, m))
    return left == [x - y for x, y in zip(ab, ba)]


def from_d_action(ring: LocRing, action: Mapping[str, Matrix], rank: Optional[int] = None,
                  directions: Optional[Sequence[str]] = None) -> Connection:
    """
    Connection with nabla(e) = sum_i dv_i (x) Delta_{d_i}(e).

    Raises:
        ShapeMismatch: If a matrix is not square of the common rank
    """
    directions = tuple(directions) if directions is not None else ring.variables
    if rank is None:
        sizes = {shape(M)[0] for M in action.values()}
        if len(sizes) > 1:
            raise ShapeMismatch(f"Action matrices of different sizes {sorted(sizes)}")
        rank = sizes.pop() if sizes else 0
    for v, M in action.items():
        if shape(M) != (rank, rank):
            raise ShapeMismatch(f"Action of d_{v} has shape {shape(M)}, expected {(rank, rank)}")
    return Connection(ring, rank, dict(action), directions)


def apply_operator(C: Connection, P: WeylOp, m: Vector) -> Vector:
    """
    Left D_X-action of a normally ordered operator through iterated coordinate derivations.
    """
    if P.ring != C.ring:
        raise RingMismatch("Operator and connection live over different rings")
    result = [C.ring.zero] * C.rank
    for alpha, c in P.terms.items():
        image = list(m)
        for i in reversed(range(len(alpha))):
            for _ in range(alpha[i]):
                image = C.covariant(C.ring.variables[i], image)
        result = [r + c * x for r, x in zip(result, image)]
    return result


# ============================================================================
# JET SECTIONS: P^1(E) = E + Omega^1 (x) E
# ============================================================================

@dataclass
class JetSection:
    """
    delta: E -> P^1(E) in the split model, as the (r + n r) x r matrix [I; A_1; ...; A_n].
    """
    connection: Connection
    delta: Matrix = field(default_factory=list)

    @property
    def rank(self) -> int:
        return self.connection.rank

    def projection(self) -> Matrix:
        """pi: P^1(E) -> E."""
        ring, r, n = self.connection.ring, self.rank, len(self.connection.directions)
        return [[ring.one if j == i else ring.zero for j in range(r * (n + 1))] for i in range(r)]

    def canonical_inclusion(self) -> Matrix:
        """c: e -> (e, 0)."""
        ring, r, n = self.connection.ring, self.rank, len(self.connection.directions)
        return identity_matrix(ring, r) + zero_matrix(ring, r * n, r)

    def apply(self, m: Vector) -> Tuple[Vector, List[Vector]]:
        """delta(m) = (m, [nabla_i m]) for a module element."""
        return list(m), [self.connection.covariant(v, m) for v in self.connection.directions]

    def right_multiply(self, jet: Tuple[Vector, List[Vector]], a: LocElem) -> Tuple[Vector, List[Vector]]:
        """Right O-structure of P^1(E): (e, w) . a = (a e, a w + da (x) e)."""
        e, forms = jet
        return ([a * x for x in e],
                [[a * w + a.diff(v) * x for w, x in zip(form, e)]
                 for form, v in zip(forms, self.connection.directions)])


def jet_section(C: Connection) -> JetSection:
    delta = identity_matrix(C.ring, C.rank)
    for v in C.directions:
        delta = delta + [list(row) for row in C.matrices[v]]
    return JetSection(C, delta)


def jet_to_connection(J: JetSection) -> Connection:
    """nabla = delta - c, read off the Omega^1 (x) E block."""
    difference = mat_sub(J.delta, J.canonical_inclusion())
    if not is_zero_matrix(difference[:J.rank]):
        raise ShapeMismatch("delta does not split the projection pi")
    r = J.rank
    blocks = {v: difference[r * (k + 1): r * (k + 2)] for k, v in enumerate(J.connection.directions)}
    return Connection(J.connection.ring, r, blocks, J.connection.directions)


def section_property(J: JetSection) -> bool:
    """pi o delta == id."""
    return mat_equal(mat_mul(J.projection(), J.delta), identity_matrix(J.connection.ring, J.rank))


# ============================================================================
# MORPHISMS AND GAUGE
# ============================================================================

def is_morphism(h: Matrix, C: Connection, C_prime: Connection) -> bool:
    """
    A'_i h + d_i(h) == h A_i for every direction.

    Raises:
        ShapeMismatch: If h is not rank' x rank
    """
    if C.ring != C_prime.ring or C.directions != C_prime.directions:
        raise RingMismatch("Connections over different charts")
    if shape(h) != (C_prime.rank, C.rank) and not (C.rank == 0 or C_prime.rank == 0):
        raise ShapeMismatch(f"Morphism of shape {shape(h)} between ranks {C.rank} -> {C_prime.rank}")
    h = [[C.ring.convert(a) for a in row] for row in h]
    for v in C.directions:
        left = mat_add(mat_mul(C_prime.matrices[v], h), mat_diff(h, v))
        right = mat_mul(h, C.matrices[v])
        if not mat_equal(left, right):
            return False
    return True


def gauge_transform(C: Connection, g: Matrix) -> Connection:
    """
    C' with A'_i = g A_i g^-1 - d_i(g) g^-1; g is then an isomorphism C -> C'.
    """
    g = [[C.ring.convert(a) for a in row] for row in g]
    g_inv = mat_inverse(g)
    matrices = {}
    for v in C.directions:
        conj = mat_mul(mat_mul(g, C.matrices[v]), g_inv)
        matrices[v] = mat_sub(conj, mat_mul(mat_diff(g, v), g_inv))
    return Connection(C.ring, C.rank, matrices, C.directions)


def relative_connection(C: Connection, fiber_vars: Sequence[str]) -> Connection:
    """Forget the base directions: nabla_{X/Y}."""
    for v in fiber_vars:
        if v not in C.directions:
            raise ShapeMismatch(f"'{v}' is not a direction of the connection")
    return Connection(C.ring, C.rank, {v: C.matrices[v] for v in fiber_vars}, fiber_vars)


# ============================================================================
# DE RHAM COMPLEX
# ============================================================================

@dataclass
class DRComplex:
    """
    Omega^q (x) E with wedge-lex bases and operator-valued differentials.

    ``bases[q]`` lists (wedge index tuple, module index) labels;
    ``differentials[q]`` maps term q to term q+1, entries are WeylOp.
    """
    connection: Connection
    forms: Tuple[str, ...]
    bases: List[List[Tuple[Tuple[int, ...], int]]]
    differentials: List[List[List[WeylOp]]]
    is_complex: bool = False

    def apply(self, q: int, element: Vector) -> Vector:
        """Differential of a coefficient vector in degree q."""
        d = self.differentials[q]
        ring = self.connection.ring
        result = []
        for row in d:
            total = ring.zero
            for op, x in zip(row, element):
                if op and x:
                    total = total + apply(op, x)
            result.append(total)
        return result

    def labels(self, q: int) -> List[str]:
        names = self.forms
        out = []
        for wedge, j in self.bases[q]:
            form = '^'.join(f"d{names[i]}" for i in wedge) or '1'
            out.append(f"{form}*e{j + 1}")
        return out


def _wedge_sign(i: int, wedge: Tuple[int, ...]) -> int:
    """dv_i ^ dv_wedge = sign * dv_sorted."""
    return -1 if sum(1 for k in wedge if k < i) % 2 else 1


def de_rham(C: Connection, mode: str = 'absolute', fiber_vars: Optional[Sequence[str]] = None,
            require_complex: bool = True) -> DRComplex:
    """
    Build the (absolute or relative) De Rham complex of a connection.

    Args:
        C: Connection over the chart
        mode: 'absolute' or 'relative'
        fiber_vars: fiber variables for the relative mode
        require_complex: raise when d o d != 0 instead of returning the flag

    Raises:
        NonIntegrableError: If require_complex and the (relative) connection is not integrable
    """
    if mode == 'relative':
        if not fiber_vars:
            raise ShapeMismatch("Relative De Rham complex needs the fiber variables")
        C = relative_connection(C, fiber_vars)
    elif mode != 'absolute':
        raise ValueError(f"Unknown De Rham mode '{mode}'")
    ring, r = C.ring, C.rank
    forms = C.directions
    n = len(forms)
    bases = [[(wedge, j) for wedge in combinations(range(n), q) for j in range(r)] for q in range(n + 1)]
    zero_op = WeylOp(ring)
    differentials = []
    for q in range(n):
        target_index = {label: k for k, label in enumerate(bases[q + 1])}
        d = [[zero_op for _ in bases[q]] for _ in bases[q + 1]]
        for col, (wedge, j) in enumerate(bases[q]):
            for i in range(n):
                if i in wedge:
                    continue
                sign = _wedge_sign(i, wedge)
                target_wedge = tuple(sorted(wedge + (i,)))
                var_position = ring.index(forms[i])
                for jp in range(r):
                    row = target_index[(target_wedge, jp)]
                    entry = C.matrices[forms[i]][jp][j]
                    op = WeylOp.scalar(ring, entry * sign) if entry else WeylOp(ring)
                    if jp == j:
                        alpha = [0] * ring.nvars
                        alpha[var_position] = 1
                        op = op + WeylOp(ring, {tuple(alpha): ring.convert(sign)})
                    d[row][col] = d[row][col] + op
        differentials.append(d)
    complex_ = DRComplex(C, forms, bases, differentials)
    complex_.is_complex = _squares_to_zero(differentials, ring)
    if require_complex and not complex_.is_complex:
        logger.error(f"De Rham differential does not square to zero ({mode})")
        raise NonIntegrableError(f"Connection is not integrable; no {mode} De Rham complex")
    return complex_


def _squares_to_zero(differentials: List[List[List[WeylOp]]], ring: LocRing) -> bool:
    for d0, d1 in zip(differentials, differentials[1:]):
        for row in d1:
            for col in range(len(d0[0]) if d0 else 0):
                total = WeylOp(ring)
                for k, op in enumerate(row):
                    if op and d0[k][col]:
                        total = total + weyl_mul(op, d0[k][col])
                if total:
                    return False
    return True


def differential_sequence_check(ring: LocRing, fiber_vars: Sequence[str]) -> Dict:
    """
    0 -> f*Omega^1_Y -> Omega^1_X -> Omega^1_{X/Y} -> 0 on the product chart.

    Returns a rank certificate of the coordinate inclusion and projection.
    """
    base_vars = [v for v in ring.variables if v not in fiber_vars]
    n = ring.nvars
    inclusion = DomainMatrix([[QQ(1) if ring.variables[i] == b else QQ(0) for b in base_vars]
                              for i in range(n)], (n, len(base_vars)), QQ)
    projection = DomainMatrix([[QQ(1) if ring.variables[i] == f else QQ(0) for i in range(n)]
                               for f in fiber_vars], (len(fiber_vars), n), QQ)
    composite = projection * inclusion
    rank_in = inclusion.rank()
    rank_out = projection.rank()
    kernel_dim = n - rank_out
    certificate = {
        'base_vars': base_vars,
        'fiber_vars': list(fiber_vars),
        'injective': rank_in == len(base_vars),
        'surjective': rank_out == len(fiber_vars),
        'composite_zero': all(not c for row in composite.to_list() for c in row),
        'exact_middle': kernel_dim == rank_in,
    }
    certificate['passed'] = all(certificate[k] for k in ('injective', 'surjective', 'composite_zero', 'exact_middle'))
    return certificate
