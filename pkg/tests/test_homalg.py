"""Tests for truncated complexes, chain maps, cones and the exactness certificates."""
import pytest

from src.core.constants import Limits
from src.core.errors import CapExceeded, ComplexError, LiftFailure, NotAChainMap, TruncationPolluted
from src.dmodules.homalg import (
    ChainMap, Homotopy, TruncComplex, apply_map, cone_homotopies, homology, homology_dims, identity_map, induced_map,
    leray_cone_chart, mapping_cone, qq_matrix, same_map, truncated_exactness, verify_homotopy, zero_map,
)


@pytest.fixture
def unit_interval():
    """Q -> Q with d = id, acyclic."""
    return TruncComplex(0, [['a'], ['b']], [identity_map(1)], name='I')


@pytest.fixture
def summed():
    """Q^2 -> Q by (1, 1): H^0 is a line, H^1 vanishes."""
    return TruncComplex(0, [['a', 'b'], ['c']], [qq_matrix({0: {0: 1, 1: 1}}, (1, 2))], name='S')


class TestTruncComplex:

    def test_square_must_vanish(self):
        with pytest.raises(ComplexError):
            TruncComplex(0, [['a'], ['b'], ['c']], [identity_map(1), identity_map(1)])

    def test_differential_count(self):
        with pytest.raises(ComplexError):
            TruncComplex(0, [['a'], ['b']], [])

    def test_differential_shape(self):
        with pytest.raises(ComplexError):
            TruncComplex(0, [['a'], ['b']], [zero_map(2, 1)])

    def test_homology(self, unit_interval, summed):
        assert homology_dims(unit_interval) == {0: 0, 1: 0}
        assert homology_dims(summed) == {0: 1, 1: 0}

    def test_coordinates_of_a_cycle(self, summed):
        H = homology(summed, 0)
        assert H.coordinates({0: -1, 1: 1}) != [0]

    def test_coordinates_of_a_non_cycle(self, summed):
        with pytest.raises(LiftFailure):
            homology(summed, 0).coordinates({0: 1})

    def test_polluted_degree(self):
        T = TruncComplex(0, [['a'], ['b']], [zero_map(1, 1)], saturated=(0, 0))
        assert homology(T, 1).polluted
        with pytest.raises(TruncationPolluted):
            homology(T, 1, strict=True)

    def test_shift_negates_odd_differentials(self, summed):
        shifted = summed.shift(1)
        assert shifted.start == -1
        assert same_map(shifted.differential(-1), -summed.differential(0))
        assert same_map(summed.shift(2).differential(-2), summed.differential(0))


class TestChainMaps:

    def test_not_a_chain_map(self, unit_interval):
        flat = TruncComplex(0, [['a'], ['b']], [zero_map(1, 1)])
        with pytest.raises(NotAChainMap):
            ChainMap(unit_interval, flat, {0: identity_map(1), 1: identity_map(1)})

    def test_unchecked_map_reports_defect(self, unit_interval):
        flat = TruncComplex(0, [['a'], ['b']], [zero_map(1, 1)])
        f = ChainMap(unit_interval, flat, {0: identity_map(1), 1: identity_map(1)}, check=False)
        assert f.defect() == 0
        with pytest.raises(NotAChainMap):
            mapping_cone(f)

    def test_contracting_homotopy(self, unit_interval):
        identity = ChainMap.identity(unit_interval)
        zero = ChainMap(unit_interval, unit_interval, {})
        assert verify_homotopy(identity, zero, Homotopy(unit_interval, unit_interval, {1: identity_map(1)}))
        assert not verify_homotopy(identity, zero, Homotopy(unit_interval, unit_interval, {}))

    def test_induced_map_of_identity(self, summed):
        assert same_map(induced_map(ChainMap.identity(summed), 0), identity_map(1))

    def test_composition(self, summed):
        identity = ChainMap.identity(summed)
        assert identity.compose(identity).is_chain_map()


class TestMappingCone:

    def test_cone_of_identity_is_acyclic(self, summed):
        cone = mapping_cone(ChainMap.identity(summed))
        assert all(dim == 0 for dim in homology_dims(cone.complex).values())
        assert cone.inclusion.is_chain_map()
        assert cone.projection.is_chain_map()

    def test_cone_differential_signs(self, unit_interval):
        cone = mapping_cone(ChainMap.identity(unit_interval))
        # degree -1 is A^0 alone; its image is (-d_A a, u a) in A^1 + B^0
        assert apply_map(cone.complex.differential(-1), {0: 1}) == {0: -1, 1: 1}
        assert same_map(cone.projection.target.differential(-1), -unit_interval.differential(0))
        assert cone.projection.is_chain_map()

    def test_long_exact_sequence(self, summed):
        cone = mapping_cone(ChainMap.identity(summed))
        assert cone.exact_sequence_check(0)['passed']

    def test_homotopy_lemma(self, summed):
        lemma = cone_homotopies(mapping_cone(ChainMap.identity(summed)))
        assert all(lemma.verify().values())


class TestTruncatedExactness:

    @pytest.mark.parametrize('kind,n,bound', [
        ('leftDR', 1, 4),
        ('rightSpencer', 1, 4),
        ('leftDR', 2, 3),
        ('rightSpencer', 2, 3),
    ])
    def test_graded_pieces(self, kind, n, bound):
        certificate = truncated_exactness(kind, n, bound)
        assert certificate.passed
        assert certificate.to_dict()['disclaimer']

    @pytest.mark.parametrize('kind', ['leftDR', 'rightSpencer'])
    def test_ungraded_line(self, kind):
        assert truncated_exactness(kind, 1, 3, graded=False).passed

    def test_end_degree(self):
        assert truncated_exactness('leftDR', 2, 2).end_degree == 2
        assert truncated_exactness('rightSpencer', 2, 2).end_degree == 0

    def test_caps(self):
        with pytest.raises(CapExceeded):
            truncated_exactness('leftDR', 3, 2)
        with pytest.raises(CapExceeded):
            truncated_exactness('leftDR', 1, 13)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            truncated_exactness('koszul', 1, 2)


class TestLerayCone:

    def test_certificate(self):
        certificate = leray_cone_chart(3).certificate()
        assert certificate['passed']
        assert certificate['quasi_isomorphism']
        assert all(certificate['homotopies'].values())

    def test_cap(self):
        with pytest.raises(CapExceeded):
            leray_cone_chart(Limits.DEGREE_CAP_MAX + 1)
