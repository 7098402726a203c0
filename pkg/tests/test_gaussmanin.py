"""Tests for families, Hermite reduction, the three Gauss-Manin routes, H^0 and Picard-Fuchs operators."""
import pytest

from src.checks.gaussmanin_suite import CORPUS_ORACLE, oracle_matrix
from src.core.constants import CHART_CAVEAT, Limits, ReportKeys
from src.core.errors import DModuleError, NonIntegrableError, ReductionStuck, ShapeMismatch, VariableMismatch
from src.dmodules.gaussmanin import (
    ROUTES, Family, FamilyFiltration, certify_basis, classify, compare_routes, gauss_manin, gm_h0, gm_leibniz_check,
    gm_route_a, gm_route_b, gm_route_c, h0_basis, h1_basis, hermite_reduce, picard_fuchs,
)
from src.dmodules.homalg import d1_routes_agree, e1_page
from src.validators.instance_generator import instance_rng, random_family


@pytest.fixture(scope='module')
def quadratic(corpus):
    return corpus['quadratic']


class TestFamily:

    def test_non_integrable_twist(self):
        with pytest.raises(NonIntegrableError):
            Family('x - lam', A_x=[['lam']], A_lam=[['0']])

    def test_non_squarefree_fiber_denominator(self):
        with pytest.raises(DModuleError):
            Family('x^2')

    def test_same_variable(self):
        with pytest.raises(VariableMismatch):
            Family('x - lam', fiber_var='x', base_var='x')

    def test_irregular_twist(self):
        f = Family('x', A_x=[['1/x^2']])
        assert not f.regular
        with pytest.raises(ReductionStuck):
            h1_basis(f)

    def test_reducible_fiber_denominator(self):
        split = Family('x^2 - x*lam', base_denominators=['lam'], name='split')
        assert gm_route_c(split).strings() == [['-1/lam']]
        report = compare_routes(split)
        assert report.verdict == 'equal'
        assert report.passed

    def test_report_entry(self, quadratic):
        entry = quadratic.to_dict()
        assert entry['h'] == 'x^2 - lam'


class TestReduction:

    def test_exact_form_reduces_to_zero(self, quadratic):
        x = quadratic.fiber_gen
        h = quadratic.field(quadratic.h)
        exact = quadratic.nabla_fiber([x / h])
        assert hermite_reduce(quadratic, exact).is_zero()

    def test_basis_class_is_a_unit_vector(self, quadratic):
        [cls] = h1_basis(quadratic)
        assert classify(quadratic, cls.vector) == [quadratic.K.one]

    @pytest.mark.parametrize('name,size', [('linear', 1), ('quadratic', 1), ('cubic', 2), ('trivial', 0)])
    def test_basis_size(self, corpus, name, size):
        assert len(h1_basis(corpus[name])) == size

    def test_full_basis_adds_dlog(self, quadratic):
        assert len(h1_basis(quadratic, full=True)) == 2

    @pytest.mark.parametrize('full', [False, True])
    def test_certify_basis(self, corpus, full):
        for f in corpus.values():
            assert certify_basis(f, full)['passed'], f.name


class TestGaussManin:

    @pytest.mark.parametrize('name', sorted(CORPUS_ORACLE))
    def test_oracle(self, corpus, name):
        f = corpus[name]
        assert gm_route_c(f).entries == oracle_matrix(f, CORPUS_ORACLE[name])
        assert gm_route_c(f).strings() == CORPUS_ORACLE[name]

    @pytest.mark.parametrize('route', ROUTES)
    def test_routes_on_quadratic(self, quadratic, route):
        assert gauss_manin(quadratic, route).strings() == [['-1/(2*lam)']]

    def test_unknown_route(self, quadratic):
        with pytest.raises(ValueError):
            gauss_manin(quadratic, 'd')

    @pytest.mark.parametrize('name', sorted(CORPUS_ORACLE))
    def test_routes_agree(self, corpus, name):
        report = compare_routes(corpus[name])
        assert report.routes_agree
        assert report.verdict == 'equal'
        assert report.passed

    def test_routes_agree_on_full_basis(self, corpus):
        assert compare_routes(corpus['cubic'], full=True).routes_agree

    def test_report_fields(self, quadratic):
        report = compare_routes(quadratic).to_dict()
        assert report[ReportKeys.GM_MATRIX] == [['-1/(2*lam)']]
        assert report[ReportKeys.CHART_CAVEAT] == CHART_CAVEAT

    def test_sign_flip_is_detected(self, quadratic):
        try:
            flipped = gm_route_b(quadratic, base_action_sign=-1)
        except DModuleError:
            return
        assert not flipped.agrees_with(gm_route_c(quadratic))

    def test_leibniz(self, corpus):
        assert gm_leibniz_check(corpus['cubic'], 'lam + 1')['passed']

    def test_leibniz_rejects_fiber_factor(self, quadratic):
        with pytest.raises(ShapeMismatch):
            gm_leibniz_check(quadratic, 'x')


    @pytest.mark.parametrize('index', range(Limits.RANDOM_FAMILIES))
    def test_default_random_families(self, index):
        rng = instance_rng(Limits.DEFAULT_SEED, 'gaussmanin', index)
        f = random_family(rng, twisted=index % 2 == 1)
        report = compare_routes(f)
        assert report.verdict == 'equal', f.name
        assert report.passed, f.name


class TestLerayFiltration:

    @pytest.mark.parametrize('name', sorted(CORPUS_ORACLE))
    def test_d1_routes_agree(self, corpus, name):
        agree, pages = d1_routes_agree(FamilyFiltration(corpus[name]), 1)
        assert set(pages) == {'lift', 'cone', 'psi'}
        assert agree

    @pytest.mark.parametrize('route', ['lift', 'cone', 'psi'])
    def test_d1_equals_route_a(self, quadratic, route):
        assert e1_page(FamilyFiltration(quadratic), 1, route).matrix() == gm_route_a(quadratic).entries

    def test_h0_routes_agree(self, corpus):
        f = corpus['twisted_linear']
        agree, pages = d1_routes_agree(FamilyFiltration(f), 0)
        assert agree
        assert pages['psi'].matrix() == gm_h0(f).entries

    def test_reported(self, quadratic):
        assert compare_routes(quadratic).to_dict()[ReportKeys.D1_ROUTES] is True


class TestPicardFuchs:

    def test_quadratic(self, quadratic):
        assert str(picard_fuchs(quadratic, gm_route_c(quadratic), 0)) == 'd_lam + 1/(2*lam)'

    def test_index_range(self, quadratic):
        with pytest.raises(ShapeMismatch):
            picard_fuchs(quadratic, gm_route_c(quadratic), 1)

    def test_operators_in_report(self, corpus):
        report = compare_routes(corpus['cubic'])
        assert [op.order for op in report.picard_fuchs] == [1, 1]


class TestHorizontalSections:

    @pytest.mark.parametrize('name,expected', [
        ('trivial', [['0']]),
        ('twisted_linear', [['1']]),
        ('gaussian', []),
    ])
    def test_h0_matrix(self, corpus, name, expected):
        assert gm_h0(corpus[name]).strings() == expected

    def test_h0_of_gaussian_is_empty(self, corpus):
        assert h0_basis(corpus['gaussian']) == []
