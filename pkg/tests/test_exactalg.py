"""Tests for localized rings, canonical forms, printing and univariate tools."""
import pytest

from src.core.errors import ParseError, RingMismatch, UndeclaredDenominator, UnknownVariable, ZeroInputError
from src.dmodules.exactalg import (
    LocRing, RatFun, UnivariateField, format_poly, is_squarefree, parse_poly, partial_fractions,
    squarefree_decompose, uni_gcd_bezout,
)


@pytest.fixture(scope='module')
def space():
    return UnivariateField(('x',), 'x')


class TestLocRing:

    def test_rejects_constant_denominator(self):
        with pytest.raises(UndeclaredDenominator):
            LocRing(('x',), ['2'])

    def test_rejects_non_squarefree_denominator(self):
        with pytest.raises(UndeclaredDenominator):
            LocRing(('x',), ['x^2'])

    def test_rejects_non_coprime_denominators(self):
        with pytest.raises(UndeclaredDenominator):
            LocRing(('x', 'y'), ['x', 'x*y + x'])

    def test_normalizes_declared_denominators(self):
        assert LocRing(('x',), ['2*x + 2']) == LocRing(('x',), ['x + 1'])

    def test_undeclared_division_raises(self, plane):
        with pytest.raises(UndeclaredDenominator):
            plane.parse('1/x')

    def test_unknown_variable(self, plane):
        with pytest.raises(UnknownVariable):
            plane.parse('x + z')

    def test_malformed_expression(self, plane):
        with pytest.raises(ParseError):
            plane.parse('x $ 1')
        with pytest.raises(ParseError):
            plane.parse('(x + 1')

    def test_cross_ring_conversion(self, plane, laurent):
        with pytest.raises(RingMismatch):
            plane.convert(laurent.gen('x'))


class TestLocElem:

    def test_canonical_form_is_unique(self, laurent):
        assert laurent.parse('(x^2 + x)/x') == laurent.parse('x + 1')
        assert laurent.parse('x/x') == laurent.one

    def test_inverse_of_unit(self, laurent):
        x = laurent.gen('x')
        assert x * x.inverse() == laurent.one
        assert (x ** -2) * x ** 2 == laurent.one
        assert x.is_unit()

    def test_factor_of_a_declared_denominator_is_a_unit(self):
        R = LocRing(('x',), ['x^2 - x'])
        x = R.gen('x')
        assert x.is_unit()
        assert x * R.parse('1/x') == R.one
        assert x.inverse() == R.parse('(x - 1)/(x^2 - x)')
        assert R.parse('1/(x^2 - 2*x + 1)') * R.parse('x^2 - 2*x + 1') == R.one
        assert not R.parse('x + 1').is_unit()

    def test_inverse_of_non_unit(self, laurent):
        y = laurent.parse('x + 1')
        assert not y.is_unit()
        with pytest.raises(UndeclaredDenominator):
            y.inverse()

    def test_derivative(self, laurent):
        assert laurent.parse('1/x').diff('x') == laurent.parse('-1/x^2')
        assert laurent.parse('x^3 + 2/x').diff('x') == laurent.parse('3*x^2 - 2/x^2')

    def test_depends_on(self):
        R = LocRing(('x', 'lam'), ['lam'])
        assert R.parse('x/lam').depends_on('lam')
        assert not R.parse('1/lam').depends_on('x')

    def test_substitute(self, plane):
        source = LocRing(('u',))
        image = source.parse('u^2 + 1').substitute(plane, [plane.parse('x + y')])
        assert image == plane.parse('x^2 + 2*x*y + y^2 + 1')

    def test_substitute_needs_units(self, laurent):
        polynomial = LocRing(('t',))
        with pytest.raises(UndeclaredDenominator):
            laurent.parse('1/x').substitute(polynomial, [polynomial.parse('t + 1')])

    def test_fraction_round_trip(self, laurent):
        a = laurent.parse('(3*x^2 - 1)/x^3')
        assert laurent.from_fraction(a.to_fraction()) == a


class TestPrinting:

    def test_graded_lex_order(self):
        assert format_poly(parse_poly('lam - x^2', ('x', 'lam'))) == '-x^2 + lam'
        assert format_poly(parse_poly('lam - x^2 + x^3', ('x', 'lam'))) == 'x^3 - x^2 + lam'
        assert format_poly(parse_poly('2 + y*x - 3*x^3', ('x', 'y'))) == '-3*x^3 + x*y + 2'

    def test_zero(self):
        assert format_poly(parse_poly('x - x', ('x',))) == '0'

    def test_fraction_printing(self, laurent):
        assert str(laurent.parse('1/x')) == '1/x'
        assert str(laurent.parse('-1/(2*x)')) == '-1/(2*x)'


class TestUnivariateTools:

    def test_squarefree(self):
        assert is_squarefree(parse_poly('x^2 - y', ('x', 'y')))
        assert not is_squarefree(parse_poly('x^2 + 2*x + 1', ('x',)))

    def test_bezout_identity(self, space):
        x = space.x
        a = x ** 3 - x
        b = x ** 2 + 2 * x + 1
        g, u, v = uni_gcd_bezout(a, b)
        assert u * a + v * b == g
        assert g == x + 1

    def test_bezout_with_zero_cofactor(self, space):
        x = space.x
        g, u, v = uni_gcd_bezout(2 * x + 2, space.ring.zero)
        assert g == x + 1
        assert u * (2 * x + 2) == g
        assert not v

    def test_bezout_of_zeros(self, space):
        with pytest.raises(ZeroInputError):
            uni_gcd_bezout(space.ring.zero, space.ring.zero)

    def test_squarefree_decomposition(self, space):
        x = space.x
        p = x ** 3 * (x + 1) * (x - 2) ** 2
        blocks = squarefree_decompose(p)
        product = space.ring.one
        for factor, multiplicity in blocks:
            product = product * factor ** multiplicity
        assert product == p.monic()
        assert sorted(m for _, m in blocks) == [1, 2, 3]

    def test_partial_fractions_reassemble(self, space):
        x = space.x
        num = x ** 4 + 3 * x + 1
        den = x ** 2 * (x + 1) * (x ** 2 + 1)
        poly_part, pieces = partial_fractions(num, den)
        total = RatFun(space, poly_part)
        for factor, power, a in pieces:
            assert a.degree() < factor.degree()
            total = total + RatFun(space, a, factor ** power)
        assert total == RatFun(space, num, den)

    def test_partial_fractions_with_parameter(self):
        space = UnivariateField(('x', 'lam'), 'x')
        x = space.x
        lam = space.ring.ground_new(space.domain.convert(space.coeff_field.gens[0]))
        den = x ** 2 - lam
        _, pieces = partial_fractions(space.ring.one, den * x)
        total = RatFun(space, space.ring.zero)
        for factor, power, a in pieces:
            total = total + RatFun(space, a, factor ** power)
        assert total == RatFun(space, space.ring.one, den * x)


class TestRatFun:

    def test_printing_of_gauss_manin_entry(self):
        space = UnivariateField(('lam',), 'lam')
        lam = space.x
        assert str(RatFun(space, -space.ring.one, 2 * lam)) == '-1/(2*lam)'

    def test_derivative(self):
        space = UnivariateField(('lam',), 'lam')
        lam = space.x
        assert RatFun(space, space.ring.one, lam).diff() == RatFun(space, -space.ring.one, lam ** 2)

    def test_normal_form(self):
        space = UnivariateField(('lam',), 'lam')
        lam = space.x
        assert RatFun(space, 2 * lam, 4 * lam ** 2) == RatFun(space, space.ring.one, 2 * lam)
