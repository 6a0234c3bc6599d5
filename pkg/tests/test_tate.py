from fractions import Fraction

import pytest

from microdiff import NotCertifiable, PadicScalar, TateSeries
from microdiff.tate import INFINITY

from conftest import rand_series


def const(x, dim=1):
    return TateSeries.constant(Fraction(x), dim)


def coord(axis=1, dim=1):
    return TateSeries.coordinate(axis, dim)


class TestGaussNorm:
    def test_x_plus_p(self):
        assert (coord() + const(2)).gauss_norm() == 1

    def test_zero(self):
        assert TateSeries.zero().gauss_norm() == 0

    def test_direct_max(self):
        # p^2 x^3 + p^5
        f = coord() * coord() * coord()
        f = f.scale(PadicScalar.from_int(4)) + const(32)
        assert f.gauss_norm() == Fraction(1, 4)

    def test_multiplicative_on_random_pairs(self, rng):
        for _ in range(200):
            f = rand_series(rng, poly=True)
            g = rand_series(rng, poly=True)
            assert (f * g).gauss_norm() == f.gauss_norm() * g.gauss_norm()


class TestSpectralValuation:
    def test_monomial(self):
        f = (coord() * coord() * coord()).scale(PadicScalar.from_int(4))
        assert f.spectral_valuation() == 2

    def test_unit_series(self):
        assert (const(1) + coord().scale(PadicScalar.from_int(2))).spectral_valuation() == 0

    def test_direct_max(self):
        f = const(8) + (coord() * coord()).scale(PadicScalar.from_int(8))
        assert f.spectral_valuation() == 3

    def test_zero(self):
        assert TateSeries.zero().spectral_valuation() == INFINITY


class TestDerive:
    def test_square(self):
        f = coord() * coord()
        assert f.derive(1) == coord().scale(PadicScalar.from_int(2))

    def test_constant(self):
        assert const(5).derive(1).is_zero

    def test_term_by_term(self):
        f = coord() * coord() * coord() + coord().scale(PadicScalar.from_int(2))
        df = f.derive(1)
        assert df == (coord() * coord()).scale(PadicScalar.from_int(3)) + const(2)

    def test_norm_never_increases(self, rng):
        for _ in range(100):
            f = rand_series(rng, dim=2, poly=True)
            assert f.derive(1).gauss_norm() <= f.gauss_norm()


class TestUnits:
    def test_one_plus_px(self):
        f = const(1) + coord().scale(PadicScalar.from_int(2))
        assert f.is_unit()

    def test_coordinate_not_unit(self):
        assert not coord().is_unit()

    def test_norm_on_x_term(self):
        # p + x: the coordinate term carries the norm
        f = const(2) + coord()
        assert not f.is_unit()

    def test_truncated_not_certifiable(self):
        f = TateSeries(1, 2, {(0,): PadicScalar.one()}, exact=False)
        with pytest.raises(NotCertifiable):
            f.is_unit()

    def test_invert_geometric_series(self):
        f = const(1) + coord().scale(PadicScalar.from_int(2))
        g = f.invert_unit()
        for n in range(5):
            assert g.coefficient((n,)).as_fraction() == Fraction(-2) ** n

    def test_invert_constant(self):
        g = const(6).invert_unit()
        assert g.coefficient((0,)).as_fraction() == Fraction(1, 6)

    def test_multiply_back(self):
        f = const(1) + coord().scale(PadicScalar.from_int(2))
        prod = f * f.invert_unit()
        assert prod.coefficient((0,)).as_fraction() == 1
        # within the cap every other coefficient cancels exactly
        assert all(m == (0,) for m in prod.coeffs)

    def test_inverse_norm(self, rng):
        for _ in range(50):
            f = rand_series(rng, poly=False)
            g = TateSeries.constant(PadicScalar.one()) + \
                TateSeries.coordinate(1).scale(PadicScalar.from_int(2))
            h = f + TateSeries.zero()
            if not h.is_unit():
                continue
            assert h.invert_unit().gauss_norm() == 1 / h.gauss_norm()


def test_degree_cap_truncates_and_flags():
    f = TateSeries(1, 2, {(3,): PadicScalar.one()}, degree_cap=4)
    g = f * f  # degree 6 > cap 4
    assert g.is_zero and not g.exact


def test_json_round_trip():
    from microdiff.jsonio import series_from_json, series_to_json
    f = const(1) + coord().scale(PadicScalar.from_int(6))
    back = series_from_json(series_to_json(f), 2)
    assert back.dim == f.dim and set(back.coeffs) == set(f.coeffs)
    for m in f.coeffs:
        assert back.coeffs[m].agrees_with(f.coeffs[m])
