from fractions import Fraction

import pytest

from microdiff import (InsufficientTruncation, MicroOp, ZeroOperator, gauss_op,
                       is_slope, order_Nmu, order_nmu, polygon, product_op,
                       slope_in_interval)

from conftest import rand_positive_op

F = Fraction


class TestPolygon:
    def test_two_points(self):
        P = MicroOp.identity() + MicroOp.derivation()
        poly = polygon(P)
        assert poly.vertices == ((0, 0), (1, 0))
        assert poly.slopes == (F(0),)

    def test_product_op_all_vertices(self):
        poly = polygon(product_op(8))
        assert poly.vertices == tuple((n, F(n * (n + 1), 2)) for n in range(9))
        assert poly.slopes == tuple(F(n) for n in range(1, 9))

    def test_gauss_op_odd_slopes(self):
        poly = polygon(gauss_op(7))
        assert poly.slopes == tuple(F(2 * n - 1) for n in range(1, 8))

    def test_collinear_points_are_not_vertices(self):
        # valuations 0, 1, 2: a single slope-1 edge
        P = (MicroOp.identity() + MicroOp.monomial((1,), F(2))
             + MicroOp.monomial((2,), F(4)))
        poly = polygon(P)
        assert poly.vertices == ((0, 0), (2, 2))
        assert poly.slopes == (F(1),)
        assert len(poly.points) == 3

    def test_per_abscissa_minimum_d2(self):
        P = (MicroOp.monomial((1, 0), F(2)) + MicroOp.monomial((0, 1), F(8))
             + MicroOp.identity(2))
        poly = polygon(P)
        assert (1, F(1)) in poly.points and len(poly.points) == 2

    def test_zero_raises(self):
        with pytest.raises(ZeroOperator):
            polygon(MicroOp.zero())

    def test_truncation_flag_and_ceiling(self):
        poly = polygon(product_op(6))
        assert poly.truncated and poly.certified_below == F(7, 2)
        assert polygon(product_op(6, exact=True)).certified_below is None


class TestIsSlope:
    def test_product_op_integer_slopes(self):
        P = product_op(9)
        assert is_slope(P, 1) and is_slope(P, 3)
        assert not is_slope(P, F(3, 2))

    def test_gauss_even_not_slope(self):
        G = gauss_op(9)
        assert not is_slope(G, 2) and not is_slope(G, 4)
        assert is_slope(G, 3)

    def test_constant_zero_weight(self):
        P = MicroOp.identity() + MicroOp.derivation()
        assert is_slope(P, 0)

    def test_above_ceiling_raises(self):
        P = product_op(4)  # ceiling 5/2
        with pytest.raises(InsufficientTruncation):
            is_slope(P, 3)

    def test_equivalence_with_order_gap(self, rng):
        checked = 0
        for _ in range(100):
            P = rand_positive_op(rng, max_terms=5, max_exp=6, poly=True)
            for _ in range(20):
                mu = F(rng.randint(0, 24), rng.randint(1, 4))
                gap = order_nmu(P, mu) < order_Nmu(P, mu)
                assert is_slope(P, mu) == gap
                checked += 1
        assert checked == 2000


class TestSlopeInInterval:
    def test_product_op(self):
        P = product_op(9)
        for k in range(1, 4):
            assert slope_in_interval(P, 1, k)

    def test_single_slope_outside(self):
        P = MicroOp.identity() - MicroOp.monomial((1,), F(2))
        assert not slope_in_interval(P, 2, 5)
        assert slope_in_interval(P, 1, 2)

    def test_constant(self):
        P = MicroOp.constant(F(7))
        assert not slope_in_interval(P, 1, 10)

    def test_uncertified_range_raises(self):
        P = product_op(4)  # ceiling 5/2: [2, 3] cannot be ruled out
        assert slope_in_interval(P, 1, 3)  # certified hit at slope 1 or 2
        with pytest.raises(InsufficientTruncation):
            slope_in_interval(P, 3, 4)

    def test_slopes_diverge_with_truncation(self):
        # the certified ceiling grows with M, so ever larger slopes appear
        last = F(0)
        for M in (4, 8, 12, 16):
            poly = polygon(product_op(M))
            certified = poly.certified_slopes()
            assert certified and certified[-1] > last
            last = certified[-1]
