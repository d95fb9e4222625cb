"""Exact solenoid arithmetic: the shift, the translation action, metrics."""

import random
from fractions import Fraction

import pytest

from soldyn.linalg import IntMatrix, TorusPoint
from soldyn.solenoid import (
    Exact,
    Infinite,
    Interval,
    SolenoidPoint,
    act,
    add,
    chain_distance_upper,
    coordinate,
    d_sigma,
    from_cycle,
    identity_point,
    neg,
    path_vector,
    random_point,
    shift,
    sub,
    unshift,
)

CAT = IntMatrix([[2, 1], [1, 1]])
DOUBLE = IntMatrix([[2]])


def points(matrix, n, seed=0, **kw):
    rng = random.Random(seed)
    return [random_point(matrix, rng, **kw) for _ in range(n)]


class TestChainStructure:
    def test_coordinates_satisfy_chain_relation(self):
        # depth j+1 maps onto depth j under the matrix
        for x in points(CAT, 10, seed=1):
            for j in range(8):
                image = TorusPoint(CAT.apply(x.coordinate(j + 1).coords))
                assert image == x.coordinate(j)

    def test_shift_moves_coordinates(self):
        for x in points(DOUBLE, 10, seed=2):
            y = shift(x)
            for j in range(1, 6):
                assert y.coordinate(j) == x.coordinate(j - 1)
            assert y.coordinate(0) == TorusPoint(DOUBLE.apply(x.coordinate(0).coords))
            assert unshift(y) == x

    def test_identity_point_fixed_by_shift(self):
        e = identity_point(CAT)
        assert shift(e) == e
        assert e.coordinate(5).coords == (Fraction(0), Fraction(0))


class TestGroupAxioms:
    def test_add_neg_sub(self):
        xs = points(CAT, 6, seed=3)
        e = identity_point(CAT)
        for x, y in zip(xs, xs[1:]):
            assert add(x, neg(x)) == e
            assert sub(x, y) == add(x, neg(y))
            assert add(x, e) == x

    def test_shift_is_homomorphism(self):
        xs = points(CAT, 6, seed=4)
        for x, y in zip(xs, xs[1:]):
            assert shift(add(x, y)) == add(shift(x), shift(y))


class TestThetaAction:
    def test_action_axioms(self):
        x = points(CAT, 1, seed=5)[0]
        v = [Fraction(1, 3), Fraction(1, 7)]
        w = [Fraction(2, 5), Fraction(1, 2)]
        vw = [a + b for a, b in zip(v, w)]
        assert act(v, act(w, x)) == act(vw, x)
        assert act([0, 0], x) == x

    def test_shift_equivariance(self):
        # the shift intertwines translation by v with translation by Av
        for x in points(CAT, 8, seed=6):
            v = [Fraction(1, 5), Fraction(2, 7)]
            assert shift(act(v, x)) == act(CAT.apply(v), shift(x))

    def test_action_changes_zero_coordinate(self):
        e = identity_point(DOUBLE)
        y = act([Fraction(1, 3)], e)
        assert y.coordinate(0).coords == (Fraction(1, 3),)


class TestMetric:
    def test_identity_translate_by_one(self):
        e = identity_point(DOUBLE)
        d = d_sigma(e, act([1], e))
        assert isinstance(d, Exact)
        assert d.value == 1

    def test_identity_translate_by_third_not_on_leaf(self):
        e = identity_point(DOUBLE)
        d = d_sigma(e, act([Fraction(1, 3)], e))
        assert isinstance(d, Infinite)

    def test_halving_under_shift(self):
        rng = random.Random(7)
        resolved = 0
        while resolved < 25:
            x = random_point(DOUBLE, rng)
            y = random_point(DOUBLE, rng)
            d = d_sigma(x, y)
            if isinstance(d, (Exact, Interval)):
                ds = d_sigma(shift(x), shift(y))
                assert type(ds) is type(d)
                if isinstance(d, Exact):
                    assert ds.value == Fraction(d.value, 2)
                else:
                    assert ds.lower == Fraction(d.lower, 2)
                    assert ds.upper() == Fraction(d.upper(), 2)
                resolved += 1

    def test_translation_invariance(self):
        rng = random.Random(8)
        resolved = 0
        while resolved < 15:
            x = random_point(DOUBLE, rng)
            y = random_point(DOUBLE, rng)
            d = d_sigma(x, y)
            if isinstance(d, Exact):
                v = [Fraction(rng.randint(1, 9), 8)]
                dt = d_sigma(act(v, x), act(v, y))
                assert isinstance(dt, Exact) and dt.value == d.value
                resolved += 1


class TestPathVector:
    def test_path_vector_connects_the_points(self):
        # the returned vector must translate x back onto y (it may be a
        # different representative of the same leafwise displacement)
        rng = random.Random(9)
        for _ in range(10):
            x = random_point(CAT, rng)
            v = (Fraction(rng.randint(-5, 5), 7), Fraction(rng.randint(-5, 5), 9))
            y = act(v, x)
            out = path_vector(x, y)
            assert act(out.value, x) == y

    def test_chain_distance_upper_is_symmetric_bound(self):
        x, y = points(CAT, 2, seed=10)
        d1 = chain_distance_upper(x, y)
        d2 = chain_distance_upper(y, x)
        assert d1 == pytest.approx(d2, rel=1e-9)
        assert d1 >= 0.0


class TestSerialization:
    def test_json_round_trip(self):
        for x in points(CAT, 5, seed=11):
            assert SolenoidPoint.from_json(x.to_json()) == x

    def test_from_cycle_periodicity(self):
        x = from_cycle(DOUBLE, [["1/3"], ["2/3"]])
        assert x.coordinate(0).coords == (Fraction(1, 3),)
        assert x.coordinate(2).coords == (Fraction(1, 3),)
        assert coordinate(x, 1).coords == (Fraction(2, 3),)
