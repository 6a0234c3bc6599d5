"""Shared random-operator generators (seeded, deterministic)."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from microdiff import MicroOp, PadicScalar, TateSeries

UNITS = (1, 3, 5, 7, 9, 11)


def rand_value(rng: random.Random, prime: int = 2,
               val_range: tuple[int, int] = (-3, 3)) -> Fraction:
    v = rng.randint(*val_range)
    u = rng.choice([u for u in UNITS if u % prime != 0])
    sign = rng.choice((1, -1))
    return sign * u * Fraction(prime) ** v


def rand_series(rng: random.Random, dim: int = 1, prime: int = 2,
                poly: bool = False,
                val_range: tuple[int, int] = (-3, 3)) -> TateSeries:
    f = TateSeries.constant(rand_value(rng, prime, val_range), dim, prime)
    if poly and rng.random() < 0.5:
        axis = rng.randint(1, dim)
        x = TateSeries.coordinate(axis, dim, prime)
        f = f + x.scale(PadicScalar.from_fraction(
            rand_value(rng, prime, val_range), prime))
    return f


def rand_positive_op(rng: random.Random, dim: int = 1, prime: int = 2,
                     max_terms: int = 4, max_exp: int = 3, poly: bool = False,
                     val_range: tuple[int, int] = (-3, 3)) -> MicroOp:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        alpha = tuple(rng.randint(0, max_exp) for _ in range(dim))
        terms[alpha] = rand_series(rng, dim, prime, poly, val_range)
    return MicroOp(dim, prime, terms)


def rand_laurent_op(rng: random.Random, dim: int = 1, prime: int = 2,
                    max_terms: int = 4, max_exp: int = 3,
                    val_range: tuple[int, int] = (-3, 3)) -> MicroOp:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        alpha = tuple(rng.randint(-max_exp, max_exp) for _ in range(dim))
        terms[alpha] = rand_series(rng, dim, prime, False, val_range)
    return MicroOp(dim, prime, terms)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0x5eed)
