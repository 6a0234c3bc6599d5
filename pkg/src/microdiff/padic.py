"""Finite-precision arithmetic in Q_p with exact valuations.

A scalar is stored as ``p**valuation * unit``.  The valuation is always an
exact integer (``None`` encodes the exact zero, whose valuation is +infinity);
only the unit part is subject to precision.  Two storage modes coexist:

* exact mode (``exact=True``): the unit is a :class:`~fractions.Fraction`
  whose numerator and denominator are coprime to ``p``.  Every ring operation
  among exact scalars, including inversion, stays exact, so true
  cancellations are detected (the sum really becomes zero).
* digit mode (``exact=False``): the unit is a residue modulo
  ``p**precision``, i.e. the value is known modulo ``p**(valuation +
  precision)``.  This is the mode deserialized data lives in.  Addition that
  cancels every known digit raises :class:`PrecisionExhausted`.

Norms are powers of ``p`` and are returned as exact Fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DivisionByZero, PrecisionExhausted

DEFAULT_PRIME = 2
DEFAULT_PRECISION = 64

_INF = float("inf")


def int_valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def fraction_valuation(q: Fraction, p: int) -> int:
    if q == 0:
        raise ValueError("valuation of 0 is infinite")
    return int_valuation(q.numerator, p) - int_valuation(q.denominator, p)


@dataclass(frozen=True)
class PadicScalar:
    """Element of Q_p with exact valuation and truncated unit digits."""

    prime: int
    valuation: int | None
    unit: Fraction | int
    precision: int = DEFAULT_PRECISION
    exact: bool = True

    def __post_init__(self):
        if self.prime < 2:
            raise ValueError(f"prime must be >= 2, got {self.prime}")
        if self.precision < 1:
            raise ValueError("precision must be >= 1")
        if self.valuation is None:
            if self.unit != 0:
                raise ValueError("exact zero must carry unit 0")
            return
        if self.exact:
            u = self.unit
            if not isinstance(u, Fraction):
                raise TypeError("exact scalar needs a Fraction unit")
            if u == 0 or u.numerator % self.prime == 0 or u.denominator % self.prime == 0:
                raise ValueError(f"unit {u} is not a p-unit for p={self.prime}")
        else:
            u = self.unit
            if not isinstance(u, int) or not 0 < u < self.prime**self.precision:
                raise ValueError("digit-mode unit must be a reduced residue")
            if u % self.prime == 0:
                raise ValueError("digit-mode unit must be coprime to p")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, prime: int = DEFAULT_PRIME, precision: int = DEFAULT_PRECISION) -> "PadicScalar":
        return cls(prime, None, Fraction(0), precision)

    @classmethod
    def one(cls, prime: int = DEFAULT_PRIME, precision: int = DEFAULT_PRECISION) -> "PadicScalar":
        return cls(prime, 0, Fraction(1), precision)

    @classmethod
    def from_int(cls, n: int, prime: int = DEFAULT_PRIME,
                 precision: int = DEFAULT_PRECISION) -> "PadicScalar":
        return cls.from_fraction(Fraction(n), prime, precision)

    @classmethod
    def from_fraction(cls, q: Fraction | int, prime: int = DEFAULT_PRIME,
                      precision: int = DEFAULT_PRECISION) -> "PadicScalar":
        q = Fraction(q)
        if q == 0:
            return cls.zero(prime, precision)
        v = fraction_valuation(q, prime)
        return cls(prime, v, q / Fraction(prime) ** v, precision)

    @classmethod
    def from_residue(cls, valuation: int, residue: int, prime: int = DEFAULT_PRIME,
                     precision: int = DEFAULT_PRECISION) -> "PadicScalar":
        """Digit-mode scalar known modulo ``p**(valuation + precision)``."""
        residue %= prime**precision
        if residue == 0:
            raise PrecisionExhausted("residue carries no known digits")
        shift = int_valuation(residue, prime)
        if shift:
            # normalize: fold p-divisibility of the residue into the valuation
            residue //= prime**shift
            precision -= shift
            if precision < 1:
                raise PrecisionExhausted("residue carries no known digits")
        return cls(prime, valuation + shift, residue, precision, exact=False)

    @classmethod
    def uniformizer(cls, prime: int = DEFAULT_PRIME,
                    precision: int = DEFAULT_PRECISION) -> "PadicScalar":
        return cls(prime, 1, Fraction(1), precision)

    # -- views ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.valuation is None

    def norm(self) -> Fraction:
        """Normalized absolute value |p| = 1/p; norm(0) = 0."""
        if self.is_zero:
            return Fraction(0)
        v = self.valuation
        return Fraction(1, self.prime**v) if v >= 0 else Fraction(self.prime ** (-v))

    def residue(self, digits: int | None = None) -> int:
        """Unit part reduced modulo ``p**digits``."""
        if self.is_zero:
            return 0
        n = min(digits or self.precision, self.precision)
        mod = self.prime**n
        if self.exact:
            u = self.unit
            return u.numerator * pow(u.denominator, -1, mod) % mod
        return self.unit % mod

    def as_fraction(self) -> Fraction:
        """Exact rational value; only available in exact mode."""
        if self.is_zero:
            return Fraction(0)
        if not self.exact:
            raise PrecisionExhausted("digit-mode scalar has no exact rational value")
        return self.unit * Fraction(self.prime) ** self.valuation

    def agrees_with(self, other: "PadicScalar", digits: int | None = None) -> bool:
        """True when both values coincide modulo the joint working precision."""
        if self.prime != other.prime:
            return False
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        if self.valuation != other.valuation:
            return False
        n = min(digits or self.precision, self.precision, other.precision)
        return self.residue(n) == other.residue(n)

    # -- arithmetic ----------------------------------------------------

    def _check_compatible(self, other: "PadicScalar"):
        if not isinstance(other, PadicScalar):
            raise TypeError(f"expected PadicScalar, got {type(other).__name__}")
        if self.prime != other.prime:
            raise ValueError(f"mixed primes {self.prime} and {other.prime}")

    def __add__(self, other: "PadicScalar") -> "PadicScalar":
        self._check_compatible(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.exact and other.exact:
            return self.from_fraction(self.as_fraction() + other.as_fraction(),
                                      self.prime, min(self.precision, other.precision))
        p = self.prime
        va, vb = self.valuation, other.valuation
        vmin = min(va, vb)
        # absolute precision of the sum is the meet of the operands'
        known = min(va + self.precision, vb + other.precision)
        mod = p ** (known - vmin)
        s = (self.residue() * p ** (va - vmin) + other.residue() * p ** (vb - vmin)) % mod
        if s == 0:
            raise PrecisionExhausted(
                f"sum is 0 modulo p^{known}; no digit of the result is known")
        shift = int_valuation(s, p)
        digits = known - vmin - shift
        if digits < 1:
            raise PrecisionExhausted("cancellation consumed every known digit")
        return PadicScalar(p, vmin + shift, (s // p**shift) % p**digits,
                           digits, exact=False)

    def __neg__(self) -> "PadicScalar":
        if self.is_zero:
            return self
        if self.exact:
            return PadicScalar(self.prime, self.valuation, -self.unit,
                               self.precision, exact=True)
        mod = self.prime**self.precision
        return PadicScalar(self.prime, self.valuation, (-self.unit) % mod,
                           self.precision, exact=False)

    def __sub__(self, other: "PadicScalar") -> "PadicScalar":
        return self + (-other)

    def __mul__(self, other: "PadicScalar") -> "PadicScalar":
        self._check_compatible(other)
        if self.is_zero or other.is_zero:
            return self.zero(self.prime, min(self.precision, other.precision))
        v = self.valuation + other.valuation
        n = min(self.precision, other.precision)
        if self.exact and other.exact:
            return PadicScalar(self.prime, v, self.unit * other.unit, n)
        u = self.residue(n) * other.residue(n) % self.prime**n
        return PadicScalar(self.prime, v, u, n, exact=False)

    def inv(self) -> "PadicScalar":
        if self.is_zero:
            raise DivisionByZero("inverse of 0 in Q_p")
        if self.exact:
            return PadicScalar(self.prime, -self.valuation, 1 / self.unit,
                               self.precision)
        mod = self.prime**self.precision
        return PadicScalar(self.prime, -self.valuation, pow(self.unit, -1, mod),
                           self.precision, exact=False)

    def __pow__(self, n: int) -> "PadicScalar":
        if n < 0:
            return self.inv() ** (-n)
        out = self.one(self.prime, self.precision)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __repr__(self):
        if self.is_zero:
            return f"PadicScalar(0; p={self.prime})"
        tag = "" if self.exact else f" mod p^{self.valuation + self.precision}"
        return f"PadicScalar(p^{self.valuation}*{self.unit}{tag}; p={self.prime})"


def binomial(n: int, l: int, prime: int = DEFAULT_PRIME,
             precision: int = DEFAULT_PRECISION) -> PadicScalar:
    """Exact integer binomial coefficient embedded into Q_p."""
    if not 0 <= l <= n:
        raise ValueError(f"binomial needs 0 <= l <= n, got ({n}, {l})")
    return PadicScalar.from_int(math.comb(n, l), prime, precision)


def generalized_binomial(a: int, j: int, prime: int = DEFAULT_PRIME,
                         precision: int = DEFAULT_PRECISION) -> PadicScalar:
    """Binomial C(a, j) for any integer a and j >= 0.

    For a < 0 this is the signed negative-binomial value
    ``(-1)**j * C(-a + j - 1, j)``; it drives the commutation of negative
    derivation powers past a function.
    """
    if j < 0:
        raise ValueError("lower index must be >= 0")
    num = 1
    for i in range(j):
        num *= a - i
    return PadicScalar.from_fraction(Fraction(num, math.factorial(j)), prime, precision)
