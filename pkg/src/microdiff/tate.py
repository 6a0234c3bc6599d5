"""Coefficient ring: restricted power series over Q_p on the unit polydisk.

Elements are sparse polynomials in ``d`` coordinates truncated in total
degree.  The ``exact`` flag records whether the truncation discarded
anything: an exact element is a genuine polynomial and every norm or unit
statement about it is unconditional.  The Gauss norm is the max of the
coefficient norms and is multiplicative on exact elements (the chart is
integral).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import NotCertifiable
from .padic import DEFAULT_PRECISION, DEFAULT_PRIME, PadicScalar

DEFAULT_DEGREE_CAP = 32

INFINITY = float("inf")

Monomial = tuple[int, ...]


def _zero_exp(dim: int) -> Monomial:
    return (0,) * dim


@dataclass(frozen=True)
class TateSeries:
    """Truncated restricted power series with Gauss norm."""

    dim: int
    prime: int
    coeffs: Mapping[Monomial, PadicScalar] = field(default_factory=dict)
    degree_cap: int = DEFAULT_DEGREE_CAP
    exact: bool = True

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        for m, c in self.coeffs.items():
            if len(m) != self.dim or any(e < 0 for e in m):
                raise ValueError(f"bad monomial exponent {m}")
            if sum(m) > self.degree_cap:
                raise ValueError(f"monomial {m} exceeds degree cap {self.degree_cap}")
            if c.is_zero:
                raise ValueError("stored coefficients must be nonzero")
            if c.prime != self.prime:
                raise ValueError("mixed primes in coefficients")

    # -- constructors --------------------------------------------------

    @classmethod
    def constant(cls, value, dim: int = 1, prime: int = DEFAULT_PRIME,
                 degree_cap: int = DEFAULT_DEGREE_CAP,
                 precision: int = DEFAULT_PRECISION) -> "TateSeries":
        if not isinstance(value, PadicScalar):
            value = PadicScalar.from_fraction(Fraction(value), prime, precision)
        coeffs = {} if value.is_zero else {_zero_exp(dim): value}
        return cls(dim, value.prime, coeffs, degree_cap)

    @classmethod
    def coordinate(cls, axis: int, dim: int = 1, prime: int = DEFAULT_PRIME,
                   degree_cap: int = DEFAULT_DEGREE_CAP,
                   precision: int = DEFAULT_PRECISION) -> "TateSeries":
        """The coordinate function x_axis (axes are 1-based)."""
        if not 1 <= axis <= dim:
            raise ValueError(f"axis {axis} out of range for dim {dim}")
        m = tuple(1 if i == axis - 1 else 0 for i in range(dim))
        return cls(dim, prime, {m: PadicScalar.one(prime, precision)}, degree_cap)

    @classmethod
    def zero(cls, dim: int = 1, prime: int = DEFAULT_PRIME,
             degree_cap: int = DEFAULT_DEGREE_CAP) -> "TateSeries":
        return cls(dim, prime, {}, degree_cap)

    # -- structure -----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        """Total degree of the stored part (-1 for zero)."""
        return max((sum(m) for m in self.coeffs), default=-1)

    def coefficient(self, m: Monomial) -> PadicScalar:
        return self.coeffs.get(tuple(m), PadicScalar.zero(self.prime))

    def __eq__(self, other):
        return (isinstance(other, TateSeries) and self.dim == other.dim
                and self.prime == other.prime and dict(self.coeffs) == dict(other.coeffs)
                and self.exact == other.exact)

    # -- norms -----------------------------------------------------------

    def gauss_norm(self) -> Fraction:
        """max |c_m| over stored coefficients; 0 for the zero element."""
        return max((c.norm() for c in self.coeffs.values()), default=Fraction(0))

    def spectral_valuation(self):
        """Integer v with |f| = p**(-v); +infinity for 0."""
        if self.is_zero:
            return INFINITY
        return min(c.valuation for c in self.coeffs.values())

    # -- ring operations -------------------------------------------------

    def _like(self, coeffs: dict, exact: bool, degree_cap: int | None = None) -> "TateSeries":
        return TateSeries(self.dim, self.prime, coeffs,
                          self.degree_cap if degree_cap is None else degree_cap, exact)

    def _check_compatible(self, other: "TateSeries"):
        if self.dim != other.dim or self.prime != other.prime:
            raise ValueError("mixed dimensions or primes")

    def __add__(self, other: "TateSeries") -> "TateSeries":
        self._check_compatible(other)
        cap = min(self.degree_cap, other.degree_cap)
        out: dict[Monomial, PadicScalar] = {}
        for m in set(self.coeffs) | set(other.coeffs):
            if sum(m) > cap:
                continue
            a, b = self.coeffs.get(m), other.coeffs.get(m)
            c = a + b if a is not None and b is not None else (a if b is None else b)
            if not c.is_zero:
                out[m] = c
        dropped = any(sum(m) > cap for m in set(self.coeffs) | set(other.coeffs))
        return TateSeries(self.dim, self.prime, out, cap,
                          self.exact and other.exact and not dropped)

    def __neg__(self) -> "TateSeries":
        return self._like({m: -c for m, c in self.coeffs.items()}, self.exact)

    def __sub__(self, other: "TateSeries") -> "TateSeries":
        return self + (-other)

    def __mul__(self, other: "TateSeries") -> "TateSeries":
        self._check_compatible(other)
        cap = min(self.degree_cap, other.degree_cap)
        out: dict[Monomial, PadicScalar] = {}
        dropped = False
        for ma, ca in self.coeffs.items():
            for mb, cb in other.coeffs.items():
                m = tuple(a + b for a, b in zip(ma, mb))
                if sum(m) > cap:
                    dropped = True
                    continue
                c = ca * cb
                prev = out.get(m)
                c = c if prev is None else prev + c
                if c.is_zero:
                    out.pop(m, None)
                else:
                    out[m] = c
        return TateSeries(self.dim, self.prime, out, cap,
                          self.exact and other.exact and not dropped)

    def scale(self, scalar: PadicScalar) -> "TateSeries":
        if scalar.is_zero:
            return self._like({}, self.exact)
        return self._like({m: c * scalar for m, c in self.coeffs.items()}, self.exact)

    def derive(self, axis: int) -> "TateSeries":
        """Formal partial derivative along x_axis (1-based).

        The norm never increases: differentiation multiplies coefficients by
        integers, which have norm <= 1.
        """
        if not 1 <= axis <= self.dim:
            raise ValueError(f"axis {axis} out of range for dim {self.dim}")
        i = axis - 1
        out: dict[Monomial, PadicScalar] = {}
        for m, c in self.coeffs.items():
            if m[i] == 0:
                continue
            factor = PadicScalar.from_int(m[i], self.prime, c.precision)
            nc = c * factor
            if nc.is_zero:
                continue
            nm = m[:i] + (m[i] - 1,) + m[i + 1:]
            out[nm] = out[nm] + nc if nm in out else nc
        return self._like(out, self.exact, degree_cap=max(0, self.degree_cap - 1))

    # -- units -----------------------------------------------------------

    def is_unit(self) -> bool:
        """Strictly dominant constant term criterion for units of K<x>.

        Only exact polynomials can be certified in this version; a truncated
        series raises :class:`NotCertifiable` because discarded terms could
        carry the norm.
        """
        if not self.exact:
            raise NotCertifiable("unit test needs an exact polynomial")
        zero = _zero_exp(self.dim)
        c0 = self.coeffs.get(zero)
        if c0 is None:
            return False
        n0 = c0.norm()
        return all(c.norm() < n0 for m, c in self.coeffs.items() if m != zero)

    def invert_unit(self) -> "TateSeries":
        """Inverse up to the degree cap, via the geometric series.

        Writes f = c0*(1 - u) with |u| < 1 and zero constant term, so the
        partial sums of c0^{-1} * sum u^j stabilize degree by degree.  The
        result satisfies |g| = |f|^{-1}; it is flagged inexact unless f is a
        nonzero constant (the true inverse is an infinite series otherwise).
        """
        if not self.is_unit():
            raise NotCertifiable("not a certified unit")
        zero = _zero_exp(self.dim)
        c0 = self.coeffs[zero]
        c0_inv = c0.inv()
        u = TateSeries.constant(PadicScalar.one(self.prime), self.dim, self.prime,
                                self.degree_cap) - self.scale(c0_inv)
        if u.is_zero:
            return TateSeries.constant(c0_inv, self.dim, self.prime, self.degree_cap)
        out = TateSeries.constant(PadicScalar.one(self.prime), self.dim, self.prime,
                                  self.degree_cap)
        power = u
        # u has zero constant term: u^j only touches degrees >= j
        for _ in range(self.degree_cap):
            if power.is_zero:
                break
            out = out + power
            power = power * u
        return TateSeries(self.dim, self.prime, out.scale(c0_inv).coeffs,
                          self.degree_cap, exact=False)

    # -- printing ----------------------------------------------------------

    def _monomial_text(self, m: Monomial) -> str:
        names = ["x"] if self.dim == 1 else [f"x{i + 1}" for i in range(self.dim)]
        parts = [f"{names[i]}^{e}" if e > 1 else names[i]
                 for i, e in enumerate(m) if e > 0]
        return "*".join(parts)

    def __str__(self):
        if self.is_zero:
            return "0"
        parts = []
        for m in sorted(self.coeffs, key=lambda t: (sum(t), t)):
            c = self.coeffs[m]
            ctext = str(c.as_fraction()) if c.exact else f"(~{c.residue()}*p^{c.valuation})"
            mono = self._monomial_text(m)
            if not mono:
                parts.append(ctext)
            elif ctext == "1":
                parts.append(mono)
            elif ctext == "-1":
                parts.append(f"-{mono}")
            else:
                parts.append(f"{ctext}*{mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"TateSeries({self})"
