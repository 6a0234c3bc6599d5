"""Differential operators with congruence-level norms.

An operator is stored by its raw coefficients: ``S = sum c_alpha * D^alpha``
with ``c_alpha`` a restricted power series and ``alpha`` an integer
multi-exponent (negative entries are inverse derivation powers; this module's
level norms and orders apply to the positive operators, the Laurent norms
live in :mod:`microdiff.microop`).

The level-k data of a term is the exponent ``k*fl(alpha) - v(c_alpha)`` where
``fl`` is the sum of the entries and ``v`` the coefficient's spectral
valuation; the level-k norm is ``p`` to the max of these.  Keeping raw
coefficients makes the inclusion between consecutive levels the identity on
data: one representation serves every level.

Truncated operators carry :class:`TailCertificate` bounds so that norm and
order queries are certified, never heuristic: a query either proves its
answer against the certificate or raises
:class:`~microdiff.errors.InsufficientTruncation`.

Values are immutable and every operation is pure, so operators can be shared
freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import (DivisionByZero, InsufficientTruncation, WindowOverflow,
                     ZeroOperator)
from .padic import DEFAULT_PRECISION, DEFAULT_PRIME, PadicScalar, generalized_binomial
from .tate import DEFAULT_DEGREE_CAP, TateSeries

DEFAULT_WINDOW_CAP = 64

Exponent = tuple[int, ...]


def floor_sum(alpha: Exponent) -> int:
    """Signed sum of the entries (the grading a monomial lives in)."""
    return sum(alpha)


def length(alpha: Exponent) -> int:
    """Sum of absolute values of the entries."""
    return sum(abs(a) for a in alpha)


@dataclass(frozen=True)
class TailCertificate:
    """Linear lower bound on the valuations of discarded coefficients.

    Asserts ``v(c_alpha) >= t0 + t1 * |alpha|`` for every discarded exponent
    of the covered sector with ``|alpha| > start``.  ``infinite`` additionally
    records that infinitely many of the discarded coefficients are nonzero
    (generators of inherently infinite operators set it).
    """

    start: int
    t0: Fraction
    t1: Fraction
    infinite: bool = False

    def __post_init__(self):
        object.__setattr__(self, "t0", Fraction(self.t0))
        object.__setattr__(self, "t1", Fraction(self.t1))

    def bound_at(self, n: int) -> Fraction:
        return self.t0 + self.t1 * n


def _sup_affine(slope: Fraction, offset: Fraction, n0: int) -> Fraction | None:
    """sup over integers n >= n0 of slope*n + offset; None means +infinity."""
    if slope > 0:
        return None
    return slope * n0 + offset


@dataclass(frozen=True)
class MicroOp:
    """Sparse Laurent differential operator with optional tail certificates.

    ``terms`` maps exponents to nonzero coefficients.  ``tail`` bounds the
    discarded part of the sector ``fl(alpha) >= 0``, ``neg_tail`` the sector
    ``fl(alpha) < 0``.  An operator without tails is exact: its stored terms
    are the whole element.
    """

    dim: int
    prime: int
    terms: Mapping[Exponent, TateSeries] = field(default_factory=dict)
    tail: TailCertificate | None = None
    neg_tail: TailCertificate | None = None

    def __post_init__(self):
        for a, c in self.terms.items():
            if len(a) != self.dim:
                raise ValueError(f"exponent {a} has wrong arity for dim {self.dim}")
            if c.dim != self.dim or c.prime != self.prime:
                raise ValueError("coefficient ring mismatch")
            if c.is_zero:
                raise ValueError("stored coefficients must be nonzero")

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, dim: int = 1, prime: int = DEFAULT_PRIME) -> "MicroOp":
        return cls(dim, prime, {})

    @classmethod
    def identity(cls, dim: int = 1, prime: int = DEFAULT_PRIME) -> "MicroOp":
        return cls.constant(1, dim, prime)

    @classmethod
    def constant(cls, value, dim: int = 1, prime: int = DEFAULT_PRIME,
                 degree_cap: int = DEFAULT_DEGREE_CAP) -> "MicroOp":
        f = value if isinstance(value, TateSeries) else TateSeries.constant(
            value, dim, prime, degree_cap)
        if f.is_zero:
            return cls.zero(dim, prime)
        return cls(dim, f.prime, {(0,) * dim: f})

    @classmethod
    def monomial(cls, alpha: Iterable[int], coeff, dim: int | None = None,
                 prime: int = DEFAULT_PRIME,
                 degree_cap: int = DEFAULT_DEGREE_CAP) -> "MicroOp":
        alpha = tuple(alpha)
        d = dim if dim is not None else len(alpha)
        f = coeff if isinstance(coeff, TateSeries) else TateSeries.constant(
            coeff, d, prime, degree_cap)
        if f.is_zero:
            return cls.zero(d, f.prime)
        return cls(d, f.prime, {alpha: f})

    @classmethod
    def derivation(cls, axis: int = 1, dim: int = 1,
                   prime: int = DEFAULT_PRIME) -> "MicroOp":
        """D_axis (1-based)."""
        if not 1 <= axis <= dim:
            raise ValueError(f"axis {axis} out of range for dim {dim}")
        alpha = tuple(1 if i == axis - 1 else 0 for i in range(dim))
        return cls.monomial(alpha, 1, dim, prime)

    # -- structure --------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms and self.tail is None and self.neg_tail is None

    @property
    def is_exact(self) -> bool:
        return self.tail is None and self.neg_tail is None

    @property
    def positive(self) -> bool:
        if self.neg_tail is not None:
            return False
        return all(min(a) >= 0 for a in self.terms)

    @property
    def window(self) -> tuple[tuple[int, int], ...]:
        """Per-axis bounding box of the stored support."""
        if not self.terms:
            return tuple((0, 0) for _ in range(self.dim))
        return tuple((min(a[i] for a in self.terms), max(a[i] for a in self.terms))
                     for i in range(self.dim))

    def max_length(self) -> int:
        return max((length(a) for a in self.terms), default=0)

    def coefficient(self, alpha: Iterable[int]) -> TateSeries:
        return self.terms.get(tuple(alpha), TateSeries.zero(self.dim, self.prime))

    def terms_equal(self, other: "MicroOp") -> bool:
        return (self.dim == other.dim and self.prime == other.prime
                and dict(self.terms) == dict(other.terms))

    def __eq__(self, other):
        return (isinstance(other, MicroOp) and self.terms_equal(other)
                and self.tail == other.tail and self.neg_tail == other.neg_tail)

    # -- additive structure ----------------------------------------------

    def _check_compatible(self, other: "MicroOp"):
        if self.dim != other.dim or self.prime != other.prime:
            raise ValueError("mixed dimensions or primes")

    def __add__(self, other: "MicroOp") -> "MicroOp":
        self._check_compatible(other)
        out: dict[Exponent, TateSeries] = dict(self.terms)
        for a, c in other.terms.items():
            s = out[a] + c if a in out else c
            if s.is_zero:
                out.pop(a, None)
            else:
                out[a] = s
        tail = _fold_beyond(out, _min_tail(self.tail, other.tail), positive_sector=True)
        neg_tail = _fold_beyond(out, _min_tail(self.neg_tail, other.neg_tail),
                                positive_sector=False)
        return MicroOp(self.dim, self.prime, out, tail, neg_tail)

    def __neg__(self) -> "MicroOp":
        return MicroOp(self.dim, self.prime, {a: -c for a, c in self.terms.items()},
                       self.tail, self.neg_tail)

    def __sub__(self, other: "MicroOp") -> "MicroOp":
        return self + (-other)

    def __mul__(self, other: "MicroOp") -> "MicroOp":
        from . import microop
        return microop.mul(self, other)

    # -- printing -----------------------------------------------------------

    def _exp_text(self, alpha: Exponent) -> str:
        names = ["d"] if self.dim == 1 else [f"d{i + 1}" for i in range(self.dim)]
        parts = [f"{names[i]}^{e}" if e != 1 else names[i]
                 for i, e in enumerate(alpha) if e != 0]
        return "*".join(parts)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for a in sorted(self.terms, key=lambda t: (floor_sum(t), t)):
            c = self.terms[a]
            ctext = str(c)
            if "+" in ctext or (" " in ctext):
                ctext = f"({ctext})"
            mono = self._exp_text(a)
            if not mono:
                parts.append(ctext)
            elif ctext == "1":
                parts.append(mono)
            else:
                parts.append(f"{ctext}*{mono}")
        return " + ".join(parts)

    def __repr__(self):
        tails = "" if self.is_exact else " (truncated)"
        return f"MicroOp({self}{tails})"


def _min_tail(a: TailCertificate | None,
              b: TailCertificate | None) -> TailCertificate | None:
    """Pointwise-min combination of two certificates for a sum.

    Beyond the smaller start one operand may still store terms while the
    other only certifies a bound there, so the sum's coefficients in that
    range are not exactly known; :func:`_fold_beyond` subsequently drops the
    stored terms of that range into the certificate.
    """
    if a is None and b is None:
        return None
    if a is None or b is None:
        return a if b is None else b
    return TailCertificate(min(a.start, b.start), min(a.t0, b.t0),
                           min(a.t1, b.t1), a.infinite or b.infinite)


def _fold_beyond(terms: dict, cert: TailCertificate | None,
                 positive_sector: bool) -> TailCertificate | None:
    """Drop stored terms of the certified-discarded range into the bound.

    A stored value beyond the start is only a partial coefficient (discarded
    mass of the other summand or factor also lands there), so keeping it
    would claim exactness the data cannot support.  Its exact valuation still
    lower-bounds the true coefficient together with the existing bound.
    """
    if cert is None:
        return None
    t0 = cert.t0
    doomed = [a for a in terms
              if (floor_sum(a) >= 0) == positive_sector and length(a) > cert.start]
    for a in doomed:
        v = Fraction(terms[a].spectral_valuation())
        t0 = min(t0, v - cert.t1 * length(a))
        del terms[a]
    return TailCertificate(cert.start, t0, cert.t1, cert.infinite)


# -- multiplication ---------------------------------------------------------


def _term_product(alpha: Exponent, f: TateSeries, beta: Exponent, g: TateSeries,
                  prime: int) -> Iterable[tuple[Exponent, TateSeries]]:
    """Expand (f * D^alpha) . (g * D^beta) into coefficient-left terms.

    Moving D^alpha past g uses the one commutation law valid for any integer
    power a of a single derivation:

        D^a g = sum_j C(a, j) * D^j(g) * D^(a-j)

    with generalized binomials; for a >= 0 the sum stops at j = a, and it
    always stops once the derivative of g vanishes (coefficients are
    polynomials).  Axes commute, so the law is applied axis by axis.
    """
    pending: list[tuple[TateSeries, PadicScalar, Exponent]] = [
        (g, PadicScalar.one(prime, DEFAULT_PRECISION), (0,) * len(alpha))]
    for i, a in enumerate(alpha):
        if a == 0:
            continue
        expanded = []
        for h, s, j in pending:
            dh = h
            jj = 0
            while True:
                factor = generalized_binomial(a, jj, prime)
                if not factor.is_zero and not dh.is_zero:
                    expanded.append((dh, s * factor, j[:i] + (jj,) + j[i + 1:]))
                jj += 1
                if 0 <= a < jj:
                    break
                dh = dh.derive(i + 1)
                if dh.is_zero:
                    break
        pending = expanded
    for h, s, j in pending:
        gamma = tuple(a + b - c for a, b, c in zip(alpha, beta, j))
        coeff = (f * h).scale(s)
        if not coeff.is_zero:
            yield gamma, coeff


def _window_cap_check(terms: dict, cap: int | None):
    if cap is None:
        return
    for a in terms:
        if any(abs(e) > cap for e in a):
            raise WindowOverflow(
                f"product exponent {a} exceeds the window cap {cap}")


def _product_terms(P: MicroOp, Q: MicroOp) -> dict[Exponent, TateSeries]:
    out: dict[Exponent, TateSeries] = {}
    for alpha, f in P.terms.items():
        for beta, g in Q.terms.items():
            for gamma, coeff in _term_product(alpha, f, beta, g, P.prime):
                prev = out.get(gamma)
                coeff = coeff if prev is None else prev + coeff
                if coeff.is_zero:
                    out.pop(gamma, None)
                else:
                    out[gamma] = coeff
    return out


def _product_tail(P: MicroOp, Q: MicroOp) -> TailCertificate | None:
    """Positive-sector certificate for a product of positive operators.

    Bounds the three sources of discarded mass: tail*tail, stored*tail and
    tail*stored.  Leibniz corrections never lower valuations (binomials are
    integers and derivations do not increase the Gauss norm) and never raise
    the output length above the sum of the factor lengths, so each source
    admits a linear bound in the output length.

    The start is the last length that tail mass provably cannot reach: a
    left-tail term of length n lands at length >= n - deg(Q coefficients)
    (differentiation in the commutation eats at most the coefficient degree)
    and a right-tail term of length n lands at length >= n.  Stored product
    terms beyond the start are only partial coefficients and are folded by
    the caller.
    """
    ta, tb = P.tail, Q.tail
    if ta is None and tb is None:
        return None

    def stored_floor(op: MicroOp, slope: Fraction) -> Fraction:
        vals = [Fraction(c.spectral_valuation()) - slope * length(a)
                for a, c in op.terms.items()]
        return min(vals) if vals else Fraction(0)

    def max_coeff_degree(op: MicroOp) -> int:
        return max((c.degree() for c in op.terms.values()), default=0)

    def min_length(op: MicroOp) -> int:
        return min((length(a) for a in op.terms), default=0)

    offsets = []
    slopes = []
    reach = []
    infinite = False
    if ta is not None and tb is not None:
        offsets.append(ta.t0 + tb.t0)
    if ta is not None:
        offsets.append(ta.t0 + stored_floor(Q, ta.t1))
        slopes.append(ta.t1)
        reach.append(ta.start + 1 + min_length(Q) - max_coeff_degree(Q))
        infinite = infinite or (ta.infinite and not Q.is_zero)
    if tb is not None:
        offsets.append(tb.t0 + stored_floor(P, tb.t1))
        slopes.append(tb.t1)
        reach.append(tb.start + 1)
        infinite = infinite or (tb.infinite and not P.is_zero)
    start = max(0, min(reach) - 1)
    return TailCertificate(start, min(offsets), min(slopes), infinite)


def compose(P: MicroOp, Q: MicroOp, window_cap: int | None = DEFAULT_WINDOW_CAP) -> "MicroOp":
    """Product of two positive operators (Laurent products: microop.mul)."""
    P._check_compatible(Q)
    if not (P.positive and Q.positive):
        raise ValueError("compose needs positive operators; use microop.mul")
    terms = _product_terms(P, Q)
    _window_cap_check(terms, window_cap)
    tail = _fold_beyond(terms, _product_tail(P, Q), positive_sector=True)
    return MicroOp(P.dim, P.prime, terms, tail)


# -- level norms and orders ---------------------------------------------------


def _require_positive(P: MicroOp, what: str):
    if not P.positive:
        raise ValueError(f"{what} is defined for positive operators")


def _stored_mu_data(P: MicroOp, mu: Fraction) -> tuple[Fraction, list[int]]:
    """Max stored exponent mu*|alpha| - v(c_alpha) and the lengths reaching it."""
    best: Fraction | None = None
    arg: list[int] = []
    for a, c in P.terms.items():
        e = mu * length(a) - c.spectral_valuation()
        if best is None or e > best:
            best, arg = e, [length(a)]
        elif e == best:
            arg.append(length(a))
    if best is None:
        raise ZeroOperator("zero operator has no order")
    return best, sorted(set(arg))


def _pos_tail_sup(P: MicroOp, mu: Fraction) -> Fraction | None:
    """Certified sup of tail exponents at weight mu; None when no tail."""
    if P.tail is None:
        return None
    t = P.tail
    sup = _sup_affine(mu - t.t1, -t.t0, t.start + 1)
    if sup is None:
        raise InsufficientTruncation(
            f"tail slope {t.t1} does not dominate the weight {mu}")
    return sup


def _mu_data(P: MicroOp, mu: Fraction) -> tuple[Fraction, list[int]]:
    """Certified (max exponent, argmax lengths) at weight mu, tails included."""
    best, arg = _stored_mu_data(P, mu)
    sup = _pos_tail_sup(P, mu)
    if sup is not None and sup >= best:
        raise InsufficientTruncation(
            f"tail bound p^{sup} reaches the stored max p^{best}; "
            "increase the truncation")
    return best, arg


def norm_k(P: MicroOp, k: int) -> Fraction:
    """Level-k norm of a positive operator, as an exact power of p.

    Returns 0 for the zero operator and raises InsufficientTruncation when
    the tail certificate cannot pin the max.
    """
    _require_positive(P, "norm_k")
    if k < 0:
        raise ValueError("level must be >= 0")
    if not P.terms:
        return Fraction(0)
    e, _ = _mu_data(P, Fraction(k))
    return Fraction(P.prime) ** e


def order_Nk(P: MicroOp, k: int) -> int:
    """Largest |alpha| whose coefficient achieves the level-k norm."""
    _require_positive(P, "order_Nk")
    _, arg = _mu_data(P, Fraction(k))
    return arg[-1]


def order_nk(P: MicroOp, k: int) -> int:
    """Smallest |alpha| whose coefficient achieves the level-k norm."""
    _require_positive(P, "order_nk")
    _, arg = _mu_data(P, Fraction(k))
    return arg[0]


def norm_mu(P: MicroOp, mu: Fraction | int) -> Fraction:
    """Exponent e with |P|_mu = p**e for a rational weight mu >= 0.

    Reported as an exponent because rational weights produce fractional
    powers of p.  Coincides with the level norm at integer mu.
    """
    _require_positive(P, "norm_mu")
    mu = Fraction(mu)
    if mu < 0:
        raise ValueError("weight must be >= 0")
    e, _ = _mu_data(P, mu)
    return e


def order_Nmu(P: MicroOp, mu: Fraction | int) -> int:
    _require_positive(P, "order_Nmu")
    _, arg = _mu_data(P, Fraction(mu))
    return arg[-1]


def order_nmu(P: MicroOp, mu: Fraction | int) -> int:
    _require_positive(P, "order_nmu")
    _, arg = _mu_data(P, Fraction(mu))
    return arg[0]


def quasi_abelian_defect(P: MicroOp, Q: MicroOp, k: int) -> Fraction:
    """|PQ - QP|_k / (|P|_k |Q|_k); always <= p**-k for k >= 1."""
    if k < 1:
        raise ValueError("the quasi-abelian bound needs k >= 1")
    np_, nq = norm_k(P, k), norm_k(Q, k)
    if np_ == 0 or nq == 0:
        raise DivisionByZero("defect against the zero operator")
    bracket = compose(P, Q) - compose(Q, P)
    return norm_k(bracket, k) / (np_ * nq)


def is_finite(P: MicroOp) -> bool:
    """True when nothing was discarded: the stored support is the operator."""
    return P.is_exact


def finite_order(P: MicroOp) -> int:
    if not is_finite(P):
        raise ValueError("finite_order needs an exact operator")
    if not P.terms:
        raise ZeroOperator("zero operator has no order")
    return P.max_length()
