"""Laurent operators: mixed products and the microlocal norms.

Negative derivation powers are adjoined by completing at chosen norms.  Two
families are computed here on the shared :class:`~microdiff.diffop.MicroOp`
representation:

* the single-level norm ``|S| = max |c_alpha| * p**(k*fl(alpha))`` of the
  one-norm localization, which stays multiplicative;
* the two-level norm ``||S|| = max |c_alpha| * p**weight(alpha, k, r)`` of
  the transition-compatible localization, where the weight charges the
  grading ``fl(alpha)`` with ``k`` on the non-negative sector and ``r`` on
  the negative one.  It is only sub-multiplicative, but multiplicative
  within a single sector.

Products of Laurent terms reduce to the same commutation law as positive
composition, with generalized binomials supplying the negative-power case;
with polynomial coefficients every expansion is finite, so exact operands
give exact products.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .diffop import (DEFAULT_WINDOW_CAP, Exponent, MicroOp, TailCertificate,
                     _fold_beyond, _product_terms, _sup_affine,
                     _window_cap_check, compose, floor_sum, length)
from .errors import InsufficientTruncation, ZeroOperator


@dataclass(frozen=True)
class LevelParams:
    """A pair of congruence levels k >= r >= 1."""

    k: int
    r: int

    def __post_init__(self):
        if not self.k >= self.r >= 1:
            raise ValueError(f"levels must satisfy k >= r >= 1, got (k={self.k}, r={self.r})")


def weight(alpha, k: int, r: int) -> int:
    """Mixed weight: k*fl(alpha) on the sector fl >= 0, r*fl(alpha) below."""
    LevelParams(k, r)
    fl = floor_sum(tuple(alpha))
    return k * fl if fl >= 0 else r * fl


# -- multiplication -----------------------------------------------------------


def mul(S: MicroOp, T: MicroOp, window: int | None = None,
        window_cap: int | None = DEFAULT_WINDOW_CAP) -> MicroOp:
    """Product of Laurent operators, exact within the requested window.

    ``window`` optionally clips the result to exponents with per-axis
    absolute value <= window; clipped terms are folded into tail
    certificates so later norm queries stay certified rather than silently
    wrong.  Truncated operands are supported in the positive sector (the
    composition path); mixed-sector truncated products have no sound
    certificate combination here and raise.
    """
    S._check_compatible(T)
    if not (S.is_exact and T.is_exact):
        if S.positive and T.positive:
            return _clip(compose(S, T, window_cap), window)
        raise InsufficientTruncation(
            "tail certificates cannot be combined across mixed sectors")
    terms = _product_terms(S, T)
    _window_cap_check(terms, window_cap)
    return _clip(MicroOp(S.dim, S.prime, terms), window)


def _clip(S: MicroOp, window: int | None) -> MicroOp:
    """Restrict to per-axis exponent bound, folding clipped terms into tails."""
    if window is None:
        return S
    terms = dict(S.terms)
    dropped = [a for a in terms if any(abs(e) > window for e in a)]
    tail, neg_tail = S.tail, S.neg_tail
    for sector_positive in (True, False):
        hit = [a for a in dropped if (floor_sum(a) >= 0) == sector_positive]
        if not hit:
            continue
        cert = tail if sector_positive else neg_tail
        start = min(length(a) for a in hit) - 1
        if cert is None:
            # clipped terms have exact valuations; a slope-0 bound suffices
            top = max(Fraction(terms[a].spectral_valuation()) for a in hit)
            cert = TailCertificate(start, top, Fraction(0))
        else:
            cert = TailCertificate(min(cert.start, start), cert.t0,
                                   min(cert.t1, Fraction(0)), cert.infinite)
        cert = _fold_beyond(terms, cert, sector_positive)
        if sector_positive:
            tail = cert
        else:
            neg_tail = cert
    return MicroOp(S.dim, S.prime, terms, tail, neg_tail)


# -- sector decomposition ----------------------------------------------------


def sector_split(S: MicroOp) -> tuple[MicroOp, MicroOp]:
    """Partition into the fl(alpha) >= 0 part and the fl(alpha) < 0 part."""
    pos = {a: c for a, c in S.terms.items() if floor_sum(a) >= 0}
    neg = {a: c for a, c in S.terms.items() if floor_sum(a) < 0}
    return (MicroOp(S.dim, S.prime, pos, tail=S.tail),
            MicroOp(S.dim, S.prime, neg, neg_tail=S.neg_tail))


# -- norms --------------------------------------------------------------------


def _stored_max(S: MicroOp, exponent) -> tuple[Fraction, list[Exponent]]:
    best: Fraction | None = None
    arg: list[Exponent] = []
    for a, c in S.terms.items():
        e = Fraction(exponent(a) - c.spectral_valuation())
        if best is None or e > best:
            best, arg = e, [a]
        elif e == best:
            arg.append(a)
    if best is None:
        raise ZeroOperator("zero operator")
    return best, arg


def _neg_sector_weight_top(dim: int, level: int, n: int) -> int:
    """Max of level*fl(alpha) over |alpha| = n, fl(alpha) < 0."""
    return -level * n if dim == 1 else -level


def tail_sup_exponent(S: MicroOp, k: int, r: int | None) -> Fraction | None:
    """Certified sup of discarded-term exponents under the (k, r) weights.

    ``r=None`` selects the single-level weight (k on both sectors).  Returns
    None when the operator is exact; raises when a certificate is too weak
    for the sup to be finite.
    """
    sups: list[Fraction] = []
    if S.tail is not None:
        t = S.tail
        # positive sector: max weight at length n is k*n
        s = _sup_affine(Fraction(k) - t.t1, -t.t0, t.start + 1)
        if s is None:
            raise InsufficientTruncation(
                f"positive tail slope {t.t1} does not dominate level {k}")
        sups.append(s)
    if S.neg_tail is not None:
        t = S.neg_tail
        lvl = k if r is None else r
        if S.dim == 1:
            s = _sup_affine(Fraction(-lvl) - t.t1, -t.t0, t.start + 1)
        else:
            s = _sup_affine(-t.t1, Fraction(-lvl) - t.t0, t.start + 1)
        if s is None:
            raise InsufficientTruncation(
                f"negative tail slope {t.t1} cannot certify the weight {lvl}")
        sups.append(s)
    return max(sups) if sups else None


def _certified_max(S: MicroOp, exponent, k: int, r: int | None
                   ) -> tuple[Fraction, list[Exponent]]:
    best, arg = _stored_max(S, exponent)
    sup = tail_sup_exponent(S, k, r)
    if sup is not None and sup >= best:
        raise InsufficientTruncation(
            f"tail bound p^{sup} reaches the stored max p^{best}")
    return best, arg


def norm_Ek(S: MicroOp, k: int) -> Fraction:
    """Multiplicative single-level norm, as an exact power of p."""
    if k < 1:
        raise ValueError("microlocal levels need k >= 1")
    if not S.terms:
        return Fraction(0)
    e, _ = _certified_max(S, lambda a: k * floor_sum(a), k, None)
    return Fraction(S.prime) ** e


def order_Ek(S: MicroOp, k: int) -> int:
    """Largest grading fl(alpha) among coefficients achieving the norm."""
    if k < 1:
        raise ValueError("microlocal levels need k >= 1")
    _, arg = _certified_max(S, lambda a: k * floor_sum(a), k, None)
    return max(floor_sum(a) for a in arg)


def norm_Fkr(S: MicroOp, k: int, r: int) -> Fraction:
    """Sub-multiplicative two-level norm, as an exact power of p."""
    LevelParams(k, r)
    if not S.terms:
        return Fraction(0)
    e, _ = _certified_max(S, lambda a: weight(a, k, r), k, r)
    return Fraction(S.prime) ** e


def sector_norms(S: MicroOp, k: int, r: int) -> tuple[Fraction, Fraction]:
    """Norms of the two sector parts; their max is the full norm."""
    pos, neg = sector_split(S)
    return (norm_Fkr(pos, k, r) if pos.terms or pos.tail else Fraction(0),
            norm_Fkr(neg, k, r) if neg.terms or neg.neg_tail else Fraction(0))
