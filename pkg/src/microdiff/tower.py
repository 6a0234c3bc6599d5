"""Unit tests and explicit inversion across the ring tower.

Six ring levels share one operator representation; what changes is which
weighted inequalities the coefficients must satisfy:

* ``dkq(k)``: positive operators with the level-k norm.  Units are the
  order-zero operators with invertible constant coefficient.
* ``ek(k)``: the one-norm localization.  Units have a unique coefficient of
  maximal level-k weighted norm, and that coefficient is a unit function.
* ``fkr(k, r)``: the transition-compatible localization.  Units are the
  operators whose recentred series contracts in the (k, r) norm; for a
  candidate exponent beta that is the family of strict inequalities
  ``weight(alpha - beta, k, r) - v(c_alpha) + v(c_beta) < 0``, which for a
  positive operator is exactly: unique level-k maximum at beta, and
  ``|c_alpha| < |c_beta| * p**(r(|beta| - |alpha|))`` below the top.
* ``fir(r)``: the projective limit over k >= r.  Units are the finite
  operators passing the fkr inequalities for every k, i.e. the r-family
  above plus strict top-order dominance and a unit top coefficient.
* ``finf``: the union over r.  Units are the finite operators with a
  dominant unit top coefficient (unique max-norm coefficient at top order).
* ``dinf``: no localization at all.  Units are the unit functions.

Verdicts carry machine-checkable witnesses: the dominant exponent for a
unit, or the violated clause and offending exponent for a non-unit.
Inversion recentres around the dominant monomial and sums the geometric
series to the certified residual target, then multiplies back to verify.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import newton
from .diffop import (DEFAULT_WINDOW_CAP, Exponent, MicroOp, floor_sum,
                     is_finite, length)
from .errors import (InsufficientTruncation, NotInvertible,
                     UndecidableFiniteness, ZeroOperator)
from .microop import _stored_max, mul, tail_sup_exponent, weight
from .tate import TateSeries

_TAGS = ("dkq", "ek", "fkr", "fir", "finf", "dinf")


@dataclass(frozen=True)
class RingLevel:
    """Coordinate in the tower: tag plus the levels the tag needs."""

    tag: str
    k: int | None = None
    r: int | None = None

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise ValueError(f"unknown ring level {self.tag!r}")
        if self.tag == "dkq" and not (self.k is not None and self.k >= 0):
            raise ValueError("dkq needs k >= 0")
        if self.tag == "ek" and not (self.k is not None and self.k >= 1):
            raise ValueError("ek needs k >= 1")
        if self.tag == "fkr":
            if self.k is None or self.r is None or not self.k >= self.r >= 1:
                raise ValueError("fkr needs k >= r >= 1")
        if self.tag == "fir" and not (self.r is not None and self.r >= 1):
            raise ValueError("fir needs r >= 1")

    @classmethod
    def dkq(cls, k: int) -> "RingLevel":
        return cls("dkq", k=k)

    @classmethod
    def ek(cls, k: int) -> "RingLevel":
        return cls("ek", k=k)

    @classmethod
    def fkr(cls, k: int, r: int) -> "RingLevel":
        return cls("fkr", k=k, r=r)

    @classmethod
    def fir(cls, r: int) -> "RingLevel":
        return cls("fir", r=r)

    @classmethod
    def finf(cls) -> "RingLevel":
        return cls("finf")

    @classmethod
    def dinf(cls) -> "RingLevel":
        return cls("dinf")

    def __str__(self):
        if self.tag == "fkr":
            return f"fkr(k={self.k}, r={self.r})"
        if self.tag in ("dkq", "ek"):
            return f"{self.tag}(k={self.k})"
        if self.tag == "fir":
            return f"fir(r={self.r})"
        return self.tag


@dataclass(frozen=True)
class UnitVerdict:
    """Outcome of a unit test with its witness.

    For a unit: ``beta`` is the dominant exponent and ``delegate`` the
    concrete finite level (k, r) at which limit-level inverses are realized.
    For a non-unit: ``violated`` names the failed clause and ``alpha`` the
    offending exponent when one exists.
    """

    invertible: bool
    level: RingLevel
    beta: Exponent | None = None
    violated: str | None = None
    alpha: Exponent | None = None
    delegate: tuple[int, int] | None = None


class _Unknown:
    def __repr__(self):
        return "<uncertified>"


_UNCERTIFIED = _Unknown()


def _tail_sup_or_unknown(P: MicroOp, k: int, r: int | None):
    """Tail sup at the level weights; None = exact, _UNCERTIFIED = hopeless."""
    if P.is_exact:
        return None
    try:
        return tail_sup_exponent(P, k, r)
    except InsufficientTruncation:
        return _UNCERTIFIED


def _is_unit_coeff(c: TateSeries) -> bool:
    return c.is_unit()


def _raise_uncertified(level: RingLevel):
    raise InsufficientTruncation(
        f"tail mass can reach the stored maximum; the {level} verdict "
        "needs a larger truncation")


def _ek_style_verdict(P: MicroOp, level: RingLevel, k: int,
                      want_order_zero: bool) -> UnitVerdict:
    """Shared dkq / ek logic: unique weighted argmax with a unit coefficient.

    False verdicts from stored violations remain valid as long as the tail
    cannot exceed the stored maximum (extra max-achievers only grow the
    argmax set); true verdicts need the tail strictly below it.
    """
    if not P.terms:
        raise ZeroOperator("the zero operator is not a unit anywhere")
    best, arg = _stored_max(P, lambda a: k * floor_sum(a))
    sup = _tail_sup_or_unknown(P, k, None)
    tail_lt = sup is None or (sup is not _UNCERTIFIED and sup < best)
    tail_le = sup is None or (sup is not _UNCERTIFIED and sup <= best)
    zero = (0,) * P.dim
    if want_order_zero and any(a != zero for a in arg):
        offender = max(arg, key=length)
        if not tail_le:
            _raise_uncertified(level)
        return UnitVerdict(False, level, violated="order_positive", alpha=offender)
    if len(arg) > 1:
        if not tail_le:
            _raise_uncertified(level)
        return UnitVerdict(False, level, violated="max_coefficient_not_unique",
                           alpha=sorted(arg)[-1])
    beta = arg[0]
    if not _is_unit_coeff(P.terms[beta]):
        if not tail_le:
            _raise_uncertified(level)
        clause = ("constant_not_unit" if want_order_zero
                  else "max_coefficient_not_unit")
        return UnitVerdict(False, level, violated=clause, alpha=beta)
    if not tail_lt:
        _raise_uncertified(level)
    return UnitVerdict(True, level, beta=beta)


def _ratio_tail_sup(P: MicroOp, beta: Exponent, k: int, r: int) -> Fraction | None:
    """Certified sup over discarded alpha of
    ``weight(alpha - beta, k, r) - v_bound(alpha)``.

    None when the operator is exact; raises when a tail slope cannot
    dominate the weights.  The positive sector maximizes the grading at
    fl(alpha) = n, the negative one at -1 (or -n when d = 1).
    """
    if P.is_exact:
        return None

    def w(m: int) -> int:
        return k * m if m >= 0 else r * m

    def sup_affine(slope: Fraction, offset: Fraction, n0: int) -> Fraction:
        if slope > 0:
            raise InsufficientTruncation(
                "tail slope cannot dominate the recentred weights")
        return slope * n0 + offset

    flb = floor_sum(beta)
    sups: list[Fraction] = []
    if P.tail is not None:
        t = P.tail
        n0 = t.start + 1
        pieces = [sup_affine(Fraction(k) - t.t1, Fraction(-k * flb) - t.t0,
                             max(n0, flb))]
        if n0 < flb:
            # below the breakpoint the recentred grading is negative
            for n in (n0, flb - 1):
                pieces.append(Fraction(r * (n - flb)) - t.bound_at(n))
        sups.append(max(pieces))
    if P.neg_tail is not None:
        t = P.neg_tail
        n0 = t.start + 1
        if P.dim >= 2:
            sups.append(sup_affine(-t.t1, Fraction(w(-1 - flb)) - t.t0, n0))
        else:
            pieces = [sup_affine(Fraction(-r) - t.t1, Fraction(-r * flb) - t.t0,
                                 max(n0, -flb))]
            if n0 < -flb:
                for n in (n0, -flb - 1):
                    pieces.append(Fraction(k * (-n - flb)) - t.bound_at(n))
            sups.append(max(pieces))
    return max(sups)


def _fkr_ratio(P: MicroOp, alpha: Exponent, beta: Exponent, k: int, r: int) -> Fraction:
    """Exponent of the alpha-term of the series recentred at beta."""
    diff = tuple(x - y for x, y in zip(alpha, beta))
    return Fraction(weight(diff, k, r)
                    - P.terms[alpha].spectral_valuation()
                    + P.terms[beta].spectral_valuation())


def _fkr_verdict(P: MicroOp, level: RingLevel, k: int, r: int) -> UnitVerdict:
    if not P.terms:
        raise ZeroOperator("the zero operator is not a unit anywhere")
    candidates = [b for b in P.terms if _is_unit_coeff(P.terms[b])]
    for beta in sorted(candidates):
        if all(_fkr_ratio(P, a, beta, k, r) < 0 for a in P.terms if a != beta):
            try:
                sup = _ratio_tail_sup(P, beta, k, r)
            except InsufficientTruncation:
                _raise_uncertified(level)
            v_beta = P.terms[beta].spectral_valuation()
            if sup is not None and sup + v_beta >= 0:
                _raise_uncertified(level)
            return UnitVerdict(True, level, beta=beta)
    # no candidate contracts; derive the natural witness from level-k data
    best, arg = _stored_max(P, lambda a: k * floor_sum(a))
    sup = _tail_sup_or_unknown(P, k, None)
    if not (sup is None or (sup is not _UNCERTIFIED and sup <= best)):
        _raise_uncertified(level)
    if len(arg) > 1:
        return UnitVerdict(False, level, violated="max_coefficient_not_unique",
                           alpha=sorted(arg)[-1])
    beta = arg[0]
    if not _is_unit_coeff(P.terms[beta]):
        return UnitVerdict(False, level, violated="max_coefficient_not_unit",
                           alpha=beta)
    offender = next(a for a in sorted(P.terms)
                    if a != beta and _fkr_ratio(P, a, beta, k, r) >= 0)
    return UnitVerdict(False, level, violated="lower_order_too_large",
                       alpha=offender)


def _delegate_levels(P: MicroOp, beta: Exponent, r: int) -> tuple[int, int]:
    """Smallest (k, r) with slack at which the finite-level inverse exists.

    k must make beta the unique level-k maximum: above the top order the
    support is empty, at the top order strict valuation dominance holds
    already, and below it k > (v(c_beta) - v(c_alpha)) / (|beta| - |alpha|)
    suffices.
    """
    v_beta = P.terms[beta].spectral_valuation()
    k = max(r, 1)
    for a, c in P.terms.items():
        if a == beta or length(a) == length(beta):
            continue
        gap = Fraction(v_beta - c.spectral_valuation(), length(beta) - length(a))
        k = max(k, int(gap) + 1)
    return k, r


def _fir_r_bound(P: MicroOp, beta: Exponent) -> int | None:
    """Smallest r making the below-top inequalities strict; None if blocked."""
    q = length(beta)
    v_beta = P.terms[beta].spectral_valuation()
    r = 1
    for a, c in P.terms.items():
        if a == beta:
            continue
        if length(a) == q:
            if c.spectral_valuation() <= v_beta:
                return None
            continue
        gap = Fraction(v_beta - c.spectral_valuation(), q - length(a))
        r = max(r, int(gap) + 1)
    return r


def _limit_verdict(P: MicroOp, level: RingLevel) -> UnitVerdict:
    """fir / finf / dinf: finiteness first, then coefficient inequalities."""
    if not P.terms and P.is_exact:
        raise ZeroOperator("the zero operator is not a unit anywhere")
    if not is_finite(P):
        cert = P.tail or P.neg_tail
        if cert is not None and cert.infinite:
            return UnitVerdict(False, level, violated="not_finite")
        if level.tag == "fir":
            # a certified slope at or above r rules the unit out even
            # without deciding finiteness
            try:
                if newton.slope_in_interval(P, level.r, max(level.r, _last_slope(P))):
                    return UnitVerdict(False, level, violated="slope_in_interval")
            except InsufficientTruncation:
                pass
        raise UndecidableFiniteness(
            "truncated data with no exactness or infinite-support witness")
    q = max(length(a) for a in P.terms)
    top = [a for a in P.terms if length(a) == q]
    if level.tag == "dinf":
        zero = (0,) * P.dim
        if q > 0:
            return UnitVerdict(False, level, violated="order_positive",
                               alpha=max(top))
        if not _is_unit_coeff(P.terms[zero]):
            return UnitVerdict(False, level, violated="constant_not_unit",
                               alpha=zero)
        return UnitVerdict(True, level, beta=zero, delegate=(1, 1))
    # dominant top coefficient: strictly maximal norm among the top order
    beta = min(top, key=lambda a: (P.terms[a].spectral_valuation(), a))
    v_beta = P.terms[beta].spectral_valuation()
    ties = [a for a in top if a != beta
            and P.terms[a].spectral_valuation() <= v_beta]
    if ties:
        return UnitVerdict(False, level, violated="top_order_not_dominated",
                           alpha=sorted(ties)[-1])
    if not _is_unit_coeff(P.terms[beta]):
        return UnitVerdict(False, level, violated="dominant_not_unit", alpha=beta)
    if level.tag == "finf":
        r = _fir_r_bound(P, beta)
        return UnitVerdict(True, level, beta=beta,
                           delegate=_delegate_levels(P, beta, r))
    # fir(r): the r-weighted inequalities below the top must already hold
    r = level.r
    for a in sorted(P.terms):
        if a == beta or length(a) == q:
            continue
        if (P.terms[a].spectral_valuation()
                <= v_beta - r * (q - length(a))):
            return UnitVerdict(False, level, violated="lower_order_too_large",
                               alpha=a)
    return UnitVerdict(True, level, beta=beta,
                       delegate=_delegate_levels(P, beta, r))


def _last_slope(P: MicroOp) -> Fraction:
    poly = newton.polygon(P)
    return poly.slopes[-1] if poly.slopes else Fraction(0)


def check_unit(P: MicroOp, level: RingLevel) -> UnitVerdict:
    """Decide invertibility of P at the given ring level, with witness."""
    if level.tag in ("dkq", "fir", "finf", "dinf") and not P.positive:
        raise ValueError(f"{level} applies to positive operators")
    if level.tag == "dkq":
        return _ek_style_verdict(P, level, level.k, want_order_zero=True)
    if level.tag == "ek":
        return _ek_style_verdict(P, level, level.k, want_order_zero=False)
    if level.tag == "fkr":
        return _fkr_verdict(P, level, level.k, level.r)
    return _limit_verdict(P, level)


def slope_criterion_check(P: MicroOp, r: int, k: int) -> bool:
    """True iff no Newton slope lies in [r, k].

    Invertibility at fkr(k, r) implies this: a slope in the window would
    make the weighted maximum non-unique at that weight, contradicting the
    contraction inequalities.
    """
    return not newton.slope_in_interval(P, r, k)


@dataclass(frozen=True)
class Classification:
    kind: str  # 'finite' | 'infinite' | 'unknown'
    order: int | None = None


def classify_surconvergent(P: MicroOp) -> Classification:
    """Finite(q) for exact data, Infinite with a witness, else Unknown."""
    if P.is_exact:
        return Classification("finite", max((length(a) for a in P.terms), default=0))
    for cert in (P.tail, P.neg_tail):
        if cert is not None and cert.infinite:
            return Classification("infinite")
    return Classification("unknown")


# -- explicit inversion --------------------------------------------------------


def _level_weight_fn(level: RingLevel):
    if level.tag == "fkr":
        return lambda m: weight(m, level.k, level.r)
    k = level.k
    return lambda m: k * floor_sum(m)


def _level_norm(S: MicroOp, level: RingLevel) -> Fraction:
    from . import microop
    if level.tag == "fkr":
        return microop.norm_Fkr(S, level.k, level.r)
    if level.tag == "ek":
        return microop.norm_Ek(S, level.k)
    from . import diffop
    return diffop.norm_k(S, level.k)


def invert(P: MicroOp, level: RingLevel, window_cap: int = DEFAULT_WINDOW_CAP,
           residual_exponent: int = 20) -> MicroOp:
    """Explicit inverse with certified residual ||P * S - 1|| <= p**-target.

    Writes P = c_beta (1 + R) D^beta around the dominant monomial; the
    geometric series for (1 + R)^{-1} is summed until the contraction ratio
    pushes the residual below the target, and the result is multiplied back
    to verify.  Limit levels delegate to the concrete (k, r) in the verdict.
    """
    verdict = check_unit(P, level)
    if not verdict.invertible:
        raise NotInvertible(f"not a unit at {level}: {verdict.violated}")
    if level.tag in ("fir", "finf", "dinf"):
        k, r = verdict.delegate
        return invert(P, RingLevel.fkr(k, r), window_cap, residual_exponent)
    beta = verdict.beta
    k = level.k
    r = level.r if level.tag == "fkr" else None
    wfn = _level_weight_fn(level)
    c_beta = P.terms[beta]
    c_beta_inv = c_beta.invert_unit()
    r_terms = {}
    ratios = []
    for a, c in P.terms.items():
        if a == beta:
            continue
        diff = tuple(x - y for x, y in zip(a, beta))
        coeff = c * c_beta_inv
        r_terms[diff] = coeff
        ratios.append(Fraction(wfn(diff)) + c_beta.spectral_valuation()
                      - c.spectral_valuation())
    if P.tail is not None or P.neg_tail is not None:
        sup = _ratio_tail_sup(P, beta, k, r if r is not None else k)
        if sup is not None:
            ratios.append(sup + Fraction(c_beta.spectral_valuation()))
    inv_mono = MicroOp.monomial(tuple(-b for b in beta), 1, P.dim, P.prime)
    tail_inv = MicroOp.constant(c_beta_inv, P.dim, P.prime)
    if not ratios:
        # monomial with unit coefficient: the inverse is exact
        return mul(inv_mono, tail_inv, window_cap=window_cap)
    R = MicroOp(P.dim, P.prime, r_terms)
    rho = max(ratios)
    if rho >= 0:
        raise NotInvertible("recentred series does not contract")
    # smallest J with (J + 1) * (-rho) >= target, so the dropped tail of the
    # geometric series already sits below the residual target
    target = Fraction(residual_exponent)
    J = math.ceil(target / -rho) - 1
    series = MicroOp.identity(P.dim, P.prime)
    power = MicroOp.identity(P.dim, P.prime)
    minus_R = -R
    for _ in range(J):
        power = mul(power, minus_R, window_cap=window_cap)
        if not power.terms:
            break
        series = series + power
    result = mul(mul(inv_mono, series, window_cap=window_cap), tail_inv,
                 window_cap=window_cap)
    _verify_residual(P, result, level, residual_exponent, window_cap)
    return result


def _verify_residual(P: MicroOp, S: MicroOp, level: RingLevel,
                     residual_exponent: int, window_cap: int):
    # verification multiplies back exactly; the window cap binds only the
    # inverse itself, not this internal product
    stored = MicroOp(P.dim, P.prime, dict(P.terms))
    res = mul(stored, S, window_cap=None) - MicroOp.identity(P.dim, P.prime)
    bound = Fraction(1, P.prime ** residual_exponent)
    measured = _level_norm(res, level) if res.terms else Fraction(0)
    if P.tail is not None or P.neg_tail is not None:
        # discarded mass of P also multiplies S
        sup = tail_sup_exponent(P, level.k,
                                level.r if level.tag == "fkr" else None)
        s_norm = _level_norm(S, level)
        if sup is not None:
            measured = max(measured, Fraction(P.prime) ** sup * s_norm)
    if measured > bound:
        raise InsufficientTruncation(
            f"residual p-norm {measured} exceeds the target {bound}")
