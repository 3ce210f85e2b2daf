"""Closed-form upper bounds on d(t, v) and the binomial estimates behind
them.

Everything is evaluated with natural logs and converted at the end.
Conventions: ``0 * log 0 = 0`` and ``0 ** 0 = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import CAParams, multinomial_I_size

LN2 = math.log(2.0)

METHODS = ("LLL-classic", "EC-general", "EC-t2", "EC-t3", "EC-optimized")


@dataclass(frozen=True)
class BoundResult:
    value: float
    method: str
    t: int
    v: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not self.value > 0:
            raise ValueError("bound must be positive")


@dataclass(frozen=True)
class BinomialEstimate:
    m: int
    v: int
    log_lower: float
    log_upper: float
    l: float
    u: float

    @property
    def lower(self) -> float:
        return math.exp(self.log_lower)

    @property
    def upper(self) -> float:
        return math.exp(self.log_upper)

    def brackets(self, value: int) -> bool:
        """Strict bracket test done in log space (``value`` may be huge)."""
        lv = math.log(value)
        return self.log_lower < lv < self.log_upper


def xlogx(x: float) -> float:
    """``x ln x`` with ``0 ln 0 = 0``."""
    if x < 0:
        raise ValueError(f"negative argument {x}")
    return 0.0 if x == 0 else x * math.log(x)


def entropy_h(x: float) -> float:
    """Binary entropy in bits."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"entropy argument {x} outside [0, 1]")
    return -(xlogx(x) + xlogx(1.0 - x)) / LN2


def log_l(v: int) -> float:
    return 15 / 16 - 0.5 * math.log(2 * math.pi) + (v - 1) * math.log((v - 1) / v)


def log_u(v: int) -> float:
    return -0.5 * math.log(2 * math.pi) + 0.5 * math.log(v / (v - 1))


def l_factor(v: int) -> float:
    return math.exp(log_l(v))


def u_factor(v: int) -> float:
    return math.exp(log_u(v))


def log_central_ratio(v: int) -> float:
    """``ln(v^v / (v-1)^(v-1))``."""
    return xlogx(v) - xlogx(v - 1)


def binom_bounds(m: int, v: int) -> BinomialEstimate:
    """Lower/upper estimates of C(mv, m), valid for m, v >= 2."""
    if m < 2 or v < 2:
        raise ValueError("binomial estimates need m >= 2 and v >= 2")
    core = -0.5 * math.log(m) + m * log_central_ratio(v)
    return BinomialEstimate(m, v, log_l(v) + core, log_u(v) + core, l_factor(v), u_factor(v))


def q_value(x: float, C1: float, t: int) -> float:
    return (1.0 + C1 * x**t) / x


def q_min(C1: float, t: int) -> float:
    """``inf_{0 < x <= 1} (1 + C1 x^t) / x``."""
    if C1 <= 1:
        raise ValueError("C1 must exceed 1")
    if t < 2:
        raise ValueError("t must be >= 2")
    x_star = ((t - 1) * C1) ** (-1.0 / t)
    if x_star > 1.0:
        return 1.0 + C1
    return t / (t - 1) * (t - 1) ** (1.0 / t) * C1 ** (1.0 / t)


def q_argmin(C1: float, t: int) -> float:
    return min(1.0, ((t - 1) * C1) ** (-1.0 / t))


def existence_predicate(params: CAParams, C1) -> bool:
    """Sufficient condition for a balanced CA with these parameters:
    ``(t/(t-1))^t (t-1) C1 < |I|^t``.

    Compared exactly (``C1`` is converted with :class:`fractions.Fraction`)
    so the threshold itself is decided correctly.
    """
    if C1 <= 0:
        raise ValueError("C1 must be positive")
    t = params.t
    lhs = Fraction(t, t - 1) ** t * (t - 1) * Fraction(C1)
    return lhs < multinomial_I_size(params.m, params.v) ** t


def _check_tv(t: int, v: int) -> None:
    if t < 2 or v < 2:
        raise ValueError("need t >= 2 and v >= 2")


def d_bound_lll_classic(t: int, v: int) -> BoundResult:
    _check_tv(t, v)
    denom = -math.log1p(-float(v) ** -t) / LN2
    return BoundResult((t - 1) / denom, "LLL-classic", t, v)


def d_bound_ec_general(t: int, v: int) -> BoundResult:
    _check_tv(t, v)
    denom = -math.log1p(-float(v) ** -(t - 1)) / LN2
    return BoundResult(v * (t - 1) / denom, "EC-general", t, v)


def d_bound_t2(v: int) -> BoundResult:
    if v < 2:
        raise ValueError("need v >= 2")
    if v == 2:
        return BoundResult(1.0, "EC-t2", 2, 2, {"exact": True})
    log_arg = xlogx(v) + xlogx(v - 2) - 2 * xlogx(v - 1)
    return BoundResult(v * LN2 / log_arg, "EC-t2", 2, v)


def xi(v: int) -> float:
    """Maximizer of the single free variable of f_{3,v}."""
    return 0.5 * (1 + v - math.sqrt(v * v + 2 * v - 3))


def d_bound_t3(v: int) -> BoundResult:
    """d(3, v) bound: f_{3,v} evaluated at (1, xi) in product form, then
    the general f0 quotient.

    The printed single-expression closed form has ``(v-2-xi)`` where the
    function itself has ``(v-2+xi)``; the former is negative at v=2, so
    the function form is used.
    """
    from .optimizer import d_bound_from_f0, f_product_form

    if v < 2:
        raise ValueError("need v >= 2")
    x2 = xi(v)
    f0 = f_product_form(3, v, (1.0, x2))
    res = d_bound_from_f0(3, v, f0)
    return BoundResult(res.value, "EC-t3", 3, v, {"xi": x2, "f0": f0})


def known_d2(v: int) -> float:
    """Known value d(2, v) = v / 2; a reference constant only."""
    return v / 2


def juxtaposition_d2(v: int) -> int:
    """d(2, v) <= C(v, 2) from stacking binary strength-2 arrays."""
    return math.comb(v, 2)


def table1_bound(t: int, v: int, f0: Optional[float] = None) -> BoundResult:
    """The best bound of this package for (t, v): closed forms for t <= 3,
    the optimizer otherwise."""
    if t == 2:
        return d_bound_t2(v)
    if t == 3:
        return d_bound_t3(v)
    from .optimizer import d_bound_from_f0, f0_value

    return d_bound_from_f0(t, v, f0_value(t, v) if f0 is None else f0)
