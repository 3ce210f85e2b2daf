"""Concrete array sizes from the existence inequalities.

For given (t, k, v) the smallest multiplicity m is found for which the
right-hand side of either inequality drops below 1; then a balanced
CA(mv; t, k, v) exists.  Both right-hand sides have the shape
``exp(A + a ln m + m ln c)`` with ``a > 0`` and ``c < 1``, which is
log-concave in m: increasing up to ``-a / ln c`` and decreasing after.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np

from .bounds import LN2, log_central_ratio, log_l
from .core import PartialArray, verify_ca

ROUTES = ("general", "optimized")
M_FLOOR = 2


class VacuousBound(ValueError):
    """The exponential base is >= 1, so no m makes the bound drop below 1."""


def _prefactor_log(t: int) -> float:
    """``ln((t/(t-1))^t (t-1))``."""
    return t * math.log(t / (t - 1)) + math.log(t - 1)


def log_M(v: int, t: int) -> float:
    return _prefactor_log(t) + t * math.log(v) + (1 - t) * sum(log_l(i) for i in range(2, v + 1))


@dataclass(frozen=True)
class _LogForm:
    """``ln rhs(m) = const + a ln m + m ln_c``."""

    const: float
    a: float
    ln_c: float

    def __call__(self, m: int) -> float:
        return self.const + self.a * math.log(m) + m * self.ln_c


def _general_form(t: int, k: int, v: int) -> _LogForm:
    ln_c = math.log1p(-float(v) ** -(t - 1))
    return _LogForm(log_M(v, t) + (t - 1) * math.log(k), (v - 1) * (t - 1) / 2, ln_c)


def _optimized_form(t: int, k: int, v: int, f0: float) -> _LogForm:
    ln_c = f0 * LN2 - (t - 1) * log_central_ratio(v)
    if ln_c >= 0:
        raise VacuousBound(f"2^f0 / (v^v/(v-1)^(v-1))^(t-1) >= 1 for t={t}, v={v}")
    const = _prefactor_log(t) - (t - 1) * log_l(v) + (t - 1) * math.log(k)
    return _LogForm(const, (t - 1) / 2, ln_c)


def _check_m(m: int) -> None:
    if m < M_FLOOR:
        raise ValueError(f"m must be >= {M_FLOOR}")


def log_rhs_general(t: int, k: int, v: int, m: int) -> float:
    _check_m(m)
    return _general_form(t, k, v)(m)


def rhs_general(t: int, k: int, v: int, m: int) -> float:
    """``M(v,t) k^(t-1) m^((v-1)(t-1)/2) ((v^(t-1)-1)/v^(t-1))^m``."""
    return math.exp(log_rhs_general(t, k, v, m))


def log_rhs_optimized(t: int, k: int, v: int, m: int, f0: float) -> float:
    _check_m(m)
    return _optimized_form(t, k, v, f0)(m)


def rhs_optimized(t: int, k: int, v: int, m: int, f0: float) -> float:
    return math.exp(log_rhs_optimized(t, k, v, m, f0))


@dataclass(frozen=True)
class Prediction:
    t: int
    k: int
    v: int
    route: str
    m: int
    log_rhs_at_m: float
    log_rhs_at_m_minus_1: Optional[float]

    @property
    def N(self) -> int:
        return self.m * self.v

    @property
    def rhs_at_m(self) -> float:
        return math.exp(self.log_rhs_at_m)

    @property
    def rhs_at_m_minus_1(self) -> Optional[float]:
        if self.log_rhs_at_m_minus_1 is None:
            return None
        return math.exp(min(self.log_rhs_at_m_minus_1, 700.0))

    def certified(self) -> bool:
        prev = self.log_rhs_at_m_minus_1
        return self.log_rhs_at_m < 0 and (prev is None or prev >= 0)


def _form(t: int, k: int, v: int, route: str, f0: Optional[float]) -> _LogForm:
    if route == "general":
        return _general_form(t, k, v)
    if route == "optimized":
        if f0 is None:
            from .optimizer import f0_value
            f0 = f0_value(t, v)
        return _optimized_form(t, k, v, f0)
    raise ValueError(f"route must be one of {ROUTES}")


def smallest_m(t: int, k: int, v: int, route: str = "optimized",
               f0: Optional[float] = None) -> Prediction:
    """Smallest m >= 2 with rhs(m) < 1, certified by rhs(m-1) >= 1."""
    if k < t:
        raise ValueError("need k >= t")
    form = _form(t, k, v, route, f0)
    if form(M_FLOOR) < 0:
        m = M_FLOOR
    else:
        # rhs >= rhs(2) >= 1 up to the peak; it only decreases afterwards
        lo = max(M_FLOOR, math.floor(-form.a / form.ln_c))
        hi = max(lo + 1, 2 * lo)
        while form(hi) >= 0:
            lo, hi = hi, 2 * hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if form(mid) < 0:
                hi = mid
            else:
                lo = mid
        m = hi
    prev = form(m - 1) if m - 1 >= M_FLOOR else None
    pred = Prediction(t, k, v, route, m, form(m), prev)
    if not pred.certified():
        raise AssertionError(f"certificate failed for {pred}")
    return pred


def figure_curve(t: int, v: int, ks: Sequence[int], route: str = "optimized",
                 f0: Optional[float] = None) -> list[tuple[int, int]]:
    """(k, N) pairs, N = v * smallest m, for ascending k."""
    ks = list(ks)
    if any(b < a for a, b in zip(ks, ks[1:])):
        raise ValueError("k values must be ascending")
    if route == "optimized" and f0 is None:
        from .optimizer import f0_value
        f0 = f0_value(t, v)
    return [(k, smallest_m(t, k, v, route, f0).N) for k in ks]


def k_range(text: str) -> list[int]:
    """Parse ``start:stop[:log|lin[:count]]`` into ascending distinct ints.

    ``log`` gives roughly 10 points per decade by default; ``lin`` steps
    by one unless a count is given.
    """
    parts = text.split(":")
    if len(parts) < 2:
        raise ValueError("k range must look like start:stop[:log|lin[:count]]")
    start, stop = int(float(parts[0])), int(float(parts[1]))
    if start < 1 or stop < start:
        raise ValueError("k range needs 1 <= start <= stop")
    kind = parts[2] if len(parts) > 2 else "lin"
    count = int(parts[3]) if len(parts) > 3 else None
    if kind == "log":
        if count is None:
            count = max(2, int(round(10 * math.log10(stop / start))) + 1)
        vals = np.geomspace(start, stop, count)
    elif kind == "lin":
        if count is None:
            return list(range(start, stop + 1))
        vals = np.linspace(start, stop, count)
    else:
        raise ValueError(f"unknown spacing {kind!r}")
    return sorted({int(round(x)) for x in vals})


def curve_csv(rows: Iterable[tuple[int, int]], route: str, t: int, v: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "N", "route", "t", "v"])
    for k, n in rows:
        w.writerow([k, n, route, t, v])
    return buf.getvalue()


# -- strength-2 juxtaposition ----------------------------------------------

def binary_t2_size(k: int) -> int:
    """Smallest N with ``k <= C(N-1, ceil(N/2))``."""
    n = 2
    while math.comb(n - 1, (n + 1) // 2) < k:
        n += 1
    return n


def binary_t2_array(k: int) -> list[tuple[int, ...]]:
    """k columns of a binary strength-2 covering array: first row 0 and
    exactly ceil(N/2) ones among the remaining rows."""
    n = binary_t2_size(k)
    w = (n + 1) // 2
    cols = []
    for ones in combinations(range(n - 1, 0, -1), w):
        col = [0] * n
        for r in ones:
            col[r] = 1
        cols.append(tuple(col))
        if len(cols) == k:
            break
    return cols


def juxtapose_t2(v: int, k: int) -> PartialArray:
    """Strength-2 array over v symbols: one relabelled copy of the binary
    array per symbol pair {a < b} (0 -> a, 1 -> b), stacked vertically."""
    if v < 2 or k < 2:
        raise ValueError("need v >= 2 and k >= 2")
    base = binary_t2_array(k)
    cols = [[] for _ in range(k)]
    for a, b in combinations(range(v), 2):
        for c, col in enumerate(base):
            cols[c].extend(b if x else a for x in col)
    A = PartialArray.from_columns(2, v, cols)
    report = verify_ca(A)
    if not report.valid:
        raise AssertionError(f"juxtaposed array is not a covering array: {report.summary()}")
    return A


# -- best-known sizes -------------------------------------------------------------

def read_best_known(text: str) -> list[tuple[int, int, int, int]]:
    """Rows ``t,k,v,N`` (``#`` comments and an optional header allowed)."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if parts == ["t", "k", "v", "N"]:
            continue
        if len(parts) != 4:
            raise ValueError(f"line {lineno}: expected t,k,v,N")
        try:
            rows.append(tuple(int(p) for p in parts))  # type: ignore[arg-type]
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer field") from None
    return rows


def regression_slope(points: Iterable[tuple[float, float]]) -> float:
    """Least-squares slope of N against log2 k."""
    pts = list(points)
    if len({k for k, _ in pts}) < 2:
        raise ValueError("need at least two distinct k values")
    x = np.log2([float(k) for k, _ in pts])
    y = np.array([float(n) for _, n in pts])
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))
