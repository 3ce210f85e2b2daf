"""Maximization of the per-column counting exponent f_{t,v} over the
ordered simplex ``1 = x_1 >= x_2 >= ... >= x_{t-1} >= 0``.

Points are passed as the full vector ``x`` (length t-1, ``x[0] == 1``).
The search itself runs on the chain parameterization
``x_{i+1} = x_i * s_i`` with ``s in [0, 1]^(t-2)``: projected gradient
ascent with Armijo backtracking from scrambled Sobol starts, then Newton
iterations on the interior coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.stats import qmc

from .bounds import LN2, BoundResult, entropy_h, log_central_ratio

EPS = 1e-12
DOMAIN_TOL = 1e-12


class OptimizerError(RuntimeError):
    pass


@dataclass(frozen=True)
class FPoint:
    x: tuple[float, ...]
    f: float
    grad_norm: float


@dataclass(frozen=True)
class OptResult:
    t: int
    v: int
    best: FPoint
    restarts: int
    converged: int
    spread: float

    @property
    def f0(self) -> float:
        return self.best.f


def _check_point(t: int, x: Sequence[float]) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != t - 1:
        raise ValueError(f"expected {t - 1} coordinates, got {x.shape[-1]}")
    if np.any(np.abs(x[..., 0] - 1.0) > DOMAIN_TOL):
        raise ValueError("x_1 must equal 1")
    if np.any(np.diff(x, axis=-1) > DOMAIN_TOL) or np.any(x < -DOMAIN_TOL):
        raise ValueError("x must be non-increasing and non-negative")
    return x


# -- product form ---------------------------------------------------------

@lru_cache(maxsize=None)
def _product_terms(t: int, v: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(sign, const, coef) so that f = sum sign * g(const + coef . x) with
    g(z) = z log2 z."""
    n = t - 1
    rows = []

    def term(sign, const, coefs):
        c = np.zeros(n)
        for j, a in coefs:
            c[j] += a
        rows.append((sign, const, c))

    last = n - 1
    term(+1, v, [(last, -1)])
    term(-1, v - 1, [(last, -1)])
    term(-1, 0, [(last, 1)])
    for a in range(n - 1):
        b = a + 1
        term(+1, v, [(a, -1)])
        term(-1, v - 1, [(a, -1), (b, 1)])
        term(-1, 0, [(a, 1), (b, -1)])
        term(-1, 1, [(b, -1)])
    sign = np.array([r[0] for r in rows], dtype=float)
    const = np.array([r[1] for r in rows], dtype=float)
    coef = np.array([r[2] for r in rows])
    return sign, const, coef


def _args(t: int, v: int, x: np.ndarray) -> np.ndarray:
    _, const, coef = _product_terms(t, v)
    z = const + x @ coef.T
    if np.any(z < -DOMAIN_TOL):
        raise ValueError("point outside the domain of f")
    return np.maximum(z, 0.0)


def _g(z: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(z > 0, z * np.log(np.where(z > 0, z, 1.0)), 0.0) / LN2


def f_product_form(t: int, v: int, x: Sequence[float]) -> float:
    x = _check_point(t, x)
    sign = _product_terms(t, v)[0]
    return float(np.sum(sign * _g(_args(t, v, x)), axis=-1))


def f_product_batch(t: int, v: int, X: np.ndarray) -> np.ndarray:
    """Vectorised product form over rows of ``X`` (no ordering check)."""
    sign = _product_terms(t, v)[0]
    return np.sum(sign * _g(_args(t, v, X)), axis=-1)


def grad_product_form(t: int, v: int, x: Sequence[float]) -> np.ndarray:
    """Gradient with respect to every coordinate of x (including the
    dummy x_1).  Interior points only."""
    x = np.asarray(x, dtype=float)
    sign, _, coef = _product_terms(t, v)
    z = _args(t, v, x)
    with np.errstate(divide="ignore"):
        gp = (np.log(z) + 1.0) / LN2
    return (sign * gp) @ coef


def hess_product_form(t: int, v: int, x: Sequence[float]) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    sign, _, coef = _product_terms(t, v)
    z = _args(t, v, x)
    w = sign / (z * LN2)
    return coef.T @ (w[:, None] * coef)


# -- entropy form -----------------------------------------------------------

def _entropy_pairs(t: int, v: int, x: Sequence[float]) -> list[tuple[float, float, int, int, int]]:
    """(n, k, n-index, k-index, n-sign) for every ``n h(k/n)`` term; an
    index of -1 means the quantity does not depend on x, the sign is the
    derivative of n (or k) with respect to that coordinate."""
    out = []
    for i in range(1, t - 1):
        p, c = x[i - 1], x[i]
        out.append((p, c, i - 1, i, +1))
        out.append((v - p, 1 - c, i - 1, i, -1))
    last = x[t - 2]
    out.append((v - last, 1.0, t - 2, -1, -1))
    return out


def _n_h(n: float, k: float) -> float:
    if n <= 0:
        return 0.0
    return n * entropy_h(min(max(k / n, 0.0), 1.0))


def f_entropy_form(t: int, v: int, x: Sequence[float]) -> float:
    x = tuple(float(a) for a in _check_point(t, x))
    return sum(_n_h(n, k) for n, k, *_ in _entropy_pairs(t, v, x))


def grad_entropy_form(t: int, v: int, x: Sequence[float]) -> np.ndarray:
    """d/dn [n h(k/n)] = -log2(1 - k/n), d/dk = log2((n - k) / k)."""
    x = tuple(float(a) for a in x)
    g = np.zeros(t - 1)
    for idx, (n, k, ni, ki, ns) in enumerate(_entropy_pairs(t, v, x)):
        dn = -math.log2(1 - k / n)
        dk = math.log2((n - k) / k)
        g[ni] += ns * dn
        if ki >= 0:
            # the k of the (v - x_prev) term is 1 - x_cur
            g[ki] += dk if idx % 2 == 0 else -dk
    return g


# -- maximization -------------------------------------------------------------

def _chain(s: np.ndarray) -> np.ndarray:
    return np.cumprod(s, axis=-1)


def _full(y: np.ndarray) -> np.ndarray:
    return np.concatenate([np.ones(y.shape[:-1] + (1,)), y], axis=-1)


def _grad_s(t: int, v: int, s: np.ndarray) -> np.ndarray:
    y = _chain(s)
    sign, _, coef = _product_terms(t, v)
    z = np.maximum(_args(t, v, _full(y)), 1e-300)
    gy = ((sign * (np.log(z) + 1.0) / LN2) @ coef)[:, 1:]
    # dy_j/ds_i = y_j / s_i for j >= i
    acc = np.cumsum((gy * y)[:, ::-1], axis=1)[:, ::-1]
    return acc / s


def _ascend(t: int, v: int, s: np.ndarray, max_iter: int = 2000) -> np.ndarray:
    f = lambda S: f_product_batch(t, v, _full(_chain(S)))
    cur = f(s)
    alpha = np.full(len(s), 0.1)
    for _ in range(max_iter):
        g = _grad_s(t, v, s)
        todo = np.ones(len(s), dtype=bool)
        new_s = s.copy()
        for _ in range(60):
            cand = np.clip(s + alpha[:, None] * g, EPS, 1 - EPS)
            fc = f(cand)
            ok = fc >= cur + 1e-4 * np.sum(g * (cand - s), axis=1)
            acc = todo & ok
            new_s[acc] = cand[acc]
            todo &= ~ok
            if not todo.any():
                break
            alpha[todo] *= 0.5
        step = np.max(np.abs(new_s - s), axis=1)
        s = new_s
        cur = f(s)
        alpha = np.minimum(alpha * 2.0, 1.0)
        if np.all(step < 1e-9):
            break
    return s


def _newton(t: int, v: int, y: np.ndarray, tol: float, max_iter: int = 50) -> tuple[np.ndarray, float]:
    def grad(y):
        return grad_product_form(t, v, _full(y))[1:]

    g = grad(y)
    for _ in range(max_iter):
        if np.linalg.norm(g) <= tol:
            break
        H = hess_product_form(t, v, _full(y))[1:, 1:]
        try:
            step = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError:
            break
        if np.any(np.linalg.eigvalsh(H) >= 0):
            break
        y_new = y + step
        full = np.concatenate([[1.0], y_new])
        if np.any(np.diff(full) > 0) or y_new[-1] < 0:
            break
        y = y_new
        g = grad(y)
    return y, float(np.linalg.norm(g))


def maximize_f(t: int, v: int, restarts: int = 64, tolerance: float = 1e-10,
               seed: int = 0) -> OptResult:
    """f0(t, v) by multi-start search.  Raises :class:`OptimizerError` when
    no restart reaches gradient norm ``tolerance``."""
    if t < 2 or v < 2:
        raise ValueError("need t >= 2 and v >= 2")
    if t == 2:
        fx = f_product_form(2, v, (1.0,))
        return OptResult(t, v, FPoint((1.0,), fx, 0.0), 1, 1, 0.0)
    d = t - 2
    sampler = qmc.Sobol(d, scramble=True, seed=seed)
    if restarts & (restarts - 1) == 0:
        starts = sampler.random_base2(int(math.log2(restarts)))
    else:
        starts = sampler.random(restarts)
    s = _ascend(t, v, np.clip(starts, EPS, 1 - EPS))
    points = []
    for y0 in _chain(s):
        y, gn = _newton(t, v, y0, tolerance)
        full = tuple(float(a) for a in np.concatenate([[1.0], y]))
        points.append(FPoint(full, f_product_form(t, v, full), gn))
    good = [p for p in points if p.grad_norm <= tolerance]
    if not good:
        worst = min(p.grad_norm for p in points)
        raise OptimizerError(
            f"f_{{{t},{v}}}: no restart converged (best gradient norm {worst:.3g})"
        )
    fs = [p.f for p in good]
    best = max(good, key=lambda p: (p.f, tuple(-a for a in p.x)))
    return OptResult(t, v, best, restarts, len(good), max(fs) - min(fs))


@lru_cache(maxsize=None)
def optimum(t: int, v: int) -> OptResult:
    return maximize_f(t, v)


def f0_value(t: int, v: int) -> float:
    return optimum(t, v).f0


def d_bound_from_f0(t: int, v: int, f0: float) -> BoundResult:
    """``(t-1) v / ((t-1) log2(v^v/(v-1)^(v-1)) - f0)``; infinite when the
    denominator is not positive."""
    denom = (t - 1) * log_central_ratio(v) / LN2 - f0
    value = math.inf if denom <= 0 else (t - 1) * v / denom
    return BoundResult(value, "EC-optimized", t, v, {"f0": f0})
