"""Chebyshev polynomials of the first and second kind and the spectral
parameters that locate the sharp a2 bound.

Evaluation uses the trigonometric form ``U_n(cos t) = sin((n+1)t)/sin t``
inside the open interval, where it stays accurate near interior roots, and the
three-term recurrence outside it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = [
    "SpectralParams",
    "eval_U",
    "eval_U_prime",
    "eval_T",
    "compute_mu",
    "compute_nu",
    "compute_eta",
    "spectral_params",
    "derivative_identity_residuals",
    "trig_root_identity_residuals",
    "largest_root_U_prime",
    "eval_U_at_cospi",
]

# |x| > 1 - _EDGE falls back to recurrence / endpoint limits.
_EDGE = 1e-8
# pi - fl(pi)
_PI_LO = 1.2246467991473532e-16
# Closed-form derivative loses ~eps/(1-x^2); switch to the derivative recurrence.
_DERIV_EDGE = 1e-3


def _U_recurrence(n: int, x: float) -> float:
    u_prev, u = 1.0, 2.0 * x
    if n == 0:
        return u_prev
    for _ in range(n - 1):
        u_prev, u = u, 2.0 * x * u - u_prev
    return u


def eval_U(n: int, x: float) -> float:
    """Chebyshev polynomial of the second kind ``U_n(x)``.

    Negative orders follow the reflection ``U_{-n-2} = -U_n`` (so ``U_{-1} = 0``),
    which keeps index arithmetic in the coefficient formulas branch-free.
    """
    if n < 0:
        return 0.0 if n == -1 else -eval_U(-n - 2, x)
    if abs(x) <= 1.0 - _EDGE:
        t = math.acos(x)
        return math.sin((n + 1) * t) / math.sin(t)
    if abs(x) <= 1.0:
        return float(n + 1) if x > 0 else float((-1) ** n * (n + 1))
    return _U_recurrence(n, x)


def _U_prime_recurrence(n: int, x: float) -> float:
    # U'_{k+1} = 2 U_k + 2x U'_k - U'_{k-1}
    u_prev, u = 1.0, 2.0 * x
    d_prev, d = 0.0, 2.0
    if n == 0:
        return 0.0
    for _ in range(n - 1):
        u_prev, u, d_prev, d = u, 2.0 * x * u - u_prev, d, 2.0 * u + 2.0 * x * d - d_prev
    return d


def eval_U_prime(n: int, x: float) -> float:
    """Derivative ``U'_n(x)``.

    Uses ``((n+2) U_{n-1} - n U_{n+1}) / (2 (1 - x^2))`` away from the
    endpoints and a differentiated recurrence near and beyond them, which also
    yields the endpoint limit ``U'_n(+-1) = (+-1)^(n+1) n (n+1) (n+2) / 3``.
    """
    if n < 0:
        return 0.0 if n == -1 else -eval_U_prime(-n - 2, x)
    if n == 0:
        return 0.0
    if abs(x) < 1.0 - _DERIV_EDGE:
        return ((n + 2) * eval_U(n - 1, x) - n * eval_U(n + 1, x)) / (2.0 * (1.0 - x * x))
    return _U_prime_recurrence(n, x)


def eval_T(n: int, x: float) -> float:
    """Chebyshev polynomial of the first kind ``T_n(x)``."""
    if n < 0:
        n = -n
    if abs(x) <= 1.0:
        return math.cos(n * math.acos(x))
    t_prev, t = 1.0, x
    if n == 0:
        return t_prev
    for _ in range(n - 1):
        t_prev, t = t, 2.0 * x * t - t_prev
    return t


def _sinpi(r: Fraction) -> float:
    """``sin(pi r)`` for rational ``r`` with exact argument reduction."""
    r = r - 2 * math.floor(r / 2)  # [0, 2)
    sign = 1.0
    if r >= 1:
        r, sign = r - 1, -1.0
    if r > Fraction(1, 2):
        r = 1 - r
    if r == 0:
        return 0.0
    hi = math.pi * float(r)
    lo = float((Fraction(math.pi) + Fraction(_PI_LO)) * r - Fraction(hi))
    return sign * (math.sin(hi) + math.cos(hi) * lo)


def eval_U_at_cospi(k: int, q: Fraction) -> float:
    """``U_k(cos(pi q))`` for rational ``q`` in (0, 1), as ``sin((k+1) pi q) / sin(pi q)``.

    Avoids the rounding of ``acos`` when the abscissa is known in angular form,
    e.g. ``U_1(cos(pi/3))`` is exactly 1.
    """
    q = Fraction(q)
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    return _sinpi((k + 1) * q) / _sinpi(q)


def compute_mu(n: int) -> float:
    """``cos(2 pi / (n + 3))``, the largest root of ``U_{(n+1)/2}``; odd ``n`` only.

    The rounding error of the argument is folded back in to first order, so
    e.g. ``n = 3`` gives exactly ``0.5`` rather than ``0.5000000000000001``.
    """
    if n % 2 == 0:
        raise ValueError(f"compute_mu needs an odd degree, got {n}")
    hi = 2.0 * math.pi / (n + 3)
    lo = float(2 * (Fraction(math.pi) + Fraction(_PI_LO)) / (n + 3) - Fraction(hi))
    return math.cos(hi) - math.sin(hi) * lo


def _bisect(f, lo: float, hi: float, tol: float, max_iter: int) -> float:
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise RuntimeError(f"no sign change on [{lo!r}, {hi!r}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid in (lo, hi):
            break
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _bisect_nu(n: int, tol: float) -> float:
    def g(x: float) -> float:
        return (n + 4) * eval_U(n + 1, x) - (n + 2) * eval_U(n + 3, x)

    lo = math.sin(math.pi / (2 * (n + 3)))
    hi = math.sin(math.pi / (n + 2))
    return _bisect(g, lo, hi, tol, 200)


def _newton_exact(n: int, x: float) -> Fraction:
    """One Newton step on ``(n+4) U_{n+1} - (n+2) U_{n+3}`` in exact arithmetic.

    With ``x = M / D`` the scaled values ``V_k = U_k(x) D^k`` and
    ``W_k = U'_k(x) D^(k-1)`` obey integer recurrences, so the step costs a few
    hundred big-integer products and squares the (ulp-level) error of ``x``.
    """
    m, d = x.as_integer_ratio()
    d2 = d * d
    v = [1, 2 * m]
    w = [0, 2]
    for k in range(1, n + 3):
        v.append(2 * m * v[k] - d2 * v[k - 1])
        w.append(2 * v[k] + 2 * m * w[k] - d2 * w[k - 1])
    g = (n + 4) * v[n + 1] * d2 - (n + 2) * v[n + 3]
    gp = (n + 4) * w[n + 1] * d2 - (n + 2) * w[n + 3]
    return Fraction(m * gp - g, d * gp)


@lru_cache(maxsize=1024)
def _nu_fraction(n: int) -> Fraction:
    return _newton_exact(n, _bisect_nu(n, 0.0))


def compute_nu(n: int, tol: float = 0.0) -> float:
    """Smallest positive root of ``U'_{n+2}`` for even ``n``.

    Bisection on ``(n+4) U_{n+1}(x) - (n+2) U_{n+3}(x)``, which has the sign of
    ``U'_{n+2}`` on (0, 1). The bracket runs from the first positive root of
    ``U_{n+2}`` (the derivative's roots interlace with it, and ``x = 0`` is
    itself a root of the odd function ``U'_{n+2}``) to ``sin(pi/(n+2))``.

    With the default ``tol=0`` the bisected root is finished by one exact
    Newton step, which makes the result correctly rounded; a positive ``tol``
    returns the plain bisection midpoint.
    """
    if n % 2:
        raise ValueError(f"compute_nu needs an even degree, got {n}")
    if n < 2:
        raise ValueError(f"degree must be >= 2, got {n}")
    if tol > 0.0:
        return _bisect_nu(n, tol)
    return float(_nu_fraction(n))


def compute_eta(n: int) -> float:
    """``1 - 2 nu^2``: half the sharp a2 bound for even degree ``n``.

    Formed from the exact Newton-polished root, so it is correctly rounded
    (``compute_eta(2) == 0.25``).
    """
    compute_nu(n)  # argument validation
    nu = _nu_fraction(n)
    return float(1 - 2 * nu * nu)


@dataclass(frozen=True)
class SpectralParams:
    n: int
    parity: str
    mu: float | None = None
    nu: float | None = None
    eta: float | None = None

    @property
    def half_bound(self) -> float:
        return self.mu if self.parity == "odd" else self.eta


def spectral_params(n: int) -> SpectralParams:
    if n < 2:
        raise ValueError(f"degree must be >= 2, got {n}")
    if n % 2:
        return SpectralParams(n=n, parity="odd", mu=compute_mu(n))
    return SpectralParams(n=n, parity="even", nu=compute_nu(n), eta=compute_eta(n))


def _U_grid(n: int, x: np.ndarray) -> np.ndarray:
    t = np.arccos(x)
    return np.sin((n + 1) * t) / np.sin(t)


def largest_root_U_prime(m: int, step: float = 1e-6) -> float:
    """Largest root of ``U'_m`` on (0, 1) by a dense sign scan plus bisection."""
    x = np.arange(1, int(1.0 / step)) * step
    v = (m + 2) * _U_grid(m - 1, x) - m * _U_grid(m + 1, x)
    flips = np.nonzero(np.signbit(v[:-1]) != np.signbit(v[1:]))[0]
    if flips.size == 0:
        raise RuntimeError(f"U'_{m} has no sign change on (0, 1)")
    i = flips[-1]

    def g(y: float) -> float:
        return (m + 2) * eval_U(m - 1, y) - m * eval_U(m + 1, y)

    return _bisect(g, float(x[i]), float(x[i + 1]), 1e-15, 200)


def derivative_identity_residuals(k: int, x: float) -> tuple[float, float, float, float, float]:
    """Relative residuals of five derivative identities at ``(k, x)``.

    In order: both closed forms of ``U'_k`` against the recurrence-derived
    derivative; the ``1/(1 +- x)`` forms of ``U'_{k+1} -+ U'_k`` and of
    ``U'_{k+1}^2 - U'_k^2``; then the half-angle forms of the sum, the
    difference and the difference of squares through ``U'_{2k+2}``. Where an
    entry bundles several identities the worst one is reported.
    """
    if not -1.0 < x < 1.0:
        raise ValueError("identities are stated for |x| < 1")

    def rel(lhs: float, rhs: float) -> float:
        return abs(lhs - rhs) / max(1.0, abs(lhs))

    U = eval_U
    d_k = _U_prime_recurrence(k, x)
    d_k1 = _U_prime_recurrence(k + 1, x)
    one_m = 1.0 - x * x

    a = max(
        rel(d_k, ((k + 2) * U(k - 1, x) - k * U(k + 1, x)) / (2.0 * one_m)),
        rel(d_k, ((k + 1) * U(k - 1, x) - k * x * U(k, x)) / one_m),
    )
    b = max(
        rel(d_k1 - d_k, ((k + 2) * U(k, x) + (k + 1) * U(k + 1, x)) / (1.0 + x)),
        rel(d_k1 + d_k, ((k + 2) * U(k, x) - (k + 1) * U(k + 1, x)) / (1.0 - x)),
        rel(d_k1**2 - d_k**2,
            ((k + 2) ** 2 * U(k, x) ** 2 - (k + 1) ** 2 * U(k + 1, x) ** 2) / one_m),
    )
    yp = math.sqrt((1.0 + x) / 2.0)
    ym = math.sqrt((1.0 - x) / 2.0)
    dp = _U_prime_recurrence(2 * k + 2, yp)
    dm = _U_prime_recurrence(2 * k + 2, ym)
    sign = -1.0 if k % 2 else 1.0
    c = rel(d_k1 + d_k, math.sqrt(2.0) / (4.0 * math.sqrt(1.0 + x)) * dp)
    d = rel(d_k1 - d_k, sign * math.sqrt(2.0) / (4.0 * math.sqrt(1.0 - x)) * dm)
    e = rel(d_k1**2 - d_k**2, sign / (8.0 * math.sqrt(one_m)) * dp * dm)
    return a, b, c, d, e


def trig_root_identity_residuals(n: int, t: float) -> tuple[float, float, float, float]:
    """Residuals of the four trigonometric consequences of
    ``b sin(at) + a sin(bt) = 0`` with ``a = (n+2)/2``, ``b = (n+4)/2``.

    Only meaningful when ``t`` is (numerically) a root of that equation; each
    residual is scaled by ``(a + b)^2``.
    """
    a = (n + 2) / 2.0
    b = (n + 4) / 2.0
    s = a + b
    r1 = (b * b * (1 - math.cos(2 * a * t)) + a * a * (1 - math.cos(2 * b * t))
          + 2 * a * b * (math.cos((a - b) * t) - math.cos(s * t)))
    r2 = b * b * math.sin(2 * a * t) + a * a * math.sin(2 * b * t) + 2 * a * b * math.sin(s * t)
    r3 = (b * math.sin(2 * a * t) + a * math.sin(2 * b * t)
          + s * math.sin(s * t) - (a - b) * math.sin((a - b) * t))
    r4 = (b * math.cos(2 * a * t) + a * math.cos(2 * b * t)
          + s * math.cos(s * t) - s * (1 + math.cos((a - b) * t)))
    scale = s * s
    return abs(r1) / scale, abs(r2) / scale, abs(r3) / scale, abs(r4) / scale
