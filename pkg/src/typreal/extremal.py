"""The unique extremal typically real polynomials for ``max a_2`` / ``min a_2``.

Two independent routes produce the coefficients:

* the eigenvector pipeline: pencil eigenvector ``delta`` -> cosine
  coefficients ``gamma_s = sum delta_j delta_{j+s-1}`` -> ``a_s`` normalised by
  ``gamma_1 - gamma_3``;
* closed forms: explicit odd-degree coefficient formulas and the compact
  rational representations for both parities.

The compact representations have removable singularities on the unit circle;
near them evaluation falls back to the polynomial itself.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .chebyshev import compute_eta, compute_mu, eval_U, eval_U_at_cospi
from .pencil import phi_matrix

__all__ = [
    "TypicallyRealPolynomial",
    "EigenvectorOdd",
    "EigenvectorEven",
    "SingularInputError",
    "DegenerateNormalizationError",
    "eigenvector_odd",
    "eigenvector_even",
    "eigenvector_even_unnormalized",
    "gammas_from_factor",
    "coefficients_from_gammas",
    "coefficients_odd_closed",
    "extremizer",
    "compact_eval_odd",
    "compact_eval_even",
    "compact_eval",
    "coefficients_from_compact",
    "kernel_on_circle",
    "kernel_closed",
    "endpoint_values_closed",
    "chebyshev_sum_residuals",
    "odd_product_residuals",
    "even_product_residuals",
    "even_proportionality_residual",
    "removability_residuals",
    "singular_points",
    "near_singularity",
    "pipeline_coefficients",
]

# Radius around a removable singularity inside which the polynomial is used.
# Cancellation costs ~eps/r^k at a pole of order k, so double and triple poles
# need a wider guard than simple ones to keep the seam below 1e-9.
SINGULAR_RADIUS = 1e-4
SINGULAR_RADIUS_MULTIPLE = 1e-2


class SingularInputError(ValueError):
    """Evaluation point where a closed-form eigenvector is undefined."""


class DegenerateNormalizationError(ValueError):
    """``gamma_1 - gamma_3`` vanishes, so ``a_1 = 1`` cannot be imposed."""


@dataclass(frozen=True)
class TypicallyRealPolynomial:
    """``P(z) = sum_{j=1}^N a_j z^j`` with ``a_1 = 1``."""

    coeffs: np.ndarray
    which: str = "max"

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @property
    def a2(self) -> float:
        return float(self.coeffs[1])

    def __call__(self, z):
        # Horner on the coefficient vector, constant term 0
        z = np.asarray(z)
        acc = np.zeros_like(z, dtype=complex if np.iscomplexobj(z) else float)
        for a in self.coeffs[::-1]:
            acc = (acc + a) * z
        return acc if acc.ndim else acc.item()

    def im_on_circle(self, t):
        """``Im P(e^{it})`` as a sine sum."""
        t = np.asarray(t, dtype=float)
        j = np.arange(1, self.degree + 1)
        return np.sin(np.multiply.outer(t, j)) @ self.coeffs

    def reflected(self) -> "TypicallyRealPolynomial":
        """``-P(-z)``: negates the even-index coefficients."""
        c = self.coeffs.copy()
        c[1::2] = -c[1::2]
        return TypicallyRealPolynomial(c, "min" if self.which == "max" else "max")


@dataclass(frozen=True)
class EigenvectorOdd:
    n: int
    x: float
    z: np.ndarray


@dataclass(frozen=True)
class EigenvectorEven:
    n: int
    x: float
    z: np.ndarray


def eigenvector_odd(n: int, x: float) -> EigenvectorOdd:
    """``z_{2k-1} = U_{k-1}^2``, ``z_{2k} = U_{k-1} U_k``, ``z_n = 1``."""
    if n % 2 == 0 or n < 3:
        raise ValueError(f"eigenvector_odd needs odd n >= 3, got {n}")
    z = np.empty(n)
    u = [eval_U(k, x) for k in range((n + 1) // 2)]
    for k in range(1, (n - 1) // 2 + 1):
        z[2 * k - 2] = u[k - 1] * u[k - 1]
        z[2 * k - 1] = u[k - 1] * u[k]
    z[n - 1] = 1.0
    return EigenvectorOdd(n=n, x=x, z=z)


def _even_R(n: int, x: float) -> float:
    u = eval_U(n // 2, x)
    if abs(u) < 1e-12:
        raise SingularInputError(f"U_{n // 2}({x!r}) vanishes")
    q = (n + 2) / (2.0 * u)
    denom = q * q - 1.0
    if abs(denom) < 1e-12:
        raise SingularInputError(f"q_N^2({x!r}) = 1")
    return (n + 2) * (n + 4) / (4.0 * (n + 3)) / denom


def eigenvector_even(n: int, x: float) -> EigenvectorEven:
    """Normalised even-degree eigenvector family (the hatted form).

    ``z_{2k-1} = U_{k-1}^2 - R (U_{2k-1} + 2k)``,
    ``z_{2k} = U_{k-1} U_k - R (U_{2k} - 2k - 1)``,
    ``R = (N+2)(N+4) / (4(N+3)(q^2 - 1))``, ``q = (N+2) / (2 U_{N/2})``.
    """
    if n % 2 or n < 2:
        raise ValueError(f"eigenvector_even needs even n >= 2, got {n}")
    r = _even_R(n, x)
    u = [eval_U(k, x) for k in range(n + 1)]
    z = np.empty(n)
    for k in range(1, n // 2 + 1):
        z[2 * k - 2] = u[k - 1] * u[k - 1] - r * (u[2 * k - 1] + 2 * k)
        z[2 * k - 1] = u[k - 1] * u[k] - r * (u[2 * k] - 2 * k - 1)
    return EigenvectorEven(n=n, x=x, z=z)


def eigenvector_even_unnormalized(n: int, x: float) -> np.ndarray:
    """The un-hatted even vector whose product with ``Phi_n(x)`` vanishes in
    all but the last coordinate, for every ``x``."""
    if n % 2 or n < 2:
        raise ValueError(f"needs even n >= 2, got {n}")
    h = n // 2
    u = [eval_U(k, x) for k in range(n + 3)]
    lead = -0.5 * (u[n + 2] - n - 3)
    uh, uh1 = u[h], u[h + 1]
    z = np.empty(n)
    for k in range(1, h + 1):
        z[2 * k - 2] = (lead * u[k - 1] ** 2
                        + 0.5 * (uh1 * u[2 * k - 1] - (n + 4) / (n + 2) * uh * 2 * k) * uh)
        z[2 * k - 1] = lead * u[k - 1] * u[k] + 0.5 * uh1 * uh * (u[2 * k] - (2 * k + 1))
    return z


def gammas_from_factor(delta) -> np.ndarray:
    """Autocorrelation ``gamma_s = sum_{j=1}^{n-s+1} delta_j delta_{j+s-1}``."""
    d = np.asarray(delta, dtype=float)
    n = d.size
    if n < 1:
        raise ValueError("empty factor")
    return np.correlate(d, d, mode="full")[n - 1:].copy()


def coefficients_from_gammas(gamma, which: str = "max") -> TypicallyRealPolynomial:
    """``a_l = (gamma_l - gamma_{l+2}) / (gamma_1 - gamma_3)``, with ``gamma`` padded by two zeros."""
    g = np.concatenate([np.asarray(gamma, dtype=float), [0.0, 0.0]])
    diff = g[:-2] - g[2:]
    if abs(diff[0]) < 1e-12 * max(np.max(np.abs(g)), 1e-300):
        raise DegenerateNormalizationError("gamma_1 - gamma_3 vanishes")
    a = diff / diff[0]
    a[0] = 1.0
    return TypicallyRealPolynomial(a, which)


def coefficients_odd_closed(n: int) -> TypicallyRealPolynomial:
    """Explicit odd-degree coefficients at ``mu = cos(2 pi/(n+3))``."""
    if n % 2 == 0 or n < 3:
        raise ValueError(f"needs odd n >= 3, got {n}")
    mu = compute_mu(n)
    q = Fraction(2, n + 3)
    u = [eval_U_at_cospi(k, q) for k in range((n + 1) // 2 + 1)]
    a = np.empty(n)
    a[0] = 1.0
    for j in range(1, (n - 1) // 2 + 1):
        hi = (n + 3) / 2 - j
        lo = (n + 1) / 2 - j
        a[2 * j] = 2.0 / (n + 3) * (mu * u[j - 1] * u[j] + hi * u[j] ** 2 - lo * u[j - 1] ** 2)
        a[2 * j - 1] = 4.0 / (n + 3) * u[j - 1] * (hi * u[j] - mu * lo * u[j - 1])
    return TypicallyRealPolynomial(a, "max")


@lru_cache(maxsize=512)
def _extremizer_max(n: int) -> TypicallyRealPolynomial:
    if n % 2:
        return coefficients_odd_closed(n)
    vec = eigenvector_even(n, compute_eta(n)).z
    return coefficients_from_gammas(gammas_from_factor(vec))


def extremizer(n: int, which: str = "max") -> TypicallyRealPolynomial:
    """The unique polynomial of degree ``n`` attaining ``a_2 = +-bound``.

    Odd ``n`` uses the explicit coefficients, even ``n`` the eigenvector
    pipeline at ``eta_n``; ``which="min"`` reflects ``P(z) -> -P(-z)``.
    """
    if n < 2:
        raise ValueError(f"degree must be >= 2, got {n}")
    if which not in ("max", "min"):
        raise ValueError(f"which must be 'max' or 'min', got {which!r}")
    p = _extremizer_max(n)
    p = TypicallyRealPolynomial(p.coeffs.copy(), "max")
    return p if which == "max" else p.reflected()


def pipeline_coefficients(n: int) -> TypicallyRealPolynomial:
    """Coefficients through eigenvector -> gamma -> a, for either parity."""
    if n % 2:
        vec = eigenvector_odd(n, compute_mu(n)).z
    else:
        vec = eigenvector_even(n, compute_eta(n)).z
    return coefficients_from_gammas(gammas_from_factor(vec))


# ---------------------------------------------------------------- compact forms

def singular_points(n: int) -> list[tuple[complex, int]]:
    """Removable singularities of the compact form with their pole orders."""
    if n % 2:
        a = 2.0 * math.pi / (n + 3)
        return [(1.0, 1), (-1.0, 1), (cmath.exp(1j * a), 2), (cmath.exp(-1j * a), 2)]
    eta = compute_eta(n)
    s = math.sqrt(1.0 - eta * eta)
    return [(1.0, 1), (-1.0, 3), (complex(eta, s), 2), (complex(eta, -s), 2)]


def near_singularity(n: int, z: complex) -> bool:
    for pt, order in singular_points(n):
        radius = SINGULAR_RADIUS if order == 1 else SINGULAR_RADIUS_MULTIPLE
        if abs(z - pt) < radius:
            return True
    return False


def _compact_odd_raw(n: int, z: complex) -> complex:
    mu = compute_mu(n)
    s2 = math.sin(2.0 * math.pi / (n + 3)) ** 2
    quad = 1.0 - 2.0 * z * mu + z * z
    p1 = z / quad
    p2 = 4.0 / (n + 3) * s2 * z**3 / (1.0 - z * z) * (1.0 - z ** (n + 3)) / quad**2
    return p1 + p2


def compact_eval_odd(n: int, z: complex) -> complex:
    """Two-fraction representation of the odd-degree ``P_max``."""
    if n % 2 == 0 or n < 3:
        raise ValueError(f"needs odd n >= 3, got {n}")
    z = complex(z)
    if near_singularity(n, z):
        return complex(extremizer(n)(z))
    return _compact_odd_raw(n, z)


def _even_constants(n: int):
    eta = compute_eta(n)
    g1 = 2.0 * (1.0 - eta)
    g2 = 2.0 / (n + 3) * (-2.0 * eta * eta - 2.0 * (n + 3) * eta + n + 5)
    q = 2.0 * (1.0 - eta * eta) / ((n + 2) * (n + 3) * (n + 4))
    return eta, g1, g2, q


def _even_hat_p(n: int, z: complex) -> complex:
    return (((n + 4) / 2) ** 2 * (1 - z ** (n + 2)) + ((n + 2) / 2) ** 2 * (1 - z ** (n + 4))
            + (n + 2) * (n + 4) / 2 * (z - z ** (n + 3)))


def _compact_even_raw(n: int, z: complex) -> complex:
    eta, g1, g2, q = _even_constants(n)
    quad = z * z + 1.0 - 2.0 * eta * z
    p1 = (z + z**5 + g1 * (z * z + z**4) + g2 * z**3) / ((1 + z) ** 2 * quad**2)
    p2 = q * 8.0 * z**4 / ((1 - z) * (1 + z) ** 3 * quad**2) * _even_hat_p(n, z)
    return p1 + p2


def compact_eval_even(n: int, z: complex) -> complex:
    """Two-fraction representation of the even-degree ``P_max``."""
    if n % 2 or n < 2:
        raise ValueError(f"needs even n >= 2, got {n}")
    z = complex(z)
    if near_singularity(n, z):
        return complex(extremizer(n)(z))
    return _compact_even_raw(n, z)


def compact_eval(n: int, z: complex) -> complex:
    return compact_eval_odd(n, z) if n % 2 else compact_eval_even(n, z)


def coefficients_from_compact(n: int, radius: float = 0.95) -> np.ndarray:
    """Recover ``a_1..a_n`` from the compact form by sampling ``n+1`` points on
    ``|z| = radius`` and inverting the discrete Fourier transform.

    The default radius keeps every sample clear of the unit-circle
    singularities (so the polynomial fallback never fires) while the
    ``radius**-j`` amplification stays below ~1e3 for degrees up to 100.
    """
    m = n + 1
    pts = radius * np.exp(2j * np.pi * np.arange(m) / m)
    vals = np.array([compact_eval(n, z) for z in pts])
    c = np.fft.fft(vals) / m * radius ** -np.arange(m, dtype=float)
    return c[1:].real.copy()


def endpoint_values_closed(n: int) -> tuple[float, float]:
    """Closed forms of ``P_max(1)`` and ``P_max(-1)``."""
    y = compute_mu(n) if n % 2 else compute_eta(n)
    at_one = (y + 2.0) / (2.0 - 2.0 * y)
    at_minus_one = (y - 2.0) / (2.0 + 2.0 * y) if n % 2 else (y - 4.0) / (6.0 * y + 6.0)
    return at_one, at_minus_one


def kernel_closed(n: int, t: float) -> float:
    """Closed product form of ``Im P_max(e^{it})``, no singularity handling."""
    c = math.cos(t)
    if n % 2:
        mu = compute_mu(n)
        s2 = math.sin(2.0 * math.pi / (n + 3)) ** 2
        return s2 / (n + 3) / math.sin(t) * math.sin((n + 3) * t / 2) ** 2 / (c - mu) ** 2
    eta, _, _, q = _even_constants(n)
    s = (n + 4) / 2 * math.sin((n + 2) * t / 2) + (n + 2) / 2 * math.sin((n + 4) * t / 2)
    return q / (1.0 + c) / math.sin(t) * s * s / (c - eta) ** 2


def kernel_on_circle(n: int, t: float) -> float:
    """``Im P_max(e^{it})`` for ``0 < t < pi``.

    Uses the product form away from its removable zero/pole points and the
    sine sum of the extremal polynomial near them.
    """
    if not 0.0 < t < math.pi:
        raise ValueError(f"t must lie in (0, pi), got {t}")
    y = compute_mu(n) if n % 2 else compute_eta(n)
    if abs(math.cos(t) - y) < SINGULAR_RADIUS or math.pi - t < SINGULAR_RADIUS:
        return float(extremizer(n).im_on_circle(t))
    return kernel_closed(n, t)


# ---------------------------------------------------------------- identities

def chebyshev_sum_residuals(n: int, j: int) -> tuple[float, float, float]:
    """Residuals of the two Chebyshev sum identities at ``mu_n`` for index
    ``j``, plus the sum-of-squares identity for ``m = (n-1)/2``.

    Each residual is relative to ``max(1, |lhs|)``.
    """
    if n % 2 == 0:
        raise ValueError(f"needs odd n, got {n}")
    if not 1 <= j <= (n - 1) // 2:
        raise ValueError(f"j must be in [1, {(n - 1) // 2}], got {j}")
    mu = compute_mu(n)
    top = (n - 1) // 2 - j
    one_m = 1.0 - mu * mu

    lhs_a = 2.0 * sum(eval_U(k, mu) * eval_U(k + j, mu) for k in range(1, top + 1))
    rhs_a = (((n - 3) / 2 - j) * mu * eval_U(j - 1, mu)
             - ((n - 1) / 2 - j) * eval_U(j - 2, mu) + 2.0 * mu * mu * eval_U(j, mu)) / one_m
    lhs_b = 2.0 * sum(eval_U(k - 1, mu) * eval_U(k + j, mu) for k in range(1, top + 1))
    rhs_b = (((n + 3) / 2 - j) * mu * eval_U(j, mu)
             - ((n + 1) / 2 - j) * eval_U(j - 1, mu)) / one_m

    m = (n - 1) // 2
    y = math.cos(math.pi / (m + 2))
    lhs_c = sum(eval_U(i, y) ** 2 for i in range(m + 1))
    rhs_c = (m + 2) / (2.0 * math.sin(math.pi / (m + 2)) ** 2)

    def rel(a, b):
        return abs(a - b) / max(1.0, abs(a))

    return rel(lhs_a, rhs_a), rel(lhs_b, rhs_b), rel(lhs_c, rhs_c)


def odd_product_residuals(n: int, x: float) -> tuple[float, float]:
    """``Phi_n(x) Z0(x)`` for odd ``n >= 5``: (max |head|, max tail error).

    The head is the first ``n-4`` coordinates, which vanish identically. The
    tail equals ``U_{(n+1)/2}(x) (-u3/2, u5/2, u3, -u5)`` with
    ``u3 = U_{(n-3)/2}(x)``, ``u5 = U_{(n-5)/2}(x)``.
    """
    if n % 2 == 0 or n < 5:
        raise ValueError(f"needs odd n >= 5, got {n}")
    prod = phi_matrix(n, x) @ eigenvector_odd(n, x).z
    scale = eval_U((n + 1) // 2, x)
    u3, u5 = eval_U((n - 3) // 2, x), eval_U((n - 5) // 2, x)
    tail = scale * np.array([-0.5 * u3, 0.5 * u5, u3, -u5])
    return float(np.max(np.abs(prod[:-4]), initial=0.0)), float(np.max(np.abs(prod[-4:] - tail)))


def even_product_residuals(n: int, x: float) -> tuple[float, float]:
    """``Phi_n(x) Z1(x)`` for even ``n``: (max |first n-1|, relative error of last).

    The last coordinate equals ``((n+4)^2/(n+2) U_{n/2}^2 - (n+2) U_{n/2+1}^2) / 4``.
    """
    prod = phi_matrix(n, x) @ eigenvector_even_unnormalized(n, x)
    h = n // 2
    last = 0.25 * ((n + 4) ** 2 / (n + 2) * eval_U(h, x) ** 2 - (n + 2) * eval_U(h + 1, x) ** 2)
    head = float(np.max(np.abs(prod[:-1]), initial=0.0))
    return head, abs(prod[-1] - last) / max(1.0, abs(last))


def even_proportionality_residual(n: int) -> float:
    """Max relative componentwise gap between the un-hatted vector at ``eta``
    and ``-(U_{n+2}(eta) - n - 3)/2`` times the hatted one."""
    eta = compute_eta(n)
    z1 = eigenvector_even_unnormalized(n, eta)
    zh = eigenvector_even(n, eta).z
    factor = -0.5 * (eval_U(n + 2, eta) - n - 3)
    return float(np.max(np.abs(z1 - factor * zh)) / np.max(np.abs(z1)))


def _numerator_poly(n: int) -> tuple[np.polynomial.Polynomial, list[tuple[complex, int]]]:
    """Numerator of the combined compact form (times ``z^4`` when even) and
    the singular points with the multiplicity the numerator must vanish to."""
    P = np.polynomial.Polynomial
    z = P([0, 1])
    if n % 2:
        y = compute_mu(n)
        num = z * (1 - z**2) * (1 + z**2 - 2 * y * z) + 4 * (1 - y * y) / (n + 3) * z**3 * (1 - z ** (n + 3))
    else:
        y, g1, g2, _ = _even_constants(n)
        p = z + z**5 + g1 * (z**2 + z**4) + g2 * z**3
        hat = (((n + 4) / 2) ** 2 * (1 - z ** (n + 2)) + ((n + 2) / 2) ** 2 * (1 - z ** (n + 4))
               + (n + 2) * (n + 4) / 2 * (z - z ** (n + 3)))
        num = p * (1 - z**2) + 16 * (1 - y * y) / ((n + 2) * (n + 3) * (n + 4)) * z**4 * hat
    return num, singular_points(n)


def removability_residuals(n: int) -> list[tuple[complex, int, float]]:
    """For each removable singularity ``(point, derivative order, |value|)``:
    the combined numerator and the required derivatives vanish there.

    Values are divided by the numerator's coefficient 1-norm times
    ``(deg)^order`` so they are comparable across degrees.
    """
    num, pts = _numerator_poly(n)
    scale = float(np.sum(np.abs(num.coef)))
    deg = num.degree()
    out = []
    for pt, mult in pts:
        d = num
        for order in range(mult):
            out.append((pt, order, abs(d(pt)) / (scale * max(deg, 1) ** order)))
            d = d.deriv()
    return out
