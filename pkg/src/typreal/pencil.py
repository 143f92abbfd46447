"""The 7-band pencil ``A - lambda B`` behind the a2 extremal problem.

``A`` is the Gram matrix of ``sum d_j d_{j+1} - sum d_j d_{j+3}`` and ``B`` that
of ``sum d_j^2 - sum d_j d_{j+2}``; the sharp bound is the largest eigenvalue
of the pencil. Determinants of ``Phi_N(x) = 2x B - A`` are computed three ways
(direct elimination, the order-20 recurrence, closed Chebyshev forms) so that
each can check the others.

Determinants shrink like ``2^-N``, so every routine accepts ``scaled=True`` to
work with ``2^(N+2) Delta_N`` instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .chebyshev import compute_eta, compute_mu, eval_U, eval_U_prime

__all__ = [
    "BandPencil",
    "DetCoefficients",
    "EigenPair",
    "build_pencil",
    "minors_B",
    "minors_B_closed",
    "phi_matrix",
    "det_direct",
    "det_recurrence",
    "det_closed",
    "b_coefficients",
    "psi_solution_residual",
    "generalized_eigen",
    "sharp_bound",
]

_A_BANDS = {1: 0.5, 3: -0.5}
_B_BANDS = {0: 1.0, 2: -0.5}


def _band_matrix(n: int, bands: dict[int, float]) -> np.ndarray:
    m = np.zeros((n, n))
    for off, val in bands.items():
        if off >= n:
            continue
        idx = np.arange(n - off)
        m[idx, idx + off] = val
        m[idx + off, idx] = val
    return m


@dataclass(frozen=True)
class BandPencil:
    """Band storage of ``A`` and ``B``: ``{offset: constant band value}``.

    Offsets that do not fit in an ``n x n`` matrix are dropped, so for ``n < 4``
    the ``-1/2`` band of ``A`` is absent.
    """

    n: int
    a_bands: dict[int, float] = field(default_factory=dict)
    b_bands: dict[int, float] = field(default_factory=dict)

    @property
    def A(self) -> np.ndarray:
        return _band_matrix(self.n, self.a_bands)

    @property
    def B(self) -> np.ndarray:
        return _band_matrix(self.n, self.b_bands)

    def phi(self, x: float) -> np.ndarray:
        return 2.0 * x * self.B - self.A


def build_pencil(n: int) -> BandPencil:
    if n < 2:
        raise ValueError(f"pencil dimension must be >= 2, got {n}")
    return BandPencil(
        n=n,
        a_bands={k: v for k, v in _A_BANDS.items() if k < n},
        b_bands={k: v for k, v in _B_BANDS.items() if k < n},
    )


def minors_B(n: int) -> list[float]:
    """Leading principal minors ``B_1 .. B_n`` of ``B``.

    Exact rational elimination; the pivots' running product is each minor.
    No pivoting is needed because ``B`` is positive definite.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    half = Fraction(-1, 2)
    # rows as dicts of the (at most 2 wide) upper band after elimination
    rows: list[dict[int, Fraction]] = []
    for i in range(n):
        row = {i: Fraction(1)}
        if i + 2 < n:
            row[i + 2] = half
        if i - 2 >= 0:
            row[i - 2] = half
        rows.append(row)
    minors = []
    det = Fraction(1)
    for i in range(n):
        piv = rows[i][i]
        if piv <= 0:
            raise ArithmeticError(f"nonpositive pivot at {i}: B is not positive definite")
        det *= piv
        minors.append(float(det))
        for r in range(i + 1, min(i + 3, n)):
            f = rows[r].get(i, Fraction(0))
            if f == 0:
                continue
            f /= piv
            for c, v in rows[i].items():
                if c > i:
                    rows[r][c] = rows[r].get(c, Fraction(0)) - f * v
            rows[r].pop(i, None)
    return minors


def minors_B_closed(k: int) -> float:
    """``(k+2)^2 / 2^(k+2)`` for even ``k``, ``(k+1)(k+3) / 2^(k+2)`` for odd."""
    num = (k + 2) ** 2 if k % 2 == 0 else (k + 1) * (k + 3)
    return math.ldexp(num, -(k + 2))


def phi_matrix(n: int, x: float) -> np.ndarray:
    """Dense ``Phi_n(x) = 2x B - A``; ``n = 1`` gives ``[[2x]]``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return 2.0 * x * _band_matrix(n, _B_BANDS) - _band_matrix(n, _A_BANDS)


def _det_lu(m: np.ndarray) -> float:
    a = np.array(m, dtype=float)
    n = a.shape[0]
    det = 1.0
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if a[p, k] == 0.0:
            return 0.0
        if p != k:
            a[[k, p]] = a[[p, k]]
            det = -det
        det *= a[k, k]
        a[k + 1:, k:] -= np.outer(a[k + 1:, k] / a[k, k], a[k, k:])
    return det


def det_direct(k: int, x: float, scaled: bool = False) -> float:
    """Determinant of the leading ``k x k`` block of ``Phi`` by Gaussian
    elimination with partial pivoting. Reserved for ``k <= 24``.

    With ``scaled`` each row is multiplied by 2 and the result by 4, giving
    ``2^(k+2) Delta_k`` without an extra rounding step.
    """
    if not 1 <= k <= 24:
        raise ValueError(f"direct determinant is limited to 1 <= k <= 24, got {k}")
    m = phi_matrix(k, x)
    if scaled:
        return 4.0 * _det_lu(2.0 * m)
    return _det_lu(m)


@dataclass(frozen=True)
class DetCoefficients:
    """Recurrence weights ``b_1..b_10`` and the order-5 factor ``c_1..c_5`` at ``x``."""

    x: float
    b: tuple[float, ...]
    c: tuple[float, ...]

    def char_poly_10(self, lam: complex) -> complex:
        return lam**10 - sum(bj * lam ** (9 - j) for j, bj in enumerate(self.b))

    def char_poly_5(self, lam: complex) -> complex:
        return lam**5 - sum(cj * lam ** (4 - j) for j, cj in enumerate(self.c))


def b_coefficients(x: complex) -> DetCoefficients:
    x2 = x * x
    x4 = x2 * x2
    x6 = x4 * x2
    x8 = x4 * x4
    b1 = 8 * x2 - 3
    b2 = -24 * x4 + 16 * x2 - 13 / 4
    b3 = 32 * x6 - 24 * x4 + 8 * x2 - 1
    b4 = -16 * x8 + 6 * x4 - 4 * x2 + 7 / 8
    b5 = 16 * x8 - 16 * x6 + 12 * x4 - 5 * x2 + 7 / 8
    b = (b1, b2, b3, b4, b5, b4 / 4, b3 / 16, b2 / 64, b1 / 256, -1 / 1024)
    c1 = 4 * x2 - 3 / 2
    c2 = -4 * x4 + 2 * x2 - 1 / 2
    c = (c1, c2, -c2 / 2, -c1 / 8, 1 / 32)
    return DetCoefficients(x=x, b=b, c=c)


def det_recurrence(n: int, x: float, scaled: bool = False) -> float:
    """``Delta_n`` from direct initial values ``Delta_1..Delta_20`` and, for
    ``n >= 21``, ``Delta_N = sum_j 2^-j b_j Delta_{N-2j}``.

    Runs on the rescaled sequence ``S_N = 2^(N+2) Delta_N``, for which the
    weights become ``2^j b_j``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    s = [0.0] + [det_direct(k, x, scaled=True) for k in range(1, min(n, 20) + 1)]
    if n > 20:
        w = [2.0 ** (j + 1) * bj for j, bj in enumerate(b_coefficients(x).b)]
        for big_n in range(21, n + 1):
            s.append(sum(w[j] * s[big_n - 2 * (j + 1)] for j in range(10)))
    return s[n] if scaled else math.ldexp(s[n], -(n + 2))


def det_closed(n: int, x: float, scaled: bool = False) -> float:
    """Closed Chebyshev form of ``Delta_n(x)`` on ``-1 < x < 1``.

    Odd ``n``: ``(n+3) 2^-(n+2) U_m(x) U'_m(x)``, ``m = (n+1)/2``.
    Even ``n``: ``2^-(n+2) (U'_{k+1}(x)^2 - U'_k(x)^2)``, ``k = n/2``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not -1.0 < x < 1.0:
        raise ValueError(f"closed form needs |x| < 1, got {x}")
    if n % 2:
        m = (n + 1) // 2
        s = (n + 3) * eval_U(m, x) * eval_U_prime(m, x)
    else:
        k = n // 2
        s = eval_U_prime(k + 1, x) ** 2 - eval_U_prime(k, x) ** 2
    return s if scaled else math.ldexp(s, -(n + 2))


def psi_solution_residual(kind: str, n: int, z: complex, *, alpha: complex = 1.0,
                          beta: complex = 0.0, gamma: complex = 0.0) -> float:
    """Relative residual of ``Psi_n - sum_j 2^j b^_j Psi_{n-j}`` with
    ``b^_j = b_j((z + 1/z)/2)``.

    ``kind`` selects the candidate solution: ``"affine"`` (``alpha + beta n``),
    ``"zpow"`` (``(gamma + n) z^(2n)``) or ``"zinvpow"`` (``(gamma + n) z^(-2n)``).
    The residual is divided by the largest term magnitude in the sum.
    """
    if n < 11:
        raise ValueError(f"need n >= 11 for ten back-values, got {n}")
    z = complex(z)
    if kind == "affine":
        def psi(k): return alpha + beta * k
    elif kind == "zpow":
        def psi(k): return (gamma + k) * z ** (2 * k)
    elif kind == "zinvpow":
        def psi(k): return (gamma + k) * z ** (-2 * k)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    bh = b_coefficients((z + 1 / z) / 2).b
    terms = [psi(n)] + [-(2 ** (j + 1)) * bh[j] * psi(n - j - 1) for j in range(10)]
    scale = max(abs(t) for t in terms)
    return abs(sum(terms)) / scale if scale else 0.0


@dataclass(frozen=True)
class EigenPair:
    lam: float
    vector: np.ndarray
    residual: float


def _cholesky(b: np.ndarray) -> np.ndarray:
    n = b.shape[0]
    low = np.zeros_like(b)
    for j in range(n):
        d = b[j, j] - low[j, :j] @ low[j, :j]
        if d <= 0.0:
            raise ArithmeticError(f"nonpositive Cholesky pivot {d!r} at {j}")
        low[j, j] = math.sqrt(d)
        low[j + 1:, j] = (b[j + 1:, j] - low[j + 1:, :j] @ low[j, :j]) / low[j, j]
    return low


def _round_robin(n: int) -> list[list[tuple[int, int]]]:
    # each round pairs every index once; a full set of rounds covers every pair
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < n and q < n:
                pairs.append((min(p, q), max(p, q)))
        rounds.append(pairs)
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(s: np.ndarray, tol: float = 1e-13, max_sweeps: int = 60):
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps visit every off-diagonal pair once, in round-robin rounds of disjoint
    pairs so that each round is a single vectorised update. Stops once the
    off-diagonal Frobenius norm is at most ``tol`` times the full norm.
    """
    a = np.array(s, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    total = np.linalg.norm(a)
    if n == 1 or total == 0.0:
        return np.diag(a).copy(), v
    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * total:
            break
        for pairs in rounds:
            p = np.array([pq[0] for pq in pairs])
            q = np.array([pq[1] for pq in pairs])
            apq = a[p, q]
            active = apq != 0.0
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t[theta == 0.0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            sn = t * c
            # columns then rows: A <- J^T A J with disjoint (p, q) planes
            ap, aq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c * ap - sn * aq
            a[:, q] = sn * ap + c * aq
            ap, aq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * ap - sn[:, None] * aq
            a[q, :] = sn[:, None] * ap + c[:, None] * aq
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = c * vp - sn * vq
            v[:, q] = sn * vp + c * vq
    return np.diag(a).copy(), v


def generalized_eigen(n: int) -> list[EigenPair]:
    """All eigenpairs of ``det(A - lambda B) = 0``, ascending.

    ``B = L L^T`` (Cholesky, guaranteed by positive definiteness of ``B``),
    Jacobi on ``L^-1 A L^-T``, eigenvectors mapped back by ``L^-T``.
    """
    if not 2 <= n <= 500:
        raise ValueError(f"pencil dimension must be in [2, 500], got {n}")
    pencil = build_pencil(n)
    a, b = pencil.A, pencil.B
    low = _cholesky(b)
    linv = np.linalg.solve(low, np.eye(n))
    c = linv @ a @ linv.T
    c = 0.5 * (c + c.T)
    w, v = jacobi_eigh(c)
    z = linv.T @ v
    order = np.argsort(w, kind="stable")
    pairs = []
    for i in order:
        vec = z[:, i] / np.max(np.abs(z[:, i]))
        res = float(np.max(np.abs((a - w[i] * b) @ vec)))
        pairs.append(EigenPair(lam=float(w[i]), vector=vec, residual=res))
    return pairs


def sharp_bound(n: int) -> float:
    """Sharp bound on ``|a_2|``: ``2 mu_n`` (odd ``n``) or ``2 eta_n`` (even)."""
    if n < 2:
        raise ValueError(f"degree must be >= 2, got {n}")
    return 2.0 * (compute_mu(n) if n % 2 else compute_eta(n))
