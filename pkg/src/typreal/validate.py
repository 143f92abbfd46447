"""Independent checks on the extremal polynomials.

Each check recomputes a quantity by a route that does not share code with the
construction it checks: the eigenvalue oracle against the closed-form bound,
a dense sine-sum grid against typical realness, three determinant routes
against each other, two coefficient constructions against each other, and a
spectral factorization of the kernel against the autocorrelation identity.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .chebyshev import compute_eta, compute_mu
from .extremal import (
    TypicallyRealPolynomial,
    coefficients_from_compact,
    coefficients_odd_closed,
    eigenvector_even,
    eigenvector_odd,
    extremizer,
    gammas_from_factor,
    pipeline_coefficients,
)
from .pencil import build_pencil, det_closed, det_recurrence, generalized_eigen, sharp_bound

__all__ = [
    "FactorizationError",
    "NonFactorizableError",
    "RootPairingError",
    "Tolerances",
    "CertificationReport",
    "certify_typically_real",
    "cosine_coefficients",
    "cosine_poly",
    "fejer_riesz_factorize",
    "pencil_residual",
    "determinant_residual",
    "certify",
    "DEFAULT_SEED",
]

DEFAULT_SEED = 20240607
# random abscissae for determinant checks stay where the recurrence is well
# conditioned; its characteristic roots coalesce at x = +-1
DET_SAMPLE_RANGE = (-0.9, 0.9)


# near-circle roots inside this band are polished before pairing
_CAPTURE_BAND = 1e-3


class FactorizationError(ValueError):
    """Spectral factorization failed."""


class NonFactorizableError(FactorizationError):
    """The cosine polynomial is negative somewhere on (0, pi)."""


class RootPairingError(FactorizationError):
    """Unit-circle roots could not be matched into double roots."""


def certify_typically_real(p: TypicallyRealPolynomial, grid: int = 10_000,
                           tol: float = 1e-10) -> tuple[float, float, bool]:
    """Minimum of ``Im P(e^{it})`` over ``t_k = k pi / (grid + 1)``, ``k = 1..grid``.

    ``Im P(e^{it}) = sum a_j sin(j t)`` is evaluated by Horner in ``e^{it}``.
    Returns ``(min, argmin, min >= -tol)``.
    """
    if grid < 1000:
        raise ValueError(f"grid must be >= 1000, got {grid}")
    t = np.arange(1, grid + 1) * (math.pi / (grid + 1))
    w = np.exp(1j * t)
    acc = np.zeros_like(w)
    for a in p.coeffs[::-1]:
        acc = (acc + a) * w
    im = acc.imag
    k = int(np.argmin(im))
    return float(im[k]), float(t[k]), bool(im[k] >= -tol)


def cosine_coefficients(p: TypicallyRealPolynomial) -> np.ndarray:
    """``gamma`` with ``Im P(e^{it}) = sin t (gamma_1 + 2 sum gamma_k cos((k-1)t))``.

    Inverts ``a_l = gamma_l - gamma_{l+2}`` by summing ``a`` in steps of two from
    the top; normalised so that ``gamma_1 - gamma_3 = a_1``.
    """
    a = np.asarray(p.coeffs, dtype=float)
    g = a.copy()
    for i in range(a.size - 3, -1, -1):
        g[i] += g[i + 2]
    return g


def cosine_poly(gamma, t) -> np.ndarray:
    """``gamma_1 + 2 sum_{k>=2} gamma_k cos((k-1) t)``."""
    g = np.asarray(gamma, dtype=float)
    t = np.asarray(t, dtype=float)
    k = np.arange(1, g.size)
    return g[0] + 2.0 * (np.cos(np.multiply.outer(t, k)) @ g[1:])


def fejer_riesz_factorize(gamma, *, pair_tol: float = 1e-6, neg_tol: float = 1e-9,
                          grid: int = 10_000, recon_tol: float = 1e-8) -> np.ndarray:
    """Real ``delta`` with ``gammas_from_factor(delta) == gamma`` and ``delta_1 > 0``.

    The Laurent polynomial ``sum_{|k|<m} gamma_{|k|+1} z^k`` has roots in pairs
    ``r, 1/r``; ``delta`` is rebuilt from the roots inside the unit disk. Roots
    on the circle come in (numerically split) double pairs; each pair is
    replaced by its mean projected back onto the circle and kept once.

    Raises :class:`NonFactorizableError` if the cosine polynomial dips below
    ``-neg_tol``, :class:`RootPairingError` if circle roots cannot be paired,
    and :class:`FactorizationError` if the rebuilt factor misses ``gamma`` by
    more than ``recon_tol`` relative (root-finding breakdown at high degree).
    """
    g = np.asarray(gamma, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ValueError("gamma must be a non-empty vector")
    n_out = g.size
    scale = np.max(np.abs(g))
    if scale == 0.0:
        raise NonFactorizableError("gamma vanishes identically")
    t = np.arange(1, grid + 1) * (math.pi / (grid + 1))
    c_min = float(np.min(cosine_poly(g, np.concatenate([[0.0], t, [math.pi]]))))
    if c_min < -neg_tol:
        raise NonFactorizableError(f"cosine polynomial reaches {c_min:.3e} < -{neg_tol:g}")

    # trailing zeros lower the Laurent degree; delta is padded back at the end
    m = n_out
    while m > 1 and abs(g[m - 1]) <= 1e-15 * scale:
        m -= 1
    if m == 1:
        if g[0] <= 0.0:
            raise NonFactorizableError("gamma_1 must be positive")
        out = np.zeros(n_out)
        out[0] = math.sqrt(g[0])
        return out

    laurent = np.concatenate([g[m - 1:0:-1], g[:m]])  # highest power first
    roots = np.roots(laurent)

    # Companion eigenvalues split a double root by ~sqrt(eps * cond), which
    # exceeds 1e-6 for degrees in the twenties, so near-circle roots are first
    # polished by Newton on p' (where a double root of p is simple).
    dp, ddp = np.polyder(laurent), np.polyder(laurent, 2)
    coef_norm = float(np.sum(np.abs(laurent)))
    near = np.abs(np.abs(roots) - 1.0) <= _CAPTURE_BAND
    chosen = [r for r in roots[~near] if abs(r) < 1.0]
    candidates = list(zip(roots[near], _newton(dp, ddp, roots[near])))
    while candidates:
        r, rho = candidates.pop(0)
        d = [abs(rho - other) for _, other in candidates]
        j = int(np.argmin(d)) if d else -1
        if (j >= 0 and d[j] <= pair_tol and abs(abs(rho) - 1.0) <= pair_tol
                and abs(np.polyval(laurent, rho)) <= 1e-10 * coef_norm):
            _, other = candidates.pop(j)
            mid = 0.5 * (rho + other)
            chosen.append(mid / abs(mid))
        elif abs(abs(r) - 1.0) > pair_tol:
            # an ordinary root that merely sits close to the circle
            if abs(r) < 1.0:
                chosen.append(r)
        else:
            nearest = f"{d[j]:.3g}" if d else "none"
            raise RootPairingError(
                f"unit-circle root {r:.6g} has no partner within {pair_tol:g} (nearest {nearest})")
    if len(chosen) != m - 1:
        raise RootPairingError(f"selected {len(chosen)} roots, expected {m - 1}")

    delta = np.real(np.poly(chosen))[::-1] if chosen else np.ones(1)
    delta *= math.sqrt(g[0] / float(delta @ delta))
    if delta[0] < 0:
        delta = -delta
    out = np.zeros(n_out)
    out[:m] = delta
    gap = float(np.max(np.abs(gammas_from_factor(out) - g))) / scale
    if not gap <= recon_tol:
        raise FactorizationError(f"reconstruction misses gamma by {gap:.3e} (relative)")
    return out


def _newton(f, df, z0: np.ndarray, iters: int = 8) -> np.ndarray:
    # quadratic convergence from ~1e-6 reaches rounding level in 3-4 steps;
    # the extra steps only jitter at that level
    z = np.array(z0, dtype=complex)
    for _ in range(iters):
        d = np.polyval(df, z)
        safe = d != 0
        z[safe] -= np.polyval(f, z[safe]) / d[safe]
    return z


def pencil_residual(n: int, lam: float, z) -> float:
    """``||(A - lam B) z||_inf / ||z||_inf``."""
    z = np.asarray(z, dtype=float)
    if z.shape != (n,):
        raise ValueError(f"z must have shape ({n},), got {z.shape}")
    zn = float(np.max(np.abs(z)))
    if zn == 0.0:
        raise ValueError("z must be nonzero")
    pen = build_pencil(n)
    return float(np.max(np.abs((pen.A - lam * pen.B) @ z))) / zn


def determinant_residual(n: int, xs) -> float:
    """Worst ``|rec - closed| / max(|rec|, |closed|, 1)`` on the rescaled
    determinants ``2^(n+2) Delta_n(x)`` over the sample points."""
    worst = 0.0
    for x in xs:
        r = det_recurrence(n, float(x), scaled=True)
        c = det_closed(n, float(x), scaled=True)
        worst = max(worst, abs(r - c) / max(abs(r), abs(c), 1.0))
    return worst


@dataclass(frozen=True)
class Tolerances:
    bound: float = 1e-9
    typically_real: float = 1e-10
    pencil: float = 1e-9
    recurrence: float = 1e-8
    pipeline: float = 1e-8
    factorization: float = 1e-8
    grid: int = 10_000
    det_samples: int = 20


@dataclass(frozen=True)
class CertificationReport:
    n: int
    bound_closed: float
    bound_oracle: float
    min_im_on_grid: float
    argmin_t: float
    pencil_residual: float
    recurrence_residual: float
    pipeline_vs_closed_gap: float
    factorization_gap: float
    passed: bool
    failed_stage: str | None = None
    detail: str | None = None

    def as_dict(self) -> dict:
        return asdict(self)


_NAN = float("nan")


@dataclass
class _Partial:
    n: int
    values: dict = field(default_factory=dict)

    def fail(self, stage: str, exc: Exception) -> CertificationReport:
        return self.report(False, stage, f"{type(exc).__name__}: {exc}")

    def report(self, passed: bool, stage: str | None, detail: str | None = None):
        keys = ("bound_closed", "bound_oracle", "min_im_on_grid", "argmin_t", "pencil_residual",
                "recurrence_residual", "pipeline_vs_closed_gap", "factorization_gap")
        vals = {k: self.values.get(k, _NAN) for k in keys}
        return CertificationReport(n=self.n, passed=passed, failed_stage=stage, detail=detail, **vals)


def _max_gap(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def certify(n: int, seed: int = DEFAULT_SEED, tol: Tolerances = Tolerances()) -> CertificationReport:
    """Run every check for degree ``n`` and aggregate the outcome.

    A raising sub-check yields a failed report naming that stage; otherwise
    ``passed`` is true iff each measured gap is within ``tol``. Stages run in
    order and the first tolerance violation is reported as ``failed_stage``.
    """
    if n < 2:
        raise ValueError(f"degree must be >= 2, got {n}")
    part = _Partial(n)
    v = part.values

    try:
        v["bound_closed"] = sharp_bound(n)
        v["bound_oracle"] = generalized_eigen(n)[-1].lam
    except Exception as exc:  # noqa: BLE001 - converted to a failed report
        return part.fail("bound", exc)

    try:
        p = extremizer(n, "max")
    except Exception as exc:  # noqa: BLE001
        return part.fail("extremizer", exc)

    try:
        v["min_im_on_grid"], v["argmin_t"], _ = certify_typically_real(p, tol.grid, tol.typically_real)
    except Exception as exc:  # noqa: BLE001
        return part.fail("typically_real", exc)

    try:
        if n % 2:
            z = eigenvector_odd(n, compute_mu(n)).z
        else:
            z = eigenvector_even(n, compute_eta(n)).z
        v["pencil_residual"] = pencil_residual(n, v["bound_closed"], z)
    except Exception as exc:  # noqa: BLE001
        return part.fail("pencil", exc)

    try:
        rng = np.random.default_rng(seed)
        xs = rng.uniform(*DET_SAMPLE_RANGE, size=tol.det_samples)
        v["recurrence_residual"] = determinant_residual(n, xs)
    except Exception as exc:  # noqa: BLE001
        return part.fail("recurrence", exc)

    try:
        pipe = pipeline_coefficients(n).coeffs
        gap = _max_gap(pipe, coefficients_from_compact(n))
        if n % 2:
            gap = max(gap, _max_gap(pipe, coefficients_odd_closed(n).coeffs))
        v["pipeline_vs_closed_gap"] = gap
    except Exception as exc:  # noqa: BLE001
        return part.fail("pipeline", exc)

    try:
        gamma = cosine_coefficients(p)
        delta = fejer_riesz_factorize(gamma)
        v["factorization_gap"] = _max_gap(gammas_from_factor(delta), gamma) / float(np.max(np.abs(gamma)))
    except Exception as exc:  # noqa: BLE001
        return part.fail("factorization", exc)

    checks = (
        ("bound", abs(v["bound_oracle"] - v["bound_closed"]) <= tol.bound),
        ("typically_real", v["min_im_on_grid"] >= -tol.typically_real),
        ("pencil", v["pencil_residual"] <= tol.pencil),
        ("recurrence", v["recurrence_residual"] <= tol.recurrence),
        ("pipeline", v["pipeline_vs_closed_gap"] <= tol.pipeline),
        ("factorization", v["factorization_gap"] <= tol.factorization),
    )
    for stage, ok in checks:
        if not ok:
            return part.report(False, stage, "tolerance exceeded")
    return part.report(True, None)
