"""Sharp bounds and extremal polynomials for the second coefficient of
typically real polynomials of fixed degree."""
from .chebyshev import compute_eta, compute_mu, compute_nu, eval_U, eval_U_prime, spectral_params
from .extremal import TypicallyRealPolynomial, compact_eval, extremizer, kernel_on_circle
from .pencil import det_closed, det_direct, det_recurrence, generalized_eigen, sharp_bound
from .validate import CertificationReport, certify, certify_typically_real, fejer_riesz_factorize

__all__ = [
    "CertificationReport",
    "TypicallyRealPolynomial",
    "certify",
    "certify_typically_real",
    "compact_eval",
    "compute_eta",
    "compute_mu",
    "compute_nu",
    "det_closed",
    "det_direct",
    "det_recurrence",
    "eval_U",
    "eval_U_prime",
    "extremizer",
    "fejer_riesz_factorize",
    "generalized_eigen",
    "kernel_on_circle",
    "sharp_bound",
    "spectral_params",
]

__version__ = "0.1.0"
