"""Independent numerical oracles used by the test suite.

Everything here deliberately avoids the closed forms implemented in the
package: derivatives come from finite differences, normalizing constants
from adaptive quadrature, and conditional Gaussian moments from a dense
Cholesky/Schur-complement computation.  A shared algebra mistake between
library and test would have to survive two unrelated derivations.
"""

import math

import numpy as np
from scipy import integrate, stats


def fd_first(f, x, h=1e-5):
    """Central first difference."""
    return (f(x + h) - f(x - h)) / (2.0 * h)


def fd_second(f, x, h=1e-4):
    """Central second difference."""
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)


_QUAD = dict(limit=300, epsabs=1e-12, epsrel=1e-10)


def normalization(logpdf, lo=-np.inf, hi=np.inf):
    """Integral of exp(logpdf) over (lo, hi) by adaptive quadrature."""
    value, _ = integrate.quad(lambda t: math.exp(logpdf(t)), lo, hi, **_QUAD)
    return value


def conditional_gaussian_oracle(gamma, i):
    """Coefficients and variance of X_i | X_1..X_{i-1} for a stationary series.

    Builds the dense i-by-i Toeplitz covariance from the autocovariance
    function ``gamma``, checks positive definiteness with a Cholesky
    factorization, then solves the normal equations directly.  Returns
    ``(coefficients, variance)`` with coefficients in history order (entry 0
    multiplies the oldest observation), matching the package convention.
    """
    cov = np.array([[gamma(abs(r - c)) for c in range(i)] for r in range(i)], dtype=float)
    np.linalg.cholesky(cov)
    if i == 1:
        return np.empty(0), float(cov[0, 0])
    coef = np.linalg.solve(cov[:-1, :-1], cov[:-1, -1])
    variance = float(cov[-1, -1] - cov[:-1, -1] @ coef)
    return coef, variance


def location_predictive_pdf(x, history, variance):
    """Flat-prior location predictive density by quadrature over the mean."""
    h = np.asarray(history, dtype=float)
    n = h.size
    center = h.mean()
    post_sd = math.sqrt(variance / n)

    def integrand(mu):
        return stats.norm.pdf(x, mu, math.sqrt(variance)) * stats.norm.pdf(mu, center, post_sd)

    value, _ = integrate.quad(integrand, center - 12 * post_sd, center + 12 * post_sd, **_QUAD)
    return value


def scale_predictive_pdf(x, history, mean):
    """Known-mean unknown-variance predictive density by quadrature.

    Uses the reference prior 1/v on the variance, which gives an
    inverse-gamma(n/2, ss/2) posterior.
    """
    h = np.asarray(history, dtype=float)
    n = h.size
    ss = float(np.sum((h - mean) ** 2))
    posterior = stats.invgamma(a=n / 2.0, scale=ss / 2.0)

    def integrand(v):
        return stats.norm.pdf(x, mean, math.sqrt(v)) * posterior.pdf(v)

    value, _ = integrate.quad(integrand, 0.0, np.inf, **_QUAD)
    return value


def simplex_grid(n_states, step=0.1):
    """All probability vectors whose entries are multiples of ``step``."""
    k = round(1.0 / step)
    rows = []

    def fill(prefix, remaining, slots):
        if slots == 1:
            rows.append(prefix + [remaining])
            return
        for j in range(remaining + 1):
            fill(prefix + [j], remaining - j, slots - 1)

    fill([], k, n_states)
    return np.asarray(rows, dtype=float) / k
