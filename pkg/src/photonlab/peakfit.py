"""Gaussian peak model and a small Levenberg-Marquardt least-squares fitter.

The model is parameterized by its full width at half maximum:

    f(t) = b + a * exp(-4*ln2*(t - t0)^2 / sigma^2)

which makes ``sigma`` directly comparable to measured timing jitter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["GaussianFit", "gaussian_peak", "fit_peak"]

_FOUR_LN2 = 4.0 * math.log(2.0)


@dataclass
class GaussianFit:
    """Fitted peak parameters, their standard errors, and fit diagnostics."""

    a: float
    b: float
    t0_ps: float
    sigma_fwhm_ps: float
    a_err: float = float("nan")
    b_err: float = float("nan")
    t0_err: float = float("nan")
    sigma_err: float = float("nan")
    converged: bool = False
    n_iter: int = 0
    residual_norm: float = float("nan")

    def params(self) -> np.ndarray:
        return np.array([self.a, self.b, self.t0_ps, self.sigma_fwhm_ps])


def gaussian_peak(t, a, b, t0, sigma):
    """Peak-plus-background model; ``sigma`` is the FWHM."""
    t = np.asarray(t, dtype=float)
    return b + a * np.exp(-_FOUR_LN2 * (t - t0) ** 2 / sigma**2)


def _jacobian(t, a, b, t0, sigma):
    u = t - t0
    e = np.exp(-_FOUR_LN2 * u**2 / sigma**2)
    jac = np.empty((t.size, 4))
    jac[:, 0] = e
    jac[:, 1] = 1.0
    jac[:, 2] = a * e * 2.0 * _FOUR_LN2 * u / sigma**2
    jac[:, 3] = a * e * 2.0 * _FOUR_LN2 * u**2 / sigma**3
    return jac


def fit_peak(
    t,
    y,
    init: GaussianFit | None = None,
    max_iter: int = 500,
    step_tol: float = 1e-8,
) -> GaussianFit:
    """Unweighted least-squares fit of the FWHM Gaussian via Levenberg-Marquardt.

    Uses the analytic Jacobian. Convergence is declared when the largest
    relative parameter step drops below ``step_tol``; otherwise the best
    iterate is returned with ``converged=False``.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.size == 0 or t.size != y.size:
        raise ValueError("t and y must be non-empty and of equal length")

    if init is None:
        init = initial_guess(t, y)
    p = init.params().astype(float)
    p[3] = abs(p[3]) if p[3] != 0 else 1.0

    def ssr(params):
        return float(np.sum((y - gaussian_peak(t, *params)) ** 2))

    lam = 1e-3
    current = ssr(p)
    converged = False
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        jac = _jacobian(t, *p)
        r = y - gaussian_peak(t, *p)
        jtj = jac.T @ jac
        jtr = jac.T @ r
        step = None
        for _ in range(50):
            damped = jtj + lam * np.diag(np.maximum(np.diag(jtj), 1e-12))
            try:
                delta = np.linalg.solve(damped, jtr)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = p + delta
            trial[3] = abs(trial[3])
            if trial[3] == 0:
                lam *= 10.0
                continue
            trial_ssr = ssr(trial)
            if trial_ssr <= current:
                step = delta
                p = trial
                current = trial_ssr
                lam = max(lam / 10.0, 1e-12)
                break
            lam *= 10.0
        if step is None:
            break
        scale = np.maximum(np.abs(p), 1e-12)
        if np.max(np.abs(step) / scale) < step_tol:
            converged = True
            break

    a, b, t0, sigma = p
    errs = _standard_errors(t, y, p)
    return GaussianFit(
        a=float(a),
        b=float(b),
        t0_ps=float(t0),
        sigma_fwhm_ps=float(sigma),
        a_err=errs[0],
        b_err=errs[1],
        t0_err=errs[2],
        sigma_err=errs[3],
        converged=converged,
        n_iter=n_iter,
        residual_norm=math.sqrt(current),
    )


def _standard_errors(t, y, p) -> np.ndarray:
    n, k = t.size, 4
    jac = _jacobian(t, *p)
    r = y - gaussian_peak(t, *p)
    dof = max(n - k, 1)
    s2 = float(r @ r) / dof
    try:
        cov = s2 * np.linalg.inv(jac.T @ jac)
        return np.sqrt(np.maximum(np.diag(cov), 0.0))
    except np.linalg.LinAlgError:
        return np.full(k, float("nan"))


def initial_guess(t, y) -> GaussianFit:
    """Starting point from the data: max (a, t0), median (b), half-max width."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    b0 = float(np.median(y))
    imax = int(np.argmax(y))
    a0 = max(float(y[imax]) - b0, 1e-12)
    t00 = float(t[imax])
    half = b0 + 0.5 * a0
    above = np.flatnonzero(y > half)
    if above.size >= 2:
        width = float(t[above[-1]] - t[above[0]])
    else:
        width = 0.0
    spacing = float(np.min(np.diff(t))) if t.size > 1 else 1.0
    sigma0 = max(width, spacing)
    return GaussianFit(a=a0, b=b0, t0_ps=t00, sigma_fwhm_ps=sigma0)
