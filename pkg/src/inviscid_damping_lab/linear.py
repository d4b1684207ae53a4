"""Exact linearized dynamics around Couette flow: the Orr streamfunction.

In the shear frame z = x - t y the linearized vorticity is frozen, and the
streamfunction is recovered mode by mode through the tilted Poisson symbol
-(k^2 + (eta - k t)^2).  These closed forms are the ground-truth oracle for
the nonlinear integrator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import SpectralField, shear_derivative

MEAN_RTOL = 1e-12


@dataclass(frozen=True)
class OrrResult:
    t: float
    phi_hat: SpectralField
    ux_hat: SpectralField
    uy_hat: SpectralField


def _require_zero_mean(f: SpectralField):
    scale = max(float(np.max(np.abs(f.coeffs))), 1e-300)
    if abs(f.coeffs[0, 0]) > MEAN_RTOL * scale:
        raise ValueError(
            f"input must have zero mean; |c(0,0)| = {abs(f.coeffs[0, 0]):.3e}"
        )


def orr_streamfunction(omega_in: SpectralField, t: float) -> SpectralField:
    """phi_hat(t,k,eta) = -omega_hat(k,eta) / (k^2 + (eta - k t)^2), gauge (0,0) -> 0."""
    _require_zero_mean(omega_in)
    d = omega_in.domain
    denom = d.k2d ** 2 + (d.eta2d - t * d.k2d) ** 2
    denom[0, 0] = 1.0
    phi = -omega_in.coeffs / denom
    phi[0, 0] = 0.0
    return SpectralField(d, phi, omega_in.reality_flag)


def linear_velocity(omega_in: SpectralField, t: float):
    """Shear-frame perturbation velocity (Ux_hat, Uy_hat) of the frozen vorticity.

    Ux = -(d_v - t d_z) phi and Uy = d_z phi; the frame map is measure
    preserving so the L2 norms equal the physical-frame ones.
    """
    phi = orr_streamfunction(omega_in, t)
    d = phi.domain
    ux = SpectralField(d, -shear_derivative(phi, t).coeffs, phi.reality_flag)
    uy = SpectralField(d, 1j * d.k2d_sym * phi.coeffs, phi.reality_flag)
    return ux, uy


def orr_amplification(k: int, eta: float, t: float) -> float:
    """|phi_hat(t)| / |phi_hat(0)| for a unit mode; peaks at t = eta/k with value (k^2+eta^2)/k^2."""
    if k == 0:
        raise ValueError("orr_amplification requires k != 0")
    return (k ** 2 + eta ** 2) / (k ** 2 + (eta - k * t) ** 2)


def decay_exponent_fit(series) -> tuple[float, float]:
    """Least-squares slope and r^2 of log(value) against log(t).

    Expects at least 5 points with strictly increasing positive t and positive
    values.
    """
    pts = list(series)
    if len(pts) < 5:
        raise ValueError(f"decay fit needs at least 5 points, got {len(pts)}")
    t = np.array([p[0] for p in pts], dtype=float)
    v = np.array([p[1] for p in pts], dtype=float)
    if np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise ValueError("t values must be positive and strictly increasing")
    if np.any(v <= 0):
        raise ValueError("values must be positive for a log-log fit")
    x = np.log(t)
    y = np.log(v)
    xm = x - x.mean()
    ym = y - y.mean()
    sxx = float(np.dot(xm, xm))
    slope = float(np.dot(xm, ym) / sxx)
    resid = ym - slope * xm
    ss_tot = float(np.dot(ym, ym))
    ss_res = float(np.dot(resid, resid))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return slope, r2
