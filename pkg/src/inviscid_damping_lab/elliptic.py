"""Coordinate-transform quantities v, v', v'' and the shear-frame Laplacians.

The constant-coefficient operator is

    Delta_L = d_zz + (d_v - t d_z)^2,   symbol -(k^2 + (eta - t k)^2),

inverted exactly mode by mode (losing ellipticity at the critical times
t = eta/k, where the symbol degenerates to -k^2).  The variable-coefficient
operator carries the coordinate map:

    Delta_t phi = d_zz phi + (v')^2 (d_v - t d_z)^2 phi + v'' (d_v - t d_z) phi,

implemented as Delta_L plus the perturbation with coefficients a = (v')^2 - 1
and b = v'', so that identity coordinates reproduce Delta_L exactly.  The
inverse of Delta_t is a Delta_L-preconditioned fixed-point iteration whose
divergence is the numerical shadow of that loss of ellipticity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .linear import orr_streamfunction, _require_zero_mean
from .spectral import (
    DomainSpec,
    SpectralField,
    dealias,
    grid_to_coeffs,
    coeffs_to_grid,
    l2_norm,
    profile_derivative,
    profile_to_physical,
    shear_derivative,
)

CONTRACTION_GUARD = 0.5


class ContractionGuardError(ValueError):
    """Coefficients too far from identity for the perturbative inversion."""


class FixedPointDivergenceError(RuntimeError):
    """Richardson iteration failed to reach the residual tolerance."""

    def __init__(self, message, residual_history):
        super().__init__(message)
        self.residual_history = list(residual_history)


class MonotonicityError(ValueError):
    """y -> v(t, y) stopped being strictly increasing."""


@dataclass(frozen=True)
class CoordFields:
    """Samples of v(t, y) and the profiles v', v'' re-indexed to the v grid."""

    domain: DomainSpec
    t: float
    v_of_y: np.ndarray
    vprime: np.ndarray
    vdoubleprime: np.ndarray
    monotone_flag: bool


def identity_coords(domain: DomainSpec, t: float) -> CoordFields:
    return CoordFields(
        domain=domain,
        t=t,
        v_of_y=domain.y_nodes.copy(),
        vprime=np.ones(domain.N_y),
        vdoubleprime=np.zeros(domain.N_y),
        monotone_flag=True,
    )


def _periodic_pchip(v_samples: np.ndarray, values: np.ndarray, L_y: float, targets):
    """Monotone cubic interpolation with periodic wrap of the sample set."""
    wrap = 4
    period = 2.0 * L_y
    v_ext = np.concatenate(
        [v_samples[-wrap:] - period, v_samples, v_samples[:wrap] + period]
    )
    f_ext = np.concatenate([values[-wrap:], values, values[:wrap]])
    return PchipInterpolator(v_ext, f_ext)(targets)


def build_coords(state) -> CoordFields:
    """Coordinate map v = y + Phi(t, y)/t from the accumulated mean-flow shift.

    v' and v'' come from spectral y-differentiation of Phi and are resampled
    onto the uniform v grid.  Raises MonotonicityError when the map folds,
    which marks the exit from the perturbative regime.
    """
    if state.t <= 0:
        raise ValueError(f"build_coords requires t > 0, got {state.t}")
    d = state.f_hat.domain
    phi_vec = state.phi_accum
    phi_phys = profile_to_physical(d, phi_vec)
    dphi = profile_to_physical(d, profile_derivative(d, phi_vec, 1))
    ddphi = profile_to_physical(d, profile_derivative(d, phi_vec, 2))
    y = d.y_nodes
    v = y + phi_phys / state.t
    vp_of_y = 1.0 + dphi / state.t
    vpp_of_y = ddphi / state.t

    dv = np.diff(v)
    wrap_gap = (v[0] + 2.0 * d.L_y) - v[-1]
    monotone = bool(np.all(dv > 0) and wrap_gap > 0)
    if not monotone:
        bad = int(np.argmin(np.append(dv, wrap_gap)))
        y_lo = y[bad]
        y_hi = y[(bad + 1) % d.N_y]
        raise MonotonicityError(
            f"v(t, y) is not strictly increasing on [{y_lo:.6g}, {y_hi:.6g}] "
            f"at t = {state.t:.6g}"
        )
    vprime = _periodic_pchip(v, vp_of_y, d.L_y, y)
    vdoubleprime = _periodic_pchip(v, vpp_of_y, d.L_y, y)
    return CoordFields(
        domain=d, t=state.t, v_of_y=v, vprime=vprime,
        vdoubleprime=vdoubleprime, monotone_flag=True,
    )


def solvability_margin(state) -> float:
    """1 - sup over the grid of |(1/t) integral_0^t <f>(s, v) ds|.

    Positive values mean the physical-frame solution can be recovered from
    the transformed one.  At t = 0 the time average degenerates to <f>(0).
    """
    d = state.f_hat.domain
    if state.t > 0:
        avg = state.favg_accum / state.t
    else:
        avg = state.f_hat.coeffs[0, :]
    return 1.0 - float(np.max(np.abs(profile_to_physical(d, avg))))


# --------------------------------------------------------------------------
# operators

def apply_delta_L(phi: SpectralField, t: float) -> SpectralField:
    d = phi.domain
    symbol = -(d.k2d ** 2 + (d.eta2d - t * d.k2d) ** 2)
    return SpectralField(d, symbol * phi.coeffs, phi.reality_flag)


def invert_delta_L(f: SpectralField, t: float) -> SpectralField:
    """phi_hat = -f_hat / (k^2 + (eta - t k)^2) with gauge phi(0,0) = 0."""
    return orr_streamfunction(f, t)


def _perturbation(phi: SpectralField, coords: CoordFields, t: float) -> SpectralField:
    """(Delta_t - Delta_L) phi with pseudo-spectral, dealiased coefficient products."""
    d = phi.domain
    a = coords.vprime ** 2 - 1.0
    b = coords.vdoubleprime
    s1 = shear_derivative(phi, t)
    s2 = shear_derivative(s1, t)
    out = np.zeros_like(phi.coeffs)
    if np.any(a != 0.0):
        phys = coeffs_to_grid(d, s2.coeffs).real * a[np.newaxis, :]
        out = out + grid_to_coeffs(d, phys)
    if np.any(b != 0.0):
        phys = coeffs_to_grid(d, s1.coeffs).real * b[np.newaxis, :]
        out = out + grid_to_coeffs(d, phys)
    pert = SpectralField(d, out, phi.reality_flag)
    return dealias(pert)


def apply_delta_t(phi: SpectralField, coords: CoordFields, t: float) -> SpectralField:
    if not coords.monotone_flag:
        raise MonotonicityError("apply_delta_t requires monotone coordinates")
    base = apply_delta_L(phi, t)
    pert = _perturbation(phi, coords, t)
    return SpectralField(phi.domain, base.coeffs + pert.coeffs, phi.reality_flag)


@dataclass(frozen=True)
class InversionResult:
    phi: SpectralField
    iterations: int
    residuals: list


def contraction_guard_value(coords: CoordFields) -> float:
    dev = float(np.max(np.abs(coords.vprime - 1.0)))
    vpp = float(np.max(np.abs(coords.vdoubleprime)))
    return dev * (2.0 + dev) + vpp


def invert_delta_t(
    f: SpectralField,
    coords: CoordFields,
    t: float,
    tol: float = 1e-10,
    max_iter: int = 50,
) -> InversionResult:
    """Solve Delta_t phi = f by phi_{n+1} = Delta_L^{-1}[f - (Delta_t - Delta_L) phi_n].

    Operates on the x-fluctuating subspace (k != 0), which is the part of the
    streamfunction the dynamics consumes; data in the k = 0 row would couple
    to the mean mode through the variable coefficients and make the gauged
    iteration inconsistent, so it is rejected.  Refuses when the coefficient
    deviation exceeds the contraction guard, and reports the residual history
    on divergence.
    """
    _require_zero_mean(f)
    scale = max(float(np.max(np.abs(f.coeffs))), 1e-300)
    if float(np.max(np.abs(f.coeffs[0, :]))) > 1e-12 * scale:
        raise ValueError(
            "invert_delta_t requires data without x-average content "
            "(k = 0 rows must vanish)"
        )
    guard = contraction_guard_value(coords)
    if guard >= CONTRACTION_GUARD:
        raise ContractionGuardError(
            f"coefficient deviation {guard:.3f} >= {CONTRACTION_GUARD}; "
            "perturbative inversion refused"
        )
    norm_f = l2_norm(f)
    if norm_f == 0.0:
        return InversionResult(invert_delta_L(f, t), 0, [0.0])
    phi = invert_delta_L(f, t)
    residuals = []
    for n in range(1, max_iter + 1):
        pert = _perturbation(phi, coords, t)
        res_field = SpectralField(
            f.domain,
            apply_delta_L(phi, t).coeffs + pert.coeffs - f.coeffs,
            f.reality_flag,
        )
        res = l2_norm(res_field) / norm_f
        residuals.append(res)
        if res <= tol:
            return InversionResult(phi, n, residuals)
        if len(residuals) >= 2 and res > residuals[-2]:
            raise FixedPointDivergenceError(
                f"residual increased at iteration {n} ({residuals[-2]:.3e} -> {res:.3e})",
                residuals,
            )
        rhs = SpectralField(
            f.domain, f.coeffs - pert.coeffs, f.reality_flag
        )
        phi = invert_delta_L(rhs, t)
    raise FixedPointDivergenceError(
        f"residual {residuals[-1]:.3e} above tol {tol:.1e} after {max_iter} iterations",
        residuals,
    )
