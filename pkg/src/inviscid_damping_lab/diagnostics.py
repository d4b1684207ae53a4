"""Damping-rate, scattering, and cascade observables of a shear-frame run.

Everything here is a pure reader of immutable simulation state.  The record
layout doubles as the diagnostics CSV schema; attribute order is column order.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from . import elliptic, gevrey
from .sim import SimState, xavg_velocity
from .spectral import (
    SpectralField,
    l2_norm,
    profile_l2,
    profile_to_physical,
)


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    ux_fluct_l2: float
    uy_l2: float
    ux_avg_gap_l2: float
    theta_sup: float
    dtv_sup: float
    enstrophy: float
    enstrophy_drift_rel: float
    highfreq_frac: float
    favg_l2: float
    pullback_cauchy: float
    weighted_energy: float
    solvability_margin: float

    def as_row(self):
        return [getattr(self, f.name) for f in fields(self)]


CSV_HEADER = [f.name for f in fields(DiagnosticsRecord)]


def x_average(f: SpectralField) -> np.ndarray:
    """The k = 0 slice of the spectrum, one complex value per eta."""
    return f.coeffs[0, :].copy()


def phi_profile(state: SimState) -> np.ndarray:
    """Spectrum of the accumulated mean-flow displacement Phi(t, .)."""
    out = state.phi_accum.copy()
    out[0] = 0.0
    return out


def u_infinity_estimate(state: SimState):
    """Two desk-scale estimates of the limiting shear profile and their gap.

    The first is the running time average Phi(t)/t of the x-averaged Ux, the
    second applies the mean Biot-Savart symbol i <f_hat>(eta)/eta to the
    current x-averaged vorticity (equivalently, the instantaneous <Ux>).
    Under the frozen linear dynamics both equal <Ux>(0, .) exactly; in the
    damping regime the gap closes like eps^2 log(t) / t.
    """
    d = state.f_hat.domain
    u_inst = xavg_velocity(d, state.f_hat.coeffs)
    if state.t > 0:
        u_avg = phi_profile(state) / state.t
    else:
        u_avg = u_inst.copy()
    gap = profile_l2(d, u_avg - u_inst)
    return u_avg, u_inst, gap


def theta_profile(state: SimState, u_inf: np.ndarray):
    """theta = Phi - t * u_inf; returns (spectrum, sup over the grid)."""
    d = state.f_hat.domain
    vec = phi_profile(state) - state.t * u_inf
    sup = float(np.max(np.abs(profile_to_physical(d, vec))))
    return vec, sup


def dtv_monitor(state: SimState):
    """[d_t v] = <Ux>(t,.)/t - Phi(t,.)/t^2; returns (spectrum, sup)."""
    d = state.f_hat.domain
    if state.t <= 0:
        zero = np.zeros(d.N_y, dtype=complex)
        return zero, 0.0
    u_inst = xavg_velocity(d, state.f_hat.coeffs)
    vec = u_inst / state.t - phi_profile(state) / state.t ** 2
    sup = float(np.max(np.abs(profile_to_physical(d, vec))))
    return vec, sup


def pullback(field: SpectralField, phi_vec: np.ndarray) -> SpectralField:
    """Spectrum of g(z, y) = f(z + Phi(y), y) for a given displacement spectrum.

    Implemented as the per-y phase shift exp(i k Phi(y)) in the mixed (k, y)
    representation; the shift is unitary on every y line, so the L2 norm of f
    is preserved exactly.
    """
    d = field.domain
    phi_phys = profile_to_physical(d, phi_vec)
    if not np.any(phi_phys):
        return field.copy()
    # inverse transform along eta only: mixed representation M[k, y]
    mixed = np.fft.ifft(field.coeffs * d.phase2d, axis=1) * d.N_y
    k_col = d.k_int.astype(float)[:, np.newaxis]
    mixed = mixed * np.exp(1j * k_col * phi_phys[np.newaxis, :])
    coeffs = np.fft.fft(mixed, axis=1) / d.N_y * d.phase2d
    return SpectralField(d, coeffs, field.reality_flag)


def pullback_profile(state: SimState) -> SpectralField:
    """Pullback of the current shear-frame vorticity through its own Phi."""
    return pullback(state.f_hat, phi_profile(state))


def highfreq_fraction(state: SimState, cutoff: float) -> float:
    """Enstrophy fraction whose original-frame frequency (k, eta - k t) exceeds cutoff."""
    if cutoff < 0:
        raise ValueError(f"cutoff must be nonnegative, got {cutoff}")
    d = state.f_hat.domain
    power = np.abs(state.f_hat.coeffs) ** 2
    total = float(np.sum(power))
    if total == 0.0:
        return 0.0
    lab_freq_sq = d.k2d ** 2 + (d.eta2d - state.t * d.k2d) ** 2
    high = float(np.sum(power[lab_freq_sq > cutoff ** 2]))
    return high / total


def weak_limit_gap(state: SimState) -> float:
    """||f||_2 - ||<f>||_2: strictly positive iff enstrophy lives at k != 0."""
    d = state.f_hat.domain
    return l2_norm(state.f_hat) - profile_l2(d, x_average(state.f_hat))


def collect_record(
    state: SimState,
    params,
    cutoff: float,
    prev_pullback: SpectralField | None = None,
):
    """Assemble one DiagnosticsRecord; returns (record, pullback field)."""
    from .sim import _velocity_coeffs

    d = state.f_hat.domain
    ux_c, uy_c = _velocity_coeffs(d, state.f_hat.coeffs, state.t)
    ux_fluct = ux_c.copy()
    ux_fluct[0, :] = 0.0
    ux_fluct_l2 = float(np.sqrt(np.sum(np.abs(ux_fluct) ** 2) * d.mode_weight))
    uy_l2 = float(np.sqrt(np.sum(np.abs(uy_c) ** 2) * d.mode_weight))

    u_avg, u_inst, _ = u_infinity_estimate(state)
    ux_avg_gap_l2 = profile_l2(d, u_inst - u_avg)
    _, theta_sup = theta_profile(state, u_inst)
    _, dtv_sup = dtv_monitor(state)

    enstrophy = l2_norm(state.f_hat) ** 2
    drift = abs(enstrophy - state.enstrophy0) / max(state.enstrophy0, 1e-300)

    g = pullback_profile(state)
    if prev_pullback is None:
        cauchy = 0.0
    else:
        diff = SpectralField(d, g.coeffs - prev_pullback.coeffs, True)
        cauchy = l2_norm(diff)

    record = DiagnosticsRecord(
        t=state.t,
        ux_fluct_l2=ux_fluct_l2,
        uy_l2=uy_l2,
        ux_avg_gap_l2=ux_avg_gap_l2,
        theta_sup=theta_sup,
        dtv_sup=dtv_sup,
        enstrophy=enstrophy,
        enstrophy_drift_rel=drift,
        highfreq_frac=highfreq_fraction(state, cutoff),
        favg_l2=profile_l2(d, x_average(state.f_hat)),
        pullback_cauchy=cauchy,
        weighted_energy=gevrey.weighted_energy(state.f_hat, state.t, params),
        solvability_margin=elliptic.solvability_margin(state),
    )
    return record, g
