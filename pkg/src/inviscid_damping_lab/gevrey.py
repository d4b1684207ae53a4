"""Time-dependent Gevrey regularity index lambda(t) and the weighted energy monitor.

The bulk regularity index is constant for t <= 1 and then decays through
    d lambda / dt = -K eps <t>^(-2 qtilde) (1 + lambda),   qtilde = s/8 + 7/16,
which integrates in closed form to
    1 + lambda(t) = (1 + lambda(1)) exp(-K eps Integral_1^t (1+tau^2)^(-qtilde) dtau).
Since 2 qtilde > 1 for every s > 1/2 the integral converges as t -> inf, which
is what makes a positive admissible-epsilon threshold exist at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .spectral import EXP_GUARD, SpectralField


@dataclass(frozen=True)
class LambdaParams:
    lambda0: float
    lambda_prime: float
    s: float
    sigma: float = 13.0
    K: float = 1.0
    epsilon: float = 0.0
    qtilde: float = field(init=False)

    def __post_init__(self):
        if not self.lambda0 > self.lambda_prime > 0:
            raise ValueError(
                f"need lambda0 > lambda_prime > 0, got {self.lambda0}, {self.lambda_prime}"
            )
        if not 0.5 < self.s <= 1.0:
            raise ValueError(f"s must lie in (1/2, 1], got {self.s}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")
        if self.K <= 0:
            raise ValueError(f"K must be positive, got {self.K}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")
        object.__setattr__(self, "qtilde", self.s / 8.0 + 7.0 / 16.0)
        assert 2.0 * self.qtilde > 1.0

    @property
    def lambda_short(self) -> float:
        return 0.75 * self.lambda0 + 0.25 * self.lambda_prime


def _decay_integral(qtilde: float, t: float) -> float:
    """Integral_1^t (1 + tau^2)^(-qtilde) dtau, via tau = e^u for a scale-free
    integrand; the u-integrand decays like e^((1 - 2 qtilde) u), integrable
    because 2 qtilde > 1."""
    if t <= 1.0:
        return 0.0
    upper = math.log(t) if math.isfinite(t) else np.inf
    # e^u (1 + e^{2u})^{-q} rewritten overflow-free as e^{(1-2q)u} (1 + e^{-2u})^{-q}
    val, _ = quad(
        lambda u: math.exp((1.0 - 2.0 * qtilde) * u)
        * (1.0 + math.exp(-2.0 * u)) ** (-qtilde),
        0.0,
        upper,
        epsabs=1e-13,
        epsrel=1e-13,
        limit=400,
    )
    return val


def lambda_of_t(params: LambdaParams, t: float) -> float:
    """Closed-form lambda(t); constant lambda_short up to t = 1, decaying after."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    lam1 = params.lambda_short
    if t <= 1.0 or params.epsilon == 0.0:
        return lam1
    integral = _decay_integral(params.qtilde, t)
    return (1.0 + lam1) * math.exp(-params.K * params.epsilon * integral) - 1.0


def epsilon_threshold(params: LambdaParams, horizon: float = math.inf) -> float:
    """Largest epsilon keeping lambda above (lambda0 + lambda_prime)/2 up to the horizon.

    Solves lambda(horizon) = (lambda0 + lambda_prime)/2 for epsilon using the
    closed form; the default horizon is infinity, for which the decay integral
    is finite because 2 qtilde > 1.  For every epsilon below the returned
    value, lambda(t) stays above the midpoint for all t <= horizon.
    """
    lam1 = params.lambda_short
    target = 0.5 * (params.lambda0 + params.lambda_prime)
    Q = _decay_integral(params.qtilde, horizon)
    return math.log((1.0 + lam1) / (1.0 + target)) / (params.K * Q)


def weighted_energy(f: SpectralField, t: float, params: LambdaParams) -> float:
    """Surrogate weighted norm || exp(lambda(t)|k,eta|^s) <k,eta>^sigma f_hat ||_2.

    The resonance and coefficient multipliers of the full apparatus are
    replaced by 1; this is a diagnostic monitor, not a proof object.
    """
    d = f.domain
    lam = lambda_of_t(params, t)
    expo = lam * d.mode_magnitude ** params.s
    peak = float(np.max(expo))
    if peak > EXP_GUARD:
        i, j = np.unravel_index(np.argmax(expo), expo.shape)
        raise ValueError(
            f"weighted-energy exponent overflow: {peak:.1f} > {EXP_GUARD:.0f} "
            f"at mode (k={d.k_int[i]}, eta={d.eta[j]:.6g})"
        )
    bracket = (1.0 + d.k2d ** 2 + d.eta2d ** 2) ** (params.sigma / 2.0)
    amp = np.abs(f.coeffs) * bracket * np.exp(expo - peak)
    return float(math.exp(peak) * np.sqrt(np.sum(amp ** 2) * d.mode_weight))
