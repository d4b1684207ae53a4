"""Two-mode resonant/non-resonant echo model and the chained amplification sweep.

The pair (f_R, f_NR) obeys

    f_R'  = kappa (k^2 / eta) f_NR,
    f_NR' = kappa eta / (k^2 + (eta - k t)^2) f_R,

integrated over the critical interval I_k = [eta/k - eta/k^2, eta/k + eta/k^2].
Writing c = eta / k^2 and tau = t - eta/k turns this into a one-parameter
family (the coefficient of f_NR' becomes kappa c / (1 + tau^2) on [-c, c]),
so per-interval amplification depends on (k, eta) only through c.  Chaining
the intervals for k = floor(sqrt(eta)) down to 1 produces the total
amplification whose log grows like sqrt(eta), the source of the Gevrey-2
regularity threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp


@dataclass(frozen=True)
class ToyParams:
    k: int
    eta: float
    kappa: float
    C: float = 1.0
    rtol: float = 1e-10

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        if self.eta / self.k ** 2 <= 1.0:
            raise ValueError(
                f"need eta/k^2 > 1, got eta={self.eta}, k={self.k}"
            )
        if self.kappa < 0:
            raise ValueError(f"kappa must be nonnegative, got {self.kappa}")
        if self.C <= 0:
            raise ValueError(f"C must be positive, got {self.C}")
        if not 0 < self.rtol <= 1e-8:
            raise ValueError(f"rtol must lie in (0, 1e-8], got {self.rtol}")


@dataclass(frozen=True)
class ToyState:
    f_R: float
    f_NR: float
    t: float


@dataclass(frozen=True)
class IntervalAmplification:
    k: int
    interval_start: float
    interval_end: float
    A_k: float
    A_left: float
    A_right: float
    log_total: float


@dataclass(frozen=True)
class ChainResult:
    eta: float
    kappa: float
    total: float
    log_total: float
    per_k: list
    overflowed: bool


@dataclass(frozen=True)
class ThresholdReport:
    slope: float
    implied_s: float
    r2_by_s: dict


def interval_bounds(params: ToyParams) -> tuple[float, float]:
    tc = params.eta / params.k
    half = params.eta / params.k ** 2
    return tc - half, tc + half


def _rhs(params: ToyParams):
    k2 = float(params.k ** 2)
    eta = abs(params.eta)
    kap = params.kappa

    def f(t, y):
        denom = k2 + (eta - params.k * t) ** 2
        return [kap * k2 / eta * y[1], kap * eta / denom * y[0]]

    return f

class ToleranceError(RuntimeError):
    """Raised when the integrator cannot certify the requested tolerance."""


def _solve(params: ToyParams, y0, t0: float, t1: float, rtol: float):
    atol = rtol * 1e-3 * max(1.0, float(np.max(np.abs(y0))))
    sol = solve_ivp(
        _rhs(params), (t0, t1), y0, method="RK45", rtol=rtol, atol=atol,
        dense_output=False,
    )
    if not sol.success:
        raise ToleranceError(f"toy integration failed: {sol.message}")
    return sol.y[:, -1]


def integrate_interval(params: ToyParams, start: ToyState) -> ToyState:
    """Advance (f_R, f_NR) across I_k with an adaptive embedded RK pair.

    The result is cross-checked against a half-tolerance re-run; disagreement
    beyond ~10x rtol signals the tolerance was not actually met.
    """
    t0, t1 = interval_bounds(params)
    if abs(start.t - t0) > 1e-9 * max(1.0, abs(t0)):
        raise ValueError(
            f"start.t = {start.t} must equal the interval start {t0}"
        )
    y0 = [start.f_R, start.f_NR]
    y = _solve(params, y0, t0, t1, params.rtol)
    y_check = _solve(params, y0, t0, t1, params.rtol / 2.0)
    scale = max(float(np.max(np.abs(y_check))), 1e-300)
    if float(np.max(np.abs(y - y_check))) / scale > 50.0 * params.rtol:
        raise ToleranceError(
            "half-tolerance re-run disagrees beyond 50*rtol; tolerance not met"
        )
    return ToyState(f_R=float(y[0]), f_NR=float(y[1]), t=t1)


def _max_abs(state: ToyState) -> float:
    return max(abs(state.f_R), abs(state.f_NR))


def amplification(params: ToyParams):
    """Amplification from a (1, 1) start over I_k; returns (A, (eta/k^2, A))."""
    start = ToyState(1.0, 1.0, interval_bounds(params)[0])
    end = integrate_interval(params, start)
    A = _max_abs(end)
    return A, (params.eta / params.k ** 2, A)


def split_amplification(params: ToyParams):
    """(A_left, A_right): growth over the left and right halves of I_k."""
    t0, t1 = interval_bounds(params)
    tc = params.eta / params.k
    y0 = [1.0, 1.0]
    y_mid = _solve(params, y0, t0, tc, params.rtol)
    y_end = _solve(params, list(y_mid), tc, t1, params.rtol)
    a_left = float(np.max(np.abs(y_mid)))
    a_right = float(np.max(np.abs(y_end))) / max(a_left, 1e-300)
    return a_left, a_right


def paper_bound(params: ToyParams) -> float:
    """Reference bound C (eta/k^2)^(1 + 2 C kappa) for comparison columns."""
    c = params.eta / params.k ** 2
    return params.C * c ** (1.0 + 2.0 * params.C * params.kappa)


def chain_amplification(eta: float, kappa: float, rtol: float = 1e-10) -> ChainResult:
    """Chain the critical intervals for k = floor(sqrt(eta)) .. 1.

    End values of interval k seed interval k-1 (both components carried).
    The state is renormalized between intervals, which is exact because the
    system is linear; this keeps the chain overflow-free while the running
    log-total tracks the true product.
    """
    if eta < 4.0:
        raise ValueError(f"chain needs eta >= 4, got {eta}")
    if kappa < 0:
        raise ValueError(f"kappa must be nonnegative, got {kappa}")
    per_k = []
    log_total = 0.0
    y = np.array([1.0, 1.0])
    for k in range(int(math.floor(math.sqrt(eta))), 0, -1):
        if eta / k ** 2 <= 1.0:
            continue
        params = ToyParams(k=k, eta=eta, kappa=kappa, rtol=rtol)
        t0, t1 = interval_bounds(params)
        tc = eta / k
        scale0 = max(float(np.max(np.abs(y))), 1e-300)
        y = y / scale0
        y_mid = _solve(params, list(y), t0, tc, rtol)
        y_end = _solve(params, list(y_mid), tc, t1, rtol)
        a_left = float(np.max(np.abs(y_mid)))  # start was normalized to max-abs 1
        A_k = float(np.max(np.abs(y_end)))
        a_right = A_k / max(a_left, 1e-300)
        log_total += math.log(max(A_k, 1e-300))
        per_k.append(
            IntervalAmplification(
                k=k, interval_start=t0, interval_end=t1, A_k=A_k,
                A_left=a_left, A_right=a_right, log_total=log_total,
            )
        )
        y = y_end
    total = math.exp(log_total) if log_total < 700.0 else math.inf
    return ChainResult(
        eta=eta, kappa=kappa, total=total, log_total=log_total,
        per_k=per_k, overflowed=not math.isfinite(total),
    )


def _linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    xm = x - x.mean()
    ym = y - y.mean()
    sxx = float(np.dot(xm, xm))
    if sxx == 0.0:
        raise ValueError("degenerate fit: no spread in the abscissa")
    slope = float(np.dot(xm, ym) / sxx)
    intercept = float(y.mean() - slope * x.mean())
    resid = ym - slope * xm
    ss_tot = float(np.dot(ym, ym))
    ss_res = float(np.dot(resid, resid))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return slope, intercept, r2


def gevrey_threshold_report(results) -> ThresholdReport:
    """Fit log(total) against eta^s for s in {0.4, 0.5, 0.6}.

    The slope reported is the sqrt(eta) coefficient; implied_s is the exponent
    with the best r^2 (ties resolve to 0.5, which also covers the flat
    kappa = 0 data where every fit is exact with slope 0).
    """
    pts = list(results)
    if len(pts) < 4:
        raise ValueError(f"threshold report needs >= 4 points, got {len(pts)}")
    eta = np.array([p[0] for p in pts], dtype=float)
    total = np.array([p[1] for p in pts], dtype=float)
    if np.any(eta <= 0) or np.any(total <= 0):
        raise ValueError("eta and total values must be positive")
    logt = np.log(total)
    r2_by_s = {}
    for s in (0.5, 0.4, 0.6):
        _, _, r2 = _linear_fit(eta ** s, logt)
        r2_by_s[s] = r2
    slope, _, _ = _linear_fit(np.sqrt(eta), logt)
    implied_s = max(r2_by_s, key=lambda s: (r2_by_s[s], s == 0.5))
    return ThresholdReport(slope=slope, implied_s=implied_s, r2_by_s=r2_by_s)
