"""Acceptance battery: every stated criterion at its stated tolerance.

One test per criterion; each prints a single pass/fail line.  The nonlinear
criteria (4-8) share one 256x256 run; the echo (12) and reversal (13)
experiments and the closed-form sweeps use their own private configurations.
Run with `pytest tests/test_acceptance.py -v -s`.
"""

import warnings

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from inviscid_damping_lab import elliptic, toy
from inviscid_damping_lab.datagen import DataSpec, generate_data, reference_linear_data
from inviscid_damping_lab.diagnostics import pullback
from inviscid_damping_lab.gevrey import LambdaParams, epsilon_threshold, lambda_of_t
from inviscid_damping_lab.linear import (
    decay_exponent_fit,
    linear_velocity,
    orr_amplification,
    orr_streamfunction,
)
from inviscid_damping_lab.sim import (
    SimConfig,
    new_state,
    run,
    step_rk4,
    time_reflect,
)
from inviscid_damping_lab.spectral import (
    DomainSpec,
    SpectralField,
    hermitian_violation,
    l2_norm,
    project_nonzero_x,
    sobolev_norm,
    to_spectral,
    RealField,
)

SEED = 20260809


def check(num, name, ok, detail):
    print(f"[acceptance {num:02d}] {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {num} ({name}) failed: {detail}"


def fit_window(records, attr, lo, hi):
    return [(r.t, getattr(r, attr)) for r in records if lo <= r.t <= hi]


# --------------------------------------------------------------------------
# shared runs

MAIN_DOMAIN = DomainSpec(L_y=np.pi, N_x=256, N_y=256)
MAIN_LAMBDA = LambdaParams(lambda0=1.0, lambda_prime=0.5, s=0.8, epsilon=1e-3)


def damping_run(epsilon):
    # support capped at eta = 8 so every critical time of the initial data
    # precedes the t = 10 start of the fit and dyadic windows
    spec = DataSpec(
        epsilon=epsilon, lambda0=1.0, s=0.8, k_support=(0, 1), eta_width=8.0
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        field, _ = generate_data(spec, MAIN_DOMAIN, SEED)
    cfg = SimConfig(
        t_end=50.0,
        dt_max=0.2,
        diagnostic_stride=1.0,
        snapshot_times=(0.0, 10.0, 20.0, 25.0, 40.0, 50.0),
    )
    records, snaps = run(field, cfg, MAIN_LAMBDA)
    return field, records, {s.t: s for s in snaps}


@pytest.fixture(scope="module")
def main_run():
    return damping_run(1e-3)


@pytest.fixture(scope="module")
def half_run():
    return damping_run(5e-4)


@pytest.fixture(scope="module")
def linear_sweep():
    domain = DomainSpec(L_y=2 * np.pi, N_x=16, N_y=128)
    omega = reference_linear_data(domain)
    rows = []
    for t in np.concatenate([np.linspace(0, 10, 41)[:-1], np.geomspace(10, 100, 61)]):
        ux, uy = linear_velocity(omega, float(t))
        ux_fluct = project_nonzero_x(ux)
        rows.append((float(t), l2_norm(ux_fluct), l2_norm(uy)))
    return domain, omega, rows


@pytest.fixture(scope="module")
def echo_run():
    domain = DomainSpec(L_y=np.pi, N_x=64, N_y=128)
    spec = DataSpec(
        epsilon=0.05, lambda0=0.3, s=0.6, k_support=(1, 2), eta_width=16.0,
        kind="two_mode_echo",
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        field, _ = generate_data(spec, domain, SEED)
    cfg = SimConfig(t_end=20.0, dt_max=0.05, diagnostic_stride=0.1)
    params = LambdaParams(lambda0=0.3, lambda_prime=0.15, s=0.6, epsilon=0.05)
    records, _ = run(field, cfg, params)
    eta_e = 16.0
    markers = [eta_e / 2, eta_e / 1]  # downward echo ladder k = 2, 1
    return records, markers


# --------------------------------------------------------------------------
# criteria

def test_criterion_01_orr_formula_exactness(small_domain_unused=None):
    d = DomainSpec(L_y=np.pi, N_x=32, N_y=64)
    rng = np.random.default_rng(SEED)
    f = to_spectral(RealField(d, rng.standard_normal((32, 64))))
    c = f.coeffs.copy()
    c[0, 0] = 0.0
    f = SpectralField(d, c)
    worst = 0.0
    for t in (0.0, 0.7, 2.0, 5.0):
        phi = orr_streamfunction(f, t)
        denom = d.k2d ** 2 + (d.eta2d - t * d.k2d) ** 2
        denom[0, 0] = 1.0
        expected = -f.coeffs / denom
        expected[0, 0] = 0.0
        worst = max(worst, float(np.max(np.abs(phi.coeffs - expected))))
    amp_err = abs(orr_amplification(1, 2.0, 2.0) - 5.0)
    ok = worst <= 1e-14 * np.max(np.abs(f.coeffs)) and amp_err <= 1e-12
    check(1, "orr formula exactness", ok,
          f"coeff dev {worst:.2e}, amplification dev {amp_err:.2e}")


def test_criterion_02_linear_decay_rates(linear_sweep):
    _, _, rows = linear_sweep
    ux_slope, _ = decay_exponent_fit([(t, v) for t, v, _ in rows if t >= 10.0])
    uy_slope, _ = decay_exponent_fit([(t, v) for t, _, v in rows if t >= 10.0])
    ok = (-1.15 <= ux_slope <= -0.85) and (-2.15 <= uy_slope <= -1.85)
    check(2, "linear decay rates", ok,
          f"ux slope {ux_slope:.3f}, uy slope {uy_slope:.3f}")


def test_criterion_03_phidecay_boundedness(linear_sweep):
    domain, omega, _ = linear_sweep
    h4 = sobolev_norm(omega, 4.0)
    worst = 0.0
    for t in np.linspace(0.0, 100.0, 401):
        phi = project_nonzero_x(orr_streamfunction(omega, float(t)))
        worst = max(worst, (1.0 + t * t) * sobolev_norm(phi, 2.0) / h4)
    ok = worst <= 4.0
    check(3, "streamfunction decay bound", ok, f"sup ratio {worst:.3f} <= 4")


def test_criterion_04_solver_fidelity(main_run):
    _, records, snaps = main_run
    drift = records[-1].enstrophy_drift_rel
    herm = hermitian_violation(snaps[50.0].field)

    # x-independent data is a fixed point, per step, on the production grid
    c = np.zeros((MAIN_DOMAIN.N_x, MAIN_DOMAIN.N_y), dtype=complex)
    prof = np.exp(-np.abs(MAIN_DOMAIN.eta) ** 0.8)
    prof[0] = 0.0
    c[0, :] = 1e-3 * prof
    c[0, 1:] = 0.5 * (c[0, 1:] + np.conj(c[0, 1:][::-1]))  # hermitian row
    st = new_state(SpectralField(MAIN_DOMAIN, c))
    worst_step = 0.0
    for _ in range(3):
        st2 = step_rk4(st, 0.2)
        worst_step = max(worst_step, float(np.max(np.abs(st2.f_hat.coeffs - st.f_hat.coeffs))))
        st = st2
    ok = drift < 1e-6 and herm <= 1e-12 and worst_step <= 1e-13
    check(4, "nonlinear solver fidelity", ok,
          f"drift {drift:.2e}, hermitian {herm:.2e}, fixed-point dev {worst_step:.2e}")


def test_criterion_05_nonlinear_damping(main_run):
    field, records, snaps = main_run
    ux_slope, _ = decay_exponent_fit(fit_window(records, "ux_fluct_l2", 10.0, 50.0))
    uy_slope, _ = decay_exponent_fit(fit_window(records, "uy_l2", 10.0, 50.0))

    def g_at(t):
        s = snaps[t]
        return pullback(s.field, s.phi_accum)

    g10, g20, g40 = g_at(10.0), g_at(20.0), g_at(40.0)
    r1 = l2_norm(SpectralField(MAIN_DOMAIN, g20.coeffs - g10.coeffs))
    r2 = l2_norm(SpectralField(MAIN_DOMAIN, g40.coeffs - g20.coeffs))
    ratio = r2 / r1
    ok = (
        -1.3 <= ux_slope <= -0.7
        and -2.3 <= uy_slope <= -1.7
        and 0.25 <= ratio <= 1.0
    )
    check(5, "nonlinear damping rates", ok,
          f"ux {ux_slope:.3f}, uy {uy_slope:.3f}, cauchy ratio {ratio:.3f}")


def test_criterion_06_epsilon_squared_scattering(main_run, half_run):
    field, _, snaps = main_run
    field_h, _, snaps_h = half_run

    def scatter(data, snap):
        g = pullback(snap.field, snap.phi_accum)
        return l2_norm(SpectralField(MAIN_DOMAIN, g.coeffs - data.coeffs))

    d_full = scatter(field, snaps[50.0])
    d_half = scatter(field_h, snaps_h[50.0])
    ratio = d_full / d_half
    ok = 2.8 <= ratio <= 5.7
    check(6, "eps^2 scattering scaling", ok,
          f"||g(T)-omega_in|| ratio {ratio:.4f} (target 4)")


def test_criterion_07_weak_convergence_cascade(main_run):
    field, records, _ = main_run
    pnz = field.coeffs.copy()
    pnz[0, :] = 0.0
    target = float(np.sum(np.abs(pnz) ** 2) / np.sum(np.abs(field.coeffs) ** 2))
    final_frac = records[-1].highfreq_frac
    gaps = [np.sqrt(r.enstrophy) - r.favg_l2 for r in records]
    ok = final_frac >= 0.9 * target and min(gaps) > 0.0
    check(7, "weak convergence and cascade", ok,
          f"highfreq {final_frac:.4f} >= 0.9*{target:.4f}, min gap {min(gaps):.2e}")


def test_criterion_08_monitors(main_run):
    _, records, _ = main_run
    eps = 1e-3
    window = [(r.t, r.theta_sup) for r in records if 10.0 <= r.t <= 50.0]

    # sublinearity: log-log slope well below 1
    theta_slope, _ = decay_exponent_fit(window)

    # log-form envelope: calibrate C on [10, 30], verify prediction on (30, 50]
    calib = [v / (eps ** 2 * np.log(t)) for t, v in window if t <= 30.0]
    C = max(calib)
    tail_ok = all(v <= 1.5 * C * eps ** 2 * np.log(t) for t, v in window if t > 30.0)

    dtv_slope, _ = decay_exponent_fit(fit_window(records, "dtv_sup", 10.0, 50.0))
    margin = min(r.solvability_margin for r in records)
    ok = theta_slope < 0.9 and tail_ok and dtv_slope <= -1.5 and margin > 0.99
    check(8, "theta, dtv, solvability monitors", ok,
          f"theta slope {theta_slope:.3f}, log-envelope ok {tail_ok}, "
          f"dtv slope {dtv_slope:.3f}, margin {margin:.5f}")


def test_criterion_09_toy_model():
    # dual-integrator oracle
    p = toy.ToyParams(k=1, eta=100.0, kappa=0.1, rtol=1e-10)
    t0, t1 = toy.interval_bounds(p)
    out = toy.integrate_interval(p, toy.ToyState(1.0, 1.0, t0))

    def rhs(t, y):
        return [0.1 / 100.0 * y[1], 0.1 * 100.0 / (1.0 + (100.0 - t) ** 2) * y[0]]

    ref = solve_ivp(rhs, (t0, t1), [1.0, 1.0], method="LSODA", rtol=1e-12, atol=1e-14)
    oracle_dev = max(
        abs(out.f_R - ref.y[0, -1]) / abs(ref.y[0, -1]),
        abs(out.f_NR - ref.y[1, -1]) / abs(ref.y[1, -1]),
    )

    A1, _ = toy.amplification(toy.ToyParams(k=1, eta=100.0, kappa=0.1, rtol=1e-10))
    A3, _ = toy.amplification(toy.ToyParams(k=3, eta=900.0, kappa=0.1, rtol=1e-10))
    invariance_dev = abs(A3 - A1) / A1

    results = []
    for eta in (1e2, 10 ** 2.5, 1e3, 10 ** 3.5, 1e4):
        chain = toy.chain_amplification(eta, 0.1, 1e-10)
        results.append((eta, chain.total))
    report = toy.gevrey_threshold_report(results)
    r2_half = report.r2_by_s[0.5]
    form_ok = (
        r2_half > 0.99
        and r2_half > report.r2_by_s[0.4]
        and r2_half > report.r2_by_s[0.6]
    )
    ok = oracle_dev < 1e-8 and invariance_dev < 1e-6 and form_ok
    check(9, "toy model", ok,
          f"oracle {oracle_dev:.2e}, invariance {invariance_dev:.2e}, "
          f"r2(1/2) {r2_half:.5f} vs {report.r2_by_s[0.4]:.5f}/{report.r2_by_s[0.6]:.5f}")


def test_criterion_10_lambda_of_t():
    base = LambdaParams(lambda0=1.0, lambda_prime=0.5, s=1.0, K=1.0, epsilon=0.1)
    short_dev = abs(lambda_of_t(base, 0.5) - 0.875)

    worst_ode = 0.0
    for s in (0.55, 0.75, 1.0):
        p = LambdaParams(lambda0=1.0, lambda_prime=0.5, s=s, K=1.0, epsilon=0.1)

        def ode(t, y, p=p):
            return [-p.K * p.epsilon * (1 + t * t) ** (-p.qtilde) * (1 + y[0])]

        for t in np.geomspace(1.0, 1e4, 7):
            sol = solve_ivp(ode, (1.0, float(t)), [p.lambda_short],
                            method="RK45", rtol=1e-12, atol=1e-14)
            worst_ode = max(worst_ode, abs(sol.y[0, -1] - lambda_of_t(p, float(t))))

    bare = LambdaParams(lambda0=1.0, lambda_prime=0.5, s=1.0, K=1.0)
    eps_star = epsilon_threshold(bare, horizon=1e6)
    at_star = LambdaParams(lambda0=1.0, lambda_prime=0.5, s=1.0, K=1.0, epsilon=eps_star)
    self_dev = abs(lambda_of_t(at_star, 1e6) - 0.75)
    ok = short_dev == 0.0 and worst_ode < 1e-10 and self_dev < 1e-6
    check(10, "lambda(t) closed forms", ok,
          f"short {short_dev:.1e}, ode {worst_ode:.2e}, threshold self-consistency {self_dev:.2e}")


def test_criterion_11_elliptic():
    d = DomainSpec(L_y=np.pi, N_x=32, N_y=64)
    rng = np.random.default_rng(SEED)
    f = project_nonzero_x(to_spectral(RealField(d, rng.standard_normal((32, 64)))))
    f = SpectralField(d, f.coeffs * np.exp(-0.5 * d.mode_magnitude))

    worst = 0.0
    for t in (0.0, 0.5, 1.0, 2.0, 2.5, 3.0, 4.0, 5.0, 7.5, 10.0):
        back = elliptic.apply_delta_L(elliptic.invert_delta_L(f, t), t)
        worst = max(
            worst,
            l2_norm(SpectralField(d, back.coeffs - f.coeffs)) / l2_norm(f),
        )

    v = d.y_nodes
    vp = 1.0 + 0.01 * np.cos(d.eta0 * v)
    vpp = -0.01 * d.eta0 * np.sin(d.eta0 * v) * vp
    coords = elliptic.CoordFields(
        domain=d, t=2.0, v_of_y=v, vprime=vp, vdoubleprime=vpp, monotone_flag=True
    )
    result = elliptic.invert_delta_t(f, coords, 2.0, tol=1e-10, max_iter=20)

    refused = False
    coarse = elliptic.CoordFields(
        domain=d, t=2.0, v_of_y=v, vprime=1.0 + 0.6 * np.cos(d.eta0 * v),
        vdoubleprime=np.zeros_like(v), monotone_flag=True,
    )
    try:
        elliptic.invert_delta_t(f, coarse, 2.0)
    except elliptic.ContractionGuardError:
        refused = True
    ok = worst <= 1e-12 and result.residuals[-1] < 1e-10 and refused
    check(11, "elliptic inversion", ok,
          f"identity {worst:.2e}, residual {result.residuals[-1]:.2e} in "
          f"{result.iterations} iters, guard refusal {refused}")


def test_criterion_12_echo_experiment(echo_run):
    records, markers = echo_run
    uy = np.array([r.uy_l2 for r in records])
    ts = np.array([r.t for r in records])
    maxima = [
        float(ts[i])
        for i in range(1, len(uy) - 1)
        if uy[i] > uy[i - 1] and uy[i] > uy[i + 1]
    ]
    details = []
    ok = True
    for tm in markers:
        hits = [m for m in maxima if abs(m - tm) <= 0.1 * tm]
        details.append(f"t={tm:g}: " + (f"max at {hits[0]:g}" if hits else "none"))
        ok = ok and bool(hits)
    check(12, "euler echoes at critical times", ok, "; ".join(details))


def test_criterion_13_time_reversibility():
    d = DomainSpec(L_y=np.pi, N_x=64, N_y=256)
    spec = DataSpec(epsilon=1e-3, lambda0=1.0, s=0.8, k_support=(0, 1), eta_width=10.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        field, _ = generate_data(spec, d, SEED)
    params = LambdaParams(lambda0=1.0, lambda_prime=0.5, s=0.8, epsilon=1e-3)
    cfg = SimConfig(t_end=10.0, dt_max=0.1, diagnostic_stride=10.0, snapshot_times=(10.0,))
    _, snaps = run(field, cfg, params)
    reflected = time_reflect(snaps[0].field, 10.0)
    _, snaps_back = run(reflected, cfg, params)
    final = time_reflect(snaps_back[0].field, 10.0)
    err = l2_norm(SpectralField(d, final.coeffs - field.coeffs)) / l2_norm(field)
    ok = err < 1e-6
    check(13, "time reversibility", ok, f"round-trip relative error {err:.2e}")
