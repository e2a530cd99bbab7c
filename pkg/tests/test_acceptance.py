"""Acceptance criteria 1-11, one test each. Every test records a PASS/FAIL line
that is printed in the terminal summary."""

import math

import numpy as np
import pytest

from conftest import record_acceptance
from prodsup.asymptotics import dof, dof_region_sum, low_snr_rates
from prodsup.estimator import mmse_estimate, pilot_observation
from prodsup.expcli import main
from prodsup.model import SuperpositionPower, make_config
from prodsup.montecarlo import McSettings
from prodsup.powalloc import (
    asymptotic_allocation,
    dynamic_snr_along_budget,
    optimal_allocation,
    optimal_baseline_allocation,
)
from prodsup.randmat import sample_cgauss_batch, unitary_pilot
from prodsup.rates import (
    decodability_margin,
    dynamic_signal_eigenvalues,
    inverse_power_mean,
    rate_dynamic_baseline,
    rate_dynamic_ps,
    rate_static_coherent,
    rate_static_ic,
    rate_static_ps,
    snr_baseline,
    snr_dynamic_ps,
)

DB = lambda x: 10.0 ** (x / 10.0)  # noqa: E731


def _check(label, conditions, detail=""):
    passed = all(conditions)
    record_acceptance(label, passed, detail)
    assert passed, detail


def _optimized(cfg, rho):
    alloc = optimal_allocation(cfg, rho)
    return SuperpositionPower(alloc.c_tau_star, alloc.c_delta_star, rho)


def test_c01_snr_equality():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(1000):
        c_tau, c_delta = rng.uniform(1e-3, 10.0, 2)
        nd, ns = (int(v) for v in rng.integers(1, 9, 2))
        ps = snr_dynamic_ps(c_tau, c_delta, nd, ns).value
        base = snr_baseline(c_tau * ns, c_delta * nd * ns).value
        worst = max(worst, abs(ps - base) / abs(base))
    _check("1 SNR equality identity", [worst <= 1e-12], f"max rel diff {worst:.2e}")


def _grid_argmax(cfg, rho, a, n=100_000):
    c = np.linspace(0.0, a, n)
    # vectorized rho_d along the budget line
    nd, m, t = cfg.n_dynamic, cfg.m_tx, cfg.t_coh_dynamic
    c_tau = np.maximum((t - nd) * (a - c), 0.0)
    vals = c_tau * c * nd * m**2 / (1 + c_tau * m + c * nd * m)
    k = int(np.argmax(vals))
    # parabolic refinement through the three grid points around the peak
    if 0 < k < n - 1:
        y0, y1, y2 = vals[k - 1 : k + 2]
        h = c[1] - c[0]
        denom = y0 - 2 * y1 + y2
        if denom != 0:
            return c[k] + 0.5 * h * (y0 - y2) / denom
    return c[k]


def test_c02_power_optimizer():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(200):
        nd = int(rng.integers(1, 5))
        ns = int(rng.integers(1, 9))
        t = int(rng.integers(2 * nd + 1, 2 * nd + 30))
        rho = DB(rng.uniform(-10, 30))
        cfg = make_config(nd, ns, t)
        alloc = optimal_allocation(cfg, rho)
        grid = _grid_argmax(cfg, rho, alloc.a)
        worst = max(worst, abs(alloc.c_delta_star - grid) / grid)
    ref = optimal_allocation(make_config(2, 4, 5), 10.0)
    _check(
        "2 power optimizer vs grid and worked values",
        [
            worst <= 1e-6,
            ref.c_delta_star == pytest.approx(1.14198, abs=5e-6),
            ref.snr_dynamic_star == pytest.approx(4.815, abs=5e-4),
            dynamic_snr_along_budget(make_config(2, 4, 5), 10.0, ref.c_delta_star)
            == pytest.approx(ref.snr_dynamic_star, rel=1e-12),
        ],
        f"max rel diff {worst:.2e}; c_delta*={ref.c_delta_star:.6f}, rho_d*={ref.snr_dynamic_star:.4f}",
    )


def test_c03_estimator_statistics():
    n, ns, nd, c_tau = 100_000, 4, 2, 1.0
    h, w = sample_cgauss_batch([(nd, nd), (nd, nd)], 3, np.arange(n))
    pilot = unitary_pilot(nd)
    y = pilot_observation(h, pilot, w, c_tau, ns)
    est = mmse_estimate(y, pilot, c_tau, ns)
    # one entry per sample keeps the draws independent
    hat = np.abs(est.h_hat[:, 0, 0]) ** 2
    err = np.abs(h[:, 0, 0] - est.h_hat[:, 0, 0]) ** 2
    checks, parts = [], []
    for name, vals, target in (("var", hat, 0.8), ("err", err, 0.2)):
        mean, se = vals.mean(), vals.std(ddof=1) / math.sqrt(n)
        checks.append(abs(mean - target) <= 3 * se)
        parts.append(f"{name} {mean:.4f}±{se:.4f}")
    _check("3 estimator variance alpha^2 and error variance", checks, ", ".join(parts))


def test_c04_eigenvalue_identity():
    cfg = make_config(2, 4, 5)
    c_tau, c_delta = 0.7, 1.3
    nd, t = cfg.n_dynamic, cfg.t_coh_dynamic
    (x_delta,) = sample_cgauss_batch([(nd, t - nd)], 4, np.arange(1000))
    x_d = np.concatenate(
        [np.broadcast_to(math.sqrt(c_tau) * unitary_pilot(nd), (1000, nd, nd)), math.sqrt(c_delta) * x_delta], axis=2
    )
    direct = np.sort(np.linalg.eigvalsh(x_d @ np.conj(np.swapaxes(x_d, 1, 2))), axis=1)
    formula = np.sort(dynamic_signal_eigenvalues(c_tau, c_delta, x_delta), axis=1)
    worst = float(np.max(np.abs(direct - formula)))
    _check("4 eigenvalue identity", [worst <= 1e-9], f"max abs diff {worst:.2e}")


def test_c05_ic_dominance(ref_cfg, mc):
    checks, parts = [], []
    for db in (0.0, 5.0, 10.0, 15.0):
        power = _optimized(ref_cfg, DB(db))
        mu = inverse_power_mean(ref_cfg, power, mc)
        checks.append(ref_cfg.n_static / mu.mean >= power.c_tau * ref_cfg.n_static)
        ic, ps = rate_static_ic(ref_cfg, power, mc), rate_static_ps(ref_cfg, power, mc)
        checks.append(ic.mean - ps.mean >= -3 * math.hypot(ic.std_error, ps.std_error))
        if db == 10.0:
            gain = ic.mean / ps.mean - 1
            checks.append(0.03 <= gain <= 0.20)
            parts.append(f"gain at 10 dB {100 * gain:.1f}% (band 3-20%)")
    _check("5 IC dominance and 10 dB gain band", checks, "; ".join(parts))


def test_c06_decodability_margin(mc):
    rho = 10.0
    same = make_config(2, 2, 5)
    more = make_config(2, 4, 5)
    m_same = decodability_margin(same, _optimized(same, rho), mc)
    m_more = decodability_margin(more, _optimized(more, rho), mc)
    _check(
        "6 decodability margin",
        [abs(m_same.mean) <= 3 * m_same.std_error, m_more.mean > 3 * m_more.std_error],
        f"N_s=N_d {m_same.mean:.4f}±{m_same.std_error:.4f}; N_s=2N_d {m_more.mean:.3f}±{m_more.std_error:.3f}",
    )


def test_c07_dof_slopes(ref_cfg, mc):
    rates = {}
    for db in (30.0, 40.0):
        rho = DB(db)
        power = _optimized(ref_cfg, rho)
        rates[db] = (
            rate_dynamic_ps(ref_cfg, power, mc).mean,
            rate_dynamic_baseline(ref_cfg, optimal_baseline_allocation(ref_cfg, rho), mc).mean,
            rate_static_ps(ref_cfg, power, mc).mean,
        )
    slopes = [(r40 - r30) / math.log2(10) for r30, r40 in zip(rates[30.0], rates[40.0])]
    d = dof(ref_cfg)
    targets = (d.d_dynamic, d.d_dynamic, d.d_static)
    _check(
        "7 DoF slopes and region identity",
        [abs(s - t) <= 0.1 * t for s, t in zip(slopes, targets)]
        + [targets == (1.2, 1.2, 1.6), dof_region_sum(ref_cfg) == 1],
        "slopes " + ", ".join(f"{s:.3f}" for s in slopes),
    )


def test_c08_low_snr_anchors(ref_cfg, mc):
    rho = DB(-20.0)
    power = _optimized(ref_cfg, rho)
    r_d = rate_dynamic_ps(ref_cfg, power, mc).mean
    r_s = rate_static_ps(ref_cfg, power, mc).mean
    approx_d, _ = low_snr_rates(ref_cfg, rho)
    approx_s = ref_cfg.m_tx * rho / 2 / math.log(2)
    checks = [abs(r_d / approx_d - 1) <= 0.15, abs(r_s / approx_s - 1) <= 0.15]
    t, nd = ref_cfg.t_coh_dynamic, ref_cfg.n_dynamic
    for r in (0.01, 0.003, 0.001):
        exact = optimal_allocation(ref_cfg, r).snr_static_star
        checks.append(abs(exact / (r * t / (2 * nd)) - 1) <= 0.05)
        checks.append(abs(asymptotic_allocation(ref_cfg, r, "low")[1] / exact - 1) <= 0.05)
    _check("8 low-SNR anchors", checks, f"R_d/approx {r_d / approx_d:.3f}, R_s/approx {r_s / approx_s:.3f}")


def test_c09_one_by_one_anchor(exp_e1_one):
    oracle = exp_e1_one / math.log(2)
    est = rate_static_coherent(make_config(1, 1, 2), 1.0, McSettings(10_000, 9))
    _check(
        "9 1x1 coherent anchor",
        [abs(est.mean - oracle) <= 3 * est.std_error, round(oracle, 4) == 0.8603],
        f"{est.mean:.4f}±{est.std_error:.4f} vs {oracle:.4f}",
    )


def _significantly_increasing(means, ses):
    return all(b - a > 3 * math.hypot(sa, sb) for a, b, sa, sb in zip(means, means[1:], ses, ses[1:]))


def test_c10_trends(mc):
    rho = 10.0
    ns_grid = (2, 4, 8, 16)
    r_s, gap, gap_se = [], [], []
    for ns in ns_grid:
        cfg = make_config(2, ns, 5)
        power = _optimized(cfg, rho)
        rs = rate_static_ps(cfg, power, mc)
        rd = rate_dynamic_ps(cfg, power, mc)
        rb = rate_dynamic_baseline(cfg, optimal_baseline_allocation(cfg, rho), mc)
        r_s.append(rs.mean)
        gap.append(rb.mean - rd.mean)
        gap_se.append(math.hypot(rd.std_error, rb.std_error))
    x, y = np.array(ns_grid, float), np.array(r_s)
    slope = x @ y / (x @ x)
    r2 = 1 - np.sum((y - slope * x) ** 2) / np.sum((y - y.mean()) ** 2)

    t_grid = (4, 5, 8, 10, 20)
    rd_t, rd_se, rs_t, rs_se = [], [], [], []
    for t in t_grid:
        cfg = make_config(2, 4, t)
        power = _optimized(cfg, rho)
        rd, rs = rate_dynamic_ps(cfg, power, mc), rate_static_ps(cfg, power, mc)
        rd_t.append(rd.mean)
        rd_se.append(rd.std_error)
        rs_t.append(-rs.mean)
        rs_se.append(rs.std_error)
    _check(
        "10 antenna and coherence trends",
        [
            r2 > 0.99,
            _significantly_increasing([-g for g in gap], gap_se),
            _significantly_increasing(rd_t, rd_se),
            _significantly_increasing(rs_t, rs_se),
        ],
        f"R^2 {r2:.4f}; gaps " + ", ".join(f"{g:.3f}" for g in gap),
    )


@pytest.mark.parametrize(
    "args",
    [
        ["--experiment", "rate_vs_snr", "--snr-grid", "-20:30:10"],
        ["--experiment", "antenna_sweep", "--ns-grid", "2,4,8"],
        ["--experiment", "coherence_sweep", "--td-grid", "4,5,8"],
        ["--experiment", "ic_compare", "--snr-grid", "0,10"],
        ["--experiment", "region", "--snr-db", "10"],
    ],
    ids=lambda a: a[1],
)
def test_c11_reproducibility(tmp_path, args):
    outputs = []
    for workers in ("1", "8"):
        out = tmp_path / f"w{workers}.csv"
        assert main(args + ["--samples", "2500", "--seed", "31", "--workers", workers, "--out", str(out)]) == 0
        outputs.append(out.read_bytes())
    _check(f"11 reproducibility ({args[1]})", [outputs[0] == outputs[1]], f"{len(outputs[0])} bytes")
