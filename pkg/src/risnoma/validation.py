"""Cross-validation suite: every acceptance check, shared between the
``validate`` CLI command and the acceptance tests.

Each check compares an analytic quantity against an independent route (a
Monte Carlo ensemble, a quadrature oracle, or a distributional test) and
reports a measured deviation against a tolerance.  Checks marked
``report`` document known closed-form discrepancies: their gaps are
published, not asserted, under the default profile.  The ``strict``
profile halves every tolerance and enforces the report-only checks, which
is expected to fail and demonstrates the logged-gap policy.

Simulation-backed checks flag themselves ``underpowered`` instead of
failing when the requested trial budget cannot resolve the tolerance.
"""

from __future__ import annotations

import dataclasses
import io
import math
import os
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from . import analytics as an
from . import harness
from . import oracles as orc
from . import simulator as sim
from .channel import ris_intercept_avg, ris_intercept_sq_eff
from .config import ConfigBundle, SweepSpec, dbm_to_watts, default_bundle
from .geometry import SpatialParams, sample_realization
from .specfun import SpecFunDomainError, erfc, gauss_2f1

__all__ = ["CheckResult", "ValidationContext", "run_validation", "CHECKS",
           "report_to_csv"]

_PB_GRID_DBM = (0.0, 5.0, 10.0, 15.0)


@dataclass
class CheckResult:
    name: str
    criterion: int
    status: str            # pass | fail | report | underpowered
    measured: str
    tolerance: str
    details: str = ""
    enforced: bool = True
    elapsed_s: float = 0.0

    @property
    def ok(self) -> bool:
        return (not self.enforced) or self.status in ("pass", "report", "underpowered")


class ValidationContext:
    """Lazily computed shared artifacts (the big Monte Carlo ensemble, the
    analytic power curves) reused across checks."""

    def __init__(self, bundle: ConfigBundle | None = None, n_scale: float = 1.0,
                 profile: str = "default"):
        bundle = bundle or default_bundle()
        self.system = bundle.system
        self.thresholds = bundle.thresholds
        self.master_seed = bundle.sweep.master_seed
        self.n_scale = n_scale
        if profile not in ("default", "strict"):
            raise ValueError(f"unknown profile {profile!r}")
        self.profile = profile
        self._cache: dict = {}

    def tol(self, value: float) -> float:
        return 0.5 * value if self.profile == "strict" else value

    def n(self, base: int) -> int:
        return max(200, int(round(base * self.n_scale)))

    def upsilon2(self) -> float:
        return self.system.power.a_c / self.system.power.a_t

    def mc_sweep(self) -> dict:
        if "mc_sweep" not in self._cache:
            pb = [dbm_to_watts(v) for v in _PB_GRID_DBM]
            self._cache["mc_sweep"] = sim.mc_power_sweep(
                self.system, self.thresholds, "ris_noma", pb,
                self.n(200_000), self.master_seed,
                truncate_gamma_c=self.upsilon2())
        return self._cache["mc_sweep"]

    def analytic_curves(self) -> dict:
        if "analytic" not in self._cache:
            cov_t, cov_c, rate_t, rate_c = [], [], [], []
            for v in _PB_GRID_DBM:
                s = self.system.with_power(P_b=dbm_to_watts(v))
                cov_t.append(an.coverage_typical(s, self.thresholds).value)
                cov_c.append(an.coverage_connected(s, self.thresholds).value)
                rate_t.append(an.ergodic_typical(s, self.thresholds).value)
                rate_c.append(an.ergodic_connected(s, self.thresholds).value)
            self._cache["analytic"] = {
                "coverage_t": cov_t, "coverage_c": cov_c,
                "rate_t": rate_t, "rate_c": rate_c,
            }
        return self._cache["analytic"]

    def scenario_coverage(self, scenario: str) -> tuple[sim.MetricResult, sim.MetricResult]:
        key = ("scen", scenario)
        if key not in self._cache:
            s = self.system.with_power(P_b=dbm_to_watts(10.0))
            self._cache[key] = sim.estimate_coverage(
                s, self.thresholds, scenario, self.n(20_000), self.master_seed)
        return self._cache[key]


def _curve_check(ctx: ValidationContext, name: str, criterion: int,
                 metric: str, base_tol: float) -> CheckResult:
    t0 = time.perf_counter()
    tol = ctx.tol(base_tol)
    mc = ctx.mc_sweep()[metric]
    ana = ctx.analytic_curves()[metric]
    gaps = [abs(a - m.estimate) for a, m in zip(ana, mc)]
    worst = max(gaps)
    hw = max(m.half_width_95 for m in mc)
    details = " ".join(
        f"P={p:g}dBm:ana={a:.4f},mc={m.estimate:.4f}"
        for p, a, m in zip(_PB_GRID_DBM, ana, mc))
    if hw > tol / 2.0:
        status = "underpowered"
        enforced = False
    else:
        status = "pass" if worst <= tol else "fail"
        enforced = True
    return CheckResult(name, criterion, status, f"max|gap|={worst:.4f}",
                       f"<={tol}", details, enforced,
                       time.perf_counter() - t0)


def check_coverage_typical(ctx: ValidationContext) -> CheckResult:
    return _curve_check(ctx, "analytic-vs-mc coverage, typical user", 1,
                        "coverage_t", 0.05)


def check_coverage_connected(ctx: ValidationContext) -> CheckResult:
    return _curve_check(ctx, "analytic-vs-mc coverage, connected user", 2,
                        "coverage_c", 0.03)


def check_rate_typical(ctx: ValidationContext) -> CheckResult:
    return _curve_check(ctx, "analytic-vs-mc rate, typical user", 3,
                        "rate_t", 0.1)


def check_rate_connected(ctx: ValidationContext) -> CheckResult:
    return _curve_check(ctx, "analytic-vs-mc rate, connected user (capped)", 3,
                        "rate_c", 0.1)


def check_hypergeometric(ctx: ValidationContext) -> CheckResult:
    """Transform kernel against the regularized Euler-integral oracle.

    The exponent grid includes alpha = 2, where the kernel's third
    parameter is a pole: the contract there is the documented domain
    error, checked alongside the accuracy of the regular points.
    """
    t0 = time.perf_counter()
    tol = ctx.tol(1e-9)
    worst = 0.0
    for alpha in (2.4, 3.0, 4.0):
        a = -2.0 / alpha
        c = 1.0 - 2.0 / alpha
        for m in range(1, 9):
            for z in (0.0, -0.1, -1.0, -10.0, -100.0):
                got = gauss_2f1(a, m, c, z)
                want = orc.hyp2f1_euler_oracle(a, m, -z)
                worst = max(worst, abs(got - want) / abs(want))
    pole_ok = False
    try:
        gauss_2f1(-1.0, 4, 0.0, -1.0)
    except SpecFunDomainError:
        pole_ok = True
    status = "pass" if (worst <= tol and pole_ok) else "fail"
    return CheckResult("transform kernel vs Euler-integral oracle", 4, status,
                       f"max rel={worst:.2e}; pole-error={'ok' if pole_ok else 'MISSING'}",
                       f"<={tol}", "grid: alpha in {2.4,3,4} x m in 1..8 x five z; "
                       "alpha=2 checks the domain-error contract",
                       True, time.perf_counter() - t0)


def check_erfc(ctx: ValidationContext) -> CheckResult:
    t0 = time.perf_counter()
    tol = ctx.tol(1e-10)
    xs = np.arange(0.0, 6.01, 0.25)
    worst = max(abs(float(erfc(float(x))) / orc.erfc_quadrature_oracle(float(x)) - 1.0)
                for x in xs)
    status = "pass" if worst <= tol else "fail"
    return CheckResult("erfc vs quadrature oracle on [0,6]", 4, status,
                       f"max rel={worst:.2e}", f"<={tol}", "", True,
                       time.perf_counter() - t0)


def check_corollary_alpha4_coverage(ctx: ValidationContext) -> CheckResult:
    t0 = time.perf_counter()
    tol = ctx.tol(1e-3)
    s4 = ctx.system.with_channel(alpha_t=4.0)
    ref = an.coverage_typical(s4, ctx.thresholds).value
    cor = an.coverage_typical_alpha4(s4, ctx.thresholds, order=200).value
    rel = abs(cor - ref) / abs(ref)
    return CheckResult("exponent-4 coverage closed form vs integral", 5,
                       "pass" if rel <= tol else "fail",
                       f"rel={rel:.2e}", f"<={tol}",
                       f"integral={ref:.6e} closed={cor:.6e} (K=200)", True,
                       time.perf_counter() - t0)


def check_corollary_alpha4_rate(ctx: ValidationContext) -> CheckResult:
    t0 = time.perf_counter()
    tol = ctx.tol(1e-2)
    s4 = ctx.system.with_channel(alpha_t=4.0)
    ref = an.ergodic_typical(s4, ctx.thresholds).value
    cor = an.ergodic_typical_alpha4(s4, ctx.thresholds).value
    rel = abs(cor - ref) / abs(ref)
    return CheckResult("exponent-4 rate closed form vs integral", 5,
                       "pass" if rel <= tol else "fail",
                       f"rel={rel:.2e}", f"<={tol}",
                       f"integral={ref:.6e} closed={cor:.6e}", True,
                       time.perf_counter() - t0)


def check_corollary_alpha2_coverage(ctx: ValidationContext) -> CheckResult:
    """Exponent-2 coverage closed form: gap reported, not asserted (the
    printed form inverts the kernel dependence)."""
    t0 = time.perf_counter()
    s2 = ctx.system.with_channel(alpha_t=2.0)
    res = an.coverage_typical_alpha2(s2, ctx.thresholds)
    gap = res.diagnostics["gap"]
    enforced = ctx.profile == "strict"
    status = "report" if not enforced else (
        "pass" if abs(gap) <= ctx.tol(1e-3) else "fail")
    return CheckResult("exponent-2 coverage closed form (gap report)", 5, status,
                       f"gap={gap:.3e}", "reported",
                       f"closed={res.diagnostics['closed_form']:.3e} "
                       f"integral={res.diagnostics['reference_integral']:.3e}",
                       enforced, time.perf_counter() - t0)


def check_corollary_alpha2_rate(ctx: ValidationContext) -> CheckResult:
    t0 = time.perf_counter()
    s2 = ctx.system.with_channel(alpha_t=2.0)
    res = an.ergodic_typical_alpha2(s2, ctx.thresholds)
    gap = res.diagnostics["gap"]
    enforced = ctx.profile == "strict"
    status = "report" if not enforced else (
        "pass" if abs(gap) <= ctx.tol(1e-3) else "fail")
    return CheckResult("exponent-2 rate closed form (gap report)", 5, status,
                       f"gap={gap:.3e}", "reported",
                       f"closed={res.diagnostics['closed_form']:.3e} "
                       f"integral={res.diagnostics['reference_integral']:.3e}",
                       enforced, time.perf_counter() - t0)


def check_intercept_average(ctx: ValidationContext) -> CheckResult:
    """Angle-averaged intercept: the closed-form variant against the
    quadrature average; the signed ratio is reported, never forced to 1."""
    t0 = time.perf_counter()
    formula = ris_intercept_avg(ctx.system.channel, method="formula")
    quadrature = ris_intercept_avg(ctx.system.channel, method="quadrature")
    engine = ris_intercept_sq_eff(ctx.system.channel)
    ratio = quadrature / formula
    return CheckResult("angle-averaged intercept, formula vs quadrature", 5,
                       "report", f"quad/formula={ratio:.6f}", "reported",
                       f"formula={formula:.6e} quadrature={quadrature:.6e} "
                       f"engine={engine:.6e}", False,
                       time.perf_counter() - t0)


def check_asymptote(ctx: ValidationContext) -> CheckResult:
    t0 = time.perf_counter()
    tol = ctx.tol(0.05)
    s20 = ctx.system.with_channel(L=20.0)
    ref = an.coverage_typical(s20, ctx.thresholds).value
    _, lim = an.coverage_typical_asymptotic_L(s20, ctx.thresholds)
    gap = abs(ref - lim.value)
    return CheckResult("large-aperture limit vs integral at L=20m", 6,
                       "pass" if gap <= tol else "fail",
                       f"|gap|={gap:.4f}", f"<={tol}",
                       f"integral={ref:.4f} limit={lim.value:.4f}", True,
                       time.perf_counter() - t0)


def check_rate_slope(ctx: ValidationContext) -> CheckResult:
    t0 = time.perf_counter()
    tol = ctx.tol(0.05)
    res = an.ergodic_slope_L(ctx.system, ctx.thresholds, (10.0, 30.0, 100.0, 300.0))
    status = "pass" if abs(res.value) <= tol else "fail"
    return CheckResult("rate slope vs log aperture over [30,300]m", 6, status,
                       f"|slope|={abs(res.value):.4f} BPCU/decade", f"<={tol}",
                       f"rates={['%.4f' % r for r in res.diagnostics['rates']]}",
                       True, time.perf_counter() - t0)


def _light_spatial(sp: SpatialParams, R_L: float | None = None) -> SpatialParams:
    """A reduced sampling window for distribution tests; the laws under
    test do not depend on the outer radius at these scales."""
    return dataclasses.replace(sp, R_L=R_L if R_L is not None else sp.R_L,
                               sim_radius=1200.0)


def check_ks_theta(ctx: ValidationContext) -> CheckResult:
    """Uniformity of the sampled BS-surface-user angle.

    The origin-centred exclusion disc biases the nearest-BS direction very
    slightly whenever the serving BS falls within twice the disc radius of
    the surface; the induced distance to uniform is about D = 0.004, still
    inside the 1%-significance acceptance band at 1e5 samples (the claim is
    exact when the disc is shrunk away, which the unit suite also checks).
    """
    t0 = time.perf_counter()
    n = ctx.n(100_000)
    sp = _light_spatial(ctx.system.spatial)
    thetas = np.empty(n)
    for i in range(n):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=ctx.master_seed, spawn_key=(190, i)))
        thetas[i] = sample_realization(sp, rng).theta
    res = stats.kstest(thetas, lambda x: np.clip(x / math.pi, 0.0, 1.0))
    status = "pass" if res.pvalue > 0.01 else "fail"
    return CheckResult("KS: BS-surface-user angle uniform on [0,pi]", 7, status,
                       f"D={res.statistic:.5f} p={res.pvalue:.3f}", "p>0.01",
                       f"n={n}; exclusion-disc bias ~0.004 is within the band",
                       True, time.perf_counter() - t0)


def check_ks_surface_distance(ctx: ValidationContext) -> CheckResult:
    t0 = time.perf_counter()
    n = ctx.n(100_000)
    sp = ctx.system.spatial
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=ctx.master_seed, spawn_key=(91,)))
    radii = sp.R_L * np.sqrt(rng.uniform(size=n))
    res = stats.kstest(radii, lambda x: np.clip(x / sp.R_L, 0.0, 1.0) ** 2)
    status = "pass" if res.pvalue > 0.01 else "fail"
    return CheckResult("KS: surface-to-user distance law", 7, status,
                       f"D={res.statistic:.5f} p={res.pvalue:.3f}", "p>0.01",
                       f"n={n}", True, time.perf_counter() - t0)


def check_ks_nearest(ctx: ValidationContext) -> CheckResult:
    """Nearest-BS distance against its density, on a fixture with the
    exclusion disc shrunk to nothing."""
    t0 = time.perf_counter()
    n = ctx.n(100_000)
    sp = _light_spatial(ctx.system.spatial, R_L=1e-3)
    lam = math.pi * sp.lambda_b
    vals = np.empty(n)
    for i in range(n):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=ctx.master_seed, spawn_key=(92, i)))
        vals[i] = sample_realization(sp, rng).r_br0
    res = stats.kstest(vals, lambda x: 1.0 - np.exp(-lam * np.square(x)))
    status = "pass" if res.pvalue > 0.01 else "fail"
    return CheckResult("KS: nearest-BS distance (shrunk-disc fixture)", 7, status,
                       f"D={res.statistic:.5f} p={res.pvalue:.3f}", "p>0.01",
                       f"n={n}", True, time.perf_counter() - t0)


def check_laplace_connected(ctx: ValidationContext) -> CheckResult:
    t0 = time.perf_counter()
    tol = ctx.tol(0.02)
    sp, cp, pa = ctx.system.spatial, ctx.system.channel, ctx.system.power
    coef = pa.P_b * cp.C
    mean_i = orc.campbell_mean_radial(sp.lambda_b, coef, cp.alpha_c, sp.r_c)
    s_grid = np.logspace(-2.0, 2.0, 9) / mean_i
    mc, se = orc.mc_laplace_radial(s_grid, sp.lambda_b, coef, cp.alpha_c, sp.r_c,
                                   cp.m_t, ctx.n(100_000), seed=ctx.master_seed + 81)
    cf = np.array([an.laplace_connected(float(s), ctx.system).value for s in s_grid])
    worst = float(np.max(np.abs(mc / cf - 1.0)))
    noise = float(np.max(1.96 * se / cf))
    underpowered = noise > tol / 2.0
    status = ("underpowered" if (worst > tol and underpowered)
              else ("pass" if worst <= tol else "fail"))
    return CheckResult("interference transform vs MC, connected user", 8, status,
                       f"max rel={worst:.4f}", f"<={tol}",
                       f"s on 4 decades around 1/E[I]; mc noise(95%)<={noise:.4f}",
                       status != "underpowered", time.perf_counter() - t0)


def check_laplace_typical(ctx: ValidationContext) -> CheckResult:
    """Reflected-path interference transform against direct Monte Carlo.

    The transform argument grid spans four decades positioned around
    1/E[I] but weighted downward ([1e-3, 10] x 1/E[I]): at the shallow
    reflected exponent the transform collapses to ~1e-27 two decades above
    1/E[I], out of reach of any 1e5-draw average, while all
    coverage-relevant arguments lie within the kept range.
    """
    t0 = time.perf_counter()
    tol = ctx.tol(0.02)
    sp, cp, pa = ctx.system.spatial, ctx.system.channel, ctx.system.power
    r_br0 = 0.5 / math.sqrt(sp.lambda_b)
    r_ru0 = 2.0 * sp.R_L / 3.0
    coef = pa.P_b * ris_intercept_sq_eff(cp) * r_ru0 ** (-cp.alpha_t)
    mean_i = orc.campbell_mean_radial(sp.lambda_b, coef, cp.alpha_t, r_br0)
    s_grid = np.logspace(-3.0, 1.0, 9) / mean_i
    mc, se = orc.mc_laplace_radial(s_grid, sp.lambda_b, coef, cp.alpha_t, r_br0,
                                   cp.m_t, ctx.n(100_000), seed=ctx.master_seed + 82,
                                   thinning=cp.rho_t)
    cf = np.array([
        an.laplace_typical_ris(float(s) * cp.rho_t, r_br0, r_ru0, ctx.system).value
        for s in s_grid])
    worst = float(np.max(np.abs(mc / cf - 1.0)))
    noise = float(np.max(1.96 * se / cf))
    underpowered = noise > tol / 2.0
    status = ("underpowered" if (worst > tol and underpowered)
              else ("pass" if worst <= tol else "fail"))
    return CheckResult("interference transform vs MC, typical user", 8, status,
                       f"max rel={worst:.4f}", f"<={tol}",
                       f"r_br0={r_br0:.1f} r_ru0={r_ru0:.1f}, s on 4 decades; "
                       f"mc noise(95%)<={noise:.4f}",
                       status != "underpowered", time.perf_counter() - t0)


def check_trend_aperture(ctx: ValidationContext) -> CheckResult:
    t0 = time.perf_counter()
    grid = (0.5, 1.0, 2.0, 3.0, 4.0, 5.0)
    vals = [an.coverage_typical(ctx.system.with_channel(L=L), ctx.thresholds).value
            for L in grid]
    mono = all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    return CheckResult("coverage non-decreasing in aperture length", 9,
                       "pass" if mono else "fail",
                       " ".join(f"{v:.4f}" for v in vals), "non-decreasing",
                       f"L grid {grid}", True, time.perf_counter() - t0)


def check_trend_density(ctx: ValidationContext) -> CheckResult:
    t0 = time.perf_counter()
    from .geometry import default_sim_radius
    grids = [1.0 / (600.0**2 * math.pi), 1.0 / (400.0**2 * math.pi),
             1.0 / (200.0**2 * math.pi)]
    rates = []
    hws = []
    for lam in grids:
        s = ctx.system.with_spatial(lambda_b=lam, sim_radius=default_sim_radius(lam))
        s = s.with_power(P_b=dbm_to_watts(10.0))
        r_t, _ = sim.estimate_ergodic(s, ctx.thresholds, "ris_noma",
                                      ctx.n(20_000), ctx.master_seed)
        rates.append(r_t.estimate)
        hws.append(r_t.half_width_95)
    increasing = all(b > a for a, b in zip(rates, rates[1:]))
    resolved = all(abs(b - a) > (ha + hb) for (a, b, ha, hb)
                   in zip(rates, rates[1:], hws, hws[1:]))
    status = "pass" if increasing else ("underpowered" if not resolved else "fail")
    return CheckResult("typical-user rate increasing in BS density", 9, status,
                       " ".join(f"{r:.4f}" for r in rates), "increasing",
                       "densities 1/(600^2 pi) < 1/(400^2 pi) < 1/(200^2 pi)",
                       status != "underpowered", time.perf_counter() - t0)


def check_trend_connected_distance(ctx: ValidationContext) -> CheckResult:
    t0 = time.perf_counter()
    grid = (50.0, 75.0, 100.0)
    vals = [an.ergodic_connected(ctx.system.with_spatial(r_c=r), ctx.thresholds).value
            for r in grid]
    decreasing = all(b < a for a, b in zip(vals, vals[1:]))
    return CheckResult("connected-user rate decreasing in link distance", 9,
                       "pass" if decreasing else "fail",
                       " ".join(f"{v:.4f}" for v in vals), "decreasing",
                       f"r_c grid {grid}", True, time.perf_counter() - t0)


def check_noma_vs_oma_connected(ctx: ValidationContext) -> CheckResult:
    t0 = time.perf_counter()
    _, noma_c = ctx.scenario_coverage("ris_noma")
    _, oma_c = ctx.scenario_coverage("ris_oma")
    ok = noma_c.estimate >= oma_c.estimate
    return CheckResult("connected-user coverage: NOMA >= OMA (equal rate target)",
                       9, "pass" if ok else "fail",
                       f"noma={noma_c.estimate:.4f} oma={oma_c.estimate:.4f}",
                       "noma >= oma", "paired ensembles at 10 dBm", True,
                       time.perf_counter() - t0)


def check_ris_vs_conventional(ctx: ValidationContext) -> CheckResult:
    t0 = time.perf_counter()
    noma_t, _ = ctx.scenario_coverage("ris_noma")
    oma_t, _ = ctx.scenario_coverage("ris_oma")
    conv_t, _ = ctx.scenario_coverage("conventional_noma")
    ok = (noma_t.estimate >= conv_t.estimate) and (oma_t.estimate >= conv_t.estimate)
    return CheckResult("typical-user coverage: both RIS scenarios beat conventional",
                       9, "pass" if ok else "fail",
                       f"ris_noma={noma_t.estimate:.4f} ris_oma={oma_t.estimate:.4f} "
                       f"conventional={conv_t.estimate:.4f}",
                       "ris >= conventional", "paired ensembles at 10 dBm", True,
                       time.perf_counter() - t0)


def check_determinism(ctx: ValidationContext) -> CheckResult:
    """Byte-identical CSV across repeated runs and thread counts {1, 8}."""
    t0 = time.perf_counter()
    analytic = ConfigBundle(
        system=ctx.system, thresholds=ctx.thresholds,
        sweep=SweepSpec(axis="snr_dbm", grid=(0.0, 10.0),
                        scenarios=("ris_noma",), backends=("analytic",),
                        metrics=("coverage_t", "coverage_c"),
                        n_trials=10_000, master_seed=ctx.master_seed))
    simulated = ConfigBundle(
        system=ctx.system, thresholds=ctx.thresholds,
        sweep=SweepSpec(axis="snr_dbm", grid=(10.0,),
                        scenarios=("ris_noma",), backends=("simulated",),
                        metrics=("coverage_t",),
                        n_trials=10_000, master_seed=ctx.master_seed))
    outputs = {"analytic": [], "simulated": []}
    old = os.environ.get("RISNOMA_THREADS")
    try:
        for threads in ("1", "8"):
            os.environ["RISNOMA_THREADS"] = threads
            for _ in range(2):
                outputs["analytic"].append(harness.run_sweep(analytic))
                outputs["simulated"].append(harness.run_sweep(simulated))
    finally:
        if old is None:
            os.environ.pop("RISNOMA_THREADS", None)
        else:
            os.environ["RISNOMA_THREADS"] = old
    same = all(len(set(v)) == 1 for v in outputs.values())
    return CheckResult("byte-identical sweeps across reruns and threads {1,8}",
                       10, "pass" if same else "fail",
                       f"analytic variants={len(set(outputs['analytic']))} "
                       f"simulated variants={len(set(outputs['simulated']))}",
                       "1 variant each", "", True, time.perf_counter() - t0)


CHECKS: tuple[tuple[str, Callable[[ValidationContext], CheckResult]], ...] = (
    ("coverage_typical", check_coverage_typical),
    ("coverage_connected", check_coverage_connected),
    ("rate_typical", check_rate_typical),
    ("rate_connected", check_rate_connected),
    ("hypergeometric_kernel", check_hypergeometric),
    ("erfc_kernel", check_erfc),
    ("corollary_alpha4_coverage", check_corollary_alpha4_coverage),
    ("corollary_alpha4_rate", check_corollary_alpha4_rate),
    ("corollary_alpha2_coverage", check_corollary_alpha2_coverage),
    ("corollary_alpha2_rate", check_corollary_alpha2_rate),
    ("intercept_average", check_intercept_average),
    ("asymptote_limit", check_asymptote),
    ("rate_slope", check_rate_slope),
    ("ks_theta", check_ks_theta),
    ("ks_surface_distance", check_ks_surface_distance),
    ("ks_nearest_bs", check_ks_nearest),
    ("laplace_connected", check_laplace_connected),
    ("laplace_typical", check_laplace_typical),
    ("trend_aperture", check_trend_aperture),
    ("trend_density", check_trend_density),
    ("trend_connected_distance", check_trend_connected_distance),
    ("noma_vs_oma_connected", check_noma_vs_oma_connected),
    ("ris_vs_conventional", check_ris_vs_conventional),
    ("determinism", check_determinism),
)


def report_to_csv(results: list[CheckResult]) -> str:
    out = io.StringIO()
    out.write("check,criterion,status,measured,tolerance,enforced\n")
    for r in results:
        measured = r.measured.replace(",", ";")
        tolerance = r.tolerance.replace(",", ";")
        out.write(f"{r.name.replace(',', ';')},{r.criterion},{r.status},"
                  f"{measured},{tolerance},{int(r.enforced)}\n")
    return out.getvalue()


def run_validation(bundle: ConfigBundle | None = None, profile: str = "default",
                   n_scale: float = 1.0, names: tuple[str, ...] | None = None,
                   log=print) -> tuple[list[CheckResult], int]:
    """Run the cross-check suite; returns (results, exit_code).

    Exit code is 0 iff every enforced check passed.
    """
    ctx = ValidationContext(bundle, n_scale=n_scale, profile=profile)
    results: list[CheckResult] = []
    for key, fn in CHECKS:
        if names is not None and key not in names:
            continue
        res = fn(ctx)
        results.append(res)
        if log is not None:
            flag = {"pass": "PASS", "fail": "FAIL", "report": "REPORT",
                    "underpowered": "UNDERPOWERED"}[res.status]
            log(f"[criterion {res.criterion}] {flag:12s} {res.name}: "
                f"{res.measured} (tol {res.tolerance}) [{res.elapsed_s:.1f}s]")
    exit_code = 0 if all(r.ok for r in results) else 1
    return results, exit_code
