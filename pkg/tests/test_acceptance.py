"""Acceptance suite: one PASS/FAIL line per criterion.

Lines are printed as each test runs (visible with ``-s``) and repeated in an
"acceptance" section of the pytest terminal summary. Running this file
directly with ``python tests/test_acceptance.py`` prints the same lines.
"""
from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from thermal_transistor.bath import BathSpec, golden_rule_rates, rate_table
from thermal_transistor.circuit import RawCircuitParams, check_suppression, invert_capacitance_matrix
from thermal_transistor.config import parse_config
from thermal_transistor.lindblad import (
    generator_template,
    build_rate_matrix,
    evolve,
    relaxation_horizon,
    steady_state,
    transition_rates,
)
from thermal_transistor.bath import RatePair
from thermal_transistor.spectrum import tabulated_channels
from thermal_transistor.sweep import run_sweep
from thermal_transistor.thermo import OperatingConditions, amplification, solve_point, switch_characterize

from conftest import make_pipeline

RESULTS: dict[int, str] = {}
SEED = 20240601


def _report(n: int, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def default_sweep():
    t0 = time.perf_counter()
    table = run_sweep(parse_config(""))
    return table, time.perf_counter() - t0


@pytest.fixture(scope="module")
def curves(default_sweep):
    table, _ = default_sweep
    from thermal_transistor.spectrum import TransistorSpec

    cond = OperatingConditions()
    grid = table.column("T_M", 1.0)
    out = {}
    for lam in table.lambdas():
        reports = [solve_point(TransistorSpec.from_anharmonicity(lam), cond, float(t)) for t in grid]
        out[lam] = (reports, amplification(reports))
    return out


def test_criterion_01_conservation(default_sweep):
    table, elapsed = default_sweep
    J = np.column_stack([table.column(c) for c in ("J_S", "J_M", "J_D")])
    rel = np.abs(J.sum(axis=1)) / np.maximum(np.abs(J).max(axis=1), 1e-30)
    ok = len(table) == 800 and rel.max() <= 1e-10 and elapsed < 10.0
    _report(1, ok, f"max |sum J|/max|J| = {rel.max():.2e} over {len(table)} rows (<= 1e-10); "
                   f"sweep took {elapsed:.2f} s (< 10 s)")


def test_criterion_02_equilibrium_null():
    worst = 0.0
    for T in (0.5, 1.0, 2.0):
        for lam in (1.0, 2.0, 3.0, 4.0):
            r = solve_point(make_pipeline(lam=lam).spec, OperatingConditions(T_S=T, T_D=T), T)
            worst = max(worst, *map(abs, r.currents))
    _report(2, worst <= 1e-12, f"max |J|/(R Omega^4) at common T in {{0.5, 1, 2}} = {worst:.2e} (<= 1e-12)")


def test_criterion_03_gibbs_fixed_point():
    worst = 0.0
    for T in (0.5, 1.0, 2.0):
        for lam in (1.0, 4.0):
            pipe = make_pipeline(lam=lam, T_S=T, T_M=T, T_D=T)
            p = steady_state(pipe.rm).populations
            w = np.exp(-pipe.es.energies / T)
            worst = max(worst, float(np.max(np.abs(p - w / w.sum()))))
    _report(3, worst <= 1e-10, f"max |p - Gibbs| = {worst:.2e} (<= 1e-10)")


def test_criterion_04_ode_oracle():
    pipe = make_pipeline()
    ss = steady_state(pipe.rm).populations
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(3):
        X = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        rho0 = X @ X.conj().T
        rho0 /= np.trace(rho0)
        rho = evolve(rho0, relaxation_horizon(pipe.rm, 40), pipe.channels, pipe.rate_pairs,
                     np.diag(pipe.es.energies), frame="interaction")
        worst = max(worst, float(np.max(np.abs(np.diag(rho).real - ss))))
    _report(4, worst <= 1e-8, f"max |p_kernel - p_ODE| over 3 random initial states = {worst:.2e} (<= 1e-8)")


def test_criterion_05_collapse_operators_and_template():
    pipe = make_pipeline()
    template = tabulated_channels(pipe.es)
    weights = {"S1": 1, "S2": 2, "S3": 1, "M1": 2, "M2": 2, "M3": 2, "D1": 1, "D2": 1, "D3": 2}
    matrices_ok, flipped = True, []
    for c in pipe.channels:
        mat, _ = template[c.label]
        if np.array_equal(c.matrix, mat):
            continue
        if np.array_equal(c.matrix, -mat):
            flipped.append(c.label)  # a global phase; the dissipator is identical
        else:
            matrices_ok = False
    prefactors_ok = all(c.degeneracy_weight == weights[c.label] for c in pipe.channels)
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(200):
        draws = rng.uniform(0, 10, size=18)
        pairs = [RatePair(rp.channel, draws[2 * k], draws[2 * k + 1]) for k, rp in enumerate(pipe.rate_pairs)]
        W = transition_rates(pairs)
        M = W - np.diag(W.sum(axis=0))
        T = generator_template(rate_table(pairs))
        worst = max(worst, float(np.max(np.abs(M - T)) / np.max(np.abs(T))))
    ok = matrices_ok and prefactors_ok and worst <= 1e-12
    _report(5, ok, f"9/9 collapse matrices equal up to global sign (sign-flipped: {', '.join(flipped) or 'none'}), "
                   f"pi/2pi prefactors {'match' if prefactors_ok else 'DIFFER'}, "
                   f"generator vs template max rel diff {worst:.1e} (<= 1e-12)")


def test_criterion_06_detailed_balance():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(100):
        lam = rng.uniform(0, 4.5)
        Ts = rng.uniform(0.05, 5.0, size=3)
        pipe = make_pipeline(lam=lam, T_S=Ts[0], T_M=Ts[1], T_D=Ts[2], Q=rng.uniform(10, 300), R=rng.uniform(0.1, 10))
        for rp in pipe.rate_pairs:
            T = pipe.baths[rp.channel.bath].T
            expected = math.exp(-rp.channel.frequency / T) * rp.alpha_rate
            if expected > 0:
                worst = max(worst, abs(rp.beta_rate - expected) / expected)
    _report(6, worst <= 1e-12, f"max relative |beta - exp(-w/T) alpha| over 100 draws x 9 channels = {worst:.2e} (<= 1e-12)")


def test_criterion_07_amplification_ratio(curves):
    ref = curves[1.0][1]
    ratio = float(np.max(curves[4.0][1].normalized_to(ref).normalized_S))
    _report(7, 3.0 <= ratio <= 5.0, f"peak normalised alpha_S(lambda=4)/peak alpha_S(lambda=1) = {ratio:.4f} (in [3, 5])")


def test_criterion_08_switch_contrast():
    spec = make_pipeline().spec
    off, on, contrast = switch_characterize(spec, OperatingConditions(), 0.25, 0.50)
    _report(8, contrast >= 10.0, f"J_S(0.50)/J_S(0.25) = {on:.4e}/{off:.4e} = {contrast:.4f} (>= 10)")


def test_criterion_09_modulator_slope_ordering(curves):
    T_fix = 1.0
    slopes = {}
    for lam, (reports, _) in curves.items():
        T = np.array([r.T_M for r in reports])
        J_M = np.array([r.J_M for r in reports])
        slopes[lam] = float(np.gradient(J_M, T)[np.argmin(np.abs(T - T_fix))])
    seq = [slopes[lam] for lam in (4.0, 3.0, 2.0, 1.0)]
    ok = all(b > a for a, b in zip(seq, seq[1:]))
    _report(9, ok, f"dJ_M/dT_M at T_M = {T_fix:g} for lambda 4,3,2,1 = "
                   + ", ".join(f"{s:.3e}" for s in seq) + " (strictly increasing)")


def test_criterion_10_amplification_identity(curves):
    worst = max(float(np.max(np.abs(c.alpha_S + c.alpha_D + 1))) for _, c in curves.values())
    _report(10, worst <= 1e-6, f"max |alpha_S + alpha_D + 1| over 4 x 200 grid = {worst:.2e} (<= 1e-6)")


def test_criterion_11_inverse_and_threshold():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(1000):
        c = np.exp(rng.uniform(np.log(1e-3), np.log(1e3), size=5))
        p = RawCircuitParams(*c, L2=1.0, EJ1=1.0, EJ3=1.0)
        direct = np.linalg.inv(p.capacitance_matrix())
        worst = max(worst, float(np.max(np.abs(invert_capacitance_matrix(p) - direct)) / np.max(np.abs(direct))))
    exact = all(
        check_suppression(Fraction(1), Fraction(1), Fraction(lam), Fraction(5, 7))[1] == Fraction(7, 10) * Fraction(lam)
        for lam in (Fraction(1, 2), 1, 2, 3, 4, Fraction(37, 10))
    )
    _report(11, worst <= 1e-10 and exact,
            f"closed-form vs numeric inverse max rel diff {worst:.1e} over 1000 draws (<= 1e-10); "
            f"threshold at beta = 5/7 equals 0.7 lambda exactly: {exact}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main(["-q", "-s", __file__]))
