import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermal_transistor import thermo
from thermal_transistor.errors import DefinitionMismatch, FlatModulator
from thermal_transistor.lindblad import steady_state
from thermal_transistor.spectrum import TransistorSpec
from thermal_transistor.thermo import (
    HeatReport,
    OperatingConditions,
    amplification,
    closed_form_currents,
    heat_currents,
    solve_point,
    switch_characterize,
    trace_form_currents,
)

from conftest import make_pipeline
from oracle import reference_currents

COND = OperatingConditions()
GRID = np.linspace(0.05, 1.0, 200)

# full-pipeline values at lambda = 4, frozen from the independent mpmath oracle
TABLE1_ON = (1.4138307383197716e-08, 2.827624896343624e-09, -1.696593227954134e-08)
TABLE1_OFF = (2.0718378979389115e-09, 4.143491908007834e-10, -2.486187088739695e-09)

temps = st.floats(min_value=0.3, max_value=3.0)
lams = st.sampled_from([0.5, 1.0, 2.0, 3.0, 4.0])


def _spec(lam):
    return TransistorSpec.from_anharmonicity(lam)


def _sweep(lam, cond=COND, grid=GRID):
    return [solve_point(_spec(lam), cond, float(t)) for t in grid]


@pytest.fixture(scope="module")
def sweeps():
    return {lam: _sweep(lam) for lam in (1.0, 2.0, 3.0, 4.0)}


def test_table1_point_frozen():
    r = solve_point(_spec(4.0), COND, 0.5)
    np.testing.assert_allclose(r.currents, TABLE1_ON, rtol=1e-12)
    assert r.J_S > 0 > r.J_D
    assert abs(r.J_S) == pytest.approx(abs(r.J_D), rel=0.2)
    assert abs(r.J_M) < abs(r.J_S) / 4


@pytest.mark.parametrize("lam,T_M", [(4.0, 0.25), (1.0, 0.05), (2.0, 1.0), (3.0, 0.1)])
def test_against_independent_oracle(lam, T_M):
    _, ref = reference_currents(lam, 2.0, T_M, 0.2)
    r = solve_point(_spec(lam), COND, T_M)
    np.testing.assert_allclose(r.currents, [float(x) for x in ref], rtol=1e-12)


def test_off_state_frozen():
    np.testing.assert_allclose(solve_point(_spec(4.0), COND, 0.25).currents, TABLE1_OFF, rtol=1e-12)


@pytest.mark.parametrize("T", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("lam", [1.0, 4.0])
def test_equilibrium_has_no_currents(T, lam):
    r = solve_point(_spec(lam), OperatingConditions(T_S=T, T_D=T), T)
    assert max(map(abs, r.currents)) <= 1e-12


@settings(max_examples=100)
@given(lams, temps, temps, temps)
def test_closed_form_equals_trace_form(lam, T_S, T_M, T_D):
    pipe = make_pipeline(lam=lam, T_S=T_S, T_M=T_M, T_D=T_D)
    ss = steady_state(pipe.rm)
    closed = heat_currents(ss, pipe.rate_pairs, pipe.es.energies, check=False)
    trace = trace_form_currents(ss.populations, pipe.rate_pairs, pipe.es.energies)
    scale = max(map(abs, closed))
    gross = thermo.gross_throughput(ss.populations, pipe.rate_pairs)
    assert max(abs(a - b) for a, b in zip(closed, trace)) <= 1e-10 * scale + 1e-13 * gross


@given(lams, st.floats(min_value=0.05, max_value=3.0), st.floats(min_value=0.05, max_value=3.0),
       st.floats(min_value=0.05, max_value=3.0))
def test_conservation_and_second_law(lam, T_S, T_M, T_D):
    r = solve_point(_spec(lam), OperatingConditions(T_S=T_S, T_D=T_D), T_M)
    assert r.conservation_error() <= 1e-10
    # entropy handed to the baths is never negative
    sigma = -(r.J_S / T_S + r.J_M / T_M + r.J_D / T_D)
    assert sigma >= -1e-10 * max(abs(r.J_S / T_S), abs(r.J_M / T_M), abs(r.J_D / T_D), thermo.TINY_FLOOR)


def test_sign_convention_with_modulator_above_drain(sweeps):
    for lam, reports in sweeps.items():
        for r in reports:
            if r.T_M >= COND.T_D:
                assert r.J_S >= 0 and r.J_D <= 0, (lam, r.T_M)


def test_reverse_flow_when_modulator_is_coldest(sweeps):
    # with T_M below T_D the drain feeds both other baths through off-resonant
    # filter tails; tiny but resolved by the oracle
    r = sweeps[1.0][0]
    _, ref = reference_currents(1.0, 2.0, r.T_M, 0.2)
    assert float(ref[0]) < 0 and r.J_S < 0
    assert abs(r.J_S) < 1e-20


def test_conservation_over_default_grid(sweeps):
    for reports in sweeps.values():
        assert max(r.conservation_error() for r in reports) <= 1e-10


def test_source_current_nondecreasing(sweeps):
    for lam, reports in sweeps.items():
        J = np.array([r.J_S for r in reports if 0.1 <= r.T_M <= 1.0])
        assert np.all(np.diff(J) >= 0), lam


def test_amplification_identity_and_value(sweeps):
    for lam, reports in sweeps.items():
        curve = amplification(reports)
        assert np.max(np.abs(curve.alpha_S + curve.alpha_D + 1)) <= 1e-6
        # every completed cycle takes w2 from the source per w1 from the modulator
        spec = _spec(lam)
        np.testing.assert_allclose(curve.alpha_S, spec.omega2 / spec.omega1, rtol=1e-2)


def test_normalised_peak_ratio(sweeps):
    ref = amplification(sweeps[1.0])
    high = amplification(sweeps[4.0]).normalized_to(ref)
    assert 3.0 <= np.max(high.normalized_S) <= 5.0
    assert np.max(ref.normalized_to(ref).normalized_S) == 1.0
    with pytest.raises(ValueError):
        _ = ref.normalized_S


def test_resistance_scales_out():
    grid = np.linspace(0.3, 0.6, 7)
    a = _sweep(4.0, COND, grid)
    b = _sweep(4.0, OperatingConditions(R=2.0), grid)
    for ra, rb in zip(a, b):
        np.testing.assert_allclose(rb.currents, ra.currents, rtol=1e-12)
    ca, cb = amplification(a), amplification(b)
    np.testing.assert_allclose(cb.alpha_S, ca.alpha_S, rtol=1e-10)
    np.testing.assert_allclose(cb.alpha_D, ca.alpha_D, rtol=1e-10)


def test_resistance_scales_unnormalised_currents():
    pipe1 = make_pipeline(R=1.0)
    pipe2 = make_pipeline(R=2.0)
    J1 = heat_currents(steady_state(pipe1.rm), pipe1.rate_pairs, pipe1.es.energies)
    J2 = heat_currents(steady_state(pipe2.rm), pipe2.rate_pairs, pipe2.es.energies)
    np.testing.assert_allclose(J2, 2 * np.array(J1), rtol=1e-12)


def test_float_amplification_path():
    reports = [
        HeatReport(T_M=t, J_S=5 * t**2, J_M=t**2, J_D=-6 * t**2, populations=None) for t in (0.1, 0.2, 0.4, 0.5)
    ]
    curve = amplification(reports)
    np.testing.assert_allclose(curve.alpha_S, 5.0, rtol=1e-12)
    np.testing.assert_allclose(curve.alpha_D, -6.0, rtol=1e-12)


def test_amplification_preconditions():
    mk = lambda t, jm: HeatReport(T_M=t, J_S=0.0, J_M=jm, J_D=-jm, populations=None)
    with pytest.raises(ValueError):
        amplification([mk(0.1, 1.0), mk(0.2, 2.0)])
    with pytest.raises(ValueError):
        amplification([mk(0.1, 1.0), mk(0.2, 2.0), mk(0.3, 1.5)])
    with pytest.raises(ValueError):
        amplification([mk(0.2, 1.0), mk(0.1, 2.0), mk(0.3, 3.0)])
    with pytest.raises(FlatModulator):
        amplification([mk(0.1, 1.0), mk(0.2, 1.0 + 1e-12), mk(0.3, 1.0 + 2e-12)], floor=1e-6)


def test_switch_contrast_regression():
    off, on, contrast = switch_characterize(_spec(4.0), COND)
    assert off == pytest.approx(TABLE1_OFF[0], rel=1e-12)
    assert on == pytest.approx(TABLE1_ON[0], rel=1e-12)
    assert contrast == pytest.approx(6.824041300374, rel=1e-10)


def test_switch_same_temperature():
    assert switch_characterize(_spec(4.0), COND, 0.4, 0.4)[2] == 1.0
    with pytest.raises(ValueError):
        switch_characterize(_spec(4.0), COND, 0.5, 0.25)


def test_definition_mismatch_detected(monkeypatch, table1):
    ss = steady_state(table1.rm)
    monkeypatch.setattr(thermo, "trace_form_currents", lambda p, rp, e: (1.0, 0.0, -1.0))
    with pytest.raises(DefinitionMismatch):
        heat_currents(ss, table1.rate_pairs, table1.es.energies)


def test_swapped_modulator_pairing_breaks_conservation(table1):
    # pairing alpha with rho_44 in the E1 <-> E4 term (instead of rho_11)
    # leaves a nonzero total current, so conservation pins the pairing
    ss = steady_state(table1.rm)
    p, E = ss.populations, table1.es.energies
    rates = {rp.label: (rp.alpha_rate, rp.beta_rate) for rp in table1.rate_pairs}
    J = closed_form_currents(p, rates, E)
    a, b = rates["M2"]
    swapped = J[1] - (E[3] - E[0]) * (a * p[0] - b * p[3]) + (E[3] - E[0]) * (a * p[3] - b * p[0])
    assert abs(J[0] + swapped + J[2]) > 1e3 * abs(sum(J))


def test_working_digits_grow_at_low_temperature():
    hot = make_pipeline(T_M=1.0)
    cold = make_pipeline(T_M=0.05)
    assert thermo.working_digits(cold.rate_pairs, cold.baths) > thermo.working_digits(hot.rate_pairs, hot.baths) >= thermo.BASE_DIGITS


def test_conditions_validation():
    with pytest.raises(ValueError):
        OperatingConditions(T_S=0.0)
    with pytest.raises(ValueError):
        OperatingConditions(alpha_ratio=math.nan)


def test_double_precision_path_matches_at_moderate_temperature():
    a = solve_point(_spec(4.0), COND, 0.8, extended=False)
    b = solve_point(_spec(4.0), COND, 0.8)
    np.testing.assert_allclose(a.currents, b.currents, rtol=1e-6)
