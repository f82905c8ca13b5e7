"""Steady-state heat currents, amplification factors and switch contrast.

Sign convention: J_mu > 0 means energy flows from bath mu into the circuit.
Reported currents are normalised to J / (R Omega^4) and temperatures to
T / Omega.

Net currents can be many orders of magnitude below the gross energy exchanged
with each bath (a cold modulator suppresses transport by exp(-w1/T_M) while the
source keeps trading energy with the qutrit at full rate). In double precision
the difference ``alpha * rho_i - beta * rho_j`` then loses every significant
digit, so the reported currents are re-evaluated at extended precision, with
the number of digits chosen from the largest Boltzmann suppression in play.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import bath as bath_mod
from .bath import RatePair, make_baths, rate_table
from .errors import DefinitionMismatch, FlatModulator
from .lindblad import (
    SteadyState,
    _gth,
    generator_template,
    build_rate_matrix,
    dissipator,
    steady_state,
)
from .spectrum import TransistorSpec, build_hamiltonian, collapse_channels, eigensystem

TINY_FLOOR = 1e-30
DEFINITION_TOL = 1e-10
# rounding allowance relative to the gross energy throughput of all channels
ROUNDING_ALLOWANCE = 1e-13
BATH_IDS = ("S", "M", "D")
BASE_DIGITS = 50


@dataclass(frozen=True)
class OperatingConditions:
    """Bath-side settings; temperatures are in units of Omega."""

    T_S: float = 2.0
    T_D: float = 0.2
    Q: float = 100.0
    R: float = 1.0
    alpha_ratio: float = 0.01  # bath coupling alpha / g

    def __post_init__(self):
        for name in ("T_S", "T_D", "Q", "R", "alpha_ratio"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class HeatReport:
    T_M: float
    J_S: float
    J_M: float
    J_D: float
    populations: SteadyState
    anharmonicity: float = float("nan")
    # normalised currents as mpmath numbers, kept so that finite differences
    # of nearly flat currents do not run out of digits
    exact: tuple | None = field(default=None, repr=False, compare=False)
    digits: int = field(default=15, repr=False, compare=False)

    @property
    def currents(self) -> tuple[float, float, float]:
        return self.J_S, self.J_M, self.J_D

    def conservation_error(self) -> float:
        """|J_S + J_M + J_D| relative to the largest current (floored at 1e-30)."""
        scale = max(abs(self.J_S), abs(self.J_M), abs(self.J_D), TINY_FLOOR)
        return abs(self.J_S + self.J_M + self.J_D) / scale


@dataclass(frozen=True)
class AmplificationCurve:
    T_M: np.ndarray
    alpha_S: np.ndarray
    alpha_D: np.ndarray
    reference_peak: float | None = None

    @property
    def normalized_S(self) -> np.ndarray:
        if self.reference_peak is None:
            raise ValueError("curve has no normalisation reference")
        return self.alpha_S / self.reference_peak

    def normalized_to(self, reference: "AmplificationCurve") -> "AmplificationCurve":
        """Copy normalised to the peak source amplification of ``reference``."""
        return AmplificationCurve(self.T_M, self.alpha_S, self.alpha_D, float(np.max(reference.alpha_S)))


# ------------------------------------------------------------- current formulas

def closed_form_currents(p, rates, E):
    """Per-bath currents written out transition by transition.

    Plain arithmetic, so float and mpmath inputs both work. ``p`` and ``E`` are
    zero-based sequences over E1..E6; ``rates`` maps channel labels to
    (alpha, beta).
    """
    a = {k: v[0] for k, v in rates.items()}
    b = {k: v[1] for k, v in rates.items()}
    r1, r2, r3, r4, r5, r6 = p
    E1, E2, E3, E4, E5, E6 = E
    J_S = (
        (E3 - E2) * (a["S1"] * r2 - b["S1"] * r3)
        + 2 * (E6 - E5) * (a["S2"] * r5 - b["S2"] * r6)
        + (E3 - E4) * (a["S3"] * r4 - b["S3"] * r3)
    )
    J_M = (
        2 * (E6 - E3) * (a["M1"] * r3 - b["M1"] * r6)
        # E1 -> E4 emits through M2, so alpha pairs with rho_11 here
        + (E4 - E1) * (a["M2"] * r1 - b["M2"] * r4)
        + (E5 - E2) * (a["M2"] * r2 - b["M2"] * r5)
        + (E2 - E1) * (a["M3"] * r1 - b["M3"] * r2)
        + (E5 - E4) * (a["M3"] * r4 - b["M3"] * r5)
    )
    J_D = (
        (E6 - E2) * (a["D1"] * r2 - b["D1"] * r6)
        + (E6 - E4) * (a["D2"] * r4 - b["D2"] * r6)
        + 2 * (E3 - E1) * (a["D3"] * r1 - b["D3"] * r3)
    )
    return J_S, J_M, J_D


def trace_form_currents(p, rate_pairs: list[RatePair], energies) -> tuple[float, float, float]:
    """J_mu = tr(H D_mu(rho)) with rho = diag(p), evaluated with full matrices."""
    H = np.diag(np.asarray(energies, dtype=float)).astype(complex)
    rho = np.diag(np.asarray(p, dtype=float)).astype(complex)
    channels = [rp.channel for rp in rate_pairs]
    return tuple(
        float(np.trace(H @ dissipator(rho, channels, rate_pairs, bath)).real)
        for bath in BATH_IDS
    )


def gross_throughput(p, rate_pairs: list[RatePair]) -> float:
    """Sum over channels of frequency times (emission + absorption) flux."""
    W_total = 0.0
    for rp in rate_pairs:
        A2 = np.abs(rp.channel.matrix) ** 2
        flux = 2 * rp.alpha_rate * float(p @ A2.sum(axis=0)) + 2 * rp.beta_rate * float(p @ A2.sum(axis=1))
        W_total += rp.channel.frequency * flux
    return W_total


def heat_currents(ss: SteadyState, rate_pairs: list[RatePair], energies, check: bool = True):
    """Closed-form currents, cross-checked against the trace definition.

    Raises
    ------
    DefinitionMismatch
        If the two evaluations differ by more than 1e-10 of the largest
        current plus a rounding allowance of 1e-13 of the gross throughput.
    """
    p = ss.populations
    J = tuple(float(x) for x in closed_form_currents(p, rate_table(rate_pairs), energies))
    if check:
        Jt = trace_form_currents(p, rate_pairs, energies)
        tol = DEFINITION_TOL * max(max(map(abs, J)), TINY_FLOOR) + ROUNDING_ALLOWANCE * gross_throughput(p, rate_pairs)
        diff = max(abs(x - y) for x, y in zip(J, Jt))
        if diff > tol:
            raise DefinitionMismatch(
                f"closed-form and trace-form currents differ by {diff:.3e} (tol {tol:.3e})"
            )
    return J


# ----------------------------------------------------------- operating points

def working_digits(rate_pairs: list[RatePair], baths) -> int:
    """Decimal digits needed to resolve the smallest net flux.

    Each bath can suppress a net flux by at most exp(-w_max/T) relative to its
    gross exchange; the product over baths bounds the cancellation. The base
    of 50 digits keeps rounding noise far below the 1e-30 floor used for
    relative checks, even at equilibrium where the exact currents vanish.
    """
    exponent = 0.0
    for bid in BATH_IDS:
        w = max(rp.channel.frequency for rp in rate_pairs if rp.channel.bath == bid)
        exponent += w / baths[bid].T
    return BASE_DIGITS + int(math.ceil(exponent / math.log(10)))


def _extended_solution(rate_pairs, baths, alpha, g, energies, digits):
    channels = [rp.channel for rp in rate_pairs]
    with mpmath.workdps(digits):
        mp_pairs = bath_mod.golden_rule_rates(channels, baths, alpha, g, ctx=mpmath.mp)
        rates = rate_table(mp_pairs)
        M = generator_template(rates)
        W = M.copy()
        np.fill_diagonal(W, 0)
        p = _gth(W.T)
        E = [mpmath.mpf(float(e)) for e in energies]
        J = closed_form_currents(p, rates, E)
        return [float(x) for x in p], list(J)


def solve_point(
    spec: TransistorSpec,
    cond: OperatingConditions,
    T_M: float,
    extended: bool = True,
    steady_method: str = "gth",
) -> HeatReport:
    """Full pipeline at one modulator temperature ``T_M`` (units of Omega)."""
    H = build_hamiltonian(spec)
    es = eigensystem(H, spec)
    channels = collapse_channels(es, spec)
    Om = spec.Omega
    baths = make_baths(spec, cond.T_S * Om, T_M * Om, cond.T_D * Om, cond.Q, cond.R)
    alpha = cond.alpha_ratio * spec.g
    rate_pairs = bath_mod.golden_rule_rates(channels, baths, alpha, spec.g)
    rm = build_rate_matrix(rate_pairs)
    ss = steady_state(rm, method=steady_method)
    J = heat_currents(ss, rate_pairs, es.energies)

    if extended:
        digits = working_digits(rate_pairs, baths)
        p_ext, J_ext = _extended_solution(rate_pairs, baths, alpha, spec.g, es.energies, digits)
        J_float = [float(x) for x in J_ext]
        tol = DEFINITION_TOL * max(max(map(abs, J_float)), TINY_FLOOR) + ROUNDING_ALLOWANCE * gross_throughput(ss.populations, rate_pairs)
        if max(abs(x - y) for x, y in zip(J, J_float)) > tol:
            raise DefinitionMismatch("double and extended precision currents disagree")
        p = np.array(p_ext)
        ss = SteadyState(populations=p, residual=float(np.max(np.abs(rm.M @ p))))
        norm = cond.R * Om**4
        with mpmath.workdps(digits):
            exact = tuple(x / norm for x in J_ext)
        return HeatReport(
            T_M=T_M,
            J_S=float(exact[0]),
            J_M=float(exact[1]),
            J_D=float(exact[2]),
            populations=ss,
            anharmonicity=spec.anharmonicity,
            exact=exact,
            digits=digits,
        )

    norm = cond.R * Om**4
    return HeatReport(
        T_M=T_M,
        J_S=J[0] / norm,
        J_M=J[1] / norm,
        J_D=J[2] / norm,
        populations=ss,
        anharmonicity=spec.anharmonicity,
    )


# --------------------------------------------------------------- amplification

def _gradient(y, x):
    """Second-order finite differences on a nonuniform grid (central inside,
    one-sided at the ends); plain arithmetic so mpmath values pass through."""
    n = len(y)
    d = [None] * n
    for i in range(1, n - 1):
        h0, h1 = x[i] - x[i - 1], x[i + 1] - x[i]
        d[i] = (
            -h1 / (h0 * (h0 + h1)) * y[i - 1]
            + (h1 - h0) / (h0 * h1) * y[i]
            + h0 / (h1 * (h0 + h1)) * y[i + 1]
        )
    h0, h1 = x[1] - x[0], x[2] - x[1]
    d[0] = (
        -(2 * h0 + h1) / (h0 * (h0 + h1)) * y[0]
        + (h0 + h1) / (h0 * h1) * y[1]
        - h0 / (h1 * (h0 + h1)) * y[2]
    )
    h0, h1 = x[-2] - x[-3], x[-1] - x[-2]
    d[-1] = (
        h1 / (h0 * (h0 + h1)) * y[-3]
        - (h0 + h1) / (h0 * h1) * y[-2]
        + (2 * h1 + h0) / (h1 * (h0 + h1)) * y[-1]
    )
    return d


def amplification(reports: list[HeatReport], floor: float = 0.0) -> AmplificationCurve:
    """alpha_{S,D} = (dJ_{S,D}/dT_M) / (dJ_M/dT_M) by finite differences on the T_M grid.

    Interior points use central differences, the two ends second-order
    one-sided ones. When every report carries extended-precision currents the
    differences are taken at that precision.

    Raises
    ------
    ValueError
        Fewer than three points, or J_M not strictly monotone on the grid.
    FlatModulator
        |dJ_M/dT_M| <= ``floor`` at an interior point.
    """
    if len(reports) < 3:
        raise ValueError("amplification needs at least three grid points")
    T = [float(r.T_M) for r in reports]
    if any(b <= a for a, b in zip(T, T[1:])):
        raise ValueError("T_M grid must be strictly increasing")
    use_exact = all(r.exact is not None for r in reports)
    digits = max(r.digits for r in reports) if use_exact else 15
    with mpmath.workdps(digits):
        if use_exact:
            JS, JM, JD = (list(col) for col in zip(*(r.exact for r in reports)))
            x = [mpmath.mpf(t) for t in T]
        else:
            JS, JM, JD = (list(col) for col in zip(*(r.currents for r in reports)))
            x = T
        steps = [b - a for a, b in zip(JM, JM[1:])]
        if not (all(s > 0 for s in steps) or all(s < 0 for s in steps)):
            raise ValueError("J_M is not strictly monotone on the grid")
        dS, dM, dD = _gradient(JS, x), _gradient(JM, x), _gradient(JD, x)
        for i in range(1, len(T) - 1):
            if abs(dM[i]) <= floor:
                raise FlatModulator(f"dJ_M/dT_M vanishes at T_M = {T[i]:g}")
        alpha_S = np.array([float(s / m) for s, m in zip(dS, dM)])
        alpha_D = np.array([float(d / m) for d, m in zip(dD, dM)])
    return AmplificationCurve(T_M=np.array(T), alpha_S=alpha_S, alpha_D=alpha_D)


def switch_characterize(
    spec: TransistorSpec,
    cond: OperatingConditions,
    T_off: float = 0.25,
    T_on: float = 0.50,
) -> tuple[float, float, float]:
    """Source current at the off and on modulator temperatures, and their ratio."""
    if T_off > T_on:
        raise ValueError("T_off must not exceed T_on")
    off = solve_point(spec, cond, T_off)
    on = solve_point(spec, cond, T_on)
    return off.J_S, on.J_S, on.J_S / off.J_S
