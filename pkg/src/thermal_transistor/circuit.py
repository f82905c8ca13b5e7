"""Lumped-element circuit to effective device quantities.

Units follow the usual transmon conventions with 2e = 1 and Phi_0 / 2pi = 1, so
capacitances and inductances carry units of inverse energy and every derived
quantity below is an energy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RegimeViolation, ResonanceViolation, SingularMatrix

REGIME_THRESHOLD = 0.05
DISPERSIVE_THRESHOLD = 0.1
RESONANCE_TOL = 1e-9
DOMINANCE_FACTOR = 10.0


@dataclass(frozen=True)
class RawCircuitParams:
    """Node capacitances C1..C3, coupling capacitances Cg1/Cg2, resonator
    inductance L2 and Josephson energies EJ1/EJ3."""

    C1: float
    C2: float
    C3: float
    Cg1: float
    Cg2: float
    L2: float
    EJ1: float
    EJ3: float

    def __post_init__(self):
        for name in ("C1", "C2", "C3", "L2", "EJ1", "EJ3"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
        # a vanishing coupling capacitance just decouples the nodes
        for name in ("Cg1", "Cg2"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be nonnegative, got {value!r}")

    def capacitance_matrix(self) -> np.ndarray:
        c1, c2, c3, cg1, cg2 = self.C1, self.C2, self.C3, self.Cg1, self.Cg2
        return np.array(
            [
                [c1 + cg1, -cg1, 0.0],
                [-cg1, c2 + cg1 + cg2, -cg2],
                [0.0, -cg2, c3 + cg2],
            ]
        )


@dataclass(frozen=True)
class DerivedDeviceParams:
    EC1: float
    EC2: float
    EC3: float
    EL2: float
    alpha1: float
    beta1: float
    alpha3: float
    beta3: float
    omega_r: float
    g1: float
    g3: float
    Delta1: float
    Delta2: float
    Delta3: float


def inverse_capacitance_closed_form(params: RawCircuitParams) -> np.ndarray:
    """Cofactor expressions for the inverse capacitance matrix.

    The C11 and C33 elements are mirror images under 1 <-> 3; both carry a
    ``Cg1 * Cg2`` term.
    """
    c1, c2, c3, cg1, cg2 = params.C1, params.C2, params.C3, params.Cg1, params.Cg2
    det = (
        c1 * (c2 * c3 + c2 * cg2 + c3 * cg1 + c3 * cg2 + cg1 * cg2)
        + c2 * (c3 * cg1 + cg1 * cg2)
        + c3 * cg1 * cg2
    )
    if not det > 0:
        raise SingularMatrix(f"capacitance determinant {det!r} is not positive")
    k11 = (c2 * c3 + c2 * cg2 + c3 * cg1 + c3 * cg2 + cg1 * cg2) / det
    k12 = cg1 * (c3 + cg2) / det
    k13 = cg1 * cg2 / det
    k22 = (c1 + cg1) * (c3 + cg2) / det
    k23 = cg2 * (c1 + cg1) / det
    k33 = (c1 * c2 + c1 * cg1 + c1 * cg2 + c2 * cg1 + cg1 * cg2) / det
    return np.array([[k11, k12, k13], [k12, k22, k23], [k13, k23, k33]])


def invert_capacitance_matrix(params: RawCircuitParams) -> np.ndarray:
    """Return the symmetric inverse of the 3x3 capacitance matrix.

    The closed form is cross-checked against a direct LU inversion; the two
    must agree to 1e-12 relative, widened to a few cond(C) * eps when the
    matrix is ill conditioned (the LU result is only that accurate).
    """
    cmat = params.capacitance_matrix()
    try:
        np.linalg.cholesky(cmat)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix("capacitance matrix is not positive definite") from exc
    inv = inverse_capacitance_closed_form(params)
    direct = np.linalg.inv(cmat)
    scale = np.max(np.abs(direct))
    tol = max(1e-12, 8.0 * np.linalg.cond(cmat) * np.finfo(float).eps)
    if np.max(np.abs(inv - direct)) > tol * scale:
        raise SingularMatrix("closed-form inverse disagrees with direct inversion")
    return inv


def _qubit_level(alpha: float, beta: float) -> float:
    return alpha - 12.0 * beta


def _qutrit_levels(alpha: float, beta: float) -> tuple[float, float]:
    root = math.sqrt((alpha - 18.0 * beta) ** 2 + 72.0 * beta**2)
    return 6.0 * beta + root, 2.0 * root


def _check_anharmonic_branch(alpha: float, beta: float, label: str) -> None:
    if not alpha > 18.0 * beta:
        raise RegimeViolation(
            f"{label}: alpha={alpha:g} must exceed 18*beta={18 * beta:g}"
        )


def derive_device_params(
    params: RawCircuitParams,
    regime_threshold: float = REGIME_THRESHOLD,
    dispersive_threshold: float = DISPERSIVE_THRESHOLD,
) -> DerivedDeviceParams:
    """Charging/inductive energies, oscillator coefficients, couplings and detunings.

    The direct transmon-transmon term C13^-1 is dropped.

    Raises
    ------
    RegimeViolation
        If E_C/E_J for either transmon reaches ``regime_threshold`` or a
        coupling-to-detuning ratio reaches ``dispersive_threshold``.
    """
    kinv = invert_capacitance_matrix(params)
    ec1, ec2, ec3 = kinv[0, 0], kinv[1, 1], kinv[2, 2]
    for ec, ej, label in ((ec1, params.EJ1, "transmon 1"), (ec3, params.EJ3, "transmon 3")):
        if ec / ej >= regime_threshold:
            raise RegimeViolation(
                f"{label}: E_C/E_J = {ec / ej:.4g} is not below {regime_threshold:g}"
            )
    el2 = 1.0 / (2.0 * params.L2)
    alpha1 = math.sqrt(8.0 * ec1 * params.EJ1)
    alpha3 = math.sqrt(8.0 * ec3 * params.EJ3)
    beta1 = ec1 / 12.0
    beta3 = ec3 / 12.0
    omega_r = 4.0 * math.sqrt(ec2 * el2)
    g1 = kinv[0, 1] * (8.0 * params.EJ1 * el2 / (ec1 * ec2)) ** 0.25
    g3 = kinv[1, 2] * (8.0 * params.EJ3 * el2 / (ec2 * ec3)) ** 0.25

    _check_anharmonic_branch(alpha1, beta1, "transmon 1")
    _check_anharmonic_branch(alpha3, beta3, "transmon 3")
    omega1 = _qubit_level(alpha1, beta1)
    omega2, omega3 = _qutrit_levels(alpha3, beta3)
    delta1 = omega1 - omega_r
    delta2 = omega2 - omega_r
    delta3 = omega3 - omega2 - omega_r
    for g, delta, label in ((g1, delta1, "g1/Delta1"), (g3, delta3, "g3/Delta3")):
        if delta == 0 or abs(g / delta) >= dispersive_threshold:
            raise RegimeViolation(f"{label} is not below {dispersive_threshold:g}")

    return DerivedDeviceParams(
        EC1=ec1, EC2=ec2, EC3=ec3, EL2=el2,
        alpha1=alpha1, beta1=beta1, alpha3=alpha3, beta3=beta3,
        omega_r=omega_r, g1=g1, g3=g3,
        Delta1=delta1, Delta2=delta2, Delta3=delta3,
    )


def transmon_levels(dp: DerivedDeviceParams) -> tuple[float, float, float]:
    """Qubit excitation energy and the two qutrit excitation energies."""
    _check_anharmonic_branch(dp.alpha1, dp.beta1, "transmon 1")
    _check_anharmonic_branch(dp.alpha3, dp.beta3, "transmon 3")
    omega1 = _qubit_level(dp.alpha1, dp.beta1)
    omega2, omega3 = _qutrit_levels(dp.alpha3, dp.beta3)
    return omega1, omega2, omega3


def dispersive_coupling(
    dp: DerivedDeviceParams,
    levels: tuple[float, float, float],
    resonance_tol: float = RESONANCE_TOL,
) -> float:
    """Effective |11> <-> |02> swap coupling after eliminating the resonator.

    Uses the general two-detuning form; at Delta1 == Delta3 it reduces to
    g01 * g12 / Delta.
    """
    omega1, omega2, omega3 = levels
    mismatch = abs(omega1 + omega2 - omega3)
    if mismatch > resonance_tol * abs(omega3):
        raise ResonanceViolation(
            f"|omega1 + omega2 - omega3| = {mismatch:.3g} exceeds "
            f"{resonance_tol:g} * omega3"
        )
    g01 = dp.g1
    g12 = dp.g3 * math.sqrt(2.0)
    return g01 * g12 * (dp.Delta1 + dp.Delta3) / (2.0 * dp.Delta1 * dp.Delta3)


def check_suppression(
    g1: float,
    g3: float,
    anharmonicity: float,
    detuning_beta: float,
    dominance: float = DOMINANCE_FACTOR,
) -> tuple[float, float, bool]:
    """Compare g1/g3 against (lambda/5)/(1 - beta).

    "Much greater than" is read as ``lhs >= dominance * rhs``. Returns
    ``(lhs, rhs, passed)``.
    """
    if not 0.0 < detuning_beta < 1.0:
        raise ValueError("detuning parameter must lie in (0, 1)")
    if anharmonicity < 0:
        raise ValueError("anharmonicity must be nonnegative")
    lhs = g1 / g3
    # integer literals keep Fraction inputs exact
    rhs = (anharmonicity / 5) / (1 - detuning_beta)
    return lhs, rhs, bool(lhs >= dominance * rhs)


def solve_josephson_for_target(omega_target: float, EC: float) -> float:
    """Josephson energy giving qubit splitting ``omega_target`` at charging energy ``EC``."""
    if not (omega_target > 0 and EC > 0):
        raise ValueError("omega_target and EC must be positive")
    return (omega_target + EC) ** 2 / (8.0 * EC)
