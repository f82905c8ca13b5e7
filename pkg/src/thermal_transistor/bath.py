"""RLC thermal baths: filtered resistor noise and golden-rule rates."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, WeakCouplingViolation
from .spectrum import CollapseChannel, TransistorSpec

WEAK_COUPLING_BOUND = 0.1


@dataclass(frozen=True)
class BathSpec:
    """A band-pass filtered resistor at temperature ``T``.

    ``Omega_f`` is the LC filter frequency; all energies share the units of
    the transistor spec.
    """

    id: str
    Omega_f: float
    T: float
    Q: float = 100.0
    R: float = 1.0

    def __post_init__(self):
        if self.id not in ("S", "M", "D"):
            raise ValueError(f"unknown bath id {self.id!r}")
        for name in ("Omega_f", "T", "Q", "R"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"bath {self.id}: {name} must be positive, got {value!r}")


@dataclass(frozen=True)
class RatePair:
    channel: CollapseChannel
    alpha_rate: float  # Gamma(+w), emission into the bath
    beta_rate: float  # Gamma(-w), absorption from the bath

    @property
    def label(self) -> str:
        return self.channel.label


def make_baths(spec: TransistorSpec, T_S: float, T_M: float, T_D: float,
               Q: float = 100.0, R: float = 1.0) -> dict[str, BathSpec]:
    """Baths with filters pinned to w2 (source), w1 (modulator), w3 (drain).

    Temperatures are absolute (same units as the spec energies).
    """
    return {
        "S": BathSpec("S", spec.omega2, T_S, Q, R),
        "M": BathSpec("M", spec.omega1, T_M, Q, R),
        "D": BathSpec("D", spec.omega3, T_D, Q, R),
    }


def lorentzian_filter(omega: float, Omega_f: float, Q: float) -> float:
    x = omega / Omega_f - Omega_f / omega
    return 1.0 / (1.0 + Q * Q * x * x)


def spectral_density(omega: float, bath: BathSpec, ctx=math) -> float:
    """Filtered resistor noise S(w) for either sign of w.

    For w < 0 the same closed form is rewritten as exp(-|w|/T) S(|w|), which is
    algebraically identical and does not overflow at low temperature.

    ``ctx`` supplies ``exp``/``expm1``; pass ``mpmath.mp`` to evaluate at the
    current mpmath precision.
    """
    if omega == 0:
        raise DomainError("spectral density is singular at omega = 0")
    if ctx is not math:
        omega = ctx.mpf(omega)
    x = abs(omega) / bath.T
    thermal = 2 * bath.R * abs(omega) / (-ctx.expm1(-x))
    if omega < 0:
        thermal *= ctx.exp(-x)
    return lorentzian_filter(omega, bath.Omega_f, bath.Q) * thermal


def golden_rule_rates(
    channels: list[CollapseChannel],
    baths: dict[str, BathSpec],
    alpha: float,
    g: float,
    weak_coupling_bound: float = WEAK_COUPLING_BOUND,
    ctx=math,
) -> list[RatePair]:
    """Gamma(+-w) = pi * alpha^2 * weight * S(+-w) for every channel.

    ``weight`` is the channel's golden-rule multiplicity (twice the summed
    squared matrix elements): 1 for the single 1/sqrt2 transitions, 2 otherwise.
    """
    if not alpha > 0:
        raise ValueError("bath coupling alpha must be positive")
    if alpha / g >= weak_coupling_bound:
        raise WeakCouplingViolation(
            f"alpha/g = {alpha / g:.3g} is not below {weak_coupling_bound:g}"
        )
    pairs = []
    for ch in channels:
        bath = baths[ch.bath]
        a = alpha if ctx is math else ctx.mpf(alpha)
        prefactor = ctx.pi * a * a * ch.degeneracy_weight
        pairs.append(
            RatePair(
                channel=ch,
                alpha_rate=prefactor * spectral_density(ch.frequency, bath, ctx),
                beta_rate=prefactor * spectral_density(-ch.frequency, bath, ctx),
            )
        )
    return pairs


def rate_table(pairs: list[RatePair]) -> dict[str, tuple[float, float]]:
    """``{"S1": (alpha, beta), ...}`` view used by the closed-form expressions."""
    return {p.label: (p.alpha_rate, p.beta_rate) for p in pairs}


def spectral_density_array(omega: np.ndarray, bath: BathSpec) -> np.ndarray:
    return np.array([spectral_density(float(w), bath) for w in np.ravel(omega)]).reshape(np.shape(omega))
