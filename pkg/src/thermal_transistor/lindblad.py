"""Lindblad generator, population rate matrix and steady state.

Everything here lives in the energy eigenbasis (E1..E6, zero-based). The
dissipator uses the factor-2 bracket convention

    Gamma(w)  [2 A rho A^+ - {A^+ A, rho}] + Gamma(-w) [2 A^+ rho A - {A A^+, rho}]

so a transition carried by matrix element c at rate Gamma moves population at
2 |c|^2 Gamma.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .bath import RatePair, rate_table
from .errors import (
    DegenerateKernel,
    IntegrationFailure,
    NegativePopulation,
    TemplateMismatch,
)
from .spectrum import DIM, CollapseChannel

log = logging.getLogger(__name__)

TEMPLATE_TOL = 1e-12
RESIDUAL_TOL = 1e-10
NEGATIVE_TOL = 1e-10


@dataclass(frozen=True)
class PopulationRateMatrix:
    """dp/dt = M p; column i holds the rates out of eigenstate i."""

    M: np.ndarray

    def __post_init__(self):
        off = self.M - np.diag(np.diag(self.M))
        if np.any(off < 0):
            raise ValueError("rate matrix has negative off-diagonal entries")


@dataclass(frozen=True)
class SteadyState:
    populations: np.ndarray
    residual: float


def generator_template(rates: dict[str, tuple[float, float]]) -> np.ndarray:
    """Population generator written out entry by entry."""
    a = {k: v[0] for k, v in rates.items()}
    b = {k: v[1] for k, v in rates.items()}
    g1 = -a["M2"] - a["M3"] - 2 * a["D3"]
    g2 = -a["S1"] - a["M2"] - b["M3"] - a["D1"]
    g3 = -b["S1"] - b["S3"] - 2 * a["M1"] - 2 * b["D3"]
    g4 = -a["S3"] - b["M2"] - a["M3"] - a["D2"]
    g5 = -2 * a["S2"] - b["M2"] - b["M3"]
    g6 = -2 * b["S2"] - 2 * b["M1"] - b["D1"] - b["D2"]
    return np.array(
        [
            [g1, b["M3"], 2 * b["D3"], b["M2"], 0.0, 0.0],
            [a["M3"], g2, b["S1"], 0.0, b["M2"], b["D1"]],
            [2 * a["D3"], a["S1"], g3, a["S3"], 0.0, 2 * b["M1"]],
            [a["M2"], 0.0, b["S3"], g4, b["M3"], b["D2"]],
            [0.0, a["M2"], 0.0, a["M3"], g5, 2 * b["S2"]],
            [0.0, a["D1"], 2 * a["M1"], a["D2"], 2 * a["S2"], g6],
        ]
    )


def transition_rates(rate_pairs: list[RatePair]) -> np.ndarray:
    """W[j, i] = total rate i -> j, projected from the channel dissipators."""
    W = np.zeros((DIM, DIM))
    for pair in rate_pairs:
        A2 = np.abs(pair.channel.matrix) ** 2
        W += 2.0 * pair.alpha_rate * A2 + 2.0 * pair.beta_rate * A2.T
    np.fill_diagonal(W, 0.0)
    return W


def build_rate_matrix(rate_pairs: list[RatePair], check_template: bool = True) -> PopulationRateMatrix:
    """Population generator built from the channels, cross-checked against the template.

    Raises
    ------
    TemplateMismatch
        If the generic projection and the written-out matrix differ by more
        than 1e-12 relative to the largest entry.
    """
    labels = sorted(p.label for p in rate_pairs)
    if len(rate_pairs) != 9 or len(set(labels)) != 9:
        raise ValueError(f"expected the nine channels, got {labels}")
    W = transition_rates(rate_pairs)
    M = W - np.diag(W.sum(axis=0))
    if check_template:
        T = generator_template(rate_table(rate_pairs))
        scale = float(np.max(np.abs(T)))
        if np.max(np.abs(M - T)) > TEMPLATE_TOL * scale:
            raise TemplateMismatch(
                f"generic rate matrix differs from template by {np.max(np.abs(M - T)):.3e}"
            )
    return PopulationRateMatrix(M)


def _closed_classes(W: np.ndarray) -> list[np.ndarray]:
    graph = csr_matrix((W.T > 0).astype(float))
    n, labels = connected_components(graph, directed=True, connection="strong")
    closed = []
    for c in range(n):
        members = np.flatnonzero(labels == c)
        outside = np.flatnonzero(labels != c)
        if not np.any(W[np.ix_(outside, members)] > 0):
            closed.append(members)
    return closed


def _gth(Q: np.ndarray) -> np.ndarray:
    """Grassmann-Taksar-Heyman elimination for pi Q = 0 (row-generator convention).

    Uses only additions, multiplications and divisions of nonnegative numbers,
    so tiny stationary probabilities keep full relative accuracy. Object arrays
    of mpmath numbers are supported and keep their precision.
    """
    A = np.array(Q)
    if A.dtype != object:
        A = A.astype(float)
    np.fill_diagonal(A, 0)
    n = len(A)
    for k in range(n - 1, 0, -1):
        s = A[k, :k].sum()
        if not s > 0:
            raise DegenerateKernel("transition graph is reducible")
        A[:k, k] /= s
        A[:k, :k] += np.outer(A[:k, k], A[k, :k])
    pi = np.zeros(n, dtype=A.dtype)
    pi[0] = 1
    for k in range(1, n):
        pi[k] = pi[:k] @ A[:k, k]
    return pi / pi.sum()


def _replace_row(M: np.ndarray) -> np.ndarray:
    A = M.copy()
    A[0, :] = 1.0
    rhs = np.zeros(len(M))
    rhs[0] = 1.0
    try:
        return np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise DegenerateKernel("normalised system is singular") from exc


def _svd_kernel(M: np.ndarray) -> np.ndarray:
    _, _, vh = np.linalg.svd(M)
    v = vh[-1]
    return v / v.sum()


def steady_state(rm: PopulationRateMatrix | np.ndarray, method: str = "gth") -> SteadyState:
    """Normalised kernel vector of the population generator.

    ``method`` is ``"gth"`` (default), ``"replace-row"`` or ``"svd"``.

    Raises
    ------
    DegenerateKernel
        If the transition graph does not have exactly one closed class.
    NegativePopulation
        If a solver returns an entry below -1e-10.
    """
    M = rm.M if isinstance(rm, PopulationRateMatrix) else np.asarray(rm, dtype=float)
    W = M - np.diag(np.diag(M))
    closed = _closed_classes(W)
    if len(closed) != 1:
        raise DegenerateKernel(f"kernel dimension is {len(closed)}, expected 1")
    if method == "gth":
        members = closed[0]
        p = np.zeros(len(M))
        sub = W[np.ix_(members, members)]
        p[members] = _gth(sub.T)
    elif method == "replace-row":
        p = _replace_row(M)
    elif method == "svd":
        p = _svd_kernel(M)
    else:
        raise ValueError(f"unknown steady-state method {method!r}")

    if np.any(p < -NEGATIVE_TOL):
        raise NegativePopulation(f"steady state has entry {p.min():.3e}")
    if np.any(p < 0):
        log.warning("clamping negative populations down to %.2e", p.min())
        p = np.clip(p, 0.0, None)
        p /= p.sum()
    residual = float(np.max(np.abs(M @ p)))
    scale = float(np.max(np.abs(M)))
    if residual > RESIDUAL_TOL * scale:
        raise DegenerateKernel(f"steady-state residual {residual:.3e} exceeds tolerance")
    return SteadyState(populations=p, residual=residual)


def relaxation_horizon(rm: PopulationRateMatrix | np.ndarray, factor: float = 20.0) -> float:
    """``factor`` over the slowest nonzero relaxation rate of the populations."""
    M = rm.M if isinstance(rm, PopulationRateMatrix) else rm
    ev = np.abs(np.linalg.eigvals(M).real)
    ev = np.sort(ev)[1:]  # drop the stationary mode
    return factor / ev.min()


# ---------------------------------------------------------------- full dynamics

def _pair_operators(channels: list[CollapseChannel], rate_pairs: list[RatePair]):
    rates = rate_table(rate_pairs)
    for ch in channels:
        a, b = rates[ch.label]
        yield ch, a, b


def dissipator(rho: np.ndarray, channels, rate_pairs, bath: str | None = None) -> np.ndarray:
    """Dissipative part of the generator applied to ``rho``, optionally for one bath."""
    out = np.zeros_like(rho, dtype=complex)
    for ch, a, b in _pair_operators(channels, rate_pairs):
        if bath is not None and ch.bath != bath:
            continue
        A = ch.matrix.astype(complex)
        Ad = A.conj().T
        AdA = Ad @ A
        AAd = A @ Ad
        out += a * (2 * A @ rho @ Ad - AdA @ rho - rho @ AdA)
        out += b * (2 * Ad @ rho @ A - AAd @ rho - rho @ AAd)
    return out


def liouvillian(H: np.ndarray | None, channels, rate_pairs) -> np.ndarray:
    """Superoperator on column-stacked density matrices, vec(X rho Y) = (Y^T kron X) vec(rho)."""
    eye = np.eye(DIM)
    L = np.zeros((DIM * DIM, DIM * DIM), dtype=complex)
    if H is not None:
        L += -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    for ch, a, b in _pair_operators(channels, rate_pairs):
        A = ch.matrix.astype(complex)
        Ad = A.conj().T
        AdA = Ad @ A
        AAd = A @ Ad
        L += a * (2 * np.kron(A.conj(), A) - np.kron(eye, AdA) - np.kron(AdA.T, eye))
        L += b * (2 * np.kron(A.T, Ad) - np.kron(eye, AAd) - np.kron(AAd.T, eye))
    return L


def _vec(rho):
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def _unvec(v):
    return np.asarray(v).reshape(DIM, DIM, order="F")


def evolve(
    rho0: np.ndarray,
    duration: float,
    channels: list[CollapseChannel],
    rate_pairs: list[RatePair],
    H: np.ndarray,
    t_eval: np.ndarray | None = None,
    frame: str = "lab",
    rtol: float = 1e-10,
    atol: float = 1e-13,
    method: str = "DOP853",
):
    """Integrate the master equation from ``rho0`` for ``duration``.

    ``frame="lab"`` integrates the full generator including -i[H, rho].
    ``frame="interaction"`` integrates the dissipator alone for the rotated
    state exp(iHt) rho exp(-iHt) and rotates back analytically; this is exact
    when every channel is an eigenoperator of the diagonal ``H`` and is the only
    practical choice when the decay times dwarf the oscillation periods.

    ``method`` is passed to :func:`scipy.integrate.solve_ivp` and must accept
    complex states (the explicit Runge-Kutta schemes do).

    Returns the final density matrix, or ``(times, states)`` when ``t_eval``
    is given.

    Raises
    ------
    IntegrationFailure
        If the adaptive integrator cannot meet the tolerances or the trace
        drifts by more than 1e-9.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    if not duration > 0:
        raise ValueError("duration must be positive")
    if abs(np.trace(rho0) - 1) > 1e-12 or np.max(np.abs(rho0 - rho0.conj().T)) > 1e-12:
        raise ValueError("rho0 must be Hermitian with unit trace")
    if frame == "lab":
        L = liouvillian(H, channels, rate_pairs)
    elif frame == "interaction":
        if np.max(np.abs(H - np.diag(np.diag(H)))) > 1e-12 * max(1.0, np.max(np.abs(H))):
            raise ValueError("interaction frame needs H diagonal in the working basis")
        L = liouvillian(None, channels, rate_pairs)
    else:
        raise ValueError(f"unknown frame {frame!r}")

    sol = solve_ivp(
        lambda t, y: L @ y,
        (0.0, duration),
        _vec(rho0),
        method=method,
        t_eval=t_eval if t_eval is not None else [duration],
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise IntegrationFailure(sol.message)

    states = np.array([_unvec(sol.y[:, k]) for k in range(sol.y.shape[1])])
    if frame == "interaction":
        energies = np.real(np.diag(H))
        for k, t in enumerate(sol.t):
            phase = np.exp(-1j * energies * t)
            states[k] = phase[:, None] * states[k] * phase.conj()[None, :]
    drift = np.max(np.abs(np.trace(states, axis1=1, axis2=2) - 1.0))
    if drift > 1e-9:
        raise IntegrationFailure(f"trace drifted by {drift:.2e}")
    if t_eval is None:
        return states[-1]
    return sol.t, states
