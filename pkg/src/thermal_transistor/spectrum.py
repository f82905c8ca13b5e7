"""Six-level qubit-qutrit Hamiltonian, its eigensystem and the collapse channels.

Product basis order, used for every matrix in the package::

    index  0     1     2     3     4     5
    state  |00>  |01>  |02>  |10>  |11>  |12>

with |q t> = |q>_qubit (x) |t>_qutrit. Eigenstates are numbered E1..E6 in the
order (w1+w3, w3-g, w1, w3+g, w2, 0) and stored zero-based.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FrequencyCollision, ResonanceViolation

BASIS = ("00", "01", "02", "10", "11", "12")
DIM = 6
BATHS = ("S", "M", "D")
SQRT_HALF = 1.0 / math.sqrt(2.0)

_IDX = {label: i for i, label in enumerate(BASIS)}

# Representative (upper, lower) eigenstate pair, zero-based, for each labelled channel.
CHANNEL_TRANSITIONS = {
    ("S", 1): (1, 2),
    ("S", 2): (4, 5),
    ("S", 3): (3, 2),
    ("M", 1): (2, 5),
    ("M", 2): (1, 4),
    ("M", 3): (3, 4),
    ("D", 1): (1, 5),
    ("D", 2): (3, 5),
    ("D", 3): (0, 2),
}


@dataclass(frozen=True)
class TransistorSpec:
    """Effective energies of the working Hamiltonian.

    ``omega1`` must equal ``omega3 - omega2`` exactly; use
    :meth:`from_anharmonicity` or :meth:`from_levels` to get that for free.
    All energies are absolute; ``Omega`` is the reference unit used to
    normalise outputs.
    """

    omega1: float
    omega2: float
    omega3: float
    g: float
    Omega: float = 1.0
    coupling_bound: float = 0.1

    def __post_init__(self):
        for name in ("omega1", "omega2", "omega3", "g", "Omega"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive, got {value!r}")
        if self.omega1 != self.omega3 - self.omega2:
            raise ResonanceViolation("omega1 must equal omega3 - omega2")
        if self.g / self.omega1 >= self.coupling_bound:
            raise ValueError(
                f"g/omega1 = {self.g / self.omega1:.3g} is not below {self.coupling_bound:g}"
            )

    @classmethod
    def from_anharmonicity(
        cls,
        lam: float,
        omega2: float = 5.0,
        g_ratio: float = 0.01,
        Omega: float = 1.0,
        **kwargs,
    ) -> "TransistorSpec":
        """omega3 = (10 - lam) Omega, omega1 = omega3 - omega2, g = g_ratio * omega1.

        ``omega2`` is given in units of ``Omega``.
        """
        w2 = omega2 * Omega
        w3 = (10.0 - lam) * Omega
        w1 = w3 - w2
        return cls(omega1=w1, omega2=w2, omega3=w3, g=g_ratio * w1, Omega=Omega, **kwargs)

    @classmethod
    def from_levels(cls, omega1, omega2, omega3, g, Omega=1.0, rel_tol=1e-9, **kwargs):
        """Accept nearly resonant levels and snap omega1 onto omega3 - omega2."""
        if abs(omega1 + omega2 - omega3) > rel_tol * abs(omega3):
            raise ResonanceViolation("levels are not resonant: omega1 + omega2 != omega3")
        return cls(omega3 - omega2, omega2, omega3, g, Omega, **kwargs)

    @property
    def anharmonicity(self) -> float:
        return 10.0 - self.omega3 / self.Omega


@dataclass(frozen=True)
class EigenSystem:
    energies: np.ndarray
    # columns are the eigenvectors |E1>..|E6> in the product basis
    states: np.ndarray

    def to_eigenbasis(self, op: np.ndarray) -> np.ndarray:
        return self.states.T @ op @ self.states

    def to_product_basis(self, op: np.ndarray) -> np.ndarray:
        return self.states @ op @ self.states.T


@dataclass(frozen=True)
class CollapseChannel:
    """One lowering eigenoperator, stored in the eigenbasis."""

    bath: str
    index: int
    matrix: np.ndarray = field(repr=False)
    frequency: float
    degeneracy_weight: int

    @property
    def label(self) -> str:
        return f"{self.bath}{self.index}"


def _ket(label: str) -> np.ndarray:
    v = np.zeros(DIM)
    v[_IDX[label]] = 1.0
    return v


def build_hamiltonian(spec: TransistorSpec) -> np.ndarray:
    """Dispersive qubit-qutrit Hamiltonian in the product basis."""
    h = np.zeros((DIM, DIM))
    for label in BASIS:
        q, t = int(label[0]), int(label[1])
        i = _IDX[label]
        h[i, i] = q * spec.omega1 + (spec.omega2 if t == 1 else 0.0) + (spec.omega3 if t == 2 else 0.0)
    h[_IDX["11"], _IDX["02"]] = spec.g
    h[_IDX["02"], _IDX["11"]] = spec.g
    return h


def eigensystem(H: np.ndarray, spec: TransistorSpec) -> EigenSystem:
    """Closed-form eigensystem, checked against ``H`` to 1e-12 residual.

    Phase convention: |E2> = (|11> - |02>)/sqrt2 and |E4> = (|11> + |02>)/sqrt2.
    """
    w1, w2, w3, g = spec.omega1, spec.omega2, spec.omega3, spec.g
    energies = np.array([w1 + w3, w3 - g, w1, w3 + g, w2, 0.0])
    states = np.column_stack(
        [
            _ket("12"),
            SQRT_HALF * (_ket("11") - _ket("02")),
            _ket("10"),
            SQRT_HALF * (_ket("11") + _ket("02")),
            _ket("01"),
            _ket("00"),
        ]
    )
    scale = max(1.0, float(np.max(np.abs(H))))
    residual = np.max(np.abs(H @ states - states * energies))
    if residual > 1e-12 * scale:
        raise ResonanceViolation(
            f"analytic eigensystem does not diagonalise H (residual {residual:.2e}); "
            "is the Hamiltonian built from the same spec?"
        )
    return EigenSystem(energies=energies, states=states)


def bath_operators() -> dict[str, np.ndarray]:
    """Product-basis lowering operators each bath couples to.

    S: qutrit 1 -> 0, M: qubit 1 -> 0, D: qutrit 2 -> 0.
    """
    ops = {b: np.zeros((DIM, DIM)) for b in BATHS}
    for q in (0, 1):
        ops["S"][_IDX[f"{q}0"], _IDX[f"{q}1"]] = 1.0
        ops["D"][_IDX[f"{q}0"], _IDX[f"{q}2"]] = 1.0
    for t in (0, 1, 2):
        ops["M"][_IDX[f"0{t}"], _IDX[f"1{t}"]] = 1.0
    return ops


def _group_by_frequency(pairs, tol):
    groups: list[list] = []
    for freq, i, j in sorted(pairs):
        if groups and abs(freq - groups[-1][0][0]) <= tol:
            groups[-1].append((freq, i, j))
        else:
            groups.append([(freq, i, j)])
    return groups


def eigenoperators(es: EigenSystem, op: np.ndarray, tol: float | None = None):
    """Decompose ``op`` into eigenoperators A(w) = sum_{Ei-Ej=w} P(Ej) op P(Ei).

    Returns a list of ``(frequency, matrix)`` in the eigenbasis for the
    lowering part (w > 0), sorted by frequency. Eigenvalues closer than
    ``tol`` are treated as one eigenspace.
    """
    energies = es.energies
    if tol is None:
        tol = 1e-9 * max(1.0, float(np.max(np.abs(energies))))
    op_eig = es.to_eigenbasis(op)
    pairs = []
    for i in range(DIM):
        for j in range(DIM):
            if abs(op_eig[j, i]) > 1e-12 and energies[i] - energies[j] > tol:
                pairs.append((energies[i] - energies[j], i, j))
    result = []
    for group in _group_by_frequency(pairs, tol):
        mat = np.zeros((DIM, DIM))
        for _, i, j in group:
            mat[j, i] = op_eig[j, i]
        freq = float(np.mean([f for f, _, _ in group]))
        result.append((freq, mat))
    return result


def collapse_channels(es: EigenSystem, spec: TransistorSpec | None = None) -> list[CollapseChannel]:
    """The nine lowering channels, built generically from the bath operators.

    Channels are labelled by matching each frequency to the representative
    transition in :data:`CHANNEL_TRANSITIONS`.

    Raises
    ------
    FrequencyCollision
        If a bath does not resolve into exactly three distinct frequencies
        (for example g = 0).
    """
    energies = es.energies
    tol = 1e-9 * max(1.0, float(np.max(np.abs(energies))))
    channels = []
    for bath, op in bath_operators().items():
        found = eigenoperators(es, op, tol)
        if len(found) != 3:
            raise FrequencyCollision(
                f"bath {bath} resolves into {len(found)} frequencies instead of 3"
            )
        for freq, mat in found:
            label = None
            for (b, l), (i, j) in CHANNEL_TRANSITIONS.items():
                if b == bath and abs(energies[i] - energies[j] - freq) <= tol:
                    label = l
            if label is None:
                raise FrequencyCollision(f"bath {bath}: unexpected frequency {freq!r}")
            weight = 2.0 * float(np.sum(mat**2))
            channels.append(
                CollapseChannel(bath, label, mat, freq, int(round(weight)))
            )
    channels.sort(key=lambda c: (BATHS.index(c.bath), c.index))
    if len({c.label for c in channels}) != 9:
        raise FrequencyCollision("channel labels are not unique")
    return channels


def tabulated_channels(es: EigenSystem) -> dict[str, tuple[np.ndarray, float]]:
    """Hard-coded channel matrices and frequencies, written out by hand.

    The sign convention of this table puts D1 and D2 at the opposite overall
    sign from the generic construction; a global sign of a jump operator does
    not change the dissipator. Frequencies use the bare levels.
    """
    e = es.energies
    w1, w2, w3, g = e[2], e[4], (e[1] + e[3]) / 2.0, (e[3] - e[1]) / 2.0

    def op(*terms):
        m = np.zeros((DIM, DIM))
        for coeff, upper, lower in terms:
            m[lower - 1, upper - 1] += coeff
        return m

    s = SQRT_HALF
    return {
        "S1": (op((s, 2, 3)), w2 - g),
        "S2": (op((1.0, 5, 6)), w2),
        "S3": (op((s, 4, 3)), w2 + g),
        "M1": (op((1.0, 3, 6)), w1),
        "M2": (op((s, 2, 5), (s, 1, 4)), w1 - g),
        "M3": (op((s, 4, 5), (-s, 1, 2)), w1 + g),
        "D1": (op((s, 2, 6)), w3 - g),
        "D2": (op((-s, 4, 6)), w3 + g),
        "D3": (op((1.0, 1, 3)), w3),
    }
