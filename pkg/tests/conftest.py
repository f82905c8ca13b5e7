from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pytest
from hypothesis import settings

from thermal_transistor.bath import golden_rule_rates, make_baths
from thermal_transistor.lindblad import build_rate_matrix, steady_state
from thermal_transistor.spectrum import (
    TransistorSpec,
    build_hamiltonian,
    collapse_channels,
    eigensystem,
)

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@dataclass
class Pipeline:
    spec: TransistorSpec
    H: np.ndarray
    es: object
    channels: list
    baths: dict
    rate_pairs: list
    rm: object


def make_pipeline(lam=4.0, T_S=2.0, T_M=0.5, T_D=0.2, Q=100.0, R=1.0, g_ratio=0.01, alpha_ratio=0.01):
    spec = TransistorSpec.from_anharmonicity(lam, g_ratio=g_ratio)
    H = build_hamiltonian(spec)
    es = eigensystem(H, spec)
    channels = collapse_channels(es, spec)
    baths = make_baths(spec, T_S, T_M, T_D, Q, R)
    rate_pairs = golden_rule_rates(channels, baths, alpha_ratio * spec.g, spec.g)
    return Pipeline(spec, H, es, channels, baths, rate_pairs, build_rate_matrix(rate_pairs))


@pytest.fixture
def table1():
    """lambda = 4 at the on-state modulator temperature."""
    return make_pipeline()


@pytest.fixture
def table1_steady(table1):
    return steady_state(table1.rm)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
