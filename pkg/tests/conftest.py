import sys

import numpy as np
import pytest

from onsim import Grid
from onsim.metrics import WIDE_GRID
from onsim.states import coherent_x_wavefunction, fock_wavefunction, squeezed_vacuum_wavefunction


@pytest.fixture(scope="session")
def grid():
    return Grid.default()


@pytest.fixture(scope="session")
def wide_grid():
    return WIDE_GRID


def reference_states():
    """Reference test states: Fock 0..5, p-squeezed 0..9.5 dB, coherent -1..1.5."""
    g, w = Grid.default(), WIDE_GRID
    out = [(f"fock:{n}", fock_wavefunction(n, g)) for n in range(6)]
    out += [(f"squeezed:{db:g}", squeezed_vacuum_wavefunction(db, w, quadrature="p"))
            for db in np.arange(20) * 0.5]
    out += [(f"coherent:{x0:g}", coherent_x_wavefunction(x0, g)) for x0 in np.arange(-1.0, 1.51, 0.5)]
    return out


def suite_states():
    """Smaller representative set: vacuum, coherent(1), 6 dB squeezed, Fock 3."""
    g = Grid.default()
    return [
        ("vacuum", fock_wavefunction(0, g)),
        ("coherent:1", coherent_x_wavefunction(1.0, g)),
        ("squeezed:6", squeezed_vacuum_wavefunction(6.0, g, quadrature="p")),
        ("xsqueezed:6", squeezed_vacuum_wavefunction(6.0, g, quadrature="x")),
        ("fock:3", fock_wavefunction(3, g)),
    ]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number][2])
