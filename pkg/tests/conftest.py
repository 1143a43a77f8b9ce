import numpy as np
import pytest

from holomimo.geometry import build_linear_2d, build_linear_3d
from holomimo.patterns import isotropic_pattern, surrogate_patterns

# Coarse grids keep unit tests fast; acceptance checks use the default grid.
COARSE = (61, 120)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def coarse_iso():
    return isotropic_pattern(COARSE)


@pytest.fixture(scope="session")
def row2d():
    return build_linear_2d(9, 0.25)


@pytest.fixture(scope="session")
def row3d():
    return build_linear_3d(9, 0.25, 0.5)


@pytest.fixture(scope="session")
def row3d_patterns(row3d):
    return surrogate_patterns(row3d, COARSE)


def random_psd(rng, n, rank=None, complex_=True):
    """Random Hermitian PSD matrix with unit diagonal."""
    rank = n if rank is None else rank
    a = rng.standard_normal((n, rank))
    if complex_:
        a = a + 1j * rng.standard_normal((n, rank))
    r = a @ a.conj().T
    d = np.sqrt(np.real(np.diag(r)))
    return r / np.outer(d, d)


def random_smatrix(rng, n_ports=None, n_freq=None):
    """Random finite S-parameter set with 1..6 ports and 1..8 frequencies."""
    from holomimo.kronecker import ScatteringMatrix

    n = int(rng.integers(1, 7)) if n_ports is None else n_ports
    k = int(rng.integers(1, 9)) if n_freq is None else n_freq
    freqs = np.sort(rng.uniform(1e8, 1e10, size=k))
    data = (rng.standard_normal((k, n, n)) + 1j * rng.standard_normal((k, n, n))) * 0.3
    return ScatteringMatrix(freqs, data, float(rng.choice([50.0, 75.0, 100.0])))


# Ten malformed variants of a valid two-port file.  Each entry is
# (name, text, expected error class name, line number the error must report).
VALID_2PORT = (
    "! two-port fixture\n"
    "# GHz S RI R 50\n"
    "1.0 0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8\n"
    "2.0 0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8\n"
)

MUTATIONS = [
    ("option_line_removed", "1.0 0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8\n", "ParseError", 1),
    ("truncated_block", "# GHz S RI R 50\n1.0 0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8\n2.0 0.1 0.2\n", "FormatError", 3),
    ("non_numeric_token", "# GHz S RI R 50\n1.0 0.1 0.2 0.3 abc 0.5 0.6 0.7 0.8\n", "ParseError", 2),
    ("descending_frequency",
     "# GHz S RI R 50\n2.0 0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8\n1.5 0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8\n1.0 1 1 1 1 1 1 1 1\n",
     "FormatError", 3),
    ("duplicate_option_line", "# GHz S RI R 50\n# GHz S RI R 50\n1.0 0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8\n", "ParseError", 2),
    ("version_keyword", "[Version] 2.0\n# GHz S RI R 50\n1.0 0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8\n",
     "UnsupportedVersionError", 1),
    ("bad_option_token", "# GHz S XY R 50\n1.0 0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8\n", "ParseError", 1),
    ("nan_value", "# GHz S RI R 50\n1.0 0.1 nan 0.3 0.4 0.5 0.6 0.7 0.8\n", "DataError", 2),
    ("two_port_arity", "# GHz S RI R 50\n1.0 0.1 0.2 0.3 0.4 0.5 0.6 0.7\n", "FormatError", 2),
    ("option_after_data", "# GHz S RI R 50\n1.0 0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8\n# MHz S RI R 50\n",
     "ParseError", 3),
]


# Acceptance checks append "AC-n PASS/FAIL ..." lines here; they are echoed in
# the terminal summary so they survive output capturing.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[0][3:])):
            terminalreporter.write_line(line)
