import numpy as np
import pytest

from holorep.rng import SplitMix64


@pytest.fixture
def rng():
    return SplitMix64(20240917)


def coeff_diff(f, g) -> float:
    keys = set(f.coeffs) | set(g.coeffs)
    return max((abs(f[m] - g[m]) for m in keys), default=0.0)


def disc_points(rng, n, count, radius):
    """``count`` points with each coordinate uniform in the disc of ``radius``."""
    out = np.empty((count, n), dtype=complex)
    for i in range(count):
        for j in range(n):
            out[i, j] = radius * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
    return out


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    status = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            props = dict(getattr(rep, "user_properties", ()))
            if "criterion" in props and rep.when == "call":
                n = props["criterion"]
                status[n] = status.get(n, True) and key == "passed"
    if status:
        terminalreporter.section("acceptance criteria")
        for n in sorted(status):
            terminalreporter.write_line(f"{'PASS' if status[n] else 'FAIL'} criterion {n}")
