import numpy as np
import pytest

from jcas_track.waveform import OfdmConfig


@pytest.fixture
def cfg():
    return OfdmConfig()


@pytest.fixture
def small_cfg():
    # 64 subcarriers at 25 MHz keep the 5.996 m range bin; short frames for brute-force oracles
    return OfdmConfig(n_subcarriers=64, n_symbols=16)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES = []


def record_criterion(number: int, title: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} | {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
