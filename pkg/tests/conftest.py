import random
from pathlib import Path
from typing import List

import pytest

from shiftcheck.dynamics.models import OneBlockCode, OneStepSft, RayPoint
from shiftcheck.dynamics.shift import enumerate_words
from shiftcheck.dynamics.spectral import periodic_points
from shiftcheck.reporter.manifest import Manifest, parse_file

FIXTURES = Path(__file__).resolve().parents[1] / "config" / "fixtures"


def load_fixture(name: str) -> Manifest:
    return parse_file(str(FIXTURES / f"{name}.sft"))


def fixture_path(name: str) -> str:
    return str(FIXTURES / f"{name}.sft")


def random_code(rng: random.Random, index: int, max_symbols: int = 6) -> OneBlockCode:
    """Irreducible labeled graph: a cycle through every symbol plus random extra edges."""
    size = rng.randint(2, max_symbols)
    symbols = [f"s{k}" for k in range(size)]
    transitions = {(symbols[k], symbols[(k + 1) % size]) for k in range(size)}
    for source in symbols:
        for target in symbols:
            if rng.random() < 0.35:
                transitions.add((source, target))
    sft = OneStepSft.build(f"R{index}", symbols, transitions)
    label = {symbol: rng.choice("01") for symbol in symbols}
    return OneBlockCode(f"R{index}", sft, label, ("0", "1"))


def eventually_periodic_points(sft: OneStepSft, period_cap: int = 2, transient_cap: int = 2) -> List[RayPoint]:
    cycles = [point.left_cycle for n in range(1, period_cap + 1) for point in periodic_points(sft, n)]
    middles = [word for length in range(transient_cap + 1) for word in enumerate_words(sft, length)]
    points = []
    for left in cycles:
        for middle in middles:
            for right in cycles:
                point = RayPoint(left, middle, right)
                if point.is_allowed(sft):
                    points.append(point)
    return points


@pytest.fixture
def f2() -> OneStepSft:
    return load_fixture("f2").system("F2")


@pytest.fixture
def const_code() -> OneBlockCode:
    return load_fixture("f2").code("CONST")


@pytest.fixture
def gm_code() -> OneBlockCode:
    return load_fixture("gm").code("ID_GM")


@pytest.fixture
def ev_code() -> OneBlockCode:
    return load_fixture("ev").code("EV")


@pytest.fixture
def xor_manifest() -> Manifest:
    return load_fixture("xor")


@pytest.fixture
def xor_code(xor_manifest: Manifest) -> OneBlockCode:
    return xor_manifest.code("XOR")


@pytest.fixture
def split_manifest() -> Manifest:
    return load_fixture("split_ev")


@pytest.fixture
def r1_code() -> OneBlockCode:
    return load_fixture("r1").code("R1")


@pytest.fixture
def union_sft() -> OneStepSft:
    return load_fixture("union").system("U")


@pytest.fixture
def sample_points():
    return eventually_periodic_points


@pytest.fixture
def random_codes() -> List[OneBlockCode]:
    rng = random.Random(20240611)
    return [random_code(rng, index) for index in range(12)]
