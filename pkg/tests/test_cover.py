from pathlib import Path

import pytest

from shiftcheck.dynamics.cover import (
    build_cover,
    canonical_associate,
    common_future,
    cover_words,
    e_set,
    past_subset_automaton,
)
from shiftcheck.dynamics.errors import NotAllowedPoint, StateBlowup, SymbolNotInSubset
from shiftcheck.dynamics.fiber import injectivity_check
from shiftcheck.dynamics.models import CoverSymbol, OneBlockCode, RayPoint, subset_name
from shiftcheck.dynamics.relations import fischer_cover, resolving_check
from shiftcheck.dynamics.shift import apply_code, image_equal, labeled_isomorphism
from shiftcheck.dynamics.spectral import restrict_to_max_entropy
from shiftcheck.reporter.manifest import parse_file

FIXTURES = Path(__file__).resolve().parents[1] / "config" / "fixtures"


def test_past_subsets_of_even_shift(ev_code) -> None:
    automaton = past_subset_automaton(ev_code)
    assert [subset_name(state) for state in automaton.states] == ["x", "y", "y+z", "z"]
    assert automaton.step(frozenset({"y"}), "0") == frozenset()
    assert automaton.step(frozenset({"y", "z"}), "1") == frozenset({"y", "z"})


def test_common_future_and_e_set(ev_code) -> None:
    assert common_future(ev_code, "y", "z")
    assert e_set(ev_code, frozenset({"y", "z"}), "y") == frozenset({"y", "z"})
    with pytest.raises(SymbolNotInSubset):
        e_set(ev_code, frozenset({"x"}), "y")


def test_cover_of_even_shift(ev_code) -> None:
    cover = build_cover(ev_code)
    names = sorted(symbol.name for symbol in cover.sft.symbols)
    assert names == ["x|x", "y+z|y", "y+z|z", "y|y", "z|z"]
    assert len(cover.sft.transitions) == 8
    assert len(list(cover_words(cover, 2))) == 8
    assert image_equal(cover.base_code, ev_code)


def test_cover_respects_subset_cap(ev_code) -> None:
    with pytest.raises(StateBlowup):
        build_cover(ev_code, cap=1)


def test_max_entropy_part_of_cover_presents_the_image(ev_code) -> None:
    restricted = restrict_to_max_entropy(build_cover(ev_code).base_code)
    assert len(restricted.domain.symbols) == 3
    assert image_equal(restricted, ev_code)
    assert labeled_isomorphism(restricted, ev_code) is not None


def test_identity_cover_is_the_system(f2, gm_code, ev_code, xor_manifest, union_sft) -> None:
    for sft in (f2, gm_code.domain, ev_code.domain, xor_manifest.system("F2_2"), union_sft):
        identity = OneBlockCode.identity(sft)
        cover = build_cover(identity)
        assert labeled_isomorphism(cover.base_code, identity) is not None, sft.name
        assert injectivity_check(cover.base_code).holds
        assert resolving_check(cover.base_code, "u").holds


def test_canonical_associate_of_fixed_point(ev_code) -> None:
    associate = canonical_associate(ev_code, RayPoint.periodic(("x",)))
    assert associate == RayPoint.periodic((CoverSymbol(frozenset({"x"}), "x"),))


def test_canonical_associate_of_odd_ones(ev_code) -> None:
    associate = canonical_associate(ev_code, RayPoint.periodic(("y", "z")))
    pair = frozenset({"y", "z"})
    assert associate == RayPoint.periodic((CoverSymbol(pair, "y"), CoverSymbol(pair, "z")))
    assert associate.is_allowed(build_cover(ev_code).sft)


def test_canonical_associate_rejects_foreign_point(ev_code) -> None:
    with pytest.raises(NotAllowedPoint):
        canonical_associate(ev_code, RayPoint.periodic(("y",)))


def _respelled(point: RayPoint) -> RayPoint:
    left = point.left_cycle
    rotated = (left[-1],) + left[:-1]
    return RayPoint(rotated, (left[-1],) + point.transient, point.right_cycle, point.origin_offset + 1)


@pytest.mark.parametrize("name, period_cap", [("ev", 2), ("gm", 2), ("xor", 1)])
def test_canonical_associate_lifts_every_point(name, period_cap, ev_code, gm_code, xor_code, sample_points) -> None:
    code = {"ev": ev_code, "gm": gm_code, "xor": xor_code}[name]
    cover = build_cover(code)
    for point in sample_points(code.domain, period_cap=period_cap):
        associate = canonical_associate(code, point)
        assert associate.is_allowed(cover.sft), str(point)
        assert associate.map(lambda symbol: symbol.i) == point
        assert apply_code(cover.base_code, associate) == apply_code(code, point)
        assert canonical_associate(code, _respelled(point)) == associate
        for k in (-3, -1, 1, 2):
            assert canonical_associate(code, point.shift(k)) == associate.shift(k), (str(point), k)


def test_cover_words_are_windows_of_lifted_points(ev_code, sample_points) -> None:
    cover = build_cover(ev_code)
    windows = set()
    for point in sample_points(ev_code.domain, period_cap=3, transient_cap=3):
        associate = canonical_associate(ev_code, point)
        for length in range(1, 5):
            for start in range(-4, len(point.transient) + 4):
                windows.add(associate.window(start, start + length - 1))
    for length in range(1, 5):
        missing = [word for word in cover_words(cover, length) if word not in windows]
        assert missing == [], length


@pytest.mark.parametrize(
    "fixture_name, code_name",
    [
        ("ev", "EV"),
        ("f2", "ID_F2"),
        ("f2", "CONST"),
        ("gm", "ID_GM"),
        ("split_ev", "SPLIT"),
        ("xor", "XOR"),
        ("xor", "FLIP"),
    ],
)
def test_max_entropy_part_of_every_cover_presents_the_image(fixture_name, code_name) -> None:
    code = parse_file(str(FIXTURES / f"{fixture_name}.sft")).code(code_name)
    restricted = restrict_to_max_entropy(build_cover(code).base_code)
    assert image_equal(restricted, code)
    if code_name != "CONST":
        assert image_equal(restricted, fischer_cover(code))
