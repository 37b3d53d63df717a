import pytest

from shiftcheck.dynamics.errors import EmptyFiber, HypothesisFailed, InvalidSystem, NotResolving
from shiftcheck.dynamics.fiber import (
    FiberDiagram,
    commuting_check,
    constant_to_one_check,
    fiber_product,
    image_is_sft,
    injectivity_check,
    inverse_window,
    lift_diagram,
    lift_summary,
    minimal_lift,
)
from shiftcheck.dynamics.models import OneBlockCode
from shiftcheck.dynamics.relations import fischer_cover
from shiftcheck.dynamics.spectral import max_entropy_component
from shiftcheck.reporter.manifest import parse


def test_fiber_product_sizes(xor_code, f2, const_code) -> None:
    identity = OneBlockCode.identity(f2)
    product = fiber_product(xor_code, identity)
    assert len(product.sft.symbols) == 4
    assert product.proj_b.target_alphabet == ("0", "1")
    with pytest.raises(EmptyFiber):
        fiber_product(const_code, identity)


def test_injectivity(f2, ev_code, gm_code) -> None:
    assert injectivity_check(OneBlockCode.identity(f2)).holds
    result = injectivity_check(ev_code)
    assert not result.holds
    first, second = result.witness
    assert first != second
    assert inverse_window(gm_code) == 0


def test_image_is_sft(ev_code, xor_code) -> None:
    assert not image_is_sft(ev_code)
    assert image_is_sft(xor_code)


def test_constant_to_one(ev_code, xor_code) -> None:
    assert constant_to_one_check(xor_code) == 2
    with pytest.raises(HypothesisFailed):
        constant_to_one_check(ev_code)


def test_minimal_lift_of_split_presentation(split_manifest) -> None:
    alpha = split_manifest.code("SPLIT")
    cover = split_manifest.code("EV")
    product = fiber_product(alpha, cover)
    assert len(product.sft.symbols) == 7
    lift = minimal_lift(alpha, cover)
    assert lift.window == 0
    assert set(lift.fiber.sft.symbols) == {("f1", "x"), ("f3", "x"), ("f2", "y"), ("f4", "y"), ("f5", "z")}
    assert lift.beta.label == {"f1": "x", "f2": "y", "f3": "x", "f4": "y", "f5": "z"}
    assert injectivity_check(lift.fiber.proj_a).holds
    assert commuting_check(lift.diagram()).holds


def test_minimal_lift_needs_resolving_code(const_code, f2) -> None:
    with pytest.raises(NotResolving):
        minimal_lift(const_code, OneBlockCode.identity(f2))


def test_lift_diagram_of_even_shift(ev_code) -> None:
    diagram = lift_diagram(ev_code)
    assert diagram.verified
    assert lift_summary(diagram) == {"X": "3", "Y": "image", "Yt": "3", "G": "3", "Xt": "3"}


def test_lift_diagram_of_xor(xor_code) -> None:
    diagram = lift_diagram(xor_code)
    assert diagram.failures == []
    assert lift_summary(diagram) == {"X": "4", "Y": "image", "Yt": "2", "G": "4", "Xt": "4"}


def test_manifest_diagram_commutes(xor_manifest) -> None:
    result = commuting_check(xor_manifest.diagram("flip_twice"), 6)
    assert result.holds
    assert result.detail.startswith("words=")


def test_commuting_check_finds_symbol() -> None:
    manifest = parse(
        "system F2\nsymbols 0 1\nedges 0>0 0>1 1>0 1>1\nend\n"
        "code FLIP F2 -> 0 1\nmap 0:1 1:0\nend\n"
        "code ID F2 -> 0 1\nmap 0:0 1:1\nend\n"
        "diagram odd\npath FLIP\npath ID\nend\n"
    )
    result = commuting_check(manifest.diagram("odd"))
    assert not result.holds
    assert result.witness == (("FLIP@1.1",), ("ID@2.1",), ("0",), ("1",), ("0",))


def test_diagram_rejects_undeclared_nodes(f2) -> None:
    diagram = FiberDiagram("bad")
    diagram.add_node("F2", f2)
    with pytest.raises(InvalidSystem):
        diagram.add_arrow("id", OneBlockCode.identity(f2), "F2", "missing")
    with pytest.raises(InvalidSystem):
        diagram.add_path("id")


def test_fischer_self_fiber_projection(ev_code) -> None:
    fischer = fischer_cover(ev_code)
    product = fiber_product(fischer, fischer)
    assert not injectivity_check(product.proj_a).holds
    restricted = product.restrict(max_entropy_component(product.sft).select().sft)
    assert injectivity_check(restricted.proj_a).holds
