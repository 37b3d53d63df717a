import pytest

from shiftcheck.dynamics.cover import build_cover
from shiftcheck.dynamics.models import RayPoint
from shiftcheck.dynamics.relations import (
    RelationSft,
    diagonal_relation,
    fischer_cover,
    fischer_graph,
    forward_closed,
    pair_relation,
    quotient_classes_distinguished,
    quotient_presentation,
    relation_e_alpha,
    relation_e_theta,
    resolving_check,
    ul_equal,
    unstable_prefix_language,
)
from shiftcheck.dynamics.shift import labeled_isomorphism


def test_pair_relation_is_an_equivalence(ev_code) -> None:
    relation = pair_relation(ev_code)
    assert ("y", "z") in relation.pairs()
    assert relation.is_symmetric()
    assert relation.is_reflexive_on_support()
    assert diagonal_relation(ev_code.domain).is_symmetric()


def test_resolving_codes(ev_code, xor_code) -> None:
    for code in (ev_code, xor_code):
        assert resolving_check(code, "u").holds
        assert resolving_check(code, "s").holds


def test_constant_code_is_not_resolving(const_code) -> None:
    result = resolving_check(const_code, "u")
    assert not result.holds
    t, t_prime = result.witness
    assert t == RayPoint.periodic(("0",))
    assert t_prime.window(-3, -1) == ("0", "0", "0")
    assert t_prime.window(0, 3) == ("1", "1", "1", "1")
    assert not resolving_check(const_code, "s").holds


def test_resolving_check_rejects_unknown_direction(ev_code) -> None:
    with pytest.raises(ValueError):
        resolving_check(ev_code, "x")


def test_forward_closed_reports_exit(const_code) -> None:
    result = forward_closed(diagonal_relation(const_code.domain), pair_relation(const_code))
    assert not result.holds
    history, exit_pair, _ = result.witness
    assert history == ("0", "0")
    assert exit_pair == ("0", "1")


def test_unstable_languages(ev_code) -> None:
    language = unstable_prefix_language(ev_code, {"y"})
    assert language.accepts(["1", "0"])
    assert not language.accepts(["0"])
    assert language.separating_word(unstable_prefix_language(ev_code, {"y", "z"})) == ("0",)
    assert unstable_prefix_language(ev_code, {"x"}) == unstable_prefix_language(ev_code, {"z"})
    assert ul_equal(ev_code, {"x"}, {"z"})
    assert not ul_equal(ev_code, {"y"}, {"y", "z"})
    with pytest.raises(ValueError):
        unstable_prefix_language(ev_code, [])


def test_alpha_and_theta_relations_of_even_shift(ev_code) -> None:
    cover = build_cover(ev_code)
    alpha = relation_e_alpha(cover)
    theta = relation_e_theta(cover)
    assert set(theta.pairs()) <= set(alpha.pairs())
    assert alpha.is_symmetric()
    assert forward_closed(alpha, pair_relation(cover.base_code)).holds


@pytest.mark.parametrize("relation", ["alpha", "theta"])
def test_quotient_merges_the_odd_pair(ev_code, relation) -> None:
    quotient = quotient_presentation(build_cover(ev_code), relation)
    classes = quotient.classes()
    assert len(classes) == 4
    assert [member.name for member in classes["y+z|y"]] == ["y+z|y", "y+z|z"]


def test_alpha_quotient_matches_fischer_cover(ev_code) -> None:
    quotient = quotient_presentation(build_cover(ev_code), "alpha")
    restricted = quotient.max_entropy_code()
    assert len(restricted.domain.symbols) == 3
    assert labeled_isomorphism(restricted, fischer_cover(ev_code)) is not None
    assert quotient_classes_distinguished(quotient) is None


def test_quotient_rejects_unknown_relation(ev_code) -> None:
    with pytest.raises(ValueError):
        quotient_presentation(build_cover(ev_code), "beta")


def test_relation_kinds_are_closed(ev_code) -> None:
    relation = pair_relation(ev_code)
    with pytest.raises(ValueError):
        RelationSft(relation.sft, relation.base, "custom")


def test_fischer_graph_of_even_shift(ev_code) -> None:
    graph = fischer_graph(ev_code)
    assert graph.states == {"q0": frozenset({"x"}), "q1": frozenset({"y"})}
    assert graph.edges == (("q0", "0", "q0"), ("q0", "1", "q1"), ("q1", "1", "q0"))
    assert labeled_isomorphism(fischer_cover(ev_code), ev_code) is not None


def test_alpha_quotient_can_stay_branching(r1_code) -> None:
    cover = build_cover(r1_code)
    assert len(cover.sft.symbols) == 7
    assert len(cover.sft.transitions) == 13
    presentation = quotient_presentation(cover, "alpha")
    assert len(presentation.sft.symbols) == 7
    assert set(presentation.relation.pairs()) == {(s, s) for s in cover.sft.symbols}

    exit_detail = "exit (s1+s2|s1,s1+s2|s1)>(s1+s2+s3|s2,s1+s2|s1)"
    closed = forward_closed(presentation.relation, pair_relation(cover.base_code))
    assert not closed.holds
    assert closed.detail == exit_detail
    history, exit_pair, _ = closed.witness
    assert [s.name for s in history] == ["s1+s2|s1", "s1+s2|s1"]
    assert [s.name for s in exit_pair] == ["s1+s2+s3|s2", "s1+s2|s1"]

    resolving = resolving_check(presentation.code, "u")
    assert not resolving.holds
    assert resolving.detail == exit_detail
    assert not resolving_check(presentation.max_entropy_code(), "u").holds

    merged = quotient_classes_distinguished(presentation)
    assert [s.name for s in merged] == ["s1+s2+s3|s2", "s1+s2|s1"]
    assert ul_equal(r1_code, {"s1", "s2"}, {"s1", "s2", "s3"})
    assert not ul_equal(r1_code, {"s1", "s2"}, {"s2", "s3"})
