from shiftcheck.dynamics.cover import build_cover
from shiftcheck.dynamics.graphs import recurrent_nodes
from shiftcheck.dynamics.models import OneBlockCode
from shiftcheck.dynamics.relations import relation_e_alpha, relation_e_theta, resolving_check
from shiftcheck.dynamics.shift import image_equal, reverse_code
from shiftcheck.dynamics.spectral import chain_components, periodic_points, trace_count


def splits_forever(code: OneBlockCode) -> bool:
    """Equal-label successors of a common symbol that can keep reading equal labels."""
    domain = code.domain
    steps = len(domain.symbols) ** 2
    frontier = {
        (a, b)
        for s in domain.symbols
        for a in domain.successors(s)
        for b in domain.successors(s)
        if a != b and code.label[a] == code.label[b]
    }
    for _ in range(steps):
        frontier = {
            (c, d)
            for a, b in frontier
            for c in domain.successors(a)
            for d in domain.successors(b)
            if code.label[c] == code.label[d]
        }
    return bool(frontier)


def test_resolving_check_agrees_with_brute_force(random_codes) -> None:
    for code in random_codes:
        assert resolving_check(code, "u").holds == (not splits_forever(code)), code.name
        assert resolving_check(code, "s").holds == (not splits_forever(reverse_code(code))), code.name


def test_cover_presents_the_image(random_codes) -> None:
    for code in random_codes:
        cover = build_cover(code)
        assert image_equal(cover.base_code, code), code.name


def test_alpha_and_theta_are_equivalences(random_codes) -> None:
    for code in random_codes:
        cover = build_cover(code)
        alpha = relation_e_alpha(cover)
        theta = relation_e_theta(cover)
        assert alpha.is_symmetric() and alpha.is_reflexive_on_support(), code.name
        assert set(theta.pairs()) <= set(alpha.pairs()), code.name


def test_chain_components_partition_recurrent_symbols(random_codes) -> None:
    for code in random_codes:
        components = chain_components(code.domain)
        members = [symbol for component in components for symbol in component.symbols]
        assert len(members) == len(set(members))
        assert set(members) == recurrent_nodes(code.domain.graph)


def test_trace_counts_on_random_systems(random_codes) -> None:
    for code in random_codes:
        for n in range(1, 7):
            assert trace_count(code.domain, n) == len(periodic_points(code.domain, n))
