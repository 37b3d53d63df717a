"""Equivalence relations on codes, presented as sub-SFTs of the pair graph.

A relation symbol is an ordered pair of domain symbols with equal label. The
relations built here restrict the trimmed pair relation symbol-wise, so every
one of them is again a one-step SFT.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

import networkx as nx

from .automata import ANY, distinguishing_word, follower_classes, letters_of, subset_graph, walk
from .cover import CoverSft, build_cover
from .errors import NonUniformRelation
from .graphs import path_from_cycle, path_into_cycle, reachable_from_cycles
from .models import CheckResult, OneBlockCode, OneStepSft, RayPoint, Symbol, sort_symbols, subset_name, symbol_name
from .shift import from_edge_labeled, reverse_code, trim_essential
from .spectral import entropy, max_entropy_component
from .utils import LogFn, quiet_log

Pair = Tuple[Symbol, Symbol]

RELATION_KINDS = ("pair_of_code", "alpha", "theta", "diagonal")


@dataclass(frozen=True)
class RelationSft:
    sft: OneStepSft
    base: OneStepSft
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in RELATION_KINDS:
            raise ValueError(f"Unknown relation kind '{self.kind}'")

    def pairs(self) -> Tuple[Pair, ...]:
        return self.sft.symbols

    def support(self) -> Tuple[Symbol, ...]:
        return sort_symbols(a for pair in self.sft.symbols for a in pair)

    def is_symmetric(self) -> bool:
        pairs = set(self.sft.symbols)
        if any((b, a) not in pairs for a, b in pairs):
            return False
        return all(((b, a), (d, c)) in self.sft.transitions for (a, b), (c, d) in self.sft.transitions)

    def is_reflexive_on_support(self) -> bool:
        pairs = set(self.sft.symbols)
        return all((a, a) in pairs for a in self.support())


@lru_cache(maxsize=64)
def pair_graph(code: OneBlockCode) -> nx.DiGraph:
    graph = nx.DiGraph()
    domain = code.domain
    for a in domain.symbols:
        for b in domain.symbols:
            if code.label[a] == code.label[b]:
                graph.add_node((a, b))
    for a, b in list(graph.nodes):
        for c in domain.successors(a):
            for d in domain.successors(b):
                if code.label[c] == code.label[d]:
                    graph.add_edge((a, b), (c, d))
    return graph


def _relation_from_graph(name: str, base: OneStepSft, graph: nx.DiGraph, kind: str) -> RelationSft:
    sft = trim_essential(OneStepSft.build(name, graph.nodes, graph.edges))
    return RelationSft(sft, base, kind)


def pair_relation(code: OneBlockCode) -> RelationSft:
    return _relation_from_graph(f"E({code.name})", code.domain, pair_graph(code), "pair_of_code")


def diagonal_relation(sft: OneStepSft) -> RelationSft:
    symbols = [(s, s) for s in sft.symbols]
    transitions = [((a, a), (b, b)) for a, b in sft.transitions]
    return RelationSft(OneStepSft.build(f"Delta({sft.name})", symbols, transitions), sft, "diagonal")


def restrict_relation(relation: RelationSft, keep, name: str, kind: str) -> RelationSft:
    kept = [pair for pair in relation.sft.symbols if keep(pair)]
    return RelationSft(trim_essential(relation.sft.restrict(kept, name=name)), relation.base, kind)


@dataclass(frozen=True, eq=False)
class UnstablePrefixLanguage:
    """Label words readable right after some member of ``source``."""

    source: FrozenSet[Symbol]
    code: OneBlockCode

    def accepts(self, word) -> bool:
        return bool(walk(self.code, self.source, word))

    def separating_word(self, other: "UnstablePrefixLanguage") -> Optional[Tuple[Symbol, ...]]:
        return distinguishing_word(self.code, self.source, other.code, other.source)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UnstablePrefixLanguage):
            return NotImplemented
        if self.code == other.code and self.source == other.source:
            return True
        return self.separating_word(other) is None

    def __hash__(self) -> int:
        return hash(self.code)


def unstable_prefix_language(code: OneBlockCode, v) -> UnstablePrefixLanguage:
    source = frozenset(v)
    if not source:
        raise ValueError("Unstable language needs a nonempty symbol set")
    return UnstablePrefixLanguage(source, code)


def ul_equal(code: OneBlockCode, v, v_prime) -> bool:
    return _ul_equal(code, frozenset(v), frozenset(v_prime))


@lru_cache(maxsize=4096)
def _ul_equal(code: OneBlockCode, v: FrozenSet[Symbol], v_prime: FrozenSet[Symbol]) -> bool:
    return unstable_prefix_language(code, v) == unstable_prefix_language(code, v_prime)


def relation_e_alpha(cover: CoverSft) -> RelationSft:
    code = cover.code

    def keep(pair) -> bool:
        first, second = pair
        return ul_equal(code, first.v, second.v)

    return restrict_relation(pair_relation(cover.base_code), keep, f"E_alpha({code.name})", "alpha")


def relation_e_theta(cover: CoverSft) -> RelationSft:
    def keep(pair) -> bool:
        first, second = pair
        return first.v == second.v

    return restrict_relation(pair_relation(cover.base_code), keep, f"E_theta({cover.code.name})", "theta")


def _diverging_points(
    sub_graph: nx.DiGraph, sup_graph: nx.DiGraph, history_end: Pair, exit_pair: Pair
) -> Tuple[RayPoint, RayPoint]:
    cycle, history = path_from_cycle(sub_graph, history_end)
    tail, right_cycle = path_into_cycle(sup_graph, exit_pair)
    pair_point = RayPoint(tuple(cycle), tuple(history) + tuple(tail[:-1]), tuple(right_cycle), len(history))
    return pair_point.map(lambda pair: pair[0]).canonical(), pair_point.map(lambda pair: pair[1]).canonical()


def forward_closed(sub: RelationSft, sup: RelationSft) -> CheckResult:
    """Every ``sup`` transition leaving a left-infinite ``sub`` history stays in ``sub``.

    On failure the witness is (history pair, exit pair, (t, t')) where t and t'
    agree left of 0 through ``sub`` and the exit pair sits at coordinate 0.
    """
    stray = [pair for pair in sub.sft.symbols if pair not in sup.sft.index]
    if stray:
        raise ValueError(f"Relation '{sub.sft.name}' is not contained in '{sup.sft.name}'")
    sub_graph = sub.sft.graph
    histories = reachable_from_cycles(sub_graph)
    for pair in sorted(histories, key=symbol_name):
        for following in sup.sft.successors(pair):
            if sub.sft.allows(pair, following):
                continue
            points = _diverging_points(sub_graph, sup.sft.graph, pair, following)
            detail = f"exit {symbol_name(pair)}>{symbol_name(following)}"
            return CheckResult(False, (pair, following, points), detail)
    return CheckResult(True)


def resolving_check(code: OneBlockCode, direction: str = "u") -> CheckResult:
    """u: points sharing a left ray and an image coincide; s: the same for right rays."""
    if direction not in ("u", "s"):
        raise ValueError(f"Direction must be 'u' or 's', got '{direction}'")
    target = code if direction == "u" else reverse_code(code)
    result = forward_closed(diagonal_relation(target.domain), pair_relation(target))
    if result.holds:
        return CheckResult(True)
    _, _, (t, t_prime) = result.witness
    if direction == "s":
        t, t_prime = t.reversed().canonical(), t_prime.reversed().canonical()
    return CheckResult(False, (t, t_prime), result.detail)


def _connected_classes(cover_sft: OneStepSft, relation: RelationSft) -> Dict[Symbol, str]:
    linked = nx.Graph()
    linked.add_nodes_from(cover_sft.symbols)
    linked.add_edges_from(relation.sft.symbols)
    class_map: Dict[Symbol, str] = {}
    for members in nx.connected_components(linked):
        ordered = sort_symbols(members)
        for member in ordered:
            class_map[member] = symbol_name(ordered[0])
    return class_map


@dataclass(frozen=True)
class QuotientPresentation:
    cover: CoverSft
    relation: RelationSft
    class_map: Dict[Symbol, str]
    sft: OneStepSft
    code: OneBlockCode
    class_code: OneBlockCode

    def classes(self) -> Dict[str, Tuple[Symbol, ...]]:
        grouped: Dict[str, List[Symbol]] = {}
        for member, class_id in self.class_map.items():
            grouped.setdefault(class_id, []).append(member)
        return {class_id: sort_symbols(members) for class_id, members in sorted(grouped.items())}

    def max_entropy_code(self, tie_band: float = 1e-7, strict: bool = True) -> OneBlockCode:
        component = max_entropy_component(self.sft, tie_band).select(strict)
        return self.code.restrict(component.sft, name=f"{self.code.name}+")


def quotient_presentation(
    cover: CoverSft, relation: str = "alpha", log: LogFn = quiet_log
) -> QuotientPresentation:
    builders = {"alpha": relation_e_alpha, "theta": relation_e_theta}
    if relation not in builders:
        raise ValueError(f"Relation must be 'alpha' or 'theta', got '{relation}'")
    relation = builders[relation](cover)
    class_map = _connected_classes(cover.sft, relation)
    labels: Dict[str, Symbol] = {}
    for member in cover.sft.symbols:
        class_id = class_map[member]
        letter = cover.base_code.label[member]
        if labels.setdefault(class_id, letter) != letter:
            raise NonUniformRelation(
                f"Class {class_id} of '{relation.sft.name}' mixes labels "
                f"{symbol_name(labels[class_id])} and {symbol_name(letter)}",
                witness=(class_id, member),
            )
    transitions = {(class_map[a], class_map[b]) for a, b in cover.sft.transitions}
    name = f"{cover.code.name}/{relation.kind}"
    sft = OneStepSft.build(name, labels, transitions)
    code = OneBlockCode(f"pi+({name})", sft, labels, cover.code.target_alphabet)
    class_code = OneBlockCode(f"q({name})", cover.sft, dict(class_map), sft.symbols)
    log("INFO", f"Quotient {name}: classes={len(sft.symbols)} transitions={len(sft.transitions)}")
    return QuotientPresentation(cover, relation, class_map, sft, code, class_code)


def canonical_extension(
    code: OneBlockCode, cap: int = 4096, tie_band: float = 1e-7, log: LogFn = quiet_log
) -> OneBlockCode:
    cover = build_cover(code, cap, log=log)
    return quotient_presentation(cover, "alpha", log=log).max_entropy_code(tie_band)


@dataclass(frozen=True)
class FischerGraph:
    states: Dict[str, FrozenSet[Symbol]]
    edges: Tuple[Tuple[str, Symbol, str], ...]


def fischer_graph(code: OneBlockCode, cap: int = 4096) -> FischerGraph:
    """Terminal component of the follower-set graph, as an edge-labeled graph.

    States are named q0, q1, ... in the order of their least representative subset.
    """
    graph = subset_graph(code, ANY, cap)
    letters = letters_of(code)
    representative = follower_classes(graph, letters)
    reps = sorted(set(representative.values()), key=subset_name)
    names = {rep: f"q{position}" for position, rep in enumerate(reps)}
    moves = nx.DiGraph()
    moves.add_nodes_from(names.values())
    labeled: Set[Tuple[str, Symbol, str]] = set()
    for rep in reps:
        for letter, target in graph[rep].items():
            edge = (names[rep], letter, names[representative[target]])
            labeled.add(edge)
            moves.add_edge(edge[0], edge[2])
    condensed = nx.condensation(moves)
    candidates: List[Tuple[float, str, Set[str]]] = []
    for node in condensed.nodes:
        if condensed.out_degree(node):
            continue
        members = set(condensed.nodes[node]["members"])
        if len(members) == 1 and not moves.has_edge(next(iter(members)), next(iter(members))):
            continue
        edges = [edge for edge in labeled if edge[0] in members]
        piece = from_edge_labeled("piece", edges).domain
        candidates.append((entropy(piece), min(members, key=lambda name: int(name[1:])), members))
    if not candidates:
        raise NonUniformRelation(f"Image of '{code.name}' has no recurrent follower set")
    candidates.sort(key=lambda item: (-item[0], int(item[1][1:])))
    members = candidates[0][2]
    states = {names[rep]: rep for rep in reps if names[rep] in members}
    edges = tuple(sorted((edge for edge in labeled if edge[0] in members), key=lambda e: tuple(map(symbol_name, e))))
    return FischerGraph(states, edges)


def fischer_cover(code: OneBlockCode, cap: int = 4096) -> OneBlockCode:
    presentation = from_edge_labeled(f"fischer({code.name})", fischer_graph(code, cap).edges)
    return OneBlockCode(presentation.name, presentation.domain, presentation.label, code.target_alphabet)


def quotient_classes_distinguished(presentation: QuotientPresentation) -> Optional[Pair]:
    cover = presentation.cover
    for a, b in pair_relation(cover.base_code).pairs():
        if presentation.class_map[a] == presentation.class_map[b]:
            continue
        if ul_equal(cover.code, a.v, b.v):
            return a, b
    return None
