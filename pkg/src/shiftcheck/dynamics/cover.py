"""Canonical extension of a sofic image.

The cover alphabet pairs a domain symbol ``i`` with the set ``v`` of symbols
that share its left label ray and admit a common future with it. Transitions
follow the past-subset automaton, so every cover word is realized by some
domain point.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterator, List, Set, Tuple

import networkx as nx

from .automata import advance, subset_graph, walk
from .errors import NotAllowedPoint, SymbolNotInSubset
from .graphs import reachable_from_cycles, reaching_cycles
from .models import CoverSymbol, OneBlockCode, OneStepSft, RayPoint, Symbol, sort_symbols, subset_name, symbol_name
from .shift import trim_essential
from .utils import LogFn, quiet_log


@dataclass(frozen=True)
class PastSubsetAutomaton:
    code: OneBlockCode
    states: Tuple[FrozenSet[Symbol], ...]
    transitions: Dict[Tuple[FrozenSet[Symbol], Symbol], FrozenSet[Symbol]]

    def step(self, state: FrozenSet[Symbol], letter: Symbol) -> FrozenSet[Symbol]:
        return self.transitions.get((state, letter), frozenset())


@dataclass(frozen=True)
class CoverSft:
    sft: OneStepSft
    base_code: OneBlockCode
    code: OneBlockCode
    automaton: PastSubsetAutomaton


def past_subset_automaton(code: OneBlockCode, cap: int = 4096) -> PastSubsetAutomaton:
    """Subsets ending presentations of left-infinite label rays.

    Only states reachable from a cycle of the subset graph are kept.
    """
    graph = subset_graph(code, cap=cap)
    digraph = nx.DiGraph()
    digraph.add_nodes_from(graph)
    for state, moves in graph.items():
        for target in moves.values():
            digraph.add_edge(state, target)
    states = tuple(sorted(reachable_from_cycles(digraph), key=subset_name))
    transitions = {
        (state, letter): target for state in states for letter, target in graph[state].items()
    }
    return PastSubsetAutomaton(code, states, transitions)


class FutureTable:
    """Memoized common-future relation of a code, shared read-only once built."""

    def __init__(self, code: OneBlockCode) -> None:
        self.code = code
        self._extendable = self._right_extendable_pairs()

    def _right_extendable_pairs(self) -> Set[Tuple[Symbol, Symbol]]:
        code = self.code
        pairs = nx.DiGraph()
        for p in code.domain.symbols:
            for q in code.domain.symbols:
                if code.label[p] != code.label[q]:
                    continue
                pairs.add_node((p, q))
                for p_next in code.domain.successors(p):
                    for q_next in code.domain.successors(q):
                        if code.label[p_next] == code.label[q_next]:
                            pairs.add_edge((p, q), (p_next, q_next))
        return reaching_cycles(pairs)

    def common_future(self, i: Symbol, j: Symbol) -> bool:
        return any(
            (p, q) in self._extendable
            for p in self.code.domain.successors(i)
            for q in self.code.domain.successors(j)
        )


@lru_cache(maxsize=64)
def future_table(code: OneBlockCode) -> FutureTable:
    return FutureTable(code)


def common_future(code: OneBlockCode, i: Symbol, j: Symbol) -> bool:
    """True iff equal-label right-infinite paths start from a successor of i and a successor of j."""
    return future_table(code).common_future(i, j)


def e_set(code: OneBlockCode, subset: FrozenSet[Symbol], i: Symbol) -> FrozenSet[Symbol]:
    members = frozenset(subset)
    if i not in members:
        raise SymbolNotInSubset(
            f"{symbol_name(i)} is not in past subset {subset_name(members)}", witness=(i, members)
        )
    table = future_table(code)
    return frozenset(j for j in members if j == i or table.common_future(i, j))


def build_cover(code: OneBlockCode, cap: int = 4096, log: LogFn = quiet_log) -> CoverSft:
    automaton = past_subset_automaton(code, cap)
    log("INFO", f"Past subsets for {code.name}: {len(automaton.states)}")

    def cover_symbol(state: FrozenSet[Symbol], i: Symbol) -> CoverSymbol:
        return CoverSymbol(e_set(code, state, i), i)

    symbols: Set[CoverSymbol] = set()
    transitions: Set[Tuple[CoverSymbol, CoverSymbol]] = set()
    for state in automaton.states:
        for i in sort_symbols(state):
            source = cover_symbol(state, i)
            symbols.add(source)
            for following in code.domain.successors(i):
                target_state = automaton.step(state, code.label[following])
                target = cover_symbol(target_state, following)
                symbols.add(target)
                transitions.add((source, target))
    sft = trim_essential(OneStepSft.build(f"cover({code.name})", symbols, transitions))
    base_code = OneBlockCode(
        f"pi0({code.name})", sft, {s: code.label[s.i] for s in sft.symbols}, code.target_alphabet
    )
    log("INFO", f"Cover for {code.name}: symbols={len(sft.symbols)} transitions={len(sft.transitions)}")
    return CoverSft(sft, base_code, code, automaton)


def _limit_subset(code: OneBlockCode, cycle_letters: Tuple[Symbol, ...]) -> FrozenSet[Symbol]:
    state = frozenset(code.domain.symbols)
    while True:
        following = walk(code, state, cycle_letters)
        if following == state:
            return state
        state = following


def canonical_associate(code: OneBlockCode, point: RayPoint) -> RayPoint:
    """Cover point whose coordinate k is (e_set(S_k, s_k), s_k) for the past subsets S_k of ``point``."""
    if not point.is_allowed(code.domain):
        raise NotAllowedPoint(f"{point} is not a point of '{code.domain.name}'", witness=point)

    def associate(state: FrozenSet[Symbol], symbol: Symbol) -> Tuple[FrozenSet[Symbol], CoverSymbol]:
        following = advance(code, state, code.label[symbol])
        return following, CoverSymbol(e_set(code, following, symbol), symbol)

    left_letters = tuple(code.label[s] for s in point.left_cycle)
    state = _limit_subset(code, left_letters)
    left: List[CoverSymbol] = []
    for symbol in point.left_cycle:
        state, item = associate(state, symbol)
        left.append(item)
    transient: List[CoverSymbol] = []
    for symbol in point.transient:
        state, item = associate(state, symbol)
        transient.append(item)

    boundaries: Dict[FrozenSet[Symbol], int] = {}
    passes: List[List[CoverSymbol]] = []
    while state not in boundaries:
        boundaries[state] = len(passes)
        block: List[CoverSymbol] = []
        for symbol in point.right_cycle:
            state, item = associate(state, symbol)
            block.append(item)
        passes.append(block)
    first_repeat = boundaries[state]
    for block in passes[:first_repeat]:
        transient.extend(block)
    right = [item for block in passes[first_repeat:] for item in block]
    return RayPoint(tuple(left), tuple(transient), tuple(right), point.origin_offset).canonical()


def cover_words(cover: CoverSft, length: int) -> Iterator[Tuple[CoverSymbol, ...]]:
    frontier: List[Tuple[CoverSymbol, ...]] = [(s,) for s in cover.sft.symbols]
    for _ in range(length - 1):
        frontier = [word + (t,) for word in frontier for t in cover.sft.successors(word[-1])]
    yield from frontier
