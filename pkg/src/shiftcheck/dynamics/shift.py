from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Tuple, Union

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher

from .automata import ANY, advance, distinguishing_word, letters_of
from .errors import AlphabetMismatch, BracketUndefined, EmptyShift, NotAllowedPoint, PartialBlockMap
from .models import OneBlockCode, OneStepSft, RayPoint, Symbol, Word, sort_symbols, symbol_name

System = Union[OneStepSft, OneBlockCode]
BlockMap = Union[Mapping[Tuple[Symbol, ...], Symbol], Callable[[Tuple[Symbol, ...]], Symbol]]


def trim_essential(sft: OneStepSft) -> OneStepSft:
    alive = set(sft.symbols)
    changed = True
    while changed:
        changed = False
        for symbol in sorted(alive, key=symbol_name):
            has_successor = any(t in alive for t in sft.successors(symbol))
            has_predecessor = any(p in alive for p in sft.predecessors(symbol))
            if not (has_successor and has_predecessor):
                alive.discard(symbol)
                changed = True
    if not alive:
        raise EmptyShift(f"System '{sft.name}' has no bi-infinite points")
    if len(alive) == len(sft.symbols):
        return sft
    return sft.restrict(alive)


def _block_name(block: Tuple[Symbol, ...]) -> str:
    names = [symbol_name(s) for s in block]
    if all(len(name) == 1 for name in names):
        return "".join(names)
    return "-".join(names)


def allowed_blocks(sft: OneStepSft, n: int) -> List[Tuple[Symbol, ...]]:
    blocks: List[Tuple[Symbol, ...]] = [(s,) for s in sft.symbols]
    for _ in range(n - 1):
        blocks = [block + (t,) for block in blocks for t in sft.successors(block[-1])]
    return sorted(blocks, key=lambda block: tuple(symbol_name(s) for s in block))


@dataclass(frozen=True)
class BlockPresentation:
    sft: OneStepSft
    blocks: Dict[Symbol, Tuple[Symbol, ...]]

    def conjugacy(self, position: int = 0, name: Optional[str] = None) -> OneBlockCode:
        label = {symbol: block[position] for symbol, block in self.blocks.items()}
        base = sort_symbols(label.values())
        return OneBlockCode(name or f"{self.sft.name}>{position}", self.sft, label, base)


def block_presentation(sft: OneStepSft, n: int) -> BlockPresentation:
    if n < 1:
        raise ValueError(f"Block length must be positive, got {n}")
    if n == 1:
        return BlockPresentation(sft, {s: (s,) for s in sft.symbols})
    blocks = allowed_blocks(sft, n)
    names = {block: _block_name(block) for block in blocks}
    by_prefix: Dict[Tuple[Symbol, ...], List[Tuple[Symbol, ...]]] = {}
    for block in blocks:
        by_prefix.setdefault(block[:-1], []).append(block)
    transitions = [
        (names[block], names[following]) for block in blocks for following in by_prefix.get(block[1:], [])
    ]
    higher = OneStepSft.build(f"{sft.name}[{n}]", names.values(), transitions)
    return BlockPresentation(higher, {names[block]: block for block in blocks})


def higher_block(sft: OneStepSft, n: int) -> Tuple[OneStepSft, OneBlockCode]:
    presentation = block_presentation(sft, n)
    return presentation.sft, presentation.conjugacy(0, name=f"{sft.name}[{n}]>0")


@dataclass(frozen=True)
class RecodedCode:
    code: OneBlockCode
    conjugacy: OneBlockCode
    memory: int
    anticipation: int


def recode_one_block(
    sft: OneStepSft,
    block_map: BlockMap,
    memory: int = 0,
    anticipation: int = 0,
    name: str = "recoded",
    target_alphabet: Optional[Iterable[Symbol]] = None,
) -> RecodedCode:
    """Turn a sliding block code with the given window into a 1-block code.

    The returned conjugacy reads the symbol at coordinate 0 from each block, so
    ``code`` and the original sliding code agree once composed with it.
    """
    presentation = block_presentation(sft, memory + anticipation + 1)
    lookup = block_map if callable(block_map) else block_map.get
    label: Dict[Symbol, Symbol] = {}
    for symbol, block in presentation.blocks.items():
        letter = lookup(block)
        if letter is None:
            raise PartialBlockMap(
                f"Block map '{name}' is undefined on allowed block {_block_name(block)}", witness=block
            )
        label[symbol] = letter
    alphabet = sort_symbols(target_alphabet) if target_alphabet is not None else sort_symbols(label.values())
    code = OneBlockCode(name, presentation.sft, label, alphabet)
    return RecodedCode(code, presentation.conjugacy(memory, name=f"{name}>center"), memory, anticipation)


def is_word(system: System, word: Union[Word, Iterable[Symbol]]) -> bool:
    symbols = tuple(word.symbols) if isinstance(word, Word) else tuple(word)
    if not symbols:
        return True
    if isinstance(system, OneStepSft):
        if any(s not in system.index for s in symbols):
            return False
        return all(system.allows(a, b) for a, b in zip(symbols, symbols[1:]))
    state = ANY
    for letter in symbols:
        state = advance(system, state, letter)
        if not state:
            return False
    return True


def enumerate_words(system: System, n: int) -> List[Tuple[Symbol, ...]]:
    if n < 1:
        return [()]
    if isinstance(system, OneStepSft):
        words = allowed_blocks(system, n)
    else:
        frontier = {(): ANY}
        for _ in range(n):
            grown = {}
            for prefix, state in frontier.items():
                for letter in letters_of(system):
                    following = advance(system, state, letter)
                    if following:
                        grown[prefix + (letter,)] = following
            frontier = grown
        words = list(frontier)
    return sorted(words, key=lambda word: tuple(symbol_name(s) for s in word))


def bracket(t: RayPoint, t_prime: RayPoint) -> RayPoint:
    """Point agreeing with ``t`` on coordinates >= 0 and with ``t_prime`` on coordinates <= 0."""
    if t.at(0) != t_prime.at(0):
        raise BracketUndefined(
            f"Bracket needs a common symbol at 0, got {symbol_name(t.at(0))} and {symbol_name(t_prime.at(0))}",
            witness=(t.at(0), t_prime.at(0)),
        )
    start = min(-t_prime.origin_offset, 0)
    stop = max(len(t.transient) - t.origin_offset, 0)
    left_size = len(t_prime.left_cycle)
    left = tuple(t_prime.left_cycle[(j + start + t_prime.origin_offset) % left_size] for j in range(left_size))
    transient = t_prime.window(start, -1) + t.window(0, stop - 1)
    right_size = len(t.right_cycle)
    right = tuple(
        t.right_cycle[(j + stop + t.origin_offset - len(t.transient)) % right_size] for j in range(right_size)
    )
    return RayPoint(left, transient, right, -start).canonical()


def compose_codes(first: OneBlockCode, second: OneBlockCode, name: Optional[str] = None) -> OneBlockCode:
    known = set(second.domain.symbols)
    stray = [letter for letter in first.target_alphabet if letter not in known]
    if stray:
        raise AlphabetMismatch(
            f"Cannot compose '{first.name}' into '{second.name}': letter {symbol_name(stray[0])} "
            f"is not a symbol of '{second.domain.name}'",
            witness=stray[0],
        )
    label = {s: second.label[first.label[s]] for s in first.domain.symbols}
    return OneBlockCode(name or f"{second.name}*{first.name}", first.domain, label, second.target_alphabet)


def apply_code(code: OneBlockCode, point: RayPoint) -> RayPoint:
    if not point.is_allowed(code.domain):
        raise NotAllowedPoint(f"{point} is not a point of '{code.domain.name}'", witness=point)
    return point.map(code.letter).canonical()


def separating_word(code_a: OneBlockCode, code_b: OneBlockCode) -> Optional[Tuple[Symbol, ...]]:
    return distinguishing_word(code_a, ANY, code_b, ANY)


def image_equal(code_a: OneBlockCode, code_b: OneBlockCode) -> bool:
    return separating_word(code_a, code_b) is None


def reverse_code(code: OneBlockCode) -> OneBlockCode:
    return OneBlockCode(f"{code.name}~", code.domain.transpose(), dict(code.label), code.target_alphabet)


def from_edge_labeled(name: str, edges: Iterable[Tuple[Symbol, Symbol, Symbol]]) -> OneBlockCode:
    named: Dict[str, Tuple[Symbol, Symbol, Symbol]] = {}
    for source, letter, target in sorted(edges, key=lambda e: tuple(symbol_name(x) for x in e)):
        base = f"{symbol_name(source)}_{symbol_name(letter)}_{symbol_name(target)}"
        candidate, suffix = base, 1
        while candidate in named:
            suffix += 1
            candidate = f"{base}_{suffix}"
        named[candidate] = (source, letter, target)
    transitions = [
        (first, second)
        for first, (_, _, end) in named.items()
        for second, (start, _, _) in named.items()
        if end == start
    ]
    sft = OneStepSft.build(name, named, transitions)
    return OneBlockCode(name, sft, {edge: named[edge][1] for edge in named})


def labeled_isomorphism(code_a: OneBlockCode, code_b: OneBlockCode) -> Optional[Dict[Symbol, Symbol]]:
    if len(code_a.domain.symbols) != len(code_b.domain.symbols):
        return None
    graph_a = nx.DiGraph(code_a.domain.graph)
    graph_b = nx.DiGraph(code_b.domain.graph)
    nx.set_node_attributes(graph_a, {s: symbol_name(code_a.label[s]) for s in code_a.domain.symbols}, "label")
    nx.set_node_attributes(graph_b, {s: symbol_name(code_b.label[s]) for s in code_b.domain.symbols}, "label")
    matcher = DiGraphMatcher(graph_a, graph_b, node_match=lambda x, y: x["label"] == y["label"])
    if not matcher.is_isomorphic():
        return None
    return dict(matcher.mapping)


def disjoint_union(name: str, *systems: OneStepSft) -> OneStepSft:
    symbols = [s for system in systems for s in system.symbols]
    transitions = [edge for system in systems for edge in system.transitions]
    return OneStepSft.build(name, symbols, transitions)
