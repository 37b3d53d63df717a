"""Subset constructions over labeled (vertex-labeled) graphs.

A subset state is a frozenset of domain symbols. ``ANY`` stands for the state
before the first letter is read, where every symbol may start a path.
"""

from collections import deque
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from .errors import StateBlowup
from .models import OneBlockCode, Symbol, sort_symbols, subset_name, symbol_name

ANY = None

SubsetState = Optional[FrozenSet[Symbol]]


def letters_of(*codes: OneBlockCode) -> Tuple[Symbol, ...]:
    return sort_symbols(letter for code in codes for letter in code.target_alphabet)


def advance(code: OneBlockCode, state: SubsetState, letter: Symbol) -> FrozenSet[Symbol]:
    if state is ANY:
        return frozenset(s for s in code.domain.symbols if code.label[s] == letter)
    return frozenset(
        target for source in state for target in code.domain.successors(source) if code.label[target] == letter
    )


def walk(code: OneBlockCode, state: SubsetState, letters: Iterable[Symbol]) -> FrozenSet[Symbol]:
    current = state
    for letter in letters:
        current = advance(code, current, letter)
        if not current:
            return frozenset()
    if current is ANY:
        return frozenset(code.domain.symbols)
    return current


def subset_graph(
    code: OneBlockCode, start: SubsetState = ANY, cap: int = 4096
) -> Dict[FrozenSet[Symbol], Dict[Symbol, FrozenSet[Symbol]]]:
    """Deterministic graph of nonempty subsets reachable from ``start``.

    ``start`` itself is a node only when it is a real subset.
    """
    letters = letters_of(code)
    if start is ANY:
        roots = [advance(code, ANY, letter) for letter in letters]
    else:
        roots = [start]
    graph: Dict[FrozenSet[Symbol], Dict[Symbol, FrozenSet[Symbol]]] = {}
    stack = [root for root in roots if root]
    seen: Set[FrozenSet[Symbol]] = set(stack)
    while stack:
        state = stack.pop()
        moves: Dict[Symbol, FrozenSet[Symbol]] = {}
        for letter in letters:
            target = advance(code, state, letter)
            if not target:
                continue
            moves[letter] = target
            if target not in seen:
                seen.add(target)
                stack.append(target)
        if len(seen) > cap:
            raise StateBlowup(f"Subset construction for '{code.name}' exceeded {cap} states", witness=cap)
        graph[state] = moves
    return graph


def distinguishing_word(
    code_a: OneBlockCode,
    start_a: SubsetState,
    code_b: OneBlockCode,
    start_b: SubsetState,
) -> Optional[Tuple[Symbol, ...]]:
    """Shortest word readable from exactly one of the two start states, or None.

    Breadth-first search over the product of the two subset automata; the
    language of a state is the set of label words with a nonempty run.
    """
    letters = letters_of(code_a, code_b)
    origin = (start_a, start_b)
    parents: Dict[Tuple[SubsetState, SubsetState], Optional[Tuple[Tuple, Symbol]]] = {origin: None}
    queue = deque([origin])
    while queue:
        pair = queue.popleft()
        state_a, state_b = pair
        for letter in letters:
            next_a = advance(code_a, state_a, letter)
            next_b = advance(code_b, state_b, letter)
            if not next_a and not next_b:
                continue
            if bool(next_a) != bool(next_b):
                word = [letter]
                cursor = pair
                while parents[cursor] is not None:
                    cursor, previous_letter = parents[cursor]
                    word.append(previous_letter)
                return tuple(reversed(word))
            following = (next_a, next_b)
            if following not in parents:
                parents[following] = (pair, letter)
                queue.append(following)
    return None


class Partition:
    def __init__(self, elements: List) -> None:
        self.elements = elements
        self.part_lookup = {e: 0 for e in elements}
        self.parts: Dict[int, Set] = {0: set(elements)}

    def part_count(self) -> int:
        return len(self.parts)

    def part_size(self, part: int) -> int:
        return len(self.parts[part])

    def split(self, marked: Iterable) -> List[Tuple[int, int]]:
        marks: Dict[int, Set] = {}
        for element in marked:
            marks.setdefault(self.part_lookup[element], set()).add(element)
        splits = []
        for part in sorted(marks):
            if self.part_size(part) > len(marks[part]):
                new_part = self.part_count()
                self.parts[new_part] = set()
                for element in marks[part]:
                    self.part_lookup[element] = new_part
                    self.parts[new_part].add(element)
                    self.parts[part].remove(element)
                splits.append((part, new_part))
        return splits

    def select_smaller(self, first: int, second: int) -> int:
        return first if self.part_size(first) <= self.part_size(second) else second


_SINK = ("__sink__",)


def follower_classes(
    graph: Dict[FrozenSet[Symbol], Dict[Symbol, FrozenSet[Symbol]]], letters: Tuple[Symbol, ...]
) -> Dict[FrozenSet[Symbol], FrozenSet[Symbol]]:
    """Hopcroft refinement of a deterministic subset graph into follower-set classes.

    Returns a map from each state to the lexicographically least state of its class.
    """
    states = sorted(graph, key=subset_name)
    if not states:
        return {}
    inverse: Dict[Tuple, Dict[Symbol, List]] = {state: {a: [] for a in letters} for state in states}
    inverse[_SINK] = {a: [] for a in letters}
    for state in states:
        for letter in letters:
            target = graph[state].get(letter, _SINK)
            inverse[target][letter].append(state)
    for letter in letters:
        inverse[_SINK][letter].append(_SINK)

    partition = Partition(states + [_SINK])
    splits = partition.split([_SINK])
    if not splits:
        return {state: state for state in states}
    first, second = splits[0]
    smaller = partition.select_smaller(first, second)
    waiting = {(smaller, letter) for letter in letters}
    while waiting:
        part, letter = min(waiting, key=lambda item: (item[0], symbol_name(item[1])))
        waiting.remove((part, letter))
        preimage = [source for target in list(partition.parts[part]) for source in inverse[target][letter]]
        for old, new in partition.split(preimage):
            for other in letters:
                if (old, other) in waiting:
                    waiting.add((new, other))
                else:
                    waiting.add((partition.select_smaller(old, new), other))

    representative: Dict[FrozenSet[Symbol], FrozenSet[Symbol]] = {}
    for part in partition.parts.values():
        members = sorted((m for m in part if m != _SINK), key=subset_name)
        for member in members:
            representative[member] = members[0]
    return representative
