from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Dict, FrozenSet, Hashable, Iterable, List, Optional, Tuple

import networkx as nx
import numpy as np

from .errors import AlphabetMismatch, InvalidSystem, PartialBlockMap

Symbol = Hashable


def symbol_name(symbol: Any) -> str:
    if isinstance(symbol, str):
        return symbol
    name = getattr(symbol, "name", None)
    if isinstance(name, str):
        return name
    if isinstance(symbol, tuple):
        return "(" + ",".join(symbol_name(item) for item in symbol) + ")"
    return str(symbol)


def sort_symbols(symbols: Iterable[Symbol]) -> Tuple[Symbol, ...]:
    return tuple(sorted(set(symbols), key=symbol_name))


def word_name(symbols: Iterable[Symbol]) -> str:
    names = [symbol_name(item) for item in symbols]
    if all(len(name) == 1 for name in names):
        return "".join(names)
    return " ".join(names)


def subset_name(members: Iterable[Symbol]) -> str:
    return "+".join(symbol_name(item) for item in sort_symbols(members))


@dataclass(frozen=True)
class CheckResult:
    holds: bool
    witness: Optional[Any] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class CoverSymbol:
    v: FrozenSet[Symbol]
    i: Symbol

    @property
    def name(self) -> str:
        return f"{subset_name(self.v)}|{symbol_name(self.i)}"

    def __repr__(self) -> str:
        return f"CoverSymbol({self.name})"


@dataclass(frozen=True)
class OneStepSft:
    name: str
    symbols: Tuple[Symbol, ...]
    transitions: FrozenSet[Tuple[Symbol, Symbol]]

    def __post_init__(self) -> None:
        if len(set(self.symbols)) != len(self.symbols):
            raise InvalidSystem(f"System '{self.name}' declares a symbol twice")
        declared = set(self.symbols)
        for source, target in self.transitions:
            if source not in declared or target not in declared:
                raise InvalidSystem(
                    f"System '{self.name}' has edge {symbol_name(source)}>{symbol_name(target)} "
                    "to an undeclared symbol"
                )

    @classmethod
    def build(
        cls, name: str, symbols: Iterable[Symbol], transitions: Iterable[Tuple[Symbol, Symbol]]
    ) -> "OneStepSft":
        return cls(name, sort_symbols(symbols), frozenset(transitions))

    @cached_property
    def _successors(self) -> Dict[Symbol, Tuple[Symbol, ...]]:
        table: Dict[Symbol, List[Symbol]] = {symbol: [] for symbol in self.symbols}
        for source, target in self.transitions:
            table[source].append(target)
        return {symbol: sort_symbols(targets) for symbol, targets in table.items()}

    @cached_property
    def _predecessors(self) -> Dict[Symbol, Tuple[Symbol, ...]]:
        table: Dict[Symbol, List[Symbol]] = {symbol: [] for symbol in self.symbols}
        for source, target in self.transitions:
            table[target].append(source)
        return {symbol: sort_symbols(sources) for symbol, sources in table.items()}

    @cached_property
    def graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.symbols)
        graph.add_edges_from(self.transitions)
        return graph

    @cached_property
    def index(self) -> Dict[Symbol, int]:
        return {symbol: position for position, symbol in enumerate(self.symbols)}

    def successors(self, symbol: Symbol) -> Tuple[Symbol, ...]:
        return self._successors[symbol]

    def predecessors(self, symbol: Symbol) -> Tuple[Symbol, ...]:
        return self._predecessors[symbol]

    def allows(self, source: Symbol, target: Symbol) -> bool:
        return (source, target) in self.transitions

    def is_essential(self) -> bool:
        return all(self._successors[s] and self._predecessors[s] for s in self.symbols)

    def adjacency(self) -> np.ndarray:
        matrix = np.zeros((len(self.symbols), len(self.symbols)), dtype=np.int64)
        for source, target in self.transitions:
            matrix[self.index[source], self.index[target]] = 1
        return matrix

    def restrict(self, symbols: Iterable[Symbol], name: Optional[str] = None) -> "OneStepSft":
        kept = set(symbols)
        return OneStepSft.build(
            name or self.name,
            kept,
            ((a, b) for a, b in self.transitions if a in kept and b in kept),
        )

    def transpose(self, name: Optional[str] = None) -> "OneStepSft":
        return OneStepSft(name or f"{self.name}~", self.symbols, frozenset((b, a) for a, b in self.transitions))


@dataclass(frozen=True)
class OneBlockCode:
    name: str
    domain: OneStepSft
    label: Dict[Symbol, Symbol] = field(hash=False)
    target_alphabet: Tuple[Symbol, ...] = ()

    def __post_init__(self) -> None:
        missing = [s for s in self.domain.symbols if s not in self.label]
        if missing:
            raise PartialBlockMap(
                f"Code '{self.name}' leaves {symbol_name(missing[0])} unlabeled", witness=missing[0]
            )
        if not self.target_alphabet:
            object.__setattr__(self, "target_alphabet", sort_symbols(self.label[s] for s in self.domain.symbols))
        alphabet = set(self.target_alphabet)
        stray = [s for s in self.domain.symbols if self.label[s] not in alphabet]
        if stray:
            raise AlphabetMismatch(
                f"Code '{self.name}' labels {symbol_name(stray[0])} outside its target alphabet",
                witness=stray[0],
            )

    @classmethod
    def identity(cls, sft: OneStepSft, name: Optional[str] = None) -> "OneBlockCode":
        return cls(name or f"ID({sft.name})", sft, {s: s for s in sft.symbols}, sft.symbols)

    def letter(self, symbol: Symbol) -> Symbol:
        return self.label[symbol]

    def letters_of(self, symbols: Iterable[Symbol]) -> Tuple[Symbol, ...]:
        return tuple(self.label[s] for s in symbols)

    def restrict(self, sft: OneStepSft, name: Optional[str] = None) -> "OneBlockCode":
        return OneBlockCode(name or self.name, sft, {s: self.label[s] for s in sft.symbols}, self.target_alphabet)

    def relabel(self, mapping: Callable[[Symbol], Symbol], name: Optional[str] = None) -> "OneBlockCode":
        label = {s: mapping(self.label[s]) for s in self.domain.symbols}
        return OneBlockCode(name or self.name, self.domain, label)


@dataclass(frozen=True)
class Word:
    symbols: Tuple[Symbol, ...]
    start_index: int = 0

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def end_index(self) -> int:
        return self.start_index + len(self.symbols) - 1

    def at(self, coordinate: int) -> Symbol:
        return self.symbols[coordinate - self.start_index]

    def __str__(self) -> str:
        return word_name(self.symbols)


def _primitive_root(cycle: Tuple[Symbol, ...]) -> Tuple[Symbol, ...]:
    size = len(cycle)
    for period in range(1, size + 1):
        if size % period == 0 and cycle[:period] * (size // period) == cycle:
            return cycle[:period]
    return cycle


def _rotate(cycle: Tuple[Symbol, ...], steps: int) -> Tuple[Symbol, ...]:
    steps %= len(cycle)
    return cycle[steps:] + cycle[:steps]


def _canonical_parts(
    left: Tuple[Symbol, ...], transient: Tuple[Symbol, ...], right: Tuple[Symbol, ...], offset: int
) -> Tuple[Tuple[Symbol, ...], Tuple[Symbol, ...], Tuple[Symbol, ...], int]:
    left = _primitive_root(left)
    right = _primitive_root(right)
    while transient and transient[0] == left[0]:
        left = _rotate(left, 1)
        transient = transient[1:]
        offset -= 1
    while transient and transient[-1] == right[-1]:
        right = _rotate(right, -1)
        transient = transient[:-1]
    if transient:
        return left, transient, right, offset
    if left == right:
        names = [tuple(symbol_name(s) for s in _rotate(right, r)) for r in range(len(right))]
        best = min(range(len(right)), key=lambda r: names[r])
        cycle = _rotate(right, best)
        return cycle, (), cycle, (offset - best) % len(cycle)
    for _ in range(len(left) + len(right)):
        if left[-1] != right[-1]:
            break
        left = _rotate(left, -1)
        right = _rotate(right, -1)
        offset += 1
    return left, (), right, offset


@dataclass(frozen=True, eq=False)
class RayPoint:
    """Eventually periodic point: ...LLL T RRR... with coordinate 0 at T[origin_offset].

    Coordinates left of the transient read the left cycle backwards from its last
    symbol, coordinates right of it read the right cycle forwards from its first.
    Equality and hashing go through the canonical form, so different spellings of
    the same bi-infinite sequence compare equal.
    """

    left_cycle: Tuple[Symbol, ...]
    transient: Tuple[Symbol, ...]
    right_cycle: Tuple[Symbol, ...]
    origin_offset: int = 0

    def __post_init__(self) -> None:
        if not self.left_cycle or not self.right_cycle:
            raise InvalidSystem("RayPoint cycles must be nonempty")
        object.__setattr__(self, "left_cycle", tuple(self.left_cycle))
        object.__setattr__(self, "transient", tuple(self.transient))
        object.__setattr__(self, "right_cycle", tuple(self.right_cycle))

    @classmethod
    def periodic(cls, cycle: Iterable[Symbol], origin_offset: int = 0) -> "RayPoint":
        cycle = tuple(cycle)
        return cls(cycle, (), cycle, origin_offset)

    @cached_property
    def _canonical(self) -> Tuple[Tuple[Symbol, ...], Tuple[Symbol, ...], Tuple[Symbol, ...], int]:
        return _canonical_parts(self.left_cycle, self.transient, self.right_cycle, self.origin_offset)

    def canonical(self) -> "RayPoint":
        return RayPoint(*self._canonical)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RayPoint):
            return NotImplemented
        return self._canonical == other._canonical

    def __hash__(self) -> int:
        return hash(self._canonical)

    def at(self, coordinate: int) -> Symbol:
        position = coordinate + self.origin_offset
        if 0 <= position < len(self.transient):
            return self.transient[position]
        if position >= len(self.transient):
            return self.right_cycle[(position - len(self.transient)) % len(self.right_cycle)]
        return self.left_cycle[position % len(self.left_cycle)]

    def window(self, start: int, stop: int) -> Tuple[Symbol, ...]:
        return tuple(self.at(k) for k in range(start, stop + 1))

    def shift(self, steps: int = 1) -> "RayPoint":
        return RayPoint(self.left_cycle, self.transient, self.right_cycle, self.origin_offset + steps)

    def reversed(self) -> "RayPoint":
        return RayPoint(
            tuple(reversed(self.right_cycle)),
            tuple(reversed(self.transient)),
            tuple(reversed(self.left_cycle)),
            len(self.transient) - 1 - self.origin_offset,
        )

    def map(self, func: Callable[[Symbol], Symbol]) -> "RayPoint":
        return RayPoint(
            tuple(func(s) for s in self.left_cycle),
            tuple(func(s) for s in self.transient),
            tuple(func(s) for s in self.right_cycle),
            self.origin_offset,
        )

    @property
    def is_periodic(self) -> bool:
        left, transient, right, _ = self._canonical
        return not transient and left == right

    @property
    def period(self) -> int:
        if not self.is_periodic:
            raise InvalidSystem(f"{self} is not periodic")
        return len(self._canonical[0])

    def junctions(self) -> List[Tuple[Symbol, Symbol]]:
        body = self.left_cycle + self.transient + self.right_cycle
        pairs = [(body[k], body[k + 1]) for k in range(len(body) - 1)]
        pairs.append((self.left_cycle[-1], self.left_cycle[0]))
        pairs.append((self.right_cycle[-1], self.right_cycle[0]))
        return pairs

    def is_allowed(self, sft: OneStepSft) -> bool:
        body = set(self.left_cycle) | set(self.transient) | set(self.right_cycle)
        if not body <= set(sft.symbols):
            return False
        return all(sft.allows(a, b) for a, b in self.junctions())

    def __str__(self) -> str:
        left, transient, right, offset = self._canonical
        middle = word_name(transient) if transient else "-"
        return f"({word_name(left)})~ {middle} ({word_name(right)})~ @{offset}"
