"""Degree of finite-to-one codes.

Two words are related when equal-label points carry them at the same place.
Families of related words measure how many preimages a point must have; the
smallest column count over all families is the degree d, and it is checked
against the smallest periodic preimage count D.
"""

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .errors import CapExceeded, Mismatch, NonUniqueV, NotFiniteToOne, NotPermutation, WindowMismatch, WindowTooSmall
from .graphs import path_from_cycle, path_into_cycle, reachable_from_cycles, reaching_cycles, shortest_path
from .models import CheckResult, OneBlockCode, RayPoint, Symbol, Word, symbol_name, word_name
from .relations import pair_graph, pair_relation
from .shift import enumerate_words, is_word
from .spectral import image_periodic_points, preimage_count
from .utils import LogFn, quiet_log


def _word_key(word: Sequence[Symbol]) -> Tuple[str, ...]:
    return tuple(symbol_name(s) for s in word)


def finite_to_one_check(code: OneBlockCode) -> CheckResult:
    """No diamond: no equal-label paths that leave the diagonal and come back to it.

    The witness is the pair of diverging paths, first and last symbols shared.
    """
    graph = pair_graph(code)
    diagonal = {(s, s) for s in code.domain.symbols}
    off_diagonal = [node for node in graph.nodes if node not in diagonal]
    inner = graph.subgraph(off_diagonal)
    closing = {node for node in off_diagonal if any(t in diagonal for t in graph.successors(node))}
    for start in sorted(diagonal, key=symbol_name):
        for following in sorted(graph.successors(start), key=symbol_name):
            if following in diagonal:
                continue
            path = shortest_path(inner, following, closing)
            if path is None:
                continue
            end = min((t for t in graph.successors(path[-1]) if t in diagonal), key=symbol_name)
            full = [start] + path + [end]
            witness = (tuple(pair[0] for pair in full), tuple(pair[1] for pair in full))
            return CheckResult(False, witness, f"diamond {word_name(witness[0])} / {word_name(witness[1])}")
    return CheckResult(True)


@lru_cache(maxsize=64)
def _extendable(code: OneBlockCode) -> Tuple[frozenset, frozenset]:
    graph = pair_graph(code)
    return frozenset(reachable_from_cycles(graph)), frozenset(reaching_cycles(graph))


def _as_word(word, start_index: int = 0) -> Word:
    return word if isinstance(word, Word) else Word(tuple(word), start_index)


def words_related(code: OneBlockCode, w, w_prime) -> bool:
    """True iff points s, s' with equal image carry w and w' on the same coordinates."""
    first, second = _as_word(w), _as_word(w_prime)
    if len(first) != len(second) or first.start_index != second.start_index:
        raise WindowMismatch(
            f"Words {first} and {second} sit on different windows "
            f"[{first.start_index},{first.end_index}] and [{second.start_index},{second.end_index}]"
        )
    if not first.symbols:
        return True
    if code.letters_of(first.symbols) != code.letters_of(second.symbols):
        return False
    graph = pair_graph(code)
    pairs = list(zip(first.symbols, second.symbols))
    if any(pair not in graph for pair in pairs):
        return False
    if any(not graph.has_edge(a, b) for a, b in zip(pairs, pairs[1:])):
        return False
    from_past, to_future = _extendable(code)
    return pairs[0] in from_past and pairs[-1] in to_future


def words_with_labels(code: OneBlockCode, letters: Sequence[Symbol], after: Optional[Symbol] = None) -> List[Tuple]:
    if not letters:
        return [()]
    if after is None:
        frontier = [(s,) for s in code.domain.symbols if code.label[s] == letters[0]]
    else:
        frontier = [(s,) for s in code.domain.successors(after) if code.label[s] == letters[0]]
    for letter in letters[1:]:
        frontier = [
            word + (t,) for word in frontier for t in code.domain.successors(word[-1]) if code.label[t] == letter
        ]
    return sorted(frontier, key=_word_key)


def _is_transitive(code: OneBlockCode, words: List[Tuple]) -> Optional[Tuple[Tuple, Tuple, Tuple]]:
    groups: Dict[Tuple, List[Tuple]] = {}
    for word in words:
        groups.setdefault(code.letters_of(word), []).append(word)
    for group in groups.values():
        related = {
            (a, b): words_related(code, a, b) for a in group for b in group
        }
        for a in group:
            for b in group:
                if not related[(a, b)]:
                    continue
                for c in group:
                    if related[(b, c)] and not related[(a, c)]:
                        return a, b, c
    return None


def default_k_cap(code: OneBlockCode) -> int:
    return max(1, pair_graph(code).number_of_nodes() ** 2)


def magic_constant(code: OneBlockCode, cap: Optional[int] = None, log: LogFn = quiet_log) -> int:
    """Least K for which relatedness of length-K words is transitive."""
    if not finite_to_one_check(code).holds:
        raise NotFiniteToOne(f"Code '{code.name}' is infinite-to-one")
    limit = cap if cap is not None else default_k_cap(code)
    for length in range(1, limit + 1):
        failure = _is_transitive(code, enumerate_words(code.domain, length))
        if failure is None:
            log("INFO", f"Relatedness of '{code.name}' is transitive at K={length}")
            return length
        log("INFO", f"K={length} fails on {' / '.join(word_name(w) for w in failure)}")
    raise CapExceeded(f"No magic constant for '{code.name}' up to K={limit}", cap=limit)


@dataclass(frozen=True)
class RelatedWordFamily:
    m: int
    n: int
    seed: Word
    members: Tuple[Word, ...]
    degrees_by_column: Dict[int, int]

    @property
    def degree(self) -> int:
        return min(self.degrees_by_column.values())

    @property
    def minimal_column(self) -> int:
        return min(column for column, count in sorted(self.degrees_by_column.items()) if count == self.degree)

    def column(self, j: int) -> Tuple[Symbol, ...]:
        return tuple(sorted({member.at(j) for member in self.members}, key=symbol_name))

    def centered(self) -> "RelatedWordFamily":
        offset = self.minimal_column
        if offset == 0:
            return self

        def moved(word: Word) -> Word:
            return Word(word.symbols, word.start_index - offset)

        degrees = {column - offset: count for column, count in self.degrees_by_column.items()}
        return replace(
            self,
            m=self.m - offset,
            n=self.n - offset,
            seed=moved(self.seed),
            members=tuple(moved(member) for member in self.members),
            degrees_by_column=degrees,
        )

    def __str__(self) -> str:
        words = ", ".join(str(member) for member in self.members)
        return f"[{self.m},{self.n}] seed={self.seed} degree={self.degree} members={{{words}}}"


def related_family(code: OneBlockCode, w, m: int, n: int, k: Optional[int] = None) -> RelatedWordFamily:
    magic = k if k is not None else magic_constant(code)
    if m > -magic or n < magic:
        raise WindowTooSmall(f"Window [{m},{n}] must contain [-{magic},{magic}]", witness=(m, n, magic))
    seed = _as_word(w, m)
    if seed.start_index != m or len(seed) != n - m + 1:
        raise WindowMismatch(f"Seed {seed} does not fill the window [{m},{n}]")
    if not is_word(code.domain, seed):
        raise ValueError(f"Seed {seed} is not a word of '{code.domain.name}'")
    members = tuple(
        Word(candidate, m)
        for candidate in words_with_labels(code, code.letters_of(seed.symbols))
        if words_related(code, seed, Word(candidate, m))
    )
    for a in members:
        for b in members:
            if not words_related(code, a, b):
                raise WindowTooSmall(
                    f"Family of {seed} is not pairwise related ({a} / {b}); widen the window", witness=(a, b)
                )
    degrees = {j: len({member.at(j) for member in members}) for j in range(m, n + 1)}
    return RelatedWordFamily(m, n, seed, members, degrees)


def degree(code: OneBlockCode, k: Optional[int] = None, log: LogFn = quiet_log) -> Tuple[int, RelatedWordFamily]:
    """Minimal family degree over all seeds on the window [-K, K]."""
    magic = k if k is not None else magic_constant(code, log=log)
    best: Optional[RelatedWordFamily] = None
    seen: Set[Tuple] = set()
    for seed in enumerate_words(code.domain, 2 * magic + 1):
        if seed in seen:
            continue
        family = related_family(code, Word(seed, -magic), -magic, magic, magic)
        seen.update(member.symbols for member in family.members)
        if best is None or family.degree < best.degree:
            best = family
    log("INFO", f"Degree of '{code.name}': d={best.degree} from seed {best.seed}")
    return best.degree, best


@dataclass(frozen=True)
class ConnectingWord:
    u: Tuple[Symbol, ...]
    first: Word
    second: Word


def connecting_word(code: OneBlockCode, family: RelatedWordFamily) -> ConnectingWord:
    domain = code.domain
    starts = {member.symbols[0] for member in family.members}
    targets = {s for s in domain.symbols if any(domain.allows(s, start) for start in starts)}
    best: Optional[ConnectingWord] = None
    for first in family.members:
        path = shortest_path(domain.graph, first.symbols[-1], targets)
        if path is None:
            continue
        u = tuple(path[1:])
        second = next(member for member in family.members if domain.allows(path[-1], member.symbols[0]))
        candidate = ConnectingWord(u, first, second)
        if best is None or (len(u), _word_key(u)) < (len(best.u), _word_key(best.u)):
            best = candidate
    if best is None:
        raise NotPermutation(f"No word connects members of the family of {family.seed}")
    return best


def magic_permutation(code: OneBlockCode, family: RelatedWordFamily, u: Sequence[Symbol]) -> Dict[Symbol, Symbol]:
    """Permutation of the column-0 symbols read across first + u1 + second, u1 related to u."""
    family = family.centered()
    u = tuple(u)
    column = -family.m
    symbols = family.column(0)
    domain = code.domain
    readings: Dict[Symbol, Set[Tuple[Tuple[Symbol, ...], Symbol]]] = {s: set() for s in symbols}
    for first in family.members:
        if u:
            bridges = [
                bridge
                for bridge in words_with_labels(code, code.letters_of(u), after=first.symbols[-1])
                if words_related(code, u, bridge)
            ]
        else:
            bridges = [()]
        for bridge in bridges:
            last = bridge[-1] if bridge else first.symbols[-1]
            for second in family.members:
                if not domain.allows(last, second.symbols[0]):
                    continue
                between = first.symbols[column + 1:] + bridge + second.symbols[:column]
                readings[first.symbols[column]].add((between, second.symbols[column]))

    permutation: Dict[Symbol, Symbol] = {}
    for symbol in symbols:
        targets = {far for _, far in readings[symbol]}
        if len(targets) != 1:
            raise NotPermutation(
                f"Column symbol {symbol_name(symbol)} continues to {len(targets)} symbols across u={word_name(u)}",
                witness=(symbol, tuple(sorted(targets, key=symbol_name))),
            )
        middles = {between for between, _ in readings[symbol]}
        if len(middles) != 1:
            raise NonUniqueV(
                f"Column symbol {symbol_name(symbol)} is joined by {len(middles)} different words",
                witness=(symbol, tuple(sorted(middles, key=_word_key))),
            )
        permutation[symbol] = targets.pop()
    if sorted(permutation.values(), key=symbol_name) != list(symbols):
        raise NotPermutation(f"Column map {permutation} is not a bijection", witness=permutation)
    return permutation


@dataclass(frozen=True)
class MagicData:
    K: int
    d: int
    D: int
    permutation: Dict[Symbol, Symbol]
    period_cap: int
    family: RelatedWordFamily
    connecting: ConnectingWord

    def summary(self) -> str:
        return f"K={self.K} d={self.d} D={self.D} (P={self.period_cap})"


def minimal_preimage_count(code: OneBlockCode, period_cap: int = 8) -> Tuple[int, RayPoint]:
    best: Optional[Tuple[int, RayPoint]] = None
    for point in image_periodic_points(code, period_cap):
        count = preimage_count(code, point)
        if best is None or count < best[0]:
            best = (count, point)
    if best is None:
        raise Mismatch(f"Image of '{code.name}' has no periodic point of period <= {period_cap}")
    return best


def verify_d_equals_D(
    code: OneBlockCode, period_cap: int = 8, k_cap: Optional[int] = None, log: LogFn = quiet_log
) -> MagicData:
    if not finite_to_one_check(code).holds:
        raise NotFiniteToOne(f"Code '{code.name}' is infinite-to-one")
    magic = magic_constant(code, cap=k_cap, log=log)
    d, family = degree(code, magic, log=log)
    D, sample = minimal_preimage_count(code, period_cap)
    if d != D:
        raise Mismatch(
            f"Degree d={d} but minimal periodic preimage count D={D} at P={period_cap} (attained at {sample})",
            witness=(d, D),
        )
    centered = family.centered()
    connecting = connecting_word(code, centered)
    permutation = magic_permutation(code, centered, connecting.u)
    log("INFO", f"Magic data for '{code.name}': K={magic} d={d} D={D}")
    return MagicData(magic, d, D, permutation, period_cap, centered, connecting)


def stable_collision(code: OneBlockCode) -> Optional[Tuple[RayPoint, RayPoint]]:
    """Distinct points with equal image that agree from some coordinate on, if any.

    The pair differs at coordinate 0 and agrees on every positive coordinate.
    """
    relation = pair_relation(code).sft
    diagonal_nodes = [pair for pair in relation.symbols if pair[0] == pair[1]]
    diagonal = nx.DiGraph(relation.graph.subgraph(diagonal_nodes))
    settles = reaching_cycles(diagonal)
    for pair in relation.symbols:
        if pair[0] == pair[1]:
            continue
        landing = [h for h in relation.successors(pair) if h in settles]
        if not landing:
            continue
        cycle, history = path_from_cycle(relation.graph, pair)
        tail, right_cycle = path_into_cycle(diagonal, landing[0])
        point = RayPoint(tuple(cycle), tuple(history) + tuple(tail[:-1]), tuple(right_cycle), len(history) - 1)
        return point.map(lambda p: p[0]).canonical(), point.map(lambda p: p[1]).canonical()
    return None
