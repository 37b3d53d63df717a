"""Spectral decomposition of one-step SFTs.

Irreducible pieces are the strongly connected components carrying an edge.
Entropy is the log of the Perron radius, found by power iteration on A + I so
the iteration also converges on periodic components.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

import networkx as nx
import numpy as np

from .errors import AmbiguousComponent, EmptyShift, InfiniteFiber, NotInImage
from .graphs import reachable_from_cycles, reaching_cycles, recurrent_nodes
from .models import OneBlockCode, OneStepSft, RayPoint, Symbol, sort_symbols, symbol_name
from .shift import enumerate_words
from .utils import LogFn, quiet_log

ENTROPY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ChainComponent:
    name: str
    symbols: Tuple[Symbol, ...]
    sft: OneStepSft
    entropy: float
    period: int

    def __str__(self) -> str:
        return f"{self.name}: symbols={len(self.symbols)} entropy={self.entropy:.9f} period={self.period}"


def perron_radius(matrix: np.ndarray, tolerance: float = 1e-12, max_iterations: int = 200000) -> float:
    """Spectral radius of a nonnegative irreducible matrix.

    Collatz-Wielandt bounds min(Ax/x) <= r <= max(Ax/x) bracket the answer at
    every step; iteration stops once the bracket is narrower than ``tolerance``.
    """
    size = matrix.shape[0]
    if size == 0:
        return 0.0
    shifted = matrix.astype(float) + np.eye(size)
    vector = np.ones(size)
    low, high = 0.0, float(shifted.sum(axis=1).max())
    for _ in range(max_iterations):
        image = shifted @ vector
        ratios = image / vector
        low, high = float(ratios.min()), float(ratios.max())
        if high - low <= tolerance:
            break
        vector = image / np.linalg.norm(image)
    return (low + high) / 2.0 - 1.0


def entropy(system) -> float:
    if isinstance(system, ChainComponent):
        return system.entropy
    radius = perron_radius(system.adjacency())
    if radius <= 1.0 + ENTROPY_TOLERANCE:
        return 0.0
    return math.log(radius)


def component_period(sft: OneStepSft) -> int:
    base = sft.symbols[0]
    levels = nx.single_source_shortest_path_length(sft.graph, base)
    period = 0
    for source, target in sft.transitions:
        period = math.gcd(period, abs(levels[source] + 1 - levels[target]))
    return period or 1


def chain_components(sft: OneStepSft, log: LogFn = quiet_log) -> List[ChainComponent]:
    components: List[ChainComponent] = []
    recurrent = recurrent_nodes(sft.graph)
    for members in nx.strongly_connected_components(sft.graph):
        if not members <= recurrent:
            continue
        symbols = sort_symbols(members)
        name = f"{sft.name}:{symbol_name(symbols[0])}"
        piece = sft.restrict(symbols, name=name)
        components.append(ChainComponent(name, symbols, piece, entropy(piece), component_period(piece)))
    components.sort(key=lambda component: (-component.entropy, component.name))
    for component in components:
        log("INFO", f"Component {component}")
    return components


@dataclass(frozen=True)
class MaxEntropySelection:
    components: Tuple[ChainComponent, ...]
    ambiguous: bool

    @property
    def entropy(self) -> float:
        return self.components[0].entropy

    def select(self, strict: bool = True) -> ChainComponent:
        if self.ambiguous and strict:
            names = ", ".join(component.name for component in self.components)
            raise AmbiguousComponent(
                f"Maximal entropy {self.entropy:.9f} is shared by {names}", witness=self.components
            )
        return self.components[0]


def max_entropy_component(sft: OneStepSft, tie_band: float = 1e-7, log: LogFn = quiet_log) -> MaxEntropySelection:
    components = chain_components(sft, log=log)
    if not components:
        raise EmptyShift(f"System '{sft.name}' has no cycle, so its shift is empty", witness=sft.name)
    best = components[0].entropy
    leaders = tuple(component for component in components if best - component.entropy <= tie_band)
    if len(leaders) > 1:
        log("WARN", f"{len(leaders)} components of '{sft.name}' tie at entropy {best:.9f}", force=True)
    return MaxEntropySelection(leaders, len(leaders) > 1)


def restrict_to_max_entropy(code: OneBlockCode, tie_band: float = 1e-7, strict: bool = True) -> OneBlockCode:
    component = max_entropy_component(code.domain, tie_band).select(strict)
    return code.restrict(component.sft)


def periodic_points(sft: OneStepSft, n: int) -> List[RayPoint]:
    if n < 1:
        raise ValueError(f"Period must be positive, got {n}")
    points: List[RayPoint] = []

    def extend(walk: List[Symbol]) -> None:
        if len(walk) == n:
            if sft.allows(walk[-1], walk[0]):
                points.append(RayPoint.periodic(walk))
            return
        for following in sft.successors(walk[-1]):
            walk.append(following)
            extend(walk)
            walk.pop()

    for start in sft.symbols:
        extend([start])
    points.sort(key=lambda point: tuple(symbol_name(s) for s in point.window(0, n - 1)))
    return points


def trace_count(sft: OneStepSft, n: int) -> int:
    return int(np.trace(np.linalg.matrix_power(sft.adjacency(), n)))


def _fibred_graph(code: OneBlockCode, letters: Tuple[Symbol, ...]) -> nx.DiGraph:
    period = len(letters)
    graph = nx.DiGraph()
    for phase, letter in enumerate(letters):
        for symbol in code.domain.symbols:
            if code.label[symbol] != letter:
                continue
            graph.add_node((symbol, phase))
            following_letter = letters[(phase + 1) % period]
            for following in code.domain.successors(symbol):
                if code.label[following] == following_letter:
                    graph.add_edge((symbol, phase), (following, (phase + 1) % period))
    alive = reachable_from_cycles(graph) & reaching_cycles(graph)
    return graph.subgraph(alive).copy()


def preimages(code: OneBlockCode, y: RayPoint) -> List[RayPoint]:
    if not y.is_periodic:
        raise NotInImage(f"{y} is not periodic")
    letters = y.window(0, y.period - 1)
    graph = _fibred_graph(code, letters)
    if graph.number_of_nodes() == 0:
        raise NotInImage(f"{y} has no preimage under '{code.name}'", witness=y)
    for node in sorted(graph.nodes, key=symbol_name):
        if graph.out_degree(node) > 1 or graph.in_degree(node) > 1:
            raise InfiniteFiber(
                f"{y} has infinitely many preimages under '{code.name}' (branching at {symbol_name(node[0])})",
                witness=node,
            )
    found: Dict[RayPoint, None] = {}
    for node in sorted(graph.nodes, key=symbol_name):
        if node[1] != 0:
            continue
        cycle = [node[0]]
        cursor = next(iter(graph.successors(node)))
        while cursor != node:
            cycle.append(cursor[0])
            cursor = next(iter(graph.successors(cursor)))
        found[RayPoint.periodic(cycle)] = None
    return list(found)


def preimage_count(code: OneBlockCode, y: RayPoint) -> int:
    return len(preimages(code, y))


def image_periodic_points(code: OneBlockCode, max_period: int) -> List[RayPoint]:
    found: Dict[RayPoint, None] = {}
    for n in range(1, max_period + 1):
        for word in enumerate_words(code, n):
            point = RayPoint.periodic(word)
            if point.period != n or point in found:
                continue
            try:
                preimages(code, point)
            except NotInImage:
                continue
            except InfiniteFiber:
                pass
            found[point] = None
    return sorted(found, key=_periodic_key)


def _periodic_key(point: RayPoint) -> Tuple[int, Tuple[str, ...]]:
    return point.period, tuple(symbol_name(s) for s in point.window(0, point.period - 1))
