from collections import deque
from typing import Hashable, List, Optional, Set, Tuple

import networkx as nx

from .models import RayPoint, symbol_name

Node = Hashable


def _ordered(nodes) -> List[Node]:
    return sorted(nodes, key=symbol_name)


def recurrent_nodes(graph: nx.DiGraph) -> Set[Node]:
    found: Set[Node] = set()
    for component in nx.strongly_connected_components(graph):
        node = next(iter(component))
        if len(component) > 1 or graph.has_edge(node, node):
            found |= component
    return found


def reachable_from_cycles(graph: nx.DiGraph) -> Set[Node]:
    recurrent = recurrent_nodes(graph)
    found = set(recurrent)
    for node in recurrent:
        found |= nx.descendants(graph, node)
    return found


def reaching_cycles(graph: nx.DiGraph) -> Set[Node]:
    recurrent = recurrent_nodes(graph)
    found = set(recurrent)
    for node in recurrent:
        found |= nx.ancestors(graph, node)
    return found


def shortest_path(graph: nx.DiGraph, start: Node, targets: Set[Node], reverse: bool = False) -> Optional[List[Node]]:
    """Breadth-first path from ``start`` to the nearest node of ``targets``.

    With ``reverse`` the search walks edges backwards; the path is still
    returned in edge order, so it ends at ``start``.
    """
    parents = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if node in targets:
            path = [node]
            while parents[path[-1]] is not None:
                path.append(parents[path[-1]])
            return path if reverse else list(reversed(path))
        neighbours = graph.predecessors(node) if reverse else graph.successors(node)
        for following in _ordered(neighbours):
            if following not in parents:
                parents[following] = node
                queue.append(following)
    return None


def cycle_through(graph: nx.DiGraph, node: Node) -> List[Node]:
    if graph.has_edge(node, node):
        return [node]
    best: Optional[List[Node]] = None
    for following in _ordered(graph.successors(node)):
        back = shortest_path(graph, following, {node})
        if back is not None and (best is None or len(back) < len(best)):
            best = back
    if best is None:
        raise ValueError(f"{symbol_name(node)} lies on no cycle")
    return [node] + best[:-1]


def path_into_cycle(graph: nx.DiGraph, start: Node) -> Tuple[List[Node], List[Node]]:
    path = shortest_path(graph, start, recurrent_nodes(graph))
    if path is None:
        raise ValueError(f"{symbol_name(start)} reaches no cycle")
    return path, cycle_through(graph, path[-1])


def path_from_cycle(graph: nx.DiGraph, end: Node) -> Tuple[List[Node], List[Node]]:
    """A cycle and a path from its first node (inclusive) to ``end``.

    The cycle is rotated so that its last node is a predecessor of the path's first node.
    """
    path = shortest_path(graph, end, recurrent_nodes(graph), reverse=True)
    if path is None:
        raise ValueError(f"{symbol_name(end)} is reached from no cycle")
    cycle = cycle_through(graph, path[0])
    return cycle, path


def bi_infinite_point(graph: nx.DiGraph, node: Node) -> RayPoint:
    cycle, history = path_from_cycle(graph, node)
    tail, right_cycle = path_into_cycle(graph, node)
    body = tuple(history[:-1]) + tuple(tail[:-1])
    return RayPoint(tuple(cycle), body, tuple(right_cycle), len(history) - 1)
