"""Fiber products, the minimal u-resolving lift and the commuting lift square."""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import networkx as nx

from .cover import build_cover
from .degree import degree, finite_to_one_check
from .errors import (
    AlphabetMismatch,
    EmptyFiber,
    EmptyShift,
    HypothesisFailed,
    InvalidSystem,
    Mismatch,
    NonConstant,
    NotFiniteToOne,
    NotResolving,
    Rho1NotInjective,
)
from .graphs import bi_infinite_point, reachable_from_cycles, reaching_cycles
from .models import CheckResult, OneBlockCode, OneStepSft, Symbol, symbol_name, word_name
from .relations import fischer_cover, pair_graph, pair_relation, quotient_presentation, resolving_check
from .shift import allowed_blocks, compose_codes, enumerate_words, image_equal, recode_one_block, trim_essential
from .spectral import image_periodic_points, max_entropy_component, preimage_count
from .utils import LogFn, Settings, quiet_log


@dataclass(frozen=True)
class FiberProduct:
    sft: OneStepSft
    proj_a: OneBlockCode
    proj_b: OneBlockCode

    def restrict(self, sft: OneStepSft) -> "FiberProduct":
        return FiberProduct(sft, self.proj_a.restrict(sft), self.proj_b.restrict(sft))


def fiber_product(code_a: OneBlockCode, code_b: OneBlockCode, name: Optional[str] = None) -> FiberProduct:
    name = name or f"{code_a.name}x{code_b.name}"
    symbols = [
        (x, z) for x in code_a.domain.symbols for z in code_b.domain.symbols if code_a.label[x] == code_b.label[z]
    ]
    present = set(symbols)
    transitions = [
        ((x, z), (x_next, z_next))
        for x, z in symbols
        for x_next in code_a.domain.successors(x)
        for z_next in code_b.domain.successors(z)
        if (x_next, z_next) in present
    ]
    try:
        sft = trim_essential(OneStepSft.build(name, symbols, transitions))
    except EmptyShift:
        raise EmptyFiber(f"Fiber product of '{code_a.name}' and '{code_b.name}' is empty") from None
    proj_a = OneBlockCode(f"p1({name})", sft, {pair: pair[0] for pair in sft.symbols}, code_a.domain.symbols)
    proj_b = OneBlockCode(f"p2({name})", sft, {pair: pair[1] for pair in sft.symbols}, code_b.domain.symbols)
    return FiberProduct(sft, proj_a, proj_b)


def injectivity_check(code: OneBlockCode) -> CheckResult:
    relation = pair_relation(code).sft
    for pair in relation.symbols:
        if pair[0] != pair[1]:
            point = bi_infinite_point(relation.graph, pair)
            witness = (point.map(lambda p: p[0]).canonical(), point.map(lambda p: p[1]).canonical())
            return CheckResult(False, witness, f"pair {symbol_name(pair)} lies on a bi-infinite path")
    return CheckResult(True)


def image_is_sft(code: OneBlockCode, cap: int = 4096) -> bool:
    return injectivity_check(fischer_cover(code, cap)).holds


def _longest_runs(graph: nx.DiGraph, infinite: set, reverse: bool) -> Dict[Any, float]:
    finite = graph.subgraph(node for node in graph.nodes if node not in infinite)
    order = list(nx.topological_sort(finite))
    if reverse:
        order.reverse()
    runs: Dict[Any, float] = {node: math.inf for node in infinite}
    for node in order:
        neighbours = graph.successors(node) if reverse else graph.predecessors(node)
        runs[node] = 1 + max((runs[other] for other in neighbours), default=0)
    return runs


def inverse_window(code: OneBlockCode) -> int:
    graph = pair_graph(code)
    backward = _longest_runs(graph, reachable_from_cycles(graph), reverse=False)
    forward = _longest_runs(graph, reaching_cycles(graph), reverse=True)
    window = 0
    for pair in sorted(graph.nodes, key=symbol_name):
        if pair[0] == pair[1]:
            continue
        reach = min(backward[pair], forward[pair])
        if reach == math.inf:
            raise Rho1NotInjective(
                f"Code '{code.name}' identifies distinct points through {symbol_name(pair)}", witness=pair
            )
        window = max(window, int(reach))
    return window


TAGS = ("u_resolving", "s_resolving", "finite_to_one", "injective", "surjective")


@dataclass(frozen=True)
class Arrow:
    name: str
    code: OneBlockCode
    source: str
    target: str
    tags: Tuple[str, ...] = ()


@dataclass
class FiberDiagram:
    """Named systems and codes between them, with paths that are expected to agree.

    A node maps to its SFT, or to None for a sofic image known only through its letters.
    """

    name: str
    nodes: Dict[str, Optional[OneStepSft]] = field(default_factory=dict)
    arrows: Dict[str, Arrow] = field(default_factory=dict)
    paths: List[Tuple[str, ...]] = field(default_factory=list)
    failures: List[Tuple[str, Any]] = field(default_factory=list)

    def add_node(self, name: str, sft: Optional[OneStepSft] = None) -> None:
        self.nodes[name] = sft

    def add_arrow(self, name: str, code: OneBlockCode, source: str, target: str, tags: Sequence[str] = ()) -> None:
        for end in (source, target):
            if end not in self.nodes:
                raise InvalidSystem(f"Arrow '{name}' of diagram '{self.name}' uses undeclared node '{end}'")
        unknown = [tag for tag in tags if tag not in TAGS]
        if unknown:
            raise InvalidSystem(f"Arrow '{name}' has unknown tag '{unknown[0]}'")
        self.arrows[name] = Arrow(name, code, source, target, tuple(tags))

    def add_path(self, *arrow_names: str) -> None:
        self.composite(arrow_names)
        self.paths.append(tuple(arrow_names))

    def composite(self, arrow_names: Sequence[str]) -> OneBlockCode:
        if not arrow_names:
            raise InvalidSystem(f"Diagram '{self.name}' has an empty path")
        missing = [name for name in arrow_names if name not in self.arrows]
        if missing:
            raise InvalidSystem(f"Diagram '{self.name}' has no arrow '{missing[0]}'")
        arrows = [self.arrows[name] for name in arrow_names]
        for first, second in zip(arrows, arrows[1:]):
            if first.target != second.source:
                raise AlphabetMismatch(
                    f"Arrow '{first.name}' ends at '{first.target}' but '{second.name}' starts at '{second.source}'"
                )
        code = arrows[0].code
        for arrow in arrows[1:]:
            code = compose_codes(code, arrow.code, name=f"{code.name}.{arrow.name}")
        return code

    def verify_tags(self) -> List[Tuple[str, Any]]:
        failures: List[Tuple[str, Any]] = []
        for arrow in sorted(self.arrows.values(), key=lambda item: item.name):
            for tag in arrow.tags:
                result = check_tag(arrow, tag, self.nodes.get(arrow.target))
                if not result.holds:
                    failures.append((f"{arrow.name}:{tag}", result.witness))
        return failures

    @property
    def verified(self) -> bool:
        return not self.failures


def check_tag(arrow: Arrow, tag: str, target: Optional[OneStepSft] = None) -> CheckResult:
    code = arrow.code
    if tag == "u_resolving":
        return resolving_check(code, "u")
    if tag == "s_resolving":
        return resolving_check(code, "s")
    if tag == "finite_to_one":
        return finite_to_one_check(code)
    if tag == "injective":
        return injectivity_check(code)
    if tag == "surjective":
        if target is None:
            return CheckResult(True)
        return CheckResult(image_equal(code, OneBlockCode.identity(target)))
    raise ValueError(f"Unknown tag '{tag}'")


def commuting_check(diagram: FiberDiagram, max_length: int = 12) -> CheckResult:
    """All declared paths give the same code, symbol by symbol and on every word up to ``max_length``."""
    if len(diagram.paths) < 2:
        return CheckResult(True, detail="fewer than two paths")
    composites = [(path, diagram.composite(path)) for path in diagram.paths]
    reference_path, reference = composites[0]
    for path, code in composites[1:]:
        if code.domain != reference.domain:
            raise AlphabetMismatch(
                f"Paths {' '.join(reference_path)} and {' '.join(path)} start from different systems"
            )
        for symbol in reference.domain.symbols:
            if reference.label[symbol] != code.label[symbol]:
                witness = (reference_path, path, (symbol,), (reference.label[symbol],), (code.label[symbol],))
                return CheckResult(False, witness, f"symbol {symbol_name(symbol)}")
    checked = 0
    for length in range(1, max_length + 1):
        for word in enumerate_words(reference.domain, length):
            expected = reference.letters_of(word)
            for path, code in composites[1:]:
                if code.letters_of(word) != expected:
                    witness = (reference_path, path, word, expected, code.letters_of(word))
                    return CheckResult(False, witness, f"word {word_name(word)}")
            checked += 1
    return CheckResult(True, detail=f"words={checked} L={max_length}")


@dataclass(frozen=True)
class MinimalLift:
    alpha: OneBlockCode
    cover: OneBlockCode
    beta: OneBlockCode
    conjugacy: OneBlockCode
    fiber: FiberProduct
    window: int

    def diagram(self) -> FiberDiagram:
        diagram = FiberDiagram(f"minlift({self.alpha.name})")
        diagram.add_node("recoded", self.beta.domain)
        diagram.add_node("X", self.alpha.domain)
        diagram.add_node("cover", self.cover.domain)
        diagram.add_node("Y")
        diagram.add_arrow("conj", self.conjugacy, "recoded", "X")
        diagram.add_arrow("alpha", self.alpha, "X", "Y", ("u_resolving",))
        diagram.add_arrow("beta", self.beta, "recoded", "cover")
        diagram.add_arrow("pi", self.cover, "cover", "Y", ("u_resolving",))
        diagram.add_path("conj", "alpha")
        diagram.add_path("beta", "pi")
        return diagram


def minimal_lift(
    alpha: OneBlockCode, cover: OneBlockCode, tie_band: float = 1e-7, log: LogFn = quiet_log
) -> MinimalLift:
    """Factor a u-resolving alpha through the canonical extension ``cover`` of its image."""
    resolving = resolving_check(alpha, "u")
    if not resolving.holds:
        raise NotResolving(f"Code '{alpha.name}' is not u-resolving", witness=resolving.witness)
    product = fiber_product(alpha, cover)
    component = max_entropy_component(product.sft, tie_band, log=log).select(strict=True)
    fiber = product.restrict(component.sft)
    injective = injectivity_check(fiber.proj_a)
    if not injective.holds:
        raise Rho1NotInjective(
            f"Projection of '{product.sft.name}' onto '{alpha.domain.name}' is not injective",
            witness=injective.witness,
        )
    window = inverse_window(fiber.proj_a)
    log("INFO", f"Inverse window of the first projection: {window}")
    middles: Dict[Tuple[Symbol, ...], set] = {}
    for path in allowed_blocks(fiber.sft, 2 * window + 1):
        middles.setdefault(fiber.proj_a.letters_of(path), set()).add(path[window])
    block_map: Dict[Tuple[Symbol, ...], Symbol] = {}
    for block, candidates in middles.items():
        if len(candidates) != 1:
            raise Rho1NotInjective(f"Block {word_name(block)} has {len(candidates)} lifts", witness=block)
        block_map[block] = fiber.proj_b.label[next(iter(candidates))]
    recoded = recode_one_block(
        alpha.domain,
        block_map,
        memory=window,
        anticipation=window,
        name=f"beta({alpha.name})",
        target_alphabet=cover.domain.symbols,
    )
    lift = MinimalLift(alpha, cover, recoded.code, recoded.conjugacy, fiber, window)
    for symbol in recoded.code.domain.symbols:
        left = alpha.label[recoded.conjugacy.label[symbol]]
        right = cover.label[recoded.code.label[symbol]]
        if left != right:
            raise Mismatch(
                f"alpha and the cover disagree over {symbol_name(symbol)}: {symbol_name(left)} != {symbol_name(right)}",
                witness=symbol,
            )
    return lift


def constant_to_one_check(code: OneBlockCode, period_cap: int = 8, log: LogFn = quiet_log) -> int:
    for direction in ("u", "s"):
        result = resolving_check(code, direction)
        if not result.holds:
            raise HypothesisFailed(f"Code '{code.name}' is not {direction}-resolving", witness=result.witness)
    if not image_is_sft(code):
        raise HypothesisFailed(f"Image of '{code.name}' is not of finite type")
    first: Optional[Tuple[Any, int]] = None
    for point in image_periodic_points(code, period_cap):
        count = preimage_count(code, point)
        if first is None:
            first = (point, count)
        elif count != first[1]:
            raise NonConstant(
                f"{first[0]} has {first[1]} preimages but {point} has {count}", witness=(first, (point, count))
            )
    if first is None:
        raise NonConstant(f"Image of '{code.name}' has no periodic point of period <= {period_cap}")
    d, _ = degree(code, log=log)
    if d != first[1]:
        raise Mismatch(f"Constant preimage count {first[1]} differs from degree {d}", witness=(first[1], d))
    return first[1]


def _identify(name: str, sft: OneStepSft, label: Dict[Symbol, Symbol]) -> OneStepSft:
    transitions = {(label[a], label[b]) for a, b in sft.transitions}
    return trim_essential(OneStepSft.build(name, set(label.values()), transitions))


def lift_diagram(pi: OneBlockCode, settings: Optional[Settings] = None, log: LogFn = quiet_log) -> FiberDiagram:
    """Square lifting a finite-to-one pi to an s-resolving top map over u-resolving verticals.

    Nodes: X (domain of pi), Y (its image), Yt (theta quotient of the canonical cover,
    cut to its maximal-entropy component), G (maximal-entropy component of the fiber
    product of pi with the vertical beta) and Xt (the image of G under tau).
    """
    settings = settings or Settings()
    check = finite_to_one_check(pi)
    if not check.holds:
        raise NotFiniteToOne(f"Code '{pi.name}' is infinite-to-one", witness=check.witness)
    cover = build_cover(pi, settings.subset_cap, log=log)
    quotient = quotient_presentation(cover, "theta", log=log)
    beta = quotient.max_entropy_code(settings.tie_band)
    product = fiber_product(pi, beta, name=f"G0({pi.name})")
    component = max_entropy_component(product.sft, settings.tie_band, log=log).select(strict=True)
    g = product.restrict(component.sft)

    nu = OneBlockCode.identity(pi.domain)
    tau_label = {pair: (nu.label[pair[0]], pair[1]) for pair in g.sft.symbols}
    x_tilde = _identify(f"Xt({pi.name})", g.sft, tau_label)
    tau = OneBlockCode(f"tau({pi.name})", g.sft, tau_label, x_tilde.symbols)
    gamma = OneBlockCode(f"gamma({pi.name})", x_tilde, {s: s[0] for s in x_tilde.symbols}, pi.domain.symbols)
    pi_tilde = OneBlockCode(f"pit({pi.name})", x_tilde, {s: s[1] for s in x_tilde.symbols}, beta.domain.symbols)

    diagram = FiberDiagram(f"lift({pi.name})")
    diagram.add_node("X", pi.domain)
    diagram.add_node("Y")
    diagram.add_node("Yt", beta.domain)
    diagram.add_node("G", g.sft)
    diagram.add_node("Xt", x_tilde)
    diagram.add_arrow("pi", pi, "X", "Y", ("finite_to_one",))
    diagram.add_arrow("beta", beta, "Yt", "Y", ("u_resolving", "finite_to_one"))
    diagram.add_arrow("pi1", g.proj_a, "G", "X", ("u_resolving",))
    diagram.add_arrow("pi2", g.proj_b, "G", "Yt", ("s_resolving",))
    diagram.add_arrow("tau", tau, "G", "Xt", ("s_resolving", "surjective"))
    diagram.add_arrow("gamma", gamma, "Xt", "X", ("u_resolving",))
    diagram.add_arrow("pit", pi_tilde, "Xt", "Yt", ("s_resolving",))
    diagram.add_path("tau", "gamma", "pi")
    diagram.add_path("tau", "pit", "beta")
    diagram.add_path("pi1", "pi")
    diagram.add_path("pi2", "beta")

    diagram.failures.extend(diagram.verify_tags())
    commuting = commuting_check(diagram, settings.word_cap)
    if not commuting.holds:
        diagram.failures.append(("commute", commuting.witness))
    for label, witness in diagram.failures:
        log("WARN", f"Lift of '{pi.name}' fails {label}: {witness}", force=True)
    return diagram


def lift_summary(diagram: FiberDiagram) -> Dict[str, str]:
    return {
        node: str(len(sft.symbols)) if sft is not None else "image"
        for node, sft in diagram.nodes.items()
    }
