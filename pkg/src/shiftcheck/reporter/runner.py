import sys
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from dotenv import load_dotenv

from shiftcheck.dynamics.cover import build_cover
from shiftcheck.dynamics.degree import finite_to_one_check, verify_d_equals_D
from shiftcheck.dynamics.errors import InvalidSetting, ParseError, ShiftCheckError, UnknownName
from shiftcheck.dynamics.fiber import commuting_check, fiber_product, injectivity_check, lift_diagram, lift_summary, minimal_lift
from shiftcheck.dynamics.models import OneBlockCode, OneStepSft, subset_name, symbol_name, word_name
from shiftcheck.dynamics.relations import (
    canonical_extension,
    fischer_cover,
    fischer_graph,
    forward_closed,
    pair_relation,
    quotient_presentation,
    resolving_check,
)
from shiftcheck.dynamics.shift import labeled_isomorphism, trim_essential
from shiftcheck.dynamics.spectral import chain_components, max_entropy_component, trace_count
from shiftcheck.dynamics.utils import LogFn, Settings, get_worker_count, load_settings, make_logger, quiet_log, safe_call

from .manifest import Manifest, format_code, format_system, parse_file
from .message import Report, build_json, build_message, format_witness

COMMANDS: Dict[str, Tuple[int, int]] = {
    "validate": (0, 0),
    "spectral": (1, 1),
    "cover": (1, 1),
    "fischer": (1, 1),
    "resolving": (1, 1),
    "degree": (1, 1),
    "fiber": (2, 2),
    "minlift": (1, 2),
    "lift": (1, 1),
    "commute": (1, 1),
}


def _flag(value: bool) -> str:
    return "true" if value else "false"


def _describe_system(sft: OneStepSft) -> str:
    trimmed = trim_essential(sft)
    components = chain_components(trimmed)
    top = components[0].entropy if components else 0.0
    return (
        f"system {sft.name}: symbols={len(sft.symbols)} transitions={len(sft.transitions)} "
        f"essential={_flag(sft.is_essential())} components={len(components)} entropy={top:.9f}"
    )


def _describe_code(code: OneBlockCode) -> str:
    return (
        f"code {code.name}: domain={code.domain.name} letters={len(code.target_alphabet)} "
        f"finite_to_one={_flag(finite_to_one_check(code).holds)} "
        f"u_resolving={_flag(resolving_check(code, 'u').holds)} "
        f"s_resolving={_flag(resolving_check(code, 's').holds)}"
    )


def _validate(manifest: Manifest, targets: Sequence[str], settings: Settings, log: LogFn, **_) -> Report:
    tasks: List[Tuple[str, Callable[[], str]]] = []
    for name, sft in sorted(manifest.systems.items()):
        tasks.append((f"system {name}", lambda sft=sft: _describe_system(sft)))
    for name, code in sorted(manifest.codes.items()):
        tasks.append((f"code {name}", lambda code=code: _describe_code(code)))

    results: Dict[str, Optional[str]] = {}
    with ThreadPoolExecutor(max_workers=get_worker_count(settings, max(1, len(tasks)))) as executor:
        futures = {executor.submit(safe_call, label, func, None, log): label for label, func in tasks}
        for future in as_completed(futures):
            label = futures[future]
            results[label] = future.result()
            log("INFO", f"Checked {label}")

    report = Report("validate", "", True)
    failed = 0
    for label in sorted(results):
        line = results[label]
        if line is None:
            failed += 1
            report.lines.append(f"{label}: failed")
        else:
            report.lines.append(line)
    report.add("systems", len(manifest.systems))
    report.add("codes", len(manifest.codes))
    report.add("diagrams", len(manifest.diagrams))
    report.add("failed", failed)
    report.holds = failed == 0
    return report


def _spectral(manifest: Manifest, targets: Sequence[str], settings: Settings, log: LogFn, **_) -> Report:
    sft = manifest.system(targets[0])
    report = Report("spectral", sft.name, True)
    components = chain_components(sft, log=log)
    selection = max_entropy_component(sft, settings.tie_band)
    for component in components:
        report.lines.append(f"component {component}")
    report.add("components", len(components))
    report.add("entropy", selection.entropy)
    report.add("max_component", " ".join(component.name for component in selection.components))
    report.add("ambiguous", selection.ambiguous)
    counts = [trace_count(sft, n) for n in range(1, settings.period_cap + 1)]
    report.add("periodic", " ".join(f"{n}:{count}" for n, count in enumerate(counts, start=1)))
    return report


def _cover(manifest: Manifest, targets: Sequence[str], settings: Settings, log: LogFn, relation: str = "alpha", **_) -> Report:
    code = manifest.code(targets[0])
    report = Report("cover", f"{code.name} --relation {relation}", True)
    cover = build_cover(code, settings.subset_cap, log=log)
    presentation = quotient_presentation(cover, relation, log=log)
    report.add("cover_symbols", len(cover.sft.symbols))
    report.add("cover_transitions", len(cover.sft.transitions))
    report.add("classes", len(presentation.sft.symbols))
    for class_id, members in presentation.classes().items():
        report.lines.append(f"class {class_id}: {' '.join(symbol_name(m) for m in members)}")
    quotient_name = f"{code.name}_{relation}"
    report.lines.extend(format_system(presentation.sft, name=quotient_name))
    report.lines.extend(format_code(presentation.code, name=quotient_name, system_name=quotient_name))

    restricted = presentation.max_entropy_code(settings.tie_band, strict=False)
    report.add("max_component_symbols", len(restricted.domain.symbols))
    resolving = resolving_check(restricted, "u")
    report.add("u_resolving", resolving.holds, line=f"u-resolving: {_flag(resolving.holds)}")
    report.holds = resolving.holds
    report.witness = resolving.witness
    if relation == "alpha":
        closed = forward_closed(presentation.relation, pair_relation(cover.base_code))
        report.add("forward_closed", closed.holds)
        report.holds = report.holds and closed.holds
        if not closed.holds and report.witness is None:
            report.witness = closed.witness[2]
    return report


def _fischer(manifest: Manifest, targets: Sequence[str], settings: Settings, log: LogFn, **_) -> Report:
    code = manifest.code(targets[0])
    report = Report("fischer", code.name, True)
    graph = fischer_graph(code, settings.subset_cap)
    for state, subset in graph.states.items():
        report.lines.append(f"state {state}: {subset_name(subset)}")
    for source, letter, target in graph.edges:
        report.lines.append(f"edge {source} -{symbol_name(letter)}-> {target}")
    presentation = fischer_cover(code, settings.subset_cap)
    name = f"{code.name}_fischer"
    report.lines.extend(format_system(presentation.domain, name=name))
    report.lines.extend(format_code(presentation, name=name, system_name=name))
    report.add("states", len(graph.states))
    report.add("edges", len(graph.edges))
    report.add("image_sft", injectivity_check(presentation).holds)
    extension = canonical_extension(code, settings.subset_cap, settings.tie_band, log=log)
    report.add("alpha_agreement", labeled_isomorphism(presentation, extension) is not None)
    return report


def _resolving(manifest: Manifest, targets: Sequence[str], settings: Settings, log: LogFn, direction: str = "u", **_) -> Report:
    code = manifest.code(targets[0])
    report = Report("resolving", f"{code.name} --dir {direction}", True)
    result = resolving_check(code, direction)
    report.add(f"{direction}_resolving", result.holds, line=f"{direction}-resolving: {_flag(result.holds)}")
    if not result.holds:
        report.holds = False
        report.witness = result.witness
        report.lines.append(f"detail: {result.detail}")
    return report


def _degree(manifest: Manifest, targets: Sequence[str], settings: Settings, log: LogFn, **_) -> Report:
    code = manifest.code(targets[0])
    report = Report("degree", code.name, True)
    data = verify_d_equals_D(code, settings.period_cap, settings.k_cap, log=log)
    report.lines.append(data.summary())
    report.fields.update({"K": data.K, "d": data.d, "D": data.D})
    report.add("family", str(data.family))
    report.add("u", word_name(data.connecting.u) or "-")
    report.add("permutation", format_witness(data.permutation))
    return report


def _fiber(manifest: Manifest, targets: Sequence[str], settings: Settings, log: LogFn, **_) -> Report:
    code_a, code_b = manifest.code(targets[0]), manifest.code(targets[1])
    report = Report("fiber", f"{code_a.name} {code_b.name}", True)
    product = fiber_product(code_a, code_b)
    report.add("symbols", len(product.sft.symbols))
    report.add("transitions", len(product.sft.transitions))
    report.lines.append("members " + " ".join(symbol_name(s) for s in product.sft.symbols))
    selection = max_entropy_component(product.sft, settings.tie_band, log=log)
    restricted = product.restrict(selection.select(strict=False).sft)
    report.add("entropy", selection.entropy)
    report.add("max_component_symbols", len(restricted.sft.symbols))
    report.add("p1_injective", injectivity_check(restricted.proj_a).holds)
    report.add("p2_injective", injectivity_check(restricted.proj_b).holds)
    return report


def _minlift(manifest: Manifest, targets: Sequence[str], settings: Settings, log: LogFn, **_) -> Report:
    alpha = manifest.code(targets[0])
    if len(targets) > 1:
        cover = manifest.code(targets[1])
    else:
        cover = canonical_extension(alpha, settings.subset_cap, settings.tie_band, log=log)
    report = Report("minlift", f"{alpha.name} {cover.name}", True)
    lift = minimal_lift(alpha, cover, settings.tie_band, log=log)
    report.add("window", lift.window)
    report.add("fiber_symbols", len(lift.fiber.sft.symbols))
    report.add("beta_symbols", len(lift.beta.domain.symbols))
    for symbol in lift.beta.domain.symbols:
        report.lines.append(f"beta {symbol_name(symbol)} -> {symbol_name(lift.beta.label[symbol])}")
    injective = injectivity_check(lift.fiber.proj_a)
    commuting = commuting_check(lift.diagram(), settings.word_cap)
    report.add("rho1_injective", injective.holds)
    report.add("commutes", commuting.holds)
    report.holds = injective.holds and commuting.holds
    report.witness = injective.witness if not injective.holds else commuting.witness
    return report


def _lift(manifest: Manifest, targets: Sequence[str], settings: Settings, log: LogFn, **_) -> Report:
    pi = manifest.code(targets[0])
    report = Report("lift", pi.name, True)
    diagram = lift_diagram(pi, settings, log=log)
    for node, size in lift_summary(diagram).items():
        report.lines.append(f"node {node}: {size}")
    for arrow in sorted(diagram.arrows.values(), key=lambda item: item.name):
        tags = ",".join(arrow.tags) or "-"
        report.lines.append(f"arrow {arrow.name}: {arrow.source} -> {arrow.target} [{tags}]")
    for label, witness in diagram.failures:
        report.lines.append(f"failed {label}: {format_witness(witness)}")
    report.add("failures", len(diagram.failures))
    report.holds = diagram.verified
    return report


def _commute(manifest: Manifest, targets: Sequence[str], settings: Settings, log: LogFn, **_) -> Report:
    diagram = manifest.diagram(targets[0])
    report = Report("commute", diagram.name, True)
    result = commuting_check(diagram, settings.word_cap)
    report.add("paths", len(diagram.paths))
    report.add("commutes", result.holds)
    if result.detail:
        report.lines.append(f"detail: {result.detail}")
    report.holds = result.holds
    report.witness = result.witness
    return report


RELATIONS = ("alpha", "theta")
DIRECTIONS = ("u", "s")

HANDLERS = {
    "validate": _validate,
    "spectral": _spectral,
    "cover": _cover,
    "fischer": _fischer,
    "resolving": _resolving,
    "degree": _degree,
    "fiber": _fiber,
    "minlift": _minlift,
    "lift": _lift,
    "commute": _commute,
}


def run(
    command: str,
    manifest: Manifest,
    targets: Sequence[str] = (),
    settings: Optional[Settings] = None,
    log: LogFn = quiet_log,
    relation: str = "alpha",
    direction: str = "u",
) -> Report:
    """Run one command; a failed property or hypothesis comes back as a report with holds=False.

    Unknown commands, wrong arity and unknown names raise UnknownName.
    """
    if command not in COMMANDS:
        raise UnknownName(f"Unknown command '{command}'")
    low, high = COMMANDS[command]
    if not low <= len(targets) <= high:
        raise UnknownName(f"Command '{command}' takes {low}..{high} names, got {len(targets)}")
    if relation not in RELATIONS or direction not in DIRECTIONS:
        raise UnknownName(f"Unknown relation or direction: {relation} {direction}")
    settings = settings or manifest.settings()
    try:
        return HANDLERS[command](manifest, targets, settings, log, relation=relation, direction=direction)
    except (ParseError, UnknownName):
        raise
    except ShiftCheckError as exc:
        log("WARN", f"{command} failed: {exc}", force=True)
        report = Report(command, " ".join(targets), False, error=str(exc), witness=exc.witness)
        report.fields["error_type"] = type(exc).__name__
        return report


def run_command(
    manifest_path: str,
    command: str,
    targets: Sequence[str],
    relation: str = "alpha",
    direction: str = "u",
    verbose: bool = False,
    summary_json: bool = False,
) -> int:
    load_dotenv()
    log = make_logger(verbose, summary_json)
    try:
        settings = load_settings()
        manifest = parse_file(manifest_path)
        settings = manifest.settings(settings)
        report = run(command, manifest, targets, settings, log, relation, direction)
    except (OSError, ParseError, UnknownName, InvalidSetting) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(build_json(report, settings) if summary_json else build_message(report, settings))
    return report.exit_code
