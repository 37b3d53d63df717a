"""Line-oriented manifest grammar for systems, codes, options and diagrams.

    system EV
    symbols x y z
    edges x>x x>y y>z z>x z>y
    end

    code EV EV -> 0 1
    map x:0 y:1 z:1
    end

    options P=8 L=12

    diagram square
    path A B
    path C
    end

Blank lines and ``#`` comments are ignored.
"""

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from shiftcheck.dynamics.errors import InvalidSetting, ParseError, ShiftCheckError, UnknownName
from shiftcheck.dynamics.fiber import FiberDiagram
from shiftcheck.dynamics.models import OneBlockCode, OneStepSft, sort_symbols, symbol_name
from shiftcheck.dynamics.utils import OPTION_FIELDS, Settings

NAME_PATTERN = re.compile(r"[A-Za-z0-9_]+\Z")
# Cover symbols print as m1+m2|i, so quotient reports parse back.
SYMBOL_PATTERN = re.compile(r"[A-Za-z0-9_]+(?:[+|][A-Za-z0-9_]+)*\Z")


@dataclass
class Manifest:
    systems: Dict[str, OneStepSft] = field(default_factory=dict)
    codes: Dict[str, OneBlockCode] = field(default_factory=dict)
    options: Dict[str, str] = field(default_factory=dict)
    diagrams: Dict[str, Tuple[Tuple[str, ...], ...]] = field(default_factory=dict)

    def system(self, name: str) -> OneStepSft:
        if name not in self.systems:
            raise UnknownName(f"Manifest has no system '{name}'")
        return self.systems[name]

    def code(self, name: str) -> OneBlockCode:
        if name not in self.codes:
            raise UnknownName(f"Manifest has no code '{name}'")
        return self.codes[name]

    def diagram(self, name: str) -> FiberDiagram:
        if name not in self.diagrams:
            raise UnknownName(f"Manifest has no diagram '{name}'")
        return build_diagram(name, self.diagrams[name], self.codes)

    def settings(self, base: Optional[Settings] = None) -> Settings:
        return (base or Settings()).with_options(self.options)


@dataclass(frozen=True)
class _Line:
    number: int
    text: str

    def column(self, token: Optional[str] = None, occurrence: int = 0) -> int:
        """1-based column of a whitespace-separated token; the first token when none is named."""
        starts = [(match.group(), match.start() + 1) for match in re.finditer(r"\S+", self.text)]
        if token is None:
            return starts[0][1] if starts else 1
        found = [start for text, start in starts if text == token]
        if len(found) > occurrence:
            return found[occurrence]
        position = self.text.find(token)
        return position + 1 if position >= 0 else 1


def _fail(message: str, at: _Line, token: Optional[str] = None, occurrence: int = 0) -> ParseError:
    return ParseError(message, at.number, at.column(token, occurrence))


def _check_name(kind: str, token: str, at: _Line) -> str:
    if not NAME_PATTERN.match(token):
        raise _fail(f"{kind} name '{token}' must match [A-Za-z0-9_]+", at, token)
    return token


def _check_symbol(token: str, at: _Line) -> str:
    if not SYMBOL_PATTERN.match(token):
        raise _fail(f"symbol '{token}' must match [A-Za-z0-9_]+", at, token)
    return token


class _SystemBlock:
    kind = "system"

    def __init__(self, name: str, at: _Line) -> None:
        self.name = name
        self.at = at
        self.symbols: List[str] = []
        self.edges: List[Tuple[str, str]] = []

    def feed(self, directive: str, args: List[str], at: _Line) -> None:
        if directive == "symbols":
            for token in args:
                if _check_symbol(token, at) in self.symbols:
                    raise _fail(f"duplicate symbol '{token}' in system '{self.name}'", at, token, occurrence=1)
                self.symbols.append(token)
        elif directive == "edges":
            for token in args:
                parts = token.split(">")
                if len(parts) != 2:
                    raise _fail(f"edge '{token}' must read <a>><b>", at, token)
                for end in parts:
                    if end not in self.symbols:
                        raise _fail(f"edge '{token}' uses undeclared symbol '{end}'", at, token)
                self.edges.append((parts[0], parts[1]))
        else:
            raise _fail(f"unknown directive '{directive}' in system '{self.name}'", at)

    def close(self, manifest: Manifest, at: _Line) -> None:
        if not self.symbols:
            raise _fail(f"system '{self.name}' declares no symbols", at)
        manifest.systems[self.name] = OneStepSft.build(self.name, self.symbols, self.edges)


class _CodeBlock:
    kind = "code"

    def __init__(self, name: str, domain: OneStepSft, letters: Sequence[str], at: _Line) -> None:
        self.name = name
        self.domain = domain
        self.letters = list(letters)
        self.at = at
        self.label: Dict[str, str] = {}

    def feed(self, directive: str, args: List[str], at: _Line) -> None:
        if directive != "map":
            raise _fail(f"unknown directive '{directive}' in code '{self.name}'", at)
        for token in args:
            parts = token.split(":")
            if len(parts) != 2:
                raise _fail(f"map entry '{token}' must read <sym>:<letter>", at, token)
            symbol, letter = parts
            if symbol not in self.domain.index:
                raise _fail(f"'{symbol}' is not a symbol of system '{self.domain.name}'", at, token)
            if letter not in self.letters:
                raise _fail(f"letter '{letter}' is not declared by code '{self.name}'", at, token)
            if symbol in self.label:
                raise _fail(f"symbol '{symbol}' is mapped twice in code '{self.name}'", at, token)
            self.label[symbol] = letter

    def close(self, manifest: Manifest, at: _Line) -> None:
        missing = [s for s in self.domain.symbols if s not in self.label]
        if missing:
            raise _fail(f"code '{self.name}' leaves symbol '{missing[0]}' unmapped", at)
        manifest.codes[self.name] = OneBlockCode(self.name, self.domain, dict(self.label), sort_symbols(self.letters))


class _DiagramBlock:
    kind = "diagram"

    def __init__(self, name: str, at: _Line) -> None:
        self.name = name
        self.at = at
        self.paths: List[Tuple[str, ...]] = []

    def feed(self, directive: str, args: List[str], at: _Line, codes: Dict[str, OneBlockCode]) -> None:
        if directive != "path":
            raise _fail(f"unknown directive '{directive}' in diagram '{self.name}'", at)
        if not args:
            raise _fail(f"empty path in diagram '{self.name}'", at)
        for token in args:
            if token not in codes:
                raise _fail(f"path uses unknown code '{token}'", at, token)
        self.paths.append(tuple(args))

    def close(self, manifest: Manifest, at: _Line) -> None:
        if not self.paths:
            raise _fail(f"diagram '{self.name}' declares no path", at)
        try:
            build_diagram(self.name, self.paths, manifest.codes)
        except ShiftCheckError as exc:
            raise _fail(str(exc), at) from None
        manifest.diagrams[self.name] = tuple(self.paths)


def _parse_options(manifest: Manifest, args: List[str], at: _Line) -> None:
    for token in args:
        key, sep, value = token.partition("=")
        if not sep:
            raise _fail(f"option '{token}' must read <key>=<value>", at, token)
        if key not in OPTION_FIELDS:
            raise _fail(f"unknown option '{key}'", at, token)
        try:
            Settings().with_options({key: value})
        except InvalidSetting as exc:
            raise _fail(str(exc), at, token) from None
        manifest.options[key] = value


def _open_block(manifest: Manifest, directive: str, args: List[str], at: _Line):
    if directive == "system":
        if len(args) != 1:
            raise _fail("system takes exactly one name", at)
        name = _check_name("system", args[0], at)
        if name in manifest.systems:
            raise _fail(f"system '{name}' is declared twice", at, name)
        return _SystemBlock(name, at)
    if directive == "code":
        if len(args) < 3 or args[2] != "->":
            raise _fail("code must read: code <name> <system> -> <letters>", at)
        name = _check_name("code", args[0], at)
        if name in manifest.codes:
            raise _fail(f"code '{name}' is declared twice", at, name)
        if args[1] not in manifest.systems:
            raise _fail(f"code '{name}' uses unknown system '{args[1]}'", at, args[1])
        letters = [_check_symbol(token, at) for token in args[3:]]
        if not letters:
            raise _fail(f"code '{name}' declares no letters", at)
        if len(set(letters)) != len(letters):
            raise _fail(f"code '{name}' declares a letter twice", at)
        return _CodeBlock(name, manifest.systems[args[1]], letters, at)
    if directive == "diagram":
        if len(args) != 1:
            raise _fail("diagram takes exactly one name", at)
        name = _check_name("diagram", args[0], at)
        if name in manifest.diagrams:
            raise _fail(f"diagram '{name}' is declared twice", at, name)
        return _DiagramBlock(name, at)
    if directive == "options":
        _parse_options(manifest, args, at)
        return None
    raise _fail(f"unknown directive '{directive}'", at)


def parse(text: str) -> Manifest:
    manifest = Manifest()
    block = None
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0]
        if not content.strip():
            continue
        at = _Line(number, content)
        directive, *args = content.split()
        if block is None:
            block = _open_block(manifest, directive, args, at)
        elif directive == "end":
            if args:
                raise _fail("'end' takes no arguments", at, args[0])
            block.close(manifest, at)
            block = None
        elif isinstance(block, _DiagramBlock):
            block.feed(directive, args, at, manifest.codes)
        else:
            block.feed(directive, args, at)
    if block is not None:
        raise _fail(f"{block.kind} '{block.name}' is missing 'end'", block.at)
    return manifest


def parse_file(path: str) -> Manifest:
    with open(path, "r", encoding="utf-8") as handle:
        return parse(handle.read())


def build_diagram(name: str, paths: Sequence[Tuple[str, ...]], codes: Dict[str, OneBlockCode]) -> FiberDiagram:
    """Each path occurrence of a code becomes an arrow into the domain of the next code.

    The last code of every path ends at the shared node ``image:<name>``.
    """
    diagram = FiberDiagram(name)
    end = f"image:{name}"
    for path in paths:
        for code_name in path:
            domain = codes[code_name].domain
            diagram.add_node(domain.name, domain)
    diagram.add_node(end)
    for index, path in enumerate(paths, start=1):
        arrows: List[str] = []
        for position, code_name in enumerate(path):
            code = codes[code_name]
            target = codes[path[position + 1]].domain.name if position + 1 < len(path) else end
            arrow = f"{code_name}@{index}.{position + 1}"
            diagram.add_arrow(arrow, code, code.domain.name, target)
            arrows.append(arrow)
        diagram.add_path(*arrows)
    return diagram


def format_system(sft: OneStepSft, name: Optional[str] = None) -> List[str]:
    edges = sorted(f"{symbol_name(a)}>{symbol_name(b)}" for a, b in sft.transitions)
    lines = [f"system {name or sft.name}", "symbols " + " ".join(symbol_name(s) for s in sft.symbols)]
    if edges:
        lines.append("edges " + " ".join(edges))
    lines.append("end")
    return lines


def format_code(code: OneBlockCode, name: Optional[str] = None, system_name: Optional[str] = None) -> List[str]:
    letters = " ".join(symbol_name(letter) for letter in code.target_alphabet)
    entries = " ".join(f"{symbol_name(s)}:{symbol_name(code.label[s])}" for s in code.domain.symbols)
    return [f"code {name or code.name} {system_name or code.domain.name} -> {letters}", f"map {entries}", "end"]


def print_manifest(manifest: Manifest) -> str:
    lines: List[str] = []
    for name in sorted(manifest.systems):
        lines.extend(format_system(manifest.systems[name]))
        lines.append("")
    for name in sorted(manifest.codes):
        lines.extend(format_code(manifest.codes[name]))
        lines.append("")
    if manifest.options:
        lines.append("options " + " ".join(f"{key}={manifest.options[key]}" for key in sorted(manifest.options)))
        lines.append("")
    for name in sorted(manifest.diagrams):
        lines.append(f"diagram {name}")
        lines.extend("path " + " ".join(path) for path in manifest.diagrams[name])
        lines.append("end")
        lines.append("")
    return "\n".join(lines).rstrip("\n") + "\n"
