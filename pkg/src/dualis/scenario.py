"""Scenario files: a small line-oriented format describing one computation.

Example::

    scenario parabola
    field Q
    base A = a
    ring R = x over A
    seq t = [x^2 - a] alpha = [2]
    map g : A -> K images [0]
    task pairing
    task residue-bc map=g

Blank lines and `#` comments are ignored.  `parse` produces a `Scenario`
made of plain tuples and strings, `print_scenario` writes it back in
canonical form, and `build` turns it into ring presentations and maps.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .exact_algebra import (
    GF,
    QQ,
    AlgebraError,
    PolynomialSyntaxError,
    RingMap,
    RingPresentation,
    field_ring,
)

TASKS = ("pairing", "residue", "local-duality", "theta", "residue-bc",
         "cech-sign", "verdier", "koszul-ext", "lc-tensor")

TASK_KEYS = {
    "pairing": {"expect"},
    "residue": {"g", "expect"},
    "local-duality": set(),
    "theta": {"map", "then", "unit"},
    "residue-bc": {"map"},
    "cech-sign": {"num", "level", "expect-sign"},
    "verdier": {"map", "level"},
    "koszul-ext": {"i", "rank"},
    "lc-tensor": {"rank"},
}


class ScenarioSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1, source: str = "<scenario>"):
        super().__init__(f"{source}:{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class RingDecl:
    name: str
    variables: tuple
    relations: tuple = ()
    over: str | None = None


@dataclass(frozen=True)
class MapDecl:
    name: str
    source: str
    target: str
    variables: tuple
    relations: tuple
    images: tuple


@dataclass(frozen=True)
class TaskDecl:
    name: str
    options: tuple = ()  # (key, value) pairs in file order

    def get(self, key, default=None):
        return dict(self.options).get(key, default)

    def __str__(self):
        opts = "".join(f" {k}={v}" for k, v in self.options)
        return f"{self.name}{opts}"


@dataclass(frozen=True)
class Scenario:
    name: str
    field: tuple  # ("Q",) or ("Fp", p)
    base: RingDecl | None
    ring: RingDecl
    seq: tuple
    alpha: tuple | None
    maps: tuple = ()
    tasks: tuple = ()
    seq_name: str = "t"


# -- parsing ----------------------------------------------------------------------------------

_IDENT = r"[A-Za-z_][A-Za-z0-9_']*"


class _Line:
    """Cursor over one line with column-aware errors."""

    def __init__(self, text: str, lineno: int, source: str):
        self.text = text
        self.pos = 0
        self.lineno = lineno
        self.source = source

    def error(self, message: str, pos: int | None = None):
        col = (self.pos if pos is None else pos) + 1
        return ScenarioSyntaxError(message, self.lineno, col, self.source)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)

    def peek(self, s: str) -> bool:
        self.skip()
        return self.text.startswith(s, self.pos)

    def expect(self, s: str):
        self.skip()
        if not self.text.startswith(s, self.pos):
            raise self.error(f"expected {s!r}")
        self.pos += len(s)

    def keyword(self, word: str) -> bool:
        self.skip()
        m = re.match(re.escape(word) + r"\b", self.text[self.pos:])
        if m:
            self.pos += m.end()
            return True
        return False

    def ident(self, what: str = "a name") -> str:
        self.skip()
        m = re.match(_IDENT, self.text[self.pos:])
        if not m:
            raise self.error(f"expected {what}")
        self.pos += m.end()
        return m.group(0)

    def word(self, what: str) -> str:
        self.skip()
        m = re.match(r"\S+", self.text[self.pos:])
        if not m:
            raise self.error(f"expected {what}")
        self.pos += m.end()
        return m.group(0)

    def bracket_list(self, what: str) -> tuple:
        self.skip()
        start = self.pos
        if not self.peek("["):
            raise self.error(f"expected '[' to open the {what} list")
        depth = 0
        end = None
        for i in range(start, len(self.text)):
            ch = self.text[i]
            if ch == "[":
                depth += 1
            elif ch == "]":
                depth -= 1
                if depth == 0:
                    end = i
                    break
        if end is None:
            raise self.error(f"unclosed '[' in {what} list", start)
        inner = self.text[start + 1:end]
        self.pos = end + 1
        items = [s.strip() for s in inner.split(",")]
        if items == [""]:
            return ()
        for k, s in enumerate(items):
            if not s:
                raise self.error(f"empty entry {k + 1} in {what} list", start)
        return tuple(" ".join(s.split()) for s in items)

    def variables(self, stop: tuple) -> tuple:
        """Comma-separated identifiers up to one of the `stop` keywords."""
        self.skip()
        out = []
        while not self.at_end() and not any(self.peek(s) for s in stop):
            out.append(self.ident("a variable name"))
            self.skip()
            if self.peek(","):
                self.pos += 1
        return tuple(out)

    def done(self):
        if not self.at_end():
            raise self.error(f"unexpected text {self.text[self.pos:]!r}")


def _int_list(line: _Line, items: tuple, what: str) -> tuple:
    try:
        return tuple(int(s) for s in items)
    except ValueError:
        raise line.error(f"{what} entries must be integers") from None


def parse(text: str, source: str = "<scenario>", default_name: str = "scenario") -> Scenario:
    name = None
    fld = None
    base = None
    ring = None
    seq = None
    alpha = None
    seq_name = "t"
    maps: list[MapDecl] = []
    tasks: list[TaskDecl] = []
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        ln = _Line(body, lineno, source)
        head = ln.ident("a keyword")
        if head == "scenario":
            if name is not None:
                raise ln.error("scenario name given twice", 0)
            name = ln.word("a scenario name")
            ln.done()
        elif head == "field":
            if fld is not None:
                raise ln.error("field declared twice", 0)
            kind = ln.ident("Q or Fp")
            if kind == "Q":
                fld = ("Q",)
            elif kind == "Fp":
                p = ln.word("a prime")
                if not p.isdigit():
                    raise ln.error("the characteristic must be a positive integer")
                fld = ("Fp", int(p))
            else:
                raise ln.error(f"unknown field {kind!r} (use Q or Fp <prime>)")
            ln.done()
        elif head == "base":
            if base is not None:
                raise ln.error("base declared twice", 0)
            bname = ln.ident("the base ring name")
            ln.expect("=")
            vars_ = ln.variables(("/",))
            rels = ()
            if ln.peek("/"):
                ln.expect("/")
                rels = ln.bracket_list("relation")
            ln.done()
            base = RingDecl(bname, vars_, rels)
        elif head == "ring":
            if ring is not None:
                raise ln.error("ring declared twice", 0)
            rname = ln.ident("the ring name")
            ln.expect("=")
            m = re.match(r"\s*(Q|F(\d+))\[([^\]]*)\]", ln.text[ln.pos:])
            over = None
            if m:
                shorthand = ("Q",) if m.group(1) == "Q" else ("Fp", int(m.group(2)))
                if fld is not None and fld != shorthand:
                    raise ln.error("ring coefficients disagree with the declared field")
                fld = shorthand
                vars_ = tuple(v.strip() for v in m.group(3).split(",") if v.strip())
                ln.pos += m.end()
            else:
                vars_ = ln.variables(("over", "/"))
                if ln.keyword("over"):
                    over = ln.ident("the base ring name")
            rels = ()
            if ln.peek("/"):
                ln.expect("/")
                rels = ln.bracket_list("relation")
            ln.done()
            if not vars_:
                raise ln.error("a ring needs at least one variable", 0)
            ring = RingDecl(rname, vars_, rels, over)
        elif head == "seq":
            if seq is not None:
                raise ln.error("sequence declared twice", 0)
            seq_name = ln.ident("the sequence name")
            ln.expect("=")
            seq = ln.bracket_list("sequence")
            if not seq:
                raise ln.error("the sequence is empty")
            if ln.keyword("alpha"):
                ln.expect("=")
                alpha = _int_list(ln, ln.bracket_list("alpha"), "alpha")
                if len(alpha) != len(seq):
                    raise ln.error(f"alpha has {len(alpha)} entries for a sequence of length {len(seq)}")
                if any(a < 1 for a in alpha):
                    raise ln.error("alpha entries must be positive")
            ln.done()
        elif head == "map":
            mname = ln.ident("the map name")
            ln.expect(":")
            src = ln.ident("the source ring")
            ln.expect("->")
            tgt = ln.ident("the target ring")
            vars_: tuple = ()
            rels: tuple = ()
            if ln.keyword("vars"):
                vars_ = ln.variables(("/", "images"))
                if ln.peek("/"):
                    ln.expect("/")
                    rels = ln.bracket_list("relation")
            if not ln.keyword("images"):
                raise ln.error("expected 'images'")
            images = ln.bracket_list("image")
            ln.done()
            if any(m.name == mname for m in maps):
                raise ln.error(f"map {mname!r} declared twice", 0)
            maps.append(MapDecl(mname, src, tgt, vars_, rels, images))
        elif head == "task":
            tname = ln.word("a task name")
            if tname not in TASKS:
                raise ln.error(f"unknown task {tname!r}", ln.pos - len(tname))
            opts = []
            while not ln.at_end():
                start = ln.pos
                w = ln.word("an option")
                if "=" not in w:
                    raise ln.error(f"option {w!r} is not key=value", start)
                k, v = w.split("=", 1)
                if k not in TASK_KEYS[tname]:
                    raise ln.error(f"task {tname} has no option {k!r}", start)
                opts.append((k, v))
            tasks.append(TaskDecl(tname, tuple(opts)))
        else:
            raise ln.error(f"unknown keyword {head!r}", 0)
    if ring is None:
        raise ScenarioSyntaxError("no ring declared", last_line or 1, 1, source)
    if not tasks:
        raise ScenarioSyntaxError("no tasks declared", last_line or 1, 1, source)
    if ring.over is not None and (base is None or base.name != ring.over):
        raise ScenarioSyntaxError(f"ring is declared over unknown base {ring.over!r}",
                                  last_line or 1, 1, source)
    return Scenario(name or default_name, fld or ("Q",), base, ring, seq or (), alpha,
                    tuple(maps), tuple(tasks), seq_name)


# -- printing -----------------------------------------------------------------------------------

def _list(items) -> str:
    return "[" + ", ".join(items) + "]"


def print_scenario(s: Scenario) -> str:
    lines = [f"scenario {s.name}"]
    lines.append("field Q" if s.field == ("Q",) else f"field Fp {s.field[1]}")
    if s.base is not None:
        rel = f" / {_list(s.base.relations)}" if s.base.relations else ""
        lines.append(f"base {s.base.name} = {', '.join(s.base.variables)}{rel}")
    over = f" over {s.ring.over}" if s.ring.over else ""
    rel = f" / {_list(s.ring.relations)}" if s.ring.relations else ""
    lines.append(f"ring {s.ring.name} = {', '.join(s.ring.variables)}{over}{rel}")
    if s.seq:
        alpha = f" alpha = {_list(map(str, s.alpha))}" if s.alpha is not None else ""
        lines.append(f"seq {s.seq_name} = {_list(s.seq)}{alpha}")
    for m in s.maps:
        vars_ = ""
        if m.variables or m.relations:
            vars_ = f" vars {', '.join(m.variables)}"
            if m.relations:
                vars_ += f" / {_list(m.relations)}"
        lines.append(f"map {m.name} : {m.source} -> {m.target}{vars_} images {_list(m.images)}")
    for t in s.tasks:
        lines.append(f"task {t}")
    return "\n".join(lines) + "\n"


# -- building -------------------------------------------------------------------------------------

@dataclass
class BuiltScenario:
    scenario: Scenario
    field: object
    base: RingPresentation
    ring: RingPresentation
    t: tuple
    alpha: tuple
    rings: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)

    @property
    def r(self) -> int:
        return len(self.t)


def _field(decl: tuple):
    if decl == ("Q",):
        return QQ
    return GF(decl[1])


def _ring(fld, variables, relations, base, what: str) -> RingPresentation:
    try:
        return RingPresentation(fld, variables, relations, "degrevlex", base)
    except PolynomialSyntaxError as exc:
        raise AlgebraError(f"{what}: {exc}") from None


def build(s: Scenario) -> BuiltScenario:
    """Type-check every declaration against the algebra layer."""
    fld = _field(s.field)
    rings: dict = {}
    base = None
    if s.base is not None:
        base = _ring(fld, s.base.variables, s.base.relations, None, f"base {s.base.name}")
        rings[s.base.name] = base
    ring = _ring(fld, s.ring.variables, s.ring.relations, base if s.ring.over else None,
                 f"ring {s.ring.name}")
    rings[s.ring.name] = ring
    A = ring.base_ring
    rings.setdefault("k", field_ring(fld))
    try:
        t = tuple(ring(p) for p in s.seq)
    except PolynomialSyntaxError as exc:
        raise AlgebraError(f"sequence: {exc}") from None
    alpha = s.alpha if s.alpha is not None else (1,) * len(t)
    maps = {}
    for m in s.maps:
        if m.source not in rings:
            if s.base is None and m.source in ("A", "k", "K", "Q"):
                rings[m.source] = A
            else:
                raise AlgebraError(f"map {m.name}: unknown source ring {m.source!r}")
        src = rings[m.source]
        if m.target in rings and not m.variables and not m.relations:
            tgt = rings[m.target]
        else:
            tgt = field_ring(fld) if not m.variables else _ring(fld, m.variables, m.relations, None,
                                                                  f"map {m.name} target")
            if m.target in rings and rings[m.target] != tgt:
                raise AlgebraError(f"map {m.name}: target {m.target!r} redeclared differently")
            rings[m.target] = tgt
        try:
            maps[m.name] = RingMap(src, tgt, [tgt(x) for x in m.images])
        except PolynomialSyntaxError as exc:
            raise AlgebraError(f"map {m.name}: {exc}") from None
    return BuiltScenario(s, fld, A, ring, t, tuple(alpha), rings, maps)
