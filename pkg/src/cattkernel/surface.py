"""Raw surface syntax: spans, the tokenizer, the parser for terms, types,
trees, contexts and commands, and the pretty-printer.

No well-formedness invariants are maintained here; holes and omitted
entries are allowed everywhere and legality is the typechecker's concern.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

KEYWORDS = {"coh", "comp", "id", "def", "normalise", "assert", "size", "import", "in"}


@dataclass(frozen=True)
class Span:
    source: Optional[str]
    start: int
    end: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError("backwards span")


SYNTH = Span(None, 0, 0)


@dataclass
class ParseError(Exception):
    message: str
    span: Span
    expected: frozenset = frozenset()

    def __str__(self) -> str:
        if self.expected:
            opts = ", ".join(sorted(self.expected))
            return f"{self.message} (expected one of: {opts})"
        return self.message


# ---------------------------------------------------------------------------
# raw syntax


@dataclass(frozen=True)
class RawTree:
    """A tree of optional entries; one more element than branches."""

    elements: tuple
    branches: tuple["RawTree", ...] = ()
    span: Span = SYNTH

    def __post_init__(self):
        if len(self.elements) != len(self.branches) + 1:
            raise ValueError("tree shape mismatch")


@dataclass(frozen=True)
class RVar:
    name: str
    span: Span = SYNTH


@dataclass(frozen=True)
class RHole:
    span: Span = SYNTH


@dataclass(frozen=True)
class RId:
    span: Span = SYNTH


@dataclass(frozen=True)
class RComp:
    span: Span = SYNTH


@dataclass(frozen=True)
class RCoh:
    tree: RawTree
    ty: "RawType"
    span: Span = SYNTH


@dataclass(frozen=True)
class RInc:
    low: int
    high: int
    term: "RawTerm"
    span: Span = SYNTH


@dataclass(frozen=True)
class RSusp:
    term: "RawTerm"
    span: Span = SYNTH


@dataclass(frozen=True)
class RApp:
    term: "RawTerm"
    args: "RawArgs"
    span: Span = SYNTH


RawTerm = Union[RVar, RHole, RId, RComp, RCoh, RInc, RSusp, RApp]


@dataclass(frozen=True)
class RStar:
    span: Span = SYNTH


@dataclass(frozen=True)
class RTyHole:
    span: Span = SYNTH


@dataclass(frozen=True)
class RArrow:
    src: RawTerm
    base: Optional["RawType"]
    tgt: RawTerm
    span: Span = SYNTH


@dataclass(frozen=True)
class RTySusp:
    ty: "RawType"
    span: Span = SYNTH


@dataclass(frozen=True)
class RTyApp:
    ty: "RawType"
    args: "RawArgs"
    span: Span = SYNTH


RawType = Union[RStar, RTyHole, RArrow, RTySusp, RTyApp]


@dataclass(frozen=True)
class RSubArgs:
    """Substitution-style arguments with an optional type part."""

    ty: Optional[RawType]
    terms: tuple
    span: Span = SYNTH


@dataclass(frozen=True)
class RLabelArgs:
    """Labelling-style arguments: a tree of optional terms."""

    tree: RawTree
    ty: Optional[RawType] = None
    span: Span = SYNTH


RawArgs = Union[RSubArgs, RLabelArgs]


@dataclass(frozen=True)
class RTreeCtx:
    tree: RawTree  # entries are Optional[str]
    span: Span = SYNTH


@dataclass(frozen=True)
class RListCtx:
    entries: tuple  # of (name, RawType)
    span: Span = SYNTH


RawCtx = Union[RTreeCtx, RListCtx]


@dataclass(frozen=True)
class DefCmd:
    name: str
    ctx: Optional[RawCtx]
    ty: Optional[RawType]
    term: RawTerm
    span: Span = SYNTH


@dataclass(frozen=True)
class NormaliseCmd:
    term: RawTerm
    ctx: RawCtx
    span: Span = SYNTH


@dataclass(frozen=True)
class AssertCmd:
    lhs: RawTerm
    rhs: RawTerm
    ctx: RawCtx
    span: Span = SYNTH


@dataclass(frozen=True)
class SizeCmd:
    term: RawTerm
    ctx: RawCtx
    span: Span = SYNTH


@dataclass(frozen=True)
class ImportCmd:
    path: str
    span: Span = SYNTH


Command = Union[DefCmd, NormaliseCmd, AssertCmd, SizeCmd, ImportCmd]


# ---------------------------------------------------------------------------
# tokenizer


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    start: int
    end: int


_PUNCT = {
    "{": "lbrace",
    "}": "rbrace",
    "[": "lbracket",
    "]": "rbracket",
    "(": "lparen",
    ")": "rparen",
    "⟨": "langle",
    "⟩": "rangle",
    "<": "langle",
    ">": "rangle",
    ":": "colon",
    ",": "comma",
    "|": "bar",
    "=": "equals",
    "*": "star",
    "⋆": "star",
    "_": "hole",
}


def tokenize(text: str, source: Optional[str] = None) -> list[Token]:
    toks: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("->", i):
            toks.append(Token("arrow", "->", i, i + 2))
            i += 2
            continue
        if c == "→":
            toks.append(Token("arrow", "→", i, i + 1))
            i += 1
            continue
        if c == "Σ":
            toks.append(Token("susp", "Σ", i, i + 1))
            i += 1
            continue
        if c in _PUNCT:
            toks.append(Token(_PUNCT[c], c, i, i + 1))
            i += 1
            continue
        if c.isalnum() or c in "./":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_./"):
                j += 1
            word = text[i:j]
            if word == "S":
                toks.append(Token("susp", word, i, j))
            elif word in KEYWORDS:
                toks.append(Token(word, word, i, j))
            else:
                toks.append(Token("name", word, i, j))
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", Span(source, i, i + 1))
    toks.append(Token("eof", "", n, n))
    return toks


# ---------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, text: str, source: Optional[str] = None):
        self.text = text
        self.source = source
        self.toks = tokenize(text, source)
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def expect(self, kind: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            raise ParseError(
                f"unexpected {t.value or 'end of input'!r}",
                self.span_of(t),
                frozenset({kind}),
            )
        return self.next()

    def span_of(self, t: Token) -> Span:
        return Span(self.source, t.start, t.end)

    def span_from(self, start: int) -> Span:
        end = self.toks[self.pos - 1].end if self.pos > 0 else start
        return Span(self.source, start, max(start, end))

    # -- terms --------------------------------------------------------------

    def term(self) -> RawTerm:
        start = self.peek().start
        t = self.term_atom()
        while self.peek().kind in ("lparen", "langle", "lbracket"):
            args = self.args()
            t = RApp(t, args, self.span_from(start))
        return t

    def term_atom(self) -> RawTerm:
        t = self.peek()
        if t.kind == "name":
            self.next()
            return RVar(t.value, self.span_of(t))
        if t.kind == "hole":
            self.next()
            return RHole(self.span_of(t))
        if t.kind == "id":
            self.next()
            return RId(self.span_of(t))
        if t.kind == "comp":
            self.next()
            return RComp(self.span_of(t))
        if t.kind == "susp":
            start = t.start
            self.next()
            self.expect("lparen")
            inner = self.term()
            self.expect("rparen")
            return RSusp(inner, self.span_from(start))
        if t.kind == "coh":
            start = t.start
            self.next()
            self.expect("lbracket")
            tree = self.tree(element="name")
            self.expect("colon")
            ty = self.type_()
            self.expect("rbracket")
            return RCoh(tree, ty, self.span_from(start))
        raise ParseError(
            f"unexpected {t.value or 'end of input'!r}",
            self.span_of(t),
            frozenset({"term"}),
        )

    # -- arguments ----------------------------------------------------------

    def args(self) -> RawArgs:
        t = self.peek()
        start = t.start
        if t.kind == "lparen":
            self.next()
            ty: Optional[RawType] = None
            terms: list[RawTerm] = []
            if self.peek().kind != "rparen":
                save = self.pos
                try:
                    ty = self.type_()
                    self.expect("bar")
                except ParseError:
                    ty = None
                    self.pos = save
                terms.append(self.term())
                while self.peek().kind == "comma":
                    self.next()
                    terms.append(self.term())
            self.expect("rparen")
            return RSubArgs(ty, tuple(terms), self.span_from(start))
        if t.kind == "langle":
            self.next()
            ty = None
            save = self.pos
            try:
                ty = self.type_()
                self.expect("bar")
            except ParseError:
                ty = None
                self.pos = save
            tree = self.tree(element="term")
            self.expect("rangle")
            return RLabelArgs(tree, ty, self.span_from(start))
        if t.kind == "lbracket":
            tree = self.square_tree(element="term")
            return RLabelArgs(tree, None, self.span_from(start))
        raise ParseError("expected arguments", self.span_of(t))

    # -- trees --------------------------------------------------------------

    def tree(self, element: str) -> RawTree:
        if self.peek().kind == "lbracket":
            return self.square_tree(element)
        return self.curly_tree(element)

    def curly_tree(self, element: str) -> RawTree:
        start = self.peek().start
        elements = [self.tree_element(element)]
        branches: list[RawTree] = []
        while self.peek().kind == "lbrace":
            self.next()
            branches.append(self.curly_tree(element))
            self.expect("rbrace")
            elements.append(self.tree_element(element))
        return RawTree(tuple(elements), tuple(branches), self.span_from(start))

    def tree_element(self, element: str):
        t = self.peek()
        stops = (
            "lbrace",
            "rbrace",
            "rangle",
            "rbracket",
            "colon",
            "comma",
            "equals",
            "in",
            "eof",
        )
        if t.kind in stops:
            return None
        if element == "name":
            if t.kind == "hole":
                self.next()
                return None
            return self.expect("name").value
        return self.term()

    def square_tree(self, element: str) -> RawTree:
        start = self.peek().start
        self.expect("lbracket")
        branches: list[RawTree] = []
        if self.peek().kind != "rbracket":
            branches.append(self.square_item(element))
            while self.peek().kind == "comma":
                self.next()
                branches.append(self.square_item(element))
        self.expect("rbracket")
        elements = tuple([None] * (len(branches) + 1))
        return RawTree(elements, tuple(branches), self.span_from(start))

    def square_item(self, element: str) -> RawTree:
        """An item of the square-bracket sugar: a nested tree, or a single
        entry wrapped in a singleton tree."""
        t = self.peek()
        if t.kind == "lbracket":
            return self.square_tree(element)
        # a curly tree if a brace appears before the item ends
        depth = 0
        ahead = 0
        is_tree = False
        while True:
            k = self.peek(ahead).kind
            if k == "eof":
                break
            if depth == 0 and k in ("comma", "rbracket"):
                break
            if k in ("lparen", "langle", "lbracket"):
                depth += 1
            elif k in ("rparen", "rangle"):
                depth -= 1
            elif k == "rbracket":
                depth -= 1
            elif k == "lbrace" and depth == 0:
                is_tree = True
                break
            ahead += 1
        if is_tree:
            return self.curly_tree(element)
        start = t.start
        entry = self.tree_element(element)
        return RawTree((entry,), (), self.span_from(start))

    # -- types --------------------------------------------------------------

    def type_(self) -> RawType:
        start = self.peek().start
        save = self.pos
        base: Optional[RawType] = None
        try:
            b = self.type_atom()
            if self.peek().kind == "bar":
                self.next()
                base = b
            elif self.peek().kind in ("arrow",):
                raise ParseError("atom followed by arrow", self.span_of(self.peek()))
            else:
                return b
        except ParseError:
            if base is None:
                self.pos = save
        src = self.term()
        self.expect("arrow")
        tgt = self.term()
        return RArrow(src, base, tgt, self.span_from(start))

    def type_atom(self) -> RawType:
        t = self.peek()
        start = t.start
        out: RawType
        if t.kind == "star":
            self.next()
            out = RStar(self.span_of(t))
        elif t.kind == "hole":
            self.next()
            out = RTyHole(self.span_of(t))
        elif t.kind == "susp":
            self.next()
            self.expect("lparen")
            inner = self.type_()
            self.expect("rparen")
            out = RTySusp(inner, self.span_from(start))
        elif t.kind == "lparen":
            self.next()
            inner = self.type_()
            self.expect("rparen")
            out = inner
        else:
            raise ParseError(
                f"unexpected {t.value or 'end of input'!r}",
                self.span_of(t),
                frozenset({"type"}),
            )
        while self.peek().kind in ("lparen", "langle"):
            args = self.args()
            out = RTyApp(out, args, self.span_from(start))
        return out

    # -- contexts -----------------------------------------------------------

    def ctx(self) -> RawCtx:
        t = self.peek()
        start = t.start
        if t.kind == "lparen":
            entries = [self.ctx_entry()]
            while self.peek().kind == "comma":
                self.next()
                entries.append(self.ctx_entry())
            return RListCtx(tuple(entries), self.span_from(start))
        tree = self.tree(element="name")
        return RTreeCtx(tree, self.span_from(start))

    def ctx_entry(self) -> tuple:
        self.expect("lparen")
        name = self.expect("name").value
        self.expect("colon")
        ty = self.type_()
        self.expect("rparen")
        return (name, ty)

    # -- commands -----------------------------------------------------------

    def command(self) -> Command:
        t = self.peek()
        start = t.start
        if t.kind == "def":
            self.next()
            name = self.expect("name").value
            ctx: Optional[RawCtx] = None
            ty: Optional[RawType] = None
            if self.peek().kind != "equals":
                ctx = self.ctx()
                if self.peek().kind == "colon":
                    self.next()
                    ty = self.type_()
            self.expect("equals")
            term = self.term()
            return DefCmd(name, ctx, ty, term, self.span_from(start))
        if t.kind == "normalise":
            self.next()
            term = self.term()
            self.expect("in")
            return NormaliseCmd(term, self.ctx(), self.span_from(start))
        if t.kind == "assert":
            self.next()
            lhs = self.term()
            self.expect("equals")
            rhs = self.term()
            self.expect("in")
            return AssertCmd(lhs, rhs, self.ctx(), self.span_from(start))
        if t.kind == "size":
            self.next()
            term = self.term()
            self.expect("in")
            return SizeCmd(term, self.ctx(), self.span_from(start))
        if t.kind == "import":
            self.next()
            p = self.peek()
            if p.kind not in ("name",):
                raise ParseError("expected a file path", self.span_of(p))
            self.next()
            return ImportCmd(p.value, self.span_from(start))
        raise ParseError(
            f"unexpected {t.value or 'end of input'!r}",
            self.span_of(t),
            frozenset({"def", "normalise", "assert", "size", "import"}),
        )

    def commands(self) -> list[Command]:
        out = []
        while self.peek().kind != "eof":
            out.append(self.command())
        return out


def parse(text: str, source: Optional[str] = None) -> list[Command]:
    return _Parser(text, source).commands()


def parse_term(text: str, source: Optional[str] = None) -> RawTerm:
    p = _Parser(text, source)
    t = p.term()
    p.expect("eof")
    return t


def parse_type(text: str, source: Optional[str] = None) -> RawType:
    p = _Parser(text, source)
    t = p.type_()
    p.expect("eof")
    return t


def parse_ctx(text: str, source: Optional[str] = None) -> RawCtx:
    p = _Parser(text, source)
    c = p.ctx()
    p.expect("eof")
    return c


# ---------------------------------------------------------------------------
# pretty printer


def pretty(x) -> str:
    if isinstance(x, RVar):
        return x.name
    if isinstance(x, RHole) or isinstance(x, RTyHole):
        return "_"
    if isinstance(x, RId):
        return "id"
    if isinstance(x, RComp):
        return "comp"
    if isinstance(x, RCoh):
        return f"coh [ {pretty_tree(x.tree)} : {pretty(x.ty)} ]"
    if isinstance(x, RInc):
        return f"inc<{x.low}-{x.high}>({pretty(x.term)})"
    if isinstance(x, RSusp):
        return f"S({pretty(x.term)})"
    if isinstance(x, RApp):
        return f"{pretty(x.term)}{pretty_args(x.args)}"
    if isinstance(x, RStar):
        return "*"
    if isinstance(x, RArrow):
        if x.base is None:
            return f"{pretty(x.src)} -> {pretty(x.tgt)}"
        return f"{_pretty_base(x.base)} | {pretty(x.src)} -> {pretty(x.tgt)}"
    if isinstance(x, RTySusp):
        return f"S({pretty(x.ty)})"
    if isinstance(x, RTyApp):
        return f"{pretty(x.ty)}{pretty_args(x.args)}"
    if isinstance(x, RTreeCtx):
        return pretty_tree(x.tree)
    if isinstance(x, RListCtx):
        return ", ".join(f"({v} : {pretty(a)})" for v, a in x.entries)
    raise TypeError(f"cannot pretty-print {x!r}")


def _pretty_base(a: RawType) -> str:
    s = pretty(a)
    if isinstance(a, RArrow) and a.base is None:
        return f"({s})"
    return s


def pretty_tree(t: RawTree) -> str:
    out = []
    for i, e in enumerate(t.elements):
        out.append(_pretty_entry(e))
        if i < len(t.branches):
            out.append("{" + pretty_tree(t.branches[i]) + "}")
    return "".join(out)


def _pretty_entry(e) -> str:
    if e is None:
        return ""
    if isinstance(e, str):
        return e
    return pretty(e)


def pretty_args(a: RawArgs) -> str:
    if isinstance(a, RSubArgs):
        inner = ", ".join(pretty(t) for t in a.terms)
        if a.ty is not None:
            return f"({pretty(a.ty)} | {inner})"
        return f"({inner})"
    if a.ty is not None:
        return f"<{pretty(a.ty)} | {pretty_tree(a.tree)}>"
    return f"<{pretty_tree(a.tree)}>"


def pretty_command(c: Command) -> str:
    if isinstance(c, DefCmd):
        out = f"def {c.name}"
        if c.ctx is not None:
            out += f" {pretty(c.ctx)}"
        if c.ty is not None:
            out += f" : {pretty(c.ty)}"
        return out + f" = {pretty(c.term)}"
    if isinstance(c, NormaliseCmd):
        return f"normalise {pretty(c.term)} in {pretty(c.ctx)}"
    if isinstance(c, AssertCmd):
        return f"assert {pretty(c.lhs)} = {pretty(c.rhs)} in {pretty(c.ctx)}"
    if isinstance(c, SizeCmd):
        return f"size {pretty(c.term)} in {pretty(c.ctx)}"
    if isinstance(c, ImportCmd):
        return f"import {c.path}"
    raise TypeError(f"cannot pretty-print {c!r}")


def strip_spans(x):
    """Rebuild a raw syntax value with every span replaced by the
    synthesized span, for span-insensitive comparison."""
    import dataclasses

    if dataclasses.is_dataclass(x) and not isinstance(x, type):
        kwargs = {}
        for f in dataclasses.fields(x):
            v = getattr(x, f.name)
            kwargs[f.name] = SYNTH if f.name == "span" else strip_spans(v)
        return type(x)(**kwargs)
    if isinstance(x, tuple):
        return tuple(strip_spans(v) for v in x)
    return x


# ---------------------------------------------------------------------------
# diagnostics


def render_error(message: str, span: Span, text: Optional[str] = None) -> str:
    """Render a message with a source label pointing into the input."""
    where = span.source or "<input>"
    if text is None:
        return f"error: {message}\n  at {where}:{span.start}-{span.end}"
    line_start = text.rfind("\n", 0, span.start) + 1
    line_end = text.find("\n", span.start)
    if line_end == -1:
        line_end = len(text)
    line_no = text.count("\n", 0, span.start) + 1
    col = span.start - line_start
    width = max(1, min(span.end, line_end) - span.start)
    line = text[line_start:line_end]
    return (
        f"error: {message}\n"
        f"  at {where}:{line_no}:{col + 1}\n"
        f"  | {line}\n"
        f"  | {' ' * col}{'^' * width}"
    )
