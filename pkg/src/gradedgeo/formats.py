"""Declarative text format: lexer, parser, and canonical renderer.

A document is a sequence of declarations (charts, cotangent charts, named
polynomials, structures) followed by tasks.  Parsing resolves every
polynomial against its chart immediately, so a parsed document carries
normalized values; rendering emits a canonical text whose reparse gives an
equal document.  Structure constants are kept as linear expressions and
validated when a task builds the actual algebra.

Grammar sketch::

    chart NAME { coord NAME : INT; ... }
    cotangent NAME = T*[INT] NAME;
    let NAME on NAME = EXPR;
    homotopy-poisson NAME on NAME { pi = EXPR; }
    lie-algebra NAME { basis NAME : INT; ... bracket [NAME, NAME] = EXPR; ... }
    bialgebra NAME { algebra = NAME; shift = INT; d NAME = EXPR; ... }
    courant NAME { lie = NAME; space NAME; ... bracket [[NAME, NAME]] = EXPR; ...
                   anchor NAME = EXPR; ... }
    matched-pair NAME { g = NAME; hstar = NAME; act NAME NAME = EXPR; ...
                        coact NAME NAME = EXPR; ... }
    action NAME { algebra = NAME; chart = NAME; rho NAME { NAME = EXPR; ... } ... }
    moment-map NAME { algebra = NAME; space = NAME; mu NAME = EXPR; ... }
    reduction NAME { structure = NAME; bialgebra = NAME; action = NAME;
                     quotient = NAME; represent NAME = EXPR; ... }
    task VERB ARG ... ;

Expressions use ``+ - * ^`` with rational literals ``a/b``; ``#`` starts a
line comment.  Momenta of a cotangent chart are auto-named ``p_<base>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .algebra import Chart, GradedPolynomial, make_chart
from .cotangent import CotangentChart, build_cotangent


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col
        self.message = message


# ---------------------------------------------------------------------------
# lexer

_PUNCT = "{}()[];:=,+-*^/"


@dataclass(frozen=True)
class Token:
    kind: str  # 'name', 'int', or the punctuation character itself
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch.isdigit():
            start = i
            startcol = col
            while i < n and text[i].isdigit():
                i += 1
                col += 1
            tokens.append(Token("int", text[start:i], line, startcol))
            continue
        if ch.isalpha() or ch == "_":
            start = i
            startcol = col
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
                col += 1
            tokens.append(Token("name", text[start:i], line, startcol))
            continue
        if ch in _PUNCT:
            tokens.append(Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# declarations

LinearExpr = GradedPolynomial  # structure constants parsed over a label chart


@dataclass(frozen=True)
class ChartDecl:
    name: str
    chart: Chart


@dataclass(frozen=True)
class CotangentDecl:
    name: str
    n: int
    base_name: str
    chart: CotangentChart


@dataclass(frozen=True)
class LetDecl:
    name: str
    chart_name: str
    value: GradedPolynomial


@dataclass(frozen=True)
class PoissonDecl:
    name: str
    chart_name: str
    pi: GradedPolynomial


@dataclass(frozen=True)
class LieAlgebraDecl:
    name: str
    basis: tuple[tuple[str, int], ...]
    brackets: tuple[tuple[str, str, LinearExpr], ...]
    label_chart: Chart = field(compare=False)


@dataclass(frozen=True)
class BialgebraDecl:
    name: str
    algebra_name: str
    shift: int
    images: tuple[tuple[str, GradedPolynomial], ...]
    dual_chart: Chart = field(compare=False)


@dataclass(frozen=True)
class CourantDecl:
    name: str
    lie_name: str
    space: tuple[str, ...]
    brackets: tuple[tuple[str, str, LinearExpr], ...]
    anchors: tuple[tuple[str, LinearExpr], ...]
    space_chart: Chart = field(compare=False)
    lie_chart: Chart = field(compare=False)


@dataclass(frozen=True)
class MatchedPairDecl:
    name: str
    g_name: str
    hstar_name: str
    act: tuple[tuple[str, str, LinearExpr], ...]
    coact: tuple[tuple[str, str, LinearExpr], ...]


@dataclass(frozen=True)
class ActionDecl:
    name: str
    algebra_name: str
    chart_name: str
    rho: tuple[tuple[str, tuple[tuple[str, GradedPolynomial], ...]], ...]


@dataclass(frozen=True)
class MomentMapDecl:
    name: str
    algebra_name: str
    space_name: str
    mu: tuple[tuple[str, GradedPolynomial], ...]


@dataclass(frozen=True)
class ReductionDecl:
    name: str
    structure_name: str
    bialgebra_name: str
    action_name: str
    quotient_name: str
    representatives: tuple[tuple[str, GradedPolynomial], ...]
    moment_map_name: Optional[str] = None


@dataclass(frozen=True)
class TaskDecl:
    verb: str
    args: tuple[Union[str, int], ...]

    @property
    def label(self) -> str:
        return " ".join([self.verb] + [str(a) for a in self.args])


Declaration = Union[
    ChartDecl,
    CotangentDecl,
    LetDecl,
    PoissonDecl,
    LieAlgebraDecl,
    BialgebraDecl,
    CourantDecl,
    MatchedPairDecl,
    ActionDecl,
    MomentMapDecl,
    ReductionDecl,
    TaskDecl,
]


@dataclass(frozen=True)
class Document:
    items: tuple[Declaration, ...]

    def tasks(self) -> list[TaskDecl]:
        return [d for d in self.items if isinstance(d, TaskDecl)]

    def declarations(self) -> dict[str, Declaration]:
        out = {}
        for d in self.items:
            if not isinstance(d, TaskDecl):
                out[d.name] = d
        return out


# ---------------------------------------------------------------------------
# parser

_TASK_VERBS = {
    "CHECK-HP",
    "BRACKET",
    "DERIVED",
    "CHECK-BIALG",
    "COURANT2DGLA",
    "MATCHED2BIALG",
    "REDUCE",
    "VERIFY-QUOTIENT",
}

_STATEMENT_KEYWORDS = {
    "chart",
    "cotangent",
    "let",
    "homotopy-poisson",
    "lie-algebra",
    "bialgebra",
    "courant",
    "matched-pair",
    "action",
    "moment-map",
    "reduction",
    "task",
}


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.names: dict[str, Declaration] = {}

    # -- token plumbing -----------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.col)

    def expect(self, kind: str, what: str = "") -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(f"expected {what or kind}, found {tok.text!r}")
        return self.next()

    def expect_name(self, what: str = "a name") -> str:
        return self.expect("name", what).text

    def dashed_word(self) -> str:
        """NAME('-'NAME)*: statement keywords and task verbs may carry dashes."""
        word = self.expect_name("a keyword").strip()
        while self.peek().kind == "-" and self.tokens[self.pos + 1].kind == "name":
            self.next()
            word += "-" + self.next().text
        return word

    def expect_int(self, what: str = "an integer") -> int:
        neg = False
        if self.peek().kind == "-":
            self.next()
            neg = True
        tok = self.expect("int", what)
        return -int(tok.text) if neg else int(tok.text)

    def declare(self, decl: Declaration, tok: Token):
        if decl.name in self.names:
            raise ParseError(f"name {decl.name!r} already declared", tok.line, tok.col)
        self.names[decl.name] = decl

    def lookup(self, name: str, kinds: tuple, what: str, tok: Token) -> Declaration:
        if name not in self.names:
            raise ParseError(f"reference to undeclared name {name!r}", tok.line, tok.col)
        decl = self.names[name]
        if not isinstance(decl, kinds):
            raise ParseError(f"{name!r} is not {what}", tok.line, tok.col)
        return decl

    # -- expressions ----------------------------------------------------------

    def parse_expr(self, chart: Chart) -> GradedPolynomial:
        value = self.parse_term(chart)
        while self.peek().kind in "+-":
            op = self.next().kind
            rhs = self.parse_term(chart)
            value = value + rhs if op == "+" else value - rhs
        return value

    def parse_term(self, chart: Chart) -> GradedPolynomial:
        value = self.parse_factor(chart)
        while self.peek().kind == "*":
            self.next()
            value = value * self.parse_factor(chart)
        return value

    def parse_factor(self, chart: Chart) -> GradedPolynomial:
        if self.peek().kind == "-":
            self.next()
            return -self.parse_factor(chart)
        value = self.parse_atom(chart)
        while self.peek().kind == "^":
            self.next()
            exp_tok = self.peek()
            exp = self.expect_int("an exponent")
            if exp < 0:
                raise ParseError("negative exponents are not allowed", exp_tok.line, exp_tok.col)
            value = value ** exp
        return value

    def parse_atom(self, chart: Chart) -> GradedPolynomial:
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            num = int(tok.text)
            if self.peek().kind == "/":
                self.next()
                den_tok = self.expect("int", "a denominator")
                den = int(den_tok.text)
                if den == 0:
                    raise ParseError("zero denominator", den_tok.line, den_tok.col)
                return chart.constant(Fraction(num, den))
            return chart.constant(num)
        if tok.kind == "name":
            self.next()
            try:
                return chart.var(tok.text)
            except KeyError:
                raise ParseError(
                    f"unknown coordinate {tok.text!r} on this chart", tok.line, tok.col
                ) from None
        if tok.kind == "(":
            self.next()
            value = self.parse_expr(chart)
            self.expect(")")
            return value
        self.fail(f"expected an expression, found {tok.text!r}")

    # -- statements -----------------------------------------------------------

    def parse_document(self) -> Document:
        items: list[Declaration] = []
        while self.peek().kind != "eof":
            items.append(self.parse_statement())
        return Document(tuple(items))

    def parse_statement(self) -> Declaration:
        tok = self.peek()
        if tok.kind != "name":
            self.fail(f"expected a declaration or task, found {tok.text!r}")
        word = self.dashed_word()
        if word not in _STATEMENT_KEYWORDS:
            self.fail(f"unknown declaration keyword {word!r}", tok)
        return getattr(self, "parse_" + word.replace("-", "_"))(tok)

    def parse_chart(self, tok: Token) -> ChartDecl:
        name = self.expect_name("a chart name")
        self.expect("{")
        coords = []
        while self.peek().kind != "}":
            kw = self.expect_name("'coord'")
            if kw != "coord":
                self.fail(f"expected 'coord', found {kw!r}")
            cname = self.expect_name("a coordinate name")
            self.expect(":")
            degree = self.expect_int("a degree")
            self.expect(";")
            coords.append((cname, degree))
        self.expect("}")
        try:
            chart = make_chart(coords)
        except ValueError as exc:
            raise ParseError(str(exc), tok.line, tok.col) from None
        decl = ChartDecl(name, chart)
        self.declare(decl, tok)
        return decl

    def parse_cotangent(self, tok: Token) -> CotangentDecl:
        name = self.expect_name("a chart name")
        self.expect("=")
        t = self.expect_name("'T'")
        if t != "T":
            self.fail("expected 'T*[n]'", tok)
        self.expect("*")
        self.expect("[")
        n = self.expect_int("the shift degree")
        self.expect("]")
        base_tok = self.peek()
        base_name = self.expect_name("a base chart name")
        self.expect(";")
        base = self.lookup(base_name, (ChartDecl,), "a chart", base_tok)
        try:
            chart = build_cotangent(base.chart, n)
        except ValueError as exc:
            raise ParseError(str(exc), tok.line, tok.col) from None
        decl = CotangentDecl(name, n, base_name, chart)
        self.declare(decl, tok)
        return decl

    def _chart_of(self, name: str, tok: Token) -> Chart:
        decl = self.lookup(name, (ChartDecl, CotangentDecl), "a chart", tok)
        return decl.chart

    def parse_let(self, tok: Token) -> LetDecl:
        name = self.expect_name("a value name")
        kw = self.expect_name("'on'")
        if kw != "on":
            self.fail("expected 'on'")
        chart_tok = self.peek()
        chart_name = self.expect_name("a chart name")
        self.expect("=")
        value = self.parse_expr(self._chart_of(chart_name, chart_tok))
        self.expect(";")
        decl = LetDecl(name, chart_name, value)
        self.declare(decl, tok)
        return decl

    def parse_homotopy_poisson(self, tok: Token) -> PoissonDecl:
        name = self.expect_name("a structure name")
        kw = self.expect_name("'on'")
        if kw != "on":
            self.fail("expected 'on'")
        chart_tok = self.peek()
        chart_name = self.expect_name("a cotangent chart name")
        decl_chart = self.lookup(chart_name, (CotangentDecl,), "a cotangent chart", chart_tok)
        self.expect("{")
        kw = self.expect_name("'pi'")
        if kw != "pi":
            self.fail("expected 'pi'")
        self.expect("=")
        pi = self.parse_expr(decl_chart.chart)
        self.expect(";")
        self.expect("}")
        decl = PoissonDecl(name, chart_name, pi)
        self.declare(decl, tok)
        return decl

    def parse_lie_algebra(self, tok: Token) -> LieAlgebraDecl:
        name = self.expect_name("an algebra name")
        self.expect("{")
        basis: list[tuple[str, int]] = []
        brackets = []
        label_chart: Optional[Chart] = None
        while self.peek().kind != "}":
            kw_tok = self.peek()
            kw = self.expect_name("'basis' or 'bracket'")
            if kw == "basis":
                if brackets:
                    self.fail("basis lines must precede bracket lines", kw_tok)
                bname = self.expect_name("a basis name")
                self.expect(":")
                degree = self.expect_int()
                self.expect(";")
                basis.append((bname, degree))
            elif kw == "bracket":
                if label_chart is None:
                    try:
                        label_chart = make_chart(basis)
                    except ValueError as exc:
                        raise ParseError(str(exc), kw_tok.line, kw_tok.col) from None
                self.expect("[")
                left = self.expect_name("a basis name")
                self.expect(",")
                right = self.expect_name("a basis name")
                self.expect("]")
                self.expect("=")
                value = self.parse_expr(label_chart)
                self.expect(";")
                brackets.append((left, right, value))
            else:
                self.fail(f"expected 'basis' or 'bracket', found {kw!r}", kw_tok)
        self.expect("}")
        if label_chart is None:
            try:
                label_chart = make_chart(basis)
            except ValueError as exc:
                raise ParseError(str(exc), tok.line, tok.col) from None
        decl = LieAlgebraDecl(name, tuple(basis), tuple(brackets), label_chart)
        self.declare(decl, tok)
        return decl

    def parse_bialgebra(self, tok: Token) -> BialgebraDecl:
        name = self.expect_name("a bialgebra name")
        self.expect("{")
        kw = self.expect_name("'algebra'")
        if kw != "algebra":
            self.fail("a bialgebra block starts with 'algebra = NAME;'")
        self.expect("=")
        alg_tok = self.peek()
        algebra_name = self.expect_name("a lie-algebra name")
        alg = self.lookup(algebra_name, (LieAlgebraDecl,), "a lie-algebra", alg_tok)
        self.expect(";")
        kw = self.expect_name("'shift'")
        if kw != "shift":
            self.fail("expected 'shift = n;'")
        self.expect("=")
        shift_tok = self.peek()
        shift = self.expect_int("the shift degree")
        if shift < 1:
            self.fail("the shift degree must be positive", shift_tok)
        self.expect(";")
        dual_chart = make_chart([(b, d + shift) for b, d in alg.basis])
        images = []
        while self.peek().kind != "}":
            kw = self.expect_name("'d'")
            if kw != "d":
                self.fail(f"expected 'd', found {kw!r}")
            target = self.expect_name("a basis name")
            if target not in dict(alg.basis):
                self.fail(f"{target!r} is not a basis element of {algebra_name!r}")
            self.expect("=")
            value = self.parse_expr(dual_chart)
            self.expect(";")
            images.append((target, value))
        self.expect("}")
        decl = BialgebraDecl(name, algebra_name, shift, tuple(images), dual_chart)
        self.declare(decl, tok)
        return decl

    def parse_courant(self, tok: Token) -> CourantDecl:
        name = self.expect_name("a courant name")
        self.expect("{")
        kw = self.expect_name("'lie'")
        if kw != "lie":
            self.fail("a courant block starts with 'lie = NAME;'")
        self.expect("=")
        lie_tok = self.peek()
        lie_name = self.expect_name("a lie-algebra name")
        lie = self.lookup(lie_name, (LieAlgebraDecl,), "a lie-algebra", lie_tok)
        self.expect(";")
        space: list[str] = []
        brackets = []
        anchors = []
        space_chart: Optional[Chart] = None
        while self.peek().kind != "}":
            kw_tok = self.peek()
            kw = self.expect_name("'space', 'bracket', or 'anchor'")
            if kw == "space":
                if brackets or anchors:
                    self.fail("space lines must precede bracket and anchor lines", kw_tok)
                space.append(self.expect_name("a space basis name"))
                self.expect(";")
            else:
                if space_chart is None:
                    try:
                        space_chart = make_chart([(s, 0) for s in space])
                    except ValueError as exc:
                        raise ParseError(str(exc), kw_tok.line, kw_tok.col) from None
                if kw == "bracket":
                    self.expect("[")
                    self.expect("[")
                    left = self.expect_name("a space basis name")
                    self.expect(",")
                    right = self.expect_name("a space basis name")
                    self.expect("]")
                    self.expect("]")
                    self.expect("=")
                    value = self.parse_expr(space_chart)
                    self.expect(";")
                    brackets.append((left, right, value))
                elif kw == "anchor":
                    src = self.expect_name("a space basis name")
                    self.expect("=")
                    value = self.parse_expr(lie.label_chart)
                    self.expect(";")
                    anchors.append((src, value))
                else:
                    self.fail(f"expected 'space', 'bracket', or 'anchor', found {kw!r}", kw_tok)
        self.expect("}")
        if space_chart is None:
            space_chart = make_chart([(s, 0) for s in space])
        decl = CourantDecl(
            name, lie_name, tuple(space), tuple(brackets), tuple(anchors),
            space_chart, lie.label_chart,
        )
        self.declare(decl, tok)
        return decl

    def parse_matched_pair(self, tok: Token) -> MatchedPairDecl:
        name = self.expect_name("a matched-pair name")
        self.expect("{")
        kw = self.expect_name("'g'")
        if kw != "g":
            self.fail("a matched-pair block starts with 'g = NAME;'")
        self.expect("=")
        g_tok = self.peek()
        g_name = self.expect_name("a lie-algebra name")
        g = self.lookup(g_name, (LieAlgebraDecl,), "a lie-algebra", g_tok)
        self.expect(";")
        kw = self.expect_name("'hstar'")
        if kw != "hstar":
            self.fail("expected 'hstar = NAME;'")
        self.expect("=")
        h_tok = self.peek()
        hstar_name = self.expect_name("a lie-algebra name")
        hstar = self.lookup(hstar_name, (LieAlgebraDecl,), "a lie-algebra", h_tok)
        self.expect(";")
        act = []
        coact = []
        while self.peek().kind != "}":
            kw_tok = self.peek()
            kw = self.expect_name("'act' or 'coact'")
            if kw == "act":
                gb = self.expect_name("a g basis name")
                hb = self.expect_name("an hstar basis name")
                if gb not in dict(g.basis):
                    self.fail(f"{gb!r} is not a basis element of {g_name!r}", kw_tok)
                if hb not in dict(hstar.basis):
                    self.fail(f"{hb!r} is not a basis element of {hstar_name!r}", kw_tok)
                self.expect("=")
                value = self.parse_expr(hstar.label_chart)
                self.expect(";")
                act.append((gb, hb, value))
            elif kw == "coact":
                hb = self.expect_name("an hstar basis name")
                gb = self.expect_name("a g basis name")
                if hb not in dict(hstar.basis):
                    self.fail(f"{hb!r} is not a basis element of {hstar_name!r}", kw_tok)
                if gb not in dict(g.basis):
                    self.fail(f"{gb!r} is not a basis element of {g_name!r}", kw_tok)
                self.expect("=")
                value = self.parse_expr(g.label_chart)
                self.expect(";")
                coact.append((hb, gb, value))
            else:
                self.fail(f"expected 'act' or 'coact', found {kw!r}", kw_tok)
        self.expect("}")
        decl = MatchedPairDecl(name, g_name, hstar_name, tuple(act), tuple(coact))
        self.declare(decl, tok)
        return decl

    def parse_action(self, tok: Token) -> ActionDecl:
        name = self.expect_name("an action name")
        self.expect("{")
        kw = self.expect_name("'algebra'")
        if kw != "algebra":
            self.fail("an action block starts with 'algebra = NAME;'")
        self.expect("=")
        alg_tok = self.peek()
        algebra_name = self.expect_name("an algebra name")
        alg = self.lookup(
            algebra_name, (LieAlgebraDecl, BialgebraDecl), "a lie-algebra or bialgebra", alg_tok
        )
        basis_names = dict(
            alg.basis if isinstance(alg, LieAlgebraDecl)
            else self.names[alg.algebra_name].basis  # type: ignore[union-attr]
        )
        self.expect(";")
        kw = self.expect_name("'chart'")
        if kw != "chart":
            self.fail("expected 'chart = NAME;'")
        self.expect("=")
        chart_tok = self.peek()
        chart_name = self.expect_name("a chart name")
        chart = self._chart_of(chart_name, chart_tok)
        self.expect(";")
        rho = []
        while self.peek().kind != "}":
            kw_tok = self.peek()
            kw = self.expect_name("'rho'")
            if kw != "rho":
                self.fail(f"expected 'rho', found {kw!r}", kw_tok)
            vname = self.expect_name("a basis name")
            if vname not in basis_names:
                self.fail(f"{vname!r} is not a basis element of {algebra_name!r}", kw_tok)
            self.expect("{")
            images = []
            while self.peek().kind != "}":
                cname_tok = self.peek()
                cname = self.expect_name("a coordinate name")
                if cname not in chart.names():
                    self.fail(f"{cname!r} is not a coordinate of {chart_name!r}", cname_tok)
                self.expect("=")
                value = self.parse_expr(chart)
                self.expect(";")
                images.append((cname, value))
            self.expect("}")
            rho.append((vname, tuple(images)))
        self.expect("}")
        decl = ActionDecl(name, algebra_name, chart_name, tuple(rho))
        self.declare(decl, tok)
        return decl

    def parse_moment_map(self, tok: Token) -> MomentMapDecl:
        name = self.expect_name("a moment-map name")
        self.expect("{")
        kw = self.expect_name("'algebra'")
        if kw != "algebra":
            self.fail("a moment-map block starts with 'algebra = NAME;'")
        self.expect("=")
        alg_tok = self.peek()
        algebra_name = self.expect_name("an algebra name")
        alg = self.lookup(
            algebra_name, (LieAlgebraDecl, BialgebraDecl), "a lie-algebra or bialgebra", alg_tok
        )
        basis_names = dict(
            alg.basis if isinstance(alg, LieAlgebraDecl)
            else self.names[alg.algebra_name].basis  # type: ignore[union-attr]
        )
        self.expect(";")
        kw = self.expect_name("'space'")
        if kw != "space":
            self.fail("expected 'space = NAME;'")
        self.expect("=")
        space_tok = self.peek()
        space_name = self.expect_name("a cotangent chart name")
        space = self.lookup(space_name, (CotangentDecl,), "a cotangent chart", space_tok)
        self.expect(";")
        mu = []
        while self.peek().kind != "}":
            kw_tok = self.peek()
            kw = self.expect_name("'mu'")
            if kw != "mu":
                self.fail(f"expected 'mu', found {kw!r}", kw_tok)
            vname = self.expect_name("a basis name")
            if vname not in basis_names:
                self.fail(f"{vname!r} is not a basis element of {algebra_name!r}", kw_tok)
            self.expect("=")
            value = self.parse_expr(space.chart)
            self.expect(";")
            mu.append((vname, value))
        self.expect("}")
        decl = MomentMapDecl(name, algebra_name, space_name, tuple(mu))
        self.declare(decl, tok)
        return decl

    def parse_reduction(self, tok: Token) -> ReductionDecl:
        name = self.expect_name("a reduction name")
        self.expect("{")
        fields: dict[str, str] = {}
        representatives = []
        quotient_chart: Optional[Chart] = None
        structure_chart: Optional[Chart] = None
        while self.peek().kind != "}":
            kw_tok = self.peek()
            kw = self.dashed_word()
            if kw in ("structure", "bialgebra", "action", "quotient", "moment-map"):
                self.expect("=")
                ref_tok = self.peek()
                ref = self.expect_name("a declaration name")
                self.expect(";")
                if kw in fields:
                    self.fail(f"duplicate field {kw!r}", kw_tok)
                fields[kw] = ref
                if kw == "structure":
                    decl = self.lookup(ref, (PoissonDecl,), "a homotopy-poisson structure", ref_tok)
                    structure_chart = self._chart_of(decl.chart_name, ref_tok)
                elif kw == "bialgebra":
                    self.lookup(ref, (BialgebraDecl,), "a bialgebra", ref_tok)
                elif kw == "action":
                    self.lookup(ref, (ActionDecl,), "an action", ref_tok)
                elif kw == "moment-map":
                    self.lookup(ref, (MomentMapDecl,), "a moment map", ref_tok)
                else:
                    decl = self.lookup(ref, (CotangentDecl,), "a cotangent chart", ref_tok)
                    quotient_chart = decl.chart
            elif kw == "represent":
                if structure_chart is None or quotient_chart is None:
                    self.fail("'represent' lines must follow 'structure' and 'quotient'", kw_tok)
                cname = self.expect_name("a quotient coordinate name")
                if cname not in quotient_chart.names():
                    self.fail(f"{cname!r} is not a quotient coordinate", kw_tok)
                self.expect("=")
                value = self.parse_expr(structure_chart)
                self.expect(";")
                representatives.append((cname, value))
            else:
                self.fail(f"unknown reduction field {kw!r}", kw_tok)
        self.expect("}")
        for required in ("structure", "bialgebra", "action", "quotient"):
            if required not in fields:
                raise ParseError(
                    f"reduction {name!r} is missing the {required!r} field", tok.line, tok.col
                )
        decl = ReductionDecl(
            name,
            fields["structure"],
            fields["bialgebra"],
            fields["action"],
            fields["quotient"],
            tuple(representatives),
            fields.get("moment-map"),
        )
        self.declare(decl, tok)
        return decl

    def parse_task(self, tok: Token) -> TaskDecl:
        verb_tok = self.peek()
        verb = self.dashed_word().upper()
        if verb not in _TASK_VERBS:
            raise ParseError(f"unknown task verb {verb!r}", verb_tok.line, verb_tok.col)
        args: list[Union[str, int]] = []
        while self.peek().kind != ";":
            t = self.peek()
            if t.kind == "name":
                args.append(self.next().text)
            elif t.kind == "int":
                args.append(int(self.next().text))
            else:
                self.fail(f"expected a task argument, found {t.text!r}")
        self.expect(";")
        for a in args:
            if isinstance(a, str) and a not in self.names:
                raise ParseError(f"reference to undeclared name {a!r}", tok.line, tok.col)
        return TaskDecl(verb, tuple(args))


def parse_document(text: str) -> Document:
    return _Parser(text).parse_document()


# ---------------------------------------------------------------------------
# canonical rendering


def render_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def render_polynomial(p: GradedPolynomial) -> str:
    if p.is_zero():
        return "0"
    chart = p.chart
    parts = []
    for factors, coeff in p.sorted_terms():
        body = "*".join(
            chart.coordinates[i].name + (f"^{e}" if e > 1 else "")
            for i, e in factors
        )
        mag = abs(coeff)
        if not body:
            text = render_fraction(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{render_fraction(mag)}*{body}"
        parts.append(("-" if coeff < 0 else "+", text))
    sign, first = parts[0]
    out = ("-" if sign == "-" else "") + first
    for sign, text in parts[1:]:
        out += f" {sign} {text}"
    return out


def _render_items(lines: list[str]) -> str:
    return "\n".join(lines) + "\n"


def render_document(doc: Document) -> str:
    lines: list[str] = []
    for item in doc.items:
        if isinstance(item, ChartDecl):
            lines.append(f"chart {item.name} {{")
            for c in item.chart.coordinates:
                lines.append(f"  coord {c.name} : {c.degree};")
            lines.append("}")
        elif isinstance(item, CotangentDecl):
            lines.append(f"cotangent {item.name} = T*[{item.n}] {item.base_name};")
        elif isinstance(item, LetDecl):
            lines.append(f"let {item.name} on {item.chart_name} = {render_polynomial(item.value)};")
        elif isinstance(item, PoissonDecl):
            lines.append(f"homotopy-poisson {item.name} on {item.chart_name} {{")
            lines.append(f"  pi = {render_polynomial(item.pi)};")
            lines.append("}")
        elif isinstance(item, LieAlgebraDecl):
            lines.append(f"lie-algebra {item.name} {{")
            for b, d in item.basis:
                lines.append(f"  basis {b} : {d};")
            for l, r, v in item.brackets:
                lines.append(f"  bracket [{l}, {r}] = {render_polynomial(v)};")
            lines.append("}")
        elif isinstance(item, BialgebraDecl):
            lines.append(f"bialgebra {item.name} {{")
            lines.append(f"  algebra = {item.algebra_name};")
            lines.append(f"  shift = {item.shift};")
            for t, v in item.images:
                lines.append(f"  d {t} = {render_polynomial(v)};")
            lines.append("}")
        elif isinstance(item, CourantDecl):
            lines.append(f"courant {item.name} {{")
            lines.append(f"  lie = {item.lie_name};")
            for s in item.space:
                lines.append(f"  space {s};")
            for l, r, v in item.brackets:
                lines.append(f"  bracket [[{l}, {r}]] = {render_polynomial(v)};")
            for s, v in item.anchors:
                lines.append(f"  anchor {s} = {render_polynomial(v)};")
            lines.append("}")
        elif isinstance(item, MatchedPairDecl):
            lines.append(f"matched-pair {item.name} {{")
            lines.append(f"  g = {item.g_name};")
            lines.append(f"  hstar = {item.hstar_name};")
            for gb, hb, v in item.act:
                lines.append(f"  act {gb} {hb} = {render_polynomial(v)};")
            for hb, gb, v in item.coact:
                lines.append(f"  coact {hb} {gb} = {render_polynomial(v)};")
            lines.append("}")
        elif isinstance(item, ActionDecl):
            lines.append(f"action {item.name} {{")
            lines.append(f"  algebra = {item.algebra_name};")
            lines.append(f"  chart = {item.chart_name};")
            for v, images in item.rho:
                lines.append(f"  rho {v} {{")
                for cname, value in images:
                    lines.append(f"    {cname} = {render_polynomial(value)};")
                lines.append("  }")
            lines.append("}")
        elif isinstance(item, MomentMapDecl):
            lines.append(f"moment-map {item.name} {{")
            lines.append(f"  algebra = {item.algebra_name};")
            lines.append(f"  space = {item.space_name};")
            for v, value in item.mu:
                lines.append(f"  mu {v} = {render_polynomial(value)};")
            lines.append("}")
        elif isinstance(item, ReductionDecl):
            lines.append(f"reduction {item.name} {{")
            lines.append(f"  structure = {item.structure_name};")
            lines.append(f"  bialgebra = {item.bialgebra_name};")
            lines.append(f"  action = {item.action_name};")
            if item.moment_map_name:
                lines.append(f"  moment-map = {item.moment_map_name};")
            lines.append(f"  quotient = {item.quotient_name};")
            for cname, value in item.representatives:
                lines.append(f"  represent {cname} = {render_polynomial(value)};")
            lines.append("}")
        elif isinstance(item, TaskDecl):
            args = " ".join(str(a) for a in item.args)
            lines.append(f"task {item.verb}{' ' + args if args else ''};")
        else:  # pragma: no cover
            raise TypeError(f"cannot render {item!r}")
    return _render_items(lines) if lines else ""
