"""Workspace description language: declarations of charts, function symbols,
Lie algebras, subgroups, fields, forms, chains, actions, points and check
directives, with source-span error reporting and a canonical renderer.

Declarations must appear before use (no forward references).  Scalar
subexpressions share one surface syntax (`K(z)`, `D(K(z),z)`, `p/q`, `^`);
`d(x)` is a form atom, `D(x)` a chain atom, and `^` between tensor atoms is
the wedge.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dfield
from fractions import Fraction

from . import chart_calculus as cc
from . import scalar_field as sf
from .action_analysis import ActionSpec
from .lie_cohomology import LieAlgebra, SubgroupSpec


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int      # 1-based
    column: int    # 1-based
    length: int

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


class ParseError(ValueError):
    def __init__(self, message, span=None):
        super().__init__(f"{span}: {message}" if span else message)
        self.message = message
        self.span = span


class UnknownReference(ParseError):
    pass


class ArityMismatch(ParseError):
    pass


class DuplicateName(ParseError):
    pass


_KEYWORDS = {
    "lie_algebra", "subgroup", "chart", "function", "vectorfield", "form",
    "chain", "action", "point", "check", "on", "of", "dim", "bracket",
    "span", "component", "coords", "generators", "orbit_dim", "algebra",
}
_RESERVED = _KEYWORDS | {"d", "D", "wedge"}

_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*|[0-9]+|[{}\[\]()=,+\-*/^]")


@dataclass(frozen=True)
class Token:
    kind: str   # name | int | op | eof
    text: str
    line: int
    column: int

    def span(self, file):
        return SourceSpan(file, self.line, self.column, max(len(self.text), 1))


def _tokenize(text, file):
    tokens = []
    for line_no, line in enumerate(text.split("\n"), start=1):
        pos = 0
        while pos < len(line):
            ch = line[pos]
            if ch in " \t\r":
                pos += 1
                continue
            if ch == "#":
                break
            m = _TOKEN_RE.match(line, pos)
            if not m:
                raise ParseError(f"unexpected character {ch!r}",
                                 SourceSpan(file, line_no, pos + 1, 1))
            text_tok = m.group(0)
            if text_tok[0].isdigit():
                kind = "int"
            elif text_tok[0].isalpha() or text_tok[0] == "_":
                kind = "name"
            else:
                kind = "op"
            tokens.append(Token(kind, text_tok, line_no, pos + 1))
            pos = m.end()
    last = tokens[-1] if tokens else None
    tokens.append(Token("eof", "", last.line if last else 1,
                        (last.column + len(last.text)) if last else 1))
    return tokens


# ---------------------------------------------------------------------------
# workspace model


@dataclass
class FunctionDecl:
    name: str
    args: tuple


@dataclass
class SubgroupDecl:
    name: str
    algebra: str
    span_indices: tuple          # 1-based basis indices
    components: tuple            # matrices as tuples of tuples of Fraction
    spec: SubgroupSpec


@dataclass
class ActionDecl:
    name: str
    algebra: str
    chart: str
    generators: tuple            # vector field names
    orbit_dim: int
    spec: ActionSpec


@dataclass
class CheckDecl:
    kind: str
    args: tuple                  # members: ("name", str) or ("int", int)
    kwargs: dict                 # keyword -> tuple of names
    span: SourceSpan = dfield(compare=False, default=None)


@dataclass
class Workspace:
    source_name: str = dfield(compare=False, default="<input>")
    charts: dict = dfield(default_factory=dict)
    functions: dict = dfield(default_factory=dict)
    lie_algebras: dict = dfield(default_factory=dict)
    subgroups: dict = dfield(default_factory=dict)
    vector_fields: dict = dfield(default_factory=dict)
    forms: dict = dfield(default_factory=dict)
    chains: dict = dfield(default_factory=dict)
    actions: dict = dfield(default_factory=dict)
    points: dict = dfield(default_factory=dict)    # name -> (chart name, tuple)
    checks: list = dfield(default_factory=list)
    order: list = dfield(default_factory=list)     # (kind, name-or-index)

    def find_object(self, name):
        """Resolve a name across forms, vector fields and chains."""
        hits = [(kind, store[name])
                for kind, store in (("form", self.forms),
                                    ("field", self.vector_fields),
                                    ("chain", self.chains))
                if name in store]
        if not hits:
            raise KeyError(name)
        if len(hits) > 1:
            raise ValueError(f"name {name!r} is ambiguous across kinds")
        return hits[0]


# ---------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, text, file):
        self.tokens = _tokenize(text, file)
        self.i = 0
        self.file = file
        self.ws = Workspace(source_name=file)

    # -- token plumbing --------------------------------------------------

    def peek(self, offset=0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def advance(self):
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def error(self, message, tok=None, cls=ParseError):
        tok = tok or self.peek()
        raise cls(message, tok.span(self.file))

    def expect(self, text=None, kind=None, what=None):
        tok = self.peek()
        if text is not None and tok.text != text:
            self.error(f"expected {what or repr(text)}, found {tok.text!r}")
        if kind is not None and tok.kind != kind:
            self.error(f"expected {what or kind}, found {tok.text!r}")
        return self.advance()

    def expect_int(self, what="an integer"):
        tok = self.expect(kind="int", what=what)
        return int(tok.text)

    def expect_name(self, what="a name"):
        tok = self.peek()
        if tok.kind != "name":
            self.error(f"expected {what}, found {tok.text!r}")
        return self.advance()

    def declare(self, store, name_tok, value, kind):
        name = name_tok.text
        if name in _RESERVED:
            self.error(f"{name!r} is reserved and cannot name a {kind}", name_tok)
        if name in store:
            self.error(f"duplicate {kind} name {name!r}", name_tok, DuplicateName)
        store[name] = value
        self.ws.order.append((kind, name))

    def lookup(self, store, name_tok, kind):
        name = name_tok.text
        if name not in store:
            self.error(f"unknown {kind} {name!r}", name_tok, UnknownReference)
        return store[name]

    def rational(self):
        neg = False
        if self.peek().text == "-":
            self.advance()
            neg = True
        num = self.expect_int("a rational number")
        den = 1
        if self.peek().text == "/":
            self.advance()
            den_tok = self.peek()
            den = self.expect_int("a denominator")
            if den == 0:
                self.error("zero denominator", den_tok)
        value = Fraction(num, den)
        return -value if neg else value

    # -- entry -------------------------------------------------------------

    def parse_file(self):
        handlers = {
            "lie_algebra": self.parse_lie_algebra,
            "subgroup": self.parse_subgroup,
            "chart": self.parse_chart,
            "function": self.parse_function,
            "vectorfield": self.parse_vectorfield,
            "form": self.parse_form,
            "chain": self.parse_chain,
            "action": self.parse_action,
            "point": self.parse_point,
            "check": self.parse_check,
        }
        while self.peek().kind != "eof":
            tok = self.peek()
            handler = handlers.get(tok.text)
            if handler is None:
                self.error(f"expected a declaration keyword, found {tok.text!r}")
            handler()
        return self.ws

    # -- declarations -------------------------------------------------------

    def parse_lie_algebra(self):
        self.expect("lie_algebra")
        name_tok = self.expect_name("an algebra name")
        self.expect("{")
        self.expect("dim")
        dim_tok = self.peek()
        dim = self.expect_int("the dimension")
        if dim < 1:
            self.error("dimension must be positive", dim_tok)
        brackets = {}
        while self.peek().text == "bracket":
            self.advance()
            self.expect("[")
            i_tok = self.peek()
            i = self.expect_int("a basis index")
            self.expect(",")
            j_tok = self.peek()
            j = self.expect_int("a basis index")
            self.expect("]")
            if not 1 <= i <= dim or not 1 <= j <= dim:
                self.error("basis index out of range", i_tok if not 1 <= i <= dim else j_tok)
            if i >= j:
                self.error("bracket indices must satisfy i < j (antisymmetry fixes the rest)",
                           i_tok)
            if (i - 1, j - 1) in brackets:
                self.error(f"duplicate bracket [{i},{j}]", i_tok, DuplicateName)
            self.expect("=")
            brackets[(i - 1, j - 1)] = self.parse_lincomb(dim)
        self.expect("}")
        self.declare(self.ws.lie_algebras, name_tok, LieAlgebra(dim, brackets), "lie_algebra")

    def parse_lincomb(self, dim):
        """Linear combination of basis symbols e1..ep with rational coefficients."""
        out = {}
        first = True
        while True:
            sign = Fraction(1)
            if self.peek().text == "-":
                self.advance()
                sign = Fraction(-1)
            elif self.peek().text == "+":
                if first:
                    self.error("a linear combination cannot start with '+'")
                self.advance()
            elif not first:
                break
            coeff = Fraction(1)
            if self.peek().kind == "int":
                num = self.expect_int()
                den = 1
                if self.peek().text == "/":
                    self.advance()
                    den_tok = self.peek()
                    den = self.expect_int("a denominator")
                    if den == 0:
                        self.error("zero denominator", den_tok)
                coeff = Fraction(num, den)
                self.expect("*", what="'*' before the basis symbol")
            tok = self.expect_name("a basis symbol e1..e%d" % dim)
            m = re.fullmatch(r"e([0-9]+)", tok.text)
            if not m or not 1 <= int(m.group(1)) <= dim:
                self.error(f"expected a basis symbol e1..e{dim}", tok)
            k = int(m.group(1)) - 1
            out[k] = out.get(k, Fraction(0)) + sign * coeff
            first = False
            if self.peek().text not in {"+", "-"}:
                break
        return {k: c for k, c in out.items() if c != 0}

    def parse_subgroup(self):
        self.expect("subgroup")
        name_tok = self.expect_name("a subgroup name")
        self.expect("of")
        alg_tok = self.expect_name("an algebra name")
        algebra = self.lookup(self.ws.lie_algebras, alg_tok, "lie_algebra")
        self.expect("{")
        self.expect("span")
        self.expect("=")
        self.expect("[")
        indices = []
        while self.peek().text != "]":
            tok = self.peek()
            idx = self.expect_int("a basis index")
            if not 1 <= idx <= algebra.dim:
                self.error("basis index out of range", tok)
            if idx in indices:
                self.error(f"repeated index {idx} in span", tok, DuplicateName)
            indices.append(idx)
            if self.peek().text == ",":
                self.advance()
        self.expect("]")
        components = []
        while self.peek().text == "component":
            self.advance()
            components.append(self.parse_matrix(algebra.dim))
        self.expect("}")
        basis = []
        for idx in indices:
            v = [Fraction(0)] * algebra.dim
            v[idx - 1] = Fraction(1)
            basis.append(v)
        spec = SubgroupSpec.from_vectors(basis, components)
        self.declare(self.ws.subgroups, name_tok,
                     SubgroupDecl(name_tok.text, alg_tok.text, tuple(indices),
                                  tuple(tuple(tuple(r) for r in m) for m in components), spec),
                     "subgroup")

    def parse_matrix(self, dim):
        open_tok = self.expect("[")
        rows = []
        while True:
            self.expect("[")
            row = [self.rational()]
            while self.peek().text == ",":
                self.advance()
                row.append(self.rational())
            self.expect("]")
            rows.append(row)
            if self.peek().text == ",":
                self.advance()
                continue
            break
        self.expect("]")
        if len(rows) != dim or any(len(r) != dim for r in rows):
            self.error(f"component matrix must be {dim}x{dim}", open_tok, ArityMismatch)
        return rows

    def parse_chart(self):
        self.expect("chart")
        name_tok = self.expect_name("a chart name")
        self.expect("{")
        self.expect("coords")
        self.expect("=")
        self.expect("[")
        coords = []
        while True:
            tok = self.expect_name("a coordinate name")
            if tok.text in _RESERVED:
                self.error(f"{tok.text!r} is reserved and cannot be a coordinate", tok)
            if tok.text in coords:
                self.error(f"repeated coordinate {tok.text!r}", tok, DuplicateName)
            coords.append(tok.text)
            if self.peek().text == ",":
                self.advance()
                continue
            break
        self.expect("]")
        self.expect("}")
        self.declare(self.ws.charts, name_tok, cc.Chart(tuple(coords)), "chart")

    def parse_function(self):
        self.expect("function")
        name_tok = self.expect_name("a function name")
        self.expect("(")
        args = [self.expect_name("a coordinate name").text]
        while self.peek().text == ",":
            self.advance()
            args.append(self.expect_name("a coordinate name").text)
        self.expect(")")
        known = {c for chart in self.ws.charts.values() for c in chart.coordinates}
        for a in args:
            if a not in known:
                self.error(f"unknown coordinate {a!r} in function declaration",
                           name_tok, UnknownReference)
        if len(set(args)) != len(args):
            self.error("function arguments must be distinct", name_tok, DuplicateName)
        self.declare(self.ws.functions, name_tok,
                     FunctionDecl(name_tok.text, tuple(args)), "function")

    def _on_chart(self):
        self.expect("on")
        chart_tok = self.expect_name("a chart name")
        return self.lookup(self.ws.charts, chart_tok, "chart")

    def parse_vectorfield(self):
        self.expect("vectorfield")
        name_tok = self.expect_name("a vector field name")
        chart = self._on_chart()
        self.expect("=")
        kind, value = self.parse_tensor_rhs(chart)
        if kind == "scalar":
            self.error("a vector field needs D(coordinate) terms", name_tok, ArityMismatch)
        if kind != "chain" or value.degree != 1:
            self.error("a vector field must be a degree-1 chain expression",
                       name_tok, ArityMismatch)
        comps = [value.coefficient((i,)) for i in range(chart.dim)]
        self.declare(self.ws.vector_fields, name_tok, cc.VectorField(chart, comps),
                     "vectorfield")

    def parse_form(self):
        self.expect("form")
        name_tok = self.expect_name("a form name")
        chart = self._on_chart()
        self.expect("=")
        kind, value = self.parse_tensor_rhs(chart)
        if kind == "scalar":
            value = cc.scalar_form(chart, value)
        elif kind != "form":
            self.error("a form cannot contain chain atoms", name_tok, ArityMismatch)
        self.declare(self.ws.forms, name_tok, value, "form")

    def parse_chain(self):
        self.expect("chain")
        name_tok = self.expect_name("a chain name")
        chart = self._on_chart()
        self.expect("=")
        kind, value = self.parse_tensor_rhs(chart)
        if kind == "scalar":
            value = cc.MultiVectorField(chart, 0, {(): sf.normalize(value)})
        elif kind != "chain":
            self.error("a chain cannot contain form atoms", name_tok, ArityMismatch)
        self.declare(self.ws.chains, name_tok, value, "chain")

    def parse_action(self):
        self.expect("action")
        name_tok = self.expect_name("an action name")
        self.expect("{")
        self.expect("algebra")
        alg_tok = self.expect_name("an algebra name")
        algebra = self.lookup(self.ws.lie_algebras, alg_tok, "lie_algebra")
        self.expect("chart")
        chart_tok = self.expect_name("a chart name")
        chart = self.lookup(self.ws.charts, chart_tok, "chart")
        self.expect("generators")
        self.expect("=")
        self.expect("[")
        gen_names, gens = [], []
        while True:
            tok = self.expect_name("a vector field name")
            vf = self.lookup(self.ws.vector_fields, tok, "vectorfield")
            if vf.chart != chart:
                self.error(f"generator {tok.text!r} lives on a different chart",
                           tok, ArityMismatch)
            gen_names.append(tok.text)
            gens.append(vf)
            if self.peek().text == ",":
                self.advance()
                continue
            break
        self.expect("]")
        self.expect("orbit_dim")
        q_tok = self.peek()
        q = self.expect_int("the orbit dimension")
        self.expect("}")
        if len(gens) != algebra.dim:
            self.error(f"need {algebra.dim} generators for {alg_tok.text!r}, got {len(gens)}",
                       name_tok, ArityMismatch)
        if not 1 <= q <= min(algebra.dim, chart.dim):
            self.error("orbit dimension out of range", q_tok, ArityMismatch)
        spec = ActionSpec(chart, algebra, tuple(gens), q)
        self.declare(self.ws.actions, name_tok,
                     ActionDecl(name_tok.text, alg_tok.text, chart_tok.text,
                                tuple(gen_names), q, spec), "action")

    def parse_point(self):
        self.expect("point")
        name_tok = self.expect_name("a point name")
        self.expect("on")
        chart_tok = self.expect_name("a chart name")
        chart = self.lookup(self.ws.charts, chart_tok, "chart")
        self.expect("=")
        open_tok = self.expect("(")
        values = [self.rational()]
        while self.peek().text == ",":
            self.advance()
            values.append(self.rational())
        self.expect(")")
        if len(values) != chart.dim:
            self.error(f"point needs {chart.dim} coordinates, got {len(values)}",
                       open_tok, ArityMismatch)
        self.declare(self.ws.points, name_tok, (chart_tok.text, tuple(values)), "point")

    # -- tensor/scalar expressions -----------------------------------------

    def parse_tensor_rhs(self, chart):
        """Top-level expression entry; arithmetic failures (zero divisors,
        degree overflow) surface as parse errors at the current token."""
        start = self.peek()
        try:
            return self.parse_tensor_expr(chart)
        except (sf.ScalarError, cc.ChartError) as exc:
            tok = self.peek() if self.peek().kind != "eof" else start
            self.error(str(exc), tok)

    def parse_tensor_expr(self, chart):
        """Sum level.  Returns ("scalar", ScalarExpr) or ("form"/"chain", tensor)."""
        kind, value = self.parse_tensor_term(chart)
        while self.peek().text in {"+", "-"}:
            op_tok = self.advance()
            kind2, value2 = self.parse_tensor_term(chart)
            kind, value = self._combine_sum(kind, value, kind2, value2, op_tok)
        return kind, value

    def _combine_sum(self, kind, value, kind2, value2, op_tok):
        if op_tok.text == "-":
            value2 = -value2
        if kind == "scalar" and kind2 == "scalar":
            return "scalar", value + value2
        for k, v, ko, vo in ((kind, value, kind2, value2), (kind2, value2, kind, value)):
            if k == "scalar" and ko in {"form", "chain"} and vo.degree == 0:
                wrapped = (cc.scalar_form(vo.chart, v) if ko == "form"
                           else cc.MultiVectorField(vo.chart, 0, {(): sf.normalize(v)}))
                return ko, wrapped + vo
        if kind != kind2:
            self.error("cannot add a form and a chain", op_tok, ArityMismatch)
        if value.degree != value2.degree:
            self.error(f"cannot add degrees {value.degree} and {value2.degree}",
                       op_tok, ArityMismatch)
        return kind, value + value2

    def parse_tensor_term(self, chart):
        """Product level: factors joined by * and /."""
        sign = 1
        while self.peek().text == "-":
            self.advance()
            sign = -sign
        kind, value = self.parse_tensor_factor(chart)
        while True:
            op = self.peek().text
            if op == "*":
                op_tok = self.advance()
                kind2, value2 = self.parse_tensor_factor(chart)
                kind, value = self._combine_product(kind, value, kind2, value2, op_tok)
            elif op == "/":
                op_tok = self.advance()
                kind2, value2 = self.parse_tensor_factor(chart)
                if kind2 != "scalar":
                    self.error("can only divide by a scalar", op_tok, ArityMismatch)
                if sf.normalize(value2).is_zero():
                    self.error("division by zero", op_tok)
                if kind == "scalar":
                    value = value / value2
                else:
                    value = value.scaled(sf.ONE / sf.normalize(value2))
            else:
                break
        if sign < 0:
            value = -value
        return kind, value

    def parse_tensor_factor(self, chart):
        """Atom with postfix ^: integer power on scalars, wedge on tensors."""
        kind, value = self.parse_tensor_atom(chart)
        while self.peek().text == "^":
            op_tok = self.advance()
            if kind == "scalar":
                exp_tok = self.peek()
                neg = False
                if exp_tok.text == "-":
                    self.advance()
                    neg = True
                    exp_tok = self.peek()
                if exp_tok.kind != "int":
                    self.error("power of a scalar needs an integer exponent", exp_tok)
                e = self.expect_int()
                value = value ** (-e if neg else e)
            else:
                kind2, value2 = self.parse_tensor_atom(chart)
                if kind2 == "scalar":
                    self.error("cannot wedge with a scalar", op_tok, ArityMismatch)
                if kind2 != kind:
                    self.error("cannot wedge a form with a chain", op_tok, ArityMismatch)
                value = cc.wedge(value, value2)
        return kind, value

    def _combine_product(self, kind, value, kind2, value2, op_tok):
        if kind == "scalar" and kind2 == "scalar":
            return "scalar", value * value2
        if kind == "scalar":
            return kind2, value2.scaled(value)
        if kind2 == "scalar":
            return kind, value.scaled(value2)
        self.error("use '^' to wedge tensors, '*' is for scalar factors",
                   op_tok, ArityMismatch)

    def parse_tensor_atom(self, chart):
        tok = self.peek()
        if tok.text == "(":
            self.advance()
            kind, value = self.parse_tensor_expr(chart)
            self.expect(")")
            return kind, value
        if tok.text == "-":
            self.advance()
            kind, value = self.parse_tensor_factor(chart)
            return kind, -value
        if tok.kind == "int":
            self.advance()
            return "scalar", sf.rational(int(tok.text))
        if tok.text == "d":
            return "form", self._basis_atom(chart, as_form=True)
        if tok.text == "D":
            return self._derivative_or_basis(chart)
        if tok.text == "wedge":
            self.advance()
            self.expect("(")
            kind1, v1 = self.parse_tensor_expr(chart)
            self.expect(",")
            kind2, v2 = self.parse_tensor_expr(chart)
            close = self.expect(")")
            if "scalar" in (kind1, kind2) or kind1 != kind2:
                self.error("wedge needs two forms or two chains",
                           close, ArityMismatch)
            return kind1, cc.wedge(v1, v2)
        if tok.kind == "name":
            return self._name_atom(chart)
        self.error(f"unexpected token {tok.text!r} in expression")

    def _basis_atom(self, chart, as_form):
        tok = self.advance()  # 'd' or 'D'
        self.expect("(")
        coord_tok = self.expect_name("a coordinate name")
        if coord_tok.text not in chart.coordinates:
            self.error(f"unknown coordinate {coord_tok.text!r}", coord_tok, UnknownReference)
        self.expect(")")
        i = chart.index(coord_tok.text)
        if as_form:
            return cc.DiffForm(chart, 1, {(i,): sf.ONE})
        return cc.MultiVectorField(chart, 1, {(i,): sf.ONE})

    def _derivative_or_basis(self, chart):
        """D(coord) is a chain atom; D(expr, coord) a formal derivative."""
        d_tok = self.advance()
        self.expect("(")
        if (self.peek().kind == "name" and self.peek().text in chart.coordinates
                and self.peek(1).text == ")"):
            coord_tok = self.advance()
            self.advance()  # ')'
            i = chart.index(coord_tok.text)
            return "chain", cc.MultiVectorField(chart, 1, {(i,): sf.ONE})
        kind, inner = self.parse_tensor_expr(chart)
        if kind != "scalar":
            self.error("formal derivative applies to scalars", d_tok, ArityMismatch)
        self.expect(",")
        coord_tok = self.expect_name("a coordinate name")
        if coord_tok.text not in chart.coordinates:
            self.error(f"unknown coordinate {coord_tok.text!r}", coord_tok, UnknownReference)
        self.expect(")")
        return "scalar", sf.partial(inner, coord_tok.text)

    def _name_atom(self, chart):
        tok = self.advance()
        name = tok.text
        if self.peek().text == "(":
            decl = self.lookup(self.ws.functions, tok, "function")
            self.advance()
            args = [self.expect_name("a coordinate name").text]
            while self.peek().text == ",":
                self.advance()
                args.append(self.expect_name("a coordinate name").text)
            self.expect(")")
            if tuple(args) != decl.args:
                self.error(f"{name} is declared with arguments ({', '.join(decl.args)})",
                           tok, ArityMismatch)
            missing = [a for a in decl.args if a not in chart.coordinates]
            if missing:
                self.error(f"{name} depends on {missing[0]!r}, which is not a "
                           f"coordinate of this chart", tok, ArityMismatch)
            return "scalar", sf.function(name, decl.args)
        if name in chart.coordinates:
            return "scalar", sf.coordinate(name)
        if name in self.ws.vector_fields:
            vf = self.ws.vector_fields[name]
            self._check_chart(vf.chart, chart, tok)
            return "chain", vf.as_multivector()
        if name in self.ws.chains:
            chain = self.ws.chains[name]
            self._check_chart(chain.chart, chart, tok)
            return "chain", chain
        if name in self.ws.forms:
            form = self.ws.forms[name]
            self._check_chart(form.chart, chart, tok)
            return "form", form
        self.error(f"unknown name {name!r}", tok, UnknownReference)

    def _check_chart(self, obj_chart, chart, tok):
        if obj_chart != chart:
            self.error(f"{tok.text!r} lives on a different chart", tok, ArityMismatch)

    # -- check directives ----------------------------------------------------

    _CHECK_KINDS = {
        # kind: (positional reference kinds, allowed keyword lists)
        "validate": ((), ()),
        "cohomology": (("lie_algebra", "subgroup?", "int"), ()),
        "isotropy": (("action", "point"), ()),
        "invariant": (("action", "object"), ()),
        "vertical": (("action", "chain"), ("points",)),
        "semibasic": (("action", "form"), ()),
        "cochain": (("action", "chain"), ("forms", "fields", "points")),
        "rho": (("action", "chain", "form"), ("points",)),
        "lambda": (("action", "chain", "field"), ("points",)),
        "surjective": (("action", "chain", "form"), ("points",)),
        "integrability": (("action", "chain"), ("fields", "points")),
        "rescale": (("action", "chain", "form"), ("fields", "points")),
        "report": (("action",), ("points", "components")),
    }

    _KW_ELEMENT_KINDS = {
        "points": "point", "forms": "form", "fields": "field",
        "components": "subgroup",
    }

    def parse_check(self):
        self.expect("check")
        kind_tok = self.expect_name("a check kind")
        kind = kind_tok.text
        if kind not in self._CHECK_KINDS:
            self.error(f"unknown check kind {kind!r}", kind_tok, UnknownReference)
        self.expect("(")
        args, kwargs = [], {}
        arg_tokens = []
        if self.peek().text != ")":
            while True:
                tok = self.peek()
                if tok.kind == "int":
                    self.advance()
                    args.append(("int", int(tok.text)))
                    arg_tokens.append(tok)
                elif tok.kind == "name" and self.peek(1).text == "=":
                    self.advance()
                    self.advance()
                    self.expect("[")
                    names = []
                    while self.peek().text != "]":
                        names.append(self.expect_name("a name"))
                        if self.peek().text == ",":
                            self.advance()
                    self.expect("]")
                    if tok.text in kwargs:
                        self.error(f"duplicate keyword {tok.text!r}", tok, DuplicateName)
                    kwargs[tok.text] = (tok, tuple(names))
                elif tok.kind == "name":
                    self.advance()
                    args.append(("name", tok.text))
                    arg_tokens.append(tok)
                else:
                    self.error(f"unexpected token {tok.text!r} in check arguments")
                if self.peek().text == ",":
                    self.advance()
                    continue
                break
        self.expect(")")
        self._validate_check(kind, kind_tok, args, arg_tokens, kwargs)
        decl = CheckDecl(kind, tuple(args),
                         {k: tuple(t.text for t in names) for k, (_, names) in kwargs.items()},
                         kind_tok.span(self.file))
        self.ws.checks.append(decl)
        self.ws.order.append(("check", len(self.ws.checks) - 1))

    def _resolve_ref(self, ref_kind, tok):
        stores = {
            "lie_algebra": self.ws.lie_algebras, "subgroup": self.ws.subgroups,
            "action": self.ws.actions, "point": self.ws.points,
            "form": self.ws.forms, "field": self.ws.vector_fields,
            "chain": self.ws.chains, "chart": self.ws.charts,
        }
        if ref_kind == "object":
            try:
                self.ws.find_object(tok.text)
            except KeyError:
                self.error(f"unknown form/field/chain {tok.text!r}", tok, UnknownReference)
            except ValueError:
                self.error(f"{tok.text!r} is ambiguous across kinds", tok)
            return
        self.lookup(stores[ref_kind], tok, ref_kind)

    def _validate_check(self, kind, kind_tok, args, arg_tokens, kwargs):
        positional, allowed_kw = self._CHECK_KINDS[kind]
        required = [p for p in positional if not p.endswith("?")]
        if not (len(required) <= len(args) <= len(positional)):
            self.error(f"check {kind} takes {len(required)}..{len(positional)} "
                       f"positional arguments, got {len(args)}", kind_tok, ArityMismatch)
        # optional slots are filled left to right against the declared kinds
        slots = list(positional)
        if len(args) < len(slots):
            opt = [i for i, p in enumerate(slots) if p.endswith("?")]
            for i in reversed(opt[:len(slots) - len(args)]):
                del slots[i]
        for (arg_kind, value), slot, tok in zip(args, slots, arg_tokens):
            slot = slot.rstrip("?")
            if slot == "int":
                if arg_kind != "int":
                    self.error("expected an integer here", tok, ArityMismatch)
            else:
                if arg_kind != "name":
                    self.error(f"expected a {slot} name here", tok, ArityMismatch)
                self._resolve_ref(slot, tok)
        for kw, (kw_tok, names) in kwargs.items():
            if kw not in allowed_kw:
                self.error(f"check {kind} does not take keyword {kw!r}",
                           kw_tok, ArityMismatch)
            for tok in names:
                self._resolve_ref(self._KW_ELEMENT_KINDS[kw], tok)


def parse(text, filename="<input>"):
    """Parse workspace text, raising ParseError subclasses with source spans."""
    return _Parser(text, filename).parse_file()


# ---------------------------------------------------------------------------
# rendering


def _coeff_prefix(expr):
    """Render a scalar coefficient for use in front of a tensor atom.

    Returns (sign, text or None); None means coefficient 1 (omitted).
    """
    s = sf.dsl_str(expr)
    if s == "1":
        return 1, None
    if s == "-1":
        return -1, None
    if s.startswith("-") and " " not in s:
        return -1, s[1:]
    if " " in s and not (s.startswith("(") and s.endswith(")")):
        return 1, f"({s})"
    return 1, s


def tensor_dsl(obj):
    """Canonical surface syntax for a form, chain or vector field."""
    if isinstance(obj, cc.VectorField):
        obj = obj.as_multivector()
    atom = "d" if isinstance(obj, cc.DiffForm) else "D"
    chart = obj.chart
    if obj.degree == 0:
        return sf.dsl_str(obj.coefficient(()))
    if not obj.coeffs:
        return "0"
    parts = []
    for idx, coeff in obj.coeffs.items():
        sign, text = _coeff_prefix(coeff)
        body = "^".join(f"{atom}({chart.coordinates[i]})" for i in idx)
        if text is not None:
            body = f"{text}*{body}"
        parts.append((sign, body))
    out = []
    for i, (sign, body) in enumerate(parts):
        if i == 0:
            out.append(("-" if sign < 0 else "") + body)
        else:
            out.append((" - " if sign < 0 else " + ") + body)
    return "".join(out)


_SUP = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def _pretty_coeff_prefix(expr):
    s = sf.pretty(expr)
    if s == "1":
        return 1, None
    if s == "-1":
        return -1, None
    if s.startswith("-") and " " not in s:
        return -1, s[1:]
    if " " in s and not (s.startswith("(") and s.endswith(")")):
        return 1, f"({s})"
    return 1, s


def tensor_pretty(obj):
    """Display notation for tensors: dx∧dy, ∂x∧∂y."""
    if isinstance(obj, cc.VectorField):
        obj = obj.as_multivector()
    chart = obj.chart
    if obj.degree == 0:
        return sf.pretty(obj.coefficient(()))
    if not obj.coeffs:
        return "0"
    is_form = isinstance(obj, cc.DiffForm)
    out = []
    for i, (idx, coeff) in enumerate(obj.coeffs.items()):
        sign, text = _pretty_coeff_prefix(coeff)
        atoms = [("d" if is_form else "∂") + chart.coordinates[j] for j in idx]
        body = "∧".join(atoms)
        if text is not None:
            body = f"{text}·{body}"
        if i == 0:
            out.append(("-" if sign < 0 else "") + body)
        else:
            out.append((" - " if sign < 0 else " + ") + body)
    return "".join(out)


def altform_pretty(alpha):
    """Display notation for algebra forms: α¹∧α²."""
    if alpha.degree == 0:
        return str(alpha.coeffs.get((), Fraction(0)))
    if not alpha.coeffs:
        return "0"
    out = []
    for i, (idx, coeff) in enumerate(alpha.coeffs.items()):
        body = "∧".join("α" + str(k + 1).translate(_SUP) for k in idx)
        a = abs(coeff)
        if a != 1:
            body = f"{a}·{body}"
        if i == 0:
            out.append(("-" if coeff < 0 else "") + body)
        else:
            out.append((" - " if coeff < 0 else " + ") + body)
    return "".join(out)


def altform_dsl(alpha):
    """Surface syntax for an alternating form on the algebra: a1^a2 style."""
    if alpha.degree == 0:
        return str(alpha.coeffs.get((), Fraction(0)))
    if not alpha.coeffs:
        return "0"
    out = []
    for i, (idx, coeff) in enumerate(alpha.coeffs.items()):
        body = "^".join(f"a{k+1}" for k in idx)
        a = abs(coeff)
        if a != 1:
            body = f"{a}*{body}"
        if i == 0:
            out.append(("-" if coeff < 0 else "") + body)
        else:
            out.append((" - " if coeff < 0 else " + ") + body)
    return "".join(out)


def vector_dsl(v, labels=None):
    """Linear combination rendering of an algebra vector: e1 - 1/2*e2."""
    parts = []
    for i, c in enumerate(v):
        if c == 0:
            continue
        label = labels[i] if labels else f"e{i+1}"
        a = abs(c)
        body = label if a == 1 else f"{a}*{label}"
        parts.append((1 if c > 0 else -1, body))
    if not parts:
        return "0"
    out = []
    for i, (sign, body) in enumerate(parts):
        if i == 0:
            out.append(("-" if sign < 0 else "") + body)
        else:
            out.append((" - " if sign < 0 else " + ") + body)
    return "".join(out)


def _render_lie_algebra(name, algebra):
    lines = [f"lie_algebra {name} {{", f"  dim {algebra.dim}"]
    for (i, j), rhs in sorted(algebra.brackets.items()):
        vec = [Fraction(0)] * algebra.dim
        for k, c in rhs.items():
            vec[k] = c
        lines.append(f"  bracket [{i+1},{j+1}] = {vector_dsl(vec)}")
    lines.append("}")
    return "\n".join(lines)


def _render_subgroup(decl):
    span = ", ".join(str(i) for i in decl.span_indices)
    lines = [f"subgroup {decl.name} of {decl.algebra} {{", f"  span = [{span}]"]
    for m in decl.components:
        rows = ",".join("[" + ",".join(str(x) for x in row) + "]" for row in m)
        lines.append(f"  component [{rows}]")
    lines.append("}")
    return "\n".join(lines)


def _render_check(decl):
    parts = [str(v) if k == "int" else v for k, v in decl.args]
    parts += [f"{kw}=[{', '.join(names)}]" for kw, names in decl.kwargs.items()]
    return f"check {decl.kind}({', '.join(parts)})"


def render(ws):
    """Canonical text for a workspace; parse(render(ws)) == ws."""
    lines = []
    for kind, key in ws.order:
        if kind == "chart":
            chart = ws.charts[key]
            lines.append(f"chart {key} {{ coords = [{', '.join(chart.coordinates)}] }}")
        elif kind == "function":
            decl = ws.functions[key]
            lines.append(f"function {decl.name}({', '.join(decl.args)})")
        elif kind == "lie_algebra":
            lines.append(_render_lie_algebra(key, ws.lie_algebras[key]))
        elif kind == "subgroup":
            lines.append(_render_subgroup(ws.subgroups[key]))
        elif kind == "vectorfield":
            vf = ws.vector_fields[key]
            chart_name = _chart_name(ws, vf.chart)
            lines.append(f"vectorfield {key} on {chart_name} = {tensor_dsl(vf)}")
        elif kind == "form":
            form = ws.forms[key]
            lines.append(f"form {key} on {_chart_name(ws, form.chart)} = {tensor_dsl(form)}")
        elif kind == "chain":
            chain = ws.chains[key]
            lines.append(f"chain {key} on {_chart_name(ws, chain.chart)} = {tensor_dsl(chain)}")
        elif kind == "action":
            decl = ws.actions[key]
            lines.append(
                f"action {key} {{ algebra {decl.algebra} chart {decl.chart} "
                f"generators = [{', '.join(decl.generators)}] orbit_dim {decl.orbit_dim} }}")
        elif kind == "point":
            chart_name, values = ws.points[key]
            vals = ", ".join(str(v) for v in values)
            lines.append(f"point {key} on {chart_name} = ({vals})")
        elif kind == "check":
            lines.append(_render_check(ws.checks[key]))
    return "\n".join(lines) + "\n"


def _chart_name(ws, chart):
    for name, c in ws.charts.items():
        if c == chart:
            return name
    raise KeyError("chart is not declared in this workspace")
