"""Abstract syntax of modules, expressions and patterns, plus the
well-formedness checks every loaded module must satisfy."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator

from .types import (
    DataType,
    ListType,
    MapType,
    SetType,
    Type,
    VALUE,
)


# ---------------------------------------------------------------------------
# Source spans


@dataclass(frozen=True)
class Span:
    start: int
    end: int


DUMMY_SPAN = Span(0, 0)


def _span_field():
    return field(default=DUMMY_SPAN, compare=False, repr=False)


# ---------------------------------------------------------------------------
# Declarations


@dataclass(frozen=True)
class GlobalDef:
    name: str
    type: Type
    init: "Expr"
    span: Span = _span_field()


@dataclass(frozen=True)
class Param:
    type: Type
    name: str
    span: Span = _span_field()


@dataclass(frozen=True)
class FunDef:
    name: str
    return_type: Type
    params: tuple[Param, ...]
    body: "Expr"
    span: Span = _span_field()


@dataclass(frozen=True)
class FieldDef:
    type: Type
    name: str
    span: Span = _span_field()


@dataclass(frozen=True)
class ConsDef:
    name: str
    fields: tuple[FieldDef, ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class DataDef:
    name: str
    constructors: tuple[ConsDef, ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class ModuleDef:
    globals: tuple[GlobalDef, ...] = ()
    functions: tuple[FunDef, ...] = ()
    datatypes: tuple[DataDef, ...] = ()


# Booleans and the nokey exception payload are built-in datatypes: the
# evaluation rules match on true()/false() constructor values and throw
# nokey(key) on failed map lookups.
BUILTIN_DATATYPES: tuple[DataDef, ...] = (
    DataDef("Bool", (ConsDef("true", ()), ConsDef("false", ()))),
    DataDef("NoKey", (ConsDef("nokey", (FieldDef(VALUE, "key"),)),)),
)


# ---------------------------------------------------------------------------
# Expressions


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Lit(Expr):
    value: int | str
    span: Span = _span_field()


@dataclass(frozen=True)
class Var(Expr):
    name: str
    span: Span = _span_field()


@dataclass(frozen=True)
class Unary(Expr):
    op: str
    operand: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class Binary(Expr):
    left: Expr
    op: str
    right: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class Cons(Expr):
    name: str
    args: tuple[Expr, ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class ListExpr(Expr):
    items: tuple[Expr, ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class SetExpr(Expr):
    items: tuple[Expr, ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class MapExpr(Expr):
    pairs: tuple[tuple[Expr, Expr], ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class Lookup(Expr):
    map: Expr
    key: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class Update(Expr):
    map: Expr
    key: Expr
    value: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class Call(Expr):
    name: str
    args: tuple[Expr, ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class ReturnExpr(Expr):
    value: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class Assign(Expr):
    name: str
    value: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class If(Expr):
    cond: Expr
    then: Expr
    els: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class Case:
    pattern: "Pattern"
    body: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class Switch(Expr):
    subject: Expr
    cases: tuple[Case, ...]
    span: Span = _span_field()


class Strategy(enum.Enum):
    TOP_DOWN = "top-down"
    BOTTOM_UP = "bottom-up"
    TOP_DOWN_BREAK = "top-down-break"
    BOTTOM_UP_BREAK = "bottom-up-break"
    OUTERMOST = "outermost"
    INNERMOST = "innermost"


@dataclass(frozen=True)
class Visit(Expr):
    strategy: Strategy
    subject: Expr
    cases: tuple[Case, ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class BreakExpr(Expr):
    span: Span = _span_field()


@dataclass(frozen=True)
class ContinueExpr(Expr):
    span: Span = _span_field()


@dataclass(frozen=True)
class FailExpr(Expr):
    span: Span = _span_field()


@dataclass(frozen=True)
class LocalDecl:
    type: Type
    name: str
    span: Span = _span_field()


@dataclass(frozen=True)
class Block(Expr):
    locals: tuple[LocalDecl, ...]
    body: tuple[Expr, ...]
    span: Span = _span_field()


class Generator:
    __slots__ = ()


@dataclass(frozen=True)
class Enumerating(Generator):
    var: str
    source: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class Matching(Generator):
    pattern: "Pattern"
    source: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class For(Expr):
    generator: Generator
    body: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class While(Expr):
    cond: Expr
    body: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class Solve(Expr):
    targets: tuple[str, ...]
    body: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class ThrowExpr(Expr):
    value: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class TryCatch(Expr):
    body: Expr
    var: str
    handler: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class TryFinally(Expr):
    body: Expr
    fin: Expr
    span: Span = _span_field()


# ---------------------------------------------------------------------------
# Patterns


class Pattern:
    __slots__ = ()


@dataclass(frozen=True)
class LitPat(Pattern):
    value: int | str
    span: Span = _span_field()


@dataclass(frozen=True)
class VarPat(Pattern):
    name: str
    span: Span = _span_field()


@dataclass(frozen=True)
class ConsPat(Pattern):
    name: str
    args: tuple[Pattern, ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class TypedPat(Pattern):
    type: Type
    name: str
    pattern: Pattern
    span: Span = _span_field()


@dataclass(frozen=True)
class Star(Pattern):
    """A star element ``*x`` inside a list or set pattern."""

    name: str
    span: Span = _span_field()


@dataclass(frozen=True)
class ListPat(Pattern):
    elements: tuple[Pattern, ...]  # ordinary patterns or Star
    span: Span = _span_field()


@dataclass(frozen=True)
class SetPat(Pattern):
    elements: tuple[Pattern, ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class NegPat(Pattern):
    pattern: Pattern
    span: Span = _span_field()


@dataclass(frozen=True)
class DeepPat(Pattern):
    pattern: Pattern
    span: Span = _span_field()


# ---------------------------------------------------------------------------
# Structural helpers


def expr_children(e: Expr) -> tuple[Expr, ...]:
    """Direct sub-expressions, including case bodies and generator sources."""
    if isinstance(e, (Lit, Var, BreakExpr, ContinueExpr, FailExpr)):
        return ()
    if isinstance(e, Unary):
        return (e.operand,)
    if isinstance(e, Binary):
        return (e.left, e.right)
    if isinstance(e, (Cons, Call)):
        return e.args
    if isinstance(e, ListExpr) or isinstance(e, SetExpr):
        return e.items
    if isinstance(e, MapExpr):
        return tuple(x for kv in e.pairs for x in kv)
    if isinstance(e, Lookup):
        return (e.map, e.key)
    if isinstance(e, Update):
        return (e.map, e.key, e.value)
    if isinstance(e, (ReturnExpr, ThrowExpr)):
        return (e.value,)
    if isinstance(e, Assign):
        return (e.value,)
    if isinstance(e, If):
        return (e.cond, e.then, e.els)
    if isinstance(e, Switch):
        return (e.subject,) + tuple(c.body for c in e.cases)
    if isinstance(e, Visit):
        return (e.subject,) + tuple(c.body for c in e.cases)
    if isinstance(e, Block):
        return e.body
    if isinstance(e, For):
        return (e.generator.source, e.body)
    if isinstance(e, While):
        return (e.cond, e.body)
    if isinstance(e, Solve):
        return (e.body,)
    if isinstance(e, TryCatch):
        return (e.body, e.handler)
    if isinstance(e, TryFinally):
        return (e.body, e.fin)
    raise TypeError(f"not an expression: {e!r}")


def walk_exprs(e: Expr) -> Iterator[Expr]:
    """All sub-expressions of ``e`` in preorder, including ``e`` itself."""
    stack = [e]
    while stack:
        cur = stack.pop()
        yield cur
        stack.extend(reversed(expr_children(cur)))


def transform_exprs(e: Expr, fn) -> Expr:
    """Rebuild an expression bottom-up, applying ``fn`` to every node."""

    def go(x: Expr) -> Expr:
        if isinstance(x, Unary):
            x = Unary(x.op, go(x.operand), x.span)
        elif isinstance(x, Binary):
            x = Binary(go(x.left), x.op, go(x.right), x.span)
        elif isinstance(x, Cons):
            x = Cons(x.name, tuple(go(a) for a in x.args), x.span)
        elif isinstance(x, Call):
            x = Call(x.name, tuple(go(a) for a in x.args), x.span)
        elif isinstance(x, ListExpr):
            x = ListExpr(tuple(go(a) for a in x.items), x.span)
        elif isinstance(x, SetExpr):
            x = SetExpr(tuple(go(a) for a in x.items), x.span)
        elif isinstance(x, MapExpr):
            x = MapExpr(tuple((go(k), go(v)) for k, v in x.pairs), x.span)
        elif isinstance(x, Lookup):
            x = Lookup(go(x.map), go(x.key), x.span)
        elif isinstance(x, Update):
            x = Update(go(x.map), go(x.key), go(x.value), x.span)
        elif isinstance(x, ReturnExpr):
            x = ReturnExpr(go(x.value), x.span)
        elif isinstance(x, ThrowExpr):
            x = ThrowExpr(go(x.value), x.span)
        elif isinstance(x, Assign):
            x = Assign(x.name, go(x.value), x.span)
        elif isinstance(x, If):
            x = If(go(x.cond), go(x.then), go(x.els), x.span)
        elif isinstance(x, Switch):
            x = Switch(
                go(x.subject),
                tuple(Case(c.pattern, go(c.body), c.span) for c in x.cases),
                x.span,
            )
        elif isinstance(x, Visit):
            x = Visit(
                x.strategy,
                go(x.subject),
                tuple(Case(c.pattern, go(c.body), c.span) for c in x.cases),
                x.span,
            )
        elif isinstance(x, Block):
            x = Block(x.locals, tuple(go(a) for a in x.body), x.span)
        elif isinstance(x, For):
            g = x.generator
            if isinstance(g, Enumerating):
                g = Enumerating(g.var, go(g.source), g.span)
            else:
                g = Matching(g.pattern, go(g.source), g.span)
            x = For(g, go(x.body), x.span)
        elif isinstance(x, While):
            x = While(go(x.cond), go(x.body), x.span)
        elif isinstance(x, Solve):
            x = Solve(x.targets, go(x.body), x.span)
        elif isinstance(x, TryCatch):
            x = TryCatch(go(x.body), x.var, go(x.handler), x.span)
        elif isinstance(x, TryFinally):
            x = TryFinally(go(x.body), go(x.fin), x.span)
        return fn(x)

    return go(e)


def pattern_vars(p: Pattern) -> list[str]:
    """All variable names occurring in a pattern, in preorder."""
    out: list[str] = []

    def go(q: Pattern) -> None:
        if isinstance(q, VarPat):
            out.append(q.name)
        elif isinstance(q, Star):
            out.append(q.name)
        elif isinstance(q, ConsPat):
            for a in q.args:
                go(a)
        elif isinstance(q, TypedPat):
            out.append(q.name)
            go(q.pattern)
        elif isinstance(q, (ListPat, SetPat)):
            for a in q.elements:
                go(a)
        elif isinstance(q, (NegPat, DeepPat)):
            go(q.pattern)

    go(p)
    return out


def is_finite_subset(e: Expr) -> bool:
    """Whether ``e`` lies in the terminating expression subset.

    The subset excludes while-loops, solve-loops and function calls, and
    restricts traversals to bottom-up and bottom-up-break; the check is
    recursive over all sub-expressions.
    """
    for sub in walk_exprs(e):
        if isinstance(sub, (While, Solve, Call)):
            return False
        if isinstance(sub, Visit) and sub.strategy not in (
            Strategy.BOTTOM_UP,
            Strategy.BOTTOM_UP_BREAK,
        ):
            return False
    return True


# ---------------------------------------------------------------------------
# Module tables


def all_datatypes(m: ModuleDef) -> tuple[DataDef, ...]:
    return BUILTIN_DATATYPES + m.datatypes


def constructor_table(m: ModuleDef) -> dict[str, tuple[str, tuple[Type, ...]]]:
    """Map each constructor name to (datatype name, declared field types)."""
    out: dict[str, tuple[str, tuple[Type, ...]]] = {}
    for dd in all_datatypes(m):
        for cd in dd.constructors:
            out[cd.name] = (dd.name, tuple(f.type for f in cd.fields))
    return out


def function_table(m: ModuleDef) -> dict[str, FunDef]:
    return {f.name: f for f in m.functions}


# ---------------------------------------------------------------------------
# Well-formedness


@dataclass(frozen=True)
class WellFormednessError:
    kind: str
    name: str
    span: Span
    message: str

    def __str__(self) -> str:
        return f"[{self.kind}] {self.message}"


@dataclass
class ModuleInfo:
    """Static facts about a validated module used by the evaluator."""

    module: ModuleDef
    datatypes: dict[str, DataDef]
    constructors: dict[str, tuple[str, tuple[Type, ...]]]
    functions: dict[str, FunDef]
    global_defs: dict[str, GlobalDef]
    errors: list[WellFormednessError]


class _Scope:
    """A lexical scope chain entry: name -> (kind, declared type or None)."""

    def __init__(self, parent: dict | None = None):
        self.entries: dict[str, tuple[str, Type | None]] = dict(parent or {})

    def child(self) -> "_Scope":
        return _Scope(self.entries)

    def add(self, name: str, kind: str, ty: Type | None) -> None:
        self.entries[name] = (kind, ty)

    def lookup(self, name: str):
        return self.entries.get(name)


def _type_refs(t: Type) -> Iterator[str]:
    if isinstance(t, DataType):
        yield t.name
    elif isinstance(t, (SetType, ListType)):
        yield from _type_refs(t.elem)
    elif isinstance(t, MapType):
        yield from _type_refs(t.key)
        yield from _type_refs(t.val)


class _Validator:
    def __init__(self, m: ModuleDef):
        self.module = m
        self.errors: list[WellFormednessError] = []
        self.datatypes: dict[str, DataDef] = {}
        self.constructors: dict[str, tuple[str, tuple[Type, ...]]] = {}
        self.functions: dict[str, FunDef] = {}
        self.global_defs: dict[str, GlobalDef] = {}

    def error(self, kind: str, name: str, span: Span, message: str) -> None:
        self.errors.append(WellFormednessError(kind, name, span, message))

    # -- declarations -------------------------------------------------

    def run(self) -> ModuleInfo:
        m = self.module
        toplevel: dict[str, str] = {}

        def declare(name: str, what: str, span: Span) -> bool:
            if name in toplevel:
                self.error(
                    "duplicate-name",
                    name,
                    span,
                    f"{what} {name!r} collides with {toplevel[name]} of the same name",
                )
                return False
            toplevel[name] = what
            return True

        for dd in BUILTIN_DATATYPES:
            toplevel[dd.name] = "built-in datatype"
            self.datatypes[dd.name] = dd
            for cd in dd.constructors:
                toplevel[cd.name] = "built-in constructor"
                self.constructors[cd.name] = (dd.name, tuple(f.type for f in cd.fields))

        for dd in m.datatypes:
            if declare(dd.name, "datatype", dd.span):
                self.datatypes[dd.name] = dd
            for cd in dd.constructors:
                if declare(cd.name, "constructor", cd.span):
                    self.constructors[cd.name] = (
                        dd.name,
                        tuple(f.type for f in cd.fields),
                    )
                seen_fields: set[str] = set()
                for fd in cd.fields:
                    if fd.name in seen_fields:
                        self.error(
                            "duplicate-name",
                            fd.name,
                            fd.span,
                            f"duplicate field {fd.name!r} in constructor {cd.name!r}",
                        )
                    seen_fields.add(fd.name)

        for g in m.globals:
            if declare(g.name, "global variable", g.span):
                self.global_defs[g.name] = g

        for f in m.functions:
            if declare(f.name, "function", f.span):
                self.functions[f.name] = f

        # Types mentioned in declarations must resolve.
        for dd in m.datatypes:
            for cd in dd.constructors:
                for fd in cd.fields:
                    self.check_type(fd.type, fd.span)
        for g in m.globals:
            self.check_type(g.type, g.span)

        globals_scope = _Scope()
        for g in m.globals:
            globals_scope.add(g.name, "global", g.type)

        for g in m.globals:
            # Global initializers run before any function; they see only
            # the globals themselves (plus their own block locals).
            self.walk(g.init, globals_scope.child())

        for f in m.functions:
            self.check_type(f.return_type, f.span)
            scope = globals_scope.child()
            seen: set[str] = set()
            for p in f.params:
                self.check_type(p.type, p.span)
                if p.name in seen:
                    self.error(
                        "duplicate-name",
                        p.name,
                        p.span,
                        f"duplicate parameter {p.name!r} in function {f.name!r}",
                    )
                if scope.lookup(p.name) is not None:
                    self.error(
                        "shadowing",
                        p.name,
                        p.span,
                        f"parameter {p.name!r} shadows an enclosing declaration",
                    )
                seen.add(p.name)
                scope.add(p.name, "param", p.type)
            self.walk(f.body, scope)

        return ModuleInfo(
            module=m,
            datatypes=self.datatypes,
            constructors=self.constructors,
            functions=self.functions,
            global_defs=self.global_defs,
            errors=self.errors,
        )

    def check_type(self, t: Type, span: Span) -> None:
        for name in _type_refs(t):
            if name not in self.datatypes and name not in {
                d.name for d in self.module.datatypes
            }:
                self.error(
                    "undefined-datatype", name, span, f"undefined datatype {name!r}"
                )

    # -- expressions ---------------------------------------------------

    def introduce(self, scope: _Scope, name: str, kind: str, ty: Type | None, span: Span) -> None:
        if scope.lookup(name) is not None:
            self.error(
                "shadowing",
                name,
                span,
                f"{kind} {name!r} shadows an enclosing binding",
            )
        scope.add(name, kind, ty)

    def walk(self, e: Expr, scope: _Scope) -> None:
        if isinstance(e, Lit) or isinstance(e, (BreakExpr, ContinueExpr, FailExpr)):
            return
        if isinstance(e, Var):
            if scope.lookup(e.name) is None:
                self.error(
                    "undefined-variable",
                    e.name,
                    e.span,
                    f"variable {e.name!r} does not resolve to any declaration",
                )
            return
        if isinstance(e, Assign):
            self.walk(e.value, scope)
            entry = scope.lookup(e.name)
            if entry is None:
                self.error(
                    "undefined-variable",
                    e.name,
                    e.span,
                    f"assignment to undeclared variable {e.name!r}",
                )
            elif entry[0] not in ("local", "global"):
                self.error(
                    "not-assignable",
                    e.name,
                    e.span,
                    f"{e.name!r} is a {entry[0]} and cannot be assigned",
                )
            return
        if isinstance(e, Cons):
            sig = self.constructors.get(e.name)
            if sig is None:
                self.error(
                    "undefined-constructor",
                    e.name,
                    e.span,
                    f"undefined constructor {e.name!r}",
                )
            elif len(sig[1]) != len(e.args):
                self.error(
                    "arity-mismatch",
                    e.name,
                    e.span,
                    f"constructor {e.name!r} expects {len(sig[1])} arguments, "
                    f"given {len(e.args)}",
                )
            for a in e.args:
                self.walk(a, scope)
            return
        if isinstance(e, Call):
            f = self.functions.get(e.name)
            if f is None:
                self.error(
                    "undefined-function",
                    e.name,
                    e.span,
                    f"undefined function {e.name!r}",
                )
            elif len(f.params) != len(e.args):
                self.error(
                    "arity-mismatch",
                    e.name,
                    e.span,
                    f"function {e.name!r} expects {len(f.params)} arguments, "
                    f"given {len(e.args)}",
                )
            for a in e.args:
                self.walk(a, scope)
            return
        if isinstance(e, Block):
            inner = scope.child()
            seen: set[str] = set()
            for d in e.locals:
                self.check_type(d.type, d.span)
                if d.name in seen:
                    self.error(
                        "duplicate-name",
                        d.name,
                        d.span,
                        f"duplicate local {d.name!r} in block",
                    )
                seen.add(d.name)
                self.introduce(inner, d.name, "local", d.type, d.span)
            for sub in e.body:
                self.walk(sub, inner)
            return
        if isinstance(e, (Switch, Visit)):
            self.walk(e.subject, scope)
            for c in e.cases:
                inner = scope.child()
                self.check_pattern(c.pattern, inner)
                self.walk(c.body, inner)
            return
        if isinstance(e, For):
            g = e.generator
            self.walk(g.source, scope)
            inner = scope.child()
            if isinstance(g, Enumerating):
                self.introduce(inner, g.var, "range variable", None, g.span)
            else:
                self.check_pattern(g.pattern, inner)
            self.walk(e.body, inner)
            return
        if isinstance(e, Solve):
            for x in e.targets:
                if scope.lookup(x) is None:
                    self.error(
                        "undefined-variable",
                        x,
                        e.span,
                        f"solve target {x!r} does not resolve to any declaration",
                    )
            self.walk(e.body, scope)
            return
        if isinstance(e, TryCatch):
            self.walk(e.body, scope)
            inner = scope.child()
            self.introduce(inner, e.var, "catch variable", None, e.span)
            self.walk(e.handler, inner)
            return
        for sub in expr_children(e):
            self.walk(sub, scope)

    # -- patterns --------------------------------------------------------

    def check_pattern(self, p: Pattern, scope: _Scope) -> None:
        """Validate a pattern and extend ``scope`` with the variables it binds.

        Ordinary and star variables may coincide with existing bindings
        (they then match by equality rather than binding); typed-label
        variables must be fresh because their bindings are always stripped
        from the store after the case body runs.
        """
        if isinstance(p, LitPat):
            return
        if isinstance(p, VarPat):
            if scope.lookup(p.name) is None:
                scope.add(p.name, "pattern variable", None)
            return
        if isinstance(p, Star):
            if scope.lookup(p.name) is None:
                scope.add(p.name, "pattern variable", None)
            return
        if isinstance(p, ConsPat):
            sig = self.constructors.get(p.name)
            if sig is None:
                self.error(
                    "undefined-constructor",
                    p.name,
                    p.span,
                    f"undefined constructor {p.name!r} in pattern",
                )
            elif len(sig[1]) != len(p.args):
                self.error(
                    "arity-mismatch",
                    p.name,
                    p.span,
                    f"deconstructor {p.name!r} expects {len(sig[1])} arguments, "
                    f"given {len(p.args)}",
                )
            for a in p.args:
                self.check_pattern(a, scope)
            return
        if isinstance(p, TypedPat):
            self.check_type(p.type, p.span)
            entry = scope.lookup(p.name)
            if entry is not None and entry[0] != "pattern variable":
                self.error(
                    "shadowing",
                    p.name,
                    p.span,
                    f"label variable {p.name!r} shadows an enclosing declaration",
                )
            scope.add(p.name, "pattern variable", None)
            self.check_pattern(p.pattern, scope)
            return
        if isinstance(p, (ListPat, SetPat)):
            for a in p.elements:
                self.check_pattern(a, scope)
            return
        if isinstance(p, (NegPat, DeepPat)):
            self.check_pattern(p.pattern, scope)
            return
        raise TypeError(f"not a pattern: {p!r}")


def analyze_module(m: ModuleDef) -> ModuleInfo:
    """Validate ``m`` and compute the tables the evaluator needs."""
    return _Validator(m).run()


def validate_module(m: ModuleDef) -> list[WellFormednessError]:
    """All well-formedness violations of ``m``, in deterministic order."""
    return analyze_module(m).errors


def validate_expr(e: Expr, m: ModuleDef) -> list[WellFormednessError]:
    """Validate a standalone expression against a module's declarations.

    Used for snippet evaluation: the expression sees the module's globals
    (but no function's parameters or locals).
    """
    v = _Validator(m)
    info = v.run()
    base_errors = len(info.errors)
    scope = _Scope()
    for g in m.globals:
        scope.add(g.name, "global", g.type)
    assignables = {g.name: g.type for g in m.globals}
    v.walk(e, scope)
    v.snippet_assignables = assignables  # type: ignore[attr-defined]
    return v.errors[base_errors:]


def snippet_assignables(e: Expr, m: ModuleDef) -> dict[str, Type]:
    """Assignable variables (with declared types) for a snippet expression."""
    out = {g.name: g.type for g in m.globals}
    for sub in walk_exprs(e):
        if isinstance(sub, Block):
            for d in sub.locals:
                out[d.name] = d.type
    return out
