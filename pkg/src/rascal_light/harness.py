"""Program generators and oracles backing the metatheorem property suites.

Generated modules always pass validation: binder names come from a fresh
counter, calls follow an acyclic order, and loop forms use bounded
templates so that almost every generated program terminates quickly.
Bodies are biased toward exception-raising and fail-producing shapes,
since those paths carry the interesting proof obligations.
"""

from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass, field, replace

from . import syntax as sx
from .interp import Evaluator
from .fuel import eval_expr_fuel, min_sufficient_fuel
from .render import render_module
from .syntax import validate_module
from .types import (
    BaseType,
    DataType,
    IllFormedValue,
    ListType,
    MapType,
    SetType,
    Type,
    subtype,
    type_of,
)
from .values import (
    Basic,
    FAIL,
    Store,
    Success,
    Return,
    Throw,
    Timeout,
    UNDEF,
    Value,
    VCons,
    VList,
    VMap,
    VSet,
)

INT = BaseType("int")
STR = BaseType("str")


class BudgetExceeded(Exception):
    """An oracle input is too large for exhaustive enumeration."""


@dataclass(frozen=True)
class GenBudget:
    max_depth: int = 4
    max_collection: int = 3
    max_functions: int = 3
    seed: int = 0


# ---------------------------------------------------------------------------
# Values and their expression embeddings


def gen_value(rng: random.Random, t: Type, cons_by_type, depth: int) -> Value:
    """A random value of (a subtype of) ``t``."""
    if isinstance(t, BaseType):
        if t.name == "str":
            return Basic(rng.choice(["", "a", "b", "ab", "zz"]))
        return Basic(rng.randint(-3, 9))
    if isinstance(t, DataType):
        options = cons_by_type.get(t.name, [])
        if not options:
            return Basic(0)
        if depth <= 0:
            leafy = [o for o in options if not any(isinstance(ft, DataType) for ft in o[1])]
            options = leafy or options[:1]
        name, fields = rng.choice(options)
        return VCons(
            name, tuple(gen_value(rng, ft, cons_by_type, depth - 1) for ft in fields)
        )
    if isinstance(t, ListType):
        k = rng.randint(0, 2 if depth <= 0 else 3)
        return VList(tuple(gen_value(rng, t.elem, cons_by_type, depth - 1) for _ in range(k)))
    if isinstance(t, SetType):
        k = rng.randint(0, 2 if depth <= 0 else 3)
        return VSet(tuple(gen_value(rng, t.elem, cons_by_type, depth - 1) for _ in range(k)))
    if isinstance(t, MapType):
        k = rng.randint(0, 2)
        return VMap(
            tuple(
                (
                    gen_value(rng, t.key, cons_by_type, depth - 1),
                    gen_value(rng, t.val, cons_by_type, depth - 1),
                )
                for _ in range(k)
            )
        )
    if rng.random() < 0.2:
        return UNDEF
    return Basic(rng.randint(-3, 9))


def gen_any_value(rng: random.Random, cons_by_type, depth: int) -> Value:
    t = gen_type(rng, cons_by_type, depth=1)
    if rng.random() < 0.08:
        return UNDEF
    return gen_value(rng, t, cons_by_type, depth)


def gen_type(rng: random.Random, cons_by_type, depth: int = 1) -> Type:
    kinds = ["int", "str", "adt", "list", "set", "map"] if depth > 0 else ["int", "str", "adt"]
    kind = rng.choice(kinds)
    if kind == "int":
        return INT
    if kind == "str":
        return STR
    if kind == "adt":
        names = sorted(cons_by_type)
        return DataType(rng.choice(names)) if names else INT
    if kind == "list":
        return ListType(gen_type(rng, cons_by_type, depth - 1))
    if kind == "set":
        return SetType(gen_type(rng, cons_by_type, depth - 1))
    return MapType(gen_type(rng, cons_by_type, 0), gen_type(rng, cons_by_type, 0))


def value_to_expr(v: Value) -> sx.Expr:
    """Embed a value as an expression that evaluates back to it."""
    if isinstance(v, Basic):
        if isinstance(v.val, int) and v.val < 0:
            return sx.Unary("-", sx.Lit(-v.val))
        return sx.Lit(v.val)
    if isinstance(v, VCons):
        return sx.Cons(v.name, tuple(value_to_expr(a) for a in v.args))
    if isinstance(v, VList):
        return sx.ListExpr(tuple(value_to_expr(a) for a in v.items))
    if isinstance(v, VSet):
        return sx.SetExpr(tuple(value_to_expr(a) for a in v.items))
    if isinstance(v, VMap):
        return sx.MapExpr(tuple((value_to_expr(k), value_to_expr(x)) for k, x in v.pairs))
    # An empty switch fails all cases, which yields the undefined value.
    return sx.Switch(sx.Lit(0), ())


# ---------------------------------------------------------------------------
# Module generation


class _Scope:
    def __init__(self, readables=None, assignables=None, protected=frozenset()):
        self.readables: dict[str, Type | None] = dict(readables or {})
        self.assignables: dict[str, Type] = dict(assignables or {})
        self.protected: frozenset[str] = protected

    def child(self) -> "_Scope":
        return _Scope(self.readables, self.assignables, self.protected)


_FORMS = [
    ("lit", 6), ("var", 8), ("binarith", 7), ("bincmp", 4), ("binlogic", 2),
    ("unary", 2), ("cons", 7), ("list", 3), ("set", 3), ("map", 2),
    ("lookup", 3), ("update", 2), ("assign", 6), ("if", 6), ("switch", 6),
    ("visit", 5), ("block", 5), ("for", 5), ("while", 3), ("solve", 2),
    ("call", 4), ("throw", 4), ("trycatch", 4), ("tryfinally", 3),
    ("return", 3), ("break", 2), ("continue", 2), ("fail", 5),
]
_FINITE_EXCLUDED = {"while", "solve", "call"}


class _ModuleGen:
    def __init__(self, rng: random.Random, budget: GenBudget, finite: bool):
        self.rng = rng
        self.budget = budget
        self.finite = finite
        self.counter = 0
        self.datatypes: list[sx.DataDef] = []
        self.cons_by_type: dict[str, list[tuple[str, tuple[Type, ...]]]] = {}
        self.constructors: dict[str, tuple[str, tuple[Type, ...]]] = {}
        self.functions: list[sx.FunDef] = []
        self.globals: list[sx.GlobalDef] = []
        self.forms = [(f, w) for f, w in _FORMS if not (finite and f in _FINITE_EXCLUDED)]
        self.form_names = [f for f, _ in self.forms]
        self.form_weights = [w for _, w in self.forms]

    def fresh(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    # -- declarations --------------------------------------------------

    def build_datatypes(self) -> None:
        n = self.rng.randint(1, 2)
        names = [self.fresh("D") for _ in range(n)]
        for name in names:
            self.cons_by_type[name] = []
        for name in names:
            cons: list[sx.ConsDef] = []
            base_fields = tuple(
                sx.FieldDef(self.rng.choice([INT, STR]), self.fresh("f"))
                for _ in range(self.rng.randint(0, 2))
            )
            cons.append(sx.ConsDef(self.fresh("c"), base_fields))
            for _ in range(self.rng.randint(0, 2)):
                fields = []
                for _ in range(self.rng.randint(1, 2)):
                    choice = self.rng.random()
                    if choice < 0.4:
                        ft: Type = DataType(self.rng.choice(names))
                    elif choice < 0.7:
                        ft = self.rng.choice([INT, STR])
                    else:
                        ft = self.rng.choice(
                            [ListType(INT), SetType(INT), MapType(INT, STR)]
                        )
                    fields.append(sx.FieldDef(ft, self.fresh("f")))
                cons.append(sx.ConsDef(self.fresh("c"), tuple(fields)))
            dd = sx.DataDef(name, tuple(cons))
            self.datatypes.append(dd)
            for cd in cons:
                sig = (name, tuple(f.type for f in cd.fields))
                self.cons_by_type[name].append((cd.name, sig[1]))
                self.constructors[cd.name] = sig

    def build_globals(self) -> None:
        for _ in range(self.rng.randint(0, 2)):
            t = self.rng.choice([INT, STR, ListType(INT)])
            v = gen_value(self.rng, t, self.cons_by_type, 1)
            self.globals.append(sx.GlobalDef(self.fresh("g"), t, value_to_expr(v)))

    def build_module(self) -> sx.ModuleDef:
        self.build_datatypes()
        self.build_globals()
        n = self.rng.randint(1, self.budget.max_functions)
        for _ in range(n):
            name = self.fresh("fn")
            params = tuple(
                sx.Param(gen_type(self.rng, self.cons_by_type, 1), self.fresh("p"))
                for _ in range(self.rng.randint(0, 2))
            )
            ret = gen_type(self.rng, self.cons_by_type, 1)
            scope = _Scope(
                readables={g.name: g.type for g in self.globals},
                assignables={g.name: g.type for g in self.globals},
            )
            for p in params:
                scope.readables[p.name] = p.type
            body = self.expr(self.budget.max_depth, scope)
            self.functions.append(sx.FunDef(name, ret, params, body))
        return sx.ModuleDef(
            tuple(self.globals), tuple(self.functions), tuple(self.datatypes)
        )

    # -- expressions ------------------------------------------------------

    def typed_expr(self, t: Type, depth: int, scope: _Scope) -> sx.Expr:
        """An expression very likely to evaluate to a value of type ``t``."""
        r = self.rng.random()
        if r < 0.25:
            candidates = [n for n, rt in scope.readables.items() if rt == t]
            if candidates:
                return sx.Var(self.rng.choice(candidates))
        if t == INT and r < 0.45 and depth > 0:
            return sx.Binary(
                self.typed_expr(INT, 0, scope),
                self.rng.choice(["+", "-", "*"]),
                self.typed_expr(INT, 0, scope),
            )
        return value_to_expr(gen_value(self.rng, t, self.cons_by_type, min(depth, 2)))

    def bool_expr(self, depth: int, scope: _Scope) -> sx.Expr:
        r = self.rng.random()
        if r < 0.35:
            return sx.Binary(
                self.typed_expr(INT, 0, scope),
                self.rng.choice(["==", "!=", "<", "<=", ">", ">="]),
                self.typed_expr(INT, 0, scope),
            )
        if r < 0.6:
            return sx.Cons(self.rng.choice(["true", "false"]), ())
        return self.expr(max(depth - 1, 0), scope)

    def expr(self, depth: int, scope: _Scope) -> sx.Expr:
        rng = self.rng
        if depth <= 0:
            return self.leaf(scope)
        form = rng.choices(self.form_names, weights=self.form_weights)[0]
        d1 = depth - 1

        if form == "lit":
            return self.leaf(scope)
        if form == "var":
            if scope.readables:
                return sx.Var(rng.choice(sorted(scope.readables)))
            return self.leaf(scope)
        if form == "binarith":
            return sx.Binary(
                self.expr(d1, scope), rng.choice(["+", "-", "*", "/", "%"]), self.expr(d1, scope)
            )
        if form == "bincmp":
            return sx.Binary(
                self.expr(d1, scope),
                rng.choice(["==", "!=", "<", "<=", ">", ">=", "in"]),
                self.expr(d1, scope),
            )
        if form == "binlogic":
            return sx.Binary(self.bool_expr(d1, scope), rng.choice(["&&", "||"]), self.bool_expr(d1, scope))
        if form == "unary":
            return sx.Unary(rng.choice(["-", "!"]), self.expr(d1, scope))
        if form == "cons":
            name, fields = self.pick_constructor()
            args = tuple(
                self.typed_expr(ft, d1, scope) if rng.random() < 0.75 else self.expr(d1, scope)
                for ft in fields
            )
            return sx.Cons(name, args)
        if form == "list":
            return sx.ListExpr(tuple(self.expr(d1, scope) for _ in range(rng.randint(0, 3))))
        if form == "set":
            return sx.SetExpr(tuple(self.expr(d1, scope) for _ in range(rng.randint(0, 3))))
        if form == "map":
            return sx.MapExpr(
                tuple((self.expr(d1, scope), self.expr(d1, scope)) for _ in range(rng.randint(0, 2)))
            )
        if form == "lookup":
            m = self.map_expr(d1, scope)
            return sx.Lookup(m, self.expr(d1, scope))
        if form == "update":
            m = self.map_expr(d1, scope)
            return sx.Update(m, self.expr(d1, scope), self.expr(d1, scope))
        if form == "assign":
            targets = sorted(set(scope.assignables) - set(scope.protected))
            if not targets:
                return self.leaf(scope)
            name = rng.choice(targets)
            t = scope.assignables[name]
            value = self.typed_expr(t, d1, scope) if rng.random() < 0.6 else self.expr(d1, scope)
            return sx.Assign(name, value)
        if form == "if":
            return sx.If(self.bool_expr(depth, scope), self.expr(d1, scope), self.expr(d1, scope))
        if form == "switch":
            subject = self.expr(d1, scope)
            return sx.Switch(subject, self.cases(d1, scope))
        if form == "visit":
            strategies = (
                [sx.Strategy.BOTTOM_UP, sx.Strategy.BOTTOM_UP_BREAK]
                if self.finite
                else list(sx.Strategy)
            )
            subject = self.expr(d1, scope)
            return sx.Visit(rng.choice(strategies), subject, self.cases(d1, scope, contract=True))
        if form == "block":
            inner = scope.child()
            decls = []
            for _ in range(rng.randint(0, 2)):
                t = gen_type(rng, self.cons_by_type, 1)
                name = self.fresh("x")
                decls.append(sx.LocalDecl(t, name))
                inner.readables[name] = t
                inner.assignables[name] = t
            body = []
            for d in decls:
                if rng.random() < 0.8:
                    body.append(sx.Assign(d.name, self.typed_expr(d.type, d1, inner)))
            for _ in range(rng.randint(1, 2)):
                body.append(self.expr(d1, inner))
            return sx.Block(tuple(decls), tuple(body))
        if form == "for":
            inner = scope.child()
            if rng.random() < 0.5:
                var = self.fresh("it")
                src_t = rng.choice(
                    [ListType(INT), SetType(INT), MapType(INT, STR), ListType(STR)]
                )
                source = (
                    self.typed_expr(src_t, d1, inner)
                    if rng.random() < 0.8
                    else self.expr(d1, inner)
                )
                inner.readables[var] = None
                gen: sx.Generator = sx.Enumerating(var, source)
            else:
                pat, bound = self.pattern(2, inner)
                source = self.expr(d1, inner)
                for b in bound:
                    inner.readables.setdefault(b, None)
                gen = sx.Matching(pat, source)
            return sx.For(gen, self.expr(d1, inner))
        if form == "while":
            return self.bounded_while(d1, scope)
        if form == "solve":
            return self.bounded_solve(d1, scope)
        if form == "call":
            if not self.functions:
                return self.leaf(scope)
            fd = rng.choice(self.functions)
            args = tuple(
                self.typed_expr(p.type, d1, scope)
                if rng.random() < 0.8
                else self.expr(d1, scope)
                for p in fd.params
            )
            return sx.Call(fd.name, args)
        if form == "throw":
            return sx.ThrowExpr(self.expr(d1, scope))
        if form == "trycatch":
            var = self.fresh("exn")
            inner = scope.child()
            inner.readables[var] = None
            return sx.TryCatch(self.expr(d1, scope), var, self.expr(d1, inner))
        if form == "tryfinally":
            return sx.TryFinally(self.expr(d1, scope), self.expr(d1, scope))
        if form == "return":
            return sx.ReturnExpr(self.expr(d1, scope))
        if form == "break":
            return sx.BreakExpr()
        if form == "continue":
            return sx.ContinueExpr()
        if form == "fail":
            return sx.FailExpr()
        return self.leaf(scope)

    def leaf(self, scope: _Scope) -> sx.Expr:
        rng = self.rng
        r = rng.random()
        if r < 0.3 and scope.readables:
            return sx.Var(rng.choice(sorted(scope.readables)))
        if r < 0.55:
            return sx.Lit(rng.randint(0, 9))
        if r < 0.65:
            return sx.Lit(rng.choice(["", "a", "b"]))
        if r < 0.75:
            return sx.Cons(rng.choice(["true", "false"]), ())
        if r < 0.85:
            return value_to_expr(gen_any_value(rng, self.cons_by_type, 1))
        if r < 0.9:
            return sx.FailExpr()
        return sx.Lit(rng.randint(0, 3))

    def map_expr(self, depth: int, scope: _Scope) -> sx.Expr:
        if self.rng.random() < 0.6:
            return value_to_expr(gen_value(self.rng, MapType(INT, INT), self.cons_by_type, 1))
        return self.expr(depth, scope)

    def pick_constructor(self) -> tuple[str, tuple[Type, ...]]:
        name = self.rng.choice(sorted(self.constructors))
        return name, self.constructors[name][1]

    def cases(self, depth: int, scope: _Scope, contract: bool = False) -> tuple[sx.Case, ...]:
        out = []
        for _ in range(self.rng.randint(1, 2)):
            inner = scope.child()
            pat, bound = self.pattern(2, inner)
            for b in bound:
                inner.readables.setdefault(b, None)
            if contract and bound and self.rng.random() < 0.5:
                body: sx.Expr = sx.Var(self.rng.choice(sorted(bound)))
            elif self.rng.random() < 0.3:
                body = sx.FailExpr()
            else:
                body = self.expr(depth, inner)
            out.append(sx.Case(pat, body))
        return tuple(out)

    def pattern(self, depth: int, scope: _Scope) -> tuple[sx.Pattern, set[str]]:
        """A random pattern plus the variable names it can bind.

        Variable patterns occasionally reuse an in-scope name, which at
        match time turns them into equality checks against the store.
        """
        rng = self.rng
        bound: set[str] = set()

        def patvar() -> sx.Pattern:
            if scope.readables and rng.random() < 0.15:
                return sx.VarPat(rng.choice(sorted(scope.readables)))
            name = self.fresh("v")
            bound.add(name)
            return sx.VarPat(name)

        def go(d: int) -> sx.Pattern:
            r = rng.random()
            if d <= 0 or r < 0.2:
                if rng.random() < 0.5:
                    return sx.LitPat(rng.randint(0, 4))
                return patvar()
            if r < 0.45:
                name, fields = self.pick_constructor()
                return sx.ConsPat(name, tuple(go(d - 1) for _ in fields))
            if r < 0.6:
                elems = []
                star_budget = 2
                for _ in range(rng.randint(0, 3)):
                    if star_budget and rng.random() < 0.4:
                        elems.append(sx.Star(self.fresh("s")))
                        star_budget -= 1
                    else:
                        elems.append(go(d - 1))
                kind = rng.choice([sx.ListPat, sx.SetPat])
                return kind(tuple(elems))
            if r < 0.7:
                return sx.TypedPat(
                    gen_type(rng, self.cons_by_type, 1), self.fresh("l"), go(d - 1)
                )
            if r < 0.8:
                return sx.NegPat(go(d - 1))
            if r < 0.9:
                return sx.DeepPat(go(d - 1))
            return self._nonlinear() or patvar()

        pat = go(depth)
        bound = set(sx.pattern_vars(pat))
        return pat, bound

    def _nonlinear(self) -> sx.Pattern | None:
        """A deconstructor repeating one variable across all fields."""
        cons = [(n, f) for n, (_, f) in self.constructors.items() if len(f) >= 2]
        if not cons:
            return None
        n, fields = self.rng.choice(cons)
        name = self.fresh("v")
        return sx.ConsPat(n, tuple(sx.VarPat(name) for _ in fields))

    def bounded_while(self, depth: int, scope: _Scope) -> sx.Expr:
        i = self.fresh("i")
        k = self.rng.randint(1, 3)
        inner = scope.child()
        inner.readables[i] = INT
        inner.assignables[i] = INT
        inner.protected = inner.protected | {i}
        step = sx.Assign(i, sx.Binary(sx.Var(i), "+", sx.Lit(1)))
        body = sx.Block((), (step, self.expr(depth, inner)))
        loop = sx.While(sx.Binary(sx.Var(i), "<", sx.Lit(k)), body)
        return sx.Block(
            (sx.LocalDecl(INT, i),), (sx.Assign(i, sx.Lit(0)), loop)
        )

    def bounded_solve(self, depth: int, scope: _Scope) -> sx.Expr:
        s = self.fresh("s")
        inner = scope.child()
        inner.readables[s] = INT
        inner.assignables[s] = INT
        # The body assigns a value that does not depend on the target, so
        # the second iteration always reaches the fixed point.
        pure = self.typed_expr(INT, 1, scope)
        body = sx.Assign(s, pure)
        return sx.Block(
            (sx.LocalDecl(INT, s),),
            (sx.Assign(s, sx.Lit(0)), sx.Solve((s,), body)),
        )


def gen_program(budget: GenBudget, subset: str = "all") -> sx.ModuleDef:
    """A well-formed random module; ``subset="finite"`` restricts every
    function body to the terminating expression subset."""
    if subset not in ("all", "finite"):
        raise ValueError("subset must be 'all' or 'finite'")
    rng = random.Random(budget.seed)
    return _ModuleGen(rng, budget, subset == "finite").build_module()


def gen_store(rng: random.Random, module: sx.ModuleDef, cons_by_type, params=()) -> Store:
    """A store holding the module's globals, the given parameters, and a
    couple of scratch variables."""
    bindings: dict[str, Value] = {}
    for g in module.globals:
        bindings[g.name] = gen_value(rng, g.type, cons_by_type, 2)
    for p in params:
        bindings[p.name] = gen_value(rng, p.type, cons_by_type, 2)
    return Store(bindings)


def _cons_by_type(module: sx.ModuleDef) -> dict[str, list[tuple[str, tuple[Type, ...]]]]:
    out: dict[str, list[tuple[str, tuple[Type, ...]]]] = {}
    for dd in sx.all_datatypes(module):
        out[dd.name] = [
            (cd.name, tuple(f.type for f in cd.fields)) for cd in dd.constructors
        ]
    return out


# ---------------------------------------------------------------------------
# Brute-force matching oracle


def _combine(env_sets: list[set]) -> set:
    out = {frozenset()}
    for envs in env_sets:
        nxt = set()
        for acc in out:
            accd = dict(acc)
            for e in envs:
                ed = dict(e)
                if all(accd.get(k, v) == v for k, v in ed.items()):
                    merged = dict(accd)
                    merged.update(ed)
                    nxt.add(frozenset(merged.items()))
        out = nxt
        if not out:
            return out
    return out


def oracle_match(p: sx.Pattern, v: Value, store: Store, constructors, budget: int = 6) -> set:
    """The set of environments a pattern admits, by exhaustive enumeration.

    Fully independent of the backtracking matcher: every decomposition is
    enumerated directly.  Environments are returned as frozensets of
    (name, value) items, ignoring order and multiplicity.
    """
    from .values import children as value_children

    def size(x: Value) -> int:
        return 1 + sum(size(c) for c in value_children(x))

    if size(v) > 120:
        raise BudgetExceeded("value too large for the oracle")

    def go(q: sx.Pattern, x: Value) -> set:
        if isinstance(q, sx.LitPat):
            return {frozenset()} if x == Basic(q.value) else set()
        if isinstance(q, sx.VarPat):
            if q.name in store:
                return {frozenset()} if store.get(q.name) == x else set()
            return {frozenset({(q.name, x)})}
        if isinstance(q, sx.ConsPat):
            if not (isinstance(x, VCons) and x.name == q.name and len(x.args) == len(q.args)):
                return set()
            return _combine([go(sub, a) for sub, a in zip(q.args, x.args)])
        if isinstance(q, sx.TypedPat):
            if not subtype(type_of(x, constructors), q.type):
                return set()
            return _combine([{frozenset({(q.name, x)})}, go(q.pattern, x)])
        if isinstance(q, sx.ListPat):
            if not isinstance(x, VList):
                return set()
            if len(x.items) > budget:
                raise BudgetExceeded("list too long for the oracle")
            return seq(q.elements, x.items, ordered=True)
        if isinstance(q, sx.SetPat):
            if not isinstance(x, VSet):
                return set()
            if len(x.items) > budget:
                raise BudgetExceeded("set too large for the oracle")
            return seq(q.elements, x.items, ordered=False)
        if isinstance(q, sx.NegPat):
            return {frozenset()} if not go(q.pattern, x) else set()
        if isinstance(q, sx.DeepPat):
            out = set(go(q.pattern, x))
            for c in value_children(x):
                out |= go(q, c)
            return out
        raise TypeError(f"not a pattern: {q!r}")

    def seq(elements, vals, ordered: bool) -> set:
        if not elements:
            return {frozenset()} if not vals else set()
        head, rest = elements[0], elements[1:]
        out: set = set()
        if isinstance(head, sx.Star):
            if head.name in store:
                bound = store.get(head.name)
                want = VList if ordered else VSet
                if not isinstance(bound, want):
                    return set()
                if ordered:
                    k = len(bound.items)
                    if vals[:k] == bound.items:
                        out |= seq(rest, vals[k:], ordered)
                    return out
                remainder = _set_minus(vals, bound.items)
                if remainder is not None:
                    out |= seq(rest, remainder, ordered)
                return out
            if ordered:
                for k in range(len(vals) + 1):
                    tail = seq(rest, vals[k:], ordered)
                    out |= _combine([{frozenset({(head.name, VList(vals[:k]))})}, tail])
                return out
            idx = range(len(vals))
            for r in range(len(vals) + 1):
                for picked in itertools.combinations(idx, r):
                    sub = tuple(vals[i] for i in picked)
                    remainder = tuple(vals[i] for i in idx if i not in picked)
                    tail = seq(rest, remainder, ordered)
                    out |= _combine([{frozenset({(head.name, VSet(sub))})}, tail])
            return out
        if ordered:
            if not vals:
                return set()
            return _combine([go(head, vals[0]), seq(rest, vals[1:], ordered)])
        for i in range(len(vals)):
            remainder = vals[:i] + vals[i + 1 :]
            out |= _combine([go(head, vals[i]), seq(rest, remainder, ordered)])
        return out

    return go(p, v)


def _set_minus(vals, items):
    remaining = list(vals)
    for x in items:
        for i, y in enumerate(remaining):
            if x == y:
                del remaining[i]
                break
        else:
            return None
    return tuple(remaining)


def env_set(envs) -> set:
    """Normalize a sequence of environments for comparison with the oracle."""
    return {frozenset(e.items()) for e in envs}


def pattern_for_value(rng: random.Random, v: Value, fresh, depth: int) -> sx.Pattern:
    """A pattern shaped after ``v``, so it has real chances to match."""
    r = rng.random()
    if depth <= 0 or r < 0.25:
        return sx.VarPat(fresh("w"))
    if isinstance(v, Basic):
        return sx.LitPat(v.val) if rng.random() < 0.7 else sx.VarPat(fresh("w"))
    if isinstance(v, VCons):
        if r < 0.85:
            return sx.ConsPat(
                v.name,
                tuple(pattern_for_value(rng, a, fresh, depth - 1) for a in v.args),
            )
        return sx.DeepPat(pattern_for_value(rng, v, fresh, depth - 1))
    if isinstance(v, (VList, VSet)):
        elems: list[sx.Pattern] = []
        consumed = 0
        items = v.items
        while consumed < len(items):
            if rng.random() < 0.35:
                take = rng.randint(0, len(items) - consumed)
                elems.append(sx.Star(fresh("ws")))
                consumed += take
            else:
                elems.append(pattern_for_value(rng, items[consumed], fresh, depth - 1))
                consumed += 1
        if rng.random() < 0.3:
            elems.append(sx.Star(fresh("ws")))
        kind = sx.ListPat if isinstance(v, VList) else sx.SetPat
        return kind(tuple(elems))
    return sx.VarPat(fresh("w"))


def gen_match_pair(rng: random.Random, gen: "_ModuleGen"):
    """A (pattern, value, store) triple for oracle-equivalence checking;
    collections stay small enough (up to four elements) for exhaustive
    enumeration."""
    cons_by_type = gen.cons_by_type
    v = gen_any_value(rng, cons_by_type, 2)
    if rng.random() < 0.25:
        elems = tuple(gen_any_value(rng, cons_by_type, 1) for _ in range(4))
        v = VList(elems) if rng.random() < 0.5 else VSet(elems)
    store = Store(
        {f"sv{i}": gen_any_value(rng, cons_by_type, 1) for i in range(rng.randint(0, 2))}
    )
    if rng.random() < 0.5:
        pat = pattern_for_value(rng, v, gen.fresh, 3)
    else:
        scope = _Scope(readables={n: None for n, _ in store.items()})
        pat, _ = gen.pattern(3, scope)
    return pat, v, store


# ---------------------------------------------------------------------------
# Shrinking


def shrink_module(module: sx.ModuleDef, failing) -> sx.ModuleDef:
    """Greedy structural shrink preserving ``failing(module) == True``.

    Tries dropping functions and globals, then replacing function bodies
    with their own sub-expressions; candidates must still validate.
    """

    def ok(cand: sx.ModuleDef) -> bool:
        if validate_module(cand):
            return False
        try:
            return bool(failing(cand))
        except Exception:
            return False

    changed = True
    rounds = 0
    while changed and rounds < 20:
        changed = False
        rounds += 1
        for i in range(len(module.functions)):
            cand = replace(
                module, functions=module.functions[:i] + module.functions[i + 1 :]
            )
            if ok(cand):
                module = cand
                changed = True
                break
        if changed:
            continue
        for i in range(len(module.globals)):
            cand = replace(module, globals=module.globals[:i] + module.globals[i + 1 :])
            if ok(cand):
                module = cand
                changed = True
                break
        if changed:
            continue
        for i, fd in enumerate(module.functions):
            for sub in sx.walk_exprs(fd.body):
                if sub is fd.body:
                    continue
                cand_fn = replace(fd, body=sub)
                cand = replace(
                    module,
                    functions=module.functions[:i] + (cand_fn,) + module.functions[i + 1 :],
                )
                if ok(cand):
                    module = cand
                    changed = True
                    break
            if changed:
                break
    return module


# ---------------------------------------------------------------------------
# Suites


@dataclass
class SuiteReport:
    name: str
    total: int = 0
    passed: int = 0
    failures: list[str] = field(default_factory=list)
    artifacts: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.passed == self.total

    def format(self) -> str:
        lines = [f"suite {self.name}: {self.passed}/{self.total} passed"]
        for f in self.failures[:10]:
            lines.append(f"  FAIL {f}")
        if len(self.failures) > 10:
            lines.append(f"  ... {len(self.failures) - 10} more")
        for a in self.artifacts:
            lines.append(f"  artifact: {a}")
        return "\n".join(lines)


def _write_artifact(
    report: SuiteReport, artifacts_dir, module: sx.ModuleDef, tag: str, failing=None
):
    """Persist a failing module as .rsl, shrunk first when a re-check
    predicate is available."""
    if artifacts_dir is None:
        return
    if failing is not None:
        module = shrink_module(module, failing)
    os.makedirs(artifacts_dir, exist_ok=True)
    path = os.path.join(artifacts_dir, f"{report.name}_{tag}.rsl")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_module(module))
    report.artifacts.append(path)


def _purity_artifact(module: sx.ModuleDef, cases, v: Value, store: Store) -> sx.ModuleDef:
    """A runnable module reproducing one purity triple: the store becomes
    globals and the cases hang off a switch over the embedded value."""
    from .types import VALUE

    globals_ = tuple(
        sx.GlobalDef(name, VALUE, value_to_expr(val)) for name, val in store.items()
    )
    check = sx.FunDef("check", VALUE, (), sx.Switch(value_to_expr(v), tuple(cases)))
    return sx.ModuleDef(globals=globals_, functions=(check,), datatypes=module.datatypes)


def _fails_typing(module: sx.ModuleDef, seed: int) -> bool:
    rng = random.Random(seed)
    ev = Evaluator(module)
    cbt = _cons_by_type(module)
    for fd in module.functions:
        store = gen_store(rng, module, cbt, fd.params)
        try:
            res, out = ev.evaluate(fd.body, store, fuel=10_000)
        except Exception:  # noqa: BLE001
            return True
        if _check_typed(out, res, ev.constructors) is not None:
            return True
    return False


def _fails_progress(module: sx.ModuleDef, seed: int) -> bool:
    rng = random.Random(seed)
    ev = Evaluator(module)
    cbt = _cons_by_type(module)
    for fd in module.functions:
        store = gen_store(rng, module, cbt, fd.params)
        for n in (0, 1, 7, 1000):
            try:
                res, out = eval_expr_fuel(ev, fd.body, store, n)
            except Exception:  # noqa: BLE001
                return True
            if not (_is_vtres(res) and isinstance(out, Store)):
                return True
    return False


def _fails_termination(module: sx.ModuleDef, seed: int) -> bool:
    rng = random.Random(seed)
    ev = Evaluator(module)
    cbt = _cons_by_type(module)
    for fd in module.functions:
        if not sx.is_finite_subset(fd.body):
            return False
        store = gen_store(rng, module, cbt, fd.params)
        try:
            n = min_sufficient_fuel(ev, fd.body, store)
            res_n, st_n = eval_expr_fuel(ev, fd.body, store, n)
            if isinstance(res_n, Timeout):
                return True
            if n > 0 and not isinstance(eval_expr_fuel(ev, fd.body, store, n - 1)[0], Timeout):
                return True
            for extra in (1, 17):
                res_up, st_up = eval_expr_fuel(ev, fd.body, store, n + extra)
                if res_up != res_n or st_up != st_n:
                    return True
        except Exception:  # noqa: BLE001
            return True
    return False


def gen_cases_triple(rng: random.Random, gen: _ModuleGen, module: sx.ModuleDef):
    """A (cases, value, store) triple biased toward failing matches."""
    cons_by_type = gen.cons_by_type
    v = gen_any_value(rng, cons_by_type, 2)
    store = Store(
        {f"sv{i}": gen_any_value(rng, cons_by_type, 1) for i in range(rng.randint(0, 2))}
    )
    scope = _Scope(readables={n: None for n, _ in store.items()})
    all_fail = rng.random() < 0.6
    cases = []
    for _ in range(rng.randint(1, 3)):
        inner = scope.child()
        pat, bound = gen.pattern(2, inner)
        for b in bound:
            inner.readables.setdefault(b, None)
        if all_fail:
            if rng.random() < 0.5:
                body: sx.Expr = sx.FailExpr()
            else:
                # Mutate fresh locals, then fail: exercises state rollback.
                name = gen.fresh("m")
                body = sx.Block(
                    (sx.LocalDecl(INT, name),),
                    (sx.Assign(name, gen.typed_expr(INT, 1, inner)), sx.FailExpr()),
                )
        else:
            body = gen.expr(2, inner)
        cases.append(sx.Case(pat, body))
    return tuple(cases), v, store


def suite_purity(cases: int = 10000, seed: int = 0, artifacts_dir=None) -> SuiteReport:
    """Backtracking purity: failing case evaluation restores the store."""
    report = SuiteReport("purity")
    rng = random.Random(seed)
    gen = _ModuleGen(rng, GenBudget(seed=seed), finite=False)
    gen.build_datatypes()
    module = sx.ModuleDef(datatypes=tuple(gen.datatypes))
    ev = Evaluator(module)
    attempts = 0
    while report.total < cases and attempts < cases * 20:
        attempts += 1
        cs, v, store = gen_cases_triple(rng, gen, module)
        res, out = ev.run_cases(cs, v, store, fuel=3000)
        if res != FAIL:
            continue
        report.total += 1
        if out == store:
            report.passed += 1
        else:
            report.failures.append(
                f"seed={seed} case={attempts}: store changed across failing cases"
            )
            _write_artifact(
                report, artifacts_dir, _purity_artifact(module, cs, v, store), str(attempts)
            )
    if report.total < cases:
        report.failures.append(
            f"generator produced only {report.total} failing triples"
        )
    return report


def _check_typed(store: Store, res, constructors) -> str | None:
    try:
        for _, v in store.items():
            type_of(v, constructors)
        if isinstance(res, (Success, Return, Throw)):
            type_of(res.value, constructors)
    except IllFormedValue as exc:
        return str(exc)
    return None


def suite_typing(cases: int = 10000, seed: int = 0, artifacts_dir=None) -> SuiteReport:
    """Strong typing: results and stores hold only typeable values."""
    report = SuiteReport("typing")
    rng = random.Random(seed)
    for i in range(cases):
        case_seed = rng.randrange(1 << 30)
        module = gen_program(GenBudget(max_depth=3, seed=case_seed))
        ev = Evaluator(module)
        cons_by_type = _cons_by_type(module)
        fd = module.functions[rng.randrange(len(module.functions))]
        store = gen_store(rng, module, cons_by_type, fd.params)
        report.total += 1
        try:
            res, out = ev.evaluate(fd.body, store, fuel=10_000)
        except Exception as exc:  # noqa: BLE001 - any escape is a failure
            report.failures.append(f"case {i}: evaluator raised {exc!r}")
            _write_artifact(
                report, artifacts_dir, module, str(i),
                failing=lambda m: _fails_typing(m, case_seed),
            )
            continue
        problem = _check_typed(out, res, ev.constructors)
        if problem is None:
            report.passed += 1
        else:
            report.failures.append(f"case {i}: {problem}")
            _write_artifact(
                report, artifacts_dir, module, str(i),
                failing=lambda m: _fails_typing(m, case_seed),
            )
    return report


_ADVERSARIAL_SNIPPETS = (
    "x",
    "1 / 0",
    "0 % 0",
    "-{}",
    "(1 : 2)[3]",
    "[1, 2][0 = 1]",
    "{1, while (false()) 1}",
    "[while (false()) 1]",
    "solve (q) 1",
    "if 3 then 1 else 2",
    "while (1) 1",
    "for (z <- 5) z",
    "switch (1) { }",
    "try throw 1 catch e => e",
    "try break finally fail",
    "1 + (return 2)",
    "local int a in a end",
    "bottom-up visit ([1, [2, [3]]]) { case int n : 9 => n + 1 }",
    "top-down visit ({1, 2}) { case x => x }",
    "innermost visit (3) { case 3 => 3 }",
)


def _adversarial_programs():
    from .parser import parse_expr

    out = []
    for text in _ADVERSARIAL_SNIPPETS:
        out.append(parse_expr(text))
    return out


def _is_vtres(res) -> bool:
    from .values import Result

    return isinstance(res, Result)


def suite_progress(cases: int = 10000, seed: int = 0, artifacts_dir=None) -> SuiteReport:
    """Partial progress: bounded evaluation is total at every budget."""
    report = SuiteReport("progress")
    rng = random.Random(seed)
    fuels = (0, 1, 7, 1000)
    adversarial = _adversarial_programs()
    empty_ev = Evaluator(sx.ModuleDef())
    for i, e in enumerate(adversarial):
        report.total += 1
        try:
            for n in fuels:
                res, out = eval_expr_fuel(empty_ev, e, Store({"q": Basic(1)}), n)
                if not (_is_vtres(res) and isinstance(out, Store)):
                    raise AssertionError(f"non-result {res!r}")
            report.passed += 1
        except Exception as exc:  # noqa: BLE001
            report.failures.append(f"adversarial {i}: {exc!r}")
    for i in range(max(cases - len(adversarial), 0)):
        subset = "finite" if i % 3 == 0 else "all"
        case_seed = rng.randrange(1 << 30)
        module = gen_program(GenBudget(max_depth=3, seed=case_seed), subset)
        ev = Evaluator(module)
        cons_by_type = _cons_by_type(module)
        fd = module.functions[rng.randrange(len(module.functions))]
        store = gen_store(rng, module, cons_by_type, fd.params)
        report.total += 1
        try:
            for n in fuels:
                res, out = eval_expr_fuel(ev, fd.body, store, n)
                if not (_is_vtres(res) and isinstance(out, Store)):
                    raise AssertionError(f"non-result {res!r}")
            report.passed += 1
        except Exception as exc:  # noqa: BLE001
            report.failures.append(f"case {i}: {exc!r}")
            _write_artifact(
                report, artifacts_dir, module, str(i),
                failing=lambda m: _fails_progress(m, case_seed),
            )
    return report


def suite_termination(cases: int = 1000, seed: int = 0, artifacts_dir=None) -> SuiteReport:
    """Termination of the finite subset: minimal sufficient fuel exists,
    evaluation below it times out, and results are stable above it."""
    report = SuiteReport("termination")
    rng = random.Random(seed)
    for i in range(cases):
        case_seed = rng.randrange(1 << 30)
        module = gen_program(GenBudget(max_depth=3, seed=case_seed), "finite")
        ev = Evaluator(module)
        cons_by_type = _cons_by_type(module)
        fd = module.functions[rng.randrange(len(module.functions))]
        store = gen_store(rng, module, cons_by_type, fd.params)
        report.total += 1
        try:
            n = min_sufficient_fuel(ev, fd.body, store)
            res_n, st_n = eval_expr_fuel(ev, fd.body, store, n)
            assert not isinstance(res_n, Timeout), "minimal fuel still times out"
            if n > 0:
                res_below, _ = eval_expr_fuel(ev, fd.body, store, n - 1)
                assert isinstance(res_below, Timeout), "not minimal"
            for extra in (1, 17):
                res_up, st_up = eval_expr_fuel(ev, fd.body, store, n + extra)
                assert res_up == res_n and st_up == st_n, "not monotone"
            report.passed += 1
        except Exception as exc:  # noqa: BLE001
            report.failures.append(f"case {i}: {exc!r}")
            _write_artifact(
                report, artifacts_dir, module, str(i),
                failing=lambda m: _fails_termination(m, case_seed),
            )
    return report


_SUITES = {
    "purity": (suite_purity, 10000),
    "typing": (suite_typing, 10000),
    "progress": (suite_progress, 10000),
    "termination": (suite_termination, 1000),
}


def run_suite(name: str, cases: int | None = None, seed: int = 0, artifacts_dir=None) -> SuiteReport:
    fn, default_cases = _SUITES[name]
    return fn(cases if cases else default_cases, seed, artifacts_dir)
