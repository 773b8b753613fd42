"""Canonical text rendering of modules, expressions, patterns and values.

Rendering is deterministic and reparses to a structurally equal tree:
parenthesization follows the parser's precedence ladder, collection values
print in canonical order, and multi-line layout is used only for blocks
and case lists.
"""

from __future__ import annotations

from . import syntax as sx
from .types import Type, render_type
from .values import Value, render_value

_IND = "  "

# Precedence ladder; statement-shaped forms always parenthesize when they
# appear as operands.
_STMT = 0
_OR, _AND, _CMP, _ADD, _MUL, _UNARY, _POSTFIX, _ATOM = 1, 2, 3, 4, 5, 6, 7, 8

_BIN_PREC = {
    "||": _OR,
    "&&": _AND,
    "==": _CMP,
    "!=": _CMP,
    "<": _CMP,
    "<=": _CMP,
    ">": _CMP,
    ">=": _CMP,
    "in": _CMP,
    "+": _ADD,
    "-": _ADD,
    "*": _MUL,
    "/": _MUL,
    "%": _MUL,
}


def _prec(e: sx.Expr) -> int:
    if isinstance(e, sx.Binary):
        return _BIN_PREC[e.op]
    if isinstance(e, sx.Unary):
        return _UNARY
    if isinstance(e, (sx.Lookup, sx.Update)):
        return _POSTFIX
    if isinstance(
        e, (sx.Lit, sx.Var, sx.Cons, sx.Call, sx.ListExpr, sx.SetExpr, sx.MapExpr)
    ):
        return _ATOM
    return _STMT


def _str_lit(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def render_pattern(p: sx.Pattern) -> str:
    if isinstance(p, sx.LitPat):
        return _str_lit(p.value) if isinstance(p.value, str) else str(p.value)
    if isinstance(p, sx.VarPat):
        return p.name
    if isinstance(p, sx.ConsPat):
        return p.name + "(" + ", ".join(render_pattern(a) for a in p.args) + ")"
    if isinstance(p, sx.TypedPat):
        return f"{render_type(p.type)} {p.name} : {render_pattern(p.pattern)}"
    if isinstance(p, sx.Star):
        return "*" + p.name
    if isinstance(p, sx.ListPat):
        return "[" + ", ".join(render_pattern(a) for a in p.elements) + "]"
    if isinstance(p, sx.SetPat):
        return "{" + ", ".join(render_pattern(a) for a in p.elements) + "}"
    if isinstance(p, sx.NegPat):
        return "!" + render_pattern(p.pattern)
    if isinstance(p, sx.DeepPat):
        inner = render_pattern(p.pattern)
        # A nested descendant would otherwise collide with '//' comments.
        sep = " " if inner.startswith("/") else ""
        return "/" + sep + inner
    raise TypeError(f"not a pattern: {p!r}")


def _render_cases(cases: tuple[sx.Case, ...], indent: int) -> str:
    if not cases:
        return "{ }"
    lines = ["{"]
    for c in cases:
        body = render_expr(c.body, _STMT, indent + 1)
        lines.append(f"{_IND * (indent + 1)}case {render_pattern(c.pattern)} => {body}")
    lines.append(_IND * indent + "}")
    return "\n".join(lines)


def render_expr(e: sx.Expr, min_prec: int = _STMT, indent: int = 0) -> str:
    text = _render_expr(e, indent)
    if _prec(e) < min_prec:
        return "(" + text + ")"
    return text


def _render_expr(e: sx.Expr, indent: int) -> str:
    if isinstance(e, sx.Lit):
        return _str_lit(e.value) if isinstance(e.value, str) else str(e.value)
    if isinstance(e, sx.Var):
        return e.name
    if isinstance(e, sx.Unary):
        return e.op + render_expr(e.operand, _UNARY, indent)
    if isinstance(e, sx.Binary):
        lvl = _BIN_PREC[e.op]
        left = render_expr(e.left, lvl, indent)
        right = render_expr(e.right, lvl + 1, indent)
        return f"{left} {e.op} {right}"
    if isinstance(e, (sx.Cons, sx.Call)):
        args = ", ".join(render_expr(a, _STMT, indent) for a in e.args)
        return f"{e.name}({args})"
    if isinstance(e, sx.ListExpr):
        return "[" + ", ".join(render_expr(a, _STMT, indent) for a in e.items) + "]"
    if isinstance(e, sx.SetExpr):
        return "{" + ", ".join(render_expr(a, _STMT, indent) for a in e.items) + "}"
    if isinstance(e, sx.MapExpr):
        inner = ", ".join(
            f"{render_expr(k, _STMT, indent)} : {render_expr(v, _STMT, indent)}"
            for k, v in e.pairs
        )
        return "(" + inner + ")"
    if isinstance(e, sx.Lookup):
        return (
            render_expr(e.map, _POSTFIX, indent)
            + "["
            + render_expr(e.key, _OR, indent)
            + "]"
        )
    if isinstance(e, sx.Update):
        return (
            render_expr(e.map, _POSTFIX, indent)
            + "["
            + render_expr(e.key, _OR, indent)
            + " = "
            + render_expr(e.value, _OR, indent)
            + "]"
        )
    if isinstance(e, sx.ReturnExpr):
        return "return " + render_expr(e.value, _STMT, indent)
    if isinstance(e, sx.ThrowExpr):
        return "throw " + render_expr(e.value, _STMT, indent)
    if isinstance(e, sx.Assign):
        return f"{e.name} = " + render_expr(e.value, _STMT, indent)
    if isinstance(e, sx.If):
        return (
            "if "
            + render_expr(e.cond, _STMT, indent)
            + " then "
            + render_expr(e.then, _STMT, indent)
            + " else "
            + render_expr(e.els, _STMT, indent)
        )
    if isinstance(e, sx.Switch):
        return (
            "switch ("
            + render_expr(e.subject, _STMT, indent)
            + ") "
            + _render_cases(e.cases, indent)
        )
    if isinstance(e, sx.Visit):
        return (
            e.strategy.value
            + " visit ("
            + render_expr(e.subject, _STMT, indent)
            + ") "
            + _render_cases(e.cases, indent)
        )
    if isinstance(e, sx.BreakExpr):
        return "break"
    if isinstance(e, sx.ContinueExpr):
        return "continue"
    if isinstance(e, sx.FailExpr):
        return "fail"
    if isinstance(e, sx.Block):
        head = "local"
        if e.locals:
            decls = ", ".join(f"{render_type(d.type)} {d.name}" for d in e.locals)
            head += " " + decls
        head += " in"
        lines = [head]
        for i, sub in enumerate(e.body):
            sep = ";" if i + 1 < len(e.body) else ""
            lines.append(_IND * (indent + 1) + render_expr(sub, _STMT, indent + 1) + sep)
        lines.append(_IND * indent + "end")
        return "\n".join(lines)
    if isinstance(e, sx.For):
        g = e.generator
        if isinstance(g, sx.Enumerating):
            gen = f"{g.var} <- " + render_expr(g.source, _STMT, indent)
        else:
            gen = render_pattern(g.pattern) + " := " + render_expr(g.source, _STMT, indent)
        return f"for ({gen}) " + render_expr(e.body, _STMT, indent)
    if isinstance(e, sx.While):
        return (
            "while ("
            + render_expr(e.cond, _STMT, indent)
            + ") "
            + render_expr(e.body, _STMT, indent)
        )
    if isinstance(e, sx.Solve):
        return (
            "solve ("
            + ", ".join(e.targets)
            + ") "
            + render_expr(e.body, _STMT, indent)
        )
    if isinstance(e, sx.TryCatch):
        return (
            "try "
            + render_expr(e.body, _STMT, indent)
            + f" catch {e.var} => "
            + render_expr(e.handler, _STMT, indent)
        )
    if isinstance(e, sx.TryFinally):
        return (
            "try "
            + render_expr(e.body, _STMT, indent)
            + " finally "
            + render_expr(e.fin, _STMT, indent)
        )
    raise TypeError(f"not an expression: {e!r}")


def render_module(m: sx.ModuleDef) -> str:
    parts: list[str] = []
    for dd in m.datatypes:
        cons = " | ".join(
            cd.name
            + "("
            + ", ".join(f"{render_type(f.type)} {f.name}" for f in cd.fields)
            + ")"
            for cd in dd.constructors
        )
        parts.append(f"data {dd.name} = {cons};")
    for g in m.globals:
        parts.append(
            f"global {render_type(g.type)} {g.name} = "
            + render_expr(g.init, _STMT, 0)
            + ";"
        )
    for f in m.functions:
        params = ", ".join(f"{render_type(p.type)} {p.name}" for p in f.params)
        body = render_expr(f.body, _STMT, 1)
        parts.append(f"{render_type(f.return_type)} {f.name}({params}) =\n{_IND}{body};")
    return "\n\n".join(parts) + ("\n" if parts else "")


def render(x) -> str:
    """Render a module, expression, pattern, type, or value to source text."""
    if isinstance(x, sx.ModuleDef):
        return render_module(x)
    if isinstance(x, sx.Expr):
        return render_expr(x)
    if isinstance(x, sx.Pattern):
        return render_pattern(x)
    if isinstance(x, Type):
        return render_type(x)
    if isinstance(x, Value):
        return render_value(x)
    raise TypeError(f"cannot render {x!r}")
