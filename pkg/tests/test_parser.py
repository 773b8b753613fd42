import glob
import os

import pytest

from rascal_light import syntax as sx
from rascal_light.harness import GenBudget, gen_program
from rascal_light.parser import (
    ParseError,
    SourceFile,
    load_module,
    parse_expr,
    parse_module,
    parse_value,
)
from rascal_light.render import render, render_expr
from rascal_light.syntax import Strategy, validate_module, walk_exprs
from rascal_light.values import Basic, UNDEF, VSet

from conftest import PROGRAMS


ALL_PROGRAMS = sorted(glob.glob(os.path.join(PROGRAMS, "*.rsl")))


def test_programs_exist():
    names = {os.path.basename(p) for p in ALL_PROGRAMS}
    assert {"simplifier.rsl", "fixpoint.rsl", "knapsack.rsl", "prod.rsl", "infincrement.rsl"} <= names


@pytest.mark.parametrize("path", ALL_PROGRAMS, ids=os.path.basename)
def test_example_programs_roundtrip(path):
    m = load_module(path)
    assert validate_module(m) == []
    again = parse_module(render(m))
    assert again == m


def test_simplifier_shape(simplifier_module):
    (fn,) = simplifier_module.functions
    visit = fn.body
    assert isinstance(visit, sx.Visit)
    assert visit.strategy == Strategy.BOTTOM_UP
    assert len(visit.cases) == 2


def test_knapsack_has_two_star_set_pattern(knapsack_module):
    pats = [
        c.pattern
        for f in knapsack_module.functions
        for e in walk_exprs(f.body)
        if isinstance(e, sx.Switch)
        for c in e.cases
    ]
    (setpat,) = [p for p in pats if isinstance(p, sx.SetPat)]
    assert sum(isinstance(el, sx.Star) for el in setpat.elements) == 2


def test_parse_error_has_span():
    with pytest.raises(ParseError) as exc:
        parse_module("data D = k(;")
    assert exc.value.span.start == 11  # at the ';'


def test_parse_error_cases():
    for bad in (
        "int f() = ;",
        "data D = ;",
        "int f() = local int x in x",  # missing end
        'global int g = "unterminated;',
        "int f() = 1 +;",
    ):
        with pytest.raises(ParseError):
            parse_module(bad)


def test_expression_grammar_corners():
    # Empty map vs grouping vs map literal.
    assert isinstance(parse_expr("()"), sx.MapExpr)
    assert isinstance(parse_expr("(1)"), sx.Lit)
    assert isinstance(parse_expr("(1 : 2)"), sx.MapExpr)
    # Lookup of an assignment needs parentheses; bare = is an update.
    upd = parse_expr("(1 : 2)[3 = 4]")
    assert isinstance(upd, sx.Update)
    # Enumeration arrow must be adjacent; spaced '<' '-' is a comparison.
    e = parse_expr("for (z <- [1]) z")
    assert isinstance(e.generator, sx.Enumerating)
    cmp = parse_expr("1 < - 2")
    assert isinstance(cmp, sx.Binary) and cmp.op == "<"
    # Strategy keywords lex greedily only when hyphenated adjacently.
    v = parse_expr("top-down-break visit (1) { }")
    assert isinstance(v, sx.Visit) and v.strategy == Strategy.TOP_DOWN_BREAK
    sub = parse_expr("top - down", None)  # plain subtraction of variables
    assert isinstance(sub, sx.Binary) and sub.op == "-"


def test_case_colon_separator_accepted():
    a = parse_expr("switch (1) { case 1 : 2 }")
    b = parse_expr("switch (1) { case 1 => 2 }")
    assert a == b


def test_function_brace_sugar_desugars_to_block():
    m = parse_module("int f() { int x = 1; x + 1 }")
    body = m.functions[0].body
    assert isinstance(body, sx.Block)
    assert [d.name for d in body.locals] == ["x"]
    assert isinstance(body.body[0], sx.Assign)
    assert validate_module(m) == []


def test_nested_generics_parse():
    m = parse_module("int f(set<list<int>> x, map<int, set<str>> y) = 1;")
    assert validate_module(m) == []


def test_constructor_call_resolution():
    m = parse_module("data D = mk(int a);\nint f() = local in mk(1); g() end;\nint g() = 1;")
    exprs = list(walk_exprs(m.functions[0].body))
    assert any(isinstance(e, sx.Cons) and e.name == "mk" for e in exprs)
    assert any(isinstance(e, sx.Call) and e.name == "g" for e in exprs)


def test_value_literals_roundtrip():
    texts = [
        "42",
        "-7",
        '"a\\"b\\n"',
        "true()",
        "item(2, 100)",
        "[1, 2, 3]",
        "{1, 2}",
        "(1 : 2, 3 : 4)",
        "<undefined>",
        "[{1}, (2 : [3])]",
    ]
    for t in texts:
        v = parse_value(t)
        assert parse_value(render(v)) == v
    assert parse_value("<undefined>") == UNDEF
    assert parse_value("{2, 1, 2}") == VSet((Basic(1), Basic(2)))


def test_render_parenthesizes_statement_operands():
    e = sx.Binary(sx.BreakExpr(), "+", sx.Lit(1))
    text = render_expr(e)
    assert text == "(break) + 1"
    assert parse_expr(text) == e


def test_unary_in_comparison_renders_spaced():
    e = sx.Binary(sx.Var("x"), "<", sx.Unary("-", sx.Var("y")))
    text = render_expr(e)
    again = parse_expr(text)
    assert again == e


def test_generated_module_roundtrip_small():
    for seed in range(120):
        m = gen_program(GenBudget(max_depth=4, seed=seed))
        text = render(m)
        again = parse_module(text)
        assert again == m, f"seed {seed}:\n{text}"


def test_span_soundness_on_example_programs():
    for path in ALL_PROGRAMS:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        m = parse_module(text)
        for f in m.functions:
            for e in walk_exprs(f.body):
                snippet = text[e.span.start : e.span.end]
                again = parse_expr(snippet, m)
                assert again == e, (path, snippet)


def test_source_file_line_col():
    src = SourceFile("f.rsl", "ab\ncd\ne")
    assert src.line_col(0) == (1, 1)
    assert src.line_col(3) == (2, 1)
    assert src.line_col(6) == (3, 1)
    assert src.format_span(sx.Span(3, 4)) == "f.rsl:2:1"


def test_crlf_accepted():
    m = parse_module("int f() =\r\n  1;\r\n")
    assert validate_module(m) == []


def test_comments_ignored():
    m = parse_module("// top comment\nint f() = 1; // trailing\n")
    assert m.functions[0].name == "f"
