import itertools

import pytest

from rascal_light.syntax import ModuleDef, constructor_table
from rascal_light.types import (
    BaseType,
    DataType,
    IllFormedValue,
    ListType,
    MapType,
    SetType,
    VALUE,
    VOID,
    lub,
    lub_seq,
    render_type,
    subtype,
    type_of,
)
from rascal_light.values import Basic, UNDEF, VCons, VList, VMap, VSet

INT = BaseType("int")
STR = BaseType("str")
BOOL = DataType("Bool")

# Only the built-in datatypes are needed for these values.
CONS = constructor_table(ModuleDef())

TRUE = VCons("true", ())
FALSE = VCons("false", ())


def test_type_of_examples():
    assert type_of(UNDEF, CONS) == VOID
    assert type_of(VList(()), CONS) == ListType(VOID)
    # Hand-applied typing: both elements type as Bool, whose join is Bool.
    assert type_of(VSet((TRUE, FALSE)), CONS) == SetType(BOOL)
    assert type_of(Basic(3), CONS) == INT
    assert type_of(Basic("x"), CONS) == STR
    assert type_of(VMap(((Basic(1), Basic("a")),)), CONS) == MapType(INT, STR)
    assert type_of(VMap(()), CONS) == MapType(VOID, VOID)


def test_type_of_ill_formed():
    with pytest.raises(IllFormedValue):
        type_of(VCons("nokey", ()), CONS)  # wrong arity
    with pytest.raises(IllFormedValue):
        type_of(VCons("ghost", ()), CONS)  # undeclared


def test_type_of_respects_canonical_collections():
    a = VSet((Basic(1), TRUE))
    b = VSet((TRUE, Basic(1)))
    assert a == b and type_of(a, CONS) == type_of(b, CONS)


def test_subtype_examples():
    assert subtype(VOID, ListType(INT))
    assert subtype(ListType(VOID), ListType(INT))
    assert not subtype(SetType(INT), ListType(INT))
    assert subtype(MapType(VOID, VOID), MapType(INT, STR))
    assert subtype(INT, VALUE)
    assert not subtype(VALUE, INT)
    assert subtype(BOOL, BOOL)
    assert not subtype(BOOL, DataType("NoKey"))


def test_lub_examples():
    assert lub(ListType(INT), ListType(VOID)) == ListType(INT)
    assert lub_seq([]) == VOID
    assert lub(INT, STR) == VALUE
    assert lub(MapType(INT, VOID), MapType(VOID, STR)) == MapType(INT, STR)
    assert lub(SetType(INT), ListType(INT)) == VALUE
    assert lub(VALUE, INT) == VALUE


def _type_corpus(depth):
    base = [INT, STR, BOOL, VOID, VALUE]
    if depth == 0:
        return base
    inner = _type_corpus(depth - 1)
    out = list(base)
    for t in inner:
        out.append(ListType(t))
        out.append(SetType(t))
    for k, v in itertools.islice(itertools.product(inner, repeat=2), 12):
        out.append(MapType(k, v))
    return out


CORPUS = _type_corpus(3)


def test_subtype_reflexive_transitive_on_corpus():
    for t in CORPUS:
        assert subtype(t, t)
    for a, b, c in itertools.islice(itertools.product(CORPUS, repeat=3), 60000):
        if subtype(a, b) and subtype(b, c):
            assert subtype(a, c)


def test_lub_commutative_associative_idempotent():
    for a, b in itertools.product(CORPUS, repeat=2):
        assert lub(a, b) == lub(b, a)
        assert subtype(a, lub(a, b)) and subtype(b, lub(a, b))
    for a in CORPUS:
        assert lub(a, a) == a
    for a, b, c in itertools.islice(itertools.product(CORPUS, repeat=3), 30000):
        assert lub(lub(a, b), c) == lub(a, lub(b, c))


def test_every_value_types_below_top():
    import random

    from rascal_light.harness import GenBudget, _ModuleGen, gen_any_value

    rng = random.Random(3)
    gen = _ModuleGen(rng, GenBudget(seed=3), finite=False)
    gen.build_datatypes()
    for _ in range(300):
        v = gen_any_value(rng, gen.cons_by_type, 3)
        assert subtype(type_of(v, gen.constructors), VALUE)


def test_render_type():
    assert render_type(MapType(INT, STR)) == "map<int, str>"
    assert render_type(SetType(ListType(VOID))) == "set<list<void>>"
    assert render_type(VALUE) == "value"
    assert render_type(BOOL) == "Bool"
