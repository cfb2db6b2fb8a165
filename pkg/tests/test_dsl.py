import pytest

from modbench.catalog import CATALOG, CatalogError, get_entry
from modbench.dsl import (AltE, ComposeE, ConvE, DslError, K, MeetE, PowE,
                          VarE, compose, expr_str, identity_str, meet,
                          parse_identity, push_converse, substitute_k)
from modbench.relations import ADMISSIBLE, CONGRUENCE, TOLERANCE


def test_parse_day_example():
    text = "cong a b g; a & (b o (a & g) o b) <= alt(a&b, a&g, k)"
    ident = parse_identity(text)
    assert dict(ident.var_kinds) == {n: CONGRUENCE for n in "abg"}
    assert isinstance(ident.lhs, MeetE)
    assert isinstance(ident.rhs, AltE)
    assert ident.rhs.count == K


def test_parse_mixed_kinds():
    text = ("cong a; adm R S; a & (R o S) <= "
            "(a & gen_adm(conv(R), S)) o alt(a & R o a & S, "
            "a & conv(S) o a & conv(R), k)")
    ident = parse_identity(text)
    kinds = dict(ident.var_kinds)
    assert kinds["a"] == CONGRUENCE and kinds["R"] == ADMISSIBLE


def test_parse_tolerance_pow():
    ident = parse_identity("tol T P; pow(T, 2) & pow(P, 3) <= pow(T & P, k)")
    kinds = dict(ident.var_kinds)
    assert kinds["T"] == TOLERANCE
    assert ident.lhs == MeetE((PowE(VarE("T"), 2), PowE(VarE("P"), 3)))


def test_parse_errors_carry_position():
    with pytest.raises(DslError):
        parse_identity("cong a; a <= ")
    with pytest.raises(DslError):
        parse_identity("cong a; a <= b")        # undeclared variable
    with pytest.raises(DslError):
        parse_identity("cong a; a & <= a")      # syntax
    with pytest.raises(DslError):
        parse_identity("cong k; k <= k")        # reserved word
    with pytest.raises(DslError):
        parse_identity("cong a; alt(a, a, -1) <= a")


def test_meet_flattens_and_dedups():
    a, b = VarE("a"), VarE("b")
    assert meet(a, meet(a, b)) == MeetE((a, b))
    assert compose(a, compose(b, a)) == ComposeE((a, b, a))


def test_print_parse_round_trip_whole_catalog():
    for name in sorted(CATALOG):
        ident = get_entry(name).identity()
        printed = identity_str(ident)
        reparsed = parse_identity(printed)
        assert identity_str(reparsed) == printed, name
        assert reparsed.lhs == ident.lhs and reparsed.rhs == ident.rhs, name


def test_substitute_k():
    ident = get_entry("DAY").identity()
    rhs = substitute_k(ident.rhs, 4)
    assert rhs.count == 4


def test_push_converse():
    kinds = {"a": CONGRUENCE, "R": ADMISSIBLE}
    e = ConvE(compose(VarE("a"), VarE("R")))
    out = push_converse(e, kinds)
    assert out == compose(ConvE(VarE("R")), VarE("a"))
    # even alternation reverses the roles
    e = ConvE(AltE(VarE("a"), VarE("R"), 2))
    out = push_converse(e, kinds)
    assert out == AltE(ConvE(VarE("R")), VarE("a"), 2)


def test_catalog_parameter_validation():
    with pytest.raises(CatalogError):
        get_entry("DAY").identity(m=2)
    with pytest.raises(CatalogError):
        get_entry("QMOD2").identity(t=3)   # t must be even
    with pytest.raises(CatalogError):
        get_entry("DAY").identity(zz=1)
    with pytest.raises(CatalogError):
        get_entry("NOPE")


def test_catalog_size():
    # the documented families, counting grouped equations separately
    assert len(CATALOG) == 31


def test_dstar_structure():
    one = get_entry("DSTAR").identity(l=1)
    day = get_entry("DAY").identity(m=3)
    assert one.lhs == day.lhs and one.rhs == day.rhs
    two = get_entry("DSTAR").identity(l=2)
    assert "(g o (a & b) o g)" in expr_str(two.lhs)


def test_parse_gen_tol_and_gen_cong():
    ident = parse_identity(
        "cong a; tol D; adm R; a & gen_tol(R) <= gen_cong(D, conv(R))")
    printed = identity_str(ident)
    assert identity_str(parse_identity(printed)) == printed
