import pytest

from modbench.chains import (ALVIN, DAY, GUMM, JONSSON, ChainError,
                             TermChain, as_defective, extend_chain,
                             search_day, search_gumm, search_jonsson,
                             verify_chain)
from modbench.checks import pw_check
from modbench.catalog import get_entry
from modbench.free import App, Var

PLUS3 = App("plus", (Var(1), App("plus", (Var(2), Var(3)))))      # y+z+w
MALTSEV = App("plus", (Var(0), App("plus", (Var(1), Var(2)))))    # x+y+z
MAJ = App("join", (App("join", (
    App("meet", (Var(0), Var(1))),
    App("meet", (Var(1), Var(2))))),
    App("meet", (Var(0), Var(2)))))


def test_verify_day_z2(z2):
    chain = TermChain(DAY, 2, (Var(0), PLUS3, Var(3)))
    assert verify_chain(z2, chain).valid


def test_verify_day_violation(z2):
    chain = TermChain(DAY, 2, (Var(0), Var(0), Var(3)))
    verdict = verify_chain(z2, chain)
    assert not verdict.valid
    labels = [v.equation for v in verdict.violations]
    assert any("d1" in s for s in labels)
    # counter-assignments are reported
    assert all(len(v.assignment) == 4 for v in verdict.violations)


def test_verify_gumm_z2(z2):
    chain = TermChain(GUMM, 0, (MALTSEV, Var(2)))
    assert verify_chain(z2, chain).valid


def test_verify_jonsson_majority(lattice2):
    chain = TermChain(JONSSON, 1, (Var(0), MAJ, Var(2)))
    assert verify_chain(lattice2, chain).valid


def test_verify_alvin_pixley(pixley3):
    chain = TermChain(ALVIN, 1, (Var(0), App("t", (Var(0), Var(1), Var(2))),
                                 Var(2)))
    assert verify_chain(pixley3, chain).valid


def test_structural_constraints():
    with pytest.raises(ChainError):
        TermChain(DAY, 2, (Var(1), PLUS3, Var(3)))   # must start with x
    with pytest.raises(ChainError):
        TermChain(DAY, 2, (Var(0), PLUS3, Var(2)))   # must end with w
    with pytest.raises(ChainError):
        TermChain(DAY, 0, (Var(0),))
    with pytest.raises(ChainError):
        TermChain(GUMM, 1, (MALTSEV, Var(2)))        # wrong length
    with pytest.raises(ChainError):
        TermChain(GUMM, 0, (App("f", (Var(3),)), Var(2)))  # var out of range


def test_search_day_values(corpus, pw_context):
    expected = {"one": 1, "z2": 2, "lattice2": 3, "chain3": 3}
    for name, k in expected.items():
        a = corpus[name]
        res = search_day(a, free=pw_context(a).free(4))
        assert res.found and res.value == k
        assert verify_chain(a, res.chain).valid


def test_search_day_minimality_direct(lattice2, pw_context):
    # direct relational refutation of k-1 in the free algebra
    ctx = pw_context(lattice2)
    day = get_entry("DAY")
    res = search_day(lattice2, free=ctx.free(4))
    assert not pw_check(ctx, day.identity(m=3), k=res.value - 1)
    assert pw_check(ctx, day.identity(m=3), k=res.value)


def test_search_day_not_modular(semilattice2):
    res = search_day(semilattice2)
    assert not res.found
    assert res.proven_absent


def test_search_gumm_values(corpus, pw_context):
    expected = {"one": 0, "z2": 0, "lattice2": 1, "chain3": 1, "pixley3": 0}
    for name, n in expected.items():
        a = corpus[name]
        res = search_gumm(a, free=pw_context(a).free(3))
        assert res.found and res.value == n


def test_search_gumm_maltsev_case(z2, pw_context):
    res = search_gumm(z2, free=pw_context(z2).free(3))
    chain = res.chain
    assert chain.param == 0 and len(chain.terms) == 2
    assert verify_chain(z2, chain).valid


def test_search_jonsson(corpus, pw_context):
    lat = corpus["lattice2"]
    res = search_jonsson(lat, free=pw_context(lat).free(3))
    assert res.value == 1  # majority makes distributive lattices 2-distributive
    z2 = corpus["z2"]
    res = search_jonsson(z2, free=pw_context(z2).free(3))
    assert not res.found and res.proven_absent


def test_search_alvin_pixley(pixley3, pw_context):
    res = search_jonsson(pixley3, alvin=True, free=pw_context(pixley3).free(3))
    assert res.found and res.value == 1
    assert res.chain.scheme == ALVIN


def test_chains_from_searches_verify(corpus, pw_context):
    # pixley3 is excluded from the Day search: its F(4) exceeds default caps
    for name in ("one", "z2", "lattice2", "chain3", "pixley3"):
        a = corpus[name]
        ctx = pw_context(a)
        searches = [search_gumm(a, free=ctx.free(3)),
                    search_jonsson(a, free=ctx.free(3)),
                    search_jonsson(a, alvin=True, free=ctx.free(3))]
        if name != "pixley3":
            searches.append(search_day(a, free=ctx.free(4)))
        for res in searches:
            if res.found:
                assert verify_chain(a, res.chain).valid


def test_extend_chain(z2, lattice2):
    day = TermChain(DAY, 2, (Var(0), PLUS3, Var(3)))
    ext = extend_chain(day)
    assert ext.param == 3 and verify_chain(z2, ext).valid
    gumm = TermChain(GUMM, 0, (MALTSEV, Var(2)))
    assert verify_chain(z2, extend_chain(gumm)).valid
    jon = TermChain(JONSSON, 1, (Var(0), MAJ, Var(2)))
    assert verify_chain(lattice2, extend_chain(jon)).valid


def test_defective_weaker_than_gumm(lattice2, pw_context):
    res = search_gumm(lattice2, free=pw_context(lattice2).free(3))
    dd = as_defective(extend_chain(res.chain))
    assert verify_chain(lattice2, dd).valid


def test_day_gumm_count_relations(corpus, pw_context):
    # k <= 2n+2 and n+2 <= k^2-k+1 for every modular corpus algebra
    for name in ("z2", "lattice2", "chain3"):
        a = corpus[name]
        ctx = pw_context(a)
        k = search_day(a, free=ctx.free(4)).value
        n = search_gumm(a, free=ctx.free(3)).value
        assert k <= 2 * n + 2
        assert n + 2 <= k * k - k + 1
