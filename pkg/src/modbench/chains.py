"""Term chain schemes and minimal-chain searches.

Schemes: Day (quaternary d_0..d_k), Gumm (ternary p, j_1..j_{n+1}),
defective Gumm (one absorption equation dropped), Jonsson and ALVIN
(ternary j_0..j_{n+1}, even/odd equation pattern swapped for ALVIN).

A scheme equation holds in the generated variety iff it holds in the
generating algebra, so verification is exhaustive over assignments there.
Searches run in the free algebra on 3 or 4 generators, as alternating
saturation walks between the canonical generated congruences; witnesses of
path elements become the chain terms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebras import FiniteAlgebra
from .free import (FreeAlgebra, Var, build_free, eval_term_vector,
                   meet_labels, saturate, term_str,
                   DEFAULT_CAP_ENTRIES, DEFAULT_WORK_BUDGET)

DAY = "day"
GUMM = "gumm"
DEFECTIVE_GUMM = "defective_gumm"
JONSSON = "jonsson"
ALVIN = "alvin"

SCHEMES = (DAY, GUMM, DEFECTIVE_GUMM, JONSSON, ALVIN)


class ChainError(ValueError):
    pass


@dataclass(frozen=True)
class TermChain:
    """A scheme-tagged term sequence; endpoint projections are enforced."""

    scheme: str
    param: int  # k for Day, n otherwise
    terms: tuple

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ChainError(f"unknown scheme {self.scheme!r}")
        nvars = 4 if self.scheme == DAY else 3
        for t in self.terms:
            from .free import term_vars
            bad = [v for v in term_vars(t) if v >= nvars]
            if bad:
                raise ChainError(f"variable x{bad[0]} out of range in chain")
        if self.scheme == DAY:
            if self.param < 1 or len(self.terms) != self.param + 1:
                raise ChainError("Day chain needs k >= 1 and k+1 terms")
            if self.terms[0] != Var(0) or self.terms[-1] != Var(3):
                raise ChainError("Day chain endpoints must be x and w")
        else:
            if self.param < 0 or len(self.terms) != self.param + 2:
                raise ChainError(
                    f"{self.scheme} chain needs n >= 0 and n+2 terms")
            if self.terms[-1] != Var(2):
                raise ChainError(f"{self.scheme} chain must end with z")
            if self.scheme in (JONSSON, ALVIN) and self.terms[0] != Var(0):
                raise ChainError(f"{self.scheme} chain must start with x")

    def describe(self) -> list[str]:
        return [term_str(t) for t in self.terms]


@dataclass(frozen=True)
class Violation:
    equation: str
    assignment: tuple


@dataclass(frozen=True)
class ChainVerdict:
    valid: bool
    violations: tuple


def _equations(chain: TermChain):
    """(label, termA, mapA, termB, mapB) pairs; maps send term vars to grid
    variables of the scheme arity."""
    t = chain.terms
    eqs = []
    if chain.scheme == DAY:
        k = chain.param
        eqs.append(("x = d0(x,y,z,w)", Var(0), (0, 1, 2, 3), t[0], (0, 1, 2, 3)))
        for i in range(k + 1):
            eqs.append((f"x = d{i}(x,y,y,x)", Var(0), (0, 1, 2, 3), t[i], (0, 1, 1, 0)))
        for i in range(k):
            if i % 2 == 0:
                eqs.append((f"d{i}(x,x,w,w) = d{i + 1}(x,x,w,w)",
                            t[i], (0, 0, 3, 3), t[i + 1], (0, 0, 3, 3)))
            else:
                eqs.append((f"d{i}(x,y,y,w) = d{i + 1}(x,y,y,w)",
                            t[i], (0, 1, 1, 3), t[i + 1], (0, 1, 1, 3)))
        eqs.append((f"d{k}(x,y,z,w) = w", t[k], (0, 1, 2, 3), Var(3), (0, 1, 2, 3)))
        return eqs

    n = chain.param
    if chain.scheme in (GUMM, DEFECTIVE_GUMM):
        p, js = t[0], t  # js[i] is j_i for i >= 1
        eqs.append(("x = p(x,z,z)", Var(0), (0, 1, 2), p, (0, 2, 2)))
        eqs.append(("p(x,x,z) = j1(x,x,z)",
                    p, (0, 0, 2), js[1], (0, 0, 2)))
        for i in range(1, n + 2):
            if chain.scheme == DEFECTIVE_GUMM and i == n:
                continue
            eqs.append((f"x = j{i}(x,y,x)", Var(0), (0, 1, 2), js[i], (0, 1, 0)))
        for i in range(1, n + 1):
            if i % 2 == 1:
                eqs.append((f"j{i}(x,z,z) = j{i + 1}(x,z,z)",
                            js[i], (0, 2, 2), js[i + 1], (0, 2, 2)))
            else:
                eqs.append((f"j{i}(x,x,z) = j{i + 1}(x,x,z)",
                            js[i], (0, 0, 2), js[i + 1], (0, 0, 2)))
        eqs.append((f"j{n + 1}(x,y,z) = z", js[n + 1], (0, 1, 2), Var(2), (0, 1, 2)))
        return eqs

    # Jonsson / ALVIN: j_0 .. j_{n+1}; ALVIN swaps the even/odd pattern
    swap = chain.scheme == ALVIN
    eqs.append(("x = j0(x,y,z)", Var(0), (0, 1, 2), t[0], (0, 1, 2)))
    for i in range(n + 2):
        eqs.append((f"x = j{i}(x,y,x)", Var(0), (0, 1, 2), t[i], (0, 1, 0)))
    for i in range(n + 1):
        zz = (i % 2 == 1) != swap  # True: the (x,z,z) equation
        if zz:
            eqs.append((f"j{i}(x,z,z) = j{i + 1}(x,z,z)",
                        t[i], (0, 2, 2), t[i + 1], (0, 2, 2)))
        else:
            eqs.append((f"j{i}(x,x,z) = j{i + 1}(x,x,z)",
                        t[i], (0, 0, 2), t[i + 1], (0, 0, 2)))
    eqs.append((f"j{n + 1}(x,y,z) = z", t[n + 1], (0, 1, 2), Var(2), (0, 1, 2)))
    return eqs


def verify_chain(a: FiniteAlgebra, chain: TermChain) -> ChainVerdict:
    """Check every scheme equation exhaustively over assignments in ``a``."""
    nvars = 4 if chain.scheme == DAY else 3
    violations = []
    for label, ta, ma, tb, mb in _equations(chain):
        va = eval_term_vector(a, ta, nvars, dict(enumerate(ma)))
        vb = eval_term_vector(a, tb, nvars, dict(enumerate(mb)))
        diff = np.nonzero(va != vb)[0]
        if diff.size:
            flat = int(diff[0])
            assignment = []
            for j in range(nvars):
                assignment.append((flat // a.size ** (nvars - 1 - j)) % a.size)
            violations.append(Violation(label, tuple(assignment)))
    return ChainVerdict(not violations, tuple(violations))


def extend_chain(chain: TermChain) -> TermChain:
    """Lengthen a chain by one by repeating the final projection.

    The new linking equation relates two copies of the same projection, so
    validity is preserved for every scheme.
    """
    return TermChain(chain.scheme, chain.param + 1,
                     chain.terms + (chain.terms[-1],))


def as_defective(chain: TermChain) -> TermChain:
    if chain.scheme != GUMM:
        raise ChainError("only Gumm chains can be weakened to defective")
    return TermChain(DEFECTIVE_GUMM, chain.param, chain.terms)


# ---------------------------------------------------------------------------
# Searches


@dataclass(frozen=True)
class SearchResult:
    """Outcome of a minimal-chain search.

    ``proven_absent`` means the saturation walk reached a fixed point short
    of the target, which rules the chain out for every length, not just up
    to the scan limit.
    """

    scheme: str
    found: bool
    value: int | None
    chain: TermChain | None
    proven_absent: bool
    free_elements: int

    def describe(self) -> str:
        if self.found:
            return f"{self.scheme}: minimal parameter {self.value}"
        if self.proven_absent:
            return f"{self.scheme}: no chain exists (fixed point reached)"
        return f"{self.scheme}: none found within scan limit"


def _walk(layers_rels, start_mask, target, limit):
    """Alternating saturation; returns (step_count, layers) or None info."""
    layers = [start_mask]
    stall = 0
    t = 0
    while not layers[-1][target]:
        if t >= limit:
            return None, layers, False
        rel = layers_rels[t % 2]
        nxt = saturate(rel, layers[-1])
        if np.array_equal(nxt, layers[-1]):
            stall += 1
            if stall >= 2:
                return None, layers, True
        else:
            stall = 0
        layers.append(nxt)
        t += 1
    return t, layers, False


def _backtrack(layers, rels, target):
    """Minimal path, smallest element index at each step."""
    path = [target]
    for i in range(len(layers) - 2, -1, -1):
        rel = rels[i % 2]
        cur = path[0]
        cands = np.nonzero(layers[i] & (rel == rel[cur]))[0]
        path.insert(0, int(cands[0]))
    return path


def search_day(a: FiniteAlgebra, k_max: int = 64,
               free: FreeAlgebra | None = None,
               cap_entries: int = DEFAULT_CAP_ENTRIES,
               work_budget: int = DEFAULT_WORK_BUDGET) -> SearchResult:
    """Minimal k with a valid Day(k) chain, from the four-generator walk.

    In F(4) over generators a,b,c,d take alpha = Cg{(a,d),(b,c)},
    beta = Cg{(a,b),(c,d)}, gamma = Cg{(b,c)}; the minimal k is the length
    of the shortest alternating walk a -(alpha&beta)-(alpha&gamma)-...-> d.
    """
    f = free if free is not None else build_free(
        a, 4, cap_entries=cap_entries, work_budget=work_budget)
    pa = f.gen_pair_congruence([(0, 3), (1, 2)])
    pb = f.gen_pair_congruence([(0, 1), (2, 3)])
    pg = f.gen_pair_congruence([(1, 2)])
    ab, ag = meet_labels(pa, pb), meet_labels(pa, pg)
    src, dst = f.generators[0], f.generators[3]
    start = np.zeros(f.n_elements, dtype=bool)
    start[src] = True
    k, layers, absent = _walk((ab, ag), start, dst, k_max)
    if k is None:
        return SearchResult(DAY, False, None, None, absent, f.n_elements)
    path = _backtrack(layers, (ab, ag), dst)
    if k == 0:  # degenerate variety: a and d collapse in F(4)
        chain = TermChain(DAY, 1, (Var(0), Var(3)))
    else:
        # endpoints are the source/target generators; their terms are the
        # forced projections even when generators collapse
        terms = [f.term_of(e) for e in path]
        terms[0], terms[-1] = Var(0), Var(3)
        chain = TermChain(DAY, k, tuple(terms))
    verdict = verify_chain(a, chain)
    if not verdict.valid:
        raise AssertionError(
            f"extracted Day chain fails verification: {verdict.violations}")
    return SearchResult(DAY, True, chain.param, chain, False, f.n_elements)


def _gumm_config(f: FreeAlgebra):
    pa = f.gen_pair_congruence([(0, 2)])
    pb = f.gen_pair_congruence([(0, 1)])
    pg = f.gen_pair_congruence([(1, 2)])
    return pa, pb, pg, meet_labels(pa, pb), meet_labels(pa, pg)


def search_gumm(a: FiniteAlgebra, n_max: int = 64,
                free: FreeAlgebra | None = None,
                cap_entries: int = DEFAULT_CAP_ENTRIES,
                work_budget: int = DEFAULT_WORK_BUDGET) -> SearchResult:
    """Minimal n with a valid Gumm(n) chain (p, j_1..j_{n+1}).

    In F(3) over x,y,z with alpha = Cg(x,z), beta = Cg(x,y),
    gamma = Cg(y,z): minimal n such that (x,z) lands in
    (alpha & (gamma o beta)) o ((alpha&gamma) o_n (alpha&beta)).
    """
    f = free if free is not None else build_free(
        a, 3, cap_entries=cap_entries, work_budget=work_budget)
    pa, pb, pg, ab, ag = _gumm_config(f)
    x, z = f.generators[0], f.generators[2]
    cls_g_x = pg == pg[x]
    s1 = (pa == pa[x]) & saturate(pb, cls_g_x)
    n, layers, absent = _walk((ag, ab), s1, z, n_max)
    if n is None:
        return SearchResult(GUMM, False, None, None, absent, f.n_elements)
    path = _backtrack(layers, (ag, ab), z)
    e1 = path[0]
    wits = np.nonzero(cls_g_x & (pb == pb[e1]))[0]
    w = int(wits[0])
    terms = [f.term_of(w)] + [f.term_of(e) for e in path]
    terms[-1] = Var(2)  # the path ends at the z generator
    chain = TermChain(GUMM, n, tuple(terms))
    verdict = verify_chain(a, chain)
    if not verdict.valid:
        raise AssertionError(
            f"extracted Gumm chain fails verification: {verdict.violations}")
    return SearchResult(GUMM, True, n, chain, False, f.n_elements)


def search_jonsson(a: FiniteAlgebra, n_max: int = 64, alvin: bool = False,
                   free: FreeAlgebra | None = None,
                   cap_entries: int = DEFAULT_CAP_ENTRIES,
                   work_budget: int = DEFAULT_WORK_BUDGET) -> SearchResult:
    """Minimal n with a Jonsson(n) (or ALVIN) chain j_0..j_{n+1}.

    Same configuration as the Gumm search, but the walk stays inside the
    alternation of alpha&beta and alpha&gamma; ALVIN starts with
    alpha&gamma.  The walk length is n+1.
    """
    scheme = ALVIN if alvin else JONSSON
    f = free if free is not None else build_free(
        a, 3, cap_entries=cap_entries, work_budget=work_budget)
    pa, pb, pg, ab, ag = _gumm_config(f)
    x, z = f.generators[0], f.generators[2]
    start = np.zeros(f.n_elements, dtype=bool)
    start[x] = True
    rels = (ag, ab) if alvin else (ab, ag)
    length, layers, absent = _walk(rels, start, z, n_max + 1)
    if length is None:
        return SearchResult(scheme, False, None, None, absent, f.n_elements)
    path = _backtrack(layers, rels, z)
    if length == 0:  # x and z collapse: degenerate variety
        chain = TermChain(scheme, 0, (Var(0), Var(2)))
    else:
        terms = [f.term_of(e) for e in path]
        terms[0], terms[-1] = Var(0), Var(2)
        chain = TermChain(scheme, length - 1, tuple(terms))
    verdict = verify_chain(a, chain)
    if not verdict.valid:
        raise AssertionError(
            f"extracted {scheme} chain fails verification: "
            f"{verdict.violations}")
    return SearchResult(scheme, True, chain.param, chain, False, f.n_elements)
