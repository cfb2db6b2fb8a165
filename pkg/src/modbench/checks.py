"""Deciding identity inclusions.

Two routes:

* ``check_concrete`` quantifies the variables over actual relations of one
  algebra (all congruences; enumerated admissible relations and tolerances)
  and evaluates both sides with the bitset calculus.  For relation
  variables this is algebra-level evidence, not a variety-wide verdict.

* ``pw_check`` decides congruence-variable inclusions for the whole
  generated variety: one free generator per node of the left-hand chain
  structure, congruences generated from the labeled edges, and a single
  membership test of the distinguished pair against the right-hand side.

Congruences on the free algebra are kept as partition label arrays; the
right-hand side is evaluated by saturation walks, splitting per class when
a composite meets a congruence inside an intersection.
"""

from __future__ import annotations

from dataclasses import dataclass
import itertools

import numpy as np

from .algebras import FiniteAlgebra
from .catalog import ALGEBRA, VARIETY, CatalogError, get_entry
from .dsl import (AltE, ComposeE, ConvE, GenE, Identity, K, MeetE, PowE,
                  VarE, expr_str, has_symbolic, push_converse,
                  substitute_k)
from .free import (CapExceeded, FreeAlgebra, build_free, meet_labels,
                   saturate, DEFAULT_CAP_ENTRIES, DEFAULT_WORK_BUDGET)
from .relations import (CONGRUENCE, BinRel, GuardExceeded,
                        all_congruences, alt, compose, generate,
                        is_compatible, meet, power)


class CheckError(ValueError):
    pass


class PWGrammarError(CheckError):
    """Left-hand side not in the generic-reduction grammar."""


# ---------------------------------------------------------------------------
# Concrete evaluation


def eval_expr(a: FiniteAlgebra, e, env: dict[str, BinRel],
              kinds: dict[str, str] | None = None) -> BinRel:
    """Structural evaluation over explicit relations.

    Alternation and power counts must be concrete; a count of 0 yields the
    identity relation.  When ``kinds`` is given, bound relations are
    verified against their declared kinds.
    """
    if kinds:
        for name, kind in kinds.items():
            if name in env and not is_compatible(a, env[name], kind):
                raise CheckError(
                    f"variable {name} bound to a relation that is not "
                    f"{kind}")

    def rec(x) -> BinRel:
        if isinstance(x, VarE):
            if x.name not in env:
                raise CheckError(f"unbound variable {x.name}")
            return env[x.name]
        if isinstance(x, ComposeE):
            out = rec(x.items[0])
            for it in x.items[1:]:
                out = compose(out, rec(it))
            return out
        if isinstance(x, MeetE):
            out = rec(x.items[0])
            for it in x.items[1:]:
                out = meet(out, rec(it))
            return out
        if isinstance(x, ConvE):
            return rec(x.item).converse()
        if isinstance(x, GenE):
            pairs = []
            for it in x.items:
                pairs.extend(rec(it).pairs())
            return generate(a, pairs, x.kind)
        if isinstance(x, AltE):
            if x.count == K:
                raise CheckError("symbolic count not substituted")
            if x.count == 0:
                return BinRel.identity(a.size)
            return alt(rec(x.first), rec(x.second), x.count)
        if isinstance(x, PowE):
            if x.count == K:
                raise CheckError("symbolic count not substituted")
            if x.count == 0:
                return BinRel.identity(a.size)
            return power(rec(x.item), x.count)
        raise CheckError(f"not an expression: {x!r}")

    return rec(e)


_REL_CACHE: dict = {}


def enumerate_relations(a: FiniteAlgebra, kind: str, enum_cap: int = 4,
                        seed_pair_cap: int = 2) -> list[BinRel]:
    """Deterministic family of relations of one kind on ``a``.

    Complete for universes up to ``enum_cap``; larger universes get the
    relations generated from all seed sets of at most ``seed_pair_cap``
    off-diagonal pairs (a sound refutation family, not a complete one).
    """
    key = (a, kind, enum_cap, seed_pair_cap)
    if key in _REL_CACHE:
        return _REL_CACHE[key]
    n = a.size
    out: list[BinRel] = []
    if kind == CONGRUENCE:
        out = all_congruences(a)
    elif n <= enum_cap:
        offdiag = [(i, j) for i in range(n) for j in range(n) if i != j]
        for mask in range(1 << len(offdiag)):
            pairs = [offdiag[t] for t in range(len(offdiag))
                     if (mask >> t) & 1]
            r = BinRel.from_pairs(n, pairs)
            if is_compatible(a, r, kind):
                out.append(r)
    else:
        seen = set()
        offdiag = [(i, j) for i in range(n) for j in range(n) if i != j]
        seeds = [()] + [(p,) for p in offdiag] + \
            list(itertools.combinations(offdiag, seed_pair_cap))
        for seed in seeds:
            r = generate(a, list(seed), kind)
            if r.rows not in seen:
                seen.add(r.rows)
                out.append(r)
        out.sort(key=lambda r: r.rows)
    _REL_CACHE[key] = out
    return out


def complete_enumeration(a: FiniteAlgebra, ident: Identity,
                         enum_cap: int = 4) -> bool:
    return all(kind == CONGRUENCE or a.size <= enum_cap
               for _, kind in ident.var_kinds)


@dataclass(frozen=True)
class ConcreteResult:
    holds: bool
    counterexample: dict | None
    complete: bool           # was the variable enumeration exhaustive?
    envs_checked: int


def check_concrete(a: FiniteAlgebra, ident: Identity, k: int | None = None,
                   enum_cap: int = 4, seed_pair_cap: int = 2,
                   max_envs: int = 2_000_000) -> ConcreteResult:
    """Quantify the declared variables over relations of ``a``."""
    lhs, rhs = ident.lhs, ident.rhs
    if has_symbolic(lhs) or has_symbolic(rhs):
        if k is None:
            raise CheckError(f"{ident.name} needs a value for k")
        lhs = substitute_k(lhs, k)
        rhs = substitute_k(rhs, k)
    spaces = []
    for name, kind in ident.var_kinds:
        spaces.append((name, enumerate_relations(a, kind, enum_cap,
                                                 seed_pair_cap)))
    total = 1
    for _, space in spaces:
        total *= len(space)
    if total > max_envs:
        raise GuardExceeded(
            f"{total} variable assignments exceed the cap {max_envs}")
    env_names = [name for name, _ in spaces]
    checked = 0
    for combo in itertools.product(*[space for _, space in spaces]):
        env = dict(zip(env_names, combo))
        ok = True
        for cond in ident.side_conditions:
            if not (eval_expr(a, cond.sub, env) <= eval_expr(a, cond.sup, env)):
                ok = False
                break
        if not ok:
            continue
        checked += 1
        left = eval_expr(a, lhs, env)
        right = eval_expr(a, rhs, env)
        if not (left <= right):
            return ConcreteResult(False, env, complete_enumeration(
                a, ident, enum_cap), checked)
    return ConcreteResult(True, None,
                          complete_enumeration(a, ident, enum_cap), checked)


# ---------------------------------------------------------------------------
# The generic (variety-level) reduction


@dataclass(frozen=True)
class PWConfig:
    nodes: int
    seeds: tuple          # ((var, ((u, w), ...)), ...)
    source: int
    target: int


def _expand_counts(e):
    """Rewrite concrete alternations/powers on a left-hand side into
    explicit compositions."""
    if isinstance(e, VarE):
        return e
    if isinstance(e, ComposeE):
        return ComposeE(tuple(_expand_counts(i) for i in e.items))
    if isinstance(e, MeetE):
        from .dsl import meet as meet_build
        return meet_build(*[_expand_counts(i) for i in e.items])
    if isinstance(e, AltE):
        if e.count == K or e.count < 1:
            raise PWGrammarError("left-hand alternation must be concrete "
                                 "and positive")
        first = _expand_counts(e.first)
        second = _expand_counts(e.second)
        items = [first if i % 2 == 0 else second for i in range(e.count)]
        from .dsl import compose as compose_build
        return compose_build(*items)
    if isinstance(e, PowE):
        if e.count == K or e.count < 1:
            raise PWGrammarError("left-hand power must be concrete and "
                                 "positive")
        item = _expand_counts(e.item)
        from .dsl import compose as compose_build
        return compose_build(*[item] * e.count)
    raise PWGrammarError(f"not allowed on a generic left-hand side: "
                         f"{expr_str(e)}")


def pw_analyze(lhs, kinds: dict[str, str]) -> PWConfig:
    """Generic configuration of a left-hand side.

    Grammar: an atom is an intersection of congruence variables with at
    most one parenthesized chain; a chain is a composition of atoms.  Each
    atom spans an edge; its variables collect that edge as a generating
    pair; its chain splits the edge with fresh nodes.
    """
    lhs = _expand_counts(lhs)
    counter = itertools.count()
    seeds: dict[str, list] = {}

    def do_atom(e, u, w):
        vars_, chain = [], None
        items = e.items if isinstance(e, MeetE) else (e,)
        for it in items:
            if isinstance(it, VarE):
                vars_.append(it.name)
            elif isinstance(it, ComposeE):
                if chain is not None:
                    raise PWGrammarError(
                        "an atom may contain at most one chain")
                chain = it
            else:
                raise PWGrammarError(
                    f"not allowed in a generic atom: {expr_str(it)}")
        for v in vars_:
            if kinds.get(v) != CONGRUENCE:
                raise PWGrammarError(
                    f"variable {v} is not a congruence variable")
            seeds.setdefault(v, []).append((u, w))
        if chain is not None:
            prev = u
            for i, factor in enumerate(chain.items):
                nxt = w if i == len(chain.items) - 1 else next(counter)
                do_atom(factor, prev, nxt)
                prev = nxt

    source, target = next(counter), next(counter)
    do_atom(lhs, source, target)
    nodes = 0
    for pairs in seeds.values():
        for u, w in pairs:
            nodes = max(nodes, u + 1, w + 1)
    return PWConfig(nodes, tuple((v, tuple(ps)) for v, ps in seeds.items()),
                    source, target)


class PWContext:
    """Caches free algebras and generated partitions for one algebra."""

    def __init__(self, algebra: FiniteAlgebra,
                 cap_entries: int = DEFAULT_CAP_ENTRIES,
                 work_budget: int = DEFAULT_WORK_BUDGET):
        self.algebra = algebra
        self.cap_entries = cap_entries
        self.work_budget = work_budget
        self._free: dict[int, FreeAlgebra] = {}
        self._failed: dict[int, CapExceeded] = {}
        self._parts: dict = {}

    def free(self, g: int) -> FreeAlgebra:
        if g in self._free:
            return self._free[g]
        for bad in self._failed:
            if bad <= g:
                raise CapExceeded(
                    f"free algebra on {g} generators skipped: the build on "
                    f"{bad} generators already exceeded caps", 0)
        try:
            self._free[g] = build_free(self.algebra, g,
                                       cap_entries=self.cap_entries,
                                       work_budget=self.work_budget)
        except CapExceeded as exc:
            self._failed[g] = exc
            raise
        return self._free[g]

    def partition(self, g: int, pairs) -> np.ndarray:
        key = (g, tuple(sorted(pairs)))
        if key not in self._parts:
            self._parts[key] = self.free(g).gen_pair_congruence(list(pairs))
        return self._parts[key]


def _partition_like(e, parts):
    if isinstance(e, VarE):
        return parts.get(e.name)
    if isinstance(e, MeetE):
        labs = []
        for it in e.items:
            p = _partition_like(it, parts)
            if p is None:
                return None
            labs.append(p)
        out = labs[0]
        for p in labs[1:]:
            out = meet_labels(out, p)
        return out
    return None


def _reach(e, frontier: np.ndarray, parts: dict) -> np.ndarray:
    """Elements reachable from the frontier through the expression."""
    p = _partition_like(e, parts)
    if p is not None:
        return saturate(p, frontier)
    if isinstance(e, ComposeE):
        cur = frontier
        for it in e.items:
            cur = _reach(it, cur, parts)
        return cur
    if isinstance(e, AltE):
        if e.count == K:
            raise CheckError("symbolic count not substituted")
        cur = frontier
        for i in range(e.count):
            cur = _reach(e.first if i % 2 == 0 else e.second, cur, parts)
        return cur
    if isinstance(e, PowE):
        if e.count == K:
            raise CheckError("symbolic count not substituted")
        cur = frontier
        for _ in range(e.count):
            cur = _reach(e.item, cur, parts)
        return cur
    if isinstance(e, MeetE):
        return _meet_reach(e, frontier, parts)
    raise CheckError(f"cannot evaluate {expr_str(e)} over congruence "
                     f"partitions")


def _meet_reach(e: MeetE, frontier, parts):
    labs, composites = [], []
    for it in e.items:
        p = _partition_like(it, parts)
        if p is not None:
            labs.append(p)
        else:
            composites.append(it)
    combined = None
    for p in labs:
        combined = p if combined is None else meet_labels(combined, p)
    out = np.zeros_like(frontier)
    if len(composites) == 1 and combined is not None:
        # (u,v) in the meet forces u,v into one class; recurse classwise
        for cid in np.unique(combined[frontier]):
            cls = combined == cid
            out |= cls & _reach(composites[0], frontier & cls, parts)
        return out
    for u in np.nonzero(frontier)[0]:
        single = np.zeros_like(frontier)
        single[u] = True
        acc = np.ones_like(frontier)
        for c in composites:
            acc &= _reach(c, single, parts)
        if combined is not None:
            acc &= combined == combined[u]
        out |= acc
    return out


def pw_check(ctx: PWContext, ident: Identity, k: int | None = None) -> bool:
    """Variety-wide verdict for a congruence-variable inclusion."""
    kinds = ident.kinds()
    for name, kind in ident.var_kinds:
        if kind != CONGRUENCE:
            raise PWGrammarError(
                f"{ident.name}: variable {name} is not a congruence; use "
                f"the concrete check")
    if ident.side_conditions:
        raise PWGrammarError(f"{ident.name}: side conditions are not "
                             f"supported by the generic reduction")
    rhs = ident.rhs
    if has_symbolic(ident.lhs):
        raise PWGrammarError("symbolic count on the left-hand side")
    if has_symbolic(rhs):
        if k is None:
            raise CheckError(f"{ident.name} needs a value for k")
        rhs = substitute_k(rhs, k)
    cfg = pw_analyze(ident.lhs, kinds)
    f = ctx.free(cfg.nodes)
    seed_map = dict(cfg.seeds)
    parts = {}
    for name, _ in ident.var_kinds:
        # seed pairs are node numbers, which are free-generator positions
        parts[name] = ctx.partition(cfg.nodes, seed_map.get(name, ()))
    rhs = push_converse(rhs, kinds)
    frontier = np.zeros(f.n_elements, dtype=bool)
    frontier[f.generators[cfg.source]] = True
    reached = _reach(rhs, frontier, parts)
    return bool(reached[f.generators[cfg.target]])


# ---------------------------------------------------------------------------
# Spectra


@dataclass(frozen=True)
class SpectrumResult:
    family: str
    params: tuple            # ((name, value), ...) without the scan param
    value: int | None        # minimal scan value, or None when it exceeds cap
    exceeded: bool
    level: str               # variety | algebra
    evidence: dict | None = None

    @property
    def display(self) -> str:
        return str(self.value) if self.value is not None else "exceeds cap"


def _holds_at(ctx, a, entry, params, k, enum_cap, seed_pair_cap):
    ident = entry.identity(**params)
    if entry.level == VARIETY:
        return pw_check(ctx, ident, k=k)
    return check_concrete(a, ident, k=k, enum_cap=enum_cap,
                          seed_pair_cap=seed_pair_cap).holds


def spectrum(a: FiniteAlgebra, family: str, cap: int = 64,
             params: dict | None = None, ctx: PWContext | None = None,
             enum_cap: int = 4, seed_pair_cap: int = 2) -> SpectrumResult:
    """Least scan value making the family's inclusion hold, scanning up.

    The right-hand side only grows with the scan parameter, so the linear
    scan is exact; for variety-level families monotonicity is asserted at
    the found value.
    """
    entry = get_entry(family)
    if entry.scan is None:
        raise CatalogError(f"{family} has no scan parameter; use check")
    params = dict(params or {})
    ctx = ctx or PWContext(a)
    for k in range(cap + 1):
        if _holds_at(ctx, a, entry, params, k, enum_cap, seed_pair_cap):
            if entry.level == VARIETY and k < cap:
                if not _holds_at(ctx, a, entry, params, k + 1, enum_cap,
                                 seed_pair_cap):
                    raise AssertionError(
                        f"{family}: right-hand side not monotone at "
                        f"{k} -> {k + 1}")
            return SpectrumResult(family, tuple(params.items()), k, False,
                                  entry.level)
    evidence = {"checked_up_to": cap}
    ident = entry.identity(**params)
    if entry.level == ALGEBRA:
        res = check_concrete(a, ident, k=cap, enum_cap=enum_cap,
                             seed_pair_cap=seed_pair_cap)
        if res.counterexample:
            evidence["counterexample"] = {
                name: rel.to_bitstrings()
                for name, rel in res.counterexample.items()}
    return SpectrumResult(family, tuple(params.items()), None, True,
                          entry.level, evidence)
