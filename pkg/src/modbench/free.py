"""Free algebras of finitely generated varieties, with term recovery.

``F_V(g)`` for ``V`` the variety generated by a finite algebra ``A`` is
realized as the subalgebra of ``A^(A^g)`` generated by the g projection
vectors.  The breadth-first closure stores element vectors bit-plane packed
(one uint64 lane block per plane) and evaluates operations by bitwise muxing
over value combinations, which keeps the pair loop off the table-lookup path.

Deduplication uses a 128-bit fingerprint prefilter against the known set and
exact row comparison for the survivors, so element identity is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebras import AlgebraError, FiniteAlgebra

DEFAULT_CAP_ENTRIES = 10_000_000
# work units: operation applications x value-combination count x packed width
DEFAULT_WORK_BUDGET = 8_000_000_000


class CapExceeded(RuntimeError):
    """A free-algebra build ran past its size cap or work budget."""

    def __init__(self, message: str, elements_reached: int = 0):
        super().__init__(message)
        self.elements_reached = elements_reached


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class App:
    op: str
    args: tuple


Term = Var | App


def term_str(t: Term) -> str:
    """Prefix notation: ``(join (meet x0 x1) x2)``."""
    if isinstance(t, Var):
        return f"x{t.index}"
    if not t.args:
        return f"({t.op})"
    return "(" + t.op + " " + " ".join(term_str(s) for s in t.args) + ")"


def parse_term(text: str) -> Term:
    toks = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def rec() -> Term:
        nonlocal pos
        if pos >= len(toks):
            raise ValueError("unexpected end of term")
        tok = toks[pos]
        pos += 1
        if tok == "(":
            if pos >= len(toks):
                raise ValueError("unexpected end of term")
            op = toks[pos]
            pos += 1
            args = []
            while pos < len(toks) and toks[pos] != ")":
                args.append(rec())
            if pos >= len(toks):
                raise ValueError("missing ')'")
            pos += 1
            return App(op, tuple(args))
        if tok == ")":
            raise ValueError("unexpected ')'")
        if not (tok.startswith("x") and tok[1:].isdigit()):
            raise ValueError(f"bad variable token {tok!r}")
        return Var(int(tok[1:]))

    t = rec()
    if pos != len(toks):
        raise ValueError("trailing tokens after term")
    return t


def term_vars(t: Term) -> set[int]:
    if isinstance(t, Var):
        return {t.index}
    out: set[int] = set()
    for s in t.args:
        out |= term_vars(s)
    return out


def subst_vars(t: Term, mapping: dict[int, int]) -> Term:
    """Rename variables; unmapped indices are an error."""
    if isinstance(t, Var):
        if t.index not in mapping:
            raise AlgebraError(f"unmapped variable x{t.index}")
        return Var(mapping[t.index])
    return App(t.op, tuple(subst_vars(s, mapping) for s in t.args))


def eval_term(a: FiniteAlgebra, t: Term, assignment) -> int:
    """Evaluate a term at one assignment (tuple indexed by variable)."""
    if isinstance(t, Var):
        if t.index >= len(assignment):
            raise AlgebraError(f"unbound variable x{t.index}")
        v = assignment[t.index]
        if not 0 <= v < a.size:
            raise AlgebraError(f"assignment value {v} out of range")
        return int(v)
    return a.apply(t.op, tuple(eval_term(a, s, assignment) for s in t.args))


def eval_term_vector(a: FiniteAlgebra, t: Term, nvars: int,
                     var_map: dict[int, int] | None = None) -> np.ndarray:
    """Evaluate a term over the whole assignment grid A^nvars.

    Assignments are enumerated lexicographically with the last variable
    varying fastest; ``var_map`` renames term variables into grid variables.
    """
    count = a.size ** nvars
    idx = np.arange(count, dtype=np.int64)

    def rec(term: Term) -> np.ndarray:
        if isinstance(term, Var):
            j = term.index if var_map is None else var_map[term.index]
            if not 0 <= j < nvars:
                raise AlgebraError(f"unbound variable x{term.index}")
            return (idx // a.size ** (nvars - 1 - j)) % a.size
        arity = a.signature.arity(term.op)
        if arity != len(term.args):
            raise AlgebraError(f"arity mismatch for {term.op!r}")
        flat = np.zeros(count, dtype=np.int64)
        for s in term.args:
            flat = flat * a.size + rec(s)
        return a.tables[term.op][flat].astype(np.int64)

    return rec(t).astype(np.uint8)


# ---------------------------------------------------------------------------
# Plane packing helpers


def _pack_planes(vals: np.ndarray, n_planes: int, words: int) -> np.ndarray:
    """uint8 values (N, C) -> packed planes (N, n_planes * words) uint64."""
    n, c = vals.shape
    out = np.empty((n, n_planes * words), dtype=np.uint64)
    pad = words * 64 - c
    for b in range(n_planes):
        plane = (vals >> b) & 1
        if pad:
            plane = np.pad(plane, ((0, 0), (0, pad)))
        packed = np.packbits(plane, axis=1, bitorder="little")
        out[:, b * words:(b + 1) * words] = (
            packed.reshape(n, words, 8).view(np.uint64).reshape(n, words))
    return np.ascontiguousarray(out)


def _unpack_planes(rows: np.ndarray, n_planes: int, words: int,
                   c: int) -> np.ndarray:
    n = rows.shape[0]
    out = np.zeros((n, c), dtype=np.uint8)
    for b in range(n_planes):
        block = np.ascontiguousarray(rows[:, b * words:(b + 1) * words])
        bits = np.unpackbits(block.view(np.uint8).reshape(n, words * 8),
                             axis=1, bitorder="little")[:, :c]
        out |= bits << b
    return out


def _fingerprint(rows: np.ndarray, weights: np.ndarray) -> np.ndarray:
    return rows @ weights  # uint64 wraparound dot product per row


# ---------------------------------------------------------------------------
# The free algebra


class FreeAlgebra:
    """Built by :func:`build_free`; immutable afterwards."""

    def __init__(self, base, g, col_map, merged_digits, planes, n_planes,
                 words, generators, w_op, w_args, op_names):
        self.base = base
        self.g = g
        self.tuple_count = base.size ** g
        self._col_map = col_map              # original column -> merged column
        self._merged_digits = merged_digits  # (C', g) generator digits
        self._planes = planes                # (N, n_planes*words) uint64
        self._n_planes = n_planes
        self._words = words
        self.generators = generators         # element index per generator
        self._w_op = w_op                    # op index per element, -1 = Var
        self._w_args = w_args                # argument element indices
        self._op_names = op_names
        merged = _unpack_planes(planes, n_planes, words, merged_digits.shape[0])
        self.vecs = merged[:, col_map]       # (N, size**g) uint8
        self.vecs.setflags(write=False)
        self._terms: dict[int, Term] = {}

    @property
    def n_elements(self) -> int:
        return self.vecs.shape[0]

    def term_of(self, e: int) -> Term:
        """The first-discovered witness term of an element."""
        if not 0 <= e < self.n_elements:
            raise AlgebraError(f"element index {e} out of range")
        if e in self._terms:
            return self._terms[e]
        op = int(self._w_op[e])
        if op < 0:
            t: Term = Var(int(self._w_args[e][0]))
        else:
            name = self._op_names[op]
            arity = self.base.signature.arity(name)
            t = App(name, tuple(self.term_of(int(x))
                                for x in self._w_args[e][:arity]))
        self._terms[e] = t
        return t

    def element_of_vector(self, vec) -> int | None:
        vec = np.asarray(vec, dtype=np.uint8)
        hits = np.nonzero((self.vecs == vec).all(axis=1))[0]
        return int(hits[0]) if hits.size else None

    def gen_pair_congruence(self, pairs) -> np.ndarray:
        """Class labels of the congruence generated by generator pairs.

        Cg of pairs among free generators is the kernel of the substitution
        identifying those generators, so two elements are congruent exactly
        when their vectors agree on the assignments fixed by the merge.
        """
        parent = list(range(self.g))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in pairs:
            if not (0 <= i < self.g and 0 <= j < self.g):
                raise AlgebraError(f"generator pair ({i}, {j}) out of range")
            parent[find(i)] = find(j)
        roots = np.array([find(i) for i in range(self.g)])
        size = self.base.size
        idx = np.arange(self.tuple_count, dtype=np.int64)
        mask = np.ones(self.tuple_count, dtype=bool)
        for i in range(self.g):
            r = int(roots[i])
            if r == i:
                continue
            di = (idx // size ** (self.g - 1 - i)) % size
            dr = (idx // size ** (self.g - 1 - r)) % size
            mask &= di == dr
        sub = self.vecs[:, mask]
        _, labels = np.unique(sub, axis=0, return_inverse=True)
        return labels.astype(np.int64)

    def induced_table(self, op: str, guard: int = 4_000_000) -> np.ndarray:
        """Induced operation table on elements (small free algebras only)."""
        arity = self.base.signature.arity(op)
        n = self.n_elements
        if n ** arity > guard:
            raise CapExceeded(f"induced table for {op!r} needs {n ** arity} "
                              f"entries (guard {guard})", n)
        table = self.base.tables[op]
        if arity == 0:
            vec = np.full(self.vecs.shape[1], int(table[0]), dtype=np.uint8)
            return np.array([self.element_of_vector(vec)], dtype=np.int64)
        out = np.empty(n ** arity, dtype=np.int64)
        lookup = {self.vecs[i].tobytes(): i for i in range(n)}
        for flat in range(n ** arity):
            rest, args = flat, []
            for _ in range(arity):
                args.append(rest % n)
                rest //= n
            args.reverse()
            idx = np.zeros(self.vecs.shape[1], dtype=np.int64)
            for e in args:
                idx = idx * self.base.size + self.vecs[e]
            out[flat] = lookup[table[idx].astype(np.uint8).tobytes()]
        return out

    def to_finite_algebra(self, name: str | None = None,
                          guard: int = 4_000_000) -> FiniteAlgebra:
        from .algebras import Signature
        tables = {op: self.induced_table(op, guard)
                  for op in self.base.signature.names()}
        return FiniteAlgebra(name or f"F({self.base.name},{self.g})",
                             self.n_elements, self.base.signature, tables)


# ---------------------------------------------------------------------------
# The closure build


class _Builder:
    def __init__(self, base: FiniteAlgebra, n_planes: int, words: int,
                 cap_entries: int, c_merged: int, max_arity: int):
        self.base = base
        self.n_planes = n_planes
        self.words = words
        self.cap_entries = cap_entries
        self.c = c_merged
        self.width = n_planes * words
        self.rows = np.empty((256, self.width), dtype=np.uint64)
        rng = np.random.default_rng(0x5EED_0F0D)
        self.weights = (rng.integers(1, 2 ** 63, size=self.width,
                                     dtype=np.uint64) * 2 + 1)
        # padded tail bits of each plane must stay zero after every op
        self.row_mask = np.full(self.width, np.uint64(0xFFFFFFFFFFFFFFFF))
        tail = c_merged % 64
        if tail:
            for b in range(n_planes):
                self.row_mask[(b + 1) * words - 1] = np.uint64((1 << tail) - 1)
        self.fps = np.empty(256, dtype=np.uint64)
        self.n = 0
        self._fp_sorted = np.empty(0, dtype=np.uint64)
        self._fp_perm = np.empty(0, dtype=np.int64)
        self.w_op: list[int] = []
        self.w_args: list[tuple[int, ...]] = []
        self.max_arity = max(max_arity, 1)

    def _grow(self, need):
        cap = self.rows.shape[0]
        if need <= cap:
            return
        new = max(need, cap * 2)
        self.rows = np.resize(self.rows, (new, self.width))
        self.fps = np.resize(self.fps, new)

    def append(self, rows: np.ndarray, ops: list[int], argses: list[tuple]):
        k = rows.shape[0]
        self._grow(self.n + k)
        self.rows[self.n:self.n + k] = rows
        self.fps[self.n:self.n + k] = _fingerprint(rows, self.weights)
        self.n += k
        self.w_op.extend(ops)
        self.w_args.extend(argses)
        order = np.argsort(self.fps[:self.n], kind="stable")
        self._fp_sorted = self.fps[:self.n][order]
        self._fp_perm = order
        if self.n * self.c > self.cap_entries:
            raise CapExceeded(
                f"free algebra exceeds {self.cap_entries} vector entries "
                f"({self.n} elements of {self.c} coordinates)", self.n)

    def known_mask(self, rows: np.ndarray, fps: np.ndarray) -> np.ndarray:
        """Exactly which candidate rows equal an already-known element.

        Fingerprints narrow the comparison; equality is decided on the rows
        themselves, so fingerprint collisions cannot drop or duplicate
        elements.
        """
        k = self._fp_sorted.size
        known = np.zeros(rows.shape[0], dtype=bool)
        if k == 0:
            return known
        pos = np.searchsorted(self._fp_sorted, fps)
        cand = np.nonzero((pos < k) & (self._fp_sorted[np.minimum(pos, k - 1)]
                                       == fps))[0]
        while cand.size:
            p = pos[cand]
            match = (rows[cand] == self.rows[self._fp_perm[p]]).all(axis=1)
            known[cand[match]] = True
            # unresolved candidates may match a later element with equal fp
            cand = cand[~match]
            if cand.size:
                pos[cand] += 1
                p = pos[cand]
                still = (p < k) & (self._fp_sorted[np.minimum(p, k - 1)]
                                   == fps[cand])
                cand = cand[still]
        return known


def _op_combos(table: np.ndarray, size: int, arity: int):
    """Nonzero (value-combination, result) entries of one operation table."""
    combos = []
    for flat in range(size ** arity):
        rest, args = flat, []
        for _ in range(arity):
            args.append(rest % size)
            rest //= size
        args.reverse()
        v = int(table[flat])
        if v:
            combos.append((tuple(args), v))
    return combos


def _indicators(planes: np.ndarray, size: int, n_planes: int,
                words: int) -> list[np.ndarray]:
    """Per-value indicator masks for one packed argument batch."""
    blocks = [planes[:, b * words:(b + 1) * words] for b in range(n_planes)]
    out = []
    for v in range(size):
        m = None
        for b in range(n_planes):
            part = blocks[b] if (v >> b) & 1 else ~blocks[b]
            m = part if m is None else m & part
        out.append(m)
    return out


def _apply_op_packed(builder: _Builder, combos, size: int,
                     arg_rows: list[np.ndarray]) -> np.ndarray:
    np_, w = builder.n_planes, builder.words
    inds = [_indicators(rows, size, np_, w) for rows in arg_rows]
    out = np.zeros_like(arg_rows[0])
    for args, v in combos:
        m = inds[0][args[0]]
        for pos in range(1, len(args)):
            m = m & inds[pos][args[pos]]
        for b in range(np_):
            if (v >> b) & 1:
                out[:, b * w:(b + 1) * w] |= m
    out &= builder.row_mask
    return out


def _block_chunks(sizes, chunk):
    """Mixed-radix enumeration of a block, last position varying fastest."""
    total = 1
    for s in sizes:
        total *= s
    lo = 0
    while lo < total:
        hi = min(lo + chunk, total)
        flat = np.arange(lo, hi, dtype=np.int64)
        idxs = []
        for s in reversed(sizes):
            idxs.append(flat % s)
            flat = flat // s
        yield list(reversed(idxs))
        lo = hi


def build_free(a: FiniteAlgebra, g: int,
               cap_entries: int = DEFAULT_CAP_ENTRIES,
               dedup_columns: bool = True,
               work_budget: int = DEFAULT_WORK_BUDGET) -> FreeAlgebra:
    """BFS closure of the projection vectors under all operations.

    Deterministic: elements appear in discovery order with operations in
    signature order and argument tuples enumerated lexicographically
    (symmetric binary tables enumerate unordered pairs).
    """
    if g < 1:
        raise AlgebraError("generator count must be positive")
    size = a.size
    c_full = size ** g
    if c_full * g > cap_entries:
        raise CapExceeded(
            f"tuple space alone ({g} generators of {c_full} coordinates) "
            f"exceeds cap {cap_entries}", 0)

    idx = np.arange(c_full, dtype=np.int64)
    digits = np.empty((c_full, g), dtype=np.uint8)
    for i in range(g):
        digits[:, i] = (idx // size ** (g - 1 - i)) % size

    if dedup_columns:
        merged, first = np.unique(digits, axis=0, return_index=True)
        order = np.argsort(first, kind="stable")
        merged = merged[order]
        key = {merged[j].tobytes(): j for j in range(merged.shape[0])}
        col_map = np.array([key[digits[t].tobytes()] for t in range(c_full)],
                           dtype=np.int64)
    else:
        merged = digits
        col_map = np.arange(c_full, dtype=np.int64)
    c_merged = merged.shape[0]

    n_planes = max(1, (size - 1).bit_length())
    words = (c_merged + 63) // 64
    max_arity = max((ar for _, ar in a.signature.ops), default=1)
    builder = _Builder(a, n_planes, words, cap_entries, c_merged, max_arity)

    ops = [(name, ar, a.tables[name]) for name, ar in a.signature.ops]
    op_index = {name: i for i, (name, _, _) in enumerate(ops)}
    combos_by_op = {name: _op_combos(tab, size, ar) for name, ar, tab in ops}
    symmetric = {}
    for name, ar, tab in ops:
        symmetric[name] = (ar == 2 and
                           np.array_equal(tab.reshape(size, size),
                                          tab.reshape(size, size).T))

    # seed: projections, then constants
    generators = []
    for i in range(g):
        vec = merged[:, i].reshape(1, -1)
        rows = _pack_planes(vec, n_planes, words)
        hit = [e for e in range(builder.n)
               if np.array_equal(builder.rows[e], rows[0])]
        if hit:
            generators.append(hit[0])
        else:
            builder.append(rows, [-1], [(i,)])
            generators.append(builder.n - 1)
    for name, ar, tab in ops:
        if ar != 0:
            continue
        vec = np.full((1, c_merged), int(tab[0]), dtype=np.uint8)
        rows = _pack_planes(vec, n_planes, words)
        if not any(np.array_equal(builder.rows[e], rows[0])
                   for e in range(builder.n)):
            builder.append(rows, [op_index[name]], [()])

    units_used = 0
    op_cost = {name: (size ** ar) * builder.width for name, ar, _ in ops}
    chunk_pairs = max(1 << 16, 6_000_000 // max(1, builder.width))
    frontier_start = 0
    while frontier_start < builder.n:
        old = frontier_start
        level_total = builder.n
        frontier_start = builder.n
        projected = 0
        for name, ar, _ in ops:
            if ar == 0:
                continue
            if symmetric[name]:
                apps = (level_total * (level_total + 1) - old * (old + 1)) // 2
            else:
                apps = level_total ** ar - old ** ar
            projected += apps * op_cost[name]
        if units_used + projected > work_budget:
            raise CapExceeded(
                f"free algebra work budget exceeded (next closure level "
                f"needs {projected} more units of {work_budget})", builder.n)
        for name, ar, tab in ops:
            if ar == 0:
                continue
            combos = combos_by_op[name]
            blocks = []
            if symmetric[name]:
                blocks.append("sym")
            else:
                for p in range(ar):
                    sizes = ([old] * p + [level_total - old]
                             + [level_total] * (ar - 1 - p))
                    offsets = [0] * p + [old] + [0] * (ar - 1 - p)
                    if all(s > 0 for s in sizes):
                        blocks.append((sizes, offsets))
            for block in blocks:
                if block == "sym":
                    xs_all = np.arange(old, level_total, dtype=np.int64)
                    gen = _sym_pair_chunks(xs_all, chunk_pairs)
                else:
                    sizes, offsets = block
                    gen = (_offset(idxs, offsets)
                           for idxs in _block_chunks(sizes, chunk_pairs))
                for arg_idx in gen:
                    m = arg_idx[0].shape[0]
                    if m == 0:
                        continue
                    units_used += m * op_cost[name]
                    if units_used > work_budget:
                        raise CapExceeded(
                            f"free algebra work budget {work_budget} "
                            f"exceeded", builder.n)
                    arg_rows = [builder.rows[ix] for ix in arg_idx]
                    res = _apply_op_packed(builder, combos, size, arg_rows)
                    fps = _fingerprint(res, builder.weights)
                    miss = ~builder.known_mask(res, fps)
                    if not miss.any():
                        continue
                    mpos = np.nonzero(miss)[0]
                    rows_m = res[mpos]
                    _, first = np.unique(rows_m, axis=0, return_index=True)
                    first = np.sort(first)
                    pos = mpos[first]
                    builder.append(
                        res[pos], [op_index[name]] * pos.size,
                        [tuple(int(ix[p]) for ix in arg_idx) for p in pos])

    w_args = np.zeros((builder.n, builder.max_arity), dtype=np.int64)
    for e, args in enumerate(builder.w_args):
        for j, v in enumerate(args):
            w_args[e, j] = v
    return FreeAlgebra(a, g, col_map, merged,
                       np.ascontiguousarray(builder.rows[:builder.n]),
                       n_planes, words, tuple(generators),
                       np.array(builder.w_op, dtype=np.int64), w_args,
                       [name for name, _, _ in ops])


def _sym_pair_chunks(xs_all: np.ndarray, chunk: int):
    """Unordered pairs (x, y), y <= x, x running over the frontier."""
    if xs_all.size == 0:
        return
    counts_all = xs_all + 1
    start = 0
    while start < xs_all.size:
        end = start
        total = 0
        while end < xs_all.size and total + counts_all[end] <= chunk:
            total += int(counts_all[end])
            end += 1
        if end == start:
            end = start + 1
            total = int(counts_all[start])
        xs = xs_all[start:end]
        counts = xs + 1
        ia = np.repeat(xs, counts)
        offs = np.cumsum(counts) - counts
        jy = np.arange(counts.sum(), dtype=np.int64) - np.repeat(offs, counts)
        yield [ia, jy]
        start = end


def _offset(idxs, offsets):
    return [ix + off if off else ix for ix, off in zip(idxs, offsets)]


# ---------------------------------------------------------------------------
# Partition utilities (congruences on a free algebra live as label arrays)


def meet_labels(l1: np.ndarray, l2: np.ndarray) -> np.ndarray:
    """Labels of the common refinement of two partitions."""
    combined = l1.astype(np.int64) * (int(l2.max()) + 1) + l2
    _, labels = np.unique(combined, return_inverse=True)
    return labels.astype(np.int64)


def saturate(labels: np.ndarray, frontier: np.ndarray) -> np.ndarray:
    """All elements sharing a class with some frontier element."""
    if not frontier.any():
        return frontier.copy()
    return np.isin(labels, np.unique(labels[frontier]))
