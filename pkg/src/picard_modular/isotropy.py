"""Finite groups: matrix closures, abstract tables, coset enumeration, abelianization.

Matrix groups are closed under multiplication modulo scalars and turned into
multiplication tables with a canonical element order, so two runs on the same
generators (in any order) produce the same table.  Abstract groups given by
presentations are enumerated with Todd-Coxeter and realised as tables through
their regular representation, which lets :func:`iso_check` compare both kinds.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, Sequence

from .group import Word, eval_word, parse_word
from .matrices import HVector, Matrix, proj_equal

__all__ = [
    "FiniteGroupTable",
    "CapExceededError",
    "MaxCosetsExceededError",
    "closure",
    "common_fixed_point",
    "center",
    "center_indices",
    "subgroup_table",
    "normal_closure",
    "quotient",
    "iso_check",
    "cyclic_table",
    "dihedral_table",
    "direct_product",
    "abelian_invariants",
    "Presentation",
    "parse_presentation",
    "CosetTable",
    "todd_coxeter",
    "table_from_presentation",
    "AbelianInvariants",
    "abelianization",
    "smith_normal_form",
    "hom_check",
    "matrix_group_vs_presentation",
    "ISOTROPY_GENERATORS",
    "isotropy_table",
]


class CapExceededError(RuntimeError):
    pass


class MaxCosetsExceededError(RuntimeError):
    pass


@dataclass(frozen=True)
class FiniteGroupTable:
    """A finite group given by its multiplication table.

    ``elements[i]`` is a representative (a :class:`Matrix` for matrix groups,
    any hashable label for abstract ones); ``table[i][j]`` is the index of
    ``elements[i] * elements[j]``.  Index 0 is the identity.
    """

    elements: tuple
    table: tuple[tuple[int, ...], ...]
    generators: tuple[int, ...] = ()

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    def inv(self, i: int) -> int:
        row = self.table[i]
        return row.index(0)

    def element_order(self, i: int) -> int:
        n, x = 1, i
        while x != 0:
            x = self.table[x][i]
            n += 1
        return n

    def power(self, i: int, n: int) -> int:
        if n < 0:
            i, n = self.inv(i), -n
        x = 0
        for _ in range(n):
            x = self.table[x][i]
        return x

    def is_abelian(self) -> bool:
        t = self.table
        return all(t[i][j] == t[j][i] for i in range(self.order) for j in range(i + 1, self.order))

    def order_profile(self) -> tuple[int, ...]:
        return tuple(sorted(self.element_order(i) for i in range(self.order)))

    def generated_by(self, gens: Iterable[int]) -> frozenset[int]:
        gens = list(gens)
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.table[x][g]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def check_associativity(self, samples: int | None = None) -> bool:
        n = self.order
        idx = range(n) if samples is None else range(0, n, max(1, n // samples))
        t = self.table
        return all(t[t[a][b]][c] == t[a][t[b][c]] for a in idx for b in idx for c in idx)


def closure(gens: Sequence[Matrix], cap: int = 1000) -> FiniteGroupTable:
    """Close ``gens`` under multiplication in PU(2,1) and tabulate the result."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    gens = list(gens)
    ident = Matrix.identity()
    keys = {ident.projective_key(): 0}
    reps = [ident]
    words: list[tuple[int, ...]] = [()]
    right: list[list[int | None]] = [[None] * len(gens)]
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for k, g in enumerate(gens):
            h = reps[i] * g
            key = h.projective_key()
            j = keys.get(key)
            if j is None:
                if len(reps) >= cap:
                    raise CapExceededError(f"closure exceeded cap of {cap} elements")
                j = len(reps)
                keys[key] = j
                reps.append(h)
                words.append(words[i] + (k,))
                right.append([None] * len(gens))
                queue.append(j)
            right[i][k] = j

    # canonical order: identity first, then by projective key
    key_of = {v: k for k, v in keys.items()}
    order = [0] + sorted(range(1, len(reps)), key=lambda i: key_of[i])
    new_index = {old: new for new, old in enumerate(order)}
    n = len(reps)
    table = [[0] * n for _ in range(n)]
    for a_old in range(n):
        for b_old in range(n):
            x = a_old
            for k in words[b_old]:
                x = right[x][k]
            table[new_index[a_old]][new_index[b_old]] = new_index[x]
    gen_idx = tuple(new_index[keys[g.projective_key()]] for g in gens)
    return FiniteGroupTable(
        elements=tuple(reps[i] for i in order),
        table=tuple(tuple(r) for r in table),
        generators=gen_idx,
    )


def common_fixed_point(t: FiniteGroupTable, v: HVector) -> bool:
    return all(proj_equal(g * v, v) for g in t.elements)


def subgroup_table(t: FiniteGroupTable, members: Iterable[int]) -> FiniteGroupTable:
    members = sorted(set(members))
    if members[0] != 0:
        raise ValueError("subgroup must contain the identity")
    pos = {m: i for i, m in enumerate(members)}
    table = tuple(tuple(pos[t.table[a][b]] for b in members) for a in members)
    sub = FiniteGroupTable(tuple(t.elements[m] for m in members), table)
    return FiniteGroupTable(sub.elements, sub.table, _small_generating_set(sub))


def center(t: FiniteGroupTable) -> FiniteGroupTable:
    tab = t.table
    members = [z for z in range(t.order) if all(tab[z][g] == tab[g][z] for g in range(t.order))]
    return subgroup_table(t, members)


def center_indices(t: FiniteGroupTable) -> list[int]:
    tab = t.table
    return [z for z in range(t.order) if all(tab[z][g] == tab[g][z] for g in range(t.order))]


def normal_closure(t: FiniteGroupTable, gens: Iterable[int]) -> frozenset[int]:
    conj = set()
    for g in gens:
        for x in range(t.order):
            conj.add(t.table[t.table[x][g]][t.inv(x)])
    return t.generated_by(conj)


def quotient(t: FiniteGroupTable, normal_gens: Iterable[int]) -> FiniteGroupTable:
    """Quotient of ``t`` by the normal closure of ``normal_gens`` (element indices)."""
    n_set = normal_closure(t, normal_gens)
    coset_of: dict[int, int] = {}
    reps: list[int] = []
    for x in range(t.order):
        if x in coset_of:
            continue
        c = len(reps)
        reps.append(x)
        for nn in n_set:
            coset_of[t.table[x][nn]] = c
    table = tuple(tuple(coset_of[t.table[a][b]] for b in reps) for a in reps)
    q = FiniteGroupTable(tuple(f"{i}N" for i in range(len(reps))), table)
    return FiniteGroupTable(q.elements, q.table, _small_generating_set(q))


def _small_generating_set(t: FiniteGroupTable) -> tuple[int, ...]:
    n = t.order
    if n == 1:
        return ()
    by_order = sorted(range(1, n), key=lambda i: (-t.element_order(i), i))
    for a in by_order:
        if len(t.generated_by([a])) == n:
            return (a,)
    for a in by_order:
        sub = t.generated_by([a])
        for b in by_order:
            if b not in sub and len(t.generated_by([a, b])) == n:
                return (a, b)
    gens: list[int] = []
    cur = frozenset({0})
    for a in by_order:
        if a not in cur:
            gens.append(a)
            cur = t.generated_by(gens)
            if len(cur) == n:
                break
    return tuple(gens)


def iso_check(a: FiniteGroupTable, b: FiniteGroupTable) -> bool:
    """Brute-force isomorphism test with element-order pruning."""
    if a.order != b.order:
        return False
    if a.order > 10_000:
        raise ValueError("isomorphism search is capped at order 10^4")
    if a.order_profile() != b.order_profile():
        return False
    if a.is_abelian() != b.is_abelian():
        return False
    gens = _small_generating_set(a)
    if not gens:
        return True
    candidates = [[y for y in range(b.order) if b.element_order(y) == a.element_order(g)] for g in gens]
    for images in product(*candidates):
        if _extends_to_isomorphism(a, b, gens, images):
            return True
    return False


def _extends_to_isomorphism(a, b, gens, images) -> bool:
    phi = {0: 0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for g, img in zip(gens, images):
            y = a.table[x][g]
            val = b.table[phi[x]][img]
            if y in phi:
                if phi[y] != val:
                    return False
            else:
                phi[y] = val
                queue.append(y)
    return len(phi) == a.order and len(set(phi.values())) == b.order


def cyclic_table(n: int) -> FiniteGroupTable:
    return FiniteGroupTable(tuple(range(n)), tuple(tuple((i + j) % n for j in range(n)) for i in range(n)),
                            (1 % n,) if n > 1 else ())


def direct_product(a: FiniteGroupTable, b: FiniteGroupTable) -> FiniteGroupTable:
    pairs = [(x, y) for x in range(a.order) for y in range(b.order)]
    pos = {p: i for i, p in enumerate(pairs)}
    table = tuple(
        tuple(pos[(a.table[x1][x2], b.table[y1][y2])] for (x2, y2) in pairs) for (x1, y1) in pairs
    )
    t = FiniteGroupTable(tuple(pairs), table)
    return FiniteGroupTable(t.elements, t.table, _small_generating_set(t))


def dihedral_table(n: int) -> FiniteGroupTable:
    """Dihedral group of order 2n: elements r^k s^e."""
    elems = [(k, e) for e in (0, 1) for k in range(n)]
    pos = {p: i for i, p in enumerate(elems)}

    def mul(x, y):
        (k1, e1), (k2, e2) = x, y
        k = (k1 + (k2 if e1 == 0 else -k2)) % n
        return (k, (e1 + e2) % 2)

    table = tuple(tuple(pos[mul(x, y)] for y in elems) for x in elems)
    t = FiniteGroupTable(tuple(elems), table)
    return FiniteGroupTable(t.elements, t.table, _small_generating_set(t))


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def abelian_invariants(t: FiniteGroupTable) -> tuple[int, ...]:
    """Invariant factors d1 | d2 | ... of the abelianization of a finite table."""
    comm = {t.table[t.table[x][y]][t.inv(t.table[y][x])] for x in range(t.order) for y in range(t.order)}
    ab = quotient(t, comm)
    n = ab.order
    if n == 1:
        return ()
    orders = [ab.element_order(i) for i in range(n)]
    primary: list[list[int]] = []
    for p in _prime_factors(n):
        part = p ** _valuation(n, p)
        # |A[p^k]| = p^{r_k}; factors of order >= p^k number r_k - r_{k-1}
        ranks = [0]
        k = 1
        while p ** ranks[-1] < part:
            cnt = sum(1 for o in orders if (p**k) % o == 0)
            ranks.append(_valuation(cnt, p))
            k += 1
        at_least = [ranks[k] - ranks[k - 1] for k in range(1, len(ranks))] + [0]
        factors = []
        for k in range(len(at_least) - 1):
            factors.extend([p ** (k + 1)] * (at_least[k] - at_least[k + 1]))
        primary.append(sorted(factors, reverse=True))
    width = max(len(f) for f in primary)
    inv = [1] * width
    for fs in primary:
        for i, f in enumerate(fs):
            inv[i] *= f
    return tuple(sorted(inv))


def _valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# -- presentations -----------------------------------------------------------------------


def _letters(w: Word, gens: Sequence[str]) -> list[int]:
    idx = {g: i for i, g in enumerate(gens)}
    out: list[int] = []
    for g, e in w:
        x = 2 * idx[g] + (0 if e > 0 else 1)
        for _ in range(abs(e)):
            if out and out[-1] == x ^ 1:
                out.pop()
            else:
                out.append(x)
    return out


def _word_from_letters(letters: Sequence[int], gens: Sequence[str]) -> Word:
    runs: list[list] = []
    for x in letters:
        g, e = gens[x // 2], (1 if x % 2 == 0 else -1)
        if runs and runs[-1][0] == g and (runs[-1][1] > 0) == (e > 0):
            runs[-1][1] += e
        else:
            runs.append([g, e])
    return Word((g, e) for g, e in runs)


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...]

    def __post_init__(self):
        reduced = tuple(_word_from_letters(_letters(r, self.generators), self.generators) for r in self.relators)
        object.__setattr__(self, "relators", reduced)

    def letter_relators(self) -> list[list[int]]:
        return [_letters(r, self.generators) for r in self.relators]

    def with_relators(self, extra: Iterable[Word | str]) -> "Presentation":
        more = [parse_word(r, self.generators) if isinstance(r, str) else r for r in extra]
        return Presentation(self.generators, self.relators + tuple(more))

    def __str__(self) -> str:
        return f"gens: {' '.join(self.generators)}; rels: " + ", ".join(str(r) for r in self.relators)


def parse_presentation(text: str) -> Presentation:
    """Parse ``gens: a b c; rels: a^6, b^6, a*b*a^-1*b^-1``.

    A relation written ``lhs = rhs`` is read as the relator lhs*rhs^-1.
    """
    m = re.fullmatch(r"\s*gens\s*:(?P<gens>[^;]*);\s*rels\s*:(?P<rels>.*)", text, flags=re.S)
    if not m:
        raise ValueError("presentation must look like 'gens: a b; rels: a^2, ...'")
    gens = tuple(m.group("gens").replace(",", " ").split())
    if not gens or len(set(gens)) != len(gens):
        raise ValueError("generator names must be nonempty and distinct")
    allowed = set(gens) | {"Id"}
    rels = []
    for chunk in m.group("rels").split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" in chunk:
            lhs, rhs = chunk.split("=", 1)
            rels.append(Word(tuple(parse_word(lhs, allowed)) + tuple(parse_word(rhs, allowed).inverse())))
        else:
            rels.append(parse_word(chunk, allowed))
    return Presentation(gens, tuple(rels))


@dataclass
class CosetTable:
    """Complete coset table: ``rows[c][x]`` for letters x (2k = gen k, 2k+1 = its inverse)."""

    generators: tuple[str, ...]
    rows: list[list[int]]
    complete: bool = True

    @property
    def index(self) -> int:
        return len(self.rows)

    def act(self, coset: int, letters: Iterable[int]) -> int:
        for x in letters:
            coset = self.rows[coset][x]
        return coset


def todd_coxeter(p: Presentation, subgroup_words: Sequence[Word | str] = (),
                 max_cosets: int = 100_000) -> CosetTable:
    """HLT coset enumeration with coincidence processing and a lookahead pass."""
    if max_cosets < 1:
        raise ValueError("max_cosets must be >= 1")
    ngen = 2 * len(p.generators)
    rels = [r for r in p.letter_relators() if r]
    # cyclic conjugates are not needed for HLT; relators are scanned from every coset
    subs = [
        _letters(parse_word(w, set(p.generators) | {"Id"}) if isinstance(w, str) else w, p.generators)
        for w in subgroup_words
    ]
    table: list[list[int | None]] = [[None] * ngen]
    parent = [0]
    live = [1]  # count of live cosets in a 1-element list for closures

    def rep(c: int) -> int:
        root = c
        while parent[root] != root:
            root = parent[root]
        while parent[c] != root:
            parent[c], c = root, parent[c]
        return root

    def new_coset() -> int:
        if live[0] >= max_cosets:
            raise _Full()
        table.append([None] * ngen)
        parent.append(len(parent))
        live[0] += 1
        return len(table) - 1

    def define(c: int, x: int) -> int:
        d = new_coset()
        table[c][x] = d
        table[d][x ^ 1] = c
        return d

    def merge(a: int, b: int, queue: list[int]) -> None:
        a, b = rep(a), rep(b)
        if a == b:
            return
        lo, hi = min(a, b), max(a, b)
        parent[hi] = lo
        live[0] -= 1
        queue.append(hi)

    def coincidence(a: int, b: int) -> None:
        queue: list[int] = []
        merge(a, b, queue)
        k = 0
        while k < len(queue):
            e = queue[k]
            k += 1
            for x in range(ngen):
                f = table[e][x]
                if f is None:
                    continue
                if table[f][x ^ 1] == e:
                    table[f][x ^ 1] = None
                e1, f1 = rep(e), rep(f)
                if table[e1][x] is not None:
                    merge(f1, table[e1][x], queue)
                elif table[f1][x ^ 1] is not None:
                    merge(e1, table[f1][x ^ 1], queue)
                else:
                    table[e1][x] = f1
                    table[f1][x ^ 1] = e1

    def scan(c: int, w: list[int], fill: bool) -> None:
        f, i = c, 0
        b, j = c, len(w) - 1
        while True:
            while i <= j and table[f][w[i]] is not None:
                f = table[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    coincidence(f, b)
                return
            while j >= i and table[b][w[j] ^ 1] is not None:
                b = table[b][w[j] ^ 1]
                j -= 1
            if j < i:
                coincidence(f, b)
                return
            if i == j:
                table[f][w[i]] = b
                table[b][w[i] ^ 1] = f
                return
            if not fill:
                return
            define(f, w[i])

    def alive(c: int) -> bool:
        return parent[c] == c

    def lookahead() -> None:
        for c in range(len(table)):
            for w in rels:
                if not alive(c):
                    break
                scan(c, w, fill=False)

    def guarded(action) -> None:
        try:
            action()
        except _Full:
            lookahead()
            try:
                action()
            except _Full:
                raise MaxCosetsExceededError(
                    f"coset enumeration did not complete within {max_cosets} cosets"
                ) from None

    for w in subs:
        guarded(lambda w=w: scan(0, w, fill=True))
    c = 0
    while c < len(table):
        if alive(c):
            for w in rels:
                if not alive(c):
                    break
                guarded(lambda w=w: scan(c, w, fill=True))
            for x in range(ngen):
                if alive(c) and table[c][x] is None:
                    guarded(lambda x=x: define(c, x))
        c += 1

    order = [c for c in range(len(table)) if alive(c)]
    # renumber in breadth-first order from coset 0 for a canonical table
    bfs = [0]
    seen = {0}
    for c in bfs:
        for x in range(ngen):
            d = rep(table[c][x])
            if d not in seen:
                seen.add(d)
                bfs.append(d)
    assert len(bfs) == len(order)
    pos = {c: i for i, c in enumerate(bfs)}
    rows = [[pos[rep(table[c][x])] for x in range(ngen)] for c in bfs]
    return CosetTable(p.generators, rows, True)


class _Full(Exception):
    pass


def table_from_presentation(p: Presentation, max_cosets: int = 100_000) -> FiniteGroupTable:
    """Regular representation of a finite presented group via enumeration over the trivial subgroup."""
    ct = todd_coxeter(p, (), max_cosets)
    n = ct.index
    words: list[list[int] | None] = [None] * n
    words[0] = []
    queue = deque([0])
    while queue:
        c = queue.popleft()
        for x in range(2 * len(p.generators)):
            d = ct.rows[c][x]
            if words[d] is None:
                words[d] = words[c] + [x]
                queue.append(d)
    table = tuple(tuple(ct.act(i, words[j]) for j in range(n)) for i in range(n))
    gens = tuple(ct.rows[0][2 * k] for k in range(len(p.generators)))
    return FiniteGroupTable(tuple(str(_word_from_letters(w, p.generators)) for w in words), table, gens)


# -- abelianization ----------------------------------------------------------------------


def smith_normal_form(m: Sequence[Sequence[int]]) -> list[int]:
    """Diagonal of the Smith normal form of an integer matrix (nonzero entries, d1 | d2 | ...)."""
    a = [list(r) for r in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    diag = []
    t = 0
    while t < min(rows, cols):
        # pivot: smallest nonzero absolute value in the remaining block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        a[t], a[i] = a[i], a[t]
        for r in a:
            r[t], r[j] = r[j], r[t]
        while True:
            changed = False
            piv = a[t][t]
            for i in range(t + 1, rows):
                q = a[i][t] // piv
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    a[t], a[i] = a[i], a[t]
                    changed = True
                    break
            if changed:
                continue
            for j in range(t + 1, cols):
                q = a[t][j] // piv
                if q:
                    for r in a:
                        r[j] -= q * r[t]
                if a[t][j]:
                    for r in a:
                        r[t], r[j] = r[j], r[t]
                    changed = True
                    break
            if changed:
                continue
            # divisibility of the remaining block
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % piv), None)
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


@dataclass(frozen=True)
class AbelianInvariants:
    torsion: tuple[int, ...]
    free_rank: int

    def __str__(self) -> str:
        parts = [f"Z_{d}" for d in self.torsion] + ["Z"] * self.free_rank
        return " + ".join(parts) if parts else "0"


def abelianization(p: Presentation) -> AbelianInvariants:
    ngen = len(p.generators)
    idx = {g: i for i, g in enumerate(p.generators)}
    matrix = []
    for r in p.relators:
        row = [0] * ngen
        for g, e in r:
            row[idx[g]] += e
        matrix.append(row)
    diag = smith_normal_form(matrix) if matrix else []
    return AbelianInvariants(tuple(d for d in diag if d > 1), ngen - len(diag))


# -- homomorphisms into the matrix group ---------------------------------------------------


@dataclass(frozen=True)
class HomCheck:
    relator: str
    passed: bool


def hom_check(p: Presentation, images: Mapping[str, Matrix]) -> list[HomCheck]:
    """Evaluate each relator on the images; a relator passes if it is scalar (identity in PU)."""
    missing = set(p.generators) - set(images)
    if missing:
        raise KeyError(f"no images for {sorted(missing)}")
    return [HomCheck(str(r), eval_word(r, images).is_scalar()) for r in p.relators]


def matrix_group_vs_presentation(t: FiniteGroupTable, p: Presentation, images: Mapping[str, Matrix],
                                 max_cosets: int = 100_000) -> bool:
    """True iff the images generate ``t``, satisfy every relator, and |<p>| = |t|."""
    gen_closure = closure([images[g] for g in p.generators], cap=max(t.order, 1) + 1)
    if gen_closure.order != t.order:
        return False
    keys = {g.projective_key() for g in t.elements}
    if any(g.projective_key() not in keys for g in gen_closure.elements):
        return False
    if not all(c.passed for c in hom_check(p, images)):
        return False
    return todd_coxeter(p, (), max_cosets).index == t.order


# -- isotropy groups of the named points ----------------------------------------------------

ISOTROPY_GENERATORS: dict[str, tuple[str, ...]] = {
    "w3": ("J",),
    "w4": ("R1*R2*R3",),
    "w12": ("P*Q^-1", "R"),
    "z0": ("R1", "R2*J^2", "R2*R3*R2^-1"),
    "qinf": ("P", "Q"),
}


def isotropy_table(point: str, cap: int = 1000) -> FiniteGroupTable:
    try:
        words = ISOTROPY_GENERATORS[point]
    except KeyError:
        raise KeyError(f"no isotropy generators recorded for {point!r}") from None
    return closure([eval_word(w) for w in words], cap=cap)
