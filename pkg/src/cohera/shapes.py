"""Simplicial sets and cubical sets with connections as explicit tables.

A simplicial set stores, for each level ``n`` up to a bound, its cells, the face
tables ``d_i`` (level n -> n-1), the degeneracy tables ``s_i`` (level n -> n+1)
and nondegeneracy flags.  A cubical set stores the tables of the faces
``d_(i,e)``, degeneracies ``s_i`` and connections ``c_i``.

Cube maps (morphisms of the box category with connections) are concrete
functions between vertex sets ``{0,1}^m -> {0,1}^n``; two words in the
generators are equal iff their tables agree.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple

from .errors import ArgumentError, StructuralError
from .fincat import FinCat, FiniteGroup, GCat, chain_restrict, enumerate_chains
from .util import UnionFind, check_capacity

DEFAULT_BOUND = 6


# ---------------------------------------------------------------------------
# simplicial operators


def face_operator(n: int, i: int) -> tuple:
    """The coface ``[n-1] -> [n]`` skipping ``i``."""
    return tuple(j if j < i else j + 1 for j in range(n))


def degeneracy_operator(n: int, i: int) -> tuple:
    """The codegeneracy ``[n+1] -> [n]`` hitting ``i`` twice."""
    return tuple(j if j <= i else j - 1 for j in range(n + 2))


def compose_ops(outer: tuple, inner: tuple) -> tuple:
    return tuple(outer[t] for t in inner)


def is_monotone(theta, n) -> bool:
    return all(0 <= t <= n for t in theta) and all(a <= b for a, b in zip(theta, theta[1:]))


def epi_mono(theta: tuple):
    """Factor a monotone map as ``mono o epi``; returns ``(epi, mono)``."""
    image = sorted(set(theta))
    pos = {v: k for k, v in enumerate(image)}
    return tuple(pos[t] for t in theta), tuple(image)


# ---------------------------------------------------------------------------
# simplicial sets


class SimplicialSet:
    """Finite simplicial set truncated at level ``bound``.

    ``faces[n][i][x]`` (n >= 1) and ``degens[n][i][x]`` (n < bound) are indices
    into the adjacent level.
    """

    def __init__(self, cells, faces, degens, nondeg=None):
        self.cells = tuple(tuple(level) for level in cells)
        self.faces = tuple(tuple(tuple(t) for t in lvl) for lvl in faces)
        self.degens = tuple(tuple(tuple(t) for t in lvl) for lvl in degens)
        if nondeg is None:
            nondeg = []
            for n, level in enumerate(self.cells):
                flags = [True] * len(level)
                if n >= 1:
                    for table in self.degens[n - 1]:
                        for y in table:
                            flags[y] = False
                nondeg.append(tuple(flags))
        self.nondeg = tuple(tuple(f) for f in nondeg)
        self._index = None

    @property
    def bound(self):
        return len(self.cells) - 1

    def size(self, n):
        return len(self.cells[n]) if 0 <= n <= self.bound else 0

    def index(self, n, cell):
        if self._index is None:
            self._index = [{c: k for k, c in enumerate(level)} for level in self.cells]
        return self._index[n][cell]

    def face(self, n, i, x):
        return self.faces[n][i][x]

    def degen(self, n, i, x):
        return self.degens[n][i][x]

    def nondegenerate(self, n):
        return [x for x, flag in enumerate(self.nondeg[n]) if flag]

    def nondegenerate_counts(self):
        return tuple(sum(flags) for flags in self.nondeg)

    def total_cells(self):
        return sum(len(level) for level in self.cells)

    def apply(self, n, x, theta):
        """The cell ``x . theta`` for a monotone ``theta: [m] -> [n]``."""
        epi, mono = epi_mono(tuple(theta))
        level = n
        for j in reversed(range(n + 1)):
            if j not in mono:
                x = self.faces[level][j][x]
                level -= 1
        for i in range(len(epi) - 1):
            if epi[i] == epi[i + 1]:
                x = self.degens[level][i][x]
                level += 1
        return x

    def decompose(self, n, x):
        """Return ``(k, y, epi)`` with ``y`` nondegenerate at level ``k`` and ``x = y . epi``."""
        epi = tuple(range(n + 1))
        level = n
        while not self.nondeg[level][x]:
            for i in range(level):
                y = self.faces[level][i][x]
                if self.degens[level - 1][i][y] == x:
                    x = y
                    epi = tuple(e if e <= i else e - 1 for e in epi)
                    level -= 1
                    break
            else:
                raise StructuralError(f"cell {x} at level {level} is flagged degenerate but is no s_i image")
        return level, x, epi

    def __repr__(self):
        return f"SimplicialSet(nondegenerate {list(self.nondegenerate_counts())})"


def simplicial_from_action(levels, act: Callable) -> SimplicialSet:
    """Tabulate a simplicial set from its cells and ``act(cell, theta)``."""
    levels = [list(level) for level in levels]
    index = [{c: k for k, c in enumerate(level)} for level in levels]
    check_capacity(sum(len(level) for level in levels), "simplicial set")
    bound = len(levels) - 1

    def lookup(level, cell):
        try:
            return index[level][cell]
        except KeyError:
            raise StructuralError(f"action leaves the stored cells at level {level}: {cell!r}") from None

    faces = [[]]
    for n in range(1, bound + 1):
        faces.append([[lookup(n - 1, act(c, face_operator(n, i))) for c in levels[n]] for i in range(n + 1)])
    degens = []
    for n in range(bound):
        degens.append([[lookup(n + 1, act(c, degeneracy_operator(n, i))) for c in levels[n]]
                       for i in range(n + 1)])
    return SimplicialSet(levels, faces, degens)


def validate_simplicial(k: SimplicialSet) -> list:
    """All violated simplicial identities on the stored range."""
    bad = []
    top = k.bound
    for n in range(2, top + 1):
        for j in range(n + 1):
            for i in range(j):
                for x in range(k.size(n)):
                    if k.faces[n - 1][i][k.faces[n][j][x]] != k.faces[n - 1][j - 1][k.faces[n][i][x]]:
                        bad.append(("d_i d_j", n, i, j, x))
    for n in range(top - 1):
        for j in range(n + 1):
            for i in range(j + 1):
                for x in range(k.size(n)):
                    if k.degens[n + 1][i][k.degens[n][j][x]] != k.degens[n + 1][j + 1][k.degens[n][i][x]]:
                        bad.append(("s_i s_j", n, i, j, x))
    for n in range(top):
        for j in range(n + 1):
            for i in range(n + 2):
                for x in range(k.size(n)):
                    y = k.faces[n + 1][i][k.degens[n][j][x]]
                    if i < j:
                        want = k.degens[n - 1][j - 1][k.faces[n][i][x]] if n >= 1 else None
                    elif i in (j, j + 1):
                        want = x
                    else:
                        want = k.degens[n - 1][j][k.faces[n][i - 1][x]] if n >= 1 else None
                    if want is not None and y != want:
                        bad.append(("d_i s_j", n, i, j, x))
    return bad


def poset_nerve(elements, leq, bound: int = DEFAULT_BOUND) -> SimplicialSet:
    """Nerve of a finite poset; ``n``-cells are weakly increasing chains of element indices."""
    elements = list(elements)
    succ = [[j for j, b in enumerate(elements) if leq(a, b)] for a in elements]
    levels = [[(i,) for i in range(len(elements))]]
    for _ in range(bound):
        levels.append([c + (j,) for c in levels[-1] for j in succ[c[-1]]])
        check_capacity(sum(len(lv) for lv in levels), "poset nerve")
    return simplicial_from_action(levels, lambda c, th: tuple(c[t] for t in th))


def standard_simplex(n: int, bound: int = DEFAULT_BOUND) -> SimplicialSet:
    """``Delta^n`` truncated at ``bound``."""
    return poset_nerve(range(n + 1), lambda a, b: a <= b, bound)


def boolean_vertices(k: int) -> list:
    return list(itertools.product((0, 1), repeat=k))


def cube_simplicial(k: int, bound: int = DEFAULT_BOUND) -> SimplicialSet:
    """``(Delta^1)^k`` as the nerve of the Boolean poset ``{0<1}^k``."""
    return poset_nerve(boolean_vertices(k), lambda a, b: all(x <= y for x, y in zip(a, b)), bound)


def nerve(c: FinCat, bound: int = DEFAULT_BOUND) -> SimplicialSet:
    """Nerve of a finite category; ``n``-cells are composable chains of length ``n``."""
    levels = []
    for n in range(bound + 1):
        levels.append(enumerate_chains(c, n))
        check_capacity(sum(len(lv) for lv in levels), "nerve")
    return simplicial_from_action(levels, lambda s, th: chain_restrict(c, s, th))


def simplicial_product(k: SimplicialSet, l: SimplicialSet) -> SimplicialSet:
    """Levelwise product ``(K x L)_n = K_n x L_n``."""
    bound = min(k.bound, l.bound)
    check_capacity(sum(k.size(n) * l.size(n) for n in range(bound + 1)), "simplicial product")
    levels = [[(x, y) for x in range(k.size(n)) for y in range(l.size(n))] for n in range(bound + 1)]
    faces = [[]]
    for n in range(1, bound + 1):
        faces.append([[k.faces[n][i][x] * l.size(n - 1) + l.faces[n][i][y] for x, y in levels[n]]
                      for i in range(n + 1)])
    degens = []
    for n in range(bound):
        degens.append([[k.degens[n][i][x] * l.size(n + 1) + l.degens[n][i][y] for x, y in levels[n]]
                       for i in range(n + 1)])
    return SimplicialSet(levels, faces, degens)


def simplicial_from_nondegenerate(data, bound: int = DEFAULT_BOUND) -> SimplicialSet:
    """Generate a simplicial set from nondegenerate cells and their faces.

    ``data[n]`` is a list of ``(name, faces)`` where ``faces`` lists ``n+1``
    entries, each either a name of a lower nondegenerate cell or a pair
    ``(name, surjection)`` describing a degenerate face.  Cells of the result
    are pairs ``(name, surjection)``.
    """
    nd = {}
    for n, level in enumerate(data):
        for name, fcs in level:
            if name in nd:
                raise StructuralError(f"duplicate cell name {name!r}")
            if n == 0:
                if fcs:
                    raise StructuralError(f"vertex {name!r} cannot have faces")
                nd[name] = (0, ())
                continue
            if len(fcs) != n + 1:
                raise StructuralError(f"cell {name!r} needs {n + 1} faces")
            norm = []
            for f in fcs:
                if isinstance(f, (list, tuple)):
                    fname, surj = f[0], tuple(f[1])
                else:
                    fname, surj = f, None
                if fname not in nd:
                    raise StructuralError(f"face {fname!r} of {name!r} is not a lower cell")
                k = nd[fname][0]
                if surj is None:
                    surj = tuple(range(k + 1))
                if len(surj) != n or sorted(set(surj)) != list(range(k + 1)) or not is_monotone(surj, k):
                    raise StructuralError(f"face {fname!r} of {name!r} has a bad degeneracy pattern")
                norm.append((fname, surj))
            nd[name] = (n, tuple(norm))

    def act(cell, theta):
        name, sigma = cell
        rho = compose_ops(sigma, theta)
        while True:
            k = nd[name][0]
            missing = [j for j in range(k + 1) if j not in rho]
            if not missing:
                return name, rho
            i = missing[-1]
            fname, fsig = nd[name][1][i]
            shifted = tuple(r if r < i else r - 1 for r in rho)
            name, rho = fname, compose_ops(fsig, shifted)

    levels = [[] for _ in range(bound + 1)]
    for name, (k, _) in nd.items():
        for n in range(k, bound + 1):
            for cuts in itertools.combinations(range(n), n - k):
                # surjection [n] -> [k] with repeats after the chosen positions
                surj, v = [], 0
                for pos in range(n + 1):
                    surj.append(v)
                    if pos < n and pos not in cuts:
                        v += 1
                levels[n].append((name, tuple(surj)))
    return simplicial_from_action(levels, act)


def skeleton_simplicial(k: SimplicialSet, n: int) -> SimplicialSet:
    """Sub-simplicial set generated by the cells of level ``<= n``."""
    if n < 0:
        raise ArgumentError("skeleton degree must be >= 0")
    keep = [set(range(k.size(m))) if m <= n else set() for m in range(k.bound + 1)]
    for m in range(n, k.bound):
        for table in k.degens[m]:
            keep[m + 1].update(table[x] for x in keep[m])
    return restrict_simplicial(k, keep)


def restrict_simplicial(k: SimplicialSet, keep) -> SimplicialSet:
    order = [sorted(s) for s in keep]
    new = [{x: i for i, x in enumerate(o)} for o in order]
    cells = [[k.cells[m][x] for x in order[m]] for m in range(len(order))]
    try:
        faces = [[]] + [[[new[m - 1][k.faces[m][i][x]] for x in order[m]] for i in range(m + 1)]
                        for m in range(1, len(order))]
        degens = [[[new[m + 1][k.degens[m][i][x]] for x in order[m]] for i in range(m + 1)]
                  for m in range(len(order) - 1)]
    except KeyError:
        raise StructuralError("kept cells are not closed under the structure maps") from None
    nondeg = [[k.nondeg[m][x] for x in order[m]] for m in range(len(order))]
    return SimplicialSet(cells, faces, degens, nondeg)


# ---------------------------------------------------------------------------
# maps of simplicial sets


def count_simplicial_maps(k: SimplicialSet, x: SimplicialSet, limit=None) -> int:
    """Number of simplicial maps ``K -> X``, by backtracking on nondegenerate cells."""
    return sum(1 for _ in iter_simplicial_maps(k, x, limit))


def iter_simplicial_maps(k: SimplicialSet, x: SimplicialSet, limit=None):
    """Yield simplicial maps as per-level tuples of images of every cell of ``K``."""
    top = max((n for n in range(k.bound + 1) if any(k.nondeg[n])), default=0)
    if x.bound < top:
        raise ArgumentError("target simplicial set is not stored high enough")
    todo = [(n, c) for n in range(top + 1) for c in k.nondegenerate(n)]
    decomp = {}
    for n in range(top + 1):
        for c in range(k.size(n)):
            if not k.nondeg[n][c]:
                decomp[(n, c)] = k.decompose(n, c)
    image = {}

    def value(n, c):
        if k.nondeg[n][c]:
            return image.get((n, c))
        lv, y, epi = decomp[(n, c)]
        v = image.get((lv, y))
        return None if v is None else x.apply(lv, v, epi)

    count = 0

    def extend(pos):
        nonlocal count
        if limit is not None and count >= limit:
            return
        if pos == len(todo):
            count += 1
            yield {key: v for key, v in image.items()}
            return
        n, c = todo[pos]
        for cand in range(x.size(n)):
            ok = True
            if n >= 1:
                for i in range(n + 1):
                    want = value(n - 1, k.faces[n][i][c])
                    if x.faces[n][i][cand] != want:
                        ok = False
                        break
            if ok:
                image[(n, c)] = cand
                yield from extend(pos + 1)
                del image[(n, c)]

    yield from extend(0)


# ---------------------------------------------------------------------------
# cube maps


@dataclass(frozen=True)
class BoxMap:
    """A map ``{0,1}^source -> {0,1}^target`` as a table indexed by input vertex.

    Inputs are enumerated in lexicographic order with coordinate 1 most
    significant.  ``word`` records how the map was produced and does not take
    part in equality.
    """

    source: int
    target: int
    table: tuple
    word: tuple = field(default=(), compare=False, hash=False)

    def __call__(self, v):
        if len(v) != self.source:
            raise ArgumentError(f"vertex {v} has length {len(v)}, expected {self.source}")
        return self.table[vertex_index(v)]

    def then(self, other: "BoxMap") -> "BoxMap":
        """``other o self``."""
        if other.source != self.target:
            raise ArgumentError("box maps are not composable")
        return BoxMap(self.source, other.target,
                      tuple(other.table[vertex_index(w)] for w in self.table), self.word + other.word)

    def is_identity(self):
        return self.source == self.target and all(
            w == v for w, v in zip(self.table, boolean_vertices(self.source)))


def vertex_index(v) -> int:
    out = 0
    for bit in v:
        out = (out << 1) | bit
    return out


class Generator(NamedTuple):
    """A generating cube map with source dimension ``m``.

    ``kind`` is ``"d"`` (face, m -> m+1), ``"s"`` (degeneracy, m -> m-1) or
    ``"c"`` (connection, m -> m-1).  Indices are 1-based.
    """

    kind: str
    i: int
    eps: int
    m: int

    @property
    def target(self):
        return self.m + 1 if self.kind == "d" else self.m - 1

    def __str__(self):
        if self.kind == "d":
            return f"d^({self.i},{self.eps})"
        return f"{self.kind}^{self.i}"


def generator_function(g: Generator, v: tuple) -> tuple:
    i = g.i
    if g.kind == "d":
        return v[:i - 1] + (g.eps,) + v[i - 1:]
    if g.kind == "s":
        return v[:i - 1] + v[i:]
    if g.kind == "c":
        return v[:i - 1] + (max(v[i - 1], v[i]),) + v[i + 1:]
    raise ArgumentError(f"unknown generator kind {g.kind!r}")


def generator(kind: str, i: int, m: int, eps: int = 0) -> Generator:
    """Validated generator with source dimension ``m``."""
    if kind == "d":
        ok = 1 <= i <= m + 1 and eps in (0, 1)
    elif kind == "s":
        ok = 1 <= i <= m
    elif kind == "c":
        ok = 1 <= i <= m - 1
    else:
        raise ArgumentError(f"unknown generator kind {kind!r}")
    if not ok:
        raise ArgumentError(f"generator {kind} index {i} out of range for source dimension {m}")
    return Generator(kind, i, eps if kind == "d" else 0, m)


@lru_cache(maxsize=None)
def generator_map(g: Generator) -> BoxMap:
    return BoxMap(g.m, g.target, tuple(generator_function(g, v) for v in boolean_vertices(g.m)), (g,))


def generators_from(m: int, max_level: int | None = None) -> list:
    out = []
    if max_level is None or m + 1 <= max_level:
        out += [Generator("d", i, e, m) for i in range(1, m + 2) for e in (0, 1)]
    out += [Generator("s", i, 0, m) for i in range(1, m + 1)]
    out += [Generator("c", i, 0, m) for i in range(1, m)]
    return out


def identity_box(m: int) -> BoxMap:
    return BoxMap(m, m, tuple(boolean_vertices(m)))


def box_operator_apply(word, v: tuple) -> tuple:
    """Apply generators left to right to a vertex.

    ``word`` is a sequence of ``Generator`` or ``(kind, i[, eps])`` tuples; the
    source dimension of each step is read off the current vector.
    """
    v = tuple(v)
    for step in word:
        if isinstance(step, Generator):
            g = step
            if g.m != len(v):
                raise ArgumentError(f"{g} expects a vector of length {g.m}, got {len(v)}")
        else:
            kind, i = step[0], step[1]
            eps = step[2] if len(step) > 2 else 0
            g = generator(kind, i, len(v), eps)
        v = generator_function(g, v)
    return v


def box_from_word(m: int, word) -> BoxMap:
    out = identity_box(m)
    for g in word:
        if g.m != out.target:
            raise ArgumentError(f"{g} does not compose after a map into dimension {out.target}")
        out = out.then(generator_map(g))
    return out


def box_product(a: BoxMap, b: BoxMap) -> BoxMap:
    """``a x b : {0,1}^(a.source+b.source) -> {0,1}^(a.target+b.target)``."""
    return BoxMap(a.source + b.source, a.target + b.target,
                  tuple(a.table[i] + b.table[j] for i in range(len(a.table)) for j in range(len(b.table))))


@lru_cache(maxsize=None)
def box_epis(m: int) -> dict:
    """Surjective composites of degeneracies and connections out of dimension ``m``, by target."""
    by_target = {m: {identity_box(m)}}
    frontier = [identity_box(m)]
    while frontier:
        nxt = []
        for f in frontier:
            for g in generators_from(f.target):
                if g.kind == "d":
                    continue
                h = f.then(generator_map(g))
                bucket = by_target.setdefault(h.target, set())
                if h not in bucket:
                    bucket.add(h)
                    nxt.append(h)
        frontier = nxt
    return {k: sorted(v, key=lambda f: f.table) for k, v in by_target.items()}


@lru_cache(maxsize=None)
def box_monos(k: int, n: int) -> tuple:
    """Composites of faces ``{0,1}^k -> {0,1}^n``."""
    out = []
    for free in itertools.combinations(range(n), k):
        fixed = [j for j in range(n) if j not in free]
        for consts in itertools.product((0, 1), repeat=len(fixed)):
            cmap = dict(zip(fixed, consts))
            pos = {j: t for t, j in enumerate(free)}
            table = tuple(tuple(v[pos[j]] if j in pos else cmap[j] for j in range(n))
                          for v in boolean_vertices(k))
            out.append(BoxMap(k, n, table))
    return tuple(sorted(out, key=lambda f: f.table))


@lru_cache(maxsize=None)
def box_hom(m: int, n: int) -> tuple:
    """All cube maps ``{0,1}^m -> {0,1}^n``, each factored as faces after degeneracies/connections."""
    found = set()
    for k, epis in box_epis(m).items():
        if k > n:
            continue
        for mono in box_monos(k, n):
            for e in epis:
                found.add(e.then(mono))
    return tuple(sorted(found, key=lambda f: f.table))


# ---------------------------------------------------------------------------
# cubical sets


class CubicalSet:
    """Finite cubical set with connections truncated at level ``bound``.

    ``tables[g]`` for a ``Generator`` ``g`` maps cells of level ``g.target`` to
    cells of level ``g.m`` (precomposition with the cube map of ``g``).
    """

    def __init__(self, cells, tables, nondeg=None):
        self.cells = tuple(tuple(level) for level in cells)
        self.tables = {g: tuple(t) for g, t in tables.items()}
        if nondeg is None:
            nondeg = [[True] * len(level) for level in self.cells]
            for g, t in self.tables.items():
                if g.kind in ("s", "c"):
                    for y in t:
                        nondeg[g.m][y] = False
        self.nondeg = tuple(tuple(f) for f in nondeg)
        self._index = None

    @property
    def bound(self):
        return len(self.cells) - 1

    def size(self, n):
        return len(self.cells[n]) if 0 <= n <= self.bound else 0

    def index(self, n, cell):
        if self._index is None:
            self._index = [{c: k for k, c in enumerate(level)} for level in self.cells]
        return self._index[n][cell]

    def face(self, n, i, eps, x):
        """``d_(i,eps) x`` for ``x`` at level ``n``."""
        return self.tables[Generator("d", i, eps, n - 1)][x]

    def degen(self, n, i, x):
        """``s_i x`` for ``x`` at level ``n``; lands at level ``n+1``."""
        return self.tables[Generator("s", i, 0, n + 1)][x]

    def connection(self, n, i, x):
        """``c_i x`` for ``x`` at level ``n``; lands at level ``n+1``."""
        return self.tables[Generator("c", i, 0, n + 1)][x]

    def apply_generator(self, g: Generator, x):
        return self.tables[g][x]

    def apply_word(self, word, x):
        """Act on a cell of the target level of ``word`` (words compose left to right)."""
        for g in reversed(word):
            x = self.tables[g][x]
        return x

    def apply_box(self, f: BoxMap, x):
        """Act by an arbitrary cube map, factored through generators."""
        return self.apply_word(factor_box(f), x)

    def nondegenerate(self, n):
        return [x for x, flag in enumerate(self.nondeg[n]) if flag]

    def nondegenerate_counts(self):
        return tuple(sum(flags) for flags in self.nondeg)

    def total_cells(self):
        return sum(len(level) for level in self.cells)

    def decompositions(self, n, x):
        """All ``(k, y, epi)`` with ``y`` nondegenerate and ``x = y . epi`` for ``epi`` a word in s/c."""
        out = set()
        stack = [(n, x, ())]
        seen = set()
        while stack:
            level, cell, word = stack.pop()
            if (level, cell, word) in seen:
                continue
            seen.add((level, cell, word))
            if self.nondeg[level][cell]:
                out.add((level, cell, box_from_word(n, word) if word else identity_box(n)))
                continue
            for g, t in self.tables.items():
                if g.kind in ("s", "c") and g.m == level:
                    src_level = g.target
                    for y in range(self.size(src_level)):
                        if t[y] == cell:
                            stack.append((src_level, y, word + (g,)))
        return sorted(out, key=lambda r: (r[0], r[1], r[2].table))

    def __repr__(self):
        return f"CubicalSet(nondegenerate {list(self.nondegenerate_counts())})"


def factor_box(f: BoxMap) -> tuple:
    """A generator word for ``f`` (degeneracies/connections, then faces)."""
    return _factor_box(f.source, f.target, f.table)


@lru_cache(maxsize=None)
def _factor_box(m, n, table):
    target = BoxMap(m, n, table)
    start = identity_box(m)
    seen = {start: ()}
    frontier = [start]
    top = max(m, n)
    while frontier:
        nxt = []
        for h in frontier:
            if h == target:
                return seen[h]
            for g in generators_from(h.target, top):
                k = h.then(generator_map(g))
                if k not in seen:
                    seen[k] = seen[h] + (g,)
                    nxt.append(k)
        frontier = nxt
    raise ArgumentError("map is not a composite of cube generators")


def cubical_from_action(levels, act: Callable) -> CubicalSet:
    """Tabulate a cubical set from its cells and ``act(cell, boxmap)``."""
    levels = [list(level) for level in levels]
    check_capacity(sum(len(level) for level in levels), "cubical set")
    index = [{c: k for k, c in enumerate(level)} for level in levels]
    bound = len(levels) - 1
    tables = {}
    for m in range(bound + 1):
        for g in generators_from(m, bound):
            if g.target > bound or g.target < 0:
                continue
            gm = generator_map(g)
            row = []
            for c in levels[g.target]:
                r = act(c, gm)
                try:
                    row.append(index[g.m][r])
                except KeyError:
                    raise StructuralError(f"action leaves the stored cells at level {g.m}: {r!r}") from None
            tables[g] = row
    return CubicalSet(levels, tables)


def representable_cube(n: int, bound: int = DEFAULT_BOUND) -> CubicalSet:
    """``I^n``: cells at level ``m`` are the cube maps ``{0,1}^m -> {0,1}^n``."""
    levels = [list(box_hom(m, n)) for m in range(bound + 1)]
    return cubical_from_action(levels, lambda f, phi: phi.then(f))


def validate_cubical(k: CubicalSet, relations=None) -> list:
    """Violations of derived generator relations among the stored tables."""
    if relations is None:
        relations = derived_relations(k.bound, 2)
    bad = []
    for rel in relations:
        if rel.target > k.bound or rel.source > k.bound:
            continue
        for x in range(k.size(rel.target)):
            if k.apply_word(rel.left, x) != k.apply_word(rel.right, x):
                bad.append((rel, x))
    return bad


@dataclass(frozen=True)
class Relation:
    source: int
    target: int
    left: tuple
    right: tuple

    def __str__(self):
        def show(w):
            return " ".join(str(g) for g in w) or "id"
        return f"[{show(self.left)}] = [{show(self.right)}] on dim {self.source}"


@lru_cache(maxsize=None)
def derived_relations(max_level: int = 5, max_length: int = 2) -> tuple:
    """Relations among generator words, found by comparing function tables.

    Words of length ``<= max_length`` with every intermediate dimension
    ``<= max_level`` are grouped by table; each word in a group is related to
    the group's shortest word.
    """
    groups = {}
    for m in range(max_level + 1):
        words = [((), identity_box(m))]
        frontier = list(words)
        for _ in range(max_length):
            nxt = []
            for w, f in frontier:
                for g in generators_from(f.target, max_level):
                    if g.target < 0:
                        continue
                    nxt.append((w + (g,), f.then(generator_map(g))))
            words.extend(nxt)
            frontier = nxt
        for w, f in words:
            groups.setdefault((m, f.target, f.table), []).append(w)
    out = []
    for (m, n, _), ws in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2])):
        if len(ws) < 2:
            continue
        base = ws[0]
        for w in ws[1:]:
            out.append(Relation(m, n, base, w))
    return tuple(out)


def skeleton_cubical(k: CubicalSet, n: int) -> CubicalSet:
    """Sub-cubical set generated by cells of level ``<= n`` under degeneracies and connections."""
    if n < 0:
        raise ArgumentError("skeleton degree must be >= 0")
    keep = [set(range(k.size(m))) if m <= n else set() for m in range(k.bound + 1)]
    for m in range(n, k.bound):
        for g, t in k.tables.items():
            if g.kind in ("s", "c") and g.m == m + 1:
                keep[m + 1].update(t[x] for x in keep[m])
    return restrict_cubical(k, keep)


def restrict_cubical(k: CubicalSet, keep) -> CubicalSet:
    order = [sorted(s) for s in keep]
    new = [{x: i for i, x in enumerate(o)} for o in order]
    tables = {}
    for g, t in k.tables.items():
        if max(g.m, g.target) >= len(order):
            continue
        try:
            tables[g] = [new[g.m][t[x]] for x in order[g.target]]
        except KeyError:
            raise StructuralError("kept cells are not closed under the structure maps") from None
    nondeg = [[k.nondeg[m][x] for x in order[m]] for m in range(len(order))]
    return CubicalSet([[k.cells[m][x] for x in order[m]] for m in range(len(order))], tables, nondeg)


def point_cubical(bound: int = DEFAULT_BOUND) -> CubicalSet:
    return representable_cube(0, bound)


def cubical_tensor(k: CubicalSet, l: CubicalSet, bound: int | None = None) -> CubicalSet:
    """Tensor product as a colimit of ``I^(j+k)`` over pairs of cells.

    Cells at level ``m`` are classes of triples ``(x, y, phi)`` with ``x`` in
    ``K_j``, ``y`` in ``L_k`` and ``phi: {0,1}^m -> {0,1}^(j+k)``, under
    ``(x.a, y.b, phi) ~ (x, y, (a x b) phi)``.
    """
    if bound is None:
        bound = min(k.bound, l.bound)
    kj = [j for j in range(k.bound + 1) if any(True for _ in range(k.size(j)))]
    lk = [j for j in range(l.bound + 1) if any(True for _ in range(l.size(j)))]
    estimate = 0
    for j in kj:
        for q in lk:
            for m in range(bound + 1):
                estimate += k.size(j) * l.size(q) * len(box_hom(m, j + q))
    check_capacity(estimate, "cubical tensor")
    triples, index = [], {}
    for j in kj:
        for q in lk:
            for m in range(bound + 1):
                for x in range(k.size(j)):
                    for y in range(l.size(q)):
                        for phi in box_hom(m, j + q):
                            key = (j, x, q, y, phi)
                            index[key] = len(triples)
                            triples.append(key)
    uf = UnionFind(len(triples))
    ident = {d: identity_box(d) for d in range(max(k.bound, l.bound) + 2)}
    for g, t in k.tables.items():
        a = generator_map(g)
        for x in range(k.size(g.target)):
            xa = t[x]
            for q in lk:
                lift = box_product(a, ident[q])
                for y in range(l.size(q)):
                    for m in range(bound + 1):
                        for phi in box_hom(m, g.m + q):
                            uf.union(index[(g.m, xa, q, y, phi)],
                                     index[(g.target, x, q, y, phi.then(lift))])
    for g, t in l.tables.items():
        b = generator_map(g)
        for y in range(l.size(g.target)):
            yb = t[y]
            for j in kj:
                lift = box_product(ident[j], b)
                for x in range(k.size(j)):
                    for m in range(bound + 1):
                        for phi in box_hom(m, j + g.m):
                            uf.union(index[(j, x, g.m, yb, phi)],
                                     index[(j, x, g.target, y, phi.then(lift))])
    levels = [[] for _ in range(bound + 1)]
    rep_of = {}
    for t_id, key in enumerate(triples):
        root = uf.find(t_id)
        if root == t_id:
            levels[key[4].source].append(key)
        rep_of[key] = triples[root]

    def act(cell, psi):
        j, x, q, y, phi = cell
        return rep_of[(j, x, q, y, psi.then(phi))]

    return cubical_from_action(levels, act)


# ---------------------------------------------------------------------------
# triangulation and singular cubes


def _monotone_image(f: BoxMap, chain):
    return tuple(f.table[vertex_index(v)] for v in chain)


def triangulate(k: CubicalSet, bound: int | None = None) -> SimplicialSet:
    """``T(K)``: glue ``(Delta^1)^n`` along the cubes of ``K``.

    ``n``-simplices are classes of ``(cube x in K_k, chain v_0 <= ... <= v_n in {0,1}^k)``
    under ``(x.phi, c) ~ (x, phi(c))`` for generating cube maps ``phi``.
    """
    if bound is None:
        bound = k.bound
    chains_by_dim = {}
    for d in range(k.bound + 1):
        nerve_d = cube_simplicial(d, bound)
        per_level = []
        verts = boolean_vertices(d)
        for n in range(bound + 1):
            per_level.append([tuple(verts[i] for i in c) for c in nerve_d.cells[n]])
        chains_by_dim[d] = per_level
    check_capacity(sum(k.size(d) * len(chains_by_dim[d][n]) for d in range(k.bound + 1)
                       for n in range(bound + 1)), "triangulation")
    keys, index = [], {}
    for d in range(k.bound + 1):
        for x in range(k.size(d)):
            for n in range(bound + 1):
                for c in chains_by_dim[d][n]:
                    index[(d, x, c)] = len(keys)
                    keys.append((d, x, c))
    uf = UnionFind(len(keys))
    for g, t in k.tables.items():
        phi = generator_map(g)
        for x in range(k.size(g.target)):
            xphi = t[x]
            for n in range(bound + 1):
                for c in chains_by_dim[g.m][n]:
                    uf.union(index[(g.m, xphi, c)], index[(g.target, x, _monotone_image(phi, c))])
    levels = [[] for _ in range(bound + 1)]
    rep_of = {}
    for i, key in enumerate(keys):
        root = uf.find(i)
        if root == i:
            levels[len(key[2]) - 1].append(key)
        rep_of[key] = keys[root]

    def act(cell, theta):
        d, x, c = cell
        return rep_of[(d, x, tuple(c[t] for t in theta))]

    return simplicial_from_action(levels, act)


def _strict_chains(k: int):
    """Strict chains in ``{0,1}^k`` by length, as vertex tuples."""
    verts = boolean_vertices(k)
    below = lambda a, b: a != b and all(x <= y for x, y in zip(a, b))
    levels = [[(v,) for v in verts]]
    while True:
        nxt = [c + (v,) for c in levels[-1] for v in verts if below(c[-1], v)]
        if not nxt:
            return levels
        levels.append(nxt)


def _chain_value(x: SimplicialSet, images: dict, chain):
    strict, epi = [], []
    for v in chain:
        if not strict or strict[-1] != v:
            strict.append(v)
        epi.append(len(strict) - 1)
    level = len(strict) - 1
    return x.apply(level, images[tuple(strict)], tuple(epi)) if len(epi) != len(strict) else images[tuple(strict)]


def singular_cubes(x: SimplicialSet, n: int) -> list:
    """Simplicial maps ``N({0,1}^n) -> X`` as dicts from strict chains to cell indices."""
    levels = _strict_chains(n)
    if x.bound < len(levels) - 1:
        raise ArgumentError(f"simplicial set must be stored up to level {len(levels) - 1}")
    todo = [(len(c) - 1, c) for lv in levels for c in lv]
    out = []
    images = {}

    def extend(pos):
        if pos == len(todo):
            out.append(dict(images))
            if len(out) % 4096 == 0:
                check_capacity(len(out), "singular cubes")
            return
        lvl, c = todo[pos]
        for cand in range(x.size(lvl)):
            if lvl >= 1 and any(x.faces[lvl][i][cand] != images[c[:i] + c[i + 1:]] for i in range(lvl + 1)):
                continue
            images[c] = cand
            extend(pos + 1)
        images.pop(c, None)

    extend(0)
    return out


def singular_cubify(x: SimplicialSet, bound: int) -> CubicalSet:
    """``S(X)`` truncated at ``bound``; an ``n``-cube is a simplicial map ``(Delta^1)^n -> X``."""
    order = {}
    levels = []
    for n in range(bound + 1):
        maps = singular_cubes(x, n)
        chains = [c for lv in _strict_chains(n) for c in lv]
        order[n] = chains
        levels.append([tuple(m[c] for c in chains) for m in maps])
        check_capacity(sum(len(lv) for lv in levels), "singular cubical set")

    def act(cell, phi):
        src, tgt = phi.source, phi.target
        images = dict(zip(order[tgt], cell))
        return tuple(_chain_value(x, images, _monotone_image(phi, c)) for c in order[src])

    return cubical_from_action(levels, act)


def count_cubical_maps(k: CubicalSet, y: CubicalSet) -> int:
    """Number of cubical maps ``K -> Y`` (with connections), by backtracking on nondegenerate cells."""
    top = max((n for n in range(k.bound + 1) if any(k.nondeg[n])), default=0)
    if y.bound < top:
        raise ArgumentError("target cubical set is not stored high enough")
    todo = [(n, c) for n in range(top + 1) for c in k.nondegenerate(n)]
    decomp = {(n, c): k.decompositions(n, c)[0] for n in range(top + 1)
              for c in range(k.size(n)) if not k.nondeg[n][c]}
    image = {}

    def value(n, c):
        if k.nondeg[n][c]:
            return image[(n, c)]
        lv, root, epi = decomp[(n, c)]
        return y.apply_box(epi, image[(lv, root)])

    count = 0

    def extend(pos):
        nonlocal count
        if pos == len(todo):
            count += 1
            return
        n, c = todo[pos]
        for cand in range(y.size(n)):
            if n >= 1 and any(y.face(n, i, e, cand) != value(n - 1, k.face(n, i, e, c))
                              for i in range(1, n + 1) for e in (0, 1)):
                continue
            image[(n, c)] = cand
            extend(pos + 1)
            del image[(n, c)]

    extend(0)
    return count


def adjunction_counts(k: CubicalSet, x: SimplicialSet):
    """``(|hom(T K, X)|, |hom(K, S X)|)`` by independent enumeration."""
    top = max((n for n in range(k.bound + 1) if any(k.nondeg[n])), default=0)
    tk = triangulate(restrict_cubical(k, [set(range(k.size(n))) for n in range(top + 1)]), top)
    lhs = count_simplicial_maps(tk, x)
    sx = singular_cubify(x, top)
    rhs = count_cubical_maps(restrict_cubical(k, [set(range(k.size(n))) for n in range(top + 1)]), sx)
    return lhs, rhs


# ---------------------------------------------------------------------------
# G-simplicial sets and subdivision categories


class GSimplicialSet:
    """A simplicial set with a group acting by simplicial automorphisms.

    ``action[g][n]`` is a permutation of the cells at level ``n``.
    """

    def __init__(self, group: FiniteGroup, sset: SimplicialSet, action=None):
        self.group = group
        self.sset = sset
        if action is None:
            action = [[tuple(range(sset.size(n))) for n in range(sset.bound + 1)] for _ in group.elements]
        self.action = tuple(tuple(tuple(p) for p in per_g) for per_g in action)

    def act(self, g, n, x):
        return self.action[g][n][x]

    def validate(self) -> list:
        bad = []
        k, grp = self.sset, self.group
        for g in grp.elements:
            for n in range(k.bound + 1):
                if sorted(self.action[g][n]) != list(range(k.size(n))):
                    bad.append(f"element {g} does not permute level {n}")
        if bad:
            return bad
        for g in grp.elements:
            a = self.action[g]
            for n in range(1, k.bound + 1):
                for i in range(n + 1):
                    for x in range(k.size(n)):
                        if a[n - 1][k.faces[n][i][x]] != k.faces[n][i][a[n][x]]:
                            bad.append(f"element {g} does not commute with d_{i} at level {n}")
                            break
            for n in range(k.bound):
                for i in range(n + 1):
                    for x in range(k.size(n)):
                        if a[n + 1][k.degens[n][i][x]] != k.degens[n][i][a[n][x]]:
                            bad.append(f"element {g} does not commute with s_{i} at level {n}")
                            break
        e = grp.identity
        if any(self.action[e][n] != tuple(range(k.size(n))) for n in range(k.bound + 1)):
            bad.append("identity does not act trivially")
        for a in grp.elements:
            for b in grp.elements:
                ab = grp.mul(a, b)
                for n in range(k.bound + 1):
                    if any(self.action[ab][n][x] != self.action[a][n][self.action[b][n][x]]
                           for x in range(k.size(n))):
                        bad.append(f"action of {a}*{b} is not the composite action")
                        break
        return bad

    def stabilizer(self, n, x) -> frozenset:
        return frozenset(g for g in self.group.elements if self.action[g][n][x] == x)

    def orbits(self, n) -> list:
        seen, out = set(), []
        for x in range(self.sset.size(n)):
            if x in seen:
                continue
            orb = sorted({self.action[g][n][x] for g in self.group.elements})
            seen.update(orb)
            out.append(orb)
        return out


def sd_category(x: GSimplicialSet) -> GCat:
    """Subdivision category: nondegenerate simplices, with a morphism ``x -> y``
    for every face inclusion ``theta`` with ``x . theta = y``.
    """
    bad = x.validate()
    if bad:
        raise StructuralError(f"action is not simplicial: {bad[0]}")
    k = x.sset
    objs = [(n, c) for n in range(k.bound + 1) for c in k.nondegenerate(n)]
    oid = {o: i for i, o in enumerate(objs)}
    mors, labels, index = [], [], {}
    for (n, c) in objs:
        for m in range(n + 1):
            for image in itertools.combinations(range(n + 1), m + 1):
                y = k.apply(n, c, image)
                if (m, y) not in oid:
                    raise StructuralError("a face of a nondegenerate simplex is degenerate; Sd needs a regular input")
                key = (oid[(n, c)], oid[(m, y)], image)
                index[key] = len(mors)
                mors.append((oid[(n, c)], oid[(m, y)]))
                labels.append(image)
    identity = [index[(i, i, tuple(range(o[0] + 1)))] for i, o in enumerate(objs)]

    def composer(q, p):
        a = mors[p][0]
        c = mors[q][1]
        return index[(a, c, compose_ops(labels[p], labels[q]))]

    cat = FinCat([("cell", n, k.cells[n][c]) for n, c in objs], mors, identity, composer, labels)
    obj_action, mor_action = [], []
    for g in x.group.elements:
        oa = [oid[(n, x.action[g][n][c])] for n, c in objs]
        ma = [index[(oa[d], oa[cc], labels[mm])] for mm, (d, cc) in enumerate(mors)]
        obj_action.append(oa)
        mor_action.append(ma)
    return GCat(x.group, cat, obj_action, mor_action)


def sd_objects(x: GSimplicialSet):
    """``(level, cell)`` pairs in the object order used by ``sd_category``."""
    k = x.sset
    return [(n, c) for n in range(k.bound + 1) for c in k.nondegenerate(n)]


def cell_count_multiset(k) -> Counter:
    return Counter({n: c for n, c in enumerate(k.nondegenerate_counts()) if c})
