"""Cofibrant replacements of finite acyclic categories.

``w_complex`` builds the cubical mapping complexes of the W-construction.  A
cell of ``W C(a, b)`` is stored in normal form ``(chain, phi)``: ``chain`` is a
path of non-identity morphisms from ``a`` to ``b`` (first morphism first) and
``phi: {0,1}^m -> {0,1}^n`` is a cube map into the cube of the chain that has
no output coordinate constantly 0.  Coordinate ``i`` of the cube of a chain
with ``n+1`` morphisms belongs to the interior object ``n+1-i``, so coordinate
1 sits next to ``b``.  The empty chain is the identity vertex of ``W C(a, a)``.

``free_resolution`` builds the simplicial hom-sets of the comonad resolution
out of nested words.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .errors import ArgumentError, UnsupportedInputError
from .fincat import FinCat, poset_category
from .shapes import (BoxMap, CubicalSet, SimplicialSet, box_hom, cube_simplicial, cubical_from_action,
                     restrict_cubical, triangulate, vertex_index)
from .util import check_capacity


@dataclass(frozen=True)
class WCell:
    source: int
    target: int
    chain: tuple
    phi: BoxMap

    @property
    def level(self):
        return self.phi.source

    @property
    def cube_dim(self):
        return max(len(self.chain) - 1, 0)

    def __repr__(self):
        return f"WCell({self.source}->{self.target}, chain={self.chain}, level={self.level})"


def require_acyclic(c: FinCat):
    if not c.is_acyclic():
        raise UnsupportedInputError("the category has a cycle or a non-identity endomorphism")


def reduced_chains(c: FinCat, a: int, b: int) -> list:
    """Paths of non-identity morphisms from ``a`` to ``b``; the empty path when ``a == b``."""
    out_edges = {}
    for m, (d, cod) in enumerate(c.morphisms):
        if not c.is_identity(m):
            out_edges.setdefault(d, []).append(m)
    found = []

    def walk(x, path):
        if x == b:
            found.append(tuple(path))
            if a == b:
                return
        for m in out_edges.get(x, ()):
            path.append(m)
            walk(c.cod(m), path)
            path.pop()

    walk(a, [])
    return sorted(found, key=lambda p: (len(p), p))


def _drop(table, i):
    return tuple(w[:i - 1] + w[i:] for w in table)


def _merge(table, i):
    return tuple(w[:i - 1] + (max(w[i - 1], w[i]),) + w[i + 1:] for w in table)


def normalize(c: FinCat, a: int, b: int, chain, phi: BoxMap) -> WCell:
    """Bring ``(chain, phi)`` to normal form.

    Identity entries are removed through the matching degeneracy or
    connection of the cube; constant-0 coordinates compose the adjacent pair.
    """
    chain = list(chain)
    table = phi.table
    m = phi.source
    while True:
        pos = next((p for p, f in enumerate(chain) if c.is_identity(f)), None)
        if pos is None:
            break
        n = len(chain) - 1
        if n == 0:
            pass
        elif pos == n:
            table = _drop(table, 1)
        elif pos == 0:
            table = _drop(table, n)
        else:
            table = _merge(table, n - pos)
        del chain[pos]
    while True:
        n = len(chain) - 1
        coord = None
        for i in range(1, n + 1):
            if all(w[i - 1] == 0 for w in table):
                coord = i
                break
        if coord is None:
            break
        obj = n + 1 - coord
        chain[obj - 1:obj + 1] = [c.compose(chain[obj], chain[obj - 1])]
        table = _drop(table, coord)
    width = max(len(chain) - 1, 0)
    return WCell(a, b, tuple(chain), BoxMap(m, width, table))


class WComplex:
    """Cubical mapping complexes of the W-construction, built lazily per hom-pair."""

    def __init__(self, c: FinCat, bound: int | None = None):
        require_acyclic(c)
        self.category = c
        self.bound = bound
        self._homs = {}
        self._keep = None

    def chain_dim(self, a, b):
        chains = reduced_chains(self.category, a, b)
        return max((max(len(p) - 1, 0) for p in chains), default=-1)

    def hom(self, a: int, b: int) -> CubicalSet:
        key = (a, b)
        if key not in self._homs:
            self._homs[key] = self._build(a, b)
        return self._homs[key]

    def _build(self, a, b):
        c = self.category
        chains = reduced_chains(c, a, b)
        top = max((max(len(p) - 1, 0) for p in chains), default=0)
        bound = top if self.bound is None else self.bound
        levels = [[] for _ in range(bound + 1)]
        total = 0
        for p in chains:
            n = max(len(p) - 1, 0)
            for m in range(bound + 1):
                for phi in box_hom(m, n):
                    if n and any(all(w[i] == 0 for w in phi.table) for i in range(n)):
                        continue
                    levels[m].append(WCell(a, b, p, phi))
                    total += 1
            check_capacity(total, "W-construction hom complex")

        def act(cell, psi):
            return normalize(c, a, b, cell.chain, psi.then(cell.phi))

        hom = cubical_from_action(levels, act)
        if self._keep is not None:
            hom = restrict_cubical(hom, [{x for x, cell in enumerate(hom.cells[m]) if self._keep(cell)}
                                         for m in range(hom.bound + 1)])
        return hom

    def cell(self, a, b, chain, phi=None) -> WCell:
        """Normal form of the cell ``phi`` of the cube of ``chain`` (default: the whole cube)."""
        n = max(len(chain) - 1, 0)
        if phi is None:
            phi = BoxMap(n, n, tuple(itertools.product((0, 1), repeat=n)))
        return normalize(self.category, a, b, chain, phi)

    def compose(self, left: WCell, right: WCell) -> WCell:
        return w_compose(self, left, right)

    def triangulated(self, a, b) -> SimplicialSet:
        hom = self.hom(a, b)
        return triangulate(hom, hom.bound)


def w_complex(c: FinCat, bound: int | None = None) -> WComplex:
    return WComplex(c, bound)


def w_compose(w: WComplex, left: WCell, right: WCell) -> WCell:
    """Composite of ``left`` in ``W(a_i, b)`` after ``right`` in ``W(a, a_i)``.

    The chains concatenate and the cube maps combine as
    ``(u, v) -> (phi_left(u), 1, phi_right(v))``; the result sits at level
    ``left.level + right.level``.
    """
    if left.source != right.target:
        raise ArgumentError(f"cannot compose a cell starting at {left.source} after one ending at {right.target}")
    j, k = left.level, right.level
    lt, rt = left.phi.table, right.phi.table
    rows = []
    for u in range(2 ** j):
        for v in range(2 ** k):
            if not left.chain:
                rows.append(rt[v])
            elif not right.chain:
                rows.append(lt[u])
            else:
                rows.append(lt[u] + (1,) + rt[v])
    chain = right.chain + left.chain
    width = max(len(chain) - 1, 0)
    return normalize(w.category, right.source, left.target, chain, BoxMap(j + k, width, tuple(rows)))


def identity_cell(a: int, level: int = 0) -> WCell:
    return WCell(a, a, (), BoxMap(level, 0, tuple(() for _ in range(2 ** level))))


# ---------------------------------------------------------------------------
# enriched skeleta


def free_runs(phi: BoxMap) -> list:
    """Lengths of maximal runs of non-constant output coordinates of ``phi``."""
    runs, cur = [], 0
    for i in range(phi.target):
        if len({w[i] for w in phi.table}) > 1:
            cur += 1
        else:
            runs.append(cur)
            cur = 0
    runs.append(cur)
    return runs


def in_enriched_skeleton(cell: WCell, n: int) -> bool:
    """Whether ``cell`` lies in the sub-complex generated by composites of cubes of dimension ``<= n``."""
    return max(free_runs(cell.phi)) <= n


def enriched_skeleton(w: WComplex, n: int) -> WComplex:
    if n < 0:
        raise ArgumentError("skeleton degree must be >= 0")
    out = WComplex(w.category, w.bound)
    out._keep = lambda cell: in_enriched_skeleton(cell, n)
    return out


# ---------------------------------------------------------------------------
# free simplicial resolution


def _paths(c: FinCat, a: int, b: int) -> list:
    return reduced_chains(c, a, b)


def _compositions(seq):
    """Ways of cutting a nonempty sequence into consecutive nonempty blocks."""
    k = len(seq)
    for cuts in range(2 ** max(k - 1, 0)):
        blocks, start = [], 0
        for pos in range(1, k):
            if cuts >> (pos - 1) & 1:
                blocks.append(tuple(seq[start:pos]))
                start = pos
        blocks.append(tuple(seq[start:]))
        yield tuple(blocks)


def _nested(seq, depth):
    """Depth-``depth`` nested words whose flattening is ``seq``."""
    if depth == 1:
        return [tuple(seq)]
    out = []
    for blocks in _compositions(seq):
        for parts in itertools.product(*[_nested(bl, depth - 1) for bl in blocks]):
            out.append(tuple(parts))
    return out


def free_resolution_hom(c: FinCat, a: int, b: int, level: int) -> list:
    """``level``-simplices of ``F_. C(a, b)``: nested words of depth ``level + 1``."""
    require_acyclic(c)
    if level < 0:
        raise ArgumentError("level must be >= 0")
    out = []
    for p in _paths(c, a, b):
        if not p:
            out.append(())
        else:
            out.extend(_nested(p, level + 1))
        check_capacity(len(out), "free resolution level")
    return sorted(out, key=repr)


def _apply_at(word, depth, fn):
    if depth == 0:
        return fn(word)
    return tuple(_apply_at(w, depth - 1, fn) for w in word)


def free_face(c: FinCat, word, n: int, i: int):
    """``d_i`` on an ``n``-simplex: the counit at nesting depth ``i``."""
    if not 0 <= i <= n or n < 1:
        raise ArgumentError(f"face d_{i} undefined on level {n}")
    if i < n:
        return _apply_at(word, i, lambda w: tuple(x for block in w for x in block))
    return _apply_at(word, i, lambda w: c.compose_path(w))


def free_degeneracy(word, n: int, i: int):
    """``s_i`` on an ``n``-simplex: the comultiplication at nesting depth ``i``."""
    if not 0 <= i <= n:
        raise ArgumentError(f"degeneracy s_{i} undefined on level {n}")
    return _apply_at(word, i, lambda w: tuple((x,) for x in w))


def free_resolution(c: FinCat, a: int, b: int, bound: int) -> SimplicialSet:
    """``F_. C(a, b)`` as a simplicial set truncated at ``bound``."""
    levels = [free_resolution_hom(c, a, b, n) for n in range(bound + 1)]
    index = [{w: k for k, w in enumerate(lv)} for lv in levels]
    faces = [[]] + [[[index[n - 1][free_face(c, w, n, i)] for w in levels[n]] for i in range(n + 1)]
                    for n in range(1, bound + 1)]
    degens = [[[index[n + 1][free_degeneracy(w, n, i)] for w in levels[n]] for i in range(n + 1)]
              for n in range(bound)]
    return SimplicialSet(levels, faces, degens)


# ---------------------------------------------------------------------------
# comparison on [n]


@dataclass
class ComparisonReport:
    n: int
    i: int
    j: int
    w_counts: tuple
    cube_counts: tuple
    free_counts: tuple

    @property
    def ok(self):
        return self.w_counts == self.cube_counts == self.free_counts


def _pad(counts, length):
    counts = tuple(counts)[:length]
    return counts + (0,) * (length - len(counts))


@lru_cache(maxsize=None)
def _poset(n):
    return poset_category(n)


def compare_T_W_vs_free(n: int, i: int, j: int) -> ComparisonReport:
    """Levelwise nondegenerate counts of ``T W[n](i,j)``, ``(Delta^1)^(j-i-1)`` and ``F_.[n](i,j)``."""
    if not 0 <= i <= j <= n:
        raise ArgumentError("need 0 <= i <= j <= n")
    if j - i > 5:
        raise ArgumentError("comparison is limited to j - i <= 5")
    k = max(j - i - 1, 0)
    top = k + 1
    w = WComplex(_poset(n), bound=k)
    tw = triangulate(w.hom(i, j), top)
    cube = cube_simplicial(k, top)
    free = free_resolution(_poset(n), i, j, top)
    return ComparisonReport(n, i, j, _pad(tw.nondegenerate_counts(), top + 1),
                            _pad(cube.nondegenerate_counts(), top + 1),
                            _pad(free.nondegenerate_counts(), top + 1))


def boolean_cube_count(k: int, n: int) -> int:
    """Number of ``n``-simplices (degenerate included) of ``(Delta^1)^k``."""
    return (n + 2) ** k if k >= 0 else 1


def vertex_of(cell: WCell) -> tuple:
    """The vertex ``phi(0..0)`` of a cell, in cube coordinates."""
    return cell.phi.table[vertex_index((0,) * cell.level)]
