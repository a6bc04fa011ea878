"""Finite categories, finite groups, strict G-categories and their derived categories.

Everything is indexed by dense integer ids.  Objects and morphisms may carry
hashable labels; labels are for display and lookup only, equality is by id.

>>> c = poset_category(2)
>>> c.n_objects, c.n_morphisms
(3, 6)
>>> validate_category(c).ok
True
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import ArgumentError, StructuralError
from .util import UnionFind


# ---------------------------------------------------------------------------
# validation reports


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self):
        return f"{self.kind}: {self.detail}"


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def add(self, kind, detail):
        self.violations.append(Violation(kind, detail))

    def extend(self, other):
        self.violations.extend(other.violations)

    def __bool__(self):
        return self.ok

    def __len__(self):
        return len(self.violations)


# ---------------------------------------------------------------------------
# categories


class FinCat:
    """A finite category with dense ids.

    Parameters
    ----------
    objects : sequence of hashable
        Object labels; object ``i`` is ``objects[i]``.
    morphisms : sequence of (dom, cod)
        Endpoints of morphism ``m``.
    identity : sequence of int
        ``identity[x]`` is the identity morphism of object ``x``.
    compose : dict or callable
        ``compose[(g, f)]`` (or ``compose(g, f)``) is ``g o f`` for every
        pair with ``cod(f) == dom(g)``.
    mor_labels : sequence of hashable, optional
    """

    def __init__(self, objects, morphisms, identity, compose, mor_labels=None):
        self.objects = tuple(objects)
        self.morphisms = tuple((int(d), int(c)) for d, c in morphisms)
        self.identity = tuple(int(i) for i in identity)
        if callable(compose):
            self._table = None
            self._composer = compose
        else:
            self._table = dict(compose)
            self._composer = None
        self.mor_labels = tuple(mor_labels) if mor_labels is not None else tuple(range(len(self.morphisms)))
        self._obj_index = None
        self._mor_index = None
        self._hom = None

    # sizes -----------------------------------------------------------------
    @property
    def n_objects(self):
        return len(self.objects)

    @property
    def n_morphisms(self):
        return len(self.morphisms)

    def dom(self, m):
        return self.morphisms[m][0]

    def cod(self, m):
        return self.morphisms[m][1]

    def is_identity(self, m):
        d, c = self.morphisms[m]
        return d == c and self.identity[d] == m

    def compose(self, g, f):
        """Return ``g o f``; raises ``ArgumentError`` when not composable."""
        if self.morphisms[f][1] != self.morphisms[g][0]:
            raise ArgumentError(f"morphisms {g} and {f} are not composable")
        if self._table is not None:
            try:
                return self._table[(g, f)]
            except KeyError:
                raise StructuralError(f"composition table has no entry for ({g}, {f})") from None
        return self._composer(g, f)

    def compose_path(self, path):
        """Compose ``path = [f1, f2, ...]`` applied left to right."""
        it = iter(path)
        acc = next(it)
        for m in it:
            acc = self.compose(m, acc)
        return acc

    # lookups -----------------------------------------------------------------
    def hom(self, a, b):
        if self._hom is None:
            table = {}
            for m, (d, c) in enumerate(self.morphisms):
                table.setdefault((d, c), []).append(m)
            self._hom = table
        return self._hom.get((a, b), [])

    def out_of(self, a):
        return [m for m, (d, _) in enumerate(self.morphisms) if d == a]

    def object_id(self, label):
        if self._obj_index is None:
            self._obj_index = {lab: i for i, lab in enumerate(self.objects)}
        return self._obj_index[label]

    def morphism_id(self, label):
        if self._mor_index is None:
            self._mor_index = {lab: i for i, lab in enumerate(self.mor_labels)}
        return self._mor_index[label]

    def composition_table(self):
        """Materialize the composition as a dict over all composable pairs."""
        table = {}
        by_dom = {}
        for m, (d, _) in enumerate(self.morphisms):
            by_dom.setdefault(d, []).append(m)
        for f, (_, c) in enumerate(self.morphisms):
            for g in by_dom.get(c, ()):
                table[(g, f)] = self.compose(g, f)
        return table

    def opposite(self):
        table = {(f, g): h for (g, f), h in self.composition_table().items()}
        return FinCat(self.objects, [(c, d) for d, c in self.morphisms], self.identity,
                      table, self.mor_labels)

    def is_acyclic(self):
        """No non-identity endomorphisms and no directed cycles between distinct objects."""
        for m, (d, c) in enumerate(self.morphisms):
            if d == c and not self.is_identity(m):
                return False
        succ = {x: set() for x in range(self.n_objects)}
        for d, c in self.morphisms:
            if d != c:
                succ[d].add(c)
        state = [0] * self.n_objects
        for root in range(self.n_objects):
            if state[root]:
                continue
            stack = [(root, iter(succ[root]))]
            state[root] = 1
            while stack:
                node, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    state[node] = 2
                    stack.pop()
                elif state[nxt] == 1:
                    return False
                elif state[nxt] == 0:
                    state[nxt] = 1
                    stack.append((nxt, iter(succ[nxt])))
        return True

    def __repr__(self):
        return f"FinCat({self.n_objects} objects, {self.n_morphisms} morphisms)"


def validate_category(c: FinCat) -> ValidationReport:
    """Exhaustively check endpoints, identity laws and associativity."""
    report = ValidationReport()
    n_obj = c.n_objects
    for x, i in enumerate(c.identity):
        if not (0 <= i < c.n_morphisms) or c.morphisms[i] != (x, x):
            report.add("identity", f"identity of object {x} is not an endomorphism of {x}")
            return report
    by_dom = {}
    for m, (d, cc) in enumerate(c.morphisms):
        if not (0 <= d < n_obj and 0 <= cc < n_obj):
            report.add("endpoints", f"morphism {m} has endpoints outside the object set")
            return report
        by_dom.setdefault(d, []).append(m)
    comp = {}
    for f, (df, cf) in enumerate(c.morphisms):
        for g in by_dom.get(cf, ()):
            try:
                h = c.compose(g, f)
            except StructuralError as exc:
                report.add("totality", str(exc))
                continue
            if not (0 <= h < c.n_morphisms):
                report.add("totality", f"compose({g}, {f}) = {h} is not a morphism")
                continue
            if c.morphisms[h] != (df, c.morphisms[g][1]):
                report.add("endpoints", f"compose({g}, {f}) = {h} has wrong endpoints")
            comp[(g, f)] = h
    for f, (df, cf) in enumerate(c.morphisms):
        if comp.get((f, c.identity[df])) != f:
            report.add("identity", f"compose({f}, id_{df}) != {f}")
        if comp.get((c.identity[cf], f)) != f:
            report.add("identity", f"compose(id_{cf}, {f}) != {f}")
    for (g, f), gf in comp.items():
        for h in by_dom.get(c.morphisms[g][1], ()):
            hg = comp.get((h, g))
            if hg is None or (h, gf) not in comp or (hg, f) not in comp:
                continue
            if comp[(h, gf)] != comp[(hg, f)]:
                report.add("associativity", f"({h} o {g}) o {f} != {h} o ({g} o {f})")
    return report


def poset_category(n: int) -> FinCat:
    """The ordinal ``[n] = {0 < 1 < ... < n}`` as a category."""
    if n < 0:
        raise ArgumentError("poset_category needs n >= 0")
    return category_from_poset(range(n + 1), lambda a, b: a <= b)


def category_from_poset(elements, leq) -> FinCat:
    """Thin category of a finite preorder given by ``leq(a, b)``."""
    elements = list(elements)
    morphisms, labels, index = [], [], {}
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            if leq(a, b):
                index[(i, j)] = len(morphisms)
                morphisms.append((i, j))
                labels.append((a, b))
    identity = [index[(i, i)] for i in range(len(elements))]

    def composer(g, f):
        i = morphisms[f][0]
        k = morphisms[g][1]
        try:
            return index[(i, k)]
        except KeyError:
            raise StructuralError("relation is not transitive") from None

    return FinCat(elements, morphisms, identity, composer, labels)


def discrete_category(labels) -> FinCat:
    labels = list(labels)
    k = len(labels)
    return FinCat(labels, [(i, i) for i in range(k)], list(range(k)),
                  {(i, i): i for i in range(k)})


def terminal_category() -> FinCat:
    return poset_category(0)


def product_category(a: FinCat, b: FinCat) -> FinCat:
    objs = [(x, y) for x in range(a.n_objects) for y in range(b.n_objects)]
    oid = {o: i for i, o in enumerate(objs)}
    mors, labels = [], []
    mid = {}
    for f in range(a.n_morphisms):
        for g in range(b.n_morphisms):
            mid[(f, g)] = len(mors)
            mors.append((oid[(a.dom(f), b.dom(g))], oid[(a.cod(f), b.cod(g))]))
            labels.append((a.mor_labels[f], b.mor_labels[g]))
    identity = [mid[(a.identity[x], b.identity[y])] for x, y in objs]
    pairs = list(mid)

    def composer(q, p):
        f1, g1 = pairs[p]
        f2, g2 = pairs[q]
        return mid[(a.compose(f2, f1), b.compose(g2, g1))]

    return FinCat([(a.objects[x], b.objects[y]) for x, y in objs], mors, identity, composer, labels)


# ---------------------------------------------------------------------------
# functors


class Functor:
    """A functor between finite categories given by object and morphism maps."""

    def __init__(self, source: FinCat, target: FinCat, obj_map, mor_map):
        self.source = source
        self.target = target
        self.obj_map = tuple(obj_map)
        self.mor_map = tuple(mor_map)

    def __call__(self, m):
        return self.mor_map[m]

    def validate(self) -> ValidationReport:
        report = ValidationReport()
        s, t = self.source, self.target
        if len(self.obj_map) != s.n_objects or len(self.mor_map) != s.n_morphisms:
            report.add("shape", "object or morphism map has the wrong length")
            return report
        for m, (d, c) in enumerate(s.morphisms):
            fm = self.mor_map[m]
            if t.morphisms[fm] != (self.obj_map[d], self.obj_map[c]):
                report.add("endpoints", f"image of morphism {m} has wrong endpoints")
        for x in range(s.n_objects):
            if self.mor_map[s.identity[x]] != t.identity[self.obj_map[x]]:
                report.add("identity", f"identity of object {x} not sent to an identity")
        if not report.ok:
            return report
        for (g, f), h in s.composition_table().items():
            if t.compose(self.mor_map[g], self.mor_map[f]) != self.mor_map[h]:
                report.add("composition", f"F({g} o {f}) != F({g}) o F({f})")
        return report

    def then(self, other: "Functor") -> "Functor":
        return Functor(self.source, other.target,
                       [other.obj_map[x] for x in self.obj_map],
                       [other.mor_map[m] for m in self.mor_map])


def identity_functor(c: FinCat) -> Functor:
    return Functor(c, c, range(c.n_objects), range(c.n_morphisms))


# ---------------------------------------------------------------------------
# finite groups


class FiniteGroup:
    """A finite group by multiplication table; element 0 need not be the identity.

    ``mult[a][b]`` is the product ``a * b``.
    """

    def __init__(self, mult, labels=None, name=None):
        self.mult = tuple(tuple(int(x) for x in row) for row in mult)
        n = len(self.mult)
        self.labels = tuple(labels) if labels is not None else tuple(range(n))
        self.name = name or f"group of order {n}"
        ident = [e for e in range(n) if all(self.mult[e][x] == x == self.mult[x][e] for x in range(n))]
        if len(ident) != 1:
            raise StructuralError("multiplication table has no two-sided identity")
        self.identity = ident[0]
        inv = []
        for a in range(n):
            cands = [b for b in range(n) if self.mult[a][b] == self.identity]
            if len(cands) != 1:
                raise StructuralError(f"element {a} has no unique inverse")
            inv.append(cands[0])
        self.inverse = tuple(inv)
        self._subgroups = None

    @property
    def order(self):
        return len(self.mult)

    @property
    def elements(self):
        return range(len(self.mult))

    def mul(self, a, b):
        return self.mult[a][b]

    def inv(self, a):
        return self.inverse[a]

    def product(self, *xs):
        acc = self.identity
        for x in xs:
            acc = self.mult[acc][x]
        return acc

    def conj(self, g, h):
        """``g h g^-1``."""
        return self.mult[self.mult[g][h]][self.inverse[g]]

    def element_order(self, a):
        k, x = 1, a
        while x != self.identity:
            x = self.mult[x][a]
            k += 1
        return k

    def exponent(self):
        from math import lcm
        out = 1
        for a in self.elements:
            out = lcm(out, self.element_order(a))
        return out

    def generated(self, gens) -> frozenset:
        found = {self.identity}
        frontier = [self.identity]
        gens = list(gens)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mult[x][g]
                    if y not in found:
                        found.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(found)

    def is_subgroup(self, s) -> bool:
        s = set(s)
        if self.identity not in s:
            return False
        return all(self.mult[a][self.inverse[b]] in s for a in s for b in s)

    def conjugate(self, g, subgroup) -> frozenset:
        return frozenset(self.conj(g, h) for h in subgroup)

    def subgroups(self) -> list:
        """All subgroups, sorted by (order, sorted elements)."""
        if self._subgroups is None:
            cyclic = {self.generated([a]) for a in self.elements}
            found = set(cyclic)
            frontier = set(cyclic)
            while frontier:
                nxt = set()
                for h in frontier:
                    for c in cyclic:
                        if c <= h:
                            continue
                        j = self.generated(set(h) | set(c))
                        if j not in found:
                            found.add(j)
                            nxt.add(j)
                frontier = nxt
            self._subgroups = sorted(found, key=lambda s: (len(s), sorted(s)))
        return list(self._subgroups)

    def left_cosets(self, subgroup) -> list:
        """Left cosets ``xH`` as frozensets, ordered by least element."""
        seen, out = set(), []
        for x in self.elements:
            if x in seen:
                continue
            coset = frozenset(self.mult[x][h] for h in subgroup)
            seen |= coset
            out.append(coset)
        return out

    def as_category(self) -> FinCat:
        """The one-object groupoid; morphism ``g`` is the element ``g``."""
        n = self.order
        return FinCat(["*"], [(0, 0)] * n, [self.identity],
                      {(g, f): self.mult[g][f] for g in range(n) for f in range(n)},
                      self.labels)

    def __repr__(self):
        return f"FiniteGroup({self.name})"


def validate_group(g: FiniteGroup) -> ValidationReport:
    report = ValidationReport()
    n = g.order
    for row in g.mult:
        if len(row) != n or any(not (0 <= x < n) for x in row):
            report.add("closure", "multiplication table is not square over the element set")
            return report
    for a in range(n):
        for b in range(n):
            ab = g.mult[a][b]
            for c in range(n):
                if g.mult[ab][c] != g.mult[a][g.mult[b][c]]:
                    report.add("associativity", f"({a}{b}){c} != {a}({b}{c})")
    return report


def group_from_permutations(generators, name=None) -> FiniteGroup:
    """Closure of permutation tuples under composition; identity gets id 0.

    Elements are ordered by (identity first, then lexicographic tuples).
    ``p * q`` means apply ``q`` first, then ``p``.
    """
    generators = [tuple(p) for p in generators]
    if not generators:
        raise ArgumentError("need at least one generator (use the identity for the trivial group)")
    deg = len(generators[0])
    ident = tuple(range(deg))
    found = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for s in generators:
                q = tuple(s[p[i]] for i in range(deg))
                if q not in found:
                    found.add(q)
                    nxt.append(q)
        frontier = nxt
    elems = sorted(found, key=lambda p: (p != ident, p))
    index = {p: i for i, p in enumerate(elems)}
    mult = [[index[tuple(p[q[i]] for i in range(deg))] for q in elems] for p in elems]
    return FiniteGroup(mult, elems, name)


def cyclic_group(n: int) -> FiniteGroup:
    if n < 1:
        raise ArgumentError("cyclic group order must be positive")
    return FiniteGroup([[(a + b) % n for b in range(n)] for a in range(n)], name=f"Z/{n}")


def symmetric_group(n: int) -> FiniteGroup:
    if n < 1:
        raise ArgumentError("degree must be positive")
    gens = [tuple(range(n))]
    if n >= 2:
        gens.append(tuple([1, 0] + list(range(2, n))))
    if n >= 3:
        gens.append(tuple(list(range(1, n)) + [0]))
    return group_from_permutations(gens, name=f"S{n}")


def dihedral_group(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n (n >= 3), acting on vertices."""
    if n < 3:
        raise ArgumentError("dihedral group needs n >= 3")
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    return group_from_permutations([rot, ref], name=f"D{n}")


def trivial_group() -> FiniteGroup:
    return FiniteGroup([[0]], name="1")


def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    pairs = [(x, y) for x in a.elements for y in b.elements]
    idx = {p: i for i, p in enumerate(pairs)}
    mult = [[idx[(a.mult[x1][x2], b.mult[y1][y2])] for (x2, y2) in pairs] for (x1, y1) in pairs]
    return FiniteGroup(mult, [(a.labels[x], b.labels[y]) for x, y in pairs], f"{a.name}x{b.name}")


# ---------------------------------------------------------------------------
# G-categories


class GCat:
    """A finite group acting strictly on a finite category.

    ``obj_action[g][x]`` and ``mor_action[g][m]`` give the action of ``g``.
    """

    def __init__(self, group: FiniteGroup, base: FinCat, obj_action=None, mor_action=None):
        self.group = group
        self.base = base
        n = group.order
        if obj_action is None:
            obj_action = [list(range(base.n_objects))] * n
        if mor_action is None:
            mor_action = [list(range(base.n_morphisms))] * n
        self.obj_action = tuple(tuple(row) for row in obj_action)
        self.mor_action = tuple(tuple(row) for row in mor_action)

    def act_obj(self, g, x):
        return self.obj_action[g][x]

    def act_mor(self, g, m):
        return self.mor_action[g][m]

    def functor(self, g) -> Functor:
        return Functor(self.base, self.base, self.obj_action[g], self.mor_action[g])

    def is_trivial_action(self):
        return all(row == tuple(range(len(row))) for row in self.obj_action) and \
            all(row == tuple(range(len(row))) for row in self.mor_action)

    def __repr__(self):
        return f"GCat({self.group!r} on {self.base!r})"


def validate_gcat(gamma: GCat) -> ValidationReport:
    report = validate_category(gamma.base)
    grp, base = gamma.group, gamma.base
    if len(gamma.obj_action) != grp.order or len(gamma.mor_action) != grp.order:
        report.add("action", "action tables do not cover every group element")
        return report
    for g in grp.elements:
        if sorted(gamma.obj_action[g]) != list(range(base.n_objects)) or \
                sorted(gamma.mor_action[g]) != list(range(base.n_morphisms)):
            report.add("action", f"element {g} does not act bijectively")
            return report
        sub = gamma.functor(g).validate()
        for v in sub.violations:
            report.add("action", f"element {g}: {v}")
    if not report.ok:
        return report
    e = grp.identity
    if gamma.obj_action[e] != tuple(range(base.n_objects)) or gamma.mor_action[e] != tuple(range(base.n_morphisms)):
        report.add("action", "identity element does not act trivially")
    for a in grp.elements:
        for b in grp.elements:
            ab = grp.mul(a, b)
            if any(gamma.obj_action[ab][x] != gamma.obj_action[a][gamma.obj_action[b][x]]
                   for x in range(base.n_objects)) or \
                    any(gamma.mor_action[ab][m] != gamma.mor_action[a][gamma.mor_action[b][m]]
                        for m in range(base.n_morphisms)):
                report.add("action", f"action of {a}*{b} differs from composite action")
    return report


def trivial_gcat(base: FinCat, group: FiniteGroup | None = None) -> GCat:
    return GCat(group or trivial_group(), base)


# ---------------------------------------------------------------------------
# Grothendieck constructions


def grothendieck(gamma: GCat, op: bool = False) -> FinCat:
    """Total category of a strict G-category.

    Morphism ``(g, f)`` from ``x`` to ``y``: in the covariant form ``f`` goes
    ``g.x -> y`` and ``(g2, f2) o (g1, f1) = (g2 g1, f2 o g2(f1))``.  With
    ``op=True`` ``f`` goes ``y -> g.x`` and the composite is
    ``(g2 g1, g2(f1) o f2)``.
    """
    grp, base = gamma.group, gamma.base
    report = validate_gcat(gamma)
    if not report.ok:
        raise StructuralError(f"invalid G-category: {report.violations[0]}")
    mors, labels, index = [], [], {}
    for g in grp.elements:
        for f, (d, c) in enumerate(base.morphisms):
            if not op:
                # f : g.x -> y, so x = g^-1 . dom f
                x = gamma.obj_action[grp.inv(g)][d]
                y = c
            else:
                # f : y -> g.x
                x = gamma.obj_action[grp.inv(g)][c]
                y = d
            index[(g, f)] = len(mors)
            mors.append((x, y))
            labels.append((g, f))
    identity = [index[(grp.identity, base.identity[x])] for x in range(base.n_objects)]

    def composer(q, p):
        g1, f1 = labels[p]
        g2, f2 = labels[q]
        moved = gamma.mor_action[g2][f1]
        if not op:
            return index[(grp.mul(g2, g1), base.compose(f2, moved))]
        return index[(grp.mul(g2, g1), base.compose(moved, f2))]

    return FinCat(base.objects, mors, identity, composer, labels)


def grothendieck_projection(gamma: GCat, total: FinCat) -> Functor:
    """The projection of a Grothendieck construction onto the one-object groupoid."""
    gcat = gamma.group.as_category()
    return Functor(total, gcat, [0] * total.n_objects, [lab[0] for lab in total.mor_labels])


# ---------------------------------------------------------------------------
# chains


@dataclass(frozen=True)
class Chain:
    """A functor ``[m] -> C``: objects ``x_0..x_m`` and morphisms ``f_1..f_m``."""

    objects: tuple
    morphisms: tuple

    @property
    def length(self):
        return len(self.morphisms)

    def is_degenerate(self, c: FinCat):
        return any(c.is_identity(f) for f in self.morphisms)


def chain_restrict(c: FinCat, sigma: Chain, theta: Sequence[int]) -> Chain:
    """The composite ``sigma o theta`` for a monotone ``theta: [k] -> [m]``."""
    objs = tuple(sigma.objects[t] for t in theta)
    mors = []
    for a, b in zip(theta, theta[1:]):
        if a == b:
            mors.append(c.identity[sigma.objects[a]])
        else:
            mors.append(c.compose_path(sigma.morphisms[a:b]))
    return Chain(objs, tuple(mors))


def act_chain(gamma: GCat, g, sigma: Chain) -> Chain:
    return Chain(tuple(gamma.obj_action[g][x] for x in sigma.objects),
                 tuple(gamma.mor_action[g][f] for f in sigma.morphisms))


def enumerate_chains(c: FinCat, m: int) -> list:
    """All chains ``[m] -> C`` (identities allowed), in a deterministic order."""
    if m < 0:
        return []
    chains = [Chain((x,), ()) for x in range(c.n_objects)]
    by_dom = {}
    for f, (d, _) in enumerate(c.morphisms):
        by_dom.setdefault(d, []).append(f)
    for _ in range(m):
        nxt = []
        for s in chains:
            for f in by_dom.get(s.objects[-1], ()):
                nxt.append(Chain(s.objects + (c.cod(f),), s.morphisms + (f,)))
        chains = nxt
    return chains


def monotone_maps(k: int, m: int):
    """Weakly increasing maps ``[k] -> [m]`` as tuples."""
    return list(itertools.combinations_with_replacement(range(m + 1), k + 1))


def compose_monotone(theta2, theta1):
    return tuple(theta2[t] for t in theta1)


def simplex_category(c: FinCat, bound: int, keep=None) -> FinCat:
    """Truncated category of chains ``Delta | C``; objects are ``Chain`` labels.

    A morphism ``sigma' -> sigma`` is a monotone ``theta`` with ``sigma theta = sigma'``.
    ``keep`` optionally selects a full subcategory.
    """
    objs = []
    for m in range(bound + 1):
        for s in enumerate_chains(c, m):
            if keep is None or keep(s):
                objs.append(s)
    oid = {s: i for i, s in enumerate(objs)}
    mors, labels, index = [], [], {}
    for j, sigma in enumerate(objs):
        m = sigma.length
        for k in range(bound + 1):
            for theta in monotone_maps(k, m):
                src = chain_restrict(c, sigma, theta)
                i = oid.get(src)
                if i is None:
                    continue
                index[(i, j, theta)] = len(mors)
                mors.append((i, j))
                labels.append(theta)
    identity = [index[(i, i, tuple(range(s.length + 1)))] for i, s in enumerate(objs)]

    def composer(q, p):
        i = mors[p][0]
        j = mors[q][1]
        return index[(i, j, compose_monotone(labels[q], labels[p]))]

    return FinCat(objs, mors, identity, composer, labels)


def simplex_gcat(gamma: GCat, bound: int, keep=None) -> GCat:
    """The G-category of truncated chains, with G acting through ``gamma``."""
    cat = simplex_category(gamma.base, bound, keep)
    grp = gamma.group
    obj_action, mor_action = [], []
    for g in grp.elements:
        oa = [cat.object_id(act_chain(gamma, g, s)) for s in cat.objects]
        mindex = {}
        for m, (d, c) in enumerate(cat.morphisms):
            mindex[(d, c, cat.mor_labels[m])] = m
        ma = [mindex[(oa[d], oa[c], cat.mor_labels[m])] for m, (d, c) in enumerate(cat.morphisms)]
        obj_action.append(oa)
        mor_action.append(ma)
    return GCat(grp, cat, obj_action, mor_action)


@dataclass
class ChainData:
    """Truncated chain categories of a G-category and their structure maps."""

    gamma: GCat
    bound: int
    simplices: GCat          # d gamma, truncated
    nondegenerate: GCat      # bdc gamma
    total: FinCat            # bic gamma = Grothendieck construction of bdc gamma
    projection: Functor      # p_gamma : bic gamma -> one-object groupoid
    fibre_ordinal: list      # bfc gamma on objects: (a, sigma) -> m
    fibre_maps: list         # bfc gamma on morphisms: monotone map tuples
    counit: list             # epsilon_(a, sigma) = sigma

    def validate(self) -> ValidationReport:
        report = ValidationReport()
        for name, c in (("simplices", self.simplices.base), ("nondegenerate", self.nondegenerate.base),
                        ("total", self.total)):
            for v in validate_category(c).violations:
                report.add(name, str(v))
        report.extend(_check_fibre_functor(self))
        report.extend(_check_counit(self))
        report.extend(check_opfibration(self.projection, self.gamma.group))
        return report


def _bdc_keep(c: FinCat):
    def keep(s: Chain):
        if s.length == 0:
            return False
        return s.length == 1 or not any(c.is_identity(f) for f in s.morphisms)
    return keep


def chain_categories(gamma: GCat, dim_bound: int) -> ChainData:
    """Build ``d gamma``, ``bdc gamma``, ``bic gamma``, ``p_gamma``, ``bfc gamma`` and ``epsilon``."""
    if dim_bound < 1:
        raise ArgumentError("chain categories need a dimension bound >= 1")
    simplices = simplex_gcat(gamma, dim_bound)
    nondeg = simplex_gcat(gamma, dim_bound, keep=_bdc_keep(gamma.base))
    total = grothendieck(nondeg)
    proj = grothendieck_projection(nondeg, total)
    ordinals = [s.length for s in total.objects]
    maps = [nondeg.base.mor_labels[f] for (_, f) in total.mor_labels]
    return ChainData(gamma, dim_bound, simplices, nondeg, total, proj, ordinals, maps,
                     list(total.objects))


def _check_fibre_functor(data: ChainData) -> ValidationReport:
    report = ValidationReport()
    total = data.total
    for m, (d, c) in enumerate(total.morphisms):
        theta = data.fibre_maps[m]
        if len(theta) != data.fibre_ordinal[d] + 1 or any(t > data.fibre_ordinal[c] for t in theta):
            report.add("bfc", f"morphism {m} is not a map [{data.fibre_ordinal[d]}] -> [{data.fibre_ordinal[c]}]")
    for (g, f), h in total.composition_table().items():
        if compose_monotone(data.fibre_maps[g], data.fibre_maps[f]) != data.fibre_maps[h]:
            report.add("bfc", f"bfc does not preserve the composite {g} o {f}")
    return report


def _check_counit(data: ChainData) -> ValidationReport:
    """Naturality of epsilon: gamma(g) o sigma = tau o theta for every (g, theta): sigma -> tau."""
    report = ValidationReport()
    gamma, total = data.gamma, data.total
    for m, (d, c) in enumerate(total.morphisms):
        g, _ = total.mor_labels[m]
        sigma, tau = data.counit[d], data.counit[c]
        theta = data.fibre_maps[m]
        if act_chain(gamma, g, sigma) != chain_restrict(gamma.base, tau, theta):
            report.add("epsilon", f"counit is not natural along morphism {m}")
    return report


def check_opfibration(p: Functor, group: FiniteGroup) -> ValidationReport:
    """Exhaustively verify that every (object, base morphism) has a cocartesian lift."""
    report = ValidationReport()
    total = p.source
    outgoing = {}
    for m, (d, _) in enumerate(total.morphisms):
        outgoing.setdefault(d, []).append(m)
    for x in range(total.n_objects):
        for g in group.elements:
            lifts = [m for m in outgoing.get(x, ()) if p.mor_map[m] == g]
            found = False
            for lift in lifts:
                y = total.cod(lift)
                ok = True
                for phi in outgoing.get(x, ()):
                    need = p.mor_map[phi]
                    h = group.mul(need, group.inv(g))
                    z = total.cod(phi)
                    sols = [psi for psi in total.hom(y, z)
                            if p.mor_map[psi] == h and total.compose(psi, lift) == phi]
                    if len(sols) != 1:
                        ok = False
                        break
                if ok:
                    found = True
                    break
            if not found:
                report.add("opfibration", f"object {x} has no cocartesian lift of {g}")
    return report


# ---------------------------------------------------------------------------
# set-valued functors and left Kan extension


class SetFunctor:
    """A covariant functor ``C -> FinSet``.

    ``sizes[x]`` is the cardinality of the set at ``x`` (elements ``0..n-1``);
    ``maps[m]`` is a tuple giving the function of morphism ``m``.
    """

    def __init__(self, category: FinCat, sizes, maps, labels=None):
        self.category = category
        self.sizes = tuple(int(s) for s in sizes)
        self.maps = tuple(tuple(int(v) for v in row) for row in maps)
        self.labels = labels

    def validate(self) -> ValidationReport:
        report = ValidationReport()
        c = self.category
        for m, (d, cc) in enumerate(c.morphisms):
            row = self.maps[m]
            if len(row) != self.sizes[d] or any(not (0 <= v < self.sizes[cc]) for v in row):
                report.add("shape", f"map of morphism {m} is not a function X({d}) -> X({cc})")
        if not report.ok:
            return report
        for x in range(c.n_objects):
            if self.maps[c.identity[x]] != tuple(range(self.sizes[x])):
                report.add("identity", f"identity of {x} does not act as the identity")
        for (g, f), h in c.composition_table().items():
            if tuple(self.maps[g][v] for v in self.maps[f]) != self.maps[h]:
                report.add("composition", f"X({g} o {f}) != X({g}) X({f})")
        return report


def constant_set_functor(c: FinCat, size: int = 1) -> SetFunctor:
    return SetFunctor(c, [size] * c.n_objects, [tuple(range(size))] * c.n_morphisms)


@dataclass
class KanExtension:
    functor: SetFunctor
    representatives: list  # per target object, list of (d, u, e) class representatives
    class_of: Callable     # (c, d, u, e) -> class index at c


def left_kan_extension(x: SetFunctor, f: Functor) -> KanExtension:
    """Left Kan extension of a finite set-valued functor along ``f``.

    The value at ``c`` is the colimit over the comma category ``f | c``:
    triples ``(d, u: f(d) -> c, e in x(d))`` modulo
    ``(d, u o f(phi), e) ~ (d', u, x(phi)(e))``.
    """
    if f.source is not x.category:
        if f.source.n_objects != x.category.n_objects or f.source.n_morphisms != x.category.n_morphisms:
            raise StructuralError("functor source differs from the domain of the set functor")
    rep = f.validate()
    if not rep.ok:
        raise StructuralError(f"not a functor: {rep.violations[0]}")
    d1, d2 = f.source, f.target
    sizes, reps, lookups = [], [], []
    for c in range(d2.n_objects):
        elems = []
        index = {}
        for d in range(d1.n_objects):
            for u in d2.hom(f.obj_map[d], c):
                for e in range(x.sizes[d]):
                    index[(d, u, e)] = len(elems)
                    elems.append((d, u, e))
        uf = UnionFind(len(elems))
        for phi, (d, dp) in enumerate(d1.morphisms):
            fphi = f.mor_map[phi]
            xphi = x.maps[phi]
            for u in d2.hom(f.obj_map[dp], c):
                ufphi = d2.compose(u, fphi)
                for e in range(x.sizes[d]):
                    uf.union(index[(d, ufphi, e)], index[(dp, u, xphi[e])])
        roots = sorted({uf.find(i) for i in range(len(elems))})
        rindex = {r: k for k, r in enumerate(roots)}
        cls = {key: rindex[uf.find(i)] for key, i in index.items()}
        sizes.append(len(roots))
        reps.append([elems[r] for r in roots])
        lookups.append(cls)
    maps = []
    for v, (c, cp) in enumerate(d2.morphisms):
        row = []
        for (d, u, e) in reps[c]:
            row.append(lookups[cp][(d, d2.compose(v, u), e)])
        maps.append(tuple(row))
    ext = SetFunctor(d2, sizes, maps)

    def class_of(c, d, u, e):
        return lookups[c][(d, u, e)]

    return KanExtension(ext, reps, class_of)


def fibre_colimit_check(data: ChainData):
    """Compare ``Lan_p(bfc)`` with ``gamma`` on objects and on morphisms.

    Returns ``(objects_ok, morphisms_ok)``: each flag says the counit induces a
    G-equivariant bijection between the colimit and the base category.
    """
    gamma, total, p = data.gamma, data.total, data.projection
    base, grp = gamma.base, gamma.group
    ords = data.fibre_ordinal
    obj_x = SetFunctor(total, [m + 1 for m in ords], [tuple(data.fibre_maps[m]) for m in range(total.n_morphisms)])
    pairs = [[(i, j) for i in range(m + 1) for j in range(i, m + 1)] for m in ords]
    pair_index = [{pr: k for k, pr in enumerate(ps)} for ps in pairs]
    mor_maps = []
    for m, (d, c) in enumerate(total.morphisms):
        th = data.fibre_maps[m]
        mor_maps.append(tuple(pair_index[c][(th[i], th[j])] for (i, j) in pairs[d]))
    mor_x = SetFunctor(total, [len(ps) for ps in pairs], mor_maps)

    def verify(ext: KanExtension, target_size, evaluate, act):
        images = [evaluate(*r) for r in ext.representatives[0]]
        if sorted(images) != list(range(target_size)):
            return False
        fun = ext.functor
        for g in grp.elements:
            for k, img in enumerate(images):
                if images[fun.maps[g][k]] != act(g, img):
                    return False
        return True

    def eval_obj(d, u, e):
        return gamma.obj_action[u][data.counit[d].objects[e]]

    def eval_mor(d, u, e):
        i, j = pairs[d][e]
        sigma = data.counit[d]
        f = chain_restrict(base, sigma, (i, j)).morphisms[0]
        return gamma.mor_action[u][f]

    obj_ok = verify(left_kan_extension(obj_x, p), base.n_objects, eval_obj,
                    lambda g, x: gamma.obj_action[g][x])
    mor_ok = verify(left_kan_extension(mor_x, p), base.n_morphisms, eval_mor,
                    lambda g, m: gamma.mor_action[g][m])
    return obj_ok, mor_ok
