"""Subgroup families, the orbit category ``E_F``, the map ``f_X`` from subdivisions,
double cosets, monomial representation families and join multiplicities.

Group elements are integer ids of a ``FiniteGroup``; subgroups are
frozensets of ids.  Whenever a choice is needed (orbit representatives,
double coset representatives, coset representatives) the least id wins.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .errors import ArgumentError, IsotropyError, StructuralError
from .fincat import FinCat, FiniteGroup, GCat, Functor
from .shapes import GSimplicialSet, poset_nerve, sd_category, sd_objects, simplicial_from_action
from .util import check_capacity

# ---------------------------------------------------------------------------
# families


@dataclass
class SubgroupFamily:
    group: FiniteGroup
    subgroups: list

    def __post_init__(self):
        self.subgroups = sorted({frozenset(h) for h in self.subgroups}, key=lambda h: (len(h), sorted(h)))

    def __contains__(self, h):
        return frozenset(h) in self.subgroups

    def validate(self) -> list:
        g = self.group
        out = []
        for h in self.subgroups:
            if not g.is_subgroup(h):
                out.append(f"{sorted(h)} is not a subgroup")
                continue
            for x in g.elements:
                if g.conjugate(x, h) not in self:
                    out.append(f"conjugate of {sorted(h)} by {x} is missing")
                    break
        return out

    @property
    def subgroup_closed(self) -> bool:
        return all(k in self for h in self.subgroups for k in self.group.subgroups() if k <= h)


def all_subgroups_family(group: FiniteGroup) -> SubgroupFamily:
    return SubgroupFamily(group, group.subgroups())


def conjugacy_classes_of_subgroups(group: FiniteGroup) -> list:
    seen, out = set(), []
    for h in group.subgroups():
        if h in seen:
            continue
        cls = sorted({group.conjugate(x, h) for x in group.elements}, key=lambda s: (len(s), sorted(s)))
        seen.update(cls)
        out.append(cls)
    return out


def all_families(group: FiniteGroup) -> list:
    """Every nonempty conjugation-closed family (unions of conjugacy classes)."""
    classes = conjugacy_classes_of_subgroups(group)
    out = []
    for r in range(1, len(classes) + 1):
        for pick in itertools.combinations(classes, r):
            out.append(SubgroupFamily(group, [h for cls in pick for h in cls]))
    return out


# ---------------------------------------------------------------------------
# E_F


@dataclass
class EFCategory:
    gcat: GCat
    family: SubgroupFamily
    objects: list          # (H, coset) pairs

    def object_id(self, h, coset):
        return self._index[(frozenset(h), frozenset(coset))]

    def __post_init__(self):
        self._index = {o: i for i, o in enumerate(self.objects)}


def ef_hom_exists(group: FiniteGroup, h, x, k, y) -> bool:
    """Whether some ``G``-map ``G/H -> G/K`` sends ``xH`` to ``yK`` (``x``, ``y`` elements)."""
    c = group.mul(group.inv(x), y)
    return all(group.conj(group.inv(c), a) in k for a in h)


def build_EF(group: FiniteGroup, family: SubgroupFamily) -> EFCategory:
    """Objects ``(G/H, xH)``; at most one morphism between two objects."""
    bad = family.validate()
    if bad:
        raise StructuralError(f"family is not conjugation-closed: {bad[0]}")
    objects, reps = [], []
    for h in family.subgroups:
        for coset in group.left_cosets(h):
            objects.append((h, coset))
            reps.append(min(coset))
    check_capacity(len(objects) ** 2, "E_F morphisms")
    index = {o: i for i, o in enumerate(objects)}
    mors, labels, mid = [], [], {}
    for a, (h, _) in enumerate(objects):
        for b, (k, _) in enumerate(objects):
            if ef_hom_exists(group, h, reps[a], k, reps[b]):
                mid[(a, b)] = len(mors)
                mors.append((a, b))
                labels.append((a, b))
    identity = [mid[(a, a)] for a in range(len(objects))]

    def composer(q, p):
        return mid[(mors[p][0], mors[q][1])]

    base = FinCat([(sorted(h), sorted(c)) for h, c in objects], mors, identity, composer, labels)
    obj_action, mor_action = [], []
    for g in group.elements:
        oa = [index[(h, frozenset(group.mul(g, x) for x in c))] for h, c in objects]
        obj_action.append(oa)
        mor_action.append([mid[(oa[a], oa[b])] for a, b in mors])
    return EFCategory(GCat(group, base, obj_action, mor_action), family, objects)


def brute_force_gmaps(group: FiniteGroup, h, k) -> list:
    """Every ``G``-equivariant function ``G/H -> G/K``, by backtracking over cosets."""
    src = group.left_cosets(h)
    dst = group.left_cosets(k)
    where = {x: i for i, c in enumerate(src) for x in c}
    dwhere = {x: i for i, c in enumerate(dst) for x in c}
    act_src = [[where[group.mul(g, min(c))] for c in src] for g in group.elements]
    act_dst = [[dwhere[group.mul(g, min(c))] for c in dst] for g in group.elements]
    out = []
    assign = [None] * len(src)

    def consistent(i):
        for g in group.elements:
            j = act_src[g][i]
            if assign[j] is not None and assign[j] != act_dst[g][assign[i]]:
                return False
        return True

    def rec(i):
        if i == len(src):
            out.append(tuple(assign))
            return
        for v in range(len(dst)):
            assign[i] = v
            if consistent(i) and all(consistent(j) for j in range(i) if assign[j] is not None):
                rec(i + 1)
        assign[i] = None

    rec(0)
    return out


# ---------------------------------------------------------------------------
# isotropy and f_X


def g_poset_nerve(group: FiniteGroup, elements, leq, act, bound: int) -> GSimplicialSet:
    """Nerve of a poset with ``act(g, index) -> index`` acting by order automorphisms."""
    sset = poset_nerve(elements, leq, bound)
    action = []
    for g in group.elements:
        per = []
        for n in range(bound + 1):
            idx = {c: i for i, c in enumerate(sset.cells[n])}
            per.append([idx[tuple(act(g, v) for v in c)] for c in sset.cells[n]])
        action.append(per)
    return GSimplicialSet(group, sset, action)


def gset_simplicial(group: FiniteGroup, perms) -> GSimplicialSet:
    """A ``G``-set as a discrete simplicial set; ``perms[g]`` permutes the points."""
    size = len(perms[0])
    return g_poset_nerve(group, range(size), lambda a, b: a == b, lambda g, v: perms[g][v], 0)


def isotropy_check(x, family: SubgroupFamily) -> bool:
    """All cell stabilizers lie in the family.  ``x`` is a ``GSimplicialSet`` or a list of point permutations."""
    if not isinstance(x, GSimplicialSet):
        group = family.group
        points = range(len(x[0]))
        return all(frozenset(g for g in group.elements if x[g][p] == p) in family for p in points)
    for n in range(x.sset.bound + 1):
        for orbit in x.orbits(n):
            if x.stabilizer(n, orbit[0]) not in family:
                return False
    return True


@dataclass
class FXResult:
    functor: Functor
    sd: GCat
    ef: EFCategory
    representatives: list      # object ids of Sd X chosen per orbit
    images: list               # per Sd object: (H, coset)
    report: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.report


def f_X(x: GSimplicialSet, family: SubgroupFamily, ef: EFCategory | None = None, choose=min) -> FXResult:
    """Send each orbit representative to ``(G/G_x, G_x)`` and extend equivariantly.

    ``choose`` picks the representative from each orbit of object ids; the
    morphism images are then forced and the result is checked to be an
    equivariant functor.
    """
    group = family.group
    if x.group is not group and x.group.mult != group.mult:
        raise ArgumentError("simplicial set and family use different groups")
    if not isotropy_check(x, family):
        bad = next(x.stabilizer(n, c) for n in range(x.sset.bound + 1) for c in range(x.sset.size(n))
                   if x.stabilizer(n, c) not in family)
        raise IsotropyError(f"stabilizer {sorted(bad)} is not in the family")
    sd = sd_category(x)
    ef = ef or build_EF(group, family)
    objs = sd_objects(x)
    n_obj = len(objs)
    images = [None] * n_obj
    reps = []
    seen = set()
    for o in range(n_obj):
        if o in seen:
            continue
        orbit = sorted({sd.obj_action[g][o] for g in group.elements})
        seen.update(orbit)
        rep = choose(orbit)
        reps.append(rep)
        n, c = objs[rep]
        stab = x.stabilizer(n, c)
        for g in group.elements:
            target = sd.obj_action[g][rep]
            img = (stab, frozenset(group.mul(g, s) for s in stab))
            if images[target] is None:
                images[target] = img
            elif images[target] != img:
                raise StructuralError("equivariant extension is not well defined")
    obj_map = [ef.object_id(*img) for img in images]
    base = ef.gcat.base
    mor_map = []
    report = []
    for m in range(sd.base.n_morphisms):
        a, b = sd.base.dom(m), sd.base.cod(m)
        homs = base.hom(obj_map[a], obj_map[b])
        if len(homs) != 1:
            report.append(f"no morphism for Sd morphism {m} ({a} -> {b})")
            mor_map.append(None)
        else:
            mor_map.append(homs[0])
    fun = Functor(sd.base, base, obj_map, mor_map)
    if not report:
        rep = fun.validate()
        report.extend(str(v) for v in rep.violations)
        for g in group.elements:
            for o in range(n_obj):
                if obj_map[sd.obj_action[g][o]] != ef.gcat.obj_action[g][obj_map[o]]:
                    report.append(f"not equivariant at object {o} under {g}")
                    break
            for m in range(sd.base.n_morphisms):
                if mor_map[sd.mor_action[g][m]] != ef.gcat.mor_action[g][mor_map[m]]:
                    report.append(f"not equivariant at morphism {m} under {g}")
                    break
    return FXResult(fun, sd, ef, reps, images, report)


def fx_comparison(first: FXResult, second: FXResult) -> list:
    """Componentwise isomorphisms ``first(o) -> second(o)`` in ``E_F``; raises if one is missing."""
    base = first.ef.gcat.base
    out = []
    for o, (a, b) in enumerate(zip(first.functor.obj_map, second.functor.obj_map)):
        there, back = base.hom(a, b), base.hom(b, a)
        if len(there) != 1 or len(back) != 1:
            raise StructuralError(f"images of object {o} are not isomorphic")
        if base.compose(back[0], there[0]) != base.identity[a]:
            raise StructuralError(f"comparison at object {o} is not invertible")
        out.append(there[0])
    for m in range(first.sd.base.n_morphisms):
        s, t = first.sd.base.dom(m), first.sd.base.cod(m)
        lhs = base.compose(second.functor.mor_map[m], out[s])
        rhs = base.compose(out[t], first.functor.mor_map[m])
        if lhs != rhs:
            raise StructuralError(f"comparison is not natural at morphism {m}")
    return out


def ordered_complex(group: FiniteGroup, vertex_perms, simplices, bound: int | None = None) -> GSimplicialSet:
    """Ordered simplicial complex on vertices ``0..v-1`` with a vertex action.

    Each element must preserve the vertex order on every simplex; ``simplices``
    must be closed under faces and under the action.
    """
    faces = {frozenset(s) for s in simplices}
    top = max(len(s) for s in faces) - 1
    bound = top if bound is None else bound
    for s in faces:
        for g in group.elements:
            image = [vertex_perms[g][v] for v in sorted(s)]
            if frozenset(image) not in faces:
                raise StructuralError("simplices are not closed under the action")
            if image != sorted(image):
                raise StructuralError(f"element {g} does not preserve the vertex order on {sorted(s)}")
    levels = []
    for n in range(bound + 1):
        cells = [c for c in itertools.combinations_with_replacement(range(len(vertex_perms[0])), n + 1)
                 if frozenset(c) in faces]
        levels.append(cells)
        check_capacity(sum(len(lv) for lv in levels), "ordered complex")
    sset = simplicial_from_action(levels, lambda c, th: tuple(c[t] for t in th))
    action = []
    for g in group.elements:
        action.append([[sset.index(n, tuple(vertex_perms[g][v] for v in c)) for c in sset.cells[n]]
                       for n in range(bound + 1)])
    return GSimplicialSet(group, sset, action)


def face_poset_complex(group: FiniteGroup, vertex_perms, simplices) -> GSimplicialSet:
    """Nerve of the face poset of a ``G``-simplicial complex (its barycentric subdivision).

    ``simplices`` must be closed under the action and under taking nonempty faces.
    """
    faces = sorted({frozenset(s) for s in simplices}, key=lambda s: (len(s), sorted(s)))
    index = {s: i for i, s in enumerate(faces)}
    for s in faces:
        for g in group.elements:
            if frozenset(vertex_perms[g][v] for v in s) not in index:
                raise StructuralError("simplices are not closed under the action")
        for r in range(1, len(s)):
            for sub in itertools.combinations(sorted(s), r):
                if frozenset(sub) not in index:
                    raise StructuralError("simplices are not closed under faces")
    dim = max(len(s) for s in faces) - 1
    return g_poset_nerve(group, faces, lambda a, b: a <= b,
                         lambda g, i: index[frozenset(vertex_perms[g][v] for v in faces[i])], dim)


# ---------------------------------------------------------------------------
# double cosets


@dataclass
class DoubleCosetDecomp:
    h: frozenset
    k: frozenset
    normalizer: frozenset      # N_G(H, K) = {g : g H g^-1 <= K}
    reps: list                 # g_i, least element of each K g_i H
    cosets: list               # per i: list of t_ij with t_ij g_i least in its coset t_ij g_i H
    blocks: list               # per i: the double coset K g_i H

    def factor(self, group: FiniteGroup, g):
        """``(i, j, h)`` with ``g = t_ij g_i h``."""
        for i, block in enumerate(self.blocks):
            if g in block:
                x = min(group.mul(g, a) for a in self.h)
                t = group.mul(x, group.inv(self.reps[i]))
                j = self.cosets[i].index(t)
                return i, j, group.mul(group.inv(x), g)
        raise ArgumentError(f"element {g} is not in N_G(H, K)")


def double_cosets(group: FiniteGroup, h, k) -> DoubleCosetDecomp:
    h, k = frozenset(h), frozenset(k)
    if not group.is_subgroup(h) or not group.is_subgroup(k):
        raise ArgumentError("H and K must be subgroups")
    norm = frozenset(g for g in group.elements if group.conjugate(g, h) <= k)
    reps, cosets, blocks = [], [], []
    left = set(norm)
    while left:
        gi = min(left)
        block = frozenset(group.product(a, gi, b) for a in k for b in h)
        left -= block
        reps.append(gi)
        blocks.append(block)
        ts = []
        seen = set()
        for x in sorted(block):
            if x in seen:
                continue
            coset = {group.mul(x, b) for b in h}
            seen |= coset
            ts.append(group.mul(min(coset), group.inv(gi)))
        cosets.append(ts)
    return DoubleCosetDecomp(h, k, norm, reps, cosets, blocks)


def check_decomposition(group: FiniteGroup, d: DoubleCosetDecomp) -> list:
    out = []
    union = set()
    for i, block in enumerate(d.blocks):
        if union & block:
            out.append(f"double coset {i} overlaps an earlier one")
        union |= block
        inner = set()
        for t in d.cosets[i]:
            if t not in d.k:
                out.append(f"t_{i} = {t} is not in K")
            c = {group.product(t, d.reps[i], b) for b in d.h}
            if inner & c:
                out.append(f"cosets inside double coset {i} overlap")
            inner |= c
        if inner != set(block):
            out.append(f"cosets do not cover double coset {i}")
    if union != set(d.normalizer):
        out.append("double cosets do not cover N_G(H, K)")
    return out


# ---------------------------------------------------------------------------
# monomial representations over Z[zeta_N]


@dataclass(frozen=True)
class Monomial:
    """``M e_i = zeta^(exps[i]) e_(perm[i])`` with ``zeta = exp(2 pi i / N)``."""
    perm: tuple
    exps: tuple
    modulus: int

    def __post_init__(self):
        object.__setattr__(self, "perm", tuple(int(p) for p in self.perm))
        object.__setattr__(self, "exps", tuple(int(e) % self.modulus for e in self.exps))
        if sorted(self.perm) != list(range(len(self.perm))) or len(self.exps) != len(self.perm):
            raise ArgumentError("monomial matrix needs a permutation and one exponent per column")

    @property
    def dim(self):
        return len(self.perm)

    def __mul__(self, other: "Monomial") -> "Monomial":
        if self.modulus != other.modulus or self.dim != other.dim:
            raise ArgumentError("incompatible monomial matrices")
        perm = tuple(self.perm[other.perm[i]] for i in range(self.dim))
        exps = tuple(other.exps[i] + self.exps[other.perm[i]] for i in range(self.dim))
        return Monomial(perm, exps, self.modulus)

    def inverse(self) -> "Monomial":
        perm = [0] * self.dim
        exps = [0] * self.dim
        for i, p in enumerate(self.perm):
            perm[p] = i
            exps[p] = -self.exps[i]
        return Monomial(tuple(perm), tuple(exps), self.modulus)

    def trace(self) -> tuple:
        """The trace as coefficients of ``1, zeta, ..., zeta^(N-1)``."""
        out = [0] * self.modulus
        for i, p in enumerate(self.perm):
            if p == i:
                out[self.exps[i]] += 1
        return tuple(out)

    def dense(self):
        """Entries as exponents (``None`` for zero entries)."""
        rows = [[None] * self.dim for _ in range(self.dim)]
        for i, p in enumerate(self.perm):
            rows[p][i] = self.exps[i]
        return rows


def monomial_identity(dim, modulus):
    return Monomial(tuple(range(dim)), (0,) * dim, modulus)


def cyclotomic_polynomial(n: int) -> list:
    """Integer coefficients of ``Phi_n``, lowest degree first."""
    if n < 1:
        raise ArgumentError("cyclotomic index must be positive")
    poly = [-1] + [0] * (n - 1) + [1]           # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_div_exact(poly, cyclotomic_polynomial(d))
    return poly


def _poly_div_exact(num, den):
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        q = num[i + len(den) - 1] // den[-1]
        out[i] = q
        for j, c in enumerate(den):
            num[i + j] -= q * c
    if any(num):
        raise ArithmeticError("division left a remainder")
    return out


def reduce_cyclotomic(coeffs, modulus: int) -> tuple:
    """Canonical form of ``sum c_j zeta^j`` in ``Z[zeta_N]`` (remainder mod ``Phi_N``)."""
    phi = cyclotomic_polynomial(modulus)
    deg = len(phi) - 1
    rem = list(coeffs) + [0] * max(0, deg - len(coeffs))
    for i in range(len(rem) - 1, deg - 1, -1):
        q = rem[i]
        if q:
            for j, c in enumerate(phi):
                rem[i - deg + j] -= q * c
    return tuple(rem[:deg])


@dataclass
class RepFamily:
    dim: int
    modulus: int
    reps: dict               # subgroup (frozenset) -> {element: Monomial}

    def __post_init__(self):
        self.reps = {frozenset(h): dict(v) for h, v in self.reps.items()}

    def validate(self, group: FiniteGroup) -> list:
        out = []
        for h, alpha in self.reps.items():
            if set(alpha) != set(h):
                out.append(f"representation of {sorted(h)} is not defined on every element")
                continue
            for a in h:
                if alpha[a].dim != self.dim or alpha[a].modulus != self.modulus:
                    out.append(f"matrix of {a} has the wrong size or modulus")
            for a, b in itertools.product(sorted(h), repeat=2):
                if alpha[a] * alpha[b] != alpha[group.mul(a, b)]:
                    out.append(f"representation of {sorted(h)} is not a homomorphism at ({a}, {b})")
                    break
        return out

    def character(self, h, element) -> tuple:
        return reduce_cyclotomic(self.reps[frozenset(h)][element].trace(), self.modulus)


def trivial_family(family: SubgroupFamily, dim: int, modulus: int) -> RepFamily:
    one = monomial_identity(dim, modulus)
    return RepFamily(dim, modulus, {h: {a: one for a in h} for h in family.subgroups})


@dataclass
class CompatibilityReport:
    compatible: bool
    witness: tuple | None = None      # (H, K, g, h) where characters differ


def compatible_check(reps: RepFamily, family: SubgroupFamily) -> CompatibilityReport:
    """For each conjugation ``c_g: H -> K`` inside the family, compare the characters of
    ``alpha_K o c_g`` and ``alpha_H`` exactly."""
    group = family.group
    missing = [h for h in family.subgroups if h not in reps.reps]
    if missing:
        raise ArgumentError(f"no representation for {sorted(missing[0])}")
    exponent = 1
    for h in family.subgroups:
        for a in h:
            exponent = math.lcm(exponent, group.element_order(a))
    if reps.modulus < 1 or reps.modulus % exponent:
        raise ArgumentError(f"modulus {reps.modulus} is not a multiple of the element orders ({exponent})")
    bad = reps.validate(group)
    if bad:
        raise StructuralError(bad[0])
    for h in family.subgroups:
        for k in family.subgroups:
            for g in group.elements:
                if not group.conjugate(g, h) <= k:
                    continue
                for a in sorted(h):
                    if reps.character(k, group.conj(g, a)) != reps.character(h, a):
                        return CompatibilityReport(False, (sorted(h), sorted(k), g, a))
    return CompatibilityReport(True)


def conjugate_family(reps: RepFamily, changes: dict) -> RepFamily:
    """Replace ``alpha_H`` by ``P alpha_H P^-1`` for the monomial ``P = changes[H]``."""
    out = {}
    for h, alpha in reps.reps.items():
        p = changes.get(h)
        out[h] = {a: (p * m * p.inverse()) if p else m for a, m in alpha.items()}
    return RepFamily(reps.dim, reps.modulus, out)


def check_intertwiner(group, h, k, g, gamma: Monomial, reps: RepFamily) -> bool:
    """``gamma alpha_H(a) gamma^-1 = alpha_K(g a g^-1)`` for every ``a`` in ``H``."""
    ah, ak = reps.reps[frozenset(h)], reps.reps[frozenset(k)]
    inv = gamma.inverse()
    return all(gamma * ah[a] * inv == ak[group.conj(g, a)] for a in h)


def gamma_g(group: FiniteGroup, g, h, k, decomp: DoubleCosetDecomp, reps: RepFamily, intertwiners) -> Monomial:
    """``alpha_K(t_ij) gamma_i alpha_H(h)`` for ``g = t_ij g_i h``."""
    h, k = frozenset(h), frozenset(k)
    if g not in decomp.normalizer:
        raise ArgumentError(f"element {g} is not in N_G(H, K)")
    for i, gi in enumerate(decomp.reps):
        if not check_intertwiner(group, h, k, gi, intertwiners[i], reps):
            raise StructuralError(f"gamma_{i} does not intertwine alpha_H with alpha_K o c_(g_{i})")
    i, j, hh = decomp.factor(group, g)
    t = decomp.cosets[i][j]
    return reps.reps[k][t] * intertwiners[i] * reps.reps[h][hh]


def find_intertwiner(group, h, k, g, reps: RepFamily):
    """Some monomial ``gamma`` with ``gamma alpha_H gamma^-1 = alpha_K o c_g`` (exhaustive search), or ``None``."""
    m, n = reps.dim, reps.modulus
    check_capacity(math.factorial(m) * n ** m, "monomial intertwiner search")
    for perm in itertools.permutations(range(m)):
        for exps in itertools.product(range(n), repeat=m):
            cand = Monomial(perm, exps, n)
            if check_intertwiner(group, h, k, g, cand, reps):
                return cand
    return None


@dataclass
class CoherenceReport:
    direct: Monomial            # gamma_(y^-1 x)(H, K)
    composite: Monomial         # gamma_(y^-1 z)(L, K) gamma_(z^-1 x)(H, L)
    correction: Monomial        # composite^-1 direct
    commutes: bool              # correction centralizes alpha_H(H)


def gamma_coherence(group, h, l, k, a, b, reps: RepFamily, intertwiners: dict) -> CoherenceReport:
    """Compare ``gamma_(ba)(H,K)`` with ``gamma_b(L,K) gamma_a(H,L)``.

    ``intertwiners[(H, K)]`` lists the ``gamma_i`` for that pair.  Both sides
    intertwine ``alpha_H`` with ``alpha_K o c_(ba)``, so their ratio must
    commute with ``alpha_H``.
    """
    h, l, k = frozenset(h), frozenset(l), frozenset(k)
    d_hl, d_lk, d_hk = double_cosets(group, h, l), double_cosets(group, l, k), double_cosets(group, h, k)
    first = gamma_g(group, a, h, l, d_hl, reps, intertwiners[(h, l)])
    second = gamma_g(group, b, l, k, d_lk, reps, intertwiners[(l, k)])
    direct = gamma_g(group, group.mul(b, a), h, k, d_hk, reps, intertwiners[(h, k)])
    composite = second * first
    corr = composite.inverse() * direct
    ah = reps.reps[h]
    commutes = all(corr * ah[x] == ah[x] * corr for x in h)
    return CoherenceReport(direct, composite, corr, commutes)


# ---------------------------------------------------------------------------
# join multiplicities


def join_multiplicity_plan(bounds: dict, n: int | None = None) -> list:
    """``t_1 = 1`` and ``t_n = prod_(r<n) prod_(H,x) t_r^(H,x) * M_r^(H,x)!``.

    ``bounds[(H, x)]`` lists ``(t_r, M_r)`` for ``r = 1, 2, ...``.
    """
    if not bounds:
        raise ArgumentError("no bounds given")
    longest = min(len(v) for v in bounds.values())
    n = longest + 1 if n is None else n
    if n < 1 or n - 1 > longest:
        raise ArgumentError(f"bounds cover r < {longest + 1} only")
    for key, seq in bounds.items():
        for t, m in seq:
            if int(t) < 1 or int(m) < 1:
                raise ArgumentError(f"bounds for {key} must be positive integers")
    out = [1]
    for top in range(2, n + 1):
        acc = 1
        for r in range(top - 1):
            for key in sorted(bounds, key=repr):
                t, m = bounds[key][r]
                acc *= int(t) * math.factorial(int(m))
        out.append(acc)
    return out


# ---------------------------------------------------------------------------
# pullback index data


@dataclass(frozen=True)
class IndexSummand:
    level: int
    objects: tuple          # object chain alpha_0 .. alpha_l of Sd X
    hom_counts: tuple       # nondegenerate counts of T sk_n W(alpha_(i-1), alpha_i), per factor
    label: object           # F-value at f_X(alpha_0)


@dataclass
class PullbackIndex:
    summands: list          # per bar level
    faces: list             # faces[l][i][s] -> summand index at level l-1
    degens: list            # degens[l][i][s] -> summand index at level l+1

    def counts(self):
        return [len(lv) for lv in self.summands]


def pullback_index(x: GSimplicialSet, family: SubgroupFamily, fx: FXResult, labels, n: int, levels: int = 2) -> PullbackIndex:
    """Summands of ``B(*, T sk_n W Sd X, f^* F)`` for bar levels ``0..levels``.

    ``labels`` maps objects of ``E_F`` (ids) to the value of ``F`` there, or is
    a single value for a constant diagram.
    """
    from .resolutions import enriched_skeleton, w_complex

    sd = fx.sd.base
    w = enriched_skeleton(w_complex(sd), n)
    counts = {}

    def hom_counts(a, b):
        if (a, b) not in counts:
            if a != b and not sd.hom(a, b) and not _reachable(sd, a, b):
                counts[(a, b)] = None
            else:
                tri = w.triangulated(a, b)
                c = tuple(tri.nondegenerate_counts())
                counts[(a, b)] = c if any(c) else None
        return counts[(a, b)]

    def label_at(obj):
        if isinstance(labels, dict):
            return labels[fx.functor.obj_map[obj]]
        return labels

    summands, index = [], []
    for lv in range(levels + 1):
        row = []
        stack = [(o,) for o in range(sd.n_objects)]
        while stack:
            chain = stack.pop()
            if len(chain) == lv + 1:
                row.append(chain)
                continue
            for b in range(sd.n_objects):
                if hom_counts(chain[-1], b) is not None:
                    stack.append(chain + (b,))
            check_capacity(len(row) + len(stack), f"bar level {lv}")
        row.sort()
        summands.append([IndexSummand(lv, ch, tuple(hom_counts(a, b) for a, b in zip(ch, ch[1:])), label_at(ch[0]))
                         for ch in row])
        index.append({ch: i for i, ch in enumerate(row)})
    faces = [[]]
    for lv in range(1, levels + 1):
        faces.append([[index[lv - 1][s.objects[:i] + s.objects[i + 1:]] for s in summands[lv]]
                      for i in range(lv + 1)])
    degens = [[[index[lv + 1][s.objects[:i + 1] + s.objects[i:]] for s in summands[lv]]
               for i in range(lv + 1)] for lv in range(levels)]
    return PullbackIndex(summands, faces, degens)


def _reachable(c: FinCat, a, b):
    return any(c.cod(f) == b for f in c.out_of(a))
