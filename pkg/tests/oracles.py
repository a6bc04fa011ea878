"""Independent reference computations used by the test suite.

Nothing here calls into the code under test except to read plain data
(group tables, category endpoints), so agreement is meaningful.
"""

import cmath
import itertools
import math
import random
from fractions import Fraction

from cohera import bredon
from cohera.equivariant import Monomial, RepFamily
from cohera.fincat import FinCat, GCat, cyclic_group, dihedral_group, direct_product, symmetric_group, trivial_group


# -- integer linear algebra ---------------------------------------------------

def det_bareiss(a):
    n = len(a)
    if n == 0:
        return 1
    m = [list(r) for r in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def invariant_factors_by_minors(a):
    """Nonzero invariant factors from gcds of k x k minors."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    divisors = [1]
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in itertools.combinations(range(rows), k):
            for cs in itertools.combinations(range(cols), k):
                g = math.gcd(g, det_bareiss([[a[i][j] for j in cs] for i in rs]))
        if g == 0:
            break
        divisors.append(g)
    return [divisors[i] // divisors[i - 1] for i in range(1, len(divisors))]


def invariant_factors_by_reduction(a):
    """Textbook reduction: first nonzero pivot, Euclid by row/column swaps."""
    d = [list(r) for r in a]
    rows = len(d)
    cols = len(d[0]) if rows else 0
    out = []
    t = 0
    while t < min(rows, cols):
        pos = next(((i, j) for i in range(t, rows) for j in range(t, cols) if d[i][j]), None)
        if pos is None:
            break
        i, j = pos
        d[t], d[i] = d[i], d[t]
        for r in d:
            r[t], r[j] = r[j], r[t]
        while True:
            for i in range(t + 1, rows):
                while d[i][t]:
                    if d[i][t] % d[t][t] == 0:
                        q = d[i][t] // d[t][t]
                        d[i] = [x - q * y for x, y in zip(d[i], d[t])]
                        continue
                    q = d[t][t] // d[i][t]
                    d[t] = [x - q * y for x, y in zip(d[t], d[i])]
                    d[t], d[i] = d[i], d[t]
            for j in range(t + 1, cols):
                while d[t][j]:
                    if d[t][j] % d[t][t] == 0:
                        q = d[t][j] // d[t][t]
                        for r in d:
                            r[j] -= q * r[t]
                        continue
                    q = d[t][t] // d[t][j]
                    for r in d:
                        r[t] -= q * r[j]
                    for r in d:
                        r[t], r[j] = r[j], r[t]
            if any(d[i][t] for i in range(t + 1, rows)):
                continue
            bad = next((i for i in range(t + 1, rows) for j in range(t + 1, cols) if d[i][j] % d[t][t]), None)
            if bad is None:
                break
            d[t] = [x + y for x, y in zip(d[t], d[bad])]
        out.append(abs(d[t][t]))
        t += 1
    return out


def rational_rank(a):
    m = [[Fraction(x) for x in r] for r in a]
    rank = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c]:
                f = m[i][c] / m[rank][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


def random_matrix(rng, rows, cols, spread=6):
    return [[rng.randint(-spread, spread) for _ in range(cols)] for _ in range(rows)]


def lattice_search(delta, target, modulus):
    """Whether ``delta g = target`` has a solution over Z/modulus, by meet in the middle
    over every vector of unknowns."""
    rows = len(target)
    cols = len(delta[0]) if delta and delta[0] else 0
    tgt = tuple(x % modulus for x in target)
    if cols == 0:
        return not any(tgt)
    half = cols // 2
    left, right = range(half), range(half, cols)

    def image(idx, g):
        return tuple(sum(delta[r][c] * x for c, x in zip(idx, g)) % modulus for r in range(rows))

    seen = {image(left, g) for g in itertools.product(range(modulus), repeat=len(left))}
    for g in itertools.product(range(modulus), repeat=len(right)):
        v = image(right, g)
        if tuple((a - b) % modulus for a, b in zip(tgt, v)) in seen:
            return True
    return False


# -- groups, G-sets and shapes --------------------------------------------------

SMALL_GROUPS = [
    ("trivial", trivial_group),
    ("Z2", lambda: cyclic_group(2)),
    ("Z3", lambda: cyclic_group(3)),
    ("Z4", lambda: cyclic_group(4)),
    ("Z2xZ2", lambda: direct_product(cyclic_group(2), cyclic_group(2))),
    ("S3", lambda: symmetric_group(3)),
    ("D4", lambda: dihedral_group(4)),
    ("Z2xZ4", lambda: direct_product(cyclic_group(2), cyclic_group(4))),
]


def coset_action(group, h):
    """Permutations of G/H (cosets indexed by position in sorted order)."""
    cosets = sorted({frozenset(group.mul(x, a) for a in h) for x in group.elements}, key=sorted)
    where = {x: i for i, c in enumerate(cosets) for x in c}
    return cosets, [[where[group.mul(g, min(c))] for c in cosets] for g in group.elements]


def equivariant_functions(group, src_perms, dst_perms):
    """Every f with f(g x) = g f(x), by constraint search over all functions."""
    n_src = len(src_perms[0])
    n_dst = len(dst_perms[0])
    out = []
    f = [None] * n_src

    def ok():
        for g in group.elements:
            for x in range(n_src):
                y = src_perms[g][x]
                if f[x] is not None and f[y] is not None and f[y] != dst_perms[g][f[x]]:
                    return False
        return True

    def rec(x):
        if x == n_src:
            out.append(tuple(f))
            return
        for v in range(n_dst):
            f[x] = v
            if ok():
                rec(x + 1)
        f[x] = None

    rec(0)
    return out


def sign_character(group):
    """A homomorphism to {+1, -1}: the first nontrivial one found, else trivial."""
    elems = list(group.elements)
    for values in itertools.product((1, -1), repeat=len(elems)):
        if values[group.identity] != 1 or all(v == 1 for v in values):
            continue
        if all(values[group.mul(a, b)] == values[a] * values[b] for a in elems for b in elems):
            return list(values)
    return [1] * len(elems)


# -- random coefficient systems ------------------------------------------------

def copies_of_ordinal(group, h, length):
    """The G-category G/H x [length]: G permutes the copies, each copy is an ordinal."""
    cosets, perms = coset_action(group, h)
    objects = [(c, i) for c in range(len(cosets)) for i in range(length + 1)]
    oid = {o: k for k, o in enumerate(objects)}
    mors, mid = [], {}
    for c in range(len(cosets)):
        for i in range(length + 1):
            for j in range(i, length + 1):
                mid[(c, i, j)] = len(mors)
                mors.append((oid[(c, i)], oid[(c, j)]))
    identity = [mid[(c, i, i)] for c, i in objects]
    labels = list(mid)

    def compose(g, f):
        c, i, _ = labels[f]
        _, _, k = labels[g]
        return mid[(c, i, k)]

    base = FinCat(objects, mors, identity, compose, labels)
    obj_action = [[oid[(perms[g][c], i)] for c, i in objects] for g in group.elements]
    mor_action = [[mid[(perms[g][c], i, j)] for c, i, j in labels] for g in group.elements]
    return GCat(group, base, obj_action, mor_action)


def random_coefficient_system(seed, bound=4):
    """A seeded coefficient system on G/H x [m] with values pulled back from the last vertex.

    The value at a chain is A(last object) for a functor A: [m] -> Ab built
    from random integer matrices (optionally mod n), twisted by a sign
    character of G.
    """
    rng = random.Random(seed)
    name, make = SMALL_GROUPS[rng.randrange(len(SMALL_GROUPS))]
    group = make()
    subgroups = group.subgroups()
    h = subgroups[rng.randrange(len(subgroups))]
    length = rng.randint(0, 2)
    gamma = copies_of_ordinal(group, h, length)
    base = gamma.base
    ranks = [rng.randint(1, 2) for _ in range(length + 1)]
    torsion = rng.choice([0, 0, 2, 3, 4])
    steps = [random_matrix(rng, ranks[i + 1], ranks[i], 3) for i in range(length)]

    def along(i, j):
        m = bredon.identity_matrix(ranks[i])
        for s in range(i, j):
            m = bredon.mat_mul(steps[s], m)
        return m

    groups = [bredon.FGAbelian(r, tuple(tuple(torsion * (a == b) for a in range(r)) for b in range(r))
                               if torsion else ()) for r in ranks]
    chi = sign_character(group) if rng.random() < 0.5 else [1] * group.order

    def level(x):
        return base.objects[x][1]

    def value(sigma):
        return groups[level(sigma.objects[-1])]

    def face(tau, i):
        n = len(tau.morphisms)
        last = level(tau.objects[-1])
        if i < n:
            return bredon.identity_matrix(ranks[last])
        return along(level(tau.objects[-2]), last)

    def action(g, sigma):
        r = ranks[level(sigma.objects[-1])]
        return [[chi[g] * (a == b) for b in range(r)] for a in range(r)]

    coeff = bredon.CoefficientSystem(gamma, bound, value, face, action)
    return gamma, coeff, f"{name} H={sorted(h)} m={length} ranks={ranks} torsion={torsion}"


# -- characters in floating point ---------------------------------------------

def complex_character(monomial):
    zeta = cmath.exp(2j * cmath.pi / monomial.modulus)
    return sum(zeta ** e for i, (p, e) in enumerate(zip(monomial.perm, monomial.exps)) if p == i)


def float_compatible(group, family, reps):
    for h in family.subgroups:
        for k in family.subgroups:
            for g in group.elements:
                if not all(group.mul(group.mul(g, a), group.inv(g)) in k for a in h):
                    continue
                for a in h:
                    lhs = complex_character(reps.reps[k][group.mul(group.mul(g, a), group.inv(g))])
                    rhs = complex_character(reps.reps[h][a])
                    if abs(lhs - rhs) > 1e-9:
                        return False
    return True


def homomorphisms_to_roots(group, h, modulus):
    """Every homomorphism H -> Z/modulus, as dicts, by extending from generators."""
    h = sorted(h)
    gens = []
    span = {group.identity}
    for a in h:
        if a not in span:
            gens.append(a)
            span = set(group.generated(gens))
    out = []
    for images in itertools.product(range(modulus), repeat=len(gens)):
        val = {group.identity: 0}
        frontier = [group.identity]
        good = True
        while frontier and good:
            x = frontier.pop()
            for gen, im in zip(gens, images):
                y = group.mul(x, gen)
                v = (val[x] + im) % modulus
                if y in val:
                    if val[y] != v:
                        good = False
                        break
                else:
                    val[y] = v
                    frontier.append(y)
        if good and all(val[group.mul(a, b)] == (val[a] + val[b]) % modulus for a in h for b in h):
            out.append(val)
    return out


# -- random G-simplicial complexes ----------------------------------------------

def random_g_complex(seed, groups=("Z2", "Z3", "Z4", "Z2xZ2", "S3")):
    """Vertices are orbits G/H_l placed at levels l; simplices use at most one vertex per
    level, so every element preserves the vertex order.  Returns (group, perms, simplices)."""
    rng = random.Random(seed)
    table = dict(SMALL_GROUPS)
    name = groups[rng.randrange(len(groups))]
    group = table[name]()
    subgroups = group.subgroups()
    levels = rng.randint(1, 3)
    blocks, perms = [], [[] for _ in group.elements]
    offset = 0
    for _ in range(levels):
        h = subgroups[rng.randrange(len(subgroups))]
        cosets, act = coset_action(group, h)
        blocks.append(range(offset, offset + len(cosets)))
        for g in group.elements:
            perms[g].extend(offset + p for p in act[g])
        offset += len(cosets)
    simplices = set()
    for _ in range(rng.randint(1, 3)):
        chosen = [rng.choice(list(b)) for b in blocks if rng.random() < 0.8]
        if not chosen:
            chosen = [rng.choice(list(blocks[0]))]
        for g in group.elements:
            top = sorted(perms[g][v] for v in chosen)
            for r in range(1, len(top) + 1):
                simplices.update(itertools.combinations(top, r))
    for b in blocks:
        for v in b:
            simplices.add((v,))
    return group, perms, sorted(simplices)


# -- coordinates on the classifying simplex ----------------------------------------

def direct_h(n, r, gaps, t):
    """Coordinate formula written out case by case, independent of the library."""
    i = len(r) - 1

    def spread(k_lo, k_hi):
        vals = [min(t[p], t[s]) for p in range(0, k_lo + 1) for s in range(k_hi, i + 1)]
        return max(vals, default=Fraction(0))

    a = []
    for u in range(n + 1):
        if u < r[0] or u > r[-1]:
            a.append(Fraction(0))
        elif u in r:
            k = r.index(u)
            a.append(max(t[k], spread(k - 1, k + 1)) if 0 < k < i else t[k])
        else:
            k = max(q for q in range(i + 1) if r[q] < u)
            a.append(gaps[k][u - r[k] - 1] * spread(k, k + 1))
    s = sum(a)
    return tuple(x / s for x in a)


def regions_by_reconstruction(b):
    """Every vertex set r for which some point with that r maps to ``b``.

    For each r a candidate preimage is rebuilt from ``b`` (weights on r, gap
    ratios against the spread) and pushed through ``direct_h``.
    """
    n = len(b) - 1
    found = []
    for size in range(1, n + 2):
        for r in itertools.combinations(range(n + 1), size):
            total = sum(b[v] for v in r)
            if total == 0:
                continue
            t = tuple(b[v] / total for v in r)
            gaps, ok = [], True
            for k in range(size - 1):
                spread = max(min(t[p], t[s]) for p in range(k + 1) for s in range(k + 1, size))
                row = []
                for u in range(r[k] + 1, r[k + 1]):
                    if spread == 0:
                        ok = ok and b[u] == 0
                        row.append(Fraction(0))
                    else:
                        row.append(b[u] / total / spread)
                ok = ok and all(0 <= g <= 1 for g in row)
                gaps.append(tuple(row))
            if ok and direct_h(n, r, tuple(gaps), t) == tuple(b):
                found.append(r)
    return found


# -- functors into E_F and rank-one representation families -------------------------

def equivariant_functor_problems(result):
    """Everything wrong with ``result.functor`` as an equivariant functor Sd X -> E_F,
    checked directly on the composition and action tables."""
    sd, target = result.sd, result.ef.gcat
    src, dst = sd.base, target.base
    fun = result.functor
    out = []
    for m in range(src.n_morphisms):
        f = fun.mor_map[m]
        if f is None or dst.dom(f) != fun.obj_map[src.dom(m)] or dst.cod(f) != fun.obj_map[src.cod(m)]:
            out.append(f"morphism {m} lands on the wrong endpoints")
    if out:
        return out
    for o in range(src.n_objects):
        if fun.mor_map[src.identity[o]] != dst.identity[fun.obj_map[o]]:
            out.append(f"identity of {o} not preserved")
    for p in range(src.n_morphisms):
        for q in src.out_of(src.cod(p)):
            if fun.mor_map[src.compose(q, p)] != dst.compose(fun.mor_map[q], fun.mor_map[p]):
                out.append(f"composite {q} o {p} not preserved")
    for g in sd.group.elements:
        for o in range(src.n_objects):
            if fun.obj_map[sd.obj_action[g][o]] != target.obj_action[g][fun.obj_map[o]]:
                out.append(f"object {o} not equivariant under {g}")
        for m in range(src.n_morphisms):
            if fun.mor_map[sd.mor_action[g][m]] != target.mor_action[g][fun.mor_map[m]]:
                out.append(f"morphism {m} not equivariant under {g}")
    return out


def character_families(group, family, modulus, limit=40):
    """Rank-one families from every choice of homomorphism per subgroup, truncated."""
    options = [[(h, v) for v in homomorphisms_to_roots(group, h, modulus)] for h in family.subgroups]
    out = []
    for pick in itertools.product(*options):
        out.append(RepFamily(1, modulus, {h: {a: Monomial((0,), (v[a],), modulus) for a in h} for h, v in pick}))
        if len(out) >= limit:
            break
    return out
