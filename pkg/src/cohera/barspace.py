"""Bar-construction indexing and exact coordinates on simplices.

Points are exact ``Fraction`` tuples.  An ``HPoint`` at level ``n`` is a cell
of the bar construction on ``[n]`` together with coordinates: an increasing
index ``r = (r_0 < ... < r_i)`` in ``{0..n}``, one cube coordinate vector per
gap (``gaps[k-1]`` has length ``r_k - r_(k-1) - 1``) and barycentric weights
``t = (t_0..t_i)``.  ``h_eval`` sends it to a barycentric point of
``Delta^n``; ``h_invert`` goes back.

>>> from fractions import Fraction as F
>>> h_eval(2, HPoint((0, 2), ((F(1, 2),),), (F(1, 2), F(1, 2))))
(Fraction(2, 5), Fraction(1, 5), Fraction(2, 5))
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ArgumentError, DomainError, SingularityError, StructuralError
from .fincat import FinCat, GCat, SetFunctor
from .shapes import SimplicialSet

log = logging.getLogger("cohera.barspace")

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class HPoint:
    r: tuple
    gaps: tuple
    t: tuple

    @property
    def i(self):
        return len(self.r) - 1


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise ArgumentError("floats are not accepted; pass rationals as 'p/q' strings or Fractions")
    return Fraction(x)


def make_point(r, gaps, t) -> HPoint:
    return HPoint(tuple(int(v) for v in r), tuple(tuple(as_fraction(x) for x in g) for g in gaps),
                  tuple(as_fraction(x) for x in t))


def barycentric(values) -> tuple:
    b = tuple(as_fraction(v) for v in values)
    if not b or any(v < 0 for v in b) or sum(b) != 1:
        raise ArgumentError("a barycentric point needs nonnegative rationals summing to 1")
    return b


def check_point(n: int, p: HPoint) -> None:
    r = p.r
    if n < 0:
        raise ArgumentError("level must be >= 0")
    if not r or any(not 0 <= v <= n for v in r) or any(a >= b for a, b in zip(r, r[1:])):
        raise ArgumentError(f"r = {r} is not strictly increasing inside [0, {n}]")
    if len(p.t) != len(r):
        raise ArgumentError("t needs one weight per entry of r")
    if any(v < 0 for v in p.t) or sum(p.t) != 1:
        raise ArgumentError("t must be nonnegative and sum to 1")
    if len(p.gaps) != len(r) - 1:
        raise ArgumentError("need one gap vector between consecutive entries of r")
    for k, g in enumerate(p.gaps, start=1):
        if len(g) != r[k] - r[k - 1] - 1:
            raise ArgumentError(f"gap {k} needs {r[k] - r[k - 1] - 1} coordinates")
        if any(not 0 <= v <= 1 for v in g):
            raise ArgumentError("gap coordinates lie in [0, 1]")


def _pair_max_min(t, lo, hi):
    """max over p <= lo < hi <= s of min(t_p, t_s); 0 when empty."""
    best = ZERO
    for p in range(0, lo + 1):
        for s in range(hi, len(t)):
            v = min(t[p], t[s])
            if v > best:
                best = v
    return best


def h_eval(n: int, p: HPoint) -> tuple:
    """The point of ``Delta^n`` with coordinates ``a / sum(a)``."""
    check_point(n, p)
    r, t = p.r, p.t
    a = [ZERO] * (n + 1)
    for k, rk in enumerate(r):
        inner = _pair_max_min(t, k - 1, k + 1) if 0 < k < len(r) - 1 else ZERO
        a[rk] = max(t[k], inner)
    for k in range(len(r) - 1):
        factor = _pair_max_min(t, k, k + 1)
        for j, coord in enumerate(p.gaps[k], start=1):
            a[r[k] + j] = coord * factor
    total = sum(a)
    if total == 0:
        raise StructuralError("all coordinates vanish")
    return tuple(x / total for x in a)


def _support(b):
    nz = [u for u, v in enumerate(b) if v != 0]
    if not nz:
        raise ArgumentError("the zero vector is not a point of the simplex")
    return nz[0], nz[-1]


def least_r(b) -> tuple:
    """The smallest ``r`` with ``b`` in ``A_r``.

    Inside the support ``[f, L]`` an index ``u`` is kept exactly when ``b_u``
    exceeds the smaller of the largest values strictly to its left and to its
    right; the endpoints are always kept.
    """
    f, last = _support(b)
    if f == last:
        return (f,)
    keep = [f]
    for u in range(f + 1, last):
        left = max(b[f:u])
        right = max(b[u + 1:last + 1])
        if b[u] > min(left, right):
            keep.append(u)
    keep.append(last)
    return tuple(keep)


def literal_r(b) -> tuple:
    """The index sequence produced by the step rule "jump to the largest index
    whose gap is dominated by the current value"."""
    f, last = _support(b)
    r = [f]
    while r[-1] < last:
        cur = r[-1]
        if all(b[cur] < b[u] for u in range(cur + 1, last + 1)):
            r.append(cur + 1)
            continue
        nxt = cur + 1
        for v in range(cur + 1, last + 1):
            if all(b[u] <= b[cur] for u in range(cur + 1, v)):
                nxt = v
        r.append(nxt)
    return tuple(r)


def _point_for(b, r, gap_scale) -> HPoint:
    total = sum(b[v] for v in r)
    t = tuple(b[v] / total for v in r)
    gaps = []
    for k in range(1, len(r)):
        scale = gap_scale(r[k - 1], r[k])
        gaps.append(tuple(b[u] / scale if scale else ZERO for u in range(r[k - 1] + 1, r[k])))
    return HPoint(tuple(r), tuple(gaps), t)


def h_invert(b) -> HPoint:
    """Inverse of ``h_eval`` on the interior of the least region containing ``b``."""
    b = barycentric(b)
    r = least_r(b)
    lit = literal_r(b)
    if lit != r:
        log.warning("step rule gives r=%s but the least region containing %s is r=%s",
                    lit, _fmt(b), r)
    return _point_for(b, r, lambda lo, hi: min(b[lo], b[hi]))


def h_invert_literal(b) -> HPoint:
    """The step-rule inverse with gap coordinates ``b_u / b_(r_(k-1))``.

    Logs a warning when the selected values are not strictly increasing; the
    result then need not map back to ``b``.
    """
    b = barycentric(b)
    r = literal_r(b)
    vals = [b[v] for v in r]
    if any(x >= y for x, y in zip(vals, vals[1:])):
        log.warning("values at r=%s are not strictly increasing for b=%s", r, _fmt(b))
    return _point_for(b, r, lambda lo, hi: b[lo])


def _fmt(b):
    return "(" + ", ".join(str(x) for x in b) + ")"


def region_membership(b, r, n: int) -> bool:
    """Whether ``b`` satisfies the three defining conditions of ``A_r`` in ``Delta^n``."""
    b = barycentric(b)
    if len(b) != n + 1:
        raise ArgumentError(f"point has {len(b)} coordinates, expected {n + 1}")
    r = tuple(r)
    if not r or any(not 0 <= v <= n for v in r) or any(x >= y for x, y in zip(r, r[1:])):
        raise ArgumentError(f"r = {r} is not strictly increasing inside [0, {n}]")
    if any(b[m] != 0 for m in range(n + 1) if m < r[0] or m > r[-1]):
        return False
    for k in range(len(r) - 1):
        bound = min(b[r[k]], b[r[k + 1]])
        if any(b[u] > bound for u in range(r[k] + 1, r[k + 1])):
            return False
    for p in range(len(r)):
        for s in range(p + 1, len(r)):
            if min(b[r[p]], b[r[s]]) > b[r[p + 1]]:
                return False
    return True


def all_regions(b, n: int) -> list:
    """Every ``r`` with ``b`` in ``A_r`` (exhaustive)."""
    out = []
    for size in range(1, n + 2):
        for r in itertools.combinations(range(n + 1), size):
            if region_membership(b, r, n):
                out.append(r)
    return out


def coordinate_face(j: int, b) -> tuple:
    """``d^j`` on barycentric coordinates: insert a 0 at position ``j``."""
    b = tuple(b)
    if not 0 <= j <= len(b):
        raise ArgumentError("face index out of range")
    return b[:j] + (ZERO,) + b[j:]


def face_pushforward(j: int, p: HPoint, n: int) -> HPoint:
    """Image of a level ``n-1`` point under the face ``d^j: [n-1] -> [n]``."""
    if n < 1:
        raise ArgumentError("pushforward needs n >= 1")
    check_point(n - 1, p)
    if not 0 <= j <= n:
        raise ArgumentError(f"face index {j} outside [0, {n}]")
    r, gaps = list(p.r), [list(g) for g in p.gaps]
    if j > r[-1]:
        return p
    if j <= r[0]:
        return HPoint(tuple(v + 1 for v in r), p.gaps, p.t)
    for l in range(1, len(r)):
        if j == r[l]:
            new_r = r[:l] + [v + 1 for v in r[l:]]
            gaps[l - 1].append(ZERO)
            return HPoint(tuple(new_r), tuple(tuple(g) for g in gaps), p.t)
    for l in range(len(r) - 1):
        if r[l] < j < r[l + 1]:
            new_r = r[:l + 1] + [v + 1 for v in r[l + 1:]]
            gaps[l].insert(j - r[l] - 1, ZERO)
            return HPoint(tuple(new_r), tuple(tuple(g) for g in gaps), p.t)
    raise AssertionError("unreachable")


def bar_face(p: HPoint, j: int) -> HPoint:
    """The equivalent point with ``r_j`` removed when ``t_j = 0``."""
    if not 0 <= j <= p.i:
        raise ArgumentError("face index out of range")
    if p.t[j] != 0:
        raise ArgumentError(f"t_{j} must vanish")
    if p.i == 0:
        raise ArgumentError("cannot remove the only vertex")
    r = p.r[:j] + p.r[j + 1:]
    t = p.t[:j] + p.t[j + 1:]
    gaps = list(p.gaps)
    if j == 0:
        gaps = gaps[1:]
    elif j == p.i:
        gaps = gaps[:-1]
    else:
        merged = gaps[j - 1] + (ONE,) + gaps[j]
        gaps = gaps[:j - 1] + [merged] + gaps[j + 1:]
    return HPoint(r, tuple(gaps), t)


def random_barycentric(rng, n: int, max_weight: int = 7, zero_prob: float = 0.3) -> tuple:
    while True:
        w = [0 if rng.random() < zero_prob else rng.randint(1, max_weight) for _ in range(n + 1)]
        if any(w):
            s = sum(w)
            return tuple(Fraction(x, s) for x in w)


def random_hpoint(rng, n: int, max_den: int = 6) -> HPoint:
    size = rng.randint(1, n + 1)
    r = tuple(sorted(rng.sample(range(n + 1), size)))
    gaps = tuple(tuple(Fraction(rng.randint(0, max_den), max_den) for _ in range(r[k] - r[k - 1] - 1))
                 for k in range(1, size))
    t = random_barycentric(rng, size - 1, zero_prob=0.2)
    return HPoint(r, gaps, t)


# ---------------------------------------------------------------------------
# regions and retractions on Delta | [k]


def _check_sigma(sigma, point, k=None):
    sigma = tuple(sigma)
    if not sigma or any(x > y for x, y in zip(sigma, sigma[1:])) or sigma[0] < 0:
        raise ArgumentError("sigma must be a weakly increasing map into [k]")
    if k is None:
        k = sigma[-1]
    if sigma[-1] > k:
        raise ArgumentError("sigma leaves [k]")
    if point is not None:
        point = barycentric(point)
        if len(point) != len(sigma):
            raise ArgumentError("point and sigma have different lengths")
    return sigma, point, k


def pushed_weights(sigma, point, k) -> tuple:
    """``t'_j``: the total weight of the vertices sent to ``j``."""
    out = [ZERO] * (k + 1)
    for l, v in zip(sigma, point):
        out[l] += v
    return tuple(out)


def in_region(point, sigma, i: int, k: int | None = None) -> bool:
    """Weights on ``0..i-1`` vanish."""
    sigma, point, k = _check_sigma(sigma, point, k)
    tp = pushed_weights(sigma, point, k)
    return all(tp[j] == 0 for j in range(i))


def in_region_bar(point, sigma, i: int, k: int | None = None) -> bool:
    """Additionally each ``t'_j`` (``j >= i``, ``j != k``) is at most half of what is left after ``i..j-1``."""
    sigma, point, k = _check_sigma(sigma, point, k)
    tp = pushed_weights(sigma, point, k)
    if any(tp[j] != 0 for j in range(i)):
        return False
    for j in range(i, k + 1):
        if j == k:
            continue
        if tp[j] > HALF * (1 - sum(tp[i:j])):
            return False
    return True


def in_region_slice(point, sigma, i: int, t, k: int | None = None) -> bool:
    t = as_fraction(t)
    if not 0 <= t <= HALF:
        raise ArgumentError("slice parameter must lie in [0, 1/2]")
    sigma, point, k = _check_sigma(sigma, point, k)
    return in_region_bar(point, sigma, i, k) and pushed_weights(sigma, point, k)[i] == t


def region_predicates(sigma, i: int, t=None, k: int | None = None):
    """Membership tests ``(R_i, Rbar_i, Rbarbar_(i,t))`` as callables on points."""
    tests = (lambda pt: in_region(pt, sigma, i, k), lambda pt: in_region_bar(pt, sigma, i, k))
    if t is None:
        return tests + (None,)
    return tests + (lambda pt: in_region_slice(pt, sigma, i, t, k),)


def retraction(i: int, u, point, sigma, k: int | None = None) -> tuple:
    """Scale the weights before ``d`` by ``u`` and the rest by ``(1 - u t'_i) / (1 - t'_i)``,
    where ``d`` is the first vertex sent above ``i``."""
    u = as_fraction(u)
    if not 0 <= u <= 1:
        raise ArgumentError("u must lie in [0, 1]")
    sigma, point, k = _check_sigma(sigma, point, k)
    if not 0 <= i <= k - 1:
        raise ArgumentError(f"retraction index {i} outside [0, {k - 1}]")
    d = next((l for l, v in enumerate(sigma) if v >= i + 1), None)
    if d is None:
        raise DomainError(f"no vertex of sigma lies above {i}")
    ti = pushed_weights(sigma, point, k)[i]
    if ti == 1:
        raise SingularityError("t'_i = 1 makes the rescaling factor 0/0")
    if not in_region_bar(point, sigma, i, k):
        raise ArgumentError("point is not in the source region")
    factor = (1 - u * ti) / (1 - ti)
    return tuple(v * u for v in point[:d]) + tuple(v * factor for v in point[d:])


def retract_to_top(point, sigma, k: int | None = None) -> tuple:
    """``r_(k-1,0) o ... o r_(0,0)``."""
    sigma, point, k = _check_sigma(sigma, point, k)
    for i in range(k):
        point = retraction(i, 0, point, sigma, k)
    return point


# ---------------------------------------------------------------------------
# cube census


@dataclass
class CensusRow:
    m: int
    injections: int
    binomial: int
    face_counts: tuple
    coface_counts: tuple
    degrees: tuple
    cube_dims: tuple
    slice_dims: tuple


@dataclass
class Census:
    k: int
    rows: list
    total: int

    @property
    def ok(self):
        return (self.total == 2 ** (self.k - 1)
                and all(r.injections == r.binomial for r in self.rows)
                and all(d == self.k - 1 for r in self.rows for d in r.degrees))


def endpoint_injections(m: int, k: int) -> list:
    """Injections ``[m] -> [k]`` with ``0 -> 0`` and ``m -> k``."""
    if m == 0:
        return [(0,)] if k == 0 else []
    return [(0,) + mid + (k,) for mid in itertools.combinations(range(1, k), m - 1)]


def cube_gluing_census(k: int) -> Census:
    """Count the sub-cubes indexed by endpoint-fixing injections into ``[k]`` and how they meet."""
    if not 1 <= k <= 8:
        raise ArgumentError("census needs 1 <= k <= 8")
    rows = []
    total = 0
    by_m = {m: endpoint_injections(m, k) for m in range(1, k + 1)}
    for m in range(1, k + 1):
        sigmas = by_m[m]
        faces, cofaces, degrees, cdims, sdims = [], [], [], [], []
        for s in sigmas:
            f = {s[:i] + s[i + 1:] for i in range(1, m)}
            cf = {g for g in by_m.get(m + 1, []) if any(g[:i] + g[i + 1:] == s for i in range(1, m + 1))}
            faces.append(len(f))
            cofaces.append(len(cf))
            degrees.append(len(f) + len(cf))
            cdims.append(sum(b - a - 1 for a, b in zip(s, s[1:])))
            sdims.append(m - 1)
        total += len(sigmas)
        rows.append(CensusRow(m, len(sigmas), math.comb(k - 1, m - 1), tuple(faces), tuple(cofaces),
                              tuple(degrees), tuple(cdims), tuple(sdims)))
    return Census(k, rows, total)


# ---------------------------------------------------------------------------
# two-sided bar construction at one object


@dataclass(frozen=True)
class BarSummand:
    level: int
    objects: tuple
    left_cells: int      # size of G(c, alpha_n)
    hom_sizes: tuple     # |gamma(c)(alpha_(l-1), alpha_l)| for l = 1..n
    right_cells: int     # size of F(c, alpha_0)

    @property
    def size(self):
        return self.left_cells * math.prod(self.hom_sizes) * self.right_cells


@dataclass
class BarConstruction:
    summands: list          # per level, list of BarSummand with at least one element
    sset: SimplicialSet     # elements (left cell, morphisms, right cell) with face/degeneracy tables

    def summand_counts(self):
        return [len(lv) for lv in self.summands]


def _fibre_maps(fun: SetFunctor, total: FinCat, base: FinCat, identity_element, op: bool):
    """Per base morphism, the function of the corresponding fibre morphism."""
    out = {}
    for m, lab in enumerate(total.mor_labels):
        g, f = lab
        if g == identity_element:
            out[f] = fun.maps[m]
    if len(out) != base.n_morphisms:
        raise StructuralError("functor does not cover every fibre morphism")
    return out


def bar_enumerate(gfun: SetFunctor, gamma: GCat, ffun: SetFunctor, c=0, n: int = 2) -> BarConstruction:
    """Levels ``0..n`` of ``B(G, gamma, F)(c)``.

    ``gfun`` lives on the opposite Grothendieck construction and ``ffun`` on
    the covariant one; only their fibres over ``c`` enter.  An element at level
    ``l`` is ``(objects, x, (f_1..f_l), y)`` with ``y`` in ``F(alpha_0)``, ``f_j: alpha_(j-1) -> alpha_j``
    and ``x`` in ``G(alpha_l)``.  ``d_0`` pushes ``y`` along ``f_1``, ``d_l``
    pulls ``x`` back along ``f_l``, inner faces compose, degeneracies insert
    identities.
    """
    if c != 0:
        raise ArgumentError("the shape has a single object")
    base = gamma.base
    e = gamma.group.identity
    for fun, name in ((gfun, "left"), (ffun, "right")):
        rep = fun.validate()
        if not rep.ok:
            raise StructuralError(f"{name} functor: {rep.violations[0]}")
    gmap = _fibre_maps(gfun, gfun.category, base, e, True)
    fmap = _fibre_maps(ffun, ffun.category, base, e, False)
    summands = []
    for lv in range(n + 1):
        chains = []
        stack = [((x,), ()) for x in range(base.n_objects)]
        while stack:
            objs, mors = stack.pop()
            if len(mors) == lv:
                chains.append((objs, mors))
                continue
            for f in base.out_of(objs[-1]):
                stack.append((objs + (base.cod(f),), mors + (f,)))
        rows = []
        for objs in sorted({o for o, _ in chains}):
            homs = tuple(len(base.hom(a, b)) for a, b in zip(objs, objs[1:]))
            s = BarSummand(lv, objs, gfun.sizes[objs[-1]], homs, ffun.sizes[objs[0]])
            if s.size:
                rows.append(s)
        summands.append(rows)
    return _bar_with_objects(gfun, base, ffun, gmap, fmap, summands, n)


def _bar_with_objects(gfun, base, ffun, gmap, fmap, summands, n):
    """Elements are tagged by their object chain so that level-0 cells over
    different objects stay distinct."""
    levels = []
    for lv in range(n + 1):
        elems = []
        for s in summands[lv]:
            for mors in _chains_between(base, s.objects):
                for x in range(gfun.sizes[s.objects[-1]]):
                    for y in range(ffun.sizes[s.objects[0]]):
                        elems.append((s.objects, x, mors, y))
        levels.append(sorted(elems))
    index = [{el: k for k, el in enumerate(lv)} for lv in levels]

    def face(lv, el, i):
        objs, x, mors, y = el
        if i == 0:
            return (objs[1:], x, mors[1:], fmap[mors[0]][y])
        if i == lv:
            return (objs[:-1], gmap[mors[-1]][x], mors[:-1], y)
        return (objs[:i] + objs[i + 1:], x,
                mors[:i - 1] + (base.compose(mors[i], mors[i - 1]),) + mors[i + 1:], y)

    def degen(el, i):
        objs, x, mors, y = el
        return (objs[:i + 1] + objs[i:], x, mors[:i] + (base.identity[objs[i]],) + mors[i:], y)

    faces = [[]] + [[[index[lv - 1][face(lv, el, i)] for el in levels[lv]] for i in range(lv + 1)]
                    for lv in range(1, n + 1)]
    degens = [[[index[lv + 1][degen(el, i)] for el in levels[lv]] for i in range(lv + 1)] for lv in range(n)]
    return BarConstruction(summands, SimplicialSet(levels, faces, degens))


def _chains_between(base: FinCat, objs):
    out = [()]
    for a, b in zip(objs, objs[1:]):
        out = [m + (f,) for m in out for f in base.hom(a, b)]
    return out
