"""Integer linear algebra, Bredon cochain complexes and obstruction classes.

Matrices are lists of integer rows.  Lattices are lists of integer column
vectors.  A cochain complex is built on one representative chain per
``G``-orbit of nondegenerate chains outside the relative part; the value group
at a representative is the part of its coefficient group fixed by the
stabilizer.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

from .errors import (ArgumentError, IncompleteInputError, StructuralError,
                     UnsupportedInputError)
from .fincat import Chain, GCat, act_chain, chain_restrict, enumerate_chains
from .util import check_capacity

# ---------------------------------------------------------------------------
# matrices


def zeros(r, c):
    return [[0] * c for _ in range(r)]


def identity_matrix(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    if a and len(a[0]) != inner:
        raise ArgumentError(f"shape mismatch: {len(a)}x{len(a[0])} times {inner}x{cols}")
    return [[sum(row[k] * b[k][j] for k in range(inner)) for j in range(cols)] for row in a]


def mat_vec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(a, rows_if_empty=0):
    if not a:
        return [[] for _ in range(rows_if_empty)]
    return [list(col) for col in zip(*a)]


def columns_to_matrix(cols, dim):
    """Matrix whose columns are ``cols`` (``dim`` rows)."""
    return [[c[i] for c in cols] for i in range(dim)]


def determinant(a):
    """Exact determinant by fraction-free elimination (Bareiss)."""
    n = len(a)
    m = [list(r) for r in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1] if n else 1


def smith_normal_form(matrix):
    """``(U, D, V)`` with ``U M V = D`` diagonal, ``U`` and ``V`` unimodular and ``d_i | d_(i+1)``.

    The pivot is always the entry of least absolute value in the remaining
    block, ties broken by (row, column), so results are reproducible.
    """
    d = [list(map(int, r)) for r in matrix]
    rows = len(d)
    cols = len(d[0]) if rows else 0
    u = identity_matrix(rows)
    v = identity_matrix(cols)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in d:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row dst += q * row src
        d[dst] = [x + q * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for r in d:
            r[dst] += q * r[src]
        for r in v:
            r[dst] += q * r[src]

    def least(cells):
        best = None
        for i, j in cells:
            x = d[i][j]
            if x and (best is None or (abs(x), i, j) < best):
                best = (abs(x), i, j)
        return best

    for t in range(min(rows, cols)):
        best = least((i, j) for i in range(t, rows) for j in range(t, cols))
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = d[t][t]
            clean = True
            for i in range(t + 1, rows):
                if d[i][t]:
                    add_row(i, t, -(d[i][t] // p))
                    clean = clean and d[i][t] == 0
            for j in range(t + 1, cols):
                if d[t][j]:
                    add_col(j, t, -(d[t][j] // p))
                    clean = clean and d[t][j] == 0
            if not clean:
                cells = [(i, t) for i in range(t, rows)] + [(t, j) for j in range(t + 1, cols)]
                _, i, j = least(cells)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            bad = next((i for i in range(t + 1, rows) for j in range(t + 1, cols) if d[i][j] % p), None)
            if bad is not None:
                add_row(t, bad, 1)
                continue
            break
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
    return u, d, v


def diagonal(d):
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


def rank_of(matrix):
    if not matrix or not matrix[0]:
        return 0
    _, d, _ = smith_normal_form(matrix)
    return sum(1 for x in diagonal(d) if x)


def kernel_basis(matrix, cols=None):
    """A basis of the integer kernel, as column vectors."""
    if not matrix:
        return [[int(i == j) for i in range(cols or 0)] for j in range(cols or 0)]
    _, d, v = smith_normal_form(matrix)
    r = sum(1 for x in diagonal(d) if x)
    n = len(matrix[0])
    return [[v[i][j] for i in range(n)] for j in range(r, n)]


def lattice_basis(generators, dim):
    """A basis of the lattice spanned by ``generators`` (column vectors in ``Z^dim``)."""
    gens = [list(g) for g in generators if any(g)]
    if not gens:
        return []
    m = columns_to_matrix(gens, dim)
    _, d, v = smith_normal_form(m)
    r = sum(1 for x in diagonal(d) if x)
    gv = mat_mul(m, v)
    return [[gv[i][j] for i in range(dim)] for j in range(r)]


@dataclass
class Witness:
    """A functional ``u`` with ``u . A = 0 (mod modulus)`` but ``u . b != 0 (mod modulus)``."""
    functional: list
    modulus: int
    value: int

    def __str__(self):
        if self.modulus == 0:
            return f"{self.value} != 0"
        return f"{self.value} ∉ {self.modulus}ℤ"


@dataclass
class Solution:
    x: list | None
    witness: Witness | None = None

    @property
    def solvable(self):
        return self.x is not None


def solve_integer(matrix, b) -> Solution:
    """Integer solution of ``A x = b`` or a divisibility witness against it."""
    rows = len(matrix)
    if len(b) != rows:
        raise ArgumentError("right-hand side has the wrong length")
    cols = len(matrix[0]) if rows else 0
    if rows == 0:
        return Solution([0] * cols)
    u, d, v = smith_normal_form(matrix)
    c = mat_vec(u, b)
    diag = diagonal(d)
    y = [0] * cols
    for i in range(rows):
        di = diag[i] if i < len(diag) else 0
        if di == 0:
            if c[i] != 0:
                return Solution(None, Witness(u[i], 0, c[i]))
        elif c[i] % di:
            return Solution(None, Witness(u[i], di, c[i]))
        else:
            y[i] = c[i] // di
    return Solution(mat_vec(v, y))


def coordinates_in(basis, vectors, dim):
    """Coordinates of each vector in a lattice basis (raises if outside)."""
    if not basis:
        if any(any(v) for v in vectors):
            raise StructuralError("vector outside the lattice")
        return [[] for _ in vectors]
    m = columns_to_matrix(basis, dim)
    out = []
    for vec in vectors:
        sol = solve_integer(m, vec)
        if not sol.solvable:
            raise StructuralError("vector outside the lattice")
        out.append(sol.x)
    return out


def quotient_invariants(sub_generators, ambient_rank):
    """``(free rank, torsion)`` of ``Z^ambient_rank / span(sub_generators)``."""
    gens = [g for g in sub_generators if any(g)]
    if not gens:
        return ambient_rank, []
    _, d, _ = smith_normal_form(columns_to_matrix(gens, ambient_rank))
    diag = [x for x in diagonal(d) if x]
    return ambient_rank - len(diag), [x for x in diag if x > 1]


# ---------------------------------------------------------------------------
# finitely generated abelian groups


@dataclass(frozen=True)
class FGAbelian:
    """``Z^rank`` modulo the row span of ``relations``."""
    rank: int
    relations: tuple = ()

    def __post_init__(self):
        rel = tuple(tuple(int(x) for x in r) for r in self.relations)
        if any(len(r) != self.rank for r in rel):
            raise ArgumentError("every relation needs one entry per generator")
        object.__setattr__(self, "relations", rel)

    def invariants(self):
        return quotient_invariants([list(r) for r in self.relations], self.rank)

    def relation_columns(self):
        return [list(r) for r in self.relations]

    def contains_zero(self, vec) -> bool:
        """Whether ``vec`` represents 0."""
        if not any(vec):
            return True
        if not self.relations:
            return False
        return solve_integer(columns_to_matrix(self.relation_columns(), self.rank), list(vec)).solvable

    def __str__(self):
        free, tors = self.invariants()
        parts = ["Z"] * free + [f"Z/{t}" for t in tors]
        return " + ".join(parts) if parts else "0"


def integers(rank=1):
    return FGAbelian(rank)


def cyclic_abelian(order):
    return FGAbelian(1, ((order,),))


@dataclass(frozen=True)
class AbHom:
    matrix: tuple
    source: FGAbelian
    target: FGAbelian

    def check(self) -> bool:
        """Whether the matrix sends source relations into the target relation lattice."""
        m = [list(r) for r in self.matrix]
        if len(m) != self.target.rank or any(len(r) != self.source.rank for r in m):
            return False
        return all(self.target.contains_zero(mat_vec(m, list(rel))) for rel in self.source.relations)


# ---------------------------------------------------------------------------
# coefficient systems


def face_theta(n, i):
    """The coface ``d^i: [n-1] -> [n]`` as a value tuple."""
    return tuple(j if j < i else j + 1 for j in range(n))


def chain_face(c, sigma: Chain, i: int) -> Chain:
    return chain_restrict(c, sigma, face_theta(sigma.length, i))


def is_degenerate(c, sigma: Chain) -> bool:
    return any(c.is_identity(f) for f in sigma.morphisms)


class CoefficientSystem:
    """Coefficient data on chains of length at most ``bound``.

    ``value(sigma)`` is an ``FGAbelian``; ``face(tau, i)`` is the matrix of
    ``M(d^i): M(tau d^i) -> M(tau)``; ``action(g, sigma)`` is the matrix of
    ``M(sigma) -> M(g sigma)``.  The normalized complex only uses cofaces and
    the group action, so those are what ``validate`` checks.
    """

    def __init__(self, gamma: GCat, bound: int, value: Callable, face: Callable, action: Callable):
        self.gamma = gamma
        self.bound = bound
        self._value = value
        self._face = face
        self._action = action
        self._cache = {}

    def value(self, sigma):
        key = ("v", sigma)
        if key not in self._cache:
            self._cache[key] = self._value(sigma)
        return self._cache[key]

    def face(self, tau, i):
        key = ("f", tau, i)
        if key not in self._cache:
            self._cache[key] = [list(r) for r in self._face(tau, i)]
        return self._cache[key]

    def action(self, g, sigma):
        key = ("a", g, sigma)
        if key not in self._cache:
            self._cache[key] = [list(r) for r in self._action(g, sigma)]
        return self._cache[key]

    def chains(self, n):
        return enumerate_chains(self.gamma.base, n)

    def validate(self) -> list:
        """Every failed check as a string; empty when the data is coherent."""
        base, grp = self.gamma.base, self.gamma.group
        out = []
        for n in range(self.bound + 1):
            for sigma in self.chains(n):
                a = self.value(sigma)
                shaped = True
                for g in grp.elements:
                    m = self.action(g, sigma)
                    target = self.value(act_chain(self.gamma, g, sigma))
                    if not AbHom(tuple(map(tuple, m)), a, target).check():
                        out.append(f"action of {g} on {sigma} is not a homomorphism")
                        shaped = False
                if self.action(grp.identity, sigma) != identity_matrix(a.rank):
                    out.append(f"identity acts nontrivially on {sigma}")
                for g, h in itertools.product(grp.elements, repeat=2 if shaped else 0):
                    lhs = mat_mul(self.action(g, act_chain(self.gamma, h, sigma)), self.action(h, sigma))
                    if lhs != self.action(grp.mul(g, h), sigma):
                        out.append(f"action is not multiplicative at ({g}, {h}) on {sigma}")
                if n == 0:
                    continue
                for i in range(n + 1):
                    f = self.face(sigma, i)
                    src = self.value(chain_face(base, sigma, i))
                    if not AbHom(tuple(map(tuple, f)), src, a).check():
                        out.append(f"face {i} of {sigma} is not a homomorphism")
                        shaped = False
                        continue
                    for g in grp.elements:
                        gs = act_chain(self.gamma, g, sigma)
                        lhs = mat_mul(self.action(g, sigma), f)
                        rhs = mat_mul(self.face(gs, i), self.action(g, chain_face(base, sigma, i)))
                        if lhs != rhs:
                            out.append(f"face {i} of {sigma} does not commute with {g}")
                if n >= 2 and shaped:
                    for i, j in itertools.combinations(range(n + 1), 2):
                        lhs = mat_mul(self.face(sigma, j), self.face(chain_face(base, sigma, j), i))
                        rhs = mat_mul(self.face(sigma, i), self.face(chain_face(base, sigma, i), j - 1))
                        if lhs != rhs:
                            out.append(f"cofaces {i} < {j} do not commute on {sigma}")
        return out


def constant_system(gamma: GCat, group: FGAbelian | None = None, bound: int = 6, action=None) -> CoefficientSystem:
    """Constant coefficients, optionally twisted by ``action[g]`` (a matrix per group element)."""
    group = group or integers(1)
    ident = identity_matrix(group.rank)
    return CoefficientSystem(gamma, bound, lambda s: group, lambda t, i: ident,
                             (lambda g, s: action[g]) if action else (lambda g, s: ident))


def table_system(gamma: GCat, bound: int, values: dict, faces: dict, actions: dict | None = None) -> CoefficientSystem:
    """Coefficients read from tables keyed by chains (faces by ``(tau, i)``, actions by ``(g, sigma)``)."""
    def value(s):
        if s not in values:
            raise IncompleteInputError(f"no coefficient group for {s}")
        return values[s]

    def face(t, i):
        if (t, i) not in faces:
            raise IncompleteInputError(f"no face map {i} at {t}")
        return faces[(t, i)]

    def action(g, s):
        if actions and (g, s) in actions:
            return actions[(g, s)]
        if g == gamma.group.identity or gamma.group.order == 1:
            return identity_matrix(value(s).rank)
        raise IncompleteInputError(f"no action of {g} at {s}")

    return CoefficientSystem(gamma, bound, value, face, action)


# ---------------------------------------------------------------------------
# normalized relative cochain complex


def subcategory(morphisms) -> frozenset:
    return frozenset(morphisms)


def chain_in(alpha_part, sigma: Chain, c) -> bool:
    return (all(c.identity[x] in alpha_part for x in sigma.objects)
            and all(f in alpha_part for f in sigma.morphisms))


@dataclass
class Degree:
    n: int
    reps: list             # orbit representatives (nondegenerate, outside alpha)
    stabilizers: list
    offsets: list          # start of each representative's block in the ambient vector
    ambient: int
    basis: list            # lattice of stabilizer-fixed values (columns, ambient coordinates)
    relations: list        # relation lattice generators (ambient coordinates)
    relation_coords: list  # the same in basis coordinates


class BredonComplex:
    """``NC^n`` for ``n <= top`` with coboundaries in fixed-lattice coordinates."""

    def __init__(self, gamma: GCat, alpha, coeff: CoefficientSystem, top: int):
        if top + 1 > coeff.bound:
            raise ArgumentError(f"degree {top} needs coefficients up to length {top + 1}; bound is {coeff.bound}")
        self.gamma = gamma
        self.base = gamma.base
        self.alpha = [frozenset(a) for a in (alpha or [])]
        self.coeff = coeff
        self.top = top
        for part in self.alpha:
            for g in gamma.group.elements:
                if any(gamma.mor_action[g][f] not in part for f in part):
                    raise StructuralError("relative part is not closed under the group action")
        problems = coeff.validate()
        if problems:
            raise StructuralError(f"coefficient system: {problems[0]}")
        self._orbit = {}
        self.degrees = [self._degree(n) for n in range(top + 2)]
        self._delta = {}

    def in_relative_part(self, sigma):
        return any(chain_in(a, sigma, self.base) for a in self.alpha)

    def is_normal(self, sigma):
        return not is_degenerate(self.base, sigma) and not self.in_relative_part(sigma)

    def locate(self, sigma):
        """``(rep, g)`` with ``g . rep = sigma``."""
        if sigma not in self._orbit:
            grp = self.gamma.group
            orbit = {act_chain(self.gamma, g, sigma) for g in grp.elements}
            rep = min(orbit, key=lambda s: (s.objects, s.morphisms))
            g = next(g for g in grp.elements if act_chain(self.gamma, g, rep) == sigma)
            self._orbit[sigma] = (rep, g)
        return self._orbit[sigma]

    def _degree(self, n):
        chains = [s for s in self.coeff.chains(n) if self.is_normal(s)]
        check_capacity(len(chains), f"chains of length {n}")
        reps = sorted({self.locate(s)[0] for s in chains}, key=lambda s: (s.objects, s.morphisms))
        stabs, offsets, basis, rels = [], [], [], []
        off = 0
        sizes = [self.coeff.value(r).rank for r in reps]
        ambient = sum(sizes)
        for rep, k in zip(reps, sizes):
            stab = [g for g in self.gamma.group.elements if act_chain(self.gamma, g, rep) == rep]
            stabs.append(stab)
            offsets.append(off)
            grp = self.coeff.value(rep)
            for col in fixed_lattice(grp, [self.coeff.action(g, rep) for g in stab]):
                basis.append([0] * off + col + [0] * (ambient - off - k))
            for rel in grp.relation_columns():
                rels.append([0] * off + rel + [0] * (ambient - off - k))
            off += k
        rel_coords = coordinates_in(basis, rels, ambient) if rels else []
        return Degree(n, reps, stabs, offsets, ambient, basis, rels, rel_coords)

    def block(self, n, sigma):
        d = self.degrees[n]
        i = d.reps.index(sigma)
        return d.offsets[i], self.coeff.value(sigma).rank

    def transport(self, n, sigma, vector):
        """Value at ``sigma`` of the invariant cochain with ambient ``vector``."""
        rep, g = self.locate(sigma)
        off, k = self.block(n, rep)
        return mat_vec(self.coeff.action(g, rep), vector[off:off + k])

    def ambient_coboundary(self, n):
        """``delta: NC^n -> NC^(n+1)`` on ambient coordinates."""
        src, dst = self.degrees[n], self.degrees[n + 1]
        mat = zeros(dst.ambient, src.ambient)
        for tau, off in zip(dst.reps, dst.offsets):
            for i in range(n + 2):
                face = chain_face(self.base, tau, i)
                if not self.is_normal(face):
                    continue
                rep, g = self.locate(face)
                block = mat_mul(self.coeff.face(tau, i), self.coeff.action(g, rep))
                roff, _ = self.block(n, rep)
                sign = -1 if i % 2 else 1
                for r, row in enumerate(block):
                    for cidx, x in enumerate(row):
                        mat[off + r][roff + cidx] += sign * x
        return mat

    def coboundary(self, n):
        """``delta`` in fixed-lattice coordinates."""
        if n not in self._delta:
            src, dst = self.degrees[n], self.degrees[n + 1]
            amb = self.ambient_coboundary(n)
            images = [mat_vec(amb, col) for col in src.basis]
            coords = coordinates_in(dst.basis, images, dst.ambient)
            self._delta[n] = columns_to_matrix(coords, len(dst.basis)) if coords else zeros(len(dst.basis), 0)
        return self._delta[n]

    def rank(self, n):
        return len(self.degrees[n].basis)

    def cohomology(self, n) -> "CohomologyResult":
        if n > self.top:
            raise ArgumentError(f"degree {n} above the computed range {self.top}")
        dim = self.rank(n)
        delta = self.coboundary(n)
        rel_next = self.degrees[n + 1].relation_coords
        if dim == 0:
            return CohomologyResult(n, 0, [])
        # cocycles: x with delta x in the relation lattice of degree n+1
        rows = [list(delta[i]) + [-col[i] for col in rel_next] for i in range(self.rank(n + 1))]
        if rows:
            kern = kernel_basis(rows, dim + len(rel_next))
            cycles = lattice_basis([v[:dim] for v in kern], dim)
        else:
            cycles = identity_matrix(dim)
        bounds = list(self.degrees[n].relation_coords)
        if n > 0:
            prev = self.coboundary(n - 1)
            bounds += [[prev[i][j] for i in range(dim)] for j in range(len(prev[0]) if prev else 0)]
        coords = coordinates_in(cycles, bounds, dim) if cycles else []
        free, torsion = quotient_invariants(coords, len(cycles))
        return CohomologyResult(n, free, torsion)


def fixed_lattice(group: FGAbelian, matrices) -> list:
    """Basis of ``{x : (A - 1) x in relations for every A}`` as columns in ``Z^rank``."""
    k = group.rank
    movers = [m for m in matrices if m != identity_matrix(k)]
    if not movers:
        return identity_matrix(k)
    rel = group.relation_columns()
    width = k + len(rel) * len(movers)
    rows = []
    for idx, m in enumerate(movers):
        for i in range(k):
            row = [m[i][j] - (i == j) for j in range(k)] + [0] * (width - k)
            for r, col in enumerate(rel):
                row[k + idx * len(rel) + r] = -col[i]
            rows.append(row)
    kern = kernel_basis(rows, width)
    return lattice_basis([v[:k] for v in kern], k)


@dataclass
class CohomologyResult:
    degree: int
    free_rank: int
    torsion: list

    @property
    def is_zero(self):
        return self.free_rank == 0 and not self.torsion

    def __str__(self):
        parts = ["Z"] * self.free_rank + [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def coboundary_matrix(gamma: GCat, alpha, coeff: CoefficientSystem, n: int):
    return BredonComplex(gamma, alpha, coeff, n).coboundary(n)


def bredon_cohomology(gamma: GCat, alpha, coeff: CoefficientSystem, n: int) -> CohomologyResult:
    return BredonComplex(gamma, alpha, coeff, n).cohomology(n)


# ---------------------------------------------------------------------------
# cochains, cocycles and coboundaries


@dataclass
class Cochain:
    degree: int
    complex: BredonComplex
    coords: list            # in fixed-lattice coordinates

    def ambient(self):
        d = self.complex.degrees[self.degree]
        out = [0] * d.ambient
        for c, col in zip(self.coords, d.basis):
            for i, x in enumerate(col):
                out[i] += c * x
        return out

    def value(self, sigma):
        """The value at any normal chain of this degree."""
        return self.complex.transport(self.degree, sigma, self.ambient())

    def representative_values(self):
        d = self.complex.degrees[self.degree]
        amb = self.ambient()
        return {rep: amb[off:off + self.complex.coeff.value(rep).rank] for rep, off in zip(d.reps, d.offsets)}

    def is_zero(self):
        return all(self.complex.coeff.value(rep).contains_zero(v) for rep, v in self.representative_values().items())


def cochain_from_values(cx: BredonComplex, n: int, values: dict) -> Cochain:
    """Assemble an invariant cochain from values on every normal chain of a covered orbit.

    Chains of the relative or degenerate part must carry 0.  Values given on
    several members of an orbit must agree under transport.
    """
    d = cx.degrees[n]
    amb = [0] * d.ambient
    for sigma, vec in values.items():
        vec = [int(x) for x in vec]
        if not cx.is_normal(sigma):
            if not cx.coeff.value(sigma).contains_zero(vec):
                raise StructuralError(f"nonzero value on degenerate or relative chain {sigma}")
            continue
        rep, g = cx.locate(sigma)
        if sigma != rep:
            continue
        off, k = cx.block(n, rep)
        if len(vec) != k:
            raise ArgumentError(f"value at {sigma} needs {k} entries")
        amb[off:off + k] = vec
    missing = [rep for rep in d.reps if rep not in values]
    if missing:
        raise IncompleteInputError(f"no value for representative {missing[0]}")
    for sigma, vec in values.items():
        if cx.is_normal(sigma):
            want = cx.transport(n, sigma, amb)
            diff = [a - int(b) for a, b in zip(want, vec)]
            if not cx.coeff.value(sigma).contains_zero(diff):
                raise StructuralError(f"values are not invariant: {sigma} disagrees with its representative")
    for rep, stab in zip(d.reps, d.stabilizers):
        off, k = cx.block(n, rep)
        own = amb[off:off + k]
        for g in stab:
            diff = [a - b for a, b in zip(mat_vec(cx.coeff.action(g, rep), own), own)]
            if not cx.coeff.value(rep).contains_zero(diff):
                raise StructuralError(f"value at {rep} is not fixed by its stabilizer")
    coords = coordinates_in(d.basis, [amb], d.ambient)[0] if d.basis else []
    return Cochain(n, cx, coords)


def cocycle_check(o, delta, relations=None) -> bool:
    """Whether ``delta . o`` vanishes (modulo ``relations`` columns when given)."""
    vec = o.coords if isinstance(o, Cochain) else list(o)
    if isinstance(o, Cochain) and delta is None:
        cx = o.complex
        delta = cx.coboundary(o.degree)
        relations = cx.degrees[o.degree + 1].relation_coords
    if delta and len(delta[0]) != len(vec):
        raise ArgumentError("cochain and coboundary have different sizes")
    image = mat_vec(delta, vec)
    if not any(image):
        return True
    if not relations:
        return False
    return solve_integer(columns_to_matrix(relations, len(image)), image).solvable


@dataclass
class CoboundaryResult:
    solvable: bool
    primitive: list | None
    witness: Witness | None

    def __str__(self):
        return f"primitive {self.primitive}" if self.solvable else f"no primitive: {self.witness}"


def is_coboundary(o, delta_prev, relations=None) -> CoboundaryResult:
    """Solve ``delta g = o`` over the integers, modulo ``relations`` columns when given."""
    vec = o.coords if isinstance(o, Cochain) else [int(x) for x in o]
    if isinstance(o, Cochain) and delta_prev is None:
        cx = o.complex
        if o.degree == 0:
            delta_prev = zeros(len(vec), 0)
        else:
            delta_prev = cx.coboundary(o.degree - 1)
        relations = cx.degrees[o.degree].relation_coords
    rows = len(vec)
    width = len(delta_prev[0]) if delta_prev and delta_prev[0] else 0
    rels = relations or []
    if not any(vec):
        return CoboundaryResult(True, [0] * width, None)
    system = [list(delta_prev[i][:width]) + [col[i] for col in rels] for i in range(rows)]
    if not system[0]:
        first = next(i for i, x in enumerate(vec) if x)
        return CoboundaryResult(False, None, Witness([int(i == first) for i in range(rows)], 0, vec[first]))
    sol = solve_integer(system, vec)
    if not sol.solvable:
        return CoboundaryResult(False, None, sol.witness)
    return CoboundaryResult(True, sol.x[:width], None)


# ---------------------------------------------------------------------------
# homotopy diagrams and their label algebras


class LabelAlgebra:
    """Decidable morphism labels: ``compose(outer, inner)`` and ``identity(obj)``."""

    def compose(self, outer, inner):
        raise NotImplementedError

    def identity(self, obj):
        raise NotImplementedError

    def equal(self, a, b):
        return a == b

    def act(self, label, vector):
        raise UnsupportedInputError(f"{type(self).__name__} has no action of coefficient classes")

    def class_of(self, label):
        raise UnsupportedInputError(f"{type(self).__name__} carries no coefficient classes")


class FreeComposition(LabelAlgebra):
    """Words of atoms; composition is concatenation (outer first).

    A trailing atom ``("class", v)`` records a coefficient class; acting by
    ``w`` adds ``w`` to it and drops it when it becomes 0.
    """

    def compose(self, outer, inner):
        return tuple(outer) + tuple(inner)

    def identity(self, obj):
        return ()

    def act(self, label, vector):
        label = tuple(label)
        vector = tuple(int(x) for x in vector)
        if label and isinstance(label[-1], tuple) and label[-1][:1] == ("class",):
            cur = label[-1][1]
            new = tuple(a + b for a, b in zip(cur, vector))
            label = label[:-1]
        else:
            new = vector
        return label + ((("class", new),) if any(new) else ())

    def class_of(self, label):
        if label and isinstance(label[-1], tuple) and label[-1][:1] == ("class",):
            return list(label[-1][1])
        return None


class IntegerMatrix(LabelAlgebra):
    """Square integer matrices of a fixed size under multiplication."""

    def __init__(self, size):
        self.size = size

    def compose(self, outer, inner):
        return tuple(tuple(r) for r in mat_mul([list(r) for r in outer], [list(r) for r in inner]))

    def identity(self, obj):
        return tuple(tuple(r) for r in identity_matrix(self.size))


@dataclass(frozen=True)
class CellKey:
    """A cell of the cube of a chain: morphisms ``f_0..f_k`` (first applied first) and
    a word in ``{0, 1, '*'}`` giving ``t_1..t_k``."""
    morphisms: tuple
    word: tuple


@dataclass
class VogtViolation:
    cell: CellKey
    rule: str
    expected: object
    found: object

    def __str__(self):
        return f"{self.rule} at {self.cell.morphisms} {''.join(map(str, self.cell.word))}: expected {self.expected}, found {self.found}"


@dataclass
class VogtReport:
    violations: list = field(default_factory=list)
    checked: int = 0
    unchecked: int = 0

    @property
    def ok(self):
        return not self.violations


class HomotopyDiagram:
    """Labels on cube cells of the chains of ``gamma.base`` up to cube dimension ``level``.

    Cells of chains containing identities need not be stored; ``lookup``
    reduces them through the identity rules.
    """

    def __init__(self, gamma: GCat, level: int, labels: dict, algebra: LabelAlgebra):
        self.gamma = gamma
        self.base = gamma.base
        self.level = level
        self.labels = {CellKey(tuple(k[0]), tuple(k[1])) if not isinstance(k, CellKey) else k: v
                       for k, v in labels.items()}
        self.algebra = algebra

    def copy_with(self, labels):
        return HomotopyDiagram(self.gamma, self.level, labels, self.algebra)

    def lookup(self, mors, word):
        key = CellKey(tuple(mors), tuple(word))
        if key in self.labels:
            return self.labels[key]
        red = self._reduce_identity(mors, word)
        if red is None:
            return None
        if red[0] == "identity":
            return self.algebra.identity(self.base.dom(mors[0]))
        _, m2, w2 = red
        return self.lookup(m2, w2)

    def _reduce_identity(self, mors, word):
        c = self.base
        k = len(mors) - 1
        if k == 0:
            return ("identity",) if c.is_identity(mors[0]) else None
        if c.is_identity(mors[0]):
            return ("f0=id", mors[1:], word[1:])
        if c.is_identity(mors[k]):
            return ("fn=id", mors[:-1], word[:-1])
        for i in range(1, k):
            if c.is_identity(mors[i]):
                merged = _max_letter(word[i - 1], word[i])
                if merged is None:
                    return None
                return ("fi=id", mors[:i] + mors[i + 1:], word[:i - 1] + (merged,) + word[i + 1:])
        return None


def _max_letter(a, b):
    if a == 1 or b == 1:
        return 1
    if a == 0:
        return b
    if b == 0:
        return a
    return None  # both free: the cell is a connection image, not a face


def reduced_chains(c, max_len):
    """Chains of non-identity morphisms with 1..max_len morphisms."""
    out = []
    for length in range(1, max_len + 1):
        for ch in enumerate_chains(c, length):
            if not any(c.is_identity(f) for f in ch.morphisms):
                out.append(ch.morphisms)
    return out


def cube_words(k):
    return list(itertools.product((0, 1, "*"), repeat=k))


def complete_diagram(gamma: GCat, level: int, edges: dict, tops: dict, algebra: LabelAlgebra) -> HomotopyDiagram:
    """Fill every cell from edge labels and labels of cube interiors.

    ``edges`` maps non-identity morphisms to labels; ``tops`` maps morphism
    chains to the label of their all-free cell (missing chains of length >= 2
    get the composite of their edges).  Faces are filled by the ``t_i = 0``
    and ``t_i = 1`` rules.
    """
    c = gamma.base
    labels = {}

    def fill(mors, word):
        key = CellKey(mors, word)
        if key in labels:
            return labels[key]
        i = next((j for j, w in enumerate(word, start=1) if w != "*"), None)
        if len(mors) == 1:
            val = edges[mors[0]]
        elif i is None:
            val = tops.get(mors)
            if val is None:
                val = edges[mors[-1]]
                for f in reversed(mors[:-1]):
                    val = algebra.compose(val, edges[f])
        elif word[i - 1] == 0:
            merged = mors[:i - 1] + (c.compose(mors[i], mors[i - 1]),) + mors[i + 1:]
            val = fill(merged, word[:i - 1] + word[i:])
        else:
            val = algebra.compose(fill(mors[i:], word[i:]), fill(mors[:i], word[:i - 1]))
        labels[key] = val
        return val

    if not c.is_acyclic():
        raise UnsupportedInputError("filling needs a shape without nontrivial cycles")
    missing = [f for f in range(c.n_morphisms) if not c.is_identity(f) and f not in edges]
    if missing:
        raise IncompleteInputError(f"no label for morphism {missing[0]}")
    for mors in reduced_chains(c, level + 1):
        for word in cube_words(len(mors) - 1):
            fill(mors, word)
    return HomotopyDiagram(gamma, level, labels, algebra)


def vogt_check(diagram: HomotopyDiagram) -> VogtReport:
    """Check the identity, ``t_i = 0`` and composition equations on every stored cell."""
    c, alg = diagram.base, diagram.algebra
    report = VogtReport()
    edge_labels = {}
    for key, val in diagram.labels.items():
        if len(key.morphisms) == 1 and not c.is_identity(key.morphisms[0]):
            edge_labels[key.morphisms[0]] = val
    _check_associativity(c, alg, edge_labels)

    def compare(key, rule, expected, found):
        if expected is None:
            report.unchecked += 1
            return
        report.checked += 1
        if not alg.equal(expected, found):
            report.violations.append(VogtViolation(key, rule, expected, found))

    for key in sorted(diagram.labels, key=lambda k: (len(k.morphisms), k.morphisms, tuple(map(str, k.word)))):
        val = diagram.labels[key]
        mors, word = key.morphisms, key.word
        if len(word) != len(mors) - 1:
            raise ArgumentError(f"cell {mors} needs a word of length {len(mors) - 1}")
        red = diagram._reduce_identity(mors, word)
        if red is not None:
            if red[0] == "identity":
                compare(key, "identity", alg.identity(c.dom(mors[0])), val)
            else:
                compare(key, red[0], diagram.lookup(red[1], red[2]), val)
        for i, w in enumerate(word, start=1):
            if w == 0:
                merged = mors[:i - 1] + (c.compose(mors[i], mors[i - 1]),) + mors[i + 1:]
                compare(key, f"t{i}=0", diagram.lookup(merged, word[:i - 1] + word[i:]), val)
            elif w == 1:
                upper = diagram.lookup(mors[i:], word[i:])
                lower = diagram.lookup(mors[:i], word[:i - 1])
                expected = None if upper is None or lower is None else alg.compose(upper, lower)
                compare(key, f"t{i}=1 composition", expected, val)
    return report


def _check_associativity(c, alg, edges):
    items = list(edges.items())
    for (f, lf), (g, lg), (h, lh) in itertools.product(items, repeat=3):
        if c.cod(f) == c.dom(g) and c.cod(g) == c.dom(h):
            if not alg.equal(alg.compose(alg.compose(lh, lg), lf), alg.compose(lh, alg.compose(lg, lf))):
                raise StructuralError(f"label algebra is not associative on morphisms {f}, {g}, {h}")


# ---------------------------------------------------------------------------
# obstructions


@dataclass
class ObstructionProblem:
    gamma: GCat
    alpha: list
    k: int
    coeff: CoefficientSystem
    values: dict           # chain of length k+2 -> coefficient vector


def obstruction_assemble(p: ObstructionProblem) -> Cochain:
    """The obstruction cochain in degree ``k + 2``; missing or inconsistent values raise."""
    if p.k < 0:
        raise ArgumentError("k must be nonnegative")
    cx = BredonComplex(p.gamma, p.alpha, p.coeff, p.k + 2)
    return cochain_from_values(cx, p.k + 2, p.values)


def top_cell_classes(diagram: HomotopyDiagram, cx: BredonComplex, n: int) -> dict:
    """Coefficient classes carried by the interiors of the cubes of normal ``n``-chains."""
    out = {}
    for sigma in cx.coeff.chains(n):
        if not cx.is_normal(sigma):
            continue
        lab = diagram.lookup(sigma.morphisms, ("*",) * (n - 1))
        cls = diagram.algebra.class_of(lab) if lab is not None else None
        out[sigma] = cls if cls is not None else [0] * cx.coeff.value(sigma).rank
    return out


def class_obstruction_values(diagram: HomotopyDiagram, coeff: CoefficientSystem, k: int,
                             alpha=None, base: dict | None = None) -> dict:
    """Oracle values ``o(tau) = base(tau) + sum_j (-1)^j M(d^j) class(tau d^j)`` on ``(k+2)``-chains."""
    cx = BredonComplex(diagram.gamma, alpha, coeff, k + 2)
    classes = top_cell_classes(diagram, cx, k + 1)
    out = {}
    for tau in coeff.chains(k + 2):
        if not cx.is_normal(tau):
            continue
        acc = list(base.get(tau, [0] * coeff.value(tau).rank)) if base else [0] * coeff.value(tau).rank
        for j in range(k + 3):
            face = chain_face(cx.base, tau, j)
            if face not in classes:
                continue
            img = mat_vec(coeff.face(tau, j), classes[face])
            sign = -1 if j % 2 else 1
            acc = [a + sign * b for a, b in zip(acc, img)]
        out[tau] = acc
    return out


def modify_diagram(diagram: HomotopyDiagram, g: Cochain) -> HomotopyDiagram:
    """Act by ``-g`` on the interior label of every top cube; lower cells are kept."""
    n = g.degree
    cx = g.complex
    labels = dict(diagram.labels)
    amb = g.ambient()
    for sigma in cx.coeff.chains(n):
        if not cx.is_normal(sigma):
            continue
        vec = cx.transport(n, sigma, amb)
        key = CellKey(sigma.morphisms, ("*",) * (n - 1))
        lab = diagram.lookup(key.morphisms, key.word)
        if lab is None:
            raise IncompleteInputError(f"no top cell for {sigma}")
        labels[key] = diagram.algebra.act(lab, [-x for x in vec])
    return diagram.copy_with(labels)
