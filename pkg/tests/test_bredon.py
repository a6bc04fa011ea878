import random

import pytest
from hypothesis import given, settings, strategies as st

from cohera import bredon
from cohera.bredon import (
    BredonComplex, CellKey, FreeComposition, HomotopyDiagram, IntegerMatrix, ObstructionProblem,
    class_obstruction_values, cocycle_check, cochain_from_values, complete_diagram, constant_system,
    cyclic_abelian, integers, is_coboundary, modify_diagram, obstruction_assemble, smith_normal_form,
    solve_integer, table_system, vogt_check,
)
from cohera.errors import ArgumentError, IncompleteInputError, StructuralError, UnsupportedInputError
from cohera.fincat import (
    GCat, category_from_poset, cyclic_group, discrete_category, enumerate_chains, poset_category, trivial_gcat,
)

import oracles

matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=r, max_size=r)))


def is_diagonal_chain(d):
    diag = bredon.diagonal(d)
    off = any(x for i, row in enumerate(d) for j, x in enumerate(row) if i != j)
    nz = [x for x in diag if x]
    return (not off and all(x > 0 for x in nz) and all(b % a == 0 for a, b in zip(nz, nz[1:]))
            and diag[:len(nz)] == nz)


# -- Smith normal form ----------------------------------------------------------

def test_snf_example():
    _, d, _ = smith_normal_form([[2, 4], [6, 8]])
    assert bredon.diagonal(d) == [2, 4]


def test_snf_zero_and_identity():
    _, d, _ = smith_normal_form([[0, 0], [0, 0]])
    assert d == [[0, 0], [0, 0]]
    u, d, v = smith_normal_form([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    ident = bredon.identity_matrix(3)
    assert (u, d, v) == (ident, ident, ident)


@given(matrices)
@settings(max_examples=300, deadline=None)
def test_snf_contract(m):
    u, d, v = smith_normal_form(m)
    assert bredon.mat_mul(bredon.mat_mul(u, m), v) == d
    assert abs(oracles.det_bareiss(u)) == 1
    assert abs(oracles.det_bareiss(v)) == 1
    assert is_diagonal_chain(d)
    nz = [x for x in bredon.diagonal(d) if x]
    assert nz == oracles.invariant_factors_by_minors(m)
    assert nz == oracles.invariant_factors_by_reduction(m)


def test_snf_is_deterministic():
    m = [[3, 6, 9], [2, 4, 7], [1, 1, 1]]
    assert smith_normal_form(m) == smith_normal_form(m)


@given(matrices, st.data())
@settings(max_examples=200, deadline=None)
def test_solve_integer(m, data):
    cols = len(m[0])
    x = data.draw(st.lists(st.integers(-5, 5), min_size=cols, max_size=cols))
    b = bredon.mat_vec(m, x)
    sol = solve_integer(m, b)
    assert sol.solvable
    assert bredon.mat_vec(m, sol.x) == b
    # perturb one entry; when unsolvable the witness must certify it
    b2 = list(b)
    b2[0] += 1
    sol2 = solve_integer(m, b2)
    if sol2.solvable:
        assert bredon.mat_vec(m, sol2.x) == b2
    else:
        w = sol2.witness
        lhs = [sum(w.functional[i] * m[i][j] for i in range(len(m))) for j in range(cols)]
        val = sum(a * c for a, c in zip(w.functional, b2))
        if w.modulus:
            assert all(x % w.modulus == 0 for x in lhs) and val % w.modulus != 0
        else:
            assert not any(lhs) and val != 0


def test_divisibility_witness_text():
    res = is_coboundary([1], [[2]])
    assert not res.solvable
    assert str(res.witness) == "1 ∉ 2ℤ"
    ok = is_coboundary([2], [[2]])
    assert ok.solvable and ok.primitive == [1]
    assert is_coboundary([0], [[2]]).primitive == [0]


# -- coefficient systems and cohomology -----------------------------------------

@pytest.mark.parametrize("length", range(4))
def test_ordinals_are_acyclic(length):
    gamma = trivial_gcat(poset_category(length))
    cx = BredonComplex(gamma, None, constant_system(gamma, bound=4), 3)
    assert str(cx.cohomology(0)) == "Z"
    assert all(cx.cohomology(n).is_zero for n in range(1, 4))


def test_point_has_zero_coboundaries():
    gamma = trivial_gcat(poset_category(0))
    cx = BredonComplex(gamma, None, constant_system(gamma, bound=4), 3)
    assert [cx.rank(n) for n in range(4)] == [1, 0, 0, 0]


def test_normalized_interval_complex():
    gamma = trivial_gcat(poset_category(1))
    cx = BredonComplex(gamma, None, constant_system(gamma, bound=4), 3)
    # two vertices and one edge survive; cohomology is Z in degree 0
    assert [cx.rank(n) for n in range(3)] == [2, 1, 0]
    assert [str(cx.cohomology(n)) for n in range(3)] == ["Z", "0", "0"]


def test_full_relative_pair_vanishes():
    gamma = trivial_gcat(poset_category(2))
    alpha = [range(gamma.base.n_morphisms)]
    cx = BredonComplex(gamma, alpha, constant_system(gamma, bound=4), 3)
    assert all(cx.cohomology(n).is_zero for n in range(4))


def test_swapped_points_have_diagonal_invariants():
    base = discrete_category("ab")
    gamma = GCat(cyclic_group(2), base, [[0, 1], [1, 0]], [[0, 1], [1, 0]])
    cx = BredonComplex(gamma, None, constant_system(gamma, bound=3), 2)
    assert str(cx.cohomology(0)) == "Z"


def test_torsion_coefficients():
    gamma = trivial_gcat(poset_category(1))
    cx = BredonComplex(gamma, None, constant_system(gamma, cyclic_abelian(4), bound=3), 1)
    assert str(cx.cohomology(0)) == "Z/4"
    assert cx.cohomology(1).is_zero


def test_circle_like_shape_has_degree_one_class():
    # two points joined by two edges: nerve of the poset a, b < c, d
    leq = {("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")}
    c = category_from_poset("abcd", lambda x, y: x == y or (x, y) in leq)
    gamma = trivial_gcat(c)
    cx = BredonComplex(gamma, None, constant_system(gamma, bound=3), 2)
    assert str(cx.cohomology(0)) == "Z"
    assert str(cx.cohomology(1)) == "Z"


def test_sign_twist_on_swapped_points():
    # Z/2 swaps two points and acts by -1: invariant cochains satisfy f(b) = -f(a)
    base = discrete_category("ab")
    gamma = GCat(cyclic_group(2), base, [[0, 1], [1, 0]], [[0, 1], [1, 0]])
    coeff = constant_system(gamma, bound=3, action=[[[1]], [[-1]]])
    cx = BredonComplex(gamma, None, coeff, 1)
    assert str(cx.cohomology(0)) == "Z"


def test_sign_twist_on_fixed_point_kills_integers():
    gamma = trivial_gcat(poset_category(0), cyclic_group(2))
    coeff = constant_system(gamma, bound=3, action=[[[1]], [[-1]]])
    assert BredonComplex(gamma, None, coeff, 1).cohomology(0).is_zero


@pytest.mark.parametrize("seed", range(12))
def test_random_systems_square_to_zero(seed):
    gamma, coeff, label = oracles.random_coefficient_system(seed)
    assert coeff.validate() == [], label
    cx = BredonComplex(gamma, None, coeff, 3)
    for n in range(3):
        first, second = cx.ambient_coboundary(n), cx.ambient_coboundary(n + 1)
        if first and second and first[0] and second[0]:
            assert not any(any(r) for r in bredon.mat_mul(second, first)), label


@pytest.mark.parametrize("seed", range(12))
def test_rational_ranks_match_oracle(seed):
    gamma, coeff, label = oracles.random_coefficient_system(seed)
    cx = BredonComplex(gamma, None, coeff, 2)
    for n in range(2):
        if any(g.relations for g in [coeff.value(s) for s in cx.degrees[n].reps]):
            return
        delta = cx.coboundary(n)
        prev = cx.coboundary(n - 1) if n else []
        rk = oracles.rational_rank(delta) if delta and delta[0] else 0
        rk_prev = oracles.rational_rank(prev) if prev and prev[0] else 0
        assert cx.cohomology(n).free_rank == cx.rank(n) - rk - rk_prev, label


def test_invalid_system_rejected():
    gamma = trivial_gcat(poset_category(1))
    chains = enumerate_chains(gamma.base, 0) + enumerate_chains(gamma.base, 1)
    values = {s: integers(1) for s in chains}
    faces = {(s, i): [[2]] for s in chains if s.morphisms for i in range(2)}
    coeff = table_system(gamma, 1, values, faces)
    assert coeff.validate() == []
    values2 = dict(values)
    values2[chains[0]] = integers(2)
    broken = table_system(gamma, 1, values2, faces)
    assert broken.validate()


def test_degree_above_bound_rejected():
    gamma = trivial_gcat(poset_category(1))
    with pytest.raises(ArgumentError):
        BredonComplex(gamma, None, constant_system(gamma, bound=2), 2)


# -- homotopy diagrams --------------------------------------------------------

def ordinal_edges(length):
    c = poset_category(length)
    return c, {f: (f"e{c.morphisms[f][0]}{c.morphisms[f][1]}",) for f in range(c.n_morphisms) if not c.is_identity(f)}


def test_strict_diagram_passes():
    c = poset_category(2)
    alg = IntegerMatrix(2)
    mats = {}
    for f in range(c.n_morphisms):
        a, b = c.morphisms[f]
        mats[f] = ((1, b - a), (0, 1))
    gamma = trivial_gcat(c)
    diagram = complete_diagram(gamma, 1, {f: m for f, m in mats.items() if not c.is_identity(f)}, {}, alg)
    report = vogt_check(diagram)
    assert report.ok and report.checked > 0


def test_homotopy_square_on_two_simplex():
    c, edges = ordinal_edges(2)
    gamma = trivial_gcat(c)
    f01, f12 = c.hom(0, 1)[0], c.hom(1, 2)[0]
    diagram = complete_diagram(gamma, 1, edges, {(f01, f12): ("H",)}, FreeComposition())
    assert vogt_check(diagram).ok
    assert diagram.lookup((f01, f12), ("*",)) == ("H",)
    assert diagram.lookup((f01, f12), (0,)) == edges[c.hom(0, 2)[0]]


def test_mismatched_composite_is_reported():
    c, edges = ordinal_edges(2)
    gamma = trivial_gcat(c)
    f01, f12 = c.hom(0, 1)[0], c.hom(1, 2)[0]
    diagram = complete_diagram(gamma, 1, edges, {}, FreeComposition())
    labels = dict(diagram.labels)
    labels[CellKey((f01, f12), (0,))] = ("wrong",)
    report = vogt_check(diagram.copy_with(labels))
    assert not report.ok
    assert any(v.rule == "t1=0" for v in report.violations)


def test_identity_rules():
    c, edges = ordinal_edges(1)
    gamma = trivial_gcat(c)
    f = c.hom(0, 1)[0]
    ident = c.identity[0]
    diagram = HomotopyDiagram(gamma, 1, {((f,), ()): ("e",), ((ident, f), ("*",)): ("e",)}, FreeComposition())
    assert vogt_check(diagram).ok
    bad = HomotopyDiagram(gamma, 1, {((f,), ()): ("e",), ((ident, f), ("*",)): ("x",)}, FreeComposition())
    assert not vogt_check(bad).ok


def test_non_associative_algebra_rejected():
    class Bad(FreeComposition):
        def compose(self, outer, inner):
            return (outer, inner)

    c, edges = ordinal_edges(3)
    gamma = trivial_gcat(c)
    diagram = HomotopyDiagram(gamma, 1, {((f,), ()): lab for f, lab in edges.items()}, Bad())
    with pytest.raises(StructuralError):
        vogt_check(diagram)


def test_missing_action_is_unsupported():
    with pytest.raises(UnsupportedInputError):
        IntegerMatrix(1).act(((1,),), [1])


# -- obstructions ---------------------------------------------------------------

def obstruction_setup(length=4, k=1):
    c, edges = ordinal_edges(length)
    gamma = trivial_gcat(c)
    coeff = constant_system(gamma, bound=k + 4)
    rng = random.Random(length * 10 + k)
    tops = {}
    for sigma in enumerate_chains(c, k + 1):
        if any(c.is_identity(f) for f in sigma.morphisms):
            continue
        tops[sigma.morphisms] = FreeComposition().act(("H",), [rng.randint(-3, 3)])
    diagram = complete_diagram(gamma, k + 1, edges, tops, FreeComposition())
    return gamma, coeff, diagram


def test_assembled_zero_obstruction():
    gamma, coeff, _ = obstruction_setup()
    values = {s: [0] for s in enumerate_chains(gamma.base, 3) if not any(gamma.base.is_identity(f) for f in s.morphisms)}
    o = obstruction_assemble(ObstructionProblem(gamma, [], 1, coeff, values))
    assert o.is_zero()
    assert cocycle_check(o, None)


def test_obstruction_values_are_face_sums():
    gamma, coeff, diagram = obstruction_setup()
    values = class_obstruction_values(diagram, coeff, 1)
    c = gamma.base
    for tau, val in values.items():
        expected = 0
        for j in range(4):
            face = bredon.chain_face(c, tau, j)
            lab = diagram.lookup(face.morphisms, ("*",))
            cls = FreeComposition().class_of(lab) or [0]
            expected += (-1) ** j * cls[0]
        assert val == [expected]


def test_assembled_obstruction_is_cocycle_and_zero_iff_values_zero():
    gamma, coeff, diagram = obstruction_setup()
    values = class_obstruction_values(diagram, coeff, 1)
    o = obstruction_assemble(ObstructionProblem(gamma, [], 1, coeff, values))
    assert cocycle_check(o, None)
    assert o.is_zero() == all(v == [0] for v in values.values())


def test_missing_value_is_incomplete():
    gamma, coeff, diagram = obstruction_setup()
    values = class_obstruction_values(diagram, coeff, 1)
    values.pop(next(iter(values)))
    with pytest.raises(IncompleteInputError):
        obstruction_assemble(ObstructionProblem(gamma, [], 1, coeff, values))


def test_modification_subtracts_coboundary():
    gamma, coeff, diagram = obstruction_setup()
    values = class_obstruction_values(diagram, coeff, 1)
    o = obstruction_assemble(ObstructionProblem(gamma, [], 1, coeff, values))
    cx = o.complex
    rng = random.Random(7)
    g = bredon.Cochain(2, cx, [rng.randint(-2, 2) for _ in range(cx.rank(2))])
    modified = modify_diagram(diagram, g)
    o2 = obstruction_assemble(ObstructionProblem(gamma, [], 1, coeff, class_obstruction_values(modified, coeff, 1)))
    dg = bredon.mat_vec(cx.coboundary(2), g.coords)
    assert o2.coords == [a - b for a, b in zip(o.coords, dg)]
    # acting by g and then by -g restores the labels
    back = modify_diagram(modified, bredon.Cochain(2, cx, [-x for x in g.coords]))
    for key, lab in diagram.labels.items():
        assert FreeComposition().class_of(back.labels[key]) == FreeComposition().class_of(lab)


def test_solving_then_modifying_kills_obstruction():
    gamma, coeff, diagram = obstruction_setup()
    values = class_obstruction_values(diagram, coeff, 1)
    o = obstruction_assemble(ObstructionProblem(gamma, [], 1, coeff, values))
    res = is_coboundary(o, None)
    assert res.solvable
    g = bredon.Cochain(2, o.complex, res.primitive)
    fixed = modify_diagram(diagram, g)
    o2 = obstruction_assemble(ObstructionProblem(gamma, [], 1, coeff, class_obstruction_values(fixed, coeff, 1)))
    assert o2.is_zero()


def test_zero_modification_is_identity():
    gamma, coeff, diagram = obstruction_setup()
    cx = BredonComplex(gamma, [], coeff, 3)
    same = modify_diagram(diagram, bredon.Cochain(2, cx, [0] * cx.rank(2)))
    assert same.labels == diagram.labels


@given(st.integers(2, 6), st.data())
@settings(max_examples=60, deadline=None)
def test_is_coboundary_matches_lattice_search(modulus, data):
    rows = data.draw(st.integers(1, 4))
    cols = data.draw(st.integers(0, 6))
    delta = [data.draw(st.lists(st.integers(-4, 4), min_size=cols, max_size=cols)) for _ in range(rows)]
    o = data.draw(st.lists(st.integers(-6, 6), min_size=rows, max_size=rows))
    rels = [[modulus * (i == j) for i in range(rows)] for j in range(rows)]
    res = is_coboundary(o, delta, rels)
    assert res.solvable == oracles.lattice_search(delta, o, modulus)
    if res.solvable and cols:
        image = bredon.mat_vec(delta, res.primitive)
        assert all((a - b) % modulus == 0 for a, b in zip(image, o))


def test_cochain_invariance_enforced():
    base = discrete_category("ab")
    gamma = GCat(cyclic_group(2), base, [[0, 1], [1, 0]], [[0, 1], [1, 0]])
    cx = BredonComplex(gamma, None, constant_system(gamma, bound=2), 1)
    a, b = enumerate_chains(base, 0)
    assert cochain_from_values(cx, 0, {a: [3], b: [3]}).coords
    with pytest.raises(StructuralError):
        cochain_from_values(cx, 0, {a: [3], b: [4]})
