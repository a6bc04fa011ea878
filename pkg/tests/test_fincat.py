import itertools

import pytest
from hypothesis import given, settings, strategies as st

from cohera.errors import ArgumentError, StructuralError
from cohera.fincat import (
    Chain, FinCat, Functor, GCat, SetFunctor, act_chain, category_from_poset, chain_categories,
    chain_restrict, constant_set_functor, cyclic_group, dihedral_group, direct_product,
    discrete_category, enumerate_chains, fibre_colimit_check, grothendieck, grothendieck_projection,
    left_kan_extension, poset_category, symmetric_group, terminal_category, trivial_gcat,
    trivial_group, validate_category, validate_gcat, validate_group,
)


def swap_gcat():
    """Z/2 swapping the two objects of the discrete category on {a, b}."""
    base = discrete_category(["a", "b"])
    return GCat(cyclic_group(2), base, [[0, 1], [1, 0]], [[0, 1], [1, 0]])


def brute_axioms(c: FinCat):
    """Independent check of unit and associativity laws by listing composable pairs."""
    for f in range(c.n_morphisms):
        assert c.compose(c.identity[c.cod(f)], f) == f
        assert c.compose(f, c.identity[c.dom(f)]) == f
    for f, g, h in itertools.product(range(c.n_morphisms), repeat=3):
        if c.cod(f) == c.dom(g) and c.cod(g) == c.dom(h):
            assert c.compose(h, c.compose(g, f)) == c.compose(c.compose(h, g), f)


@pytest.mark.parametrize("n, objects, morphisms", [(0, 1, 1), (1, 2, 3), (2, 3, 6), (3, 4, 10)])
def test_poset_counts(n, objects, morphisms):
    c = poset_category(n)
    assert (c.n_objects, c.n_morphisms) == (objects, morphisms)
    assert validate_category(c).ok
    brute_axioms(c)


def test_negative_poset_rejected():
    with pytest.raises(ArgumentError):
        poset_category(-1)


def test_broken_composition_is_reported():
    # two parallel arrows out of a with a composition table that sends id o f to g
    c = FinCat(["a", "b"], [(0, 0), (1, 1), (0, 1), (0, 1)], [0, 1],
               {(0, 0): 0, (1, 1): 1, (2, 0): 3, (3, 0): 3, (1, 2): 2, (1, 3): 3})
    report = validate_category(c)
    assert not report.ok


@st.composite
def random_posets(draw):
    n = draw(st.integers(1, 5))
    edges = draw(st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] < e[1])))
    reach = {(i, i) for i in range(n)} | set(edges)
    changed = True
    while changed:
        extra = {(a, d) for (a, b) in reach for (c, d) in reach if b == c} - reach
        reach |= extra
        changed = bool(extra)
    return n, reach


@given(random_posets())
@settings(max_examples=60, deadline=None)
def test_random_posets_are_categories(data):
    n, reach = data
    c = category_from_poset(range(n), lambda a, b: (a, b) in reach)
    assert c.n_morphisms == len(reach)
    assert validate_category(c).ok
    brute_axioms(c)
    assert c.is_acyclic()


@given(random_posets(), st.integers(0, 3))
@settings(max_examples=40, deadline=None)
def test_chain_count_matches_composable_tuples(data, m):
    n, reach = data
    c = category_from_poset(range(n), lambda a, b: (a, b) in reach)
    brute = sum(1 for objs in itertools.product(range(n), repeat=m + 1)
                if all((a, b) in reach for a, b in zip(objs, objs[1:])))
    assert len(enumerate_chains(c, m)) == brute


@pytest.mark.parametrize("group", [trivial_group(), cyclic_group(5), symmetric_group(3), dihedral_group(4),
                                   direct_product(cyclic_group(2), cyclic_group(3))])
def test_group_tables_are_groups(group):
    assert validate_group(group).ok
    for a, b, c in itertools.product(group.elements, repeat=3):
        assert group.mul(group.mul(a, b), c) == group.mul(a, group.mul(b, c))
    for a in group.elements:
        assert group.mul(a, group.inv(a)) == group.identity


def test_group_orders_and_subgroups():
    assert symmetric_group(3).order == 6
    assert dihedral_group(4).order == 8
    # S3: trivial, three of order 2, A3, whole group
    assert len(symmetric_group(3).subgroups()) == 6
    assert len(dihedral_group(4).subgroups()) == 10
    assert len(cyclic_group(4).subgroups()) == 3


def test_cosets_partition_group():
    g = symmetric_group(3)
    for h in g.subgroups():
        cosets = g.left_cosets(h)
        assert len(cosets) * len(h) == g.order
        assert sorted(x for cs in cosets for x in cs) == list(g.elements)


def test_trivial_grothendieck_of_point_is_terminal():
    total = grothendieck(trivial_gcat(terminal_category()))
    assert (total.n_objects, total.n_morphisms) == (1, 1)


def test_grothendieck_of_z2_on_interval():
    gamma = trivial_gcat(poset_category(1), cyclic_group(2))
    total = grothendieck(gamma)
    assert (total.n_objects, total.n_morphisms) == (2, 6)
    assert validate_category(total).ok
    assert grothendieck_projection(gamma, total).validate().ok


@pytest.mark.parametrize("op", [False, True])
def test_grothendieck_composition_law(op):
    gamma = swap_gcat()
    total = grothendieck(gamma, op=op)
    assert validate_category(total).ok
    grp, base = gamma.group, gamma.base
    for (q, p), r in total.composition_table().items():
        g1, f1 = total.mor_labels[p]
        g2, f2 = total.mor_labels[q]
        moved = gamma.mor_action[g2][f1]
        inner = base.compose(moved, f2) if op else base.compose(f2, moved)
        assert total.mor_labels[r] == (grp.mul(g2, g1), inner)


def test_bad_action_is_rejected():
    base = poset_category(1)
    # swapping the objects of [1] cannot be a functor
    gamma = GCat(cyclic_group(2), base, [[0, 1], [1, 0]], [[0, 1, 2], [2, 1, 0]])
    assert not validate_gcat(gamma).ok
    with pytest.raises(StructuralError):
        grothendieck(gamma)


def test_chain_restrict_composes():
    c = poset_category(3)
    sigma = enumerate_chains(c, 3)
    full = next(s for s in sigma if s.objects == (0, 1, 2, 3))
    face = chain_restrict(c, full, (0, 2, 3))
    assert face.objects == (0, 2, 3)
    assert c.morphisms[face.morphisms[0]] == (0, 2)
    degen = chain_restrict(c, full, (0, 0, 1))
    assert degen.is_degenerate(c)


def test_constant_point_chain_data():
    gamma = trivial_gcat(terminal_category(), cyclic_group(3))
    data = chain_categories(gamma, 3)
    assert data.simplices.base.n_objects == 4
    assert [s.length for s in data.nondegenerate.base.objects] == [1]
    assert data.validate().ok


def test_chain_data_projection_and_counit():
    gamma = swap_gcat()
    data = chain_categories(gamma, 2)
    assert data.validate().ok
    assert all(x == 0 for x in data.projection.obj_map)
    for x, sigma in enumerate(data.counit):
        assert sigma == data.total.objects[x]


def test_counit_is_universal_on_interval():
    data = chain_categories(trivial_gcat(poset_category(1)), 2)
    assert fibre_colimit_check(data) == (True, True)


def test_kan_extension_of_identity():
    c = poset_category(2)
    x = SetFunctor(c, [1, 2, 2], [(0,), (0,), (0,), (0, 1), (0, 1), (0, 1)])
    assert x.validate().ok
    ident = Functor(c, c, list(range(3)), list(range(c.n_morphisms)))
    ext = left_kan_extension(x, ident)
    assert ext.functor.sizes == x.sizes


def test_kan_extension_discrete_to_point():
    d1 = discrete_category(["a", "b"])
    d2 = terminal_category()
    f = Functor(d1, d2, [0, 0], [0, 0])
    ext = left_kan_extension(constant_set_functor(d1), f)
    assert ext.functor.sizes == (2,)


@given(random_posets())
@settings(max_examples=30, deadline=None)
def test_kan_extension_of_singleton_over_connected_fibres(data):
    n, reach = data
    c = category_from_poset(range(n), lambda a, b: (a, b) in reach)
    # collapse to the terminal category: value is the set of components
    f = Functor(c, terminal_category(), [0] * n, [0] * c.n_morphisms)
    ext = left_kan_extension(constant_set_functor(c), f)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    for a, b in reach:
        parent[find(a)] = find(b)
    assert ext.functor.sizes == (len({find(a) for a in range(n)}),)


def test_act_chain_respects_group():
    gamma = swap_gcat()
    sigma = Chain((0, 0), (0,))
    assert act_chain(gamma, 1, sigma) == Chain((1, 1), (1,))
    assert act_chain(gamma, 0, sigma) == sigma
