import cmath
import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from cohera.equivariant import (
    Monomial, RepFamily, SubgroupFamily, all_families, all_subgroups_family, brute_force_gmaps, build_EF,
    check_decomposition, compatible_check, conjugate_family, cyclotomic_polynomial, double_cosets, f_X,
    find_intertwiner, fx_comparison, gamma_coherence, gamma_g, gset_simplicial, isotropy_check,
    join_multiplicity_plan, monomial_identity, ordered_complex, reduce_cyclotomic, trivial_family,
)
from cohera.errors import ArgumentError, IsotropyError, StructuralError
from cohera.fincat import cyclic_group, dihedral_group, symmetric_group, validate_gcat

import oracles

EF_GROUPS = {
    "Z2": lambda: cyclic_group(2),
    "Z4": lambda: cyclic_group(4),
    "S3": lambda: symmetric_group(3),
    "D4": lambda: dihedral_group(4),
}


def coset_index(group, h):
    cosets, perms = oracles.coset_action(group, h)
    return {c: i for i, c in enumerate(cosets)}, perms


# -- families -----------------------------------------------------------------

@pytest.mark.parametrize("name,expected", [("Z2", 3), ("Z4", 7), ("S3", 15), ("D4", 255)])
def test_family_counts(name, expected):
    assert len(all_families(EF_GROUPS[name]())) == expected


def test_every_family_is_conjugation_closed():
    for make in EF_GROUPS.values():
        for fam in all_families(make()):
            assert fam.validate() == []


def test_non_closed_family_rejected():
    s3 = symmetric_group(3)
    order_two = next(h for h in s3.subgroups() if len(h) == 2)
    fam = SubgroupFamily(s3, [frozenset({s3.identity}), order_two])
    assert fam.validate()
    with pytest.raises(StructuralError):
        build_EF(s3, fam)


# -- E_F against brute force ----------------------------------------------------

@pytest.mark.parametrize("name", sorted(EF_GROUPS))
def test_ef_homs_match_equivariant_maps(name):
    group = EF_GROUPS[name]()
    ef = build_EF(group, all_subgroups_family(group))
    base = ef.gcat.base
    for h in group.subgroups():
        hidx, hperms = coset_index(group, h)
        for k in group.subgroups():
            kidx, kperms = coset_index(group, k)
            maps = oracles.equivariant_functions(group, hperms, kperms)
            assert len(maps) == len(brute_force_gmaps(group, h, k))
            for x in hidx:
                for y in kidx:
                    want = any(f[hidx[x]] == kidx[y] for f in maps)
                    got = base.hom(ef.object_id(h, x), ef.object_id(k, y))
                    assert len(got) == int(want)


@pytest.mark.parametrize("name", sorted(EF_GROUPS))
def test_ef_is_a_g_category(name):
    group = EF_GROUPS[name]()
    ef = build_EF(group, all_subgroups_family(group))
    assert validate_gcat(ef.gcat).ok


def test_ef_object_count_is_sum_of_indices():
    d4 = dihedral_group(4)
    ef = build_EF(d4, all_subgroups_family(d4))
    assert ef.gcat.base.n_objects == sum(8 // len(h) for h in d4.subgroups())


# -- f_X ----------------------------------------------------------------------

def small_complexes(limit=50, count=25):
    out, seed = [], 0
    while len(out) < count:
        group, perms, simplices = oracles.random_g_complex(seed)
        x = ordered_complex(group, perms, simplices)
        if sum(x.sset.size(n) for n in range(x.sset.bound + 1)) <= limit:
            out.append((seed, x))
        seed += 1
    return out


@pytest.mark.parametrize("seed,x", small_complexes(), ids=lambda v: str(v) if isinstance(v, int) else "")
def test_fx_is_an_equivariant_functor(seed, x):
    result = f_X(x, all_subgroups_family(x.group))
    assert result.ok
    assert oracles.equivariant_functor_problems(result) == []


def test_fx_preserves_isotropy():
    for _, x in small_complexes(count=8):
        group = x.group
        result = f_X(x, all_subgroups_family(group))
        sd, ef = result.sd, result.ef.gcat
        for o in range(sd.base.n_objects):
            here = {g for g in group.elements if sd.obj_action[g][o] == o}
            there = {g for g in group.elements if ef.obj_action[g][result.functor.obj_map[o]] == result.functor.obj_map[o]}
            assert here == there


def test_different_representatives_give_isomorphic_functors():
    for _, x in small_complexes(count=8):
        fam = all_subgroups_family(x.group)
        first = f_X(x, fam, choose=min)
        second = f_X(x, fam, choose=max)
        comparison = fx_comparison(first, second)
        assert len(comparison) == first.sd.base.n_objects


def test_discrete_orbit_maps_to_its_coset():
    z4 = cyclic_group(4)
    x = gset_simplicial(z4, [[0, 1], [1, 0], [0, 1], [1, 0]])
    result = f_X(x, all_subgroups_family(z4))
    assert [h for h, _ in result.images] == [frozenset({0, 2})] * 2
    assert {c for _, c in result.images} == {frozenset({0, 2}), frozenset({1, 3})}


def test_isotropy_outside_family_raises():
    z2 = cyclic_group(2)
    x = gset_simplicial(z2, [[0], [0]])
    free_only = SubgroupFamily(z2, [frozenset({0})])
    assert not isotropy_check(x, free_only)
    with pytest.raises(IsotropyError):
        f_X(x, free_only)


def test_order_reversing_action_rejected():
    z2 = cyclic_group(2)
    with pytest.raises(StructuralError):
        ordered_complex(z2, [[0, 1], [1, 0]], [(0,), (1,), (0, 1)])


# -- double cosets ----------------------------------------------------------------

def transporter(group, h, k):
    return {g for g in group.elements if all(group.mul(group.mul(g, a), group.inv(g)) in k for a in h)}


@pytest.mark.parametrize("name", sorted(EF_GROUPS))
def test_double_cosets_partition_transporter(name):
    group = EF_GROUPS[name]()
    for h, k in itertools.product(group.subgroups(), repeat=2):
        d = double_cosets(group, h, k)
        assert check_decomposition(group, d) == []
        assert set(d.normalizer) == transporter(group, h, k)
        union = set()
        for gi, block in zip(d.reps, d.blocks):
            assert set(block) == {group.mul(group.mul(a, gi), b) for a in k for b in h}
            assert not union & set(block)
            union |= set(block)
        assert union == set(d.normalizer)
        for g in d.normalizer:
            i, j, x = d.factor(group, g)
            assert x in h
            assert group.mul(group.mul(d.cosets[i][j], d.reps[i]), x) == g


def test_double_cosets_of_order_two_subgroup_in_z4():
    z4 = cyclic_group(4)
    d = double_cosets(z4, {0, 2}, {0, 2})
    assert sorted(map(sorted, d.blocks)) == [[0, 2], [1, 3]]


def test_factor_outside_transporter_raises():
    s3 = symmetric_group(3)
    h = next(x for x in s3.subgroups() if len(x) == 2)
    k = next(x for x in s3.subgroups() if len(x) == 2 and x != h)
    d = double_cosets(s3, h, k)
    outside = next(g for g in s3.elements if g not in d.normalizer)
    with pytest.raises(ArgumentError):
        d.factor(s3, outside)


# -- monomials and cyclotomic arithmetic ---------------------------------------

def monomials(dim, modulus):
    return st.tuples(st.permutations(range(dim)), st.lists(st.integers(0, modulus - 1), min_size=dim, max_size=dim)) \
        .map(lambda pe: Monomial(tuple(pe[0]), tuple(pe[1]), modulus))


def to_complex(m):
    zeta = cmath.exp(2j * cmath.pi / m.modulus)
    return [[0 if e is None else zeta ** e for e in row] for row in m.dense()]


def complex_product(a, b):
    return [[sum(a[i][t] * b[t][j] for t in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


@given(st.integers(1, 4).flatmap(lambda n: st.integers(1, 6).flatmap(
    lambda q: st.tuples(monomials(n, q), monomials(n, q)))))
@settings(max_examples=100, deadline=None)
def test_monomial_product_matches_complex_matrices(pair):
    a, b = pair
    lhs = to_complex(a * b)
    rhs = complex_product(to_complex(a), to_complex(b))
    assert all(abs(x - y) < 1e-9 for r, s in zip(lhs, rhs) for x, y in zip(r, s))
    assert a * a.inverse() == monomial_identity(a.dim, a.modulus)


@pytest.mark.parametrize("n,coeffs", [(1, [-1, 1]), (2, [1, 1]), (4, [1, 0, 1]), (6, [1, -1, 1]),
                                      (12, [1, 0, -1, 0, 1])])
def test_cyclotomic_polynomials(n, coeffs):
    assert cyclotomic_polynomial(n) == coeffs


@given(st.integers(1, 30))
def test_cyclotomic_factors_of_x_power_minus_one(n):
    prod = [1]
    for d in range(1, n + 1):
        if n % d == 0:
            phi = cyclotomic_polynomial(d)
            prod = [sum(prod[i] * phi[k - i] for i in range(len(prod)) if 0 <= k - i < len(phi))
                    for k in range(len(prod) + len(phi) - 1)]
    assert prod == [-1] + [0] * (n - 1) + [1]


@given(st.integers(1, 12).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.integers(-5, 5), max_size=2 * n))))
def test_reduction_preserves_complex_value(args):
    n, coeffs = args
    zeta = cmath.exp(2j * cmath.pi / n)
    reduced = reduce_cyclotomic(coeffs, n)
    assert len(reduced) == len(cyclotomic_polynomial(n)) - 1
    assert abs(sum(c * zeta ** i for i, c in enumerate(coeffs)) - sum(c * zeta ** i for i, c in enumerate(reduced))) < 1e-6


# -- compatibility ----------------------------------------------------------------

def exponent(group):
    return math.lcm(*(group.element_order(g) for g in group.elements))


def block_sum(a, b):
    return Monomial(a.perm + tuple(p + a.dim for p in b.perm), a.exps + b.exps, a.modulus)


@pytest.mark.parametrize("name", ["S3", "D4"])
def test_compatibility_matches_character_oracle(name):
    group = EF_GROUPS[name]()
    modulus = exponent(group)
    for fam in all_families(group):
        for reps in oracles.character_families(group, fam, modulus, limit=12):
            report = compatible_check(reps, fam)
            assert report.compatible == oracles.float_compatible(group, fam, reps)


def test_restricted_global_character_is_compatible():
    s3 = symmetric_group(3)
    sign = oracles.sign_character(s3)
    fam = all_subgroups_family(s3)
    reps = RepFamily(1, 6, {h: {a: Monomial((0,), (0 if sign[a] == 1 else 3,), 6) for a in h} for h in fam.subgroups})
    assert compatible_check(reps, fam).compatible


def test_incompatible_family_gives_witness():
    z2 = cyclic_group(2)
    fam = all_subgroups_family(z2)
    reps = RepFamily(1, 2, {frozenset({0}): {0: Monomial((0,), (0,), 2)},
                            frozenset({0, 1}): {0: Monomial((0,), (0,), 2), 1: Monomial((0,), (1,), 2)}})
    assert compatible_check(reps, fam).compatible
    d4 = dihedral_group(4)
    fam = all_subgroups_family(d4)
    good = oracles.character_families(d4, fam, 4, limit=200)
    bad = [r for r in good if not oracles.float_compatible(d4, fam, r)]
    report = compatible_check(bad[0], fam)
    assert not report.compatible
    h, k, g, a = report.witness
    assert bad[0].character(k, d4.conj(g, a)) != bad[0].character(h, a)


def test_two_dimensional_sums_and_conjugation():
    d4 = dihedral_group(4)
    fam = all_subgroups_family(d4)
    ones = oracles.character_families(d4, fam, 4, limit=6)
    for a, b in itertools.combinations(ones, 2):
        reps = RepFamily(2, 4, {h: {x: block_sum(a.reps[h][x], b.reps[h][x]) for x in h} for h in fam.subgroups})
        assert compatible_check(reps, fam).compatible == oracles.float_compatible(d4, fam, reps)
        swap = Monomial((1, 0), (1, 3), 4)
        moved = conjugate_family(reps, {h: swap for h in fam.subgroups})
        assert compatible_check(moved, fam).compatible == compatible_check(reps, fam).compatible


def test_modulus_must_cover_element_orders():
    s3 = symmetric_group(3)
    fam = all_subgroups_family(s3)
    with pytest.raises(ArgumentError):
        compatible_check(trivial_family(fam, 1, 2), fam)
    assert compatible_check(trivial_family(fam, 2, 6), fam).compatible


def test_intertwiners_and_coherence():
    z4 = cyclic_group(4)
    h = frozenset({0, 2})
    fam = SubgroupFamily(z4, [h])
    reps = RepFamily(2, 4, {h: {0: monomial_identity(2, 4), 2: Monomial((0, 1), (2, 2), 4)}})
    d = double_cosets(z4, h, h)
    gammas = [find_intertwiner(z4, h, h, gi, reps) for gi in d.reps]
    assert all(gm is not None for gm in gammas)
    for g in z4.elements:
        gamma_g(z4, g, h, h, d, reps, gammas)
    report = gamma_coherence(z4, h, h, h, 1, 3, reps, {(h, h): gammas})
    assert report.commutes
    assert compatible_check(reps, fam).compatible


# -- join multiplicities ------------------------------------------------------------

@given(st.integers(1, 9), st.integers(1, 7))
def test_plan_single_pair(t1, m1):
    plan = join_multiplicity_plan({("H", 0): [(t1, m1)]}, 2)
    assert plan == [1, t1 * math.factorial(m1)]


def test_plan_multiplies_over_pairs_and_levels():
    bounds = {("H", 0): [(2, 3), (1, 2)], ("K", 1): [(1, 1), (3, 1)]}
    assert join_multiplicity_plan(bounds) == [1, 12, 12 * 2 * 3]


def test_plan_rejects_bad_bounds():
    with pytest.raises(ArgumentError):
        join_multiplicity_plan({})
    with pytest.raises(ArgumentError):
        join_multiplicity_plan({("H", 0): [(0, 1)]})
    with pytest.raises(ArgumentError):
        join_multiplicity_plan({("H", 0): [(1, 1)]}, 5)
