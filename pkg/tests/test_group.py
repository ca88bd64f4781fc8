from itertools import permutations, product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gcolex.group import (
    GroupError,
    abelianization,
    centralizer,
    color_code_anyon_count,
    commutator_subgroup,
    conjugacy_classes,
    count_double_anyons,
    cyclic,
    dihedral,
    direct_product,
    from_table,
    load_table,
    make_group,
    quaternion,
    symmetric,
)

NAMES = ["Z2", "Z3", "Z4", "S3", "D4", "Q8", "S3xZ2"]


def axioms_hold(G):
    n = G.order
    full = np.arange(n)
    for g in range(n):
        assert np.array_equal(np.sort(G.mul[g]), full)
        assert np.array_equal(np.sort(G.mul[:, g]), full)
        assert G.mul[G.id, g] == g == G.mul[g, G.id]
        assert G.mul[g, G.inv[g]] == G.id
    assoc = G.mul[G.mul, :] == G.mul[:, G.mul]
    assert assoc.all()


@pytest.mark.parametrize("name", NAMES)
def test_named_groups_satisfy_axioms(name):
    G = make_group(name)
    axioms_hold(G)
    assert G.id == 0


def test_cyclic_two():
    G = cyclic(2)
    assert G.order == 2 and G.mul[1, 1] == 0


def test_symmetric_three_is_nonabelian():
    G = symmetric(3)
    assert G.order == 6
    assert any(G.mul[a, b] != G.mul[b, a] for a in G.elements() for b in G.elements())
    assert not G.is_abelian()


def test_direct_product_order():
    assert direct_product(symmetric(3), cyclic(2)).order == 12
    assert make_group("S3xZ2").order == 12


def test_latin_square_violation_is_reported():
    with pytest.raises(GroupError, match="Latin square"):
        from_table([[0, 1], [1, 1]])


def test_associativity_violation_names_a_triple():
    # a Latin square with identity 0 that is not associative
    table = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(GroupError, match=r"triple \(\d+, \d+, \d+\)"):
        from_table(table)


def test_identity_moved_to_index_zero():
    # Z3 written with the identity at index 2
    table = [[1, 2, 0], [2, 0, 1], [0, 1, 2]]
    G = from_table(table)
    assert G.id == 0
    axioms_hold(G)


def test_table_file_round_trip(tmp_path):
    G = symmetric(3)
    path = tmp_path / "s3.txt"
    path.write_text("6\n" + "\n".join(" ".join(map(str, row)) for row in G.mul) + "\n")
    H = load_table(path)
    assert np.array_equal(H.mul, G.mul)
    assert make_group(str(path)).order == 6


def test_bad_descriptor():
    with pytest.raises(GroupError):
        make_group("Y7")


@pytest.mark.parametrize("name,order", [("Z2", 1), ("Z4", 1), ("S3", 3), ("Q8", 2), ("D4", 2)])
def test_commutator_subgroup_order(name, order):
    G = make_group(name)
    assert commutator_subgroup(G).order == order


def test_commutator_subgroup_of_s3_is_three_cycles():
    G = symmetric(3)
    comm = commutator_subgroup(G)
    # brute force: all commutators, closed up
    comms = {int(G.product(G.inv[g], G.inv[h], g, h)) for g in G.elements() for h in G.elements()}
    assert set(comm.members) == comms
    assert all(G.product(g, g, g) == G.id for g in comm)


@pytest.mark.parametrize("name", NAMES)
def test_commutator_subgroup_is_normal(name):
    G = make_group(name)
    comm = commutator_subgroup(G)
    for g in G.elements():
        for k in comm:
            assert G.product(g, k, int(G.inv[g])) in comm


@pytest.mark.parametrize("name,order", [("Z3", 3), ("S3", 2), ("S3xZ2", 4), ("Q8", 4)])
def test_abelianization(name, order):
    G = make_group(name)
    ab = abelianization(G)
    assert ab.quotient.order == order
    assert ab.quotient.is_abelian()
    for a in G.elements():
        for b in G.elements():
            assert ab(int(G.mul[a, b])) == ab.quotient.mul[ab(a), ab(b)]
    assert set(ab.coset(ab.quotient.id)) == set(ab.kernel.members)


def test_conjugacy_classes():
    assert sorted(map(len, conjugacy_classes(cyclic(2)))) == [1, 1]
    assert sorted(map(len, conjugacy_classes(symmetric(3)))) == [1, 2, 3]
    assert len(conjugacy_classes(quaternion())) == 5
    for G in (symmetric(3), dihedral(4)):
        classes = conjugacy_classes(G)
        assert sorted(x for c in classes for x in c) == list(G.elements())
        assert [G.id] in classes


def test_centralizers():
    G = symmetric(3)
    assert centralizer(G, G.id).order == 6
    sizes = sorted(centralizer(G, g).order for g in G.elements() if g != G.id)
    assert sizes == [2, 2, 2, 3, 3]


@pytest.mark.parametrize("name,count", [("Z2", 4), ("Z3", 9), ("Z4", 16), ("S3", 8), ("S3xZ2", 32)])
def test_double_anyons(name, count):
    assert count_double_anyons(make_group(name)) == count


@pytest.mark.parametrize("name,count", [("Z2", 16), ("Z3", 81), ("S3", 32)])
def test_color_code_anyons(name, count):
    assert color_code_anyon_count(make_group(name)) == count


small = st.sampled_from(["Z2", "Z3", "Z4", "S3", "D4", "Q8"])


@settings(max_examples=20, deadline=None)
@given(small, small)
def test_anyon_count_is_multiplicative(a, b):
    A, B = make_group(a), make_group(b)
    assert count_double_anyons(direct_product(A, B)) == count_double_anyons(A) * count_double_anyons(B)


@settings(max_examples=30, deadline=None)
@given(small, st.randoms(use_true_random=False))
def test_relabelled_table_is_still_a_group(name, rnd):
    G = make_group(name)
    perm = list(range(G.order))
    rnd.shuffle(perm)
    p = np.array(perm)
    pinv = np.argsort(p)
    table = p[G.mul[np.ix_(pinv, pinv)]]
    H = from_table(table)
    axioms_hold(H)
    assert H.is_abelian() == G.is_abelian()
    assert commutator_subgroup(H).order == commutator_subgroup(G).order


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=2, max_size=5))
def test_commutator_membership_ignores_factor_order(xs):
    G = symmetric(3)
    comm = commutator_subgroup(G)
    seen = {G.product(*(xs[i] for i in order)) in comm for order in permutations(range(len(xs)))}
    assert len(seen) == 1


def test_commutators_are_members():
    G = symmetric(3)
    comm = commutator_subgroup(G)
    for g, h in product(G.elements(), repeat=2):
        assert G.product(int(G.inv[g]), int(G.inv[h]), g, h) in comm
