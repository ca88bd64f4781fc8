from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import same_operator
from gcolex.colex import apply_parity_flip, build_from_spec
from gcolex.qdouble import conjugate_by_inversion
from gcolex.spectrum import color_code_problem, enumerate_valid
from gcolex.stabilizer import (
    LEFT,
    RIGHT,
    BudgetError,
    CommutationReport,
    OperatorAsSum,
    PermOp,
    apply,
    apply_batch,
    build_A,
    build_stabilizers,
    check_commutation,
    check_pair,
    check_red_order_independence,
    find_noncommuting_witness,
)


@pytest.fixture(scope="module")
def tri3():
    return build_from_spec("triangular:3")


def test_permop_semantics(S3):
    g, h = 1, 2
    left = PermOp.local(S3, 0, LEFT, h)
    right = PermOp.local(S3, 0, RIGHT, h)
    assert left.apply(S3, (g,)) == (S3.mul[h, g],)
    assert right.apply(S3, (g,)) == (S3.mul[g, S3.inv[h]],)
    assert PermOp.local(S3, 0, LEFT, S3.id).is_identity


def test_permop_composition_and_inverse(S3):
    a = PermOp.from_locals(S3, [(0, LEFT, 1), (1, RIGHT, 3)])
    b = PermOp.from_locals(S3, [(0, RIGHT, 4), (2, LEFT, 5)])
    c = (0, 2, 5)
    assert a.then(S3, b).apply(S3, c) == b.apply(S3, a.apply(S3, c))
    assert a.then(S3, a.inverse(S3)).is_identity
    X = np.array([[0, 2, 5], [1, 1, 1], [5, 4, 3]])
    assert [tuple(r) for r in a.apply_batch(S3, X)] == [a.apply(S3, tuple(r)) for r in X]


def test_build_A_z2_flips_every_vertex(Z2):
    colex = build_from_spec("squareoct-torus:2")
    for p, (_, verts) in enumerate(colex.plaquettes):
        op = build_A(colex, Z2, p, 1)
        c = tuple([0] * colex.n_vertices)
        img = op.apply(Z2, c)
        assert {v for v in range(colex.n_vertices) if img[v] == 1} == set(verts)
        assert build_A(colex, Z2, p, Z2.id).is_identity


def test_build_A_sides_alternate_on_green(S3):
    colex = build_from_spec("squareoct-torus:2")
    g = 1
    for p in colex.plaquettes_of("G"):
        op = build_A(colex, S3, p, g)
        acts = {v: (a, b) for v, a, b in op.actions}
        for v in colex.plaquettes[p][1]:
            a, b = acts[v]
            if colex.chirality[v] == 1:
                assert (a, b) == (g, S3.id)
            else:
                assert (a, b) == (S3.id, int(S3.inv[g]))
    # red plaquettes take the opposite side
    for p in colex.plaquettes_of("R"):
        acts = {v: (a, b) for v, a, b in build_A(colex, S3, p, g).actions}
        for v in colex.plaquettes[p][1]:
            assert (acts[v][0] == g) == (colex.chirality[v] == -1)


def test_stabilizer_set_shapes(Z2, Z3, S3):
    hex1 = build_from_spec("hex-torus:1")
    st2 = build_stabilizers(hex1, Z2)
    assert st2.comm.order == 1
    assert all(d.factors == s.factors for d, s in zip(st2.dressed, st2.SX))
    so = build_from_spec("squareoct-torus:2")
    st6 = build_stabilizers(so, S3)
    assert len(st6.SC) == len(so.red_links)
    assert all(len(s.factors[0]) == 3 for s in st6.SC)
    st3 = build_stabilizers(so, Z3)
    for p in so.plaquettes_of("R"):
        assert st3.predicates[p].accept == frozenset({Z3.id})


def test_apply_identity_and_projector(S3, tri3):
    stabs = build_stabilizers(tri3, S3)
    c = (1, 2, 3, 4, 5, 0, 1)
    assert apply(S3, OperatorAsSum.identity(), c) == [(Fraction(1), c)]
    violating = next(
        x for x in [(0, 0, 0, 0, 0, 0, 1), (1, 0, 0, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0, 0)]
        if not stabs.predicates[0].holds(S3, x)
    )
    assert apply(S3, stabs.SZ[0], violating) == []


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=7, max_size=7), st.sampled_from(["SX", "SC", "dressed"]))
def test_averages_are_idempotent(config, which):
    from gcolex.group import make_group

    G = make_group("S3")
    colex = build_from_spec("rect-bg:2x2") if which == "SC" else build_from_spec("triangular:3")
    stabs = build_stabilizers(colex, G)
    config = tuple(config) + (0,) * (colex.n_vertices - 7)
    for s in getattr(stabs, which):
        once = apply(G, s, config)
        twice = {}
        for w, c in once:
            for w2, c2 in apply(G, s, c):
                twice[c2] = twice.get(c2, 0) + w * w2
        assert sorted((w, c) for c, w in twice.items() if w) == once


def test_batch_engine_matches_exact(S3, tri3):
    stabs = build_stabilizers(tri3, S3)
    rng = np.random.default_rng(1)
    X = rng.integers(0, 6, size=(30, 7))
    s = stabs.dressed[tri3.plaquettes_of("B")[0]]
    rows, imgs, w = apply_batch(S3, s.factors, X)
    den = int(np.prod([f.denominator for f in s.factors]))
    for r in range(len(X)):
        got = sorted((Fraction(int(ww), den), tuple(int(x) for x in im)) for ww, im in zip(w[rows == r], imgs[rows == r]))
        assert got == apply(S3, s, tuple(X[r]))


def test_z2_squareoct_exhaustive(Z2):
    rep = check_commutation(build_from_spec("squareoct-torus:2"), Z2)
    assert rep.ok and rep.mode == "exhaustive"
    assert rep.pairs_checked == 276


def test_s3_hex_torus_exhaustive(S3):
    rep = check_commutation(build_from_spec("hex-torus:1"), S3)
    assert rep.ok and rep.pairs_checked == 36


def test_s3_planar_patches_commute(S3, tri3):
    assert check_commutation(tri3, S3).ok


def test_undressed_witness(S3, tri3):
    w = find_noncommuting_witness(tri3, S3)
    assert w is not None
    stabs = build_stabilizers(tri3, S3)
    names = {s.name: s for s in stabs.SX}
    A, B = names[w["opA"]], names[w["opB"]]
    c = tuple(w["witness_configuration"])

    def ab(x, y):
        out = {}
        for w1, c1 in apply(S3, y, c):
            for w2, c2 in apply(S3, x, c1):
                out[c2] = out.get(c2, 0) + w1 * w2
        return {k: v for k, v in out.items() if v}

    assert ab(A, B) != ab(B, A)


def test_no_undressed_witness_on_the_one_cell_hex_torus(S3):
    # both non-red plaquettes cover all six sites with the same sides
    assert find_noncommuting_witness(build_from_spec("hex-torus:1"), S3) is None


def test_abelian_groups_have_no_witness(Z3, tri3):
    assert find_noncommuting_witness(tri3, Z3) is None


@pytest.mark.parametrize("spec", ["triangular:3", "rect-br:2x2"])
def test_red_sx_commutes_with_undressed(S3, spec):
    colex = build_from_spec(spec)
    stabs = build_stabilizers(colex, S3)
    V = colex.n_vertices
    for p in colex.plaquettes_of("R"):
        for q, (color, verts) in enumerate(colex.plaquettes):
            if color != "R" and set(verts) & set(colex.plaquettes[p][1]):
                assert check_pair(S3, V, stabs.SX[p], stabs.SX[q]) is None


@pytest.mark.parametrize("site", [0, 3, 6])
def test_parity_covariance(S3, tri3, site):
    flipped = build_stabilizers(apply_parity_flip(tri3, site), S3)
    base = build_stabilizers(tri3, S3)
    for a, b in zip(base.commuting_set(), flipped.commuting_set()):
        conj = conjugate_by_inversion(S3, a, site)
        support = sorted(set(a.support) | {site})
        assert same_operator(S3, conj.factors, b.factors, support), a.name


def test_dressed_ground_space_is_undressed_invariant(S3, tri3):
    stabs = build_stabilizers(tri3, S3)
    prob = color_code_problem(tri3, S3, stabs)
    valid = enumerate_valid(prob)
    seen = set()
    for start in valid:
        start = tuple(int(x) for x in start)
        if start in seen:
            continue
        orbit = {start}
        todo = [start]
        while todo:
            c = todo.pop()
            for g in prob.generators:
                d = g.apply(S3, c)
                if d not in orbit:
                    orbit.add(d)
                    todo.append(d)
        seen |= orbit
        w = Fraction(1, len(orbit))
        for s in stabs.SX:
            out = {}
            for c in orbit:
                for coef, d in apply(S3, s, c):
                    out[d] = out.get(d, 0) + w * coef
            assert {d: v for d, v in out.items() if v} == {c: w for c in orbit}
    assert len(seen) == len(valid)


def test_red_order_independence(S3, Z3):
    rep = check_red_order_independence(S3, 4, 1000)
    assert rep["orderings"] == 24 and rep["tuples"] == 1000 and not rep["failures"]
    assert not check_red_order_independence(Z3, 5, 200)["failures"]
    with pytest.raises(ValueError):
        check_red_order_independence(S3, 9)


def test_budget_error_points_to_sampled_mode(S3):
    colex = build_from_spec("squareoct-torus:2")
    stabs = build_stabilizers(colex, S3)
    with pytest.raises(BudgetError, match="sampled"):
        check_pair(S3, colex.n_vertices, stabs.dressed[0], stabs.SZ[0], budget=1000)


def test_sampled_reports_are_reproducible(S3):
    colex = build_from_spec("hex-torus:1")
    a = check_commutation(colex, S3, "sampled", samples=300, seed=7)
    b = check_commutation(colex, S3, "sampled", samples=300, seed=7, workers=3)
    assert a.dumps() == b.dumps()
    assert a.to_json()["seed"] == 7
    assert set(a.to_json()) == {"pairs_checked", "mode", "seed", "failures"}


def test_report_round_trip():
    rep = CommutationReport(3, "exhaustive", None, [{"opA": "a", "opB": "b", "witness_configuration": [0, 1]}])
    assert not rep.ok
    assert '"witness_configuration"' in rep.dumps()
