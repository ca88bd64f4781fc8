import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import gf2_rank
from gcolex.colex import apply_parity_flip, build_from_spec
from gcolex.group import color_code_anyon_count, make_group
from gcolex.spectrum import (
    GroundSpaceReport,
    Problem,
    color_code_problem,
    count_orbits,
    degeneracy,
    degeneracy_burnside,
    degeneracy_rank_oracle,
    enumerate_valid,
)
from gcolex.stabilizer import BudgetError, build_stabilizers


def z2_valid_count_oracle(colex):
    """2^(V - rank) from the GF(2) rank of the plaquette parity checks."""
    rows = []
    for _, verts in colex.plaquettes:
        r = [0] * colex.n_vertices
        for v in verts:
            r[v] = 1
        rows.append(r)
    return 2 ** (colex.n_vertices - gf2_rank(rows))


@pytest.mark.parametrize("spec", ["hex-torus:1", "hex-torus:2", "squareoct-torus:2", "triangular:3",
                                  "triangular:5", "rect-bg:2x2", "rect-br:2x2"])
def test_z2_valid_count_matches_gf2_rank(Z2, spec):
    colex = build_from_spec(spec)
    valid = enumerate_valid(color_code_problem(colex, Z2))
    assert len(valid) == z2_valid_count_oracle(colex)


def test_z2_counts(Z2):
    assert len(enumerate_valid(color_code_problem(build_from_spec("hex-torus:1"), Z2))) == 32
    # each colour class of plaquettes covers every vertex once, so the eight
    # checks on the 4.8.8 torus have rank 6, not 7
    assert len(enumerate_valid(color_code_problem(build_from_spec("squareoct-torus:2"), Z2))) == 1024


def test_valid_rows_satisfy_predicates(S3):
    prob = color_code_problem(build_from_spec("triangular:3"), S3)
    valid = enumerate_valid(prob)
    assert len(np.unique(valid, axis=0)) == len(valid)
    for pr in prob.predicates:
        assert pr.holds_batch(S3, valid.astype(np.int64)).all()
    # completeness against brute force
    from itertools import product

    brute = sum(all(pr.holds(S3, c) for pr in prob.predicates) for c in product(range(6), repeat=7))
    assert brute == len(valid)


def test_empty_problem(Z3):
    prob = Problem(Z3, 0, (), (), ())
    valid = enumerate_valid(prob)
    assert valid.shape == (1, 0)
    assert count_orbits(prob, valid) == 1


def test_generators_preserve_valid_set(S3):
    prob = color_code_problem(build_from_spec("hex-torus:1"), S3)
    valid = enumerate_valid(prob).astype(np.int64)
    keys = {tuple(r) for r in valid}
    for g in prob.generators:
        assert all(tuple(r) in keys for r in g.apply_batch(S3, valid))


@pytest.mark.parametrize("name,spec,expected", [
    ("Z2", "hex-torus:1", 16),
    ("Z2", "hex-torus:2", 16),
    ("Z2", "squareoct-torus:2", 16),
    ("Z3", "hex-torus:1", 81),
    ("Z3", "squareoct-torus:2", 81),
    ("S3", "hex-torus:1", 32),
])
def test_torus_degeneracy(name, spec, expected):
    G = make_group(name)
    rep = degeneracy(build_from_spec(spec), G)
    assert rep.degeneracy == expected == color_code_anyon_count(G)


@pytest.mark.parametrize("name", ["Z2", "Z3", "Z4", "S3"])
@pytest.mark.parametrize("spec,formula", [
    ("triangular:3", lambda g, q: q),
    ("rect-bg:2x2", lambda g, q: q * q),
    ("rect-br:2x2", lambda g, q: g * q),
])
def test_planar_degeneracy(name, spec, formula):
    from gcolex.group import abelianization

    G = make_group(name)
    q = abelianization(G).quotient.order
    assert degeneracy(build_from_spec(spec), G).degeneracy == formula(G.order, q)


@pytest.mark.parametrize("name,spec", [
    ("Z2", "hex-torus:1"), ("Z2", "triangular:3"), ("Z3", "triangular:3"), ("Z3", "hex-torus:1"),
    ("Z4", "triangular:3"), ("S3", "hex-torus:1"), ("S3", "triangular:3"), ("Z2", "squareoct-torus:2"),
])
def test_three_routes_agree(name, spec):
    G = make_group(name)
    prob = color_code_problem(build_from_spec(spec), G)
    orbit = degeneracy(prob, method="orbit")
    oracle = degeneracy_rank_oracle(prob)
    burn = degeneracy_burnside(prob)
    assert orbit.degeneracy == oracle.degeneracy == burn.degeneracy
    assert orbit.valid_count == oracle.valid_count


def test_oracle_cap(S3):
    with pytest.raises(BudgetError):
        degeneracy_rank_oracle(color_code_problem(build_from_spec("squareoct-torus:2"), S3))


def test_budget_error_reports_estimate(S3):
    with pytest.raises(BudgetError, match="estimate"):
        degeneracy(build_from_spec("rect-br:2x2"), S3, method="orbit", budget=10**6)


def test_auto_falls_back_to_burnside(S3):
    rep = degeneracy(build_from_spec("rect-br:2x2"), S3, budget=10**6)
    assert rep.method == "burnside" and rep.degeneracy == 12


@settings(max_examples=8, deadline=None)
@given(st.data())
def test_parity_flip_keeps_degeneracy(data):
    name, spec = data.draw(st.sampled_from([("Z2", "squareoct-torus:2"), ("S3", "hex-torus:1"),
                                            ("S3", "triangular:3"), ("Z3", "rect-bg:2x2")]))
    G = make_group(name)
    colex = build_from_spec(spec)
    sites = data.draw(st.lists(st.integers(0, colex.n_vertices - 1), min_size=1, max_size=3, unique=True))
    flipped = colex
    for s in sites:
        flipped = apply_parity_flip(flipped, s)
    assert degeneracy(flipped, G).degeneracy == degeneracy(colex, G).degeneracy


def test_report_format(Z2):
    rep = degeneracy(build_from_spec("hex-torus:1"), Z2)
    assert rep.summary() == "degeneracy=16 valid=32 method=orbit"
    doc = json.loads(rep.dumps())
    assert "runtime" not in doc
    assert "runtime" in rep.to_json(timing=True)
    assert doc["orbit_count"] == 16 and doc["valid_count"] == 32
    assert rep.dumps() == degeneracy(build_from_spec("hex-torus:1"), Z2).dumps()


def test_report_degeneracy_property():
    rep = GroundSpaceReport(10, 3, "orbit", "x", "Z2", 0.0)
    assert rep.degeneracy == 3


def test_stabilizer_set_reused(S3):
    colex = build_from_spec("triangular:3")
    stabs = build_stabilizers(colex, S3)
    assert color_code_problem(colex, S3, stabs).generators == stabs.generators
