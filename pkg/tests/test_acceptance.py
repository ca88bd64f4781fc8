"""End-to-end acceptance checks, one test per criterion.

Each test also prints its own PASS/FAIL line (visible with ``-s``); the
summary section at the end of the run lists all of them regardless.
"""

import os
import time

import pytest

from gcolex.colex import apply_parity_flip, build_from_spec, build_squareoct_torus
from gcolex.group import abelianization, color_code_anyon_count, count_double_anyons, make_group
from gcolex.mapping import verify_algebra, verify_encoded_dims, verify_stabilizer_mapping
from gcolex.qdouble import build_qd, qd_degeneracy, qd_problem
from gcolex.spectrum import color_code_problem, degeneracy, degeneracy_rank_oracle
from gcolex.stabilizer import check_commutation, check_red_order_independence, find_noncommuting_witness

EXTENDED = os.environ.get("GCOLEX_EXTENDED") == "1"


def report(num, ok, detail):
    print(f"\ncriterion {num}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


def test_criterion_1_commutation():
    t0 = time.perf_counter()
    z2 = check_commutation(build_from_spec("squareoct-torus:2"), make_group("Z2"))
    s3 = check_commutation(build_from_spec("hex-torus:1"), make_group("S3"))
    # the one-cell hex torus has no adjacent blue/green pair with differing
    # sides, so the undressed witness is taken on the smallest triangle
    w = find_noncommuting_witness(build_from_spec("triangular:3"), make_group("S3"))
    dt = time.perf_counter() - t0
    ok = z2.ok and s3.ok and z2.mode == s3.mode == "exhaustive" and w is not None and dt < 60
    report(1, ok, f"Z2 pairs={z2.pairs_checked} S3 pairs={s3.pairs_checked} witness={w and (w['opA'], w['opB'])} "
                  f"{dt:.1f}s")


def test_criterion_2_torus_degeneracy():
    got = {}
    for name, spec in (("Z2", "squareoct-torus:2"), ("Z3", "squareoct-torus:2"), ("S3", "hex-torus:1")):
        G = make_group(name)
        got[name] = (degeneracy(build_from_spec(spec), G).degeneracy, color_code_anyon_count(G))
    ok = got == {"Z2": (16, 16), "Z3": (81, 81), "S3": (32, 32)}
    report(2, ok, str(got))


PLANAR = {
    "triangular:3": {"Z2": 2, "Z3": 3, "S3": 2},
    "rect-bg:2x2": {"Z2": 4, "Z3": 9, "S3": 4},
    "rect-br:2x2": {"Z2": 4, "Z3": 9, "S3": 12},
}


def test_criterion_3_planar_degeneracy():
    bad = []
    for spec, table in PLANAR.items():
        colex = build_from_spec(spec)
        for name, want in table.items():
            t0 = time.perf_counter()
            got = degeneracy(colex, make_group(name)).degeneracy
            if got != want or time.perf_counter() - t0 > 300:
                bad.append((spec, name, got, want))
    report(3, not bad, f"mismatches={bad}")


ORACLE_CASES = [
    ("Z2", "hex-torus:1"), ("Z3", "hex-torus:1"), ("S3", "hex-torus:1"),
    ("Z2", "triangular:3"), ("Z3", "triangular:3"), ("S3", "triangular:3"),
    ("Z2", "squareoct-torus:2"), ("Z2", "rect-bg:2x2"), ("Z2", "rect-br:2x2"),
]


def test_criterion_4_oracle_agreement():
    rows = []
    for name, spec in ORACLE_CASES:
        G = make_group(name)
        colex = build_from_spec(spec)
        assert G.order ** colex.n_vertices <= 2**20
        prob = color_code_problem(colex, G)
        rows.append((name, spec, degeneracy(prob, method="orbit").degeneracy,
                     degeneracy_rank_oracle(prob).degeneracy))
    ok = len(rows) >= 5 and all(a == b for *_, a, b in rows)
    report(4, ok, str(rows))


def test_criterion_5_quantum_double():
    t0 = time.perf_counter()
    got = tuple(qd_degeneracy(2, 2, make_group(n)).degeneracy for n in ("Z2", "Z3", "Z4", "S3"))
    anyons = tuple(count_double_anyons(make_group(n)) for n in ("Z2", "Z3", "Z4", "S3"))
    ok = got == anyons == (4, 9, 16, 8) and time.perf_counter() - t0 < 300
    report(5, ok, f"degeneracies={got} anyons={anyons}")


def test_criterion_6_mapping():
    dims = tuple(verify_encoded_dims(make_group(n))["dimension"] for n in ("Z2", "Z3", "S3"))
    algebra = all(verify_algebra(make_group(n))["ok"] for n in ("Z2", "Z3", "Z4", "S3"))
    full = verify_stabilizer_mapping(make_group("Z2"), full=True)
    s3 = verify_stabilizer_mapping(make_group("S3"))
    ok = dims == (4, 9, 12) and algebra and full["ok"] and full["full_lattice"]["ok"] and s3["ok"]
    report(6, ok, f"dims={dims} algebra={algebra} z2_full={full['full_lattice']['ok']} s3={s3['ok']}")


def test_criterion_7_covariance():
    bad = []
    for name, spec in (("Z2", "squareoct-torus:2"), ("S3", "hex-torus:1"), ("S3", "triangular:3")):
        G = make_group(name)
        colex = build_from_spec(spec)
        base = degeneracy(colex, G).degeneracy
        for site in range(colex.n_vertices):
            if degeneracy(apply_parity_flip(colex, site), G).degeneracy != base:
                bad.append(("parity", name, spec, site))
    S3 = make_group("S3")
    base = degeneracy(qd_problem(build_qd(2, 2, S3))).degeneracy
    for edges in ([0], [3], [0, 5], [1, 2, 7], list(range(8))):
        rev = build_qd(2, 2, S3, reversed_edges=edges)
        if check_commutation_qd(rev) or degeneracy(qd_problem(rev)).degeneracy != base:
            bad.append(("reversal", edges))
    red = check_red_order_independence(S3, 4, 1000)
    if red["failures"] or red["orderings"] != 24 or red["tuples"] != 1000:
        bad.append(("red order", red["failures"][:1]))
    report(7, not bad, f"violations={bad}")


def check_commutation_qd(qd):
    """Names of non-commuting term pairs, empty when all commute."""
    from itertools import combinations

    from gcolex.stabilizer import check_pair

    V = qd.lattice.n_edges
    return [(a.name, b.name) for a, b in combinations(qd.all(), 2) if check_pair(qd.group, V, a, b) is not None]


@pytest.mark.parametrize("name", ["Z2", "Z3", pytest.param("S3", marks=pytest.mark.skipif(
    not EXTENDED, reason="extended 4.8.8 run for S3; set GCOLEX_EXTENDED=1"))])
def test_criterion_8_consistency(name):
    G = make_group(name)
    Q = abelianization(G).quotient
    cc = degeneracy(build_squareoct_torus(2), G).degeneracy
    qd = qd_degeneracy(2, 2, G).degeneracy * qd_degeneracy(2, 2, Q).degeneracy
    report(8, cc == qd, f"{name}: color code={cc} product of doubles={qd}")
