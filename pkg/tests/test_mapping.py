import numpy as np
import pytest
from scipy import sparse

from gcolex.colex import apply_parity_flip, build_squareoct_torus
from gcolex.group import make_group
from gcolex.mapping import (
    MappingError,
    RatOp,
    build_encoded_ops,
    build_green_codespace,
    reference_ops,
    verify_algebra,
    verify_encoded_dims,
    verify_rotation,
    verify_stabilizer_mapping,
)


def test_ratop_arithmetic():
    a = RatOp(sparse.csr_matrix(np.array([[2, 0], [0, 4]])), 2)
    b = RatOp(sparse.csr_matrix(np.array([[1, 0], [0, 2]])))
    assert a.equals(b)
    assert (a @ a).equals(b @ b)
    assert a.trace() == 3
    assert a.witness(RatOp.identity(2)) == 1


@pytest.mark.parametrize("name,dim", [("Z2", 4), ("Z3", 9), ("Z4", 16), ("S3", 12)])
@pytest.mark.parametrize("tag", ["h", "v"])
def test_codespace_dimension(name, dim, tag):
    G = make_group(name)
    code = build_green_codespace(G, tag)
    assert code.dim == dim
    P = code.projector
    assert (P @ P).equals(P)
    rep = verify_encoded_dims(G, tag)
    assert rep["ok"] and rep["dimension"] == dim


def test_label_sets():
    assert verify_encoded_dims(make_group("S3"))["system2"] == 2
    rep = verify_encoded_dims(make_group("Z4"))
    assert (rep["system1"], rep["system2"]) == (4, 4)
    assert len(rep["labels"]) == 16


def test_encoding_columns_are_orthogonal():
    enc = build_encoded_ops(make_group("S3"))
    W = enc.basis
    assert set(np.unique(W)) == {0, 1}
    assert np.array_equal(W.T @ W, enc.weight * np.eye(12, dtype=np.int64))


@pytest.mark.parametrize("name", ["Z2", "Z3", "Z4", "S3"])
def test_encoded_algebra(name):
    rep = verify_algebra(make_group(name))
    assert rep["ok"], [i for i in rep["items"] if not i["ok"]]


def test_x_plus_multiplies_on_the_codespace():
    G = make_group("S3")
    enc = build_encoded_ops(G)
    P = enc.code.projector
    for g in G.elements():
        for h in G.elements():
            assert (enc.X1p[g] @ enc.X1p[h] @ P).equals(enc.X1p[int(G.mul[g, h])] @ P)


def test_system_two_depends_on_coset_only():
    G = make_group("S3")
    enc = build_encoded_ops(G)
    ref = reference_ops(G, enc.code.ab.quotient)
    P = enc.code.projector
    for k in range(2):
        assert enc.encode(enc.X2m[k] @ P).equals(ref["X2m"][k])


def test_rotation():
    for name in ("Z3", "S3"):
        assert verify_rotation(make_group(name))["ok"]


@pytest.mark.parametrize("name", ["Z2", "Z3", "Z4", "S3", "D4", "Q8"])
def test_stabilizer_mapping_per_plaquette(name):
    rep = verify_stabilizer_mapping(make_group(name))
    assert rep["ok"], rep["failures"]
    names = [i["name"] for i in rep["items"]]
    assert any("S^X R" in n and "K^X(1)" in n for n in names)
    assert any("S^X B" in n and "K^X(2)" in n for n in names)
    assert any("S^Z R" in n and "K^Z(2)" in n for n in names)
    assert any("S^Z B" in n and "K^Z(1)" in n for n in names)


def test_stabilizer_mapping_larger_torus():
    assert verify_stabilizer_mapping(make_group("S3"), build_squareoct_torus(4))["ok"]


def test_full_z2_lattice():
    rep = verify_stabilizer_mapping(make_group("Z2"), full=True)
    full = rep["full_lattice"]
    assert full["ok"] and full["dimension"] == 256
    # 8 plaquettes, an X and a Z term each, plus the isometry check
    assert len(full["items"]) == 17


def test_mismatch_is_reported():
    G = make_group("S3")
    rep = verify_stabilizer_mapping(G, apply_parity_flip(build_squareoct_torus(2), 0))
    assert not rep["ok"]
    assert any("witness_label" in f for f in rep["failures"])
    assert all("plaquette" in f for f in rep["failures"])


def test_size_caps():
    with pytest.raises(MappingError):
        build_green_codespace(make_group("Z13"))
    with pytest.raises(MappingError):
        build_green_codespace(make_group("Z2"), "d")
