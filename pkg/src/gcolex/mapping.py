"""Encoding of 4.8.8 G-color codes into two quantum double models.

Each green square holds four qudits, indexed in the *frame* order
TL, TR, BR, BL of an h-type square (red octagons above and below).  For a
v-type square the frame is turned a quarter clockwise: frame position ``j``
sits on physical corner ``j + 1``.

The square's codespace carries two encoded qudits: system 1 with basis
``g in G`` and system 2 with basis ``k in G/[G,G]``.  An encoding isometry
is built from the simultaneous eigenbasis of the encoded T operators and
kept unnormalized: its columns are 0/1 vectors with ``m`` ones each, so
``W^T O W / m`` is the encoded action of any codespace-preserving ``O``.
Everything is exact integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np
from scipy import sparse

from .colex import Colex2, build_squareoct_torus
from .group import FiniteGroup, QuotientMap, abelianization
from .stabilizer import (
    LEFT,
    RIGHT,
    DiagPredicate,
    OperatorAsSum,
    PermOp,
    build_stabilizers,
    _support_configs,
    build_A,
    factor_matrix,
)

__all__ = [
    "RatOp",
    "GreenCodespace",
    "EncodedOps",
    "MappingError",
    "build_green_codespace",
    "build_encoded_ops",
    "verify_encoded_dims",
    "verify_algebra",
    "verify_rotation",
    "verify_stabilizer_mapping",
    "FRAME",
]

FRAME = ("TL", "TR", "BR", "BL")
DENSE_CAP = 12


class MappingError(ValueError):
    pass


@dataclass(frozen=True)
class RatOp:
    """Sparse integer matrix ``num`` divided by ``den``."""

    num: sparse.csr_matrix
    den: int = 1

    @staticmethod
    def identity(dim: int) -> "RatOp":
        return RatOp(sparse.identity(dim, dtype=np.int64, format="csr"))

    @property
    def dim(self) -> int:
        return self.num.shape[0]

    def __matmul__(self, other: "RatOp") -> "RatOp":
        return RatOp((self.num @ other.num).tocsr(), self.den * other.den)

    def __add__(self, other: "RatOp") -> "RatOp":
        return RatOp((self.num * other.den + other.num * self.den).tocsr(), self.den * other.den)

    def kron(self, other: "RatOp") -> "RatOp":
        return RatOp(sparse.kron(self.num, other.num, format="csr"), self.den * other.den)

    def equals(self, other: "RatOp") -> bool:
        diff = (self.num * other.den - other.num * self.den).tocsr()
        diff.eliminate_zeros()
        return diff.nnz == 0

    def trace(self) -> Fraction:
        return Fraction(int(self.num.diagonal().sum()), self.den)

    def witness(self, other: "RatOp") -> int | None:
        """A column where the two operators differ."""
        diff = (self.num * other.den - other.num * self.den).tocsc()
        diff.eliminate_zeros()
        cols = np.flatnonzero(np.diff(diff.indptr))
        return int(cols[0]) if len(cols) else None


def _frame_sites(tag: str) -> list[int]:
    """Site (0..3 in TL, TR, BR, BL order) of each frame position."""
    if tag == "h":
        return [0, 1, 2, 3]
    if tag == "v":
        return [1, 2, 3, 0]
    raise MappingError(f"tag must be 'h' or 'v', not {tag!r}")


def _perm(G: FiniteGroup, tag: str, items) -> PermOp:
    """Primitive actions given in frame positions: (position, side, element)."""
    sites = _frame_sites(tag)
    return PermOp.from_locals(G, ((sites[j], side, h) for j, side, h in items))


def _pred(G: FiniteGroup, tag: str, positions, accept) -> DiagPredicate:
    sites = _frame_sites(tag)
    return DiagPredicate("frame", -1, tuple((sites[j], False) for j in positions), frozenset(accept))


def _mat(G: FiniteGroup, op: OperatorAsSum) -> RatOp:
    return RatOp(factor_matrix(G, op, [0, 1, 2, 3]), op.denominator)


def _check_size(G: FiniteGroup) -> None:
    if G.order > DENSE_CAP:
        raise MappingError(f"|G| = {G.order} exceeds the dense cap {DENSE_CAP}")


@dataclass(frozen=True)
class GreenCodespace:
    group: FiniteGroup
    tag: str
    ab: QuotientMap
    SZ: RatOp
    SC1: RatOp
    SC2: RatOp
    SX: RatOp  # dressed
    projector: RatOp
    sums: dict = field(repr=False, compare=False, default_factory=dict)

    @property
    def dim(self) -> int:
        tr = self.projector.trace()
        if tr.denominator != 1:
            raise MappingError(f"non-integer projector trace {tr}")
        return int(tr)

    def stabilizers(self) -> list[RatOp]:
        return [self.SZ, self.SC1, self.SC2, self.SX]


def _green_sums(G: FiniteGroup, tag: str, comm) -> dict[str, OperatorAsSum]:
    e = G.id
    A = [_perm(G, tag, [(0, LEFT, g), (1, RIGHT, g), (2, LEFT, g), (3, RIGHT, g)]) for g in G.elements()]
    C1 = [_perm(G, tag, [(0, LEFT, n), (3, RIGHT, n)]) for n in comm]
    C2 = [_perm(G, tag, [(1, RIGHT, n), (2, LEFT, n)]) for n in comm]
    sz = OperatorAsSum.projector(_pred(G, tag, [0, 1, 2, 3], {e}))
    sc1, sc2, sa = OperatorAsSum.average(C1), OperatorAsSum.average(C2), OperatorAsSum.average(A)
    return {"SZ": sz, "SC1": sc1, "SC2": sc2, "A": sa}


def build_green_codespace(G: FiniteGroup, tag: str = "h") -> GreenCodespace:
    _check_size(G)
    ab = abelianization(G)
    s = _green_sums(G, tag, ab.kernel)
    SZ, SC1, SC2, A = (_mat(G, s[k]) for k in ("SZ", "SC1", "SC2", "A"))
    SX = SC1 @ SC2 @ A
    P = SZ @ SC1 @ SC2 @ SX
    return GreenCodespace(G, tag, ab, SZ, SC1, SC2, SX, P, s)


@dataclass(frozen=True)
class EncodedOps:
    code: GreenCodespace
    X1p: tuple[RatOp, ...]  # X^g_+(1), g in G
    X1m: tuple[RatOp, ...]
    T1: tuple[RatOp, ...]  # g2 g3 = g
    T1alt: tuple[RatOp, ...]  # g4 g1 = g^-1
    X2m: tuple[RatOp, ...]  # X^k_-(2), k in G/[G,G]
    X2p: tuple[RatOp, ...]
    T2: tuple[RatOp, ...]  # g1 g2 in k
    T2alt: tuple[RatOp, ...]  # g3 g4 in k^-1
    basis: np.ndarray = field(repr=False)  # |G|^4 x (|G| |Q|), 0/1 columns, index g*|Q| + k
    weight: int = 1  # ones per column

    @property
    def n1(self) -> int:
        return self.code.group.order

    @property
    def n2(self) -> int:
        return self.code.ab.quotient.order

    def encode(self, op: RatOp) -> RatOp:
        """``W^T op W / m``: the encoded action of a codespace-preserving operator."""
        W = sparse.csr_matrix(self.basis)
        return RatOp((W.T @ op.num @ W).tocsr(), op.den * self.weight)

    def preserves(self, op: RatOp) -> bool:
        P = self.code.projector
        return (op @ P).equals(P @ op @ P)


def build_encoded_ops(G: FiniteGroup, tag: str = "h") -> EncodedOps:
    code = build_green_codespace(G, tag)
    ab = code.ab
    Q = ab.quotient
    X1p = tuple(_mat(G, OperatorAsSum.average([_perm(G, tag, [(0, RIGHT, g), (1, LEFT, g)])])) for g in G.elements())
    X1m = tuple(_mat(G, OperatorAsSum.average([_perm(G, tag, [(2, RIGHT, g), (3, LEFT, g)])])) for g in G.elements())
    T1 = tuple(_mat(G, OperatorAsSum.projector(_pred(G, tag, [1, 2], {g}))) for g in G.elements())
    T1alt = tuple(
        _mat(G, OperatorAsSum.projector(_pred(G, tag, [3, 0], {int(G.inv[g])}))) for g in G.elements()
    )
    X2m, X2p, T2, T2alt = [], [], [], []
    for k in Q.elements():
        coset = ab.coset(k)
        X2m.append(_mat(G, OperatorAsSum.average([_perm(G, tag, [(1, RIGHT, x), (2, LEFT, x)]) for x in coset])))
        X2p.append(_mat(G, OperatorAsSum.average([_perm(G, tag, [(0, LEFT, x), (3, RIGHT, x)]) for x in coset])))
        T2.append(_mat(G, OperatorAsSum.projector(_pred(G, tag, [0, 1], coset))))
        T2alt.append(_mat(G, OperatorAsSum.projector(_pred(G, tag, [2, 3], ab.coset(int(Q.inv[k]))))))
    ops = dict(X1p=X1p, X1m=X1m, T1=T1, T1alt=T1alt, X2m=tuple(X2m), X2p=tuple(X2p), T2=tuple(T2),
               T2alt=tuple(T2alt))
    basis, weight = _encoding_basis(code, ops)
    return EncodedOps(code, basis=basis, weight=weight, **ops)


def _as_01(vec: np.ndarray, what: str) -> np.ndarray:
    nz = vec[vec != 0]
    if len(nz) == 0 or np.any(nz != nz[0]):
        raise MappingError(f"{what} is not a uniform superposition")
    return (vec != 0).astype(np.int64)


def _apply(op: RatOp, vec: np.ndarray) -> np.ndarray:
    out = op.num @ vec
    if np.any(out % op.den):
        raise MappingError("operator does not map the vector to an integer vector")
    return out // op.den


def _maps_to(op: RatOp, vec: np.ndarray, want: np.ndarray) -> bool:
    return np.array_equal(op.num @ vec, op.den * want)


def _encoding_basis(code: GreenCodespace, ops: dict) -> tuple[np.ndarray, int]:
    G = code.group
    Q = code.ab.quotient
    dim = G.order**4
    start = np.zeros(dim, dtype=np.int64)
    start[G.id * sum(G.order**j for j in range(4))] = 1  # every qudit at e
    ref = code.projector @ ops["T1"][G.id] @ ops["T2"][Q.id]
    v0 = _as_01(ref.num @ start, "|e,e>")
    cols = []
    for g in G.elements():
        for k in Q.elements():
            v = ops["X2p"][k].num @ (ops["X1p"][g].num @ v0)
            cols.append(_as_01(v, f"|{g},{k}>"))
    W = np.column_stack(cols)
    weight = int(v0.sum())
    gram = W.T @ W
    if not np.array_equal(gram, weight * np.eye(len(cols), dtype=np.int64)):
        raise MappingError("encoded basis vectors are not orthogonal with equal weight")
    return W, weight


# --------------------------------------------------------------------------
# label-space reference operators, built from the group tables alone


def _label_perm(n1: int, n2: int, f) -> RatOp:
    """Permutation |g,k> -> |f(g,k)> on the n1*n2 label space."""
    rows, cols = [], []
    for g in range(n1):
        for k in range(n2):
            g2, k2 = f(g, k)
            rows.append(g2 * n2 + k2)
            cols.append(g * n2 + k)
    m = sparse.csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(n1 * n2, n1 * n2))
    return RatOp(m)


def _label_diag(n1: int, n2: int, f) -> RatOp:
    d = np.array([1 if f(g, k) else 0 for g in range(n1) for k in range(n2)], dtype=np.int64)
    return RatOp(sparse.diags(d, format="csr", dtype=np.int64))


def reference_ops(G: FiniteGroup, Q: FiniteGroup) -> dict[str, list[RatOp]]:
    n1, n2 = G.order, Q.order
    mul, inv = G.mul, G.inv
    qm, qi = Q.mul, Q.inv
    return {
        "X1p": [_label_perm(n1, n2, lambda h, k, g=g: (int(mul[g, h]), k)) for g in range(n1)],
        "X1m": [_label_perm(n1, n2, lambda h, k, g=g: (int(mul[h, inv[g]]), k)) for g in range(n1)],
        "T1": [_label_diag(n1, n2, lambda h, k, g=g: h == g) for g in range(n1)],
        "X2p": [_label_perm(n1, n2, lambda h, k, q=q: (h, int(qm[q, k]))) for q in range(n2)],
        "X2m": [_label_perm(n1, n2, lambda h, k, q=q: (h, int(qm[k, qi[q]]))) for q in range(n2)],
        "T2": [_label_diag(n1, n2, lambda h, k, q=q: k == q) for q in range(n2)],
    }


# --------------------------------------------------------------------------
# verifications


def _report(name: str, checks: list[tuple[str, bool]], **extra) -> dict:
    return {"check": name, "ok": all(ok for _, ok in checks), "items": [{"name": n, "ok": ok} for n, ok in checks],
            **extra}


def verify_encoded_dims(G: FiniteGroup, tag: str = "h") -> dict:
    """Codespace dimension and a (g, k) labelled basis from the T eigenspaces."""
    enc = build_encoded_ops(G, tag)
    code = enc.code
    checks = [
        ("dimension = |G| |G/[G,G]|", code.dim == enc.n1 * enc.n2),
        ("basis spans the codespace", enc.basis.shape[1] == code.dim),
    ]
    # every basis vector is a joint eigenvector of T(1), T(2) with its own label
    ok = True
    for g in range(enc.n1):
        for k in range(enc.n2):
            col = enc.basis[:, g * enc.n2 + k]
            for h in range(enc.n1):
                ok &= _maps_to(enc.T1[h], col, col if h == g else 0 * col)
            for q in range(enc.n2):
                ok &= _maps_to(enc.T2[q], col, col if q == k else 0 * col)
            ok &= _maps_to(code.projector, col, col)
    checks.append(("basis vectors are joint T eigenvectors in the codespace", bool(ok)))
    labels = [[g, k] for g in range(enc.n1) for k in range(enc.n2)]
    return _report("encoded_dims", checks, group=G.name, tag=tag, dimension=code.dim,
                   system1=enc.n1, system2=enc.n2, labels=labels)


def verify_algebra(G: FiniteGroup, tag: str = "h", enc: EncodedOps | None = None) -> dict:
    """Encoded (X, T) algebras: stabilizer consistency, relations on the
    codespace and the exact label-space action against reference matrices."""
    enc = enc or build_encoded_ops(G, tag)
    code = enc.code
    P = code.projector
    Q = code.ab.quotient
    checks: list[tuple[str, bool]] = []
    stabs = code.stabilizers()
    checks.append(("green stabilizers commute", all((a @ b).equals(b @ a) for a in stabs for b in stabs)))
    checks.append(("projector idempotent", (P @ P).equals(P)))
    all_ops = {k: getattr(enc, k) for k in ("X1p", "X1m", "T1", "T1alt", "X2m", "X2p", "T2", "T2alt")}
    checks.append(("encoded operators commute with the projector",
                   all((op @ P).equals(P @ op) for ops in all_ops.values() for op in ops)))
    checks.append(("T(1) presentations agree", all((a @ P).equals(b @ P) for a, b in zip(enc.T1, enc.T1alt))))
    checks.append(("T(2) presentations agree", all((a @ P).equals(b @ P) for a, b in zip(enc.T2, enc.T2alt))))
    mul = G.mul
    checks.append(("X_+(1) is a representation", all(
        (enc.X1p[g] @ enc.X1p[h] @ P).equals(enc.X1p[int(mul[g, h])] @ P) for g in G.elements() for h in G.elements()
    )))
    checks.append(("X_-(1) is a representation", all(
        (enc.X1m[g] @ enc.X1m[h] @ P).equals(enc.X1m[int(mul[g, h])] @ P) for g in G.elements() for h in G.elements()
    )))
    comm = code.ab.kernel
    checks.append(("X_-(2) of a commutator is the identity",
                   all((enc.X2m[code.ab(n)] @ P).equals(P) for n in comm)))
    total = enc.T1[0]
    for t in enc.T1[1:]:
        total = total + t
    checks.append(("sum of T(1) is the identity on the codespace", (total @ P).equals(P)))
    sys1 = list(enc.X1p) + list(enc.X1m) + list(enc.T1)
    sys2 = list(enc.X2p) + list(enc.X2m) + list(enc.T2)
    checks.append(("system 1 commutes with system 2",
                   all((a @ b @ P).equals(b @ a @ P) for a in sys1 for b in sys2)))
    ref = reference_ops(G, Q)
    for name in ("X1p", "X1m", "T1", "X2p", "X2m", "T2"):
        ours = getattr(enc, name)
        checks.append((f"{name} acts as the regular representation on labels",
                       all(enc.encode(o).equals(r) for o, r in zip(ours, ref[name]))))
    return _report("encoded_algebra", checks, group=G.name, tag=tag)


def _rotate_sum(G: FiniteGroup, op: OperatorAsSum, quarter_turns: int) -> OperatorAsSum:
    def r(v):
        return (v + quarter_turns) % 4

    terms = []
    for c, perm, filt in op.terms:
        p2 = PermOp(tuple(sorted((r(v), a, b) for v, a, b in perm.actions)))
        f2 = tuple(DiagPredicate(f.kind, f.plaquette, tuple((r(v), i) for v, i in f.factors), f.accept)
                   for f in filt)
        terms.append((c, p2, f2))
    return OperatorAsSum(tuple(terms))


def verify_rotation(G: FiniteGroup) -> dict:
    """v-type stabilizers are the quarter-turned h-type ones; a half turn
    maps the h-type stabilizer set to itself."""
    _check_size(G)
    comm = abelianization(G).kernel
    h = _green_sums(G, "h", comm)
    v = _green_sums(G, "v", comm)
    checks = []
    checks.append(("v-type = h-type turned 90 degrees clockwise", all(
        _mat(G, _rotate_sum(G, h[k], 1)).equals(_mat(G, v[k])) for k in h
    )))
    half = {k: _mat(G, _rotate_sum(G, h[k], 2)) for k in h}
    mats = {k: _mat(G, h[k]) for k in h}
    checks.append(("half turn fixes S^Z and sum_g A(g)", half["SZ"].equals(mats["SZ"]) and half["A"].equals(mats["A"])))
    checks.append(("half turn swaps the two C links", half["SC1"].equals(mats["SC2"]) and half["SC2"].equals(mats["SC1"])))
    code_h = build_green_codespace(G, "h")
    Pr = _mat(G, _rotate_sum(G, code_h.sums["SZ"], 2))
    for k in ("SC1", "SC2", "A"):
        Pr = Pr @ _mat(G, _rotate_sum(G, code_h.sums[k], 2))
    checks.append(("half turn preserves the codespace projector", (Pr @ code_h.projector).equals(code_h.projector)))
    return _report("rotation", checks, group=G.name)


# --------------------------------------------------------------------------
# stabilizer mapping on a 4.8.8 torus

# frame pair covered by a red (system 1) or blue (system 2) neighbour -> encoded X family
_ROLE = {
    frozenset({0, 1}): "X1p",
    frozenset({2, 3}): "X1m",
    frozenset({0, 3}): "X2p",
    frozenset({1, 2}): "X2m",
}
_PLUS = {"X1p", "X2p"}


@dataclass
class _Square:
    plaquette: int
    tag: str
    sites: list[int]  # physical vertex of each frame position
    enc: EncodedOps

    def frame_of(self, v: int) -> int:
        return self.sites.index(v)

    def slot(self, v: int) -> int:
        """Local site (index into the stored boundary) of vertex ``v``."""
        return _frame_sites(self.tag)[self.frame_of(v)]


def _squares(colex: Colex2, encs: dict[str, EncodedOps]) -> list[_Square]:
    out = []
    for p in colex.plaquettes_of("G"):
        tag = colex.green_tag(p)
        verts = colex.plaquettes[p][1]
        sites = [verts[s] for s in _frame_sites(tag)]
        out.append(_Square(p, tag, sites, encs[tag]))
    return out


def _on_square(G: FiniteGroup, f: OperatorAsSum, sq: _Square) -> RatOp:
    """Restriction of a filter-free sum to the four sites of ``sq``."""
    terms = []
    for c, perm, filt in f.terms:
        if filt:
            raise MappingError("only permutation sums can be restricted to a square")
        acts = tuple(sorted((sq.slot(v), a, b) for v, a, b in perm.actions if v in sq.sites))
        terms.append((c, PermOp(acts), ()))
    return _mat(G, OperatorAsSum(tuple(terms))._merged())


def _adjacent(colex: Colex2, sqs: list[_Square], p: int) -> list[_Square]:
    verts = set(colex.plaquettes[p][1])
    return [sq for sq in sqs if verts & set(sq.sites)]


def _edge_roles(G, stabs, sqs, checks, failures):
    """Read each square's encoded X family off the geometry, then check every
    term of every red S^X and dressed blue S^X against it.

    Returns, per system, ``{square: {"tail": p, "head": p}}``.
    """
    colex = stabs.colex
    edges = {1: {sq.plaquette: {} for sq in sqs}, 2: {sq.plaquette: {} for sq in sqs}}
    for p, (color, verts) in enumerate(colex.plaquettes):
        if color == "G":
            continue
        system = 1 if color == "R" else 2
        stab = stabs.dressed[p]
        links = stab.factors[1:]
        ok = True
        for sq in _adjacent(colex, sqs, p):
            covered = frozenset(sq.frame_of(v) for v in verts if v in sq.sites)
            fam = _ROLE.get(covered)
            if fam is None or int(fam[1]) != system:
                ok = False
                failures.append({"plaquette": p, "square": sq.plaquette, "covered": sorted(covered)})
                continue
            end = "tail" if fam in _PLUS else "head"
            if end in edges[system][sq.plaquette]:
                ok = False
                failures.append({"plaquette": p, "square": sq.plaquette, "check": f"second {end}"})
            edges[system][sq.plaquette][end] = p
            enc = sq.enc
            ref = reference_ops(G, enc.code.ab.quotient)[fam]
            dressing = RatOp.identity(G.order**4)
            for link in links:
                if set(link.support) <= set(sq.sites):
                    dressing = dressing @ _on_square(G, link, sq)
            for g in G.elements():
                term = OperatorAsSum.average([build_A(colex, G, p, g)])
                op = _on_square(G, term, sq) @ dressing
                label = g if system == 1 else enc.code.ab(g)
                if not enc.preserves(op):
                    witness = "codespace not preserved"
                else:
                    col = enc.encode(op).witness(ref[label])
                    witness = None if col is None else list(divmod(col, enc.n2))
                if witness is not None:
                    ok = False
                    failures.append({"plaquette": p, "square": sq.plaquette, "family": fam, "element": g,
                                     "witness_label": witness})
                    break
        target = "K^X(1)" if system == 1 else "K^X(2) over G/[G,G]"
        checks.append((f"S^X {color} plaquette {p} -> {target}", ok))
    for sq in sqs:
        for system in (1, 2):
            e = edges[system][sq.plaquette]
            checks.append((f"square {sq.plaquette} is a directed edge of lattice {system}", len(e) == 2))
    return edges


_TAIL_PAIR = {1: frozenset({0, 1}), 2: frozenset({0, 3})}


def _walk(stabs, sqs, p: int, system: int) -> list[tuple[_Square, list[tuple[int, bool]], bool]]:
    """Boundary of quantum double plaquette ``p``: per square crossed, in the
    order of the S^Z product, its frame factors and whether the walk runs
    against the square's edge direction.

    The walk enters each square at one end of its edge.  The end is read off
    the frame position of the first vertex visited, which stays well defined
    when both ends of an edge sit on the same vertex.  Red S^Z products run
    clockwise, so their walk is read backwards to match the anticlockwise
    holonomy; over the abelian quotient both senses give the same term.
    """
    pred = stabs.predicates[p]
    blocks: list[list] = []
    for v, inv in pred.factors:
        sq = next(s for s in sqs if v in s.sites)
        if blocks and blocks[-1][0] is sq:
            blocks[-1][1].append((v, inv))
        else:
            blocks.append([sq, [(v, inv)]])
    if len(blocks) > 1 and blocks[0][0] is blocks[-1][0]:
        blocks[-1][1].extend(blocks.pop(0)[1])
    out = []
    for sq, fs in blocks:
        frames = [sq.frame_of(v) for v, _ in fs]
        if len(frames) != 2 or len(set(frames) & _TAIL_PAIR[system]) != 1:
            raise MappingError(f"plaquette {p} does not cross square {sq.plaquette} along an edge")
        against = (frames[0] not in _TAIL_PAIR[system]) != (system == 2)
        out.append((sq, [(f, inv) for f, (_, inv) in zip(frames, fs)], against))
    return out


def _check_holonomy(G: FiniteGroup, p: int, system: int, walk) -> bool:
    """Each square's partial S^Z product must equal its encoded label, inverted
    when the walk runs against the edge; the plaquette term is then exactly
    trivial holonomy."""
    ab = walk[0][0].enc.code.ab
    X = _support_configs(G, [0, 1, 2, 3])
    ok = True
    for sq, factors, against in walk:
        enc = sq.enc
        sites = _frame_sites(sq.tag)
        val = np.full(len(X), G.id, dtype=np.int64)
        for j, inv in factors:
            x = X[:, sites[j]]
            val = G.mul[val, G.inv[x] if inv else x]
        if system == 2:
            val = ab.cosets[val]
        grp = G if system == 1 else ab.quotient
        for col in range(enc.basis.shape[1]):
            seen = set(val[enc.basis[:, col] == 1].tolist())
            g, k = divmod(col, enc.n2)
            lab = g if system == 1 else k
            want = int(grp.inv[lab]) if against else lab
            ok &= seen == {want}
    return bool(ok)


def verify_stabilizer_mapping(G: FiniteGroup, colex: Colex2 | None = None, full: bool = False) -> dict:
    """Check S^X_red -> K^X(1), S^Z_blue -> K^Z(1), dressed S^X_blue -> K'^X(2),
    S^Z_red -> K'^Z(2), and that green S^X and S^C act trivially on the
    encoded qudits.

    Every check is per square on the encoded labels; ``full`` additionally
    conjugates every stabilizer of the whole lattice by the product encoding.
    """
    colex = colex or build_squareoct_torus(2)
    _check_size(G)
    encs = {t: build_encoded_ops(G, t) for t in ("h", "v")}
    stabs = build_stabilizers(colex, G)
    sqs = _squares(colex, encs)
    checks: list[tuple[str, bool]] = []
    failures: list[dict] = []
    edges = _edge_roles(G, stabs, sqs, checks, failures)
    walks = {}
    for p, (color, _) in enumerate(colex.plaquettes):
        if color == "G":
            continue
        system = 1 if color == "B" else 2
        target = "K^Z(1)" if system == 1 else "K^Z(2) over G/[G,G]"
        name = f"S^Z {color} plaquette {p} -> {target}"
        try:
            walks[p] = (system, _walk(stabs, sqs, p, system))
            ok = _check_holonomy(G, p, system, walks[p][1])
        except MappingError as exc:
            ok = False
            failures.append({"plaquette": p, "check": str(exc)})
        checks.append((name, ok))
        if not ok:
            failures.append({"plaquette": p, "check": name})
    trivial = True
    for sq in sqs:
        enc = sq.enc
        ident = RatOp.identity(enc.n1 * enc.n2)
        ops = [stabs.dressed[sq.plaquette]] + [s for s in stabs.SC if set(s.support) <= set(sq.sites)]
        for s in ops:
            op = RatOp.identity(G.order**4)
            for f in s.factors:
                op = op @ _on_square(G, f, sq)
            trivial &= enc.preserves(op) and enc.encode(op).equals(ident)
    checks.append(("green S^X and red-link S^C act as the identity on encoded qudits", bool(trivial)))
    rep = _report("stabilizer_mapping", checks, group=G.name, lattice=colex.name, failures=failures)
    if full:
        rep["full_lattice"] = verify_full_lattice(G, colex, stabs, sqs, edges, walks)
        rep["ok"] = rep["ok"] and rep["full_lattice"]["ok"]
    return rep


# --------------------------------------------------------------------------
# whole-lattice conjugation

FULL_LIMIT = 1 << 16


def _product_encoding(G: FiniteGroup, V: int, sqs: list[_Square]) -> sparse.csr_matrix:
    """0/1 columns of the tensor product of square encodings; column index is
    mixed-radix in the order of ``sqs``."""
    n = G.order
    pows = n ** np.arange(V, dtype=np.int64)
    loc = np.arange(n**4, dtype=np.int64)
    rows = np.zeros(1, dtype=np.int64)
    cols = np.zeros(1, dtype=np.int64)
    width = 1
    for sq in sqs:
        contrib = np.zeros(n**4, dtype=np.int64)
        for v in sq.sites:
            contrib += (loc // n ** sq.slot(v)) % n * pows[v]
        r, c = np.nonzero(sq.enc.basis)
        rb, cb = contrib[r], c
        rows = (rows[:, None] + rb[None, :]).ravel()
        cols = (cols[:, None] * sq.enc.basis.shape[1] + cb[None, :]).ravel()
        width *= sq.enc.basis.shape[1]
    return sparse.csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(n**V, width))


def _label_kron(sqs, mats: dict[int, RatOp]) -> RatOp:
    out = None
    for sq in sqs:
        m = mats.get(sq.plaquette, RatOp.identity(sq.enc.n1 * sq.enc.n2))
        out = m if out is None else out.kron(m)
    return out


def _expected_x(G, sqs, p, system, edges) -> RatOp:
    Q = sqs[0].enc.code.ab.quotient
    elems = G.elements() if system == 1 else Q.elements()
    acc = None
    for x in elems:
        mats = {}
        for sq in sqs:
            e = edges[sq.plaquette]
            ref = reference_ops(G, sq.enc.code.ab.quotient)
            m = None
            if e.get("tail") == p:
                m = ref["X1p" if system == 1 else "X2p"][x]
            if e.get("head") == p:
                mm = ref["X1m" if system == 1 else "X2m"][x]
                m = mm if m is None else m @ mm
            if m is not None:
                mats[sq.plaquette] = m
        term = _label_kron(sqs, mats)
        acc = term if acc is None else acc + term
    return RatOp(acc.num, acc.den * len(elems))


def _expected_z(G, sqs, system, walk) -> RatOp:
    grp = G if system == 1 else sqs[0].enc.code.ab.quotient
    dims = [sq.enc.n1 * sq.enc.n2 for sq in sqs]
    labels = np.array(list(product(*[range(d) for d in dims])), dtype=np.int64)
    pos = {sq.plaquette: i for i, sq in enumerate(sqs)}
    hol = np.full(len(labels), grp.id, dtype=np.int64)
    for sq, _, against in walk:
        col = labels[:, pos[sq.plaquette]]
        lab = col // sq.enc.n2 if system == 1 else col % sq.enc.n2
        hol = grp.mul[hol, grp.inv[lab] if against else lab]
    diag = (hol == grp.id).astype(np.int64)
    return RatOp(sparse.diags(diag, format="csr", dtype=np.int64))


def verify_full_lattice(G, colex, stabs, sqs, edges, walks) -> dict:
    """Conjugate every stabilizer by the product encoding and compare with the
    quantum double terms built on the label space."""
    V = colex.n_vertices
    if G.order**V > FULL_LIMIT:
        raise MappingError(f"full-lattice check needs |G|^V <= {FULL_LIMIT}")
    W = _product_encoding(G, V, sqs)
    weight = int(np.prod([sq.enc.weight for sq in sqs]))
    gram = (W.T @ W).tocsr()
    checks = [("product encoding is an isometry up to scale",
               RatOp(gram, weight).equals(RatOp.identity(W.shape[1])))]
    sites = list(range(V))
    for p, (color, _) in enumerate(colex.plaquettes):
        for kind, stab in (("X", stabs.dressed[p]), ("Z", stabs.SZ[p])):
            op = RatOp.identity(G.order**V)
            for f in stab.factors:
                op = op @ RatOp(factor_matrix(G, f, sites), f.denominator)
            enc = RatOp((W.T @ op.num @ W).tocsr(), op.den * weight)
            preserved = RatOp((op.num @ W).tocsr(), op.den).equals(RatOp((W @ enc.num).tocsr(), enc.den))
            if color == "G":
                expect = RatOp.identity(W.shape[1])
            elif kind == "X":
                expect = _expected_x(G, sqs, p, 1 if color == "R" else 2, edges[1 if color == "R" else 2])
            else:
                system, walk = walks[p]
                expect = _expected_z(G, sqs, system, walk)
            checks.append((f"{kind} {color} plaquette {p}", preserved and enc.equals(expect)))
    return _report("full_lattice", checks, dimension=W.shape[1])
