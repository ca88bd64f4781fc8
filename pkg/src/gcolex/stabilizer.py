"""Stabilizers of G-color codes as monomial operators on configurations.

A configuration assigns a group element (an index into the multiplication
table) to every vertex.  Every operator used here is a rational combination
of permutations of configurations, possibly preceded by diagonal 0/1
filters, so products can be evaluated exactly term by term.

``PermOp`` stores at most one local action per vertex as a pair ``(a, b)``
meaning ``g -> a*g*b``.  The primitive left action ``X_+^h`` is ``(h, e)``
and the right action ``X_-^h`` is ``(e, h^-1)``; composites of both kinds
stay in the same form.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from math import lcm, prod

import numpy as np

from .colex import Colex2, LatticeError, validate
from .group import FiniteGroup, Subgroup, commutator_subgroup

__all__ = [
    "PermOp",
    "DiagPredicate",
    "OperatorAsSum",
    "Stabilizer",
    "StabilizerSet",
    "BudgetError",
    "CommutationReport",
    "a_side",
    "build_A",
    "build_C",
    "build_stabilizers",
    "apply",
    "apply_batch",
    "check_commutation",
    "check_pair",
    "check_red_order_independence",
    "find_noncommuting_witness",
    "DEFAULT_SAMPLES",
    "DEFAULT_SEED",
    "default_budget",
]

LEFT, RIGHT = "left", "right"
DEFAULT_SAMPLES = 100_000
DEFAULT_SEED = 20240607
DEFAULT_BUDGET = 200_000_000


class BudgetError(RuntimeError):
    pass


def default_budget() -> int:
    env = os.environ.get("GCOLEX_BUDGET_STATES")
    if env:
        try:
            return int(float(env))
        except ValueError:
            raise BudgetError(f"GCOLEX_BUDGET_STATES={env!r} is not a number") from None
    return DEFAULT_BUDGET


# --------------------------------------------------------------------------
# monomials


@dataclass(frozen=True)
class PermOp:
    actions: tuple[tuple[int, int, int], ...] = ()

    @staticmethod
    def local(G: FiniteGroup, vertex: int, side: str, h: int) -> "PermOp":
        if h == G.id:
            return PermOp()
        if side == LEFT:
            return PermOp(((vertex, h, G.id),))
        if side == RIGHT:
            return PermOp(((vertex, G.id, int(G.inv[h])),))
        raise ValueError(f"side must be left or right, not {side!r}")

    @staticmethod
    def from_locals(G: FiniteGroup, items) -> "PermOp":
        """Product of primitive ``(vertex, side, h)`` actions on distinct vertices."""
        op = PermOp()
        for v, side, h in items:
            op = op.then(G, PermOp.local(G, v, side, h))
        return op

    @property
    def is_identity(self) -> bool:
        return not self.actions

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(v for v, _, _ in self.actions)

    def then(self, G: FiniteGroup, other: "PermOp") -> "PermOp":
        """The operator ``other * self``: apply ``self`` first."""
        acts = {v: (a, b) for v, a, b in self.actions}
        e = G.id
        for v, a2, b2 in other.actions:
            a1, b1 = acts.get(v, (e, e))
            acts[v] = (int(G.mul[a2, a1]), int(G.mul[b1, b2]))
        return PermOp(tuple(sorted((v, a, b) for v, (a, b) in acts.items() if (a, b) != (e, e))))

    def inverse(self, G: FiniteGroup) -> "PermOp":
        return PermOp(tuple((v, int(G.inv[a]), int(G.inv[b])) for v, a, b in self.actions))

    def apply(self, G: FiniteGroup, config) -> tuple[int, ...]:
        c = list(config)
        for v, a, b in self.actions:
            c[v] = int(G.mul[G.mul[a, c[v]], b])
        return tuple(c)

    def apply_batch(self, G: FiniteGroup, X: np.ndarray) -> np.ndarray:
        Y = X.copy()
        for v, a, b in self.actions:
            col = G.mul[a, Y[:, v]]
            Y[:, v] = G.mul[col, b]
        return Y

    def describe(self, G: FiniteGroup) -> str:
        return " ".join(f"v{v}:{a}*g*{b}" for v, a, b in self.actions) or "1"


@dataclass(frozen=True)
class DiagPredicate:
    """0/1 test on the ordered product of vertex values.

    ``factors`` lists ``(vertex, inverted)`` in multiplication order; the
    product must land in ``accept``.  ``pre`` is a permutation applied to the
    configuration before testing; it appears when a filter is moved past a
    permutation during composition.
    """

    kind: str
    plaquette: int
    factors: tuple[tuple[int, bool], ...]
    accept: frozenset[int]
    pre: PermOp = PermOp()

    def product(self, G: FiniteGroup, config) -> int:
        c = self.pre.apply(G, config) if self.pre.actions else config
        acc = G.id
        for v, inverted in self.factors:
            x = int(G.inv[c[v]]) if inverted else int(c[v])
            acc = int(G.mul[acc, x])
        return acc

    def holds(self, G: FiniteGroup, config) -> bool:
        return self.product(G, config) in self.accept

    def holds_batch(self, G: FiniteGroup, X: np.ndarray) -> np.ndarray:
        if self.pre.actions:
            X = self.pre.apply_batch(G, X)
        acc = np.full(X.shape[0], G.id, dtype=X.dtype)
        for v, inverted in self.factors:
            x = G.inv[X[:, v]] if inverted else X[:, v]
            acc = G.mul[acc, x]
        mask = np.zeros(G.order, dtype=bool)
        mask[list(self.accept)] = True
        return mask[acc]

    def pulled_back(self, G: FiniteGroup, op: PermOp) -> "DiagPredicate":
        """The predicate ``c -> self(op(c))``."""
        return DiagPredicate(self.kind, self.plaquette, self.factors, self.accept, op.then(G, self.pre))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted({v for v, _ in self.factors} | set(self.pre.support)))


Term = tuple[Fraction, PermOp, tuple[DiagPredicate, ...]]


@dataclass(frozen=True)
class OperatorAsSum:
    """``sum_i c_i P_i F_i``: filters ``F_i`` act first, then the permutation."""

    terms: tuple[Term, ...]

    @staticmethod
    def identity() -> "OperatorAsSum":
        return OperatorAsSum(((Fraction(1), PermOp(), ()),))

    @staticmethod
    def average(ops) -> "OperatorAsSum":
        ops = list(ops)
        w = Fraction(1, len(ops))
        return OperatorAsSum(tuple((w, op, ()) for op in ops))._merged()

    @staticmethod
    def projector(pred: DiagPredicate) -> "OperatorAsSum":
        return OperatorAsSum(((Fraction(1), PermOp(), (pred,)),))

    def __len__(self) -> int:
        return len(self.terms)

    def _merged(self) -> "OperatorAsSum":
        acc: dict[tuple[PermOp, tuple[DiagPredicate, ...]], Fraction] = {}
        for c, op, filt in self.terms:
            key = (op, filt)
            acc[key] = acc.get(key, Fraction(0)) + c
        return OperatorAsSum(tuple((c, op, f) for (op, f), c in acc.items() if c != 0))

    def compose(self, G: FiniteGroup, other: "OperatorAsSum") -> "OperatorAsSum":
        """``self * other`` (``other`` acts first)."""
        out = []
        for a, P, F in self.terms:
            for b, Q, F2 in other.terms:
                filt = F2 + tuple(f.pulled_back(G, Q) for f in F)
                out.append((a * b, Q.then(G, P), filt))
        return OperatorAsSum(tuple(out))._merged()

    @property
    def support(self) -> tuple[int, ...]:
        s: set[int] = set()
        for _, op, filt in self.terms:
            s.update(op.support)
            for f in filt:
                s.update(f.support)
        return tuple(sorted(s))

    @property
    def denominator(self) -> int:
        return lcm(*(c.denominator for c, _, _ in self.terms)) if self.terms else 1


# --------------------------------------------------------------------------
# stabilizers


@dataclass(frozen=True)
class Stabilizer:
    """A named operator kept as an ordered product of sums (last factor acts first)."""

    name: str
    kind: str
    factors: tuple[OperatorAsSum, ...]

    @property
    def support(self) -> tuple[int, ...]:
        s: set[int] = set()
        for f in self.factors:
            s.update(f.support)
        return tuple(sorted(s))

    def expanded(self, G: FiniteGroup) -> OperatorAsSum:
        out = OperatorAsSum.identity()
        for f in self.factors:
            out = out.compose(G, f)
        return out


def a_side(colex: Colex2, plaquette: int, vertex: int) -> str:
    """Side on which ``A_p^g`` multiplies ``vertex`` (before parity)."""
    color = colex.plaquettes[plaquette][0]
    plus = colex.chirality[vertex] == 1
    if color == "R":
        plus = not plus
    return LEFT if plus else RIGHT


def _flip(side: str) -> str:
    return RIGHT if side == LEFT else LEFT


def _local(G: FiniteGroup, colex: Colex2, v: int, side: str, h: int) -> PermOp:
    # a parity -1 site stores g^-1, which swaps left and right multiplication
    if colex.parity[v] == -1:
        side = _flip(side)
    return PermOp.local(G, v, side, h)


def build_A(colex: Colex2, G: FiniteGroup, plaquette: int, g: int) -> PermOp:
    op = PermOp()
    for v in colex.plaquettes[plaquette][1]:
        op = op.then(G, _local(G, colex, v, a_side(colex, plaquette, v), g))
    return op


def build_C(colex: Colex2, G: FiniteGroup, link: int, n: int) -> PermOp:
    """``C_l(n)``: left ``n`` on the up end, right ``n`` on the down end."""
    _, up, down = colex.red_links[link]
    return _local(G, colex, up, LEFT, n).then(G, _local(G, colex, down, RIGHT, n))


def build_corner_C(colex: Colex2, G: FiniteGroup, site: int, n: int) -> PermOp:
    side = LEFT if colex.chirality[site] == 1 else RIGHT
    return _local(G, colex, site, side, n)


def build_Z(colex: Colex2, G: FiniteGroup, plaquette: int, comm: Subgroup) -> DiagPredicate:
    color, verts = colex.plaquettes[plaquette]
    order = tuple(reversed(verts)) if color == "B" else tuple(verts)
    factors = tuple((v, colex.parity[v] == -1) for v in order)
    if color == "R":
        return DiagPredicate("product_in_commutator", plaquette, factors, frozenset(comm.members))
    kind = "product_acw_is_identity" if color == "B" else "product_cw_is_identity"
    return DiagPredicate(kind, plaquette, factors, frozenset({G.id}))


@dataclass(frozen=True)
class StabilizerSet:
    colex: Colex2
    group: FiniteGroup
    comm: Subgroup
    SX: tuple[Stabilizer, ...]  # per plaquette, undressed
    SZ: tuple[Stabilizer, ...]  # per plaquette
    SC: tuple[Stabilizer, ...]  # red links, then corner sites
    dressed: tuple[Stabilizer, ...]  # per plaquette; red ones are undressed
    predicates: tuple[DiagPredicate, ...] = field(repr=False)
    # generator permutations for orbit counting: A_p^g and C(n) for group generators
    generators: tuple[PermOp, ...] = field(repr=False)

    def commuting_set(self) -> list[Stabilizer]:
        return list(self.dressed) + list(self.SZ) + list(self.SC)


def build_stabilizers(colex: Colex2, G: FiniteGroup, check: bool = True) -> StabilizerSet:
    if check:
        rep = validate(colex)
        if not rep.ok:
            raise LatticeError(f"invalid lattice: {rep.first()}")
    comm = commutator_subgroup(G)
    SX, SZ, preds, gens = [], [], [], []
    for p, (color, _) in enumerate(colex.plaquettes):
        SX.append(
            Stabilizer(f"SX[{p}{color}]", "X", (OperatorAsSum.average(build_A(colex, G, p, g) for g in G.elements()),))
        )
        pred = build_Z(colex, G, p, comm)
        preds.append(pred)
        SZ.append(Stabilizer(f"SZ[{p}{color}]", "Z", (OperatorAsSum.projector(pred),)))
        gens.extend(build_A(colex, G, p, g) for g in G.generators())
    SC = []
    for k in range(len(colex.red_links)):
        SC.append(Stabilizer(f"SC[l{k}]", "C", (OperatorAsSum.average(build_C(colex, G, k, n) for n in comm),)))
        gens.extend(build_C(colex, G, k, n) for n in comm.generators())
    for s in colex.corner_C_sites:
        SC.append(
            Stabilizer(f"SC[v{s}]", "C", (OperatorAsSum.average(build_corner_C(colex, G, s, n) for n in comm),))
        )
        gens.extend(build_corner_C(colex, G, s, n) for n in comm.generators())
    dressed = []
    for p, (color, verts) in enumerate(colex.plaquettes):
        if color == "R" or comm.order == 1:
            dressed.append(Stabilizer(f"SX~[{p}{color}]", "X~", SX[p].factors))
            continue
        links = colex.plaquette_red_links(p)
        corners = [len(colex.red_links) + i for i, s in enumerate(colex.corner_C_sites) if s in verts]
        factors = SX[p].factors + tuple(SC[k].factors[0] for k in links + corners)
        dressed.append(Stabilizer(f"SX~[{p}{color}]", "X~", factors))
    gens = [g for g in dict.fromkeys(gens) if not g.is_identity]
    return StabilizerSet(
        colex, G, comm, tuple(SX), tuple(SZ), tuple(SC), tuple(dressed), tuple(preds), tuple(gens)
    )


# --------------------------------------------------------------------------
# application


def apply(G: FiniteGroup, op, config) -> list[tuple[Fraction, tuple[int, ...]]]:
    """Exact image of a basis configuration; ``op`` is an OperatorAsSum or Stabilizer."""
    factors = op.factors if isinstance(op, Stabilizer) else (op,)
    vec: dict[tuple[int, ...], Fraction] = {tuple(int(x) for x in config): Fraction(1)}
    for f in reversed(factors):
        nxt: dict[tuple[int, ...], Fraction] = {}
        for c, w in vec.items():
            for coef, perm, filt in f.terms:
                if all(pr.holds(G, c) for pr in filt):
                    img = perm.apply(G, c)
                    nxt[img] = nxt.get(img, Fraction(0)) + w * coef
        vec = {c: w for c, w in nxt.items() if w != 0}
    return sorted(((w, c) for c, w in vec.items()), key=lambda t: t[1])


class _Encoder:
    def __init__(self, order: int, width: int):
        self.fits = width * np.log2(max(order, 2)) < 62
        self.pows = order ** np.arange(width, dtype=np.int64) if self.fits else None
        self.space = order**width if self.fits else None

    def keys(self, rows: np.ndarray, X: np.ndarray) -> np.ndarray:
        if self.fits:
            codes = X @ self.pows
            if (int(rows.max()) + 1) * self.space < 2**62:
                return rows * self.space + codes
            return np.column_stack([rows, codes])
        return np.column_stack([rows, X])


def _merge(enc: _Encoder, rows, X, w):
    if len(rows) == 0:
        return rows, X, w
    keys = enc.keys(rows, X)
    if keys.ndim == 1:
        order = np.argsort(keys, kind="stable")
        ks = keys[order]
        starts = np.flatnonzero(np.r_[True, ks[1:] != ks[:-1]])
    else:
        order = np.lexsort(keys.T[::-1])
        ks = keys[order]
        starts = np.flatnonzero(np.r_[True, np.any(ks[1:] != ks[:-1], axis=1)])
    first = order[starts]
    wsum = np.add.reduceat(w[order], starts)
    keep = wsum != 0
    first = first[keep]
    return rows[first], X[first], wsum[keep]


def _apply_sum_batch(G: FiniteGroup, op: OperatorAsSum, rows, X, w, enc: _Encoder):
    den = op.denominator
    out_r, out_x, out_w = [], [], []
    for coef, perm, filt in op.terms:
        num = int(coef * den)
        if filt:
            mask = np.ones(len(rows), dtype=bool)
            for pr in filt:
                mask &= pr.holds_batch(G, X)
            r, x, ww = rows[mask], X[mask], w[mask]
        else:
            r, x, ww = rows, X, w
        out_r.append(r)
        out_x.append(perm.apply_batch(G, x))
        out_w.append(ww * num)
    if not out_r:
        return rows[:0], X[:0], w[:0]
    return _merge(enc, np.concatenate(out_r), np.concatenate(out_x), np.concatenate(out_w))


def apply_batch(G: FiniteGroup, factors, X: np.ndarray):
    """Apply a product of sums to every row of ``X``.

    Returns ``(rows, images, numerators)`` sorted by (row, image); the common
    denominator is the product of the factors' denominators.
    """
    X = np.asarray(X, dtype=np.int64)
    enc = _Encoder(G.order, X.shape[1])
    rows = np.arange(len(X), dtype=np.int64)
    w = np.ones(len(X), dtype=np.int64)
    for f in reversed(factors):
        rows, X, w = _apply_sum_batch(G, f, rows, X, w, enc)
    return rows, X, w


# --------------------------------------------------------------------------
# commutation


@dataclass
class CommutationReport:
    pairs_checked: int
    mode: str
    seed: int | None
    failures: list[dict]
    configurations: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "pairs_checked": self.pairs_checked,
            "mode": self.mode,
            "seed": self.seed,
            "failures": self.failures,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def _configs_on(G: FiniteGroup, V: int, support, mode: str, samples: int, rng, budget: int,
                chunk: int = 1 << 14):
    """Batches of full configurations varying only on ``support`` (exhaustive) or random."""
    k = len(support)
    if mode == "exhaustive":
        total = G.order**k
        if total > budget:
            raise BudgetError(
                f"{total} configurations on {k} sites exceed the budget {budget}; use sampled mode"
            )
        chunk = max(1, min(total, chunk))
        for start in range(0, total, chunk):
            idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
            X = np.zeros((len(idx), V), dtype=np.int64)
            for j, v in enumerate(support):
                X[:, v] = idx % G.order
                idx = idx // G.order
            yield X
    else:
        left = samples
        while left > 0:
            n = min(left, chunk)
            yield rng.integers(0, G.order, size=(n, V), dtype=np.int64)
            left -= n


def _first_difference(a, b) -> int | None:
    ra, xa, wa = a
    rb, xb, wb = b
    if len(ra) == len(rb) and np.array_equal(ra, rb) and np.array_equal(xa, xb) and np.array_equal(wa, wb):
        return None
    rows = np.union1d(ra, rb)
    for r in rows:
        ia, ib = ra == r, rb == r
        if not (np.array_equal(xa[ia], xb[ib]) and np.array_equal(wa[ia], wb[ib])):
            return int(r)
    return int(rows[0]) if len(rows) else 0


def _support_configs(G: FiniteGroup, support) -> np.ndarray:
    M = G.order ** len(support)
    idx = np.arange(M, dtype=np.int64)
    X = np.empty((M, len(support)), dtype=np.int64)
    for j in range(len(support)):
        X[:, j] = idx % G.order
        idx //= G.order
    return X


def _restrict(op: PermOp, pos: dict[int, int]) -> PermOp:
    return PermOp(tuple((pos[v], a, b) for v, a, b in op.actions))


def _restrict_pred(G: FiniteGroup, pr: DiagPredicate, pos) -> DiagPredicate:
    return DiagPredicate(pr.kind, pr.plaquette, tuple((pos[v], i) for v, i in pr.factors), pr.accept,
                         _restrict(pr.pre, pos))


def factor_matrix(G: FiniteGroup, f: OperatorAsSum, support, X: np.ndarray | None = None):
    """Integer sparse matrix of ``denominator * f`` on the configurations of ``support``."""
    from scipy import sparse

    pos = {v: j for j, v in enumerate(support)}
    X = _support_configs(G, support) if X is None else X
    M = len(X)
    pows = G.order ** np.arange(len(support), dtype=np.int64)
    den = f.denominator
    rows, cols, data = [], [], []
    cols_all = np.arange(M, dtype=np.int64)
    for coef, perm, filt in f.terms:
        mask = np.ones(M, dtype=bool)
        for pr in filt:
            mask &= _restrict_pred(G, pr, pos).holds_batch(G, X)
        img = _restrict(perm, pos).apply_batch(G, X[mask]) @ pows
        rows.append(img)
        cols.append(cols_all[mask])
        data.append(np.full(len(img), int(coef * den), dtype=np.int64))
    mat = sparse.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(M, M), dtype=np.int64
    )
    mat.sum_duplicates()
    return mat


def _product_matrix(G, factors, support, X):
    out = None
    for f in factors:
        m = factor_matrix(G, f, support, X)
        out = m if out is None else out @ m
    return out


SPARSE_LIMIT = 1 << 20
BATCH_ROWS = 1 << 22  # expanded (row, image) pairs held at once by the batch engine


def _batch_chunk(factors) -> int:
    growth = 1
    for f in factors:
        growth *= max(1, len(f))
    return max(1, min(1 << 14, BATCH_ROWS // growth))


SYMBOLIC_TERMS = 1 << 16


def _filter_free(s: Stabilizer) -> bool:
    return all(not filt for f in s.factors for _, _, filt in f.terms)


def _formally_commute(G: FiniteGroup, A: Stabilizer, B: Stabilizer) -> bool:
    """True when AB and BA are the same formal sum of permutations (sufficient, not necessary)."""
    if not (_filter_free(A) and _filter_free(B)) or _total_terms(A) * _total_terms(B) > SYMBOLIC_TERMS:
        return False
    ea, eb = A.expanded(G), B.expanded(G)

    def terms(x):
        return {op: c for c, op, _ in x.terms}

    return terms(ea.compose(G, eb)) == terms(eb.compose(G, ea))


def check_pair(G: FiniteGroup, V: int, A: Stabilizer, B: Stabilizer, mode: str = "exhaustive",
               samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED, budget: int | None = None):
    """Return a configuration ``c`` with ``AB c != BA c``, or None.

    Exhaustive mode works on the joint support of ``A`` and ``B``; the other
    sites are spectators and are set to the identity in a witness.
    """
    budget = default_budget() if budget is None else budget
    if _formally_commute(G, A, B):
        return None
    support = sorted(set(A.support) | set(B.support))
    if mode == "exhaustive" and G.order ** len(support) <= min(SPARSE_LIMIT, budget):
        X = _support_configs(G, support)
        ab = _product_matrix(G, A.factors + B.factors, support, X)
        ba = _product_matrix(G, B.factors + A.factors, support, X)
        diff = (ab - ba).tocsc()
        diff.eliminate_zeros()
        if diff.nnz == 0:
            return None
        col = int(np.flatnonzero(np.diff(diff.indptr))[0])
        c = [G.id] * V
        for j, v in enumerate(support):
            c[v] = int(X[col, j])
        return tuple(c)
    rng = np.random.default_rng(seed)
    chunk = _batch_chunk(A.factors + B.factors)
    for X in _configs_on(G, V, support, mode, samples, rng, budget, chunk):
        ab = apply_batch(G, A.factors + B.factors, X)
        ba = apply_batch(G, B.factors + A.factors, X)
        r = _first_difference(ab, ba)
        if r is not None:
            return tuple(int(x) for x in X[r])
    return None


def check_commutation(colex: Colex2, G: FiniteGroup, mode: str = "exhaustive",
                      samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                      budget: int | None = None, stabs: StabilizerSet | None = None,
                      workers: int = 1) -> CommutationReport:
    """Check every pair among dressed S^X, S^Z and S^C.

    Operators with disjoint supports commute as tensor products and are
    counted without evaluation.  Exhaustive mode enumerates the joint
    support of each pair; the other sites are spectators.
    """
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    stabs = stabs or build_stabilizers(colex, G)
    ops = stabs.commuting_set()
    V = colex.n_vertices
    pairs = list(combinations(range(len(ops)), 2))
    todo = [(i, j) for i, j in pairs if set(ops[i].support) & set(ops[j].support)]
    todo = [(i, j) for i, j in todo if not (ops[i].kind == "Z" and ops[j].kind == "Z")]

    def run(pair):
        i, j = pair
        w = check_pair(G, V, ops[i], ops[j], mode, samples, seed, budget)
        return None if w is None else {"opA": ops[i].name, "opB": ops[j].name, "witness_configuration": list(w)}

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(run, todo))
    else:
        results = [run(p) for p in todo]
    failures = [r for r in results if r is not None]
    return CommutationReport(len(pairs), mode, seed if mode == "sampled" else None, failures)


def find_noncommuting_witness(colex: Colex2, G: FiniteGroup, mode: str = "exhaustive",
                              samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                              stabs: StabilizerSet | None = None) -> dict | None:
    """First adjacent blue/green pair whose undressed S^X fail to commute."""
    stabs = stabs or build_stabilizers(colex, G)
    V = colex.n_vertices
    for p, (cp, vp) in enumerate(colex.plaquettes):
        for q, (cq, vq) in enumerate(colex.plaquettes):
            if (cp, cq) != ("B", "G") or not set(vp) & set(vq):
                continue
            w = check_pair(G, V, stabs.SX[p], stabs.SX[q], mode, samples, seed)
            if w is not None:
                return {"opA": stabs.SX[p].name, "opB": stabs.SX[q].name, "witness_configuration": list(w)}
    return None


def check_red_order_independence(G: FiniteGroup, m: int = 4, samples: int = 1000,
                                 seed: int = DEFAULT_SEED, max_orderings: int = 5040) -> dict:
    """Membership of a product in [G,G] must not depend on the factor order."""
    if m > 8:
        raise ValueError("at most 8 factors")
    comm = commutator_subgroup(G)
    mask = comm.mask()
    rng = np.random.default_rng(seed)
    orders = list(permutations(range(m)))
    if len(orders) > max_orderings:
        pick = rng.choice(len(orders), size=max_orderings, replace=False)
        orders = [orders[i] for i in sorted(pick)]
    tuples = rng.integers(0, G.order, size=(samples, m))
    failures = []
    for t in tuples:
        seen = {bool(mask[G.product(*(int(t[i]) for i in o))]) for o in orders}
        if len(seen) > 1:
            failures.append([int(x) for x in t])
    return {
        "group": G.name,
        "factors": m,
        "tuples": samples,
        "orderings": len(orders),
        "seed": seed,
        "failures": failures,
    }


def _total_terms(stab: Stabilizer) -> int:
    return prod(len(f) for f in stab.factors)
