"""Finite groups as multiplication tables.

Elements are dense integers ``0..n-1`` with the identity at index 0.  Every
downstream module only ever needs ``mul``, ``inv`` and a handful of derived
objects (commutator subgroup, abelianization, conjugacy classes), so groups
are stored as plain integer tables and validated once on construction.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "GroupError",
    "FiniteGroup",
    "Subgroup",
    "QuotientMap",
    "cyclic",
    "symmetric",
    "dihedral",
    "quaternion",
    "direct_product",
    "from_table",
    "load_table",
    "make_group",
    "commutator_subgroup",
    "abelianization",
    "conjugacy_classes",
    "centralizer",
    "count_double_anyons",
    "color_code_anyon_count",
]

EXHAUSTIVE_ASSOCIATIVITY_LIMIT = 64
SAMPLED_ASSOCIATIVITY_TRIPLES = 10_000


class GroupError(ValueError):
    """Raised when a multiplication table does not define a group."""


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by its multiplication table.

    ``mul[a][b]`` is the index of the product ``a*b``.  The identity is always
    index 0 (tables are relabelled on construction if needed).
    """

    name: str
    mul: np.ndarray
    inv: np.ndarray = field(repr=False)
    id: int = 0

    @property
    def order(self) -> int:
        return int(self.mul.shape[0])

    def __len__(self) -> int:
        return self.order

    def elements(self) -> range:
        return range(self.order)

    def product(self, *elems: int) -> int:
        out = self.id
        for g in elems:
            out = int(self.mul[out, g])
        return out

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def generators(self) -> list[int]:
        """A small generating set, found greedily."""
        return _greedy_generators(self, list(self.elements()))

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name!r}, order={self.order})"


@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: FiniteGroup
    members: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, g: int) -> bool:
        return g in self._member_set

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def _member_set(self) -> frozenset[int]:
        return frozenset(self.members)

    def mask(self) -> np.ndarray:
        out = np.zeros(self.parent.order, dtype=bool)
        out[list(self.members)] = True
        return out

    def generators(self) -> list[int]:
        return _greedy_generators(self.parent, list(self.members))

    def is_normal(self) -> bool:
        G = self.parent
        s = self._member_set
        return all(
            G.product(g, k, int(G.inv[g])) in s for g in G.elements() for k in self.members
        )


@dataclass(frozen=True, eq=False)
class QuotientMap:
    """Projection of ``parent`` onto ``parent / kernel``."""

    parent: FiniteGroup
    kernel: Subgroup
    cosets: np.ndarray
    quotient: FiniteGroup

    def __call__(self, g: int) -> int:
        return int(self.cosets[g])

    def coset(self, k: int) -> list[int]:
        return [int(g) for g in np.flatnonzero(self.cosets == k)]

    def representative(self, k: int) -> int:
        return int(np.flatnonzero(self.cosets == k)[0])


# --------------------------------------------------------------------------
# construction


def from_table(table, name: str = "table") -> FiniteGroup:
    """Validate ``table`` and wrap it as a group.

    The identity is located and moved to index 0.  Raises :class:`GroupError`
    naming the offending row/column or triple when a group axiom fails.
    """
    mul = np.asarray(table, dtype=np.int64)
    if mul.ndim != 2 or mul.shape[0] != mul.shape[1] or mul.shape[0] == 0:
        raise GroupError(f"{name}: table must be a non-empty square array, got shape {mul.shape}")
    n = mul.shape[0]
    if mul.min() < 0 or mul.max() >= n:
        raise GroupError(f"{name}: entries must lie in 0..{n - 1}")
    full = np.arange(n)
    for a in range(n):
        if not np.array_equal(np.sort(mul[a]), full):
            raise GroupError(f"{name}: row {a} is not a permutation (not a Latin square)")
        if not np.array_equal(np.sort(mul[:, a]), full):
            raise GroupError(f"{name}: column {a} is not a permutation (not a Latin square)")
    _check_associative(mul, name)
    ids = [e for e in range(n) if np.array_equal(mul[e], full) and np.array_equal(mul[:, e], full)]
    if not ids:
        raise GroupError(f"{name}: no two-sided identity")
    e = ids[0]
    if e != 0:
        perm = list(range(n))
        perm[0], perm[e] = perm[e], perm[0]
        perm = np.array(perm)  # involution: new index i <-> old index perm[i]
        mul = perm[mul[np.ix_(perm, perm)]]
    inv = np.argmin(mul, axis=1)  # row g contains 0 exactly once, at g^-1
    mul.setflags(write=False)
    inv.setflags(write=False)
    return FiniteGroup(name=name, mul=mul, inv=inv)


def _check_associative(mul: np.ndarray, name: str) -> None:
    n = mul.shape[0]
    if n <= EXHAUSTIVE_ASSOCIATIVITY_LIMIT:
        left = mul[mul, :]  # left[a, b, c] = (ab)c
        right = mul[:, mul]  # right[a, b, c] = a(bc)
        bad = np.argwhere(left != right)
        if len(bad):
            a, b, c = (int(x) for x in bad[0])
            raise GroupError(f"{name}: associativity fails for triple ({a}, {b}, {c})")
        return
    rng = random.Random(0)
    for _ in range(SAMPLED_ASSOCIATIVITY_TRIPLES):
        a, b, c = rng.randrange(n), rng.randrange(n), rng.randrange(n)
        if mul[mul[a, b], c] != mul[a, mul[b, c]]:
            raise GroupError(f"{name}: associativity fails for triple ({a}, {b}, {c})")


def _from_elements(elements: list, op, name: str) -> FiniteGroup:
    index = {x: i for i, x in enumerate(elements)}
    n = len(elements)
    table = np.empty((n, n), dtype=np.int64)
    for i, x in enumerate(elements):
        for j, y in enumerate(elements):
            table[i, j] = index[op(x, y)]
    return from_table(table, name)


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupError("cyclic group needs n >= 1")
    idx = np.arange(n)
    return from_table((idx[:, None] + idx[None, :]) % n, f"Z{n}")


def _compose(p, q):
    # (p*q)(i) = p(q(i)): apply q first
    return tuple(p[i] for i in q)


def symmetric(n: int) -> FiniteGroup:
    perms = sorted(itertools.permutations(range(n)))
    return _from_elements(perms, _compose, f"S{n}")


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the regular n-gon, order 2n: pairs (reflect, rotate)."""
    if n < 1:
        raise GroupError("dihedral group needs n >= 1")
    elements = [(s, r) for s in (0, 1) for r in range(n)]

    def op(x, y):
        s1, r1 = x
        s2, r2 = y
        return ((s1 + s2) % 2, (r1 + (r2 if s1 == 0 else -r2)) % n)

    return _from_elements(elements, op, f"D{n}")


def quaternion() -> FiniteGroup:
    units = {"1": (1, 0, 0, 0), "i": (0, 1, 0, 0), "j": (0, 0, 1, 0), "k": (0, 0, 0, 1)}
    elements = [tuple(s * c for c in u) for u in units.values() for s in (1, -1)]
    elements.sort(key=lambda q: (q != (1, 0, 0, 0), q))

    def op(p, q):
        a1, b1, c1, d1 = p
        a2, b2, c2, d2 = q
        return (
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    return _from_elements(elements, op, "Q8")


def direct_product(A: FiniteGroup, B: FiniteGroup) -> FiniteGroup:
    """Componentwise product; element ``a*|B| + b`` is the pair (a, b)."""
    nb = B.order
    a = np.repeat(np.arange(A.order), nb)
    b = np.tile(np.arange(nb), A.order)
    table = A.mul[a[:, None], a[None, :]] * nb + B.mul[b[:, None], b[None, :]]
    return from_table(table, f"{A.name}x{B.name}")


def load_table(path: str | Path, name: str | None = None) -> FiniteGroup:
    """Read a table file: first line ``n``, then ``n`` rows of ``n`` indices."""
    path = Path(path)
    rows = [line.split() for line in path.read_text().splitlines() if line.strip()]
    if not rows or len(rows[0]) != 1:
        raise GroupError(f"{path}: first line must hold the order n")
    n = int(rows[0][0])
    body = rows[1:]
    if len(body) != n or any(len(r) != n for r in body):
        raise GroupError(f"{path}: expected {n} rows of {n} entries")
    return from_table([[int(x) for x in r] for r in body], name or path.stem)


_FAMILY = re.compile(r"^(Z|C|S|D)(\d+)$")


def make_group(spec) -> FiniteGroup:
    """Build a group from a descriptor.

    Accepts ``"Z4"``, ``"S3"``, ``"D4"``, ``"Q8"``, products such as
    ``"S3xZ2"``, a path to a table file, an explicit table, or an existing
    :class:`FiniteGroup`.
    """
    if isinstance(spec, FiniteGroup):
        return spec
    if not isinstance(spec, str):
        return from_table(spec)
    text = spec.strip()
    if "x" in text and not Path(text).exists():
        parts = text.split("x")
        out = make_group(parts[0])
        for part in parts[1:]:
            out = direct_product(out, make_group(part))
        return out
    if text == "Q8":
        return quaternion()
    m = _FAMILY.match(text)
    if m:
        family, n = m.group(1), int(m.group(2))
        if family in "ZC":
            return cyclic(n)
        if family == "S":
            return symmetric(n)
        return dihedral(n)
    if Path(text).exists():
        return load_table(text)
    raise GroupError(f"unknown group descriptor {spec!r}")


# --------------------------------------------------------------------------
# derived structure


def _closure(G: FiniteGroup, seeds) -> list[int]:
    members = {G.id}
    frontier = [G.id]
    seeds = set(seeds)
    while frontier:
        nxt = []
        for x in frontier:
            for s in seeds:
                y = int(G.mul[x, s])
                if y not in members:
                    members.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(members)


def _greedy_generators(G: FiniteGroup, members: list[int]) -> list[int]:
    gens: list[int] = []
    span = {G.id}
    for g in members:
        if g not in span:
            gens.append(g)
            span = set(_closure(G, gens))
    return gens


def commutator_subgroup(G: FiniteGroup) -> Subgroup:
    """``[G,G]``, generated by all ``g^-1 h^-1 g h``."""
    comms = {G.product(int(G.inv[g]), int(G.inv[h]), g, h) for g in G.elements() for h in G.elements()}
    return Subgroup(G, tuple(_closure(G, comms)))


def quotient(G: FiniteGroup, N: Subgroup) -> QuotientMap:
    if not N.is_normal():
        raise GroupError(f"subgroup of {G.name} is not normal")
    cosets = np.full(G.order, -1, dtype=np.int64)
    reps: list[int] = []
    for g in G.elements():
        if cosets[g] >= 0:
            continue
        k = len(reps)
        reps.append(g)
        for n in N.members:
            cosets[G.mul[g, n]] = k
    table = np.array([[cosets[G.mul[a, b]] for b in reps] for a in reps], dtype=np.int64)
    cosets.setflags(write=False)
    Q = from_table(table, f"{G.name}/N")
    return QuotientMap(G, N, cosets, Q)


def abelianization(G: FiniteGroup) -> QuotientMap:
    """The quotient ``G -> G/[G,G]``; the identity coset is index 0."""
    qm = quotient(G, commutator_subgroup(G))
    if not qm.quotient.is_abelian():
        raise GroupError(f"abelianization of {G.name} is not abelian")
    object.__setattr__(qm.quotient, "name", f"{G.name}/[{G.name},{G.name}]")
    return qm


def conjugacy_classes(G: FiniteGroup) -> list[list[int]]:
    seen = np.zeros(G.order, dtype=bool)
    classes = []
    for g in G.elements():
        if seen[g]:
            continue
        cls = sorted({G.product(h, g, int(G.inv[h])) for h in G.elements()})
        seen[cls] = True
        classes.append(cls)
    return classes


def centralizer(G: FiniteGroup, g: int) -> Subgroup:
    return Subgroup(G, tuple(h for h in G.elements() if G.mul[h, g] == G.mul[g, h]))


def _subgroup_as_group(S: Subgroup) -> FiniteGroup:
    G = S.parent
    members = list(S.members)
    index = {x: i for i, x in enumerate(members)}
    table = [[index[int(G.mul[a, b])] for b in members] for a in members]
    return from_table(table, f"C({G.name})")


def count_double_anyons(G: FiniteGroup) -> int:
    """Number of irreps of the Drinfeld double D(G).

    Sum over conjugacy classes of the class number of the centralizer of a
    representative (irreps of a finite group are counted by its classes).
    """
    total = 0
    for cls in conjugacy_classes(G):
        C = _subgroup_as_group(centralizer(G, cls[0]))
        total += len(conjugacy_classes(C))
    return total


def color_code_anyon_count(G: FiniteGroup) -> int:
    """Anyon count of the G-color code, ``|Irrep(D(G x G/[G,G]))|``."""
    return count_double_anyons(direct_product(G, abelianization(G).quotient))
