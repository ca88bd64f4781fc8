"""Quantum double model on a directed square-lattice torus.

Edges carry the qudits.  In the standard orientation every horizontal edge
points left (-x) and every vertical edge points down (-y), so at each vertex
the up and right edges come in and the down and left edges go out.  The
vertex term multiplies outgoing edges on the left and incoming edges on the
right, which gives ``A_v(g) = X_-^g(U) X_-^g(R) X_+^g(D) X_+^g(L)``.

The plaquette term asks for trivial holonomy.  Walking counter-clockwise
from the top-left corner (left edge down, bottom edge right, right edge
up, top edge left) an edge contributes ``x`` when walked along its
direction and ``x^-1`` against it.  In the standard orientation this is
``x_L x_D^-1 x_R^-1 x_U = e``.  ``kz="literal"`` instead reads the four
factors in the order U, R, D, L with the same inversions; for non-abelian
groups that version fails to commute with the vertex terms.
"""

from __future__ import annotations

from dataclasses import dataclass

from .group import FiniteGroup
from .spectrum import GroundSpaceReport, Problem, degeneracy
from .stabilizer import (
    LEFT,
    RIGHT,
    DiagPredicate,
    OperatorAsSum,
    PermOp,
    Stabilizer,
)

__all__ = [
    "SquareLattice",
    "QDStabilizers",
    "build_qd",
    "qd_problem",
    "qd_degeneracy",
    "conjugate_by_inversion",
]


@dataclass(frozen=True)
class SquareLattice:
    L1: int
    L2: int
    reversed_edges: frozenset[int] = frozenset()

    @property
    def n_edges(self) -> int:
        return 2 * self.L1 * self.L2

    @property
    def degenerate(self) -> bool:
        return self.L1 < 2 or self.L2 < 2

    def h(self, x: int, y: int) -> int:
        """Horizontal edge between (x, y) and (x+1, y)."""
        return (y % self.L2) * self.L1 + (x % self.L1)

    def v(self, x: int, y: int) -> int:
        """Vertical edge between (x, y) and (x, y+1)."""
        return self.L1 * self.L2 + (y % self.L2) * self.L1 + (x % self.L1)

    def vertices(self):
        return [(x, y) for y in range(self.L2) for x in range(self.L1)]

    def head_tail(self, e: int) -> tuple[tuple[int, int], tuple[int, int]]:
        """(tail, head) of edge ``e`` in the stored orientation."""
        n = self.L1 * self.L2
        k = e % n
        x, y = k % self.L1, k // self.L1
        if e < n:
            a, b = ((x + 1) % self.L1, y), (x, y)  # points left
        else:
            a, b = (x, (y + 1) % self.L2), (x, y)  # points down
        return (b, a) if e in self.reversed_edges else (a, b)

    def vertex_edges(self, x: int, y: int) -> dict[str, int]:
        return {"U": self.v(x, y), "R": self.h(x, y), "D": self.v(x, y - 1), "L": self.h(x - 1, y)}

    def plaquette_edges(self, x: int, y: int) -> dict[str, int]:
        """Plaquette with bottom-left corner (x, y)."""
        return {"U": self.h(x, y + 1), "R": self.v(x + 1, y), "D": self.h(x, y), "L": self.v(x, y)}

    def in_degree(self, vertex) -> int:
        return sum(1 for e in range(self.n_edges) if self.head_tail(e)[1] == vertex)


@dataclass(frozen=True)
class QDStabilizers:
    lattice: SquareLattice
    group: FiniteGroup
    KX: tuple[Stabilizer, ...]
    KZ: tuple[Stabilizer, ...]
    predicates: tuple[DiagPredicate, ...]
    generators: tuple[PermOp, ...]

    def all(self) -> list[Stabilizer]:
        return list(self.KX) + list(self.KZ)


def _vertex_op(lat: SquareLattice, G: FiniteGroup, x: int, y: int, g: int) -> PermOp:
    op = PermOp()
    here = (x % lat.L1, y % lat.L2)
    for _, e in lat.vertex_edges(x, y).items():
        tail, head = lat.head_tail(e)
        # on a 1-wide torus an edge can both start and end here
        if tail == here:
            op = op.then(G, PermOp.local(G, e, LEFT, g))
        if head == here:
            op = op.then(G, PermOp.local(G, e, RIGHT, g))
    return op


_WALK = (("L", (0, 1), (0, 0)), ("D", (0, 0), (1, 0)), ("R", (1, 0), (1, 1)), ("U", (1, 1), (0, 1)))


def _plaquette_pred(lat: SquareLattice, G: FiniteGroup, p: int, x: int, y: int, kz: str) -> DiagPredicate:
    edges = lat.plaquette_edges(x, y)
    inverted = {}
    for name, a, b in _WALK:
        e = edges[name]
        start = ((x + a[0]) % lat.L1, (y + a[1]) % lat.L2)
        tail, _ = lat.head_tail(e)
        inverted[name] = tail != start
    order = "LDRU" if kz == "holonomy" else "URDL"
    factors = tuple((edges[n], inverted[n]) for n in order)
    return DiagPredicate("qd_flux", p, factors, frozenset({G.id}))


def build_qd(L1: int, L2: int, G: FiniteGroup, kz: str = "holonomy",
             reversed_edges=()) -> QDStabilizers:
    """Vertex and plaquette terms; ``reversed_edges`` flips chosen edge directions."""
    if L1 < 1 or L2 < 1:
        raise ValueError("torus dimensions must be positive")
    if kz not in ("holonomy", "literal"):
        raise ValueError(f"unknown plaquette convention {kz!r}")
    lat = SquareLattice(L1, L2, frozenset(reversed_edges))
    KX, KZ, preds, gens = [], [], [], []
    for i, (x, y) in enumerate(lat.vertices()):
        ops = [_vertex_op(lat, G, x, y, g) for g in G.elements()]
        KX.append(Stabilizer(f"KX[{x},{y}]", "X", (OperatorAsSum.average(ops),)))
        gens.extend(_vertex_op(lat, G, x, y, g) for g in G.generators())
    for p, (x, y) in enumerate(lat.vertices()):
        pr = _plaquette_pred(lat, G, p, x, y, kz)
        preds.append(pr)
        KZ.append(Stabilizer(f"KZ[{x},{y}]", "Z", (OperatorAsSum.projector(pr),)))
    gens = [g for g in dict.fromkeys(gens) if not g.is_identity]
    return QDStabilizers(lat, G, tuple(KX), tuple(KZ), tuple(preds), tuple(gens))


def conjugate_by_inversion(G: FiniteGroup, stab: Stabilizer, site: int) -> Stabilizer:
    """``U stab U`` where ``U`` maps ``g -> g^-1`` on ``site``."""

    def perm(op: PermOp) -> PermOp:
        acts = []
        for v, a, b in op.actions:
            # g -> (a g^-1 b)^-1 = b^-1 g a^-1
            acts.append((v, int(G.inv[b]), int(G.inv[a])) if v == site else (v, a, b))
        return PermOp(tuple(acts))

    def pred(pr: DiagPredicate) -> DiagPredicate:
        f = tuple((v, (not i) if v == site else i) for v, i in pr.factors)
        return DiagPredicate(pr.kind, pr.plaquette, f, pr.accept, perm(pr.pre))

    factors = []
    for f in stab.factors:
        terms = tuple((c, perm(op), tuple(pred(x) for x in filt)) for c, op, filt in f.terms)
        factors.append(OperatorAsSum(terms))
    return Stabilizer(stab.name, stab.kind, tuple(factors))


def qd_problem(qd: QDStabilizers) -> Problem:
    averages = tuple(f for s in qd.KX for f in s.factors)
    lat = qd.lattice
    return Problem(qd.group, lat.n_edges, qd.predicates, qd.generators, averages, f"qd:{lat.L1}x{lat.L2}")


def qd_degeneracy(L1: int, L2: int, G: FiniteGroup, method: str = "auto",
                  budget: int | None = None) -> GroundSpaceReport:
    return degeneracy(qd_problem(build_qd(L1, L2, G)), method=method, budget=budget)
