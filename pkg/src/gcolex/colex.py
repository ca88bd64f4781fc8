"""2-colex lattices: tori and colored-boundary planar patches.

Every lattice here is built as the dual of a properly 3-colored
triangulation.  Triangulation nodes are plaquettes, triangles are qudits
(colex vertices) and two triangles sharing a side give a colex edge.  The
colors of a triangle's corners, read counter-clockwise, fix the vertex
chirality; the counter-clockwise fan of triangles around a node, reversed,
is the clockwise plaquette boundary.

Planar patches add one *virtual* node per boundary side, colored with the
color missing from that side.  Virtual nodes close the fans of the boundary
plaquettes but are not plaquettes themselves.  A triangle with two virtual
corners sits at a corner of the patch; when its real corner is red the
triangle carries a dangling red half-edge and is recorded in
``corner_C_sites``.

Conventions fixed here and relied on everywhere else:

* chirality ``+1`` means the plaquette colors around the vertex read
  (R, G, B) clockwise;
* a red link's ``up`` end is its ``+1`` endpoint, so walking down -> up keeps
  the blue plaquette on the left;
* green squares of the 4.8.8 lattice store their boundary starting at the
  top-left vertex, so ``green_tag`` can recover h/v type from chirality.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from itertools import product
from pathlib import Path

COLORS = ("R", "G", "B")
BOUNDARY_SPECS = ("torus", "triangular", "rect_blue_green", "rect_blue_red")
FILE_VERSION = 1

__all__ = [
    "COLORS",
    "Colex2",
    "ValidationReport",
    "LatticeError",
    "build_hex_torus",
    "build_squareoct_torus",
    "build_triangular",
    "build_rect",
    "build_from_spec",
    "validate",
    "apply_parity_flip",
    "export_dot",
    "load",
    "save",
    "from_json",
    "to_json",
]


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class Colex2:
    chirality: tuple[int, ...]
    parity: tuple[int, ...]
    edges: tuple[tuple[int, int, str], ...]
    plaquettes: tuple[tuple[str, tuple[int, ...]], ...]
    red_links: tuple[tuple[int, int, int], ...]
    boundary_spec: str = "torus"
    corner_C_sites: tuple[int, ...] = ()
    degenerate: bool = False
    name: str = field(default="", compare=False)

    @property
    def n_vertices(self) -> int:
        return len(self.chirality)

    @property
    def is_torus(self) -> bool:
        return self.boundary_spec == "torus"

    def plaquettes_of(self, color: str) -> list[int]:
        return [i for i, (c, _) in enumerate(self.plaquettes) if c == color]

    def vertex_plaquettes(self) -> list[dict[str, int]]:
        """For each vertex, map color -> plaquette index."""
        out: list[dict[str, int]] = [{} for _ in range(self.n_vertices)]
        for p, (c, verts) in enumerate(self.plaquettes):
            for v in verts:
                out[v][c] = p
        return out

    def plaquette_red_links(self, p: int) -> list[int]:
        """Indices into ``red_links`` of the red links on the boundary of ``p``."""
        _, verts = self.plaquettes[p]
        pairs = {frozenset((verts[i], verts[(i + 1) % len(verts)])) for i in range(len(verts))}
        return [
            k for k, (e, up, down) in enumerate(self.red_links) if frozenset((up, down)) in pairs
        ]

    def green_tag(self, p: int) -> str:
        """'h' when the red neighbours of green square ``p`` sit above and below.

        The stored boundary starts at the top-left vertex; its chirality is +1
        exactly for h-type squares.
        """
        color, verts = self.plaquettes[p]
        if color != "G" or len(verts) != 4:
            raise LatticeError(f"plaquette {p} is not a green square")
        return "h" if self.chirality[verts[0]] == 1 else "v"


# --------------------------------------------------------------------------
# triangulation -> colex


@dataclass
class _Triangulation:
    colors: list[str]  # node -> color
    real: list[bool]  # node -> is a plaquette
    triangles: list[tuple[int, int, int]]  # corners counter-clockwise
    adj: list[list[tuple[int, int] | None]]  # adj[t][k]: (t', k') across the side opposite corner k
    first_corner: dict[int, tuple[int, int]] = field(default_factory=dict)  # node -> (t, k) start of fan


def _chirality(colors: tuple[str, str, str]) -> int:
    # counter-clockwise (R, B, G) == clockwise (R, G, B)
    rot = {("R", "B", "G"), ("B", "G", "R"), ("G", "R", "B")}
    return 1 if colors in rot else -1


def _fan(tri: _Triangulation, t: int, k: int) -> list[tuple[int, int]] | None:
    """Counter-clockwise fan of (triangle, corner) around node ``triangles[t][k]``."""
    out = [(t, k)]
    while True:
        # next triangle shares the side (node, corner k+2), which is opposite corner k+1;
        # there the node is the first endpoint of the reversed side
        nxt = tri.adj[t][(k + 1) % 3]
        if nxt is None:
            return None
        t, k = nxt[0], (nxt[1] + 1) % 3
        if (t, k) == out[0]:
            return out
        out.append((t, k))


def _to_colex(tri: _Triangulation, boundary_spec: str, degenerate: bool = False, name: str = "") -> Colex2:
    chir = tuple(_chirality(tuple(tri.colors[n] for n in tr)) for tr in tri.triangles)
    edges: list[tuple[int, int, str]] = []
    seen: set[tuple[int, int]] = set()
    corner_sites: list[int] = []
    for t, row in enumerate(tri.adj):
        for k, nb in enumerate(row):
            color = tri.colors[tri.triangles[t][k]]
            if nb is None:
                if color == "R" and t not in corner_sites:
                    corner_sites.append(t)
                continue
            if (t, k) in seen:
                continue
            seen.add((t, k))
            seen.add(nb)
            edges.append((t, nb[0], color))
    plaquettes: list[tuple[str, tuple[int, ...]]] = []
    for node, (t, k) in sorted(tri.first_corner.items()):
        if not tri.real[node]:
            continue
        fan = _fan(tri, t, k)
        if fan is None:
            raise LatticeError(f"open fan around plaquette node {node}")
        cw = [fan[0][0]] + [tt for tt, _ in reversed(fan[1:])]
        plaquettes.append((tri.colors[node], tuple(cw)))
    red_links = []
    for e, (u, v, c) in enumerate(edges):
        if c == "R":
            up, down = (u, v) if chir[u] == 1 else (v, u)
            red_links.append((e, up, down))
    return Colex2(
        chirality=chir,
        parity=(1,) * len(chir),
        edges=tuple(edges),
        plaquettes=tuple(plaquettes),
        red_links=tuple(red_links),
        boundary_spec=boundary_spec,
        corner_C_sites=tuple(sorted(corner_sites)),
        degenerate=degenerate,
        name=name,
    )


# --------------------------------------------------------------------------
# infinite lattices in integer coordinates


def _cross(a, b) -> int:
    return a[0] * b[1] - a[1] * b[0]


def _ccw(p, q, r) -> bool:
    return _cross((q[0] - p[0], q[1] - p[1]), (r[0] - p[0], r[1] - p[1])) > 0


class _HexDual:
    """Triangular lattice of hexagon centres; basis (1,0), (1/2, sqrt3/2)."""

    @staticmethod
    def color(x) -> str:
        return COLORS[(x[0] - x[1]) % 3]

    @staticmethod
    def is_anchor(x) -> bool:
        return True

    @staticmethod
    def triangles_at(x):
        i, j = x
        yield ((i, j), (i + 1, j), (i, j + 1))
        yield ((i + 1, j), (i + 1, j + 1), (i, j + 1))


class _SquareOctDual:
    """Tetrakis lattice: octagons at i+j even (red for even i), squares at i+j odd."""

    _dirs = ((0, 1), (-1, 0), (0, -1), (1, 0))

    @staticmethod
    def color(x) -> str:
        i, j = x
        if (i + j) % 2:
            return "G"
        return "R" if i % 2 == 0 else "B"

    @staticmethod
    def is_anchor(x) -> bool:
        return (x[0] + x[1]) % 2 == 1

    @classmethod
    def triangles_at(cls, x):
        # k = NW, SW, SE, NE vertex; the fan of the square then starts top-left
        i, j = x
        d = cls._dirs
        for k in range(4):
            a, b = d[k], d[(k + 1) % 4]
            yield ((i, j), (i + a[0], j + a[1]), (i + b[0], j + b[1]))


class _Torus:
    def __init__(self, p1, p2):
        det = _cross(p1, p2)
        if det == 0:
            raise LatticeError("degenerate period lattice")
        if det < 0:
            p1, p2, det = p2, p1, -det
        self.p1, self.p2, self.det = p1, p2, det

    def reduce(self, x, scale: int = 1):
        p1 = (self.p1[0] * scale, self.p1[1] * scale)
        p2 = (self.p2[0] * scale, self.p2[1] * scale)
        det = self.det * scale * scale
        a = _cross(x, p2) // det
        b = _cross(p1, x) // det
        return (x[0] - a * p1[0] - b * p2[0], x[1] - a * p1[1] - b * p2[1])

    def box(self):
        r = abs(self.p1[0]) + abs(self.p1[1]) + abs(self.p2[0]) + abs(self.p2[1])
        return product(range(-r, r + 1), repeat=2)


def _periodic(lattice, torus: _Torus) -> _Triangulation:
    reps = sorted({torus.reduce(x) for x in torus.box()}, key=lambda x: (x[1], x[0]))
    node_id = {x: i for i, x in enumerate(reps)}
    tri = _Triangulation(
        colors=[lattice.color(x) for x in reps], real=[True] * len(reps), triangles=[], adj=[]
    )
    side_owner: dict[tuple, list[tuple[int, int]]] = {}
    for x in reps:
        if not lattice.is_anchor(x):
            continue
        for corners in lattice.triangles_at(x):
            assert _ccw(*corners)
            t = len(tri.triangles)
            ids = tuple(node_id[torus.reduce(c)] for c in corners)
            tri.triangles.append(ids)
            tri.adj.append([None, None, None])
            for k in range(3):
                a, b = corners[(k + 1) % 3], corners[(k + 2) % 3]
                key = torus.reduce((a[0] + b[0], a[1] + b[1]), scale=2)
                side_owner.setdefault(key, []).append((t, k))
                tri.first_corner.setdefault(ids[k], (t, k))
    for key, owners in side_owner.items():
        if len(owners) != 2:
            raise LatticeError(f"triangle side {key} shared by {len(owners)} triangles")
        (t1, k1), (t2, k2) = owners
        tri.adj[t1][k1] = (t2, k2)
        tri.adj[t2][k2] = (t1, k1)
    return tri


def _planar(lattice, region) -> tuple[_Triangulation, list[str]]:
    """Patch of real nodes ``region`` (a set of coordinates) closed by virtual side nodes.

    Returns the triangulation and the color sequence of its sides, in
    counter-clockwise order.
    """
    real_nodes = sorted(region, key=lambda x: (x[1], x[0]))
    node_id = {x: i for i, x in enumerate(real_nodes)}
    colors = [lattice.color(x) for x in real_nodes]
    triangles: list[tuple[int, int, int]] = []
    xs = [x for x, _ in real_nodes]
    ys = [y for _, y in real_nodes]
    for x in product(range(min(xs) - 2, max(xs) + 3), range(min(ys) - 2, max(ys) + 3)):
        if not lattice.is_anchor(x):
            continue
        for corners in lattice.triangles_at(x):
            if all(c in node_id for c in corners):
                triangles.append(tuple(node_id[c] for c in corners))
    # directed sides of interior triangles; a hull side has no reverse twin
    directed = {}
    for t, (a, b, c) in enumerate(triangles):
        for u, v in ((a, b), (b, c), (c, a)):
            directed[(u, v)] = t
    hull = {u: v for (u, v) in directed if (v, u) not in directed}
    if len(hull) != len({v for v in hull.values()}):
        raise LatticeError("patch boundary is not a simple cycle")
    start = min(hull)
    cycle = [start]
    while hull[cycle[-1]] != start:
        cycle.append(hull[cycle[-1]])

    def missing(u, v):
        return next(x for x in COLORS if x not in (colors[u], colors[v]))

    n = len(cycle)
    side_color = [missing(cycle[i], cycle[(i + 1) % n]) for i in range(n)]
    # rotate so that a side starts at index 0
    shift = next(i for i in range(n) if side_color[i] != side_color[i - 1])
    cycle = cycle[shift:] + cycle[:shift]
    side_color = side_color[shift:] + side_color[:shift]
    virtual: list[int] = []
    sides: list[str] = []
    for i in range(n):
        if i == 0 or side_color[i] != side_color[i - 1]:
            virtual.append(len(colors))
            colors.append(side_color[i])
            sides.append(side_color[i])
        else:
            virtual.append(virtual[-1])
    real = [True] * len(real_nodes) + [False] * len(sides)
    for i in range(n):
        p, q = cycle[i], cycle[(i + 1) % n]
        triangles.append((q, p, virtual[i]))
    for i in range(n):
        q = cycle[(i + 1) % n]
        v1, v2 = virtual[i], virtual[(i + 1) % n]
        if v1 != v2:
            triangles.append((q, v1, v2))
    for tr in triangles:
        if len({colors[x] for x in tr}) != 3:
            raise LatticeError(f"triangle {tr} is not properly colored")
    owners: dict[tuple[int, int], tuple[int, int]] = {}
    adj: list[list[tuple[int, int] | None]] = [[None] * 3 for _ in triangles]
    first_corner: dict[int, tuple[int, int]] = {}
    for t, tr in enumerate(triangles):
        for k in range(3):
            first_corner.setdefault(tr[k], (t, k))
            a, b = tr[(k + 1) % 3], tr[(k + 2) % 3]
            if (b, a) in owners:
                t2, k2 = owners.pop((b, a))
                adj[t][k] = (t2, k2)
                adj[t2][k2] = (t, k)
            else:
                owners[(a, b)] = (t, k)
    tri = _Triangulation(colors, real, triangles, adj, first_corner)
    return tri, sides


# --------------------------------------------------------------------------
# builders


def build_hex_torus(n: int) -> Colex2:
    """6.6.6 lattice on a torus with ``n`` x ``n`` three-hexagon cells."""
    if n < 1:
        raise LatticeError("hex torus needs n >= 1")
    tri = _periodic(_HexDual, _Torus((n, n), (2 * n, -n)))
    return _to_colex(tri, "torus", degenerate=(n == 1), name=f"hex-torus:{n}")


def build_squareoct_torus(n: int) -> Colex2:
    """4.8.8 lattice on a torus: ``n*n`` green squares and ``n*n`` octagons."""
    if n < 2 or n % 2:
        raise LatticeError("4.8.8 torus needs even n >= 2 for a consistent octagon coloring")
    tri = _periodic(_SquareOctDual, _Torus((n, n), (n, -n)))
    return _to_colex(tri, "torus", name=f"squareoct-torus:{n}")


def _triangular_region(d: int) -> set[tuple[int, int]]:
    t = (d - 3) // 2
    c1, c2, c3 = _tri_offsets(t)
    r = 3 * t + 4
    return {
        (i, j)
        for i in range(-r, r + 1)
        for j in range(-r, r + 1)
        if i - j <= c1 and i + 2 * j <= c2 and -(2 * i + j) <= c3
    }


def _tri_offsets(t: int) -> tuple[int, int, int]:
    return (1, 2, 3 * t)


def build_triangular(d: int) -> Colex2:
    """Triangular 6.6.6 patch of odd distance ``d``; d=3 is the 7-qudit code."""
    if d < 3 or d % 2 == 0:
        raise LatticeError("triangular patch needs odd d >= 3")
    tri, sides = _planar(_HexDual, _triangular_region(d))
    if len(sides) != 3 or len(set(sides)) != 3:
        raise LatticeError(f"triangular patch has sides {sides}")
    return _to_colex(tri, "triangular", name=f"triangular:{d}")


def build_rect(w: int, h: int, scheme: str) -> Colex2:
    """Rectangular 4.8.8 patch with alternating boundary colors.

    ``blue_red``: blue bottom/top, red left/right.  ``blue_green``: blue
    bottom/top, green diagonal left/right (a parallelogram of the square
    lattice).  ``w`` and ``h`` count octagon rows/columns.
    """
    if w < 2 or h < 2:
        raise LatticeError("rectangular patch needs w, h >= 2")
    if scheme == "blue_red":
        region = {(i, j) for i in range(1, 2 * w) for j in range(0, 2 * h - 1)}
        expect = {"B", "R"}
    elif scheme == "blue_green":
        region = {
            (i, j) for j in range(0, 2 * h - 1) for i in range(j - 2 * w + 2, j + 1)
        }
        expect = {"B", "G"}
    else:
        raise LatticeError(f"unknown rectangle scheme {scheme!r}")
    tri, sides = _planar(_SquareOctDual, region)
    if len(sides) != 4 or set(sides) != expect or sides[0] == sides[1]:
        raise LatticeError(f"{scheme} patch has sides {sides}")
    return _to_colex(tri, f"rect_{scheme}", name=f"rect-{'bg' if scheme == 'blue_green' else 'br'}:{w}x{h}")


def build_from_spec(spec: str) -> Colex2:
    """Compact builder strings: ``hex-torus:2``, ``squareoct-torus:2``,
    ``triangular:3``, ``rect-bg:2x3``, ``rect-br:2x3``."""
    kind, _, arg = spec.partition(":")
    try:
        if kind == "hex-torus":
            return build_hex_torus(int(arg))
        if kind == "squareoct-torus":
            return build_squareoct_torus(int(arg))
        if kind == "triangular":
            return build_triangular(int(arg))
        if kind in ("rect-bg", "rect-br"):
            w, h = (int(x) for x in arg.split("x"))
            return build_rect(w, h, "blue_green" if kind == "rect-bg" else "blue_red")
    except ValueError as exc:
        if isinstance(exc, LatticeError):
            raise
        raise LatticeError(f"bad lattice spec {spec!r}") from exc
    raise LatticeError(f"unknown lattice spec {spec!r}")


# --------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.ok

    def first(self) -> str | None:
        return self.failures[0] if self.failures else None


def _cw_successor_pairs(colex: Colex2):
    """Yield (vertex, plaquette p, plaquette q) with q following p clockwise around the vertex."""
    nxt: dict[tuple[int, int], int] = {}  # (vertex, next vertex in plaquette cw order) -> plaquette
    prev: dict[int, list[tuple[int, int]]] = {}
    for p, (_, verts) in enumerate(colex.plaquettes):
        m = len(verts)
        for i, v in enumerate(verts):
            a, b = verts[i - 1], verts[(i + 1) % m]
            nxt[(v, b)] = p
            prev.setdefault(v, []).append((p, a))
    # clockwise around v: next-edge of p, then p, then prev-edge of p; the
    # plaquette after p is the one whose next-edge is p's prev-edge
    for v, items in prev.items():
        for p, a in items:
            q = nxt.get((v, a))
            if q is not None:
                yield v, p, q


def validate(colex: Colex2) -> ValidationReport:
    """Check every structural invariant; returns all failures found."""
    fail: list[str] = []
    V = colex.n_vertices
    if colex.boundary_spec not in BOUNDARY_SPECS:
        fail.append(f"unknown boundary_spec {colex.boundary_spec!r}")
    if len(colex.parity) != V:
        fail.append("parity length differs from vertex count")
    for v, (x, s) in enumerate(zip(colex.chirality, colex.parity)):
        if x not in (1, -1):
            fail.append(f"vertex {v}: chirality {x} not in {{+1,-1}}")
        if s not in (1, -1):
            fail.append(f"vertex {v}: parity {s} not in {{+1,-1}}")
    adjacency: dict[frozenset, list[int]] = {}
    degree = [0] * V
    for e, (u, v, c) in enumerate(colex.edges):
        if not (0 <= u < V and 0 <= v < V) or u == v:
            fail.append(f"edge {e}: bad endpoints ({u}, {v})")
            continue
        if c not in COLORS:
            fail.append(f"edge {e}: bad color {c!r}")
        adjacency.setdefault(frozenset((u, v)), []).append(e)
        degree[u] += 1
        degree[v] += 1
    if fail:
        return ValidationReport(fail)
    vp: list[dict[str, list[int]]] = [{} for _ in range(V)]
    for p, (c, verts) in enumerate(colex.plaquettes):
        if c not in COLORS:
            fail.append(f"plaquette {p}: bad color {c!r}")
            continue
        m = len(verts)
        if m < 2 or m % 2:
            fail.append(f"plaquette {p}: boundary length {m} is not even")
        if len(set(verts)) != m:
            fail.append(f"plaquette {p}: boundary repeats a vertex")
        for i, v in enumerate(verts):
            if not 0 <= v < V:
                fail.append(f"plaquette {p}: vertex {v} out of range")
                continue
            vp[v].setdefault(c, []).append(p)
            w = verts[(i + 1) % m]
            es = adjacency.get(frozenset((v, w)), [])
            if not es:
                fail.append(f"plaquette {p}: no edge between consecutive vertices {v}, {w}")
            elif all(colex.edges[e][2] == c for e in es):
                fail.append(f"edge {es[0]}: color {c} borders a plaquette of its own color ({p})")
    if fail:
        return ValidationReport(fail)
    for v in range(V):
        for c, ps in vp[v].items():
            if len(ps) > 1:
                fail.append(f"vertex {v}: borders {len(ps)} plaquettes of color {c}")
        if colex.is_torus:
            if degree[v] != 3:
                fail.append(f"vertex {v}: degree {degree[v]} != 3")
            if set(vp[v]) != set(COLORS):
                fail.append(f"vertex {v}: does not border one plaquette of each color")
        elif degree[v] > 3 or degree[v] < 1:
            fail.append(f"vertex {v}: degree {degree[v]}")
    for e, (u, v, c) in enumerate(colex.edges):
        for col in COLORS:
            if col == c:
                continue
            if vp[u].get(col) != vp[v].get(col) and col in vp[u] and col in vp[v]:
                fail.append(f"edge {e}: color {c} but endpoints border different {col} plaquettes")
        if colex.is_torus and not colex.degenerate and vp[u][c] == vp[v][c]:
            fail.append(f"edge {e}: color {c} does not join two distinct {c} plaquettes")
        if colex.chirality[u] == colex.chirality[v]:
            fail.append(f"edge {e}: endpoints have equal chirality")
    clockwise_rgb = {("R", "G"), ("G", "B"), ("B", "R")}
    for v, p, q in _cw_successor_pairs(colex):
        pair = (colex.plaquettes[p][0], colex.plaquettes[q][0])
        want = 1 if pair in clockwise_rgb else -1
        if colex.chirality[v] != want:
            fail.append(f"vertex {v}: chirality {colex.chirality[v]} inconsistent with plaquette order")
            break
    red_edges = [e for e, (_, _, c) in enumerate(colex.edges) if c == "R"]
    linked = [l[0] for l in colex.red_links]
    if sorted(linked) != red_edges:
        fail.append("red_links do not list every red edge exactly once")
    for k, (e, up, down) in enumerate(colex.red_links):
        if not 0 <= e < len(colex.edges):
            fail.append(f"red link {k}: bad edge {e}")
            continue
        u, v, _ = colex.edges[e]
        if {u, v} != {up, down}:
            fail.append(f"red link {k}: up/down do not match edge {e}")
            continue
        if colex.chirality[up] != 1:
            fail.append(f"red link {k}: up vertex {up} has chirality -1")
        # walking down -> up, blue on the left: in blue's clockwise order up precedes down
        pb = vp[up].get("B")
        if pb is not None and pb[0] in vp[down].get("B", []):
            verts = colex.plaquettes[pb[0]][1]
            i = verts.index(up)
            if verts[(i + 1) % len(verts)] != down:
                fail.append(f"red link {k}: blue plaquette not on the left of down->up")
    for v in colex.corner_C_sites:
        if not 0 <= v < V:
            fail.append(f"corner site {v} out of range")
        elif colex.is_torus:
            fail.append(f"corner site {v} on a torus")
        elif set(vp[v]) != {"R"}:
            fail.append(f"corner site {v} borders a non-red plaquette")
    return ValidationReport(fail)


# --------------------------------------------------------------------------
# transformations and I/O


def apply_parity_flip(colex: Colex2, site: int) -> Colex2:
    if not 0 <= site < colex.n_vertices:
        raise LatticeError(f"site {site} out of range")
    parity = list(colex.parity)
    parity[site] = -parity[site]
    return replace(colex, parity=tuple(parity))


_DOT_COLORS = {"R": "red", "G": "green", "B": "blue"}


def export_dot(colex: Colex2) -> str:
    lines = [f'graph "{colex.name or "colex"}" {{', "  node [shape=circle, fontsize=8];"]
    for v in range(colex.n_vertices):
        label = "+" if colex.chirality[v] == 1 else "-"
        extra = ", peripheries=2" if colex.parity[v] == -1 else ""
        lines.append(f'  v{v} [label="{v}{label}"{extra}];')
    for e, (u, v, c) in enumerate(colex.edges):
        lines.append(f"  v{u} -- v{v} [color={_DOT_COLORS[c]}];")
    for p, (c, verts) in enumerate(colex.plaquettes):
        lines.append(f"  // plaquette {p} {c}: {' '.join(map(str, verts))}")
    lines.append("}")
    return "\n".join(lines) + "\n"


_FIELDS = {
    "version",
    "boundary_spec",
    "degenerate",
    "vertices",
    "edges",
    "plaquettes",
    "red_links",
    "corner_C_sites",
}


def to_json(colex: Colex2) -> dict:
    return {
        "version": FILE_VERSION,
        "boundary_spec": colex.boundary_spec,
        "degenerate": colex.degenerate,
        "vertices": [{"chirality": x, "parity": s} for x, s in zip(colex.chirality, colex.parity)],
        "edges": [{"u": u, "v": v, "color": c} for u, v, c in colex.edges],
        "plaquettes": [{"color": c, "vertices": list(vs)} for c, vs in colex.plaquettes],
        "red_links": [{"edge": e, "up": u, "down": d} for e, u, d in colex.red_links],
        "corner_C_sites": list(colex.corner_C_sites),
    }


def _strict(obj: dict, keys: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise LatticeError(f"{where}: expected an object")
    extra = set(obj) - keys
    missing = keys - set(obj)
    if extra:
        raise LatticeError(f"{where}: unknown fields {sorted(extra)}")
    if missing:
        raise LatticeError(f"{where}: missing fields {sorted(missing)}")


def from_json(doc: dict, name: str = "") -> Colex2:
    _strict(doc, _FIELDS, "lattice")
    if doc["version"] != FILE_VERSION:
        raise LatticeError(f"unsupported lattice file version {doc['version']}")
    if doc["boundary_spec"] not in BOUNDARY_SPECS:
        raise LatticeError(f"unknown boundary_spec {doc['boundary_spec']!r}")
    if not isinstance(doc["degenerate"], bool):
        raise LatticeError("degenerate must be a boolean")
    for i, v in enumerate(doc["vertices"]):
        _strict(v, {"chirality", "parity"}, f"vertices[{i}]")
    for i, e in enumerate(doc["edges"]):
        _strict(e, {"u", "v", "color"}, f"edges[{i}]")
    for i, p in enumerate(doc["plaquettes"]):
        _strict(p, {"color", "vertices"}, f"plaquettes[{i}]")
    for i, r in enumerate(doc["red_links"]):
        _strict(r, {"edge", "up", "down"}, f"red_links[{i}]")
    return Colex2(
        chirality=tuple(int(v["chirality"]) for v in doc["vertices"]),
        parity=tuple(int(v["parity"]) for v in doc["vertices"]),
        edges=tuple((int(e["u"]), int(e["v"]), str(e["color"])) for e in doc["edges"]),
        plaquettes=tuple((str(p["color"]), tuple(int(x) for x in p["vertices"])) for p in doc["plaquettes"]),
        red_links=tuple((int(r["edge"]), int(r["up"]), int(r["down"])) for r in doc["red_links"]),
        boundary_spec=doc["boundary_spec"],
        corner_C_sites=tuple(int(x) for x in doc["corner_C_sites"]),
        degenerate=doc["degenerate"],
        name=name,
    )


def save(colex: Colex2, path: str | Path) -> None:
    Path(path).write_text(json.dumps(to_json(colex), indent=1) + "\n")


def load(path: str | Path) -> Colex2:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise LatticeError(f"{path}: not valid JSON ({exc})") from exc
    return from_json(doc, name=str(path))
