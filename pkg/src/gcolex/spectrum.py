"""Exact ground-space degeneracy.

Three independent routes are provided.

``orbit``
    enumerate every configuration passing all diagonal constraints, then
    count orbits of the permutation group generated by the off-diagonal
    stabilizer terms (connected components of the generator graph).
``rank_oracle``
    materialize the projector product as an integer sparse matrix on the
    full configuration space and take its exact trace.
``burnside``
    the same trace written as a sum over group labels of the averaged
    terms, contracted one variable at a time like a tensor network.  Needed
    when the valid set is far too large to list (S3 rectangles).
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from math import prod

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .colex import Colex2
from .group import FiniteGroup
from .stabilizer import (
    BudgetError,
    DiagPredicate,
    OperatorAsSum,
    PermOp,
    StabilizerSet,
    _support_configs,
    build_stabilizers,
    default_budget,
    factor_matrix,
)

__all__ = [
    "GroundSpaceReport",
    "Problem",
    "color_code_problem",
    "enumerate_valid",
    "estimate_valid",
    "count_orbits",
    "degeneracy",
    "degeneracy_rank_oracle",
    "degeneracy_burnside",
    "ORACLE_CAP",
]

ORACLE_CAP = 1 << 20


@dataclass(frozen=True)
class Problem:
    """What every route needs: sites, constraints and the averaged factors.

    ``averages`` is the ordered product of averaging sums whose trace (after
    the ``predicates`` projector) is the degeneracy; ``generators`` generate
    the same permutation group and drive orbit counting.
    """

    group: FiniteGroup
    n_sites: int
    predicates: tuple[DiagPredicate, ...]
    generators: tuple[PermOp, ...]
    averages: tuple[OperatorAsSum, ...]
    lattice: str = ""
    literal: tuple[OperatorAsSum, ...] = ()  # stabilizers exactly as built, for the dense oracle


def color_code_problem(colex: Colex2, G: FiniteGroup, stabs: StabilizerSet | None = None) -> Problem:
    stabs = stabs or build_stabilizers(colex, G)
    # every S^C commutes with every undressed S^X, so the dressing can be
    # collected to the right: prod_p dressed_p * prod_l C_l = prod_p S^X_p * prod_l C_l
    averages = [f for s in stabs.SX for f in s.factors]
    averages += [f for s in stabs.SC for f in s.factors]
    literal = [f for s in stabs.dressed for f in s.factors] + [f for s in stabs.SC for f in s.factors]
    return Problem(G, colex.n_vertices, stabs.predicates, stabs.generators, tuple(averages), colex.name,
                   tuple(literal))


@dataclass
class GroundSpaceReport:
    valid_count: int | None
    orbit_count: int
    method: str
    lattice: str
    group: str
    runtime: float
    generators: int = 0

    @property
    def degeneracy(self) -> int:
        return self.orbit_count

    def summary(self) -> str:
        valid = "?" if self.valid_count is None else self.valid_count
        return f"degeneracy={self.orbit_count} valid={valid} method={self.method}"

    def to_json(self, timing: bool = False) -> dict:
        """Report fields; ``runtime`` only on request so reruns stay byte-identical."""
        doc = asdict(self)
        if not timing:
            del doc["runtime"]
        return doc

    def dumps(self, timing: bool = False) -> str:
        return json.dumps(self.to_json(timing), indent=2, sort_keys=True)


# --------------------------------------------------------------------------
# valid set


def _site_order(prob: Problem) -> list[int]:
    """Greedy order closing constraints early: next site completes the most
    predicates, then touches the most partly assigned ones, then lowest index."""
    sites = [[pr for pr in prob.predicates if any(v == s for v, _ in pr.factors)] for s in range(prob.n_sites)]
    left = {id(pr): len({v for v, _ in pr.factors}) for pr in prob.predicates}
    done: set[int] = set()
    order: list[int] = []
    while len(order) < prob.n_sites:
        best = None
        for s in range(prob.n_sites):
            if s in done:
                continue
            preds = {id(pr): pr for pr in sites[s]}.values()
            closes = sum(1 for pr in preds if left[id(pr)] == 1)
            touches = sum(1 for pr in preds if left[id(pr)] < len({v for v, _ in pr.factors}))
            key = (-closes, -touches, s)
            if best is None or key < best:
                best = key
        s = best[2]
        done.add(s)
        order.append(s)
        for pr in {id(pr): pr for pr in sites[s]}.values():
            left[id(pr)] -= 1
    return order


def estimate_valid(prob: Problem) -> float:
    """Heuristic size of the valid set: each constraint keeps |accept|/|G| of the states."""
    G = prob.group
    est = float(G.order) ** prob.n_sites
    for pr in prob.predicates:
        est *= len(pr.accept) / G.order
    return est


def enumerate_valid(prob: Problem, budget: int | None = None) -> np.ndarray:
    """All configurations satisfying every predicate.

    Sites are assigned in the greedy order of ``_site_order`` and each
    predicate is applied as soon as its last site is assigned.  The row order
    is deterministic.
    """
    budget = default_budget() if budget is None else budget
    G = prob.group
    V = prob.n_sites
    est = estimate_valid(prob)
    if est > budget:
        raise BudgetError(f"estimated {est:.3g} valid configurations exceed the budget {budget}")
    order = _site_order(prob)
    rank = {v: i for i, v in enumerate(order)}
    due: list[list[DiagPredicate]] = [[] for _ in range(V)]
    for pr in prob.predicates:
        if pr.factors:
            due[max(rank[v] for v, _ in pr.factors)].append(pr)
    dtype = np.int8 if G.order < 128 else np.int32
    X = np.zeros((1, V), dtype=dtype)
    elems = np.arange(G.order, dtype=dtype)
    for i, v in enumerate(order):
        n = len(X)
        if n * G.order > budget:
            raise BudgetError(
                f"partial enumeration reached {n * G.order} states (estimate {est:.3g}); budget {budget}"
            )
        X = np.repeat(X, G.order, axis=0)
        X[:, v] = np.tile(elems, n)
        for pr in due[i]:
            X = X[pr.holds_batch(G, X)]
    return X


def _encode(G: FiniteGroup, X: np.ndarray) -> np.ndarray:
    V = X.shape[1]
    if V * np.log2(max(G.order, 2)) >= 63:
        raise BudgetError("configuration encoding exceeds 63 bits")
    pows = G.order ** np.arange(V - 1, -1, -1, dtype=np.int64)
    return X.astype(np.int64) @ pows


def count_orbits(prob: Problem, valid: np.ndarray) -> int:
    """Orbits of the generator group on ``valid`` via a connected-components sweep."""
    G = prob.group
    n = len(valid)
    if n == 0:
        return 0
    codes = _encode(G, valid)
    order = np.argsort(codes)
    codes = codes[order]
    valid = valid[order]
    src, dst = [], []
    base = np.arange(n)
    for gen in prob.generators:
        img = _encode(G, gen.apply_batch(G, valid.astype(np.int64)))
        idx = np.searchsorted(codes, img)
        idx[idx == n] = 0
        if not np.array_equal(codes[idx], img):
            raise AssertionError("generator maps a valid configuration outside the valid set")
        moved = idx != base
        src.append(base[moved])
        dst.append(idx[moved])
    if src:
        s, d = np.concatenate(src), np.concatenate(dst)
    else:
        s = d = np.zeros(0, dtype=np.int64)
    graph = sparse.coo_matrix((np.ones(len(s), dtype=np.int8), (s, d)), shape=(n, n))
    k, _ = connected_components(graph, directed=True, connection="weak")
    return int(k)


# --------------------------------------------------------------------------
# dense trace oracle


def degeneracy_rank_oracle(prob: Problem, cap: int = ORACLE_CAP) -> GroundSpaceReport:
    """Exact trace of the full projector product as a sparse matrix on all ``|G|^V`` states.

    Uses the stabilizers exactly as built (dressed S^X with their S^C
    factors, then every S^C, then the S^Z projectors) rather than the
    rearranged product the other routes rely on.
    """
    t0 = time.perf_counter()
    G = prob.group
    dim = G.order**prob.n_sites
    if dim > cap:
        raise BudgetError(f"dense oracle dimension {dim} exceeds the cap {cap}")
    sites = list(range(prob.n_sites))
    X = _support_configs(G, sites)
    # projector onto the valid set, acting first
    mask = np.ones(dim, dtype=bool)
    for pr in prob.predicates:
        mask &= pr.holds_batch(G, X)
    mat = sparse.diags(mask.astype(np.int64), format="csr", dtype=np.int64)
    den = 1
    for f in reversed(prob.literal or prob.averages):
        mat = factor_matrix(G, f, sites, X) @ mat
        den *= f.denominator
    trace = Fraction(int(mat.diagonal().sum()), den)
    if trace.denominator != 1:
        raise AssertionError(f"non-integer trace {trace}")
    return GroundSpaceReport(int(mask.sum()), int(trace), "rank_oracle", prob.lattice, G.name,
                             time.perf_counter() - t0, len(prob.generators))


# --------------------------------------------------------------------------
# Burnside contraction


def _site_tables(G: FiniteGroup, f: OperatorAsSum, v: int):
    """Per term of ``f``: (left, right) factor at site ``v``."""
    out = []
    for _, perm, filt in f.terms:
        if filt:
            raise ValueError("averages must not carry filters")
        a = b = G.id
        for u, x, y in perm.actions:
            if u == v:
                a, b = x, y
        out.append((a, b))
    return np.array(out, dtype=np.int64).reshape(-1, 2)


def _eliminate(tensors: list[tuple[tuple[int, ...], np.ndarray]], domains: dict[int, int]):
    """Sum out every variable; returns the resulting scalar as a Python int."""
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    scalar = 1
    tensors = list(tensors)
    remaining = set(domains)
    while remaining:
        # min-fill, ties broken by the size of the new tensor
        best = None
        scopes = [frozenset(vs) for vs, _ in tensors]
        for var in sorted(remaining):
            scope = set().union(*(s for s in scopes if var in s)) if any(var in s for s in scopes) else {var}
            nb = sorted(scope - {var})
            fill = sum(
                1
                for i, a in enumerate(nb)
                for b in nb[i + 1 :]
                if not any(a in s and b in s for s in scopes)
            )
            size = prod(domains[u] for u in nb)
            if best is None or (fill, size) < best[0]:
                best = ((fill, size), var, scope)
        _, var, scope = best
        remaining.discard(var)
        involved = [t for t in tensors if var in t[0]]
        tensors = [t for t in tensors if var not in t[0]]
        if not involved:
            scalar *= domains[var]
            continue
        out_vars = tuple(sorted(scope - {var}))
        name = {u: letters[i] for i, u in enumerate(sorted(scope))}
        bound = prod(int(np.max(np.abs(a))) if a.size else 0 for _, a in involved) * domains[var]
        arrays = [a if bound < 2**62 else a.astype(object) for _, a in involved]
        spec = ",".join("".join(name[u] for u in vs) for vs, _ in involved)
        spec += "->" + "".join(name[u] for u in out_vars)
        res = np.einsum(spec, *arrays)
        if out_vars:
            if res.dtype == object and max(abs(int(x)) for x in res.flat) < 2**62:
                res = res.astype(np.int64)
            tensors.append((out_vars, res))
        else:
            scalar *= int(res)
    for vs, a in tensors:
        scalar *= int(a) if not vs else int(a.sum())
    return scalar


def degeneracy_burnside(prob: Problem) -> GroundSpaceReport:
    """Exact trace of (averages) x (predicate projector), by variable elimination.

    Variables are the site values ``x_v``, one label per averaged factor, and
    running products along every predicate.  A site factor demands that the
    composed action of all labels fixes ``x_v``.
    """
    t0 = time.perf_counter()
    G = prob.group
    n = G.order
    domains: dict[int, int] = {}
    tensors: list[tuple[tuple[int, ...], np.ndarray]] = []
    site_var = list(range(prob.n_sites))
    for v in site_var:
        domains[v] = n
    nxt = prob.n_sites
    den = 1
    touching: list[list[tuple[int, np.ndarray]]] = [[] for _ in range(prob.n_sites)]
    for f in prob.averages:
        var = nxt
        nxt += 1
        domains[var] = len(f.terms)
        d = f.denominator
        den *= d
        tensors.append(((var,), np.array([int(c * d) for c, _, _ in f.terms], dtype=np.int64)))
        for v in f.support:
            touching[v].append((var, _site_tables(G, f, v)))
    mul = G.mul.astype(np.int64)
    for v in site_var:
        # operator order: the last average acts first
        acts = list(reversed(touching[v]))
        vars_ = (v,) + tuple(var for var, _ in acts)
        shape = tuple(domains[u] for u in vars_)
        grids = np.indices(shape, sparse=True)
        y = np.broadcast_to(grids[0], grids[0].shape)
        for k, (_, tab) in enumerate(acts):
            h = grids[k + 1]
            y = mul[mul[tab[h, 0], y], tab[h, 1]]
        tensors.append((vars_, (np.broadcast_to(y, shape) == np.broadcast_to(grids[0], shape)).astype(np.int64)))
    # predicates as chains acc_k = acc_{k-1} * x_k
    for pr in prob.predicates:
        if pr.pre.actions:
            raise ValueError("burnside route needs plain predicates")
        prev = None
        for k, (v, inverted) in enumerate(pr.factors):
            vals = G.inv if inverted else np.arange(n)
            last = k == len(pr.factors) - 1
            if prev is None:
                # acc_0 = x_v^(+-1)
                t = np.zeros((n, n), dtype=np.int64)
                t[np.arange(n), vals] = 1
                cur = nxt
                nxt += 1
                domains[cur] = n
                tensors.append(((v, cur), t))
            else:
                cur = nxt
                nxt += 1
                domains[cur] = n
                t = np.zeros((n, n, n), dtype=np.int64)
                a, x = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
                t[a, x, mul[a, vals[x]]] = 1
                tensors.append(((prev, v, cur), t))
            prev = cur
            if last:
                acc = np.zeros(n, dtype=np.int64)
                acc[list(pr.accept)] = 1
                tensors.append(((cur,), acc))
    total = _eliminate(tensors, domains)
    trace = Fraction(total, den)
    if trace.denominator != 1:
        raise AssertionError(f"non-integer trace {trace}")
    return GroundSpaceReport(None, int(trace), "burnside", prob.lattice, G.name,
                             time.perf_counter() - t0, len(prob.generators))


# --------------------------------------------------------------------------


def degeneracy(prob_or_colex, G: FiniteGroup | None = None, method: str = "auto",
               budget: int | None = None) -> GroundSpaceReport:
    """Ground-space dimension; ``method`` is orbit, rank_oracle, burnside or auto.

    ``auto`` uses orbit counting when the valid set fits the budget and the
    Burnside contraction otherwise.
    """
    prob = prob_or_colex if isinstance(prob_or_colex, Problem) else color_code_problem(prob_or_colex, G)
    budget = default_budget() if budget is None else budget
    if method == "rank_oracle":
        return degeneracy_rank_oracle(prob)
    if method == "burnside":
        return degeneracy_burnside(prob)
    if method not in ("orbit", "auto"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto" and estimate_valid(prob) > budget:
        return degeneracy_burnside(prob)
    t0 = time.perf_counter()
    try:
        valid = enumerate_valid(prob, budget)
    except BudgetError:
        if method == "auto":
            return degeneracy_burnside(prob)
        raise
    k = count_orbits(prob, valid)
    return GroundSpaceReport(len(valid), k, "orbit", prob.lattice, prob.group.name,
                             time.perf_counter() - t0, len(prob.generators))
