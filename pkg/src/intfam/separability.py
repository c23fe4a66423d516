"""Non-separability of families and the boundary families produced by single shifts.

A family B is separable when it splits into two non-empty parts B1, B2 that
are cross-intersecting (every member of B1 meets every member of B2).  That
happens exactly when the "disjointness graph" of B, joining two members when
they are disjoint, is disconnected: a split must keep every disjoint pair on
one side, and any union of connected components is a valid side.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import networkx as nx
import numpy as np

from .constructions import TemplateDescriptor, build
from .core import Family, Params, binom, bit, elements, popcount, to_mask


def _members(family) -> list[int]:
    return list(family.masks) if isinstance(family, Family) else list(family)


def disjointness_graph(family) -> nx.Graph:
    ms = _members(family)
    g = nx.Graph()
    g.add_nodes_from(range(len(ms)))
    g.add_edges_from((i, j) for i, j in combinations(range(len(ms)), 2) if not ms[i] & ms[j])
    return g


def is_non_separable(family) -> bool:
    """True when no split into two non-empty cross-intersecting parts exists.

    The empty family and singletons count as non-separable: they have no split.
    """
    ms = _members(family)
    if len(ms) <= 1:
        return True
    return nx.is_connected(disjointness_graph(ms))


def separation(family) -> tuple[list[int], list[int]] | None:
    """A cross-intersecting split (B1, B2), or None when non-separable."""
    ms = _members(family)
    if len(ms) <= 1:
        return None
    comps = list(nx.connected_components(disjointness_graph(ms)))
    if len(comps) == 1:
        return None
    first = sorted(comps[0])
    rest = sorted(set(range(len(ms))) - comps[0])
    return [ms[i] for i in first], [ms[i] for i in rest]


def is_non_separable_oracle(family, limit: int = 18) -> bool:
    """Enumerate every bipartition explicitly (vectorized); only for |B| <= limit."""
    ms = _members(family)
    m = len(ms)
    if m > limit:
        raise ValueError(f"oracle limited to {limit} members, got {m}")
    if m <= 1:
        return True
    # member 0 always on side 0; side mask over the remaining m - 1 members
    masks = np.arange(1, 1 << (m - 1), dtype=np.int64)
    sides = np.zeros((len(masks), m), dtype=bool)
    for j in range(1, m):
        sides[:, j] = (masks >> (j - 1)) & 1
    ok = np.ones(len(masks), dtype=bool)
    for i, j in combinations(range(m), 2):
        if not ms[i] & ms[j]:
            ok &= sides[:, i] == sides[:, j]
    return not ok.any()


@dataclass
class Boundary:
    """Members of F moved by the shift and their traces without x."""

    x: int
    y: int
    moved: list[int]
    reduced: list[int]
    in_reference: list[int] | None = None
    outside_reference: list[int] | None = None


def shift_boundary(family: Family, x: int, y: int, reference: Family | None = None) -> Boundary:
    """B_x = {G in F: x in G, y not in G, (G - x) + y not in F} and B' = {G - x}.

    Unlike :func:`intfam.shifting.shift` this direction replaces x by y, and
    x, y may come in either order.  With ``reference`` the boundary is split
    into the members inside and outside it.
    """
    if x == y:
        raise ValueError("x and y must differ")
    xb, yb = bit(x), bit(y)
    idx = family.index
    bx = [m for m in family if m & xb and not m & yb and ((m & ~xb) | yb) not in idx]
    out = Boundary(x, y, bx, [m & ~xb for m in bx])
    if reference is not None:
        ref = reference.index
        out.in_reference = [m for m in bx if m in ref]
        out.outside_reference = [m for m in bx if m not in ref]
    return out


def prop32_family(m: int, r: int, A) -> list[int]:
    """r-subsets B of [m] with 0 < |B & A| < |A|."""
    Am = to_mask(A)
    a = popcount(Am)
    return [s for s in (to_mask(c) for c in combinations(range(1, m + 1), r)) if 0 < popcount(s & Am) < a]


def prop32_size(m: int, r: int, a: int) -> int:
    return binom(m, r) - binom(m - a, r) - binom(m - a, r - a)


@dataclass
class RigidityRow:
    x: int
    y: int
    block_x: int
    block_y: int
    boundary: int
    trivial: bool
    expected_trivial: bool
    non_separable: bool

    @property
    def ok(self) -> bool:
        return self.trivial == self.expected_trivial and (self.trivial or self.non_separable)


def template_blocks(desc: TemplateDescriptor, params: Params) -> list[tuple[int, ...]]:
    """Ordered blocks: center, kernel, pages (if any), everything else.

    G(2) is symmetric in its three core elements, so they form one block.
    """
    d = desc.resolve(params)
    if d.kind == "G" and d.i == 2:
        blocks = [tuple(sorted((d.x, *d.E)))]
    else:
        blocks = [(d.x,), tuple(d.E)]
    if d.J:
        blocks.append(tuple(d.J))
    used = {v for b in blocks for v in b}
    blocks.append(tuple(v for v in range(1, params.n + 1) if v not in used))
    return [b for b in blocks if b]


def check_rigidity(desc: TemplateDescriptor, params: Params) -> list[RigidityRow]:
    """Boundary of every shift of the template, with its block position and separability.

    The boundary should be empty exactly when x sits in the same block as y
    or in a later one, and non-separable otherwise.
    """
    fam = build(desc, params)
    blocks = template_blocks(desc, params)
    where = {v: i + 1 for i, b in enumerate(blocks) for v in b}
    rows = []
    for x in range(1, params.n + 1):
        for y in range(1, params.n + 1):
            if x == y:
                continue
            b = shift_boundary(fam, x, y)
            bx, by = where[x], where[y]
            rows.append(
                RigidityRow(
                    x, y, bx, by,
                    boundary=len(b.moved),
                    trivial=not b.moved,
                    expected_trivial=bx >= by,
                    non_separable=is_non_separable(b.reduced),
                )
            )
    return rows


def rigidity_block_table(rows: list[RigidityRow]) -> list[dict]:
    """Collapse per-pair rows to one row per (block of x, block of y)."""
    table: dict[tuple[int, int], dict] = {}
    for r in rows:
        key = (r.block_x, r.block_y)
        t = table.setdefault(key, {"block_x": r.block_x, "block_y": r.block_y, "pairs": 0,
                                   "trivial": 0, "non_separable": 0, "ok": True})
        t["pairs"] += 1
        t["trivial"] += r.trivial
        t["non_separable"] += (not r.trivial) and r.non_separable
        t["ok"] = t["ok"] and r.ok
    return [table[k] for k in sorted(table)]


def boundary_sets(b: Boundary) -> list[tuple[int, ...]]:
    return [elements(m) for m in b.reduced]
