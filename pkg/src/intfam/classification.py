"""Structural verdicts for intersecting families and isomorphism testing.

Every verdict is computed independently, and a witness is reported as the
lexicographically least one (center first, then the remaining sets).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import asdict, dataclass
from itertools import combinations

from .constructions import TemplateDescriptor, build
from .core import (
    Family,
    FamilyError,
    Params,
    bit,
    degrees,
    describe,
    disjoint_pair,
    elements,
    ground_mask,
    hitting_sets,
    pad,
    popcount,
    to_mask,
)


def _missing(family: Family, x: int) -> list[int]:
    b = bit(x)
    return [m for m in family if not m & b]


def _containing(family: Family, x: int) -> list[int]:
    b = bit(x)
    return [m for m in family if m & b]


def _least_padded_hitting_set(members, allowed: int, size: int) -> int | None:
    """Lexicographically least ``size``-set inside ``allowed`` meeting every member."""
    best = None
    for h in hitting_sets(members, allowed, size):
        p = pad(h, allowed, size)
        if p is not None and (best is None or elements(p) < elements(best)):
            best = p
    return best


def ekr_centers(family: Family) -> list[int]:
    common = ground_mask(family.n)
    for m in family:
        common &= m
    return list(elements(common))


def hm_witness(family: Family, x: int) -> int | None:
    """Exceptional k-set E with every member either containing x and meeting E, or equal to E."""
    n, k = family.n, family.k
    miss = _missing(family, x)
    if len(miss) > 1:
        return None
    others = [m & ~bit(x) for m in _containing(family, x)]
    if miss:
        E = miss[0]
        return E if all(m & E for m in others) else None
    return _least_padded_hitting_set(others, ground_mask(n) & ~bit(x), k)


def j2_witness(family: Family, x: int) -> tuple[int, int] | None:
    """(kernel, pages) of a J(2) containing the family with center x, or None."""
    n, k = family.n, family.k
    xb = bit(x)
    full = ground_mask(n)
    miss = _missing(family, x)
    if len(miss) > 2:
        return None
    inner = [m & ~xb for m in _containing(family, x)]

    def ok(E: int, J: int) -> bool:
        return all(m & E or m & J == J for m in inner)

    if len(miss) == 2:
        E = miss[0] & miss[1]
        if popcount(E) != k - 1:
            return None
        J = (miss[0] | miss[1]) & ~E
        return (E, J) if ok(E, J) else None

    best = None
    if len(miss) == 1:
        M = miss[0]
        for j1 in elements(M):
            E = M & ~bit(j1)
            for j2 in elements(full & ~M & ~xb):
                J = bit(j1) | bit(j2)
                if ok(E, J):
                    key = (elements(E), elements(J))
                    if best is None or key < best[0]:
                        best = (key, (E, J))
        return None if best is None else best[1]

    for pair in combinations(elements(full & ~xb), 2):
        J = to_mask(pair)
        rest = [m for m in inner if m & J != J]
        E = _least_padded_hitting_set(rest, full & ~xb & ~J, k - 1)
        if E is not None:
            key = (elements(E), elements(J))
            if best is None or key < best[0]:
                best = (key, (E, J))
    return None if best is None else best[1]


def g2_cores(family: Family) -> list[int]:
    """All 3-sets A with |G & A| >= 2 for every member G, in lexicographic order."""
    n = family.n
    ms = list(family)
    if not ms:
        return [to_mask(c) for c in combinations(range(1, n + 1), 3)]
    cands = set()
    for pair in combinations(elements(ms[0]), 2):
        for v in range(1, n + 1):
            if v not in pair:
                cands.add(to_mask(pair) | bit(v))
    good = [A for A in cands if all(popcount(m & A) >= 2 for m in ms)]
    return sorted(good, key=elements)


def g3_witnesses(family: Family) -> list[tuple[int, int]]:
    """All (center, 3-set core) pairs of a G(3) containing the family, lexicographically."""
    n = family.n
    full = ground_mask(n)
    out = []
    for x in range(1, n + 1):
        xb = bit(x)
        miss = _missing(family, x)
        inner = [m & ~xb for m in _containing(family, x)]
        if miss:
            common = full
            for m in miss:
                common &= m
            if popcount(common) < 3:
                continue
            cands = [to_mask(c) for c in combinations(elements(common), 3)]
        else:
            cands = [to_mask(c) for c in combinations(elements(full & ~xb), 3)]
        for E in cands:
            if all(m & E for m in inner):
                out.append((x, E))
    return out


@dataclass
class ClassificationReport:
    n: int
    k: int
    size: int
    is_EKR: bool
    ekr_center: int | None
    is_HM: bool
    hm_witness: tuple | None  # (x, E)
    in_J2: bool
    j2_witness: tuple | None  # (x, E, J)
    in_G2: bool
    g2_core: tuple | None
    in_G3: bool
    g3_witness: tuple | None  # (x, E)
    min_missing_degree: int

    def to_dict(self) -> dict:
        return asdict(self)

    def verdicts(self) -> tuple[bool, bool, bool, bool, bool]:
        return (self.is_EKR, self.is_HM, self.in_J2, self.in_G2, self.in_G3)

    def descriptor(self, name: str) -> TemplateDescriptor | None:
        """Template containing the family, built from the reported witness."""
        if name == "EKR" and self.is_EKR:
            return TemplateDescriptor("Star", x=self.ekr_center)
        if name == "HM" and self.is_HM:
            x, E = self.hm_witness
            return TemplateDescriptor("HM", x=x, E=E)
        if name == "J2" and self.in_J2:
            x, E, J = self.j2_witness
            return TemplateDescriptor("J", i=2, x=x, E=E, J=J)
        if name == "G2" and self.in_G2:
            x, *E = self.g2_core
            return TemplateDescriptor("G", i=2, x=x, E=tuple(E))
        if name == "G3" and self.in_G3:
            x, E = self.g3_witness
            return TemplateDescriptor("G", i=3, x=x, E=E)
        return None


def classify(family: Family) -> ClassificationReport:
    pair = disjoint_pair(family)
    if pair is not None:
        raise FamilyError(f"family is not intersecting: {describe(pair[0])} and {describe(pair[1])} are disjoint")
    n = family.n
    centers = ekr_centers(family)

    hm = None
    j2 = None
    for x in range(1, n + 1):
        if hm is None:
            E = hm_witness(family, x)
            if E is not None:
                hm = (x, elements(E))
        if j2 is None:
            w = j2_witness(family, x)
            if w is not None:
                j2 = (x, elements(w[0]), elements(w[1]))
        if hm is not None and j2 is not None:
            break

    cores = g2_cores(family)
    g3 = g3_witnesses(family)
    deg = degrees(family)
    return ClassificationReport(
        n=n,
        k=family.k,
        size=len(family),
        is_EKR=bool(centers),
        ekr_center=centers[0] if centers else None,
        is_HM=hm is not None,
        hm_witness=hm,
        in_J2=j2 is not None,
        j2_witness=j2,
        in_G2=bool(cores),
        g2_core=elements(cores[0]) if cores else None,
        in_G3=bool(g3),
        g3_witness=(g3[0][0], elements(g3[0][1])) if g3 else None,
        min_missing_degree=len(family) - max(deg[1:]),
    )


def is_template_subfamily(family: Family, desc: TemplateDescriptor) -> bool:
    target = build(desc, Params(family.n, family.k))
    return family.issubset(target)


# isomorphism


def _pair_degrees(family: Family) -> list[list[int]]:
    n = family.n
    d = [[0] * (n + 1) for _ in range(n + 1)]
    for m in family:
        es = elements(m)
        for a, b in combinations(es, 2):
            d[a][b] += 1
            d[b][a] += 1
    return d


def find_isomorphism(source: Family, target: Family, mode: str = "equal") -> dict[int, int] | None:
    """A bijection p of [n] mapping ``source`` onto ``target`` (``mode="equal"``)
    or into it (``mode="sub"``), found by backtracking with degree pruning.
    """
    if (source.n, source.k) != (target.n, target.k):
        return None
    if mode not in ("equal", "sub"):
        raise ValueError(mode)
    equal = mode == "equal"
    if equal and len(source) != len(target):
        return None
    if len(source) > len(target):
        return None
    n = source.n
    ds, dt = degrees(source), degrees(target)
    if equal and sorted(ds[1:]) != sorted(dt[1:]):
        return None
    ps, pt = _pair_degrees(source), _pair_degrees(target)

    order = sorted(range(1, n + 1), key=lambda v: (-ds[v], v))
    pos = {v: i for i, v in enumerate(order)}
    closing: list[list[int]] = [[] for _ in range(n)]
    for m in source:
        closing[max(pos[e] for e in elements(m))].append(m)
    tset = target.index
    images = [0] * (n + 1)
    used = [False] * (n + 1)

    def fits(a: int, b: int) -> bool:
        return a == b if equal else a <= b

    def image(m: int) -> int:
        out = 0
        for e in elements(m):
            out |= bit(images[e])
        return out

    def rec(i: int) -> bool:
        if i == n:
            return True
        v = order[i]
        for w in range(1, n + 1):
            if used[w] or not fits(ds[v], dt[w]):
                continue
            if any(not fits(ps[v][u], pt[w][images[u]]) for u in order[:i]):
                continue
            images[v] = w
            if all(image(m) in tset for m in closing[i]):
                used[w] = True
                if rec(i + 1):
                    return True
                used[w] = False
            images[v] = 0
        return False

    if rec(0):
        return {v: images[v] for v in range(1, n + 1)}
    return None


def isomorphic_to(family: Family, desc: TemplateDescriptor, mode: str = "equal") -> dict[int, int] | None:
    """Relabelling carrying the family onto (or into) the named template, or None when absent."""
    return find_isomorphism(family, build(desc, Params(family.n, family.k)), mode)


def are_isomorphic(a: Family, b: Family) -> bool:
    return find_isomorphism(a, b) is not None


# Degree thresholds that pin down the core of a G(2) or G(3) family (k = 4).


def _high_degree(family: Family, size: int, threshold: int, strict: bool):
    counts = Counter(c for m in family for c in combinations(elements(m), size))
    for combo, d in sorted(counts.items()):
        if d > threshold or (not strict and d == threshold):
            yield combo, d


def g2_pair_violations(family: Family, core) -> list[tuple[int, int]]:
    """Pairs with degree above 2n-7 that are not inside the core (should be empty for subfamilies of G(2))."""
    A = to_mask(core)
    return [p for p, _ in _high_degree(family, 2, 2 * family.n - 7, True) if to_mask(p) & A != to_mask(p)]


def g3_pair_violations(family: Family, center: int, core) -> list[tuple[int, int]]:
    """Pairs breaking either degree rule of a G(3) subfamily.

    Degree at least 3n-12 forces the center into the pair; degree above it
    also forces the pair into center plus core.
    """
    B = to_mask(core) | bit(center)
    t = 3 * family.n - 12
    out = []
    for p, d in _high_degree(family, 2, t, False):
        pm = to_mask(p)
        if center not in p or (d > t and pm & B != pm):
            out.append(p)
    return out


def g3_triple_violations(family: Family, center: int, core) -> list[tuple[int, int, int]]:
    """Triples of degree at least n-3 that are neither inside center plus core nor two-in with the center."""
    if family.n <= 6:
        raise ValueError("the triple rule needs n > 6")
    B = to_mask(core) | bit(center)
    out = []
    for p, _ in _high_degree(family, 3, family.n - 3, False):
        inside = popcount(to_mask(p) & B)
        if not (inside == 3 or (inside == 2 and center in p)):
            out.append(p)
    return out
