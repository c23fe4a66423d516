"""Bitmask k-sets and uniform families on the ground set [n] = {1, ..., n}.

Element ``e`` is stored in bit ``e - 1`` of a Python int, so a k-set is an
int with ``k`` bits set.  Ground sets are capped at 64 elements, which is far
beyond anything the exact routines in this package can handle anyway.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Iterable, Iterator, Mapping, Sequence

MAX_N = 64

KSet = int


def binom(a: int, b: int) -> int:
    """C(a, b) with C(a, b) = 0 for b < 0 or b > a.  Negative ``a`` is an error."""
    if a < 0:
        raise ValueError(f"binomial with negative top argument: C({a}, {b})")
    if b < 0 or b > a:
        return 0
    return comb(a, b)


@dataclass(frozen=True)
class Params:
    n: int
    k: int

    def __post_init__(self) -> None:
        if not (1 <= self.k <= self.n <= MAX_N):
            raise ValueError(f"need 1 <= k <= n <= {MAX_N}, got n={self.n}, k={self.k}")


def to_mask(elements: Iterable[int]) -> KSet:
    m = 0
    for e in elements:
        m |= 1 << (e - 1)
    return m


def elements(mask: KSet) -> tuple[int, ...]:
    out = []
    e = 1
    while mask:
        if mask & 1:
            out.append(e)
        mask >>= 1
        e += 1
    return tuple(out)


def popcount(mask: int) -> int:
    return mask.bit_count()


def bit(e: int) -> int:
    return 1 << (e - 1)


def ground_mask(n: int) -> int:
    return (1 << n) - 1


def all_ksets(n: int, k: int) -> list[KSet]:
    """All k-subsets of [n] as masks, in lexicographic order of element lists."""
    return [to_mask(c) for c in combinations(range(1, n + 1), k)]


def _lex_key(mask: KSet) -> tuple[int, ...]:
    return elements(mask)


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class Family:
    """A duplicate-free k-uniform family on [n], kept in lexicographic order.

    Construct with :meth:`from_sets` or :meth:`from_masks`; both validate.
    Iterating yields bitmasks.
    """

    n: int
    k: int
    masks: tuple[KSet, ...]
    _index: frozenset = field(default=frozenset(), repr=False, compare=False)

    @classmethod
    def from_masks(cls, n: int, k: int, masks: Iterable[KSet]) -> "Family":
        Params(n, k)
        seen: set[int] = set()
        full = ground_mask(n)
        for m in masks:
            if m & ~full or popcount(m) != k:
                raise FamilyError(f"{list(elements(m))} is not a {k}-subset of [{n}]")
            if m in seen:
                raise FamilyError(f"duplicate set {list(elements(m))}")
            seen.add(m)
        ordered = tuple(sorted(seen, key=_lex_key))
        return cls(n, k, ordered, frozenset(seen))

    @classmethod
    def from_sets(cls, n: int, k: int, sets: Iterable[Iterable[int]]) -> "Family":
        masks = []
        for s in sets:
            s = list(s)
            if len(set(s)) != len(s):
                raise FamilyError(f"set {s} repeats an element")
            if any(not (1 <= e <= n) for e in s):
                raise FamilyError(f"set {s} has an element outside [1, {n}]")
            if len(s) != k:
                raise FamilyError(f"set {s} has size {len(s)}, expected {k}")
            masks.append(to_mask(s))
        return cls.from_masks(n, k, masks)

    def with_masks(self, masks: Iterable[KSet]) -> "Family":
        return Family.from_masks(self.n, self.k, masks)

    @property
    def params(self) -> Params:
        return Params(self.n, self.k)

    def __len__(self) -> int:
        return len(self.masks)

    def __iter__(self) -> Iterator[KSet]:
        return iter(self.masks)

    def __contains__(self, item) -> bool:
        if not isinstance(item, int):
            item = to_mask(item)
        return item in self._index

    def __eq__(self, other) -> bool:
        if not isinstance(other, Family):
            return NotImplemented
        return self.n == other.n and self.k == other.k and self._index == other._index

    def __hash__(self) -> int:
        return hash((self.n, self.k, self._index))

    @property
    def index(self) -> frozenset:
        return self._index

    def sets(self) -> list[tuple[int, ...]]:
        return [elements(m) for m in self.masks]

    def issubset(self, other: "Family") -> bool:
        return self._index <= other._index

    def __repr__(self) -> str:
        return f"Family(n={self.n}, k={self.k}, size={len(self)})"

    # serialization
    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "sets": [list(s) for s in self.sets()]}

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data: Mapping) -> "Family":
        try:
            n, k, sets = int(data["n"]), int(data["k"]), data["sets"]
        except KeyError as exc:
            raise FamilyError(f"missing field {exc.args[0]!r}") from None
        return cls.from_sets(n, k, sets)

    @classmethod
    def loads(cls, text: str) -> "Family":
        return cls.from_json(json.loads(text))


def load_family(path) -> Family:
    with open(path) as fh:
        return Family.from_json(json.load(fh))


def save_family(family: Family, path) -> None:
    with open(path, "w") as fh:
        json.dump(family.to_json(), fh)
        fh.write("\n")


# predicates and statistics


def is_intersecting(family: Iterable[KSet]) -> bool:
    ms = list(family)
    for i, a in enumerate(ms):
        for b in ms[i + 1:]:
            if not a & b:
                return False
    return True


def disjoint_pair(family: Iterable[KSet]) -> tuple[KSet, KSet] | None:
    ms = list(family)
    for i, a in enumerate(ms):
        for b in ms[i + 1:]:
            if not a & b:
                return a, b
    return None


def are_cross_intersecting(first: Iterable[KSet], second: Iterable[KSet]) -> bool:
    second = list(second)
    return all(a & b for a in first for b in second)


def missing_degree(family: Iterable[KSet], v: int) -> int:
    b = bit(v)
    return sum(1 for m in family if not m & b)


def subset_degree(family: Iterable[KSet], subset: Iterable[int] | int) -> int:
    s = subset if isinstance(subset, int) else to_mask(subset)
    return sum(1 for m in family if m & s == s)


def degrees(family: Family) -> list[int]:
    """degrees(F)[v] for v in 0..n (index 0 unused)."""
    out = [0] * (family.n + 1)
    for m in family:
        for e in elements(m):
            out[e] += 1
    return out


def min_missing_degree(family: Family) -> int:
    deg = degrees(family)
    return len(family) - max(deg[1:])


def hitting_sets(members: Sequence[int], allowed: int, budget: int) -> Iterator[int]:
    """Yield hitting sets of ``members`` drawn from ``allowed`` with at most ``budget`` elements.

    Branches on the elements of the first member not hit yet.  Every hitting
    set within the budget contains one of the yielded sets, which is all the
    callers need.
    """

    def rec(chosen: int, size: int) -> Iterator[int]:
        for m in members:
            if not m & chosen:
                break
        else:
            yield chosen
            return
        if size == budget:
            return
        opts = m & allowed
        while opts:
            low = opts & -opts
            yield from rec(chosen | low, size + 1)
            opts ^= low

    yield from rec(0, 0)


def pad(mask: int, allowed: int, size: int) -> int | None:
    """Add the smallest elements of ``allowed`` to ``mask`` until it has ``size`` bits."""
    need = size - popcount(mask)
    rest = allowed & ~mask
    while need > 0 and rest:
        low = rest & -rest
        mask |= low
        rest ^= low
        need -= 1
    return mask if need == 0 else None


def covering_number(family: Family) -> int:
    """Smallest t such that some t-set meets every member (0 for the empty family)."""
    ms = list(family)
    if not ms:
        return 0
    full = ground_mask(family.n)
    for t in range(1, family.k + 1):
        if next(hitting_sets(ms, full, t), None) is not None:
            return t
    raise AssertionError("a member itself is always a cover")


def covering_number_brute(family: Family) -> int:
    ms = list(family)
    if not ms:
        return 0
    for t in range(1, family.n + 1):
        for c in combinations(range(1, family.n + 1), t):
            s = to_mask(c)
            if all(m & s for m in ms):
                return t
    raise AssertionError("unreachable")


def _as_permutation(n: int, perm) -> list[int]:
    """Normalise a relabelling to a list p with p[v] the image of v (p[0] unused)."""
    if isinstance(perm, Mapping):
        images = [0] + [perm.get(v, v) for v in range(1, n + 1)]
    else:
        perm = list(perm)
        if len(perm) != n:
            raise ValueError(f"relabelling has {len(perm)} entries, expected {n}")
        images = [0] + perm
    if sorted(images[1:]) != list(range(1, n + 1)):
        raise ValueError("relabelling is not a bijection of [n]")
    return images


def relabel(family: Family, perm) -> Family:
    """Apply a bijection of [n] given as a mapping v -> image or a list of images of 1..n."""
    p = _as_permutation(family.n, perm)
    out = []
    for m in family:
        out.append(sum(1 << (p[e] - 1) for e in elements(m)))
    return family.with_masks(out)


def random_permutation(n: int, rng) -> list[int]:
    p = list(range(1, n + 1))
    rng.shuffle(p)
    return p


def describe(mask: KSet) -> str:
    return "{" + ",".join(map(str, elements(mask))) + "}"


def random_intersecting(n: int, k: int, rng, size: int | None = None) -> Family:
    """Greedy random intersecting family: scan k-sets in random order, keep those meeting every kept set.

    Stops at ``size`` members when given, otherwise the result is maximal.
    """
    pool = all_ksets(n, k)
    rng.shuffle(pool)
    kept: list[int] = []
    for s in pool:
        if size is not None and len(kept) >= size:
            break
        if all(s & m for m in kept):
            kept.append(s)
    return Family.from_masks(n, k, kept)
