"""Named intersecting families, their closed-form sizes, and the size comparison table."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Callable

from .core import Family, Params, all_ksets, bit, binom, popcount, to_mask

KINDS = ("Star", "HM", "T3", "G", "J", "K2", "K", "FP")


@dataclass(frozen=True)
class TemplateDescriptor:
    """A named family together with where it sits inside [n].

    Fields left as ``None`` are filled with the default placement by
    :meth:`resolve`: the center is 1, followed by the core/kernel, then the
    pages.  ``i`` is the index for the ``G``, ``J`` and ``K`` kinds.

    ``K`` is the two-exception family with ``|E1 & E2| = k - i``; ``K2`` is its
    ``i = 2`` member and insists on that intersection size.
    """

    kind: str
    i: int | None = None
    x: int | None = None
    E: tuple[int, ...] | None = None
    J: tuple[int, ...] | None = None
    E1: tuple[int, ...] | None = None
    E2: tuple[int, ...] | None = None
    Y: tuple[int, ...] | None = None
    Z: tuple[int, ...] | None = None
    Y0: tuple[int, ...] | None = None

    def label(self) -> str:
        return f"{self.kind}({self.i})" if self.kind in ("G", "J", "K") else self.kind

    def resolve(self, params: Params) -> "TemplateDescriptor":
        n, k = params.n, params.k
        kind = self.kind
        if kind not in KINDS:
            raise ValueError(f"unknown template kind {kind!r}")
        d = self
        x = 1 if d.x is None else d.x
        d = replace(d, x=x)
        rest = [v for v in range(1, n + 1) if v != x]

        if kind == "Star":
            pass
        elif kind == "HM":
            d = replace(d, E=d.E or tuple(rest[:k]))
        elif kind == "T3":
            if k != 3:
                raise ValueError("T3 is defined for k = 3 only")
            d = replace(d, x=None, E=d.E or (1, 2, 3))
        elif kind == "G":
            if d.i is None or not (2 <= d.i <= k):
                raise ValueError(f"G(i) needs 2 <= i <= k, got i={d.i}")
            d = replace(d, E=d.E or tuple(rest[: d.i]))
        elif kind == "J":
            if d.i is None or not (2 <= d.i <= k - 1):
                raise ValueError(f"J(i) needs 2 <= i <= k-1, got i={d.i}")
            E = d.E or tuple(rest[: k - 1])
            free = [v for v in rest if v not in E]
            d = replace(d, E=E, J=d.J or tuple(free[: d.i]))
        elif kind in ("K2", "K"):
            i = 2 if kind == "K2" else d.i
            if i is None or not (2 <= i <= k - 1):
                raise ValueError(f"K(i) needs 2 <= i <= k-1, got i={i}")
            E1 = d.E1 or tuple(rest[:k])
            if d.E2 is None:
                E2 = tuple(rest[: k - i]) + tuple(rest[k: k + i])
            else:
                E2 = d.E2
            d = replace(d, i=i, E1=E1, E2=E2)
        elif kind == "FP":
            Y = d.Y or tuple(rest[:k])
            Z = d.Z or tuple(v for v in rest if v not in Y)[: k - 1]
            d = replace(d, Y=Y, Z=Z, Y0=d.Y0 or tuple(sorted(Y)[:2]))
        d._validate(params)
        return d

    def _validate(self, params: Params) -> None:
        n, k = params.n, params.k

        def check(name, s, size):
            if s is None:
                return
            if len(set(s)) != len(s) or any(not 1 <= v <= n for v in s):
                raise ValueError(f"{name}={s} is not a set of elements of [{n}]")
            if size is not None and len(s) != size:
                raise ValueError(f"{name} must have {size} elements, got {len(s)}")

        kind = self.kind
        if self.x is not None and not 1 <= self.x <= n:
            raise ValueError(f"center {self.x} outside [1, {n}]")
        if kind == "HM":
            check("E", self.E, k)
        elif kind == "T3":
            check("E", self.E, 3)
        elif kind == "G":
            check("E", self.E, self.i)
        elif kind == "J":
            check("E", self.E, k - 1)
            check("J", self.J, self.i)
            if set(self.E) & set(self.J):
                raise ValueError("kernel and pages must be disjoint")
        elif kind in ("K2", "K"):
            check("E1", self.E1, k)
            check("E2", self.E2, k)
            if len(set(self.E1) & set(self.E2)) != k - self.i:
                raise ValueError(f"|E1 & E2| must be k-{self.i}")
        elif kind == "FP":
            check("Y", self.Y, k)
            check("Z", self.Z, k - 1)
            check("Y0", self.Y0, 2)
            if set(self.Y) & set(self.Z) or self.x in self.Y or self.x in self.Z:
                raise ValueError("x, Y and Z must be pairwise disjoint")
            if not set(self.Y0) <= set(self.Y):
                raise ValueError("Y0 must lie inside Y")
        for name in ("E", "J", "E1", "E2", "Y", "Z"):
            s = getattr(self, name)
            if s is not None and kind != "T3" and self.x in s:
                raise ValueError(f"center {self.x} must not lie in {name}")


def member_test(desc: TemplateDescriptor, params: Params) -> Callable[[int], bool]:
    """Membership predicate for the resolved descriptor, on bitmasks."""
    d = desc.resolve(params)
    kind = d.kind
    xb = bit(d.x) if d.x is not None else 0
    if kind == "Star":
        return lambda s: bool(s & xb)
    if kind == "HM":
        E = to_mask(d.E)
        return lambda s: bool(s & xb and s & E) or s == E
    if kind == "T3":
        A = to_mask(d.E)
        return lambda s: popcount(s & A) >= 2
    if kind == "G":
        E = to_mask(d.E)
        return lambda s: s & E == E or bool(s & xb and s & E)
    if kind == "J":
        E, J = to_mask(d.E), to_mask(d.J)
        XJ = J | xb
        return lambda s: (s & E == E and bool(s & J)) or s & XJ == XJ or bool(s & xb and s & E)
    if kind in ("K2", "K"):
        E1, E2 = to_mask(d.E1), to_mask(d.E2)
        return lambda s: bool(s & xb and s & E1 and s & E2) or s == E1 or s == E2
    if kind == "FP":
        Y, Z = to_mask(d.Y), to_mask(d.Z)
        y1, y2 = (bit(v) for v in d.Y0)
        gens = [Y, Z | y1, Z | y2, xb | y1 | y2]
        return lambda s: bool(s & xb and s & Y and s & Z) or any(s & g == g for g in gens)
    raise ValueError(kind)


@lru_cache(maxsize=256)
def _build(desc: TemplateDescriptor, n: int, k: int) -> Family:
    params = Params(n, k)
    test = member_test(desc, params)
    return Family.from_masks(n, k, [s for s in all_ksets(n, k) if test(s)])


def build(desc: TemplateDescriptor | str, params: Params, i: int | None = None) -> Family:
    """Materialize a named family.  ``desc`` may be a bare kind name."""
    if isinstance(desc, str):
        desc = TemplateDescriptor(desc, i=i)
    desc = desc.resolve(params)
    return _build(desc, params.n, params.k)


# closed forms


class Bound(str, Enum):
    EKR_max = "EKR_max"
    HM_bound = "HM_bound"
    HK_bound = "HK_bound"
    Main_i = "Main_i"
    Main_ii = "Main_ii"
    Eq1_K2 = "Eq1_K2"
    Eq2_J3 = "Eq2_J3"
    Gi_size = "Gi_size"
    Ji_size = "Ji_size"


INT64_MAX = 2**63 - 1


def formula_value(tag: Bound | str, params: Params, i: int | None = None) -> int:
    """Exact integer value of a named size formula.

    ``Eq1_K2`` is the two-exception size with ``|E1 & E2| = k - i`` (default
    ``i = 2``).  ``Gi_size`` and ``Ji_size`` are the sizes of G(i) and J(i).
    """
    tag = Bound(tag)
    n, k = params.n, params.k
    C = binom
    if tag in (Bound.Gi_size, Bound.Ji_size):
        if i is None:
            raise ValueError(f"{tag.value} needs i")
        if n < 2 * k:
            raise ValueError(f"{tag.value} is defined for n >= 2k")
    elif n < 2 * k + 1:
        raise ValueError(f"{tag.value} is defined for n >= 2k+1, got n={n}, k={k}")

    if tag is Bound.EKR_max:
        v = C(n - 1, k - 1)
    elif tag is Bound.HM_bound:
        v = C(n - 1, k - 1) - C(n - k - 1, k - 1) + 1
    elif tag is Bound.HK_bound:
        v = C(n - 1, k - 1) - C(n - k - 1, k - 1) - C(n - k - 2, k - 2) + 2
    elif tag in (Bound.Main_i, Bound.Eq1_K2):
        j = 2 if (tag is Bound.Main_i or i is None) else i
        if not 2 <= j <= k - 1:
            raise ValueError("Eq1_K2 needs 2 <= i <= k-1")
        v = C(n - 1, k - 1) - 2 * C(n - k - 1, k - 1) + C(n - k - j - 1, k - 1) + 2
    elif tag in (Bound.Main_ii, Bound.Eq2_J3):
        v = C(n - 1, k - 1) - C(n - k - 1, k - 1) - C(n - k - 2, k - 2) - C(n - k - 3, k - 3) + 3
    elif tag is Bound.Gi_size:
        if not 2 <= i <= k:
            raise ValueError("G(i) needs 2 <= i <= k")
        v = C(n - 1, k - 1) - C(n - i - 1, k - 1) + C(n - i - 1, k - i)
    else:
        if not 2 <= i <= k - 1:
            raise ValueError("J(i) needs 2 <= i <= k-1")
        v = C(n - 1, k - 1) - C(n - k, k - 1) + i + C(n - k - i, k - i - 1)
    if v > INT64_MAX:
        raise OverflowError(f"{tag.value}({n},{k}) does not fit in 64 bits")
    return v


@dataclass(frozen=True)
class CrossoverRow:
    n: int
    k: int
    k2: int
    j3: int
    relation: str  # "greater", "equal" or "less": sign of |K2| - |J3|
    expected: str

    @property
    def matches(self) -> bool:
        return self.relation == self.expected


def expected_relation(n: int, k: int) -> str:
    if n <= 3 * k - 3:
        return "equal" if k == 4 else "greater"
    return "less"


def crossover_table(k: int, n_range: range | tuple[int, int]) -> list[CrossoverRow]:
    """Compare the two-exception size with the J(3) size over ``n_range`` (inclusive pair or range)."""
    if isinstance(n_range, tuple):
        n_range = range(n_range[0], n_range[1] + 1)
    rows = []
    for n in n_range:
        p = Params(n, k)
        a = formula_value(Bound.Eq1_K2, p)
        b = formula_value(Bound.Eq2_J3, p)
        rel = "greater" if a > b else "equal" if a == b else "less"
        rows.append(CrossoverRow(n, k, a, b, rel, expected_relation(n, k)))
    return rows
