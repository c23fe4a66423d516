"""Traces of a family on a small window Y and the size bound they recompose."""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import Family, binom, elements, popcount, to_mask

# Largest allowed number of distinct traces of each size, for k = 4 and a 9-element window.
K4_CAPS = {0: 0, 1: 0, 2: 3, 3: 18, 4: 50}


def trace_caps(k: int) -> dict[int, int]:
    """Cap on |A_i| for i = 0..k."""
    if k == 4:
        return dict(K4_CAPS)
    if k < 4:
        raise ValueError("trace caps are tabulated for k >= 4")
    C = binom
    caps = {0: 0}
    for i in range(1, k + 1):
        caps[i] = C(2 * k - 1, i - 1) - C(k - 1, i - 1) - C(k - 2, i - 2) - C(k - 3, i - 3)
    caps[k] += 3
    return caps


def window_size(k: int) -> int:
    return 9 if k == 4 else 2 * k


def build_window(n: int, k: int, frozen) -> tuple[int, ...]:
    """X together with the smallest elements outside X, up to 9 elements for k = 4 and 2k otherwise."""
    X = sorted(set(frozen))
    size = window_size(k)
    if len(X) > size or size > n:
        raise ValueError(f"cannot build a {size}-element window from X={X} in [{n}]")
    extra = [v for v in range(1, n + 1) if v not in X][: size - len(X)]
    return tuple(sorted(X + extra))


@dataclass
class TraceProfile:
    n: int
    k: int
    window: tuple[int, ...]
    traces: dict[int, set[int]] = field(default_factory=dict)

    def counts(self) -> dict[int, int]:
        return {i: len(self.traces.get(i, ())) for i in range(self.k + 1)}

    def observed_bound(self) -> int:
        """Sum over i of |A_i| * C(n - |Y|, k - i): the largest family with exactly these traces."""
        r = self.n - len(self.window)
        return sum(len(self.traces.get(i, ())) * binom(r, self.k - i) for i in range(self.k + 1))

    def to_dict(self) -> dict:
        return {
            "window": list(self.window),
            "counts": self.counts(),
            "traces": {i: sorted(list(elements(t)) for t in ts) for i, ts in self.traces.items()},
            "observed_bound": self.observed_bound(),
        }


def trace(family: Family, window) -> TraceProfile:
    Y = to_mask(window)
    prof = TraceProfile(family.n, family.k, tuple(sorted(window)), {i: set() for i in range(family.k + 1)})
    for m in family:
        t = m & Y
        prof.traces[popcount(t)].add(t)
    return prof


def check_lemma_2_2(family: Family, window) -> list[str]:
    """Failures of: no member meets the window in at most one element, and members pairwise meet inside it."""
    Y = to_mask(window)
    out = []
    ts = [m & Y for m in family]
    if any(popcount(t) == 0 for t in ts):
        out.append("a member misses the window")
    if any(popcount(t) == 1 for t in ts):
        out.append("a member meets the window in one element")
    uniq = sorted(set(ts))
    for i, a in enumerate(uniq):
        for b in uniq[i:]:
            if not a & b:
                out.append(f"traces {sorted(elements(a))} and {sorted(elements(b))} are disjoint")
                return out
    return out


def check_lemma_2_3(profile: TraceProfile) -> list[str]:
    caps = trace_caps(profile.k)
    out = []
    for i, c in profile.counts().items():
        if c > caps[i]:
            out.append(f"|A_{i}| = {c} exceeds {caps[i]}")
    return out


def bound_from_traces(profile_or_nk, k: int | None = None) -> int:
    """Sum over i of cap_i * C(n - |Y|, k - i).

    Accepts a :class:`TraceProfile` or ``(n, k)`` as two integers.
    """
    if isinstance(profile_or_nk, TraceProfile):
        n, k = profile_or_nk.n, profile_or_nk.k
        w = len(profile_or_nk.window)
    else:
        n = profile_or_nk
        w = window_size(k)
    caps = trace_caps(k)
    return sum(caps[i] * binom(n - w, k - i) for i in range(k + 1))


def star_of_pairs(profile: TraceProfile) -> int | None:
    """Common element of the 2-element traces if they form a star, else None."""
    pairs = list(profile.traces.get(2, ()))
    if not pairs:
        return None
    common = pairs[0]
    for p in pairs:
        common &= p
    return elements(common)[0] if common else None
