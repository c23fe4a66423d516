"""Shifts, lexicographic stabilization, and the guarded stabilization with frozen elements.

``shift(F, x, y)`` for x < y replaces y by x in every member that contains y
but not x, unless the image is already a member.

The guarded procedure refuses any shift whose result falls into one of the
excluded structures and instead freezes a small set X of elements, then keeps
shifting pairs outside X.  Which elements are frozen depends on the structure
the refused shift would have produced (the "case"):

1. the shift is a full star,            3. contained in a J(2),
2. contained in a Hilton-Milner family, 4. contained in a G(2), 5. in a G(3).

Cases 4 and 5 are only checked for k = 4.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from . import classification as cl
from .core import (
    Family,
    bit,
    degrees,
    describe,
    elements,
    is_intersecting,
    popcount,
    to_mask,
)


def shift(family: Family, x: int, y: int) -> Family:
    if not x < y:
        raise ValueError(f"shift needs x < y, got x={x}, y={y}")
    xb, yb = bit(x), bit(y)
    index = family.index
    out = []
    for m in family:
        if m & yb and not m & xb:
            img = (m & ~yb) | xb
            out.append(m if img in index else img)
        else:
            out.append(m)
    return family.with_masks(out)


def moved(family: Family, x: int, y: int) -> list[int]:
    """Members that ``shift(family, x, y)`` actually changes."""
    xb, yb = bit(x), bit(y)
    index = family.index
    return [m for m in family if m & yb and not m & xb and ((m & ~yb) | xb) not in index]


def is_stable(family: Family, frozen=()) -> bool:
    return first_effective_pair(family, frozen) is None


def first_effective_pair(family: Family, frozen=()) -> tuple[int, int] | None:
    frozen = set(frozen)
    free = [v for v in range(1, family.n + 1) if v not in frozen]
    for x, y in combinations(free, 2):
        if moved(family, x, y):
            return x, y
    return None


def potential(family: Family) -> int:
    return sum(sum(elements(m)) for m in family)


@dataclass
class CaseEvent:
    case: int
    x: int
    y: int
    frozen: tuple[int, ...]
    note: str = ""


@dataclass
class ShiftLog:
    steps: list[tuple[int, int, int]] = field(default_factory=list)
    case_events: list[CaseEvent] = field(default_factory=list)
    sweeps: int = 0
    revisions: int = 0

    def lines(self) -> list[str]:
        out = [f"SHIFT {x} {y} changed={c}" for x, y, c in self.steps]
        for e in self.case_events:
            out.append(f"CASE {e.case} {e.x} {e.y} X={{{','.join(map(str, e.frozen))}}}")
        return out

    def replay(self, initial: Family) -> Family:
        fam = initial
        for x, y, _ in self.steps:
            fam = shift(fam, x, y)
        return fam


@dataclass(frozen=True)
class FrozenSet:
    elements: tuple[int, ...]
    origin_case: int | None

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def mask(self) -> int:
        return to_mask(self.elements)


def stabilize(family: Family, frozen=()) -> tuple[Family, ShiftLog]:
    """Shift until no pair outside ``frozen`` changes anything.

    Pairs are tried in lexicographic order and the sweep restarts from the
    smallest pair after every effective shift.  The element sum strictly drops
    with each effective shift, which bounds the number of steps.
    """
    log = ShiftLog()
    fam = family
    frozen = set(frozen)
    free = [v for v in range(1, family.n + 1) if v not in frozen]
    pairs = list(combinations(free, 2))
    while True:
        log.sweeps += 1
        for x, y in pairs:
            mv = moved(fam, x, y)
            if mv:
                before = potential(fam)
                fam = shift(fam, x, y)
                assert potential(fam) == before - len(mv) * (y - x)
                log.steps.append((x, y, len(mv)))
                break
        else:
            return fam, log


# hypotheses and case detection


def hypothesis_failures(family: Family, floor: int = 3) -> list[str]:
    """Which of the stability hypotheses the family violates (empty list when all hold)."""
    out = []
    if not is_intersecting(family):
        return ["not intersecting"]
    k = family.k
    if cl.ekr_centers(family):
        out.append("EKR")
    n = family.n
    if any(cl.hm_witness(family, x) is not None for x in range(1, n + 1)):
        out.append("HM")
    if any(cl.j2_witness(family, x) is not None for x in range(1, n + 1)):
        out.append("J2")
    if k == 4:
        if cl.g2_cores(family):
            out.append("G2")
        if cl.g3_witnesses(family):
            out.append("G3")
    deg = degrees(family)
    mmd = len(family) - max(deg[1:])
    if mmd < floor:
        out.append(f"missing degree {mmd} < {floor}")
    return out


@dataclass
class ShiftCase:
    case: int
    x: int
    y: int
    center_ok: bool
    witness: tuple = ()


def _case_of(shifted: Family, x: int, y: int) -> ShiftCase | None:
    """Case number for the already shifted family, with witnesses centered as the refusal rules need."""
    k = shifted.k
    n = shifted.n
    centers = cl.ekr_centers(shifted)
    if centers:
        return ShiftCase(1, x, y, x in centers, (x,))
    hm_centers = [c for c in range(1, n + 1) if cl.hm_witness(shifted, c) is not None]
    if hm_centers:
        E = cl.hm_witness(shifted, x)
        return ShiftCase(2, x, y, E is not None, (x, E) if E is not None else (hm_centers[0],))
    j2 = cl.j2_witness(shifted, x)
    if j2 is not None:
        return ShiftCase(3, x, y, True, (x, *j2))
    if any(cl.j2_witness(shifted, c) is not None for c in range(1, n + 1)):
        return ShiftCase(3, x, y, False)
    if k == 4:
        cores = cl.g2_cores(shifted)
        if cores:
            good = [A for A in cores if A & bit(x) and not A & bit(y)]
            return ShiftCase(4, x, y, bool(good), (good[0],) if good else (cores[0],))
        g3 = cl.g3_witnesses(shifted)
        if g3:
            good = [(c, E) for c, E in g3 if c == x] + [(c, E) for c, E in g3 if E & bit(x)]
            return ShiftCase(5, x, y, bool(good), good[0] if good else g3[0])
    return None


def detect_case(family: Family, x: int, y: int) -> int | None:
    """Case number of ``shift(family, x, y)``, or None when the shift keeps every hypothesis."""
    if not x < y:
        raise ValueError("detect_case needs x < y")
    c = _case_of(shift(family, x, y), x, y)
    return None if c is None else c.case


class GuardedShiftError(AssertionError):
    def __init__(self, message: str, log: ShiftLog | None = None):
        super().__init__(message)
        self.log = log


@dataclass
class _Guarantee:
    kind: str
    data: tuple


def _freeze_for(fam: Family, sc: ShiftCase, log: ShiftLog) -> tuple[set[int], list[_Guarantee], str]:
    """Frozen set and post-conditions for a first refused shift."""
    x, y, k = sc.x, sc.y, fam.k
    if not sc.center_ok:
        raise GuardedShiftError(f"case {sc.case} at ({x},{y}) is not centered at {x}", log)
    shifted = shift(fam, x, y)
    meets = _Guarantee("meets", ())
    if sc.case == 1:
        return {x, y}, [meets], "partial" if k == 4 else "done"
    if sc.case == 2:
        E = sc.witness[1]
        zs = [v for v in elements(E) if v != y]
        if k >= 5:
            return {x, y, zs[0]}, [meets], "done"
        z3 = to_mask(zs[:3])
        return {x, y, *zs[:3]}, [meets, _Guarantee("case2", (z3,))], "done"
    if sc.case == 3:
        _, E, J = sc.witness
        kernel = [v for v in elements(E) if v != y]
        if k >= 5:
            return {x, y, kernel[0]}, [meets], "done"
        if y in elements(E):
            X = {x, y, *kernel, elements(J)[0]}
        else:
            X = {x, y, *elements(E)}
        return X, [meets, _Guarantee("case3", ())], "done"
    if sc.case == 4:
        A = sc.witness[0]
        others = [v for v in elements(A) if v != x]
        for x1, x2 in (others, others[::-1]):
            base = bit(x) | bit(y) | bit(x1)
            for m in fam:
                if m & base == base and not m & bit(x2):
                    x3 = elements(m & ~base)[0]
                    return {x, y, x1, x2, x3}, [meets, _Guarantee("member", (m,))], "done"
        raise GuardedShiftError(f"case 4 at ({x},{y}): no member {{x,y,x1,x3}} to freeze", log)
    if sc.case == 5:
        c, E = sc.witness
        B = set(elements(E)) | {c}
        X = B | {x, y}
        if c == x and E & bit(y):
            rest = [v for v in elements(E) if v != y]
            base = E
            x3 = None
            for m in shifted:
                if m & base == base and not m & bit(x):
                    x3 = elements(m & ~base)[0]
                    break
            if x3 is None:
                raise GuardedShiftError(f"case 5a at ({x},{y}): no member {{y,x1,x2,x3}}", log)
            X = {x, y, *rest, x3}
        if len(X) != 5:
            raise GuardedShiftError(f"case 5 at ({x},{y}) froze {sorted(X)}", log)
        return X, [meets, _Guarantee("two", ())], "done"
    raise AssertionError(sc.case)


def _outside_template_members(fam: Family, sc: ShiftCase, x0: int, y0: int) -> list[int]:
    """Members moved by the refused shift that leave the template, each meeting {x0, y0} once."""
    x, y = sc.x, sc.y
    if sc.case == 4:
        A = sc.witness[0]
        inside = lambda m: popcount(m & A) >= 2  # noqa: E731
    else:
        c, E = sc.witness
        inside = lambda m: m & E == E or bool(m & bit(c) and m & E)  # noqa: E731
    pair = bit(x0) | bit(y0)
    cands = [m for m in moved(fam, x, y) if not inside(m) and popcount(m & pair) == 1]
    with_y = sorted((m for m in cands if m & bit(y0)), key=elements)
    with_x = sorted((m for m in cands if m & bit(x0)), key=elements)
    return with_y + with_x


def guarded_stabilize(family: Family, floor: int = 3, max_events: int = 3):
    """Stabilize while keeping the family out of the excluded structures.

    Returns ``(stable family, FrozenSet, ShiftLog)``.  Raises
    :class:`GuardedShiftError` when the input violates the hypotheses or any
    post-condition of the freezing rules fails.
    """
    bad = hypothesis_failures(family, floor)
    if bad:
        raise GuardedShiftError(f"input violates hypotheses: {', '.join(bad)}")
    n = family.n
    log = ShiftLog()
    fam = family
    X: set[int] = set()
    origin: int | None = None
    guarantees: list[_Guarantee] = []
    state = "open"  # open, partial, done
    chain: dict = {}

    while True:
        log.sweeps += 1
        free = [v for v in range(1, n + 1) if v not in X]
        progressed = False
        for x, y in combinations(free, 2):
            mv = moved(fam, x, y)
            if not mv:
                continue
            shifted = shift(fam, x, y)
            sc = _case_of(shifted, x, y)
            if sc is None:
                fam = shifted
                log.steps.append((x, y, len(mv)))
                progressed = True
                break
            if len(log.case_events) >= max_events:
                raise GuardedShiftError(f"more than {max_events} case events", log)
            if state == "open":
                X, guarantees, state = _freeze_for(fam, sc, log)
                origin = sc.case
                if state == "partial":
                    chain = {"x": x, "y": y}
                note = ""
            elif state == "partial" and sc.case in (4, 5):
                if not sc.center_ok:
                    raise GuardedShiftError(f"case {sc.case} at ({x},{y}) not localized", log)
                cands = _outside_template_members(fam, sc, chain["x"], chain["y"])
                if not cands:
                    raise GuardedShiftError(f"case {sc.case} at ({x},{y}): no member to freeze", log)
                chain.update(snapshot=fam, steps=len(log.steps), alternatives=cands[1:], used=cands[0])
                X = {chain["x"], chain["y"]} | set(elements(cands[0]))
                guarantees = [_Guarantee("meets", ()), _Guarantee("member", (cands[0],))]
                state = "done-chain"
                note = f"member {describe(cands[0])}"
            elif state == "done-chain" and sc.case == 5 and log.revisions == 0:
                alts = [m for m in chain["alternatives"] if bool(m & bit(chain["x"])) != bool(chain["used"] & bit(chain["x"]))]
                if not alts:
                    raise GuardedShiftError(f"case 5 at ({x},{y}) after freezing and no alternative member", log)
                fam = chain["snapshot"]
                del log.steps[chain["steps"]:]
                X = {chain["x"], chain["y"]} | set(elements(alts[0]))
                guarantees = [_Guarantee("meets", ()), _Guarantee("member", (alts[0],))]
                log.revisions += 1
                note = f"revised to member {describe(alts[0])}"
            else:
                raise GuardedShiftError(f"case {sc.case} at ({x},{y}) after freezing {sorted(X)}", log)
            log.case_events.append(CaseEvent(sc.case, x, y, tuple(sorted(X)), note))
            progressed = True
            break
        if not progressed:
            break

    frozen = FrozenSet(tuple(sorted(X)), origin)
    _check_post(fam, frozen, guarantees, floor, log)
    return fam, frozen, log


def _check_post(fam: Family, frozen: FrozenSet, guarantees, floor: int, log: ShiftLog) -> None:
    bad = hypothesis_failures(fam, floor)
    if bad:
        raise GuardedShiftError(f"stable family violates hypotheses: {', '.join(bad)}", log)
    if not is_stable(fam, frozen.elements):
        raise GuardedShiftError("family is not stable outside the frozen set", log)
    if len(frozen) > 5:
        raise GuardedShiftError(f"frozen set {frozen.elements} has more than 5 elements", log)
    if not frozen.elements:
        return
    Xm = frozen.mask
    ev = log.case_events[0]
    x, y = ev.x, ev.y
    for g in guarantees:
        if g.kind == "meets" and any(not m & Xm for m in fam):
            raise GuardedShiftError("a member misses the frozen set", log)
        if g.kind == "member" and g.data[0] not in fam:
            raise GuardedShiftError(f"member {describe(g.data[0])} was lost", log)
        if g.kind == "two" and any(popcount(m & Xm) < 2 for m in fam):
            raise GuardedShiftError("a member meets the frozen set once", log)
        if g.kind == "case2":
            z3 = g.data[0]
            away = [m for m in fam if not m & (bit(x) | bit(y))]
            if len(away) > 1 or any(m & z3 != z3 for m in away):
                raise GuardedShiftError("case 2 structure lost", log)
            if not any(m & z3 == z3 and not m & bit(x) for m in fam):
                raise GuardedShiftError("case 2 member lost", log)
        if g.kind == "case3":
            if all(popcount(m & Xm) >= 2 for m in fam):
                continue
            only_x = [m for m in fam if m & Xm == bit(x)]
            only_y = [m for m in fam if m & Xm == bit(y)]
            if any(popcount(a & b) < 2 for a in only_x for b in only_y):
                raise GuardedShiftError("case 3 pair condition fails", log)
