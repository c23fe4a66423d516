"""Exact maximum intersecting families under a missing-degree floor and structural exclusions.

Method
------
Feasibility here is upward closed: adding members to an intersecting family
never creates a common element, never makes it fit inside a template, and
never lowers a missing degree.  So an optimal family F is maximal
intersecting.  Relabel so that 1 has the largest degree and let B be the
members avoiding 1.  Maximality forces the members through 1 to be exactly
``{1} + T`` for every (k-1)-subset T of {2..n} meeting all of B, hence

    |F| = |B| + t(B),   t(B) = number of such transversals,

and the smallest missing degree of F is |B|.  The search enumerates B.
Symmetry is broken by fixing the two members of B with the smallest
intersection j to canonical positions; every other member of B then meets
each member of B in at least j elements.

Bounds at a node with current B and remaining candidates R:

* adding A from R loses the transversals disjoint from some member of A, so
  the gain is at most max_A(|A| - |N(A)|) = |R| - (maximum matching between R
  and the surviving transversals), by Hall's theorem;
* 1 has the largest degree, so |F| <= n * t(B) / k.

Exclusions are checked lazily on every candidate family that could matter.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from itertools import combinations

from . import classification as cl
from .core import Family, Params, binom, bit, degrees, elements, is_intersecting, popcount, to_mask

EXCLUSIONS = ("EKR", "HM", "J2", "G2", "G3")
PRESETS = ("EKR", "HM", "HK", "Main", "Stability")
UNIVERSE_LIMIT = 1000
ORACLE_LIMIT = 40
MAX_WITNESS_CLASSES = 10


@dataclass(frozen=True)
class SearchProblem:
    n: int
    k: int
    floor: int = 0
    exclusions: frozenset = frozenset()

    def __post_init__(self):
        Params(self.n, self.k)
        if self.k < 2:
            raise ValueError("k must be at least 2")
        bad = set(self.exclusions) - set(EXCLUSIONS)
        if bad:
            raise ValueError(f"unknown exclusions {sorted(bad)}")
        if self.floor < 0:
            raise ValueError("floor must be non-negative")
        if binom(self.n, self.k) > UNIVERSE_LIMIT:
            raise ValueError(f"C({self.n},{self.k}) exceeds {UNIVERSE_LIMIT}")


def preset(name: str, n: int, k: int) -> SearchProblem:
    """Constraint sets for the classical bounds.

    EKR: nothing.  HM: not a star.  HK: not a star and not inside a
    Hilton-Milner family (plus not inside G(2) when k = 3).  Main: not inside
    any of star, HM, J(2), and for k = 4 also G(2) and G(3).  Stability:
    Main together with every element missed by at least 3 members.
    """
    if name == "EKR":
        return SearchProblem(n, k, 0, frozenset())
    if name == "HM":
        return SearchProblem(n, k, 1, frozenset({"EKR"}))
    if name == "HK":
        ex = {"EKR", "HM"} | ({"G2"} if k == 3 else set())
        return SearchProblem(n, k, 1, frozenset(ex))
    main = {"EKR", "HM", "J2"} | ({"G2", "G3"} if k == 4 else set())
    if name == "Main":
        return SearchProblem(n, k, 2, frozenset(main))
    if name == "Stability":
        return SearchProblem(n, k, 3, frozenset(main))
    raise ValueError(f"unknown preset {name!r}; choose from {PRESETS}")


def violated_exclusions(family: Family, exclusions) -> list[str]:
    out = []
    n = family.n
    if "EKR" in exclusions and cl.ekr_centers(family):
        out.append("EKR")
    if "HM" in exclusions and any(cl.hm_witness(family, x) is not None for x in range(1, n + 1)):
        out.append("HM")
    if "J2" in exclusions and any(cl.j2_witness(family, x) is not None for x in range(1, n + 1)):
        out.append("J2")
    if "G2" in exclusions and cl.g2_cores(family):
        out.append("G2")
    if "G3" in exclusions and cl.g3_witnesses(family):
        out.append("G3")
    return out


def feasible(family: Family, problem: SearchProblem) -> bool:
    if not is_intersecting(family):
        return False
    if problem.floor and (not len(family) or min_missing(family) < problem.floor):
        return False
    return not violated_exclusions(family, problem.exclusions)


@dataclass
class SearchResult:
    problem: SearchProblem
    optimum: int | None
    witnesses: list[Family]
    status: str  # proved_optimal or budget_exhausted
    nodes: int
    seconds: float
    more_classes: bool = False
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n": self.problem.n,
            "k": self.problem.k,
            "floor": self.problem.floor,
            "exclusions": sorted(self.problem.exclusions),
            "optimum": self.optimum,
            "status": self.status,
            "nodes": self.nodes,
            "seconds": round(self.seconds, 3),
            "witness_classes": len(self.witnesses),
            "more_classes": self.more_classes,
            "stats": self.stats,
        }


class _Budget(Exception):
    pass


class _WitnessPool:
    def __init__(self):
        self.best: int | None = None
        self.classes: list[Family] = []
        self.more = False

    def offer(self, fam: Family) -> None:
        v = len(fam)
        if self.best is None or v > self.best:
            self.best, self.classes, self.more = v, [fam], False
            return
        if v < self.best:
            return
        if any(cl.find_isomorphism(fam, c) is not None for c in self.classes):
            return
        if len(self.classes) < MAX_WITNESS_CLASSES:
            self.classes.append(fam)
        else:
            self.more = True


def _max_matching(adj: list[int], stop: int | None = None) -> tuple[int, int]:
    """Maximum bipartite matching; adj[u] is a bitmask of right-side neighbours.

    Returns (size, mask of matched left nodes).  With ``stop`` the search ends
    as soon as the matching reaches that size, and the mask is then unreliable.
    """
    owner: dict[int, int] = {}
    taken = 0
    unmatched = []
    for u, a in enumerate(adj):
        free = a & ~taken
        if free:
            low = free & -free
            taken |= low
            owner[low] = u
        else:
            unmatched.append(u)
    size = len(adj) - len(unmatched)
    if stop is not None and size >= stop:
        return size, 0
    matched_left = (1 << len(adj)) - 1

    state = [0, taken]  # right nodes seen by the current search, right nodes matched

    def augment(u: int) -> bool:
        a = adj[u] & ~state[0]
        free = a & ~state[1]
        if free:
            low = free & -free
            state[1] |= low
            owner[low] = u
            return True
        state[0] |= a
        while a:
            low = a & -a
            a ^= low
            if augment(owner[low]):
                owner[low] = u
                return True
        return False

    # right nodes reached by a failed search stay dead until the matching changes
    for u in unmatched:
        if adj[u] and augment(u):
            size += 1
            state[0] = 0
            if stop is not None and size >= stop:
                return size, 0
        else:
            matched_left &= ~(1 << u)
    return size, matched_left


def _is_shifted(fam: Family) -> bool:
    from .shifting import is_stable

    return is_stable(fam)


def _bits(x: int) -> list[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


class _Engine:
    def __init__(self, problem: SearchProblem, budget: int | None, collect: bool, shifted_only: bool = False,
                 deadline: float | None = None):
        self.p = problem
        self.deadline = deadline
        self.shifted_only = shifted_only
        n, k = problem.n, problem.k
        self.n, self.k = n, k
        self.budget = budget
        self.collect = collect
        self.nodes = 0
        self.pool = _WitnessPool()
        self.evaluated = 0
        # members of B are k-subsets of {2..n}; transversals are (k-1)-subsets of {2..n}
        self.cands = [to_mask(c) for c in combinations(range(2, n + 1), k)]
        self.trans = [to_mask(c) for c in combinations(range(2, n + 1), k - 1)]
        self.disj = [sum(1 << t for t, T in enumerate(self.trans) if not T & S) for S in self.cands]
        self.all_t = (1 << len(self.trans)) - 1
        self.avoid = [0] * (n + 1)
        for u in range(2, n + 1):
            self.avoid[u] = sum(1 << t for t, T in enumerate(self.trans) if not T & bit(u))
        self.elems = [[u for u in elements(S)] for S in self.cands]
        self.cdisj = [sum(1 << i for i, T in enumerate(self.cands) if not T & S) for S in self.cands]

    def family_of(self, B: list[int], tmask: int) -> Family:
        members = [self.cands[i] for i in B] + [self.trans[t] | 1 for t in _bits(tmask)]
        return Family.from_masks(self.n, self.k, members)

    def slack(self, deg: list[int], tmask: int) -> list[int]:
        """Transversals avoiding u minus deg_B(u); negative means 1 cannot have the largest degree."""
        avoid = self.avoid
        return [0, 0] + [(tmask & avoid[u]).bit_count() - deg[u] for u in range(2, self.n + 1)]

    def consider(self, B: list[int], tmask: int) -> None:
        value = len(B) + popcount(tmask)
        best = self.pool.best
        if best is not None and (value < best or (value == best and not self.collect)):
            return
        if len(B) < self.p.floor:
            return
        fam = self.family_of(B, tmask)
        self.evaluated += 1
        if self.shifted_only and not _is_shifted(fam):
            return
        if violated_exclusions(fam, self.p.exclusions):
            return
        self.pool.offer(fam)

    def tick(self) -> None:
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise _Budget
        if self.deadline is not None and not self.nodes & 1023 and time.monotonic() > self.deadline:
            raise _Budget

    def beaten(self, bound: int) -> bool:
        best = self.pool.best
        if best is None:
            return False
        return bound < best or (bound == best and not self.collect)

    def hopeless(self, B: list[int], tmask: int, R: list[int]) -> bool:
        t = tmask.bit_count()
        if len(B) + len(R) < self.p.floor:
            return True
        if self.beaten((self.n * t) // self.k):
            return True
        base = len(B) + t + len(R)
        if self.beaten(base):
            return True
        # a matching of size `need` already proves the node cannot reach the incumbent
        need = None
        if self.pool.best is not None:
            need = base - self.pool.best + (1 if self.collect else 0)
        adj = [self.disj[i] & tmask for i in R]
        size, matched = _max_matching(adj, need)
        if need is not None and size >= need:
            return True
        # pair up unmatched candidates that are disjoint from each other
        loose = [R[u] for u in range(len(R)) if not matched >> u & 1]
        used = set()
        extra = 0
        for a in range(len(loose)):
            if a in used:
                continue
            Sa = self.cands[loose[a]]
            for b in range(a + 1, len(loose)):
                if b not in used and not Sa & self.cands[loose[b]]:
                    used.update((a, b))
                    extra += 1
                    break
        return self.beaten(base - size - extra)

    def seed(self) -> None:
        """Families with |B| <= 1: the full star and, up to symmetry, the single Hilton-Milner shape."""
        self.tick()
        self.consider([], self.all_t)
        i0 = self.cands.index(self.S0)
        self.tick()
        self.consider([i0], self.all_t & ~self.disj[i0])

    @property
    def S0(self) -> int:
        return to_mask(range(2, self.k + 2))

    def branches(self) -> list[int]:
        """Possible smallest pairwise intersections of B, largest first."""
        k = self.k
        out = []
        for j in range(k - 1, 0, -1):
            S1 = to_mask(list(range(2, j + 2)) + list(range(k + 2, 2 * k + 2 - j)))
            if not S1 >> self.n:
                out.append(j)
        return out

    def run_branch(self, j: int) -> None:
        k = self.k
        S0 = self.S0
        S1 = to_mask(list(range(2, j + 2)) + list(range(k + 2, 2 * k + 2 - j)))
        i0, i1 = self.cands.index(S0), self.cands.index(S1)
        deg = [0] * (self.n + 1)
        for u in self.elems[i0] + self.elems[i1]:
            deg[u] += 1
        tmask = self.all_t & ~self.disj[i0] & ~self.disj[i1]
        R, X = [], []
        for i, S in enumerate(self.cands):
            if i in (i0, i1) or not (S & S0 and S & S1):
                continue
            (R if popcount(S & S0) >= j and popcount(S & S1) >= j else X).append(i)
        self.dfs([i0, i1], deg, tmask, R, j, X)

    def run(self) -> None:
        self.seed()
        for j in self.branches():
            self.run_branch(j)

    def unblockable(self, X: list[int], tmask: int, rmask: int) -> bool:
        """Some set outside B can neither be hit by a surviving transversal nor by a later member of B."""
        disj, cdisj = self.disj, self.cdisj
        return any(not disj[x] & tmask and not cdisj[x] & rmask for x in X)

    def dfs(self, B: list[int], deg: list[int], tmask: int, R: list[int], j: int, X: list[int]) -> None:
        # X: sets avoiding 1 that meet all of B but may no longer join it; a maximal
        # completion must block each of them
        self.tick()
        sl = self.slack(deg, tmask)
        if min(sl[2:]) < 0:
            return
        tight = [u for u in range(2, self.n + 1) if sl[u] == 0]
        if tight:
            tm = sum(bit(u) for u in tight)
            X = X + [i for i in R if self.cands[i] & tm]
            R = [i for i in R if not self.cands[i] & tm]
        rmask = sum(1 << i for i in R)
        if self.unblockable(X, tmask, rmask):
            return
        if all(self.disj[i] & tmask for i in R) and all(self.disj[x] & tmask for x in X):
            self.consider(B, tmask)
        X = list(X)
        while R:
            if self.hopeless(B, tmask, R):
                return
            i = R[0]
            S = self.cands[i]
            R = R[1:]
            rmask &= ~(1 << i)
            for u in self.elems[i]:
                deg[u] += 1
            cands = self.cands
            child_R, child_X = [], [x for x in X if cands[x] & S]
            for r in R:
                c = (cands[r] & S).bit_count()
                if c >= j:
                    child_R.append(r)
                elif c:
                    child_X.append(r)
            self.dfs(B + [i], deg, tmask & ~self.disj[i], child_R, j, child_X)
            for u in self.elems[i]:
                deg[u] -= 1
            self.tick()
            X.append(i)
            if self.unblockable(X, tmask, rmask):
                return


def _branch_job(args):
    problem, j, best, budget, collect, shifted_only, deadline = args
    eng = _Engine(problem, budget, collect, shifted_only, deadline)
    eng.pool.best = best
    status = "proved_optimal"
    try:
        eng.run_branch(j)
    except _Budget:
        status = "budget_exhausted"
    fams = [f.masks for f in eng.pool.classes]
    return eng.pool.best, fams, eng.pool.more, eng.nodes, eng.evaluated, status


def default_workers() -> int:
    return max(1, int(os.environ.get("INTFAM_WORKERS", "1")))


def solve(
    problem: SearchProblem,
    all_witnesses: bool = True,
    budget: int | None = None,
    workers: int | None = None,
    shifted_only: bool = False,
    seconds: float | None = None,
    warm_start=(),
) -> SearchResult:
    """Exact optimum and up to ten non-isomorphic optimal families.

    ``budget`` caps the number of search nodes (per worker) and ``seconds``
    the wall time; when either runs out the status is ``budget_exhausted``
    and the optimum is only a lower bound.
    ``workers`` > 1 spreads the top-level branches over processes.
    ``shifted_only`` keeps only families fixed by every shift, which is a
    valid reduction for the plain intersecting problem but not once
    exclusions are involved; it is off by default.
    ``warm_start`` families that are feasible seed the incumbent; they only
    tighten pruning, since optimal classes are still collected by the search.
    """
    start = time.perf_counter()
    workers = default_workers() if workers is None else workers
    deadline = None if seconds is None else time.monotonic() + seconds
    eng = _Engine(problem, budget, all_witnesses, shifted_only, deadline)
    status = "proved_optimal"
    nodes = evaluated = 0
    pool = eng.pool
    for fam in warm_start:
        if (fam.n, fam.k) == (problem.n, problem.k) and feasible(fam, problem):
            pool.offer(fam)
    try:
        eng.seed()
        if workers <= 1:
            for j in eng.branches():
                eng.run_branch(j)
    except _Budget:
        status = "budget_exhausted"
    nodes, evaluated = eng.nodes, eng.evaluated
    if workers > 1 and status == "proved_optimal":
        from concurrent.futures import ProcessPoolExecutor

        jobs = [(problem, j, pool.best, budget, all_witnesses, shifted_only, deadline) for j in eng.branches()]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_branch_job, jobs))
        merged = _WitnessPool()
        for fam in pool.classes:
            merged.offer(fam)
        top = max([b for b, *_ in results if b is not None] + ([pool.best] if pool.best is not None else []),
                  default=None)
        for best, fams, more, nd, ev, st in results:
            nodes += nd
            evaluated += ev
            if st != "proved_optimal":
                status = st
            if best is not None and best == top:
                merged.more |= more
                for masks in fams:
                    merged.offer(Family.from_masks(problem.n, problem.k, masks))
        pool = merged
    return SearchResult(
        problem,
        pool.best,
        list(pool.classes),
        status,
        nodes,
        time.perf_counter() - start,
        pool.more,
        {"evaluated": evaluated, "workers": workers},
    )


def expected_optimum(name: str, n: int, k: int) -> int | None:
    """Value predicted by the classical theorems for a preset, when one applies (n >= 2k+1)."""
    from .constructions import Bound, formula_value

    if n < 2 * k + 1:
        return None
    p = Params(n, k)
    if name == "EKR":
        return formula_value(Bound.EKR_max, p)
    if name == "HM":
        return formula_value(Bound.HM_bound, p)
    if name == "HK" and k >= 3:
        return formula_value(Bound.HK_bound, p)
    if name == "Main" and k >= 4:
        return formula_value(Bound.Main_i if n <= 3 * k - 3 else Bound.Main_ii, p)
    if name == "Stability" and k >= 4:
        return formula_value(Bound.Main_ii, p)
    return None


def verify_theorem(name: str, n: int, k: int, budget: int | None = None, workers: int | None = None,
                   seconds: float | None = None) -> dict:
    """Run a preset and compare with the predicted optimum."""
    res = solve(preset(name, n, k), budget=budget, workers=workers, seconds=seconds)
    exp = expected_optimum(name, n, k)
    return {
        "preset": name,
        "result": res,
        "expected": exp,
        "matches": res.status == "proved_optimal" and (exp is None or res.optimum == exp),
    }


def write_result(result: SearchResult, out_dir) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "result.json"), "w") as fh:
        json.dump(result.to_dict(), fh, indent=2)
        fh.write("\n")
    for i, fam in enumerate(result.witnesses):
        with open(os.path.join(out_dir, f"witness_{i}.json"), "w") as fh:
            json.dump(fam.to_json(), fh)
            fh.write("\n")


def brute_oracle(problem: SearchProblem) -> SearchResult:
    """Plain depth-first enumeration of every intersecting family; only for C(n, k) <= 40.

    Candidates are pruned only by pairwise intersection; the floor and the
    exclusions are checked on finished families of at least the best size.
    """
    n, k = problem.n, problem.k
    if binom(n, k) > ORACLE_LIMIT:
        raise ValueError(f"oracle needs C(n,k) <= {ORACLE_LIMIT}, got C({n},{k}) = {binom(n, k)}")
    start = time.perf_counter()
    universe = [to_mask(c) for c in combinations(range(1, n + 1), k)]
    m = len(universe)
    meets = [sum(1 << b for b in range(m) if universe[a] & universe[b]) for a in range(m)]
    pool = _WitnessPool()
    nodes = 0

    def ok(chosen: list[int]) -> bool:
        fam = Family.from_masks(n, k, [universe[i] for i in chosen])
        if problem.floor and (not chosen or min_missing(fam) < problem.floor):
            return False
        return not violated_exclusions(fam, problem.exclusions)

    def rec(chosen: list[int], cand: int) -> None:
        nonlocal nodes
        nodes += 1
        if pool.best is None or len(chosen) >= pool.best:
            if ok(chosen):
                pool.offer(Family.from_masks(n, k, [universe[i] for i in chosen]))
        while cand:
            low = cand & -cand
            i = low.bit_length() - 1
            cand ^= low
            rec(chosen + [i], cand & meets[i])

    rec([], (1 << m) - 1)
    return SearchResult(problem, pool.best, list(pool.classes), "proved_optimal", nodes,
                        time.perf_counter() - start, pool.more)


def min_missing(family: Family) -> int:
    return len(family) - max(degrees(family)[1:])
