"""Reproduction driver behind ``intfam verify-all``.

Each check returns a :class:`Check` row; :func:`verify_all` runs them in
order, writes the TSV report and a JSON manifest next to it, and returns True
only when every row passes.  The same check functions back the acceptance
tests.
"""

from __future__ import annotations

import hashlib
import json
import random
import sys
import time
from dataclasses import dataclass, field

from . import __version__
from . import classification as cl
from . import constructions as cs
from . import search, separability, shifting, traces
from .constructions import Bound, TemplateDescriptor, build, formula_value
from .core import Family, Params, binom, elements, is_intersecting, random_intersecting, random_permutation, relabel

GRIDS = ("default", "quick", "formulas")


@dataclass
class Check:
    item: str
    expected: str
    observed: str
    ok: bool
    seconds: float = 0.0
    details: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "PASS" if self.ok else "FAIL"

    def row(self) -> str:
        return "\t".join([self.item, self.expected, self.observed, self.verdict, f"{self.seconds:.2f}"])


def _rng(seed: int, tag: str) -> random.Random:
    return random.Random(f"{seed}:{tag}")


def _classes(fams: list[Family], names: dict[str, Family]) -> list[str]:
    """Name each family by the first template it is isomorphic to, or '?'."""
    out = []
    for f in fams:
        out.append(next((nm for nm, t in names.items() if len(t) == len(f) and cl.are_isomorphic(f, t)), "?"))
    return out


# 1-4: closed forms


def check_formulas(ks=(3, 4, 5)) -> Check:
    bad = []
    count = 0
    for k in ks:
        for n in range(2 * k + 1, 3 * k + 3):
            p = Params(n, k)
            pairs = [("HM", build("HM", p), formula_value(Bound.HM_bound, p)),
                     ("J2", build("J", p, i=2), formula_value(Bound.Ji_size, p, 2)),
                     ("K2", build("K2", p), formula_value(Bound.Eq1_K2, p))]
            # J(2) meets the two-template bound of Hilton-Kleitman type
            pairs.append(("J2=HK", build("J", p, i=2), formula_value(Bound.HK_bound, p)))
            if k >= 4:
                pairs.append(("J3", build("J", p, i=3), formula_value(Bound.Eq2_J3, p)))
            for i in range(2, k + 1):
                pairs.append((f"G{i}", build("G", p, i=i), formula_value(Bound.Gi_size, p, i)))
            for name, fam, val in pairs:
                count += 1
                if len(fam) != val:
                    bad.append(f"{name}({n},{k}): built {len(fam)} formula {val}")
    return Check("1 formula/enumeration", f"{count} equalities", f"{count - len(bad)} equal", not bad, details=bad)


GOLDEN = [
    ("HM", 9, 4, None, 53),
    ("J", 9, 4, 2, 51),
    ("G", 9, 4, 2, 51),
    ("G", 9, 4, 3, 51),
    ("K2", 9, 4, None, 50),
    ("J", 9, 4, 3, 50),
    ("J", 10, 4, 3, 68),
    ("J", 11, 5, 3, 201),
    ("G", 11, 5, 4, 201),
]


def check_golden(golden=GOLDEN) -> Check:
    bad = []
    for kind, n, k, i, want in golden:
        got = len(build(kind, Params(n, k), i=i))
        if got != want:
            bad.append(f"{kind}{i or ''}({n},{k}) = {got}, expected {want}")
    p = Params(9, 4)
    for tag, want in ((Bound.HK_bound, 51), (Bound.Main_i, 50), (Bound.Eq2_J3, 50)):
        if formula_value(tag, p) != want:
            bad.append(f"{tag.value}(9,4) = {formula_value(tag, p)}, expected {want}")
    obs = "all match" if not bad else "; ".join(bad)
    return Check("2 golden values", "53/51/50/68/201", obs, not bad, details=bad)


def check_crossover(ks=range(4, 11)) -> Check:
    bad = []
    points = 0
    for k in ks:
        for row in cs.crossover_table(k, (2 * k + 1, 4 * k)):
            points += 1
            if not row.matches:
                bad.append(f"k={k} n={row.n}: {row.relation}, expected {row.expected}")
    return Check("3 K2 vs J3 crossover", f"{points} points match", f"{points - len(bad)} match", not bad, details=bad)


def check_trace_collapse(ks=range(4, 9)) -> Check:
    bad = []
    points = 0
    for k in ks:
        for n in range(2 * k + 1, 3 * k + 3):
            points += 1
            a = traces.bound_from_traces(n, k)
            b = formula_value(Bound.Main_ii, Params(n, k))
            if a != b:
                bad.append(f"({n},{k}): traces {a} vs closed form {b}")
    return Check("4 trace bound = J3 size", f"{points} identities", f"{points - len(bad)} hold", not bad, details=bad)


# 5-6: shifting


def check_shifting(trials: int = 1000, seed: int = 0) -> Check:
    rng = _rng(seed, "shifting")
    bad = []
    for t in range(trials):
        k = rng.randint(2, 5)
        n = rng.randint(k + 1, 12)
        size = rng.randint(1, binom(n - 1, k - 1))
        fam = random_intersecting(n, k, rng, size)
        x, y = sorted(rng.sample(range(1, n + 1), 2))
        s = shifting.shift(fam, x, y)
        if len(s) != len(fam) or not is_intersecting(s):
            bad.append(f"trial {t}: shift({x},{y}) broke size or intersection")
        out, log = shifting.stabilize(fam)
        drop = shifting.potential(fam) - shifting.potential(out)
        if len(log.steps) > drop or not shifting.is_stable(out) or len(out) != len(fam):
            bad.append(f"trial {t}: {len(log.steps)} shifts for potential drop {drop}")
        again, log2 = shifting.stabilize(out)
        if again != out or log2.steps:
            bad.append(f"trial {t}: stabilize not idempotent")
        if log.replay(fam) != out:
            bad.append(f"trial {t}: log replay differs")
    return Check("5 shifting properties", f"{trials} families clean", f"{trials - len(bad)} clean", not bad,
                 details=bad[:20])


def guarded_run(fam: Family, floor: int = 3) -> list[str]:
    """Failures of the guarded stabilization contract on one input (empty list on success)."""
    try:
        out, frozen, log = shifting.guarded_stabilize(fam, floor=floor)
    except shifting.GuardedShiftError as exc:
        return [str(exc)]
    bad = []
    if not shifting.is_stable(out, frozen.elements):
        bad.append("not stable")
    if shifting.hypothesis_failures(out, floor):
        bad.append("hypotheses lost")
    if len(frozen) > 5 or len(log.case_events) > 3:
        bad.append(f"|X|={len(frozen)} events={len(log.case_events)}")
    Y = traces.build_window(out.n, out.k, frozen.elements)
    bad += traces.check_lemma_2_2(out, Y)
    bad += traces.check_lemma_2_3(traces.trace(out, Y))
    return bad


def check_guarded(relabelings: int = 200, seed: int = 0, include_k2: bool = True) -> Check:
    rng = _rng(seed, "guarded")
    inputs = []
    k2_share = relabelings // 4 if include_k2 else 0
    for t in range(relabelings - k2_share):
        n = (9, 10, 11)[t % 3]
        inputs.append(("J3", build("J", Params(n, 4), i=3)))
    inputs += [("K2", build("K2", Params(9, 4)))] * k2_share
    fails: dict[str, int] = {"J3": 0, "K2": 0}
    totals: dict[str, int] = {"J3": 0, "K2": 0}
    details = []
    for name, base in inputs:
        fam = relabel(base, random_permutation(base.n, rng))
        totals[name] += 1
        bad = guarded_run(fam)
        if bad:
            fails[name] += 1
            if len(details) < 10:
                details.append(f"{name}({fam.n},4): {bad[0]}")
    obs = ", ".join(f"{nm} {totals[nm] - fails[nm]}/{totals[nm]}" for nm in totals if totals[nm])
    return Check("6 guarded stabilization", "every run clean", obs, not any(fails.values()), details=details)


# 7-10: search


def _agree(a: search.SearchResult, b: search.SearchResult) -> bool:
    if a.optimum != b.optimum:
        return False
    if a.more_classes or b.more_classes:
        return a.more_classes == b.more_classes
    return len(a.witnesses) == len(b.witnesses) and all(
        any(cl.are_isomorphic(x, y) for y in b.witnesses) for x in a.witnesses)


def oracle_instances() -> list[tuple[int, int]]:
    return [(n, k) for k in (2, 3) for n in range(k + 1, 12) if binom(n, k) <= search.ORACLE_LIMIT]


def check_oracle(instances=None) -> Check:
    bad = []
    count = 0
    for n, k in instances or oracle_instances():
        for name in search.PRESETS:
            p = search.preset(name, n, k)
            a, b = search.solve(p), search.brute_oracle(p)
            count += 1
            if not _agree(a, b):
                bad.append(f"{name}({n},{k}): solver {a.optimum}/{len(a.witnesses)} oracle {b.optimum}/{len(b.witnesses)}")
    p = search.preset("HM", 7, 3)
    r = search.solve(p)
    names = _classes(r.witnesses, {"HM": build("HM", Params(7, 3)), "T3": build("T3", Params(7, 3))})
    if r.optimum != 13 or sorted(names) != ["HM", "T3"]:
        bad.append(f"HM(7,3): {r.optimum} with {names}")
    return Check("7 solver vs oracle", f"{count} instances agree; (7,3) non-EKR 13 {{HM,T3}}",
                 f"{count - len(bad)} agree", not bad, details=bad)


def _theorem_row(name, n, k, names, want_classes, seconds, require_all=False) -> Check:
    r = search.solve(search.preset(name, n, k), seconds=seconds)
    exp = search.expected_optimum(name, n, k)
    got = sorted(set(_classes(r.witnesses, names)))
    ok = r.status == "proved_optimal" and r.optimum == exp and set(got) <= set(want_classes)
    if require_all:
        ok = ok and set(got) == set(want_classes)
    obs = f"{r.optimum} {{{','.join(got)}}} {r.status} nodes={r.nodes}"
    details = [] if ok else [json.dumps(f.sets()) for f in r.witnesses]
    return Check(f"{name}({n},{k})", f"{exp} {{{','.join(sorted(want_classes))}}}", obs, ok, details=details)


def template_names(n: int, k: int) -> dict[str, Family]:
    p = Params(n, k)
    out = {"star": build("Star", p), "HM": build("HM", p), "J2": build("J", p, i=2)}
    # for k = 3 the triangle-type family and G(2) coincide
    out["T3" if k == 3 else "G2"] = build("G", p, i=2)
    out["K2"] = build("K2", p)
    if k >= 4:
        out["G3"] = build("G", p, i=3)
        out["J3"] = build("J", p, i=3)
    for i in range(3, k):
        out[f"K({i})"] = build(TemplateDescriptor("K", i=i), p)
    return out


def check_classical(n: int = 9, k: int = 4, seconds: float = 600) -> Check:
    """Plain, one-exception and two-exception optima with their witness classes."""
    start = time.perf_counter()
    names = template_names(n, k)
    hk = {"J2", "G2", "G3"} if k == 4 else {"J2"}
    rows = []
    for name, want in (("EKR", {"star"}), ("HM", {"HM"} | ({"T3"} if k == 3 else set())), ("HK", hk)):
        left = max(1.0, seconds - (time.perf_counter() - start))
        rows.append(_theorem_row(name, n, k, names, want, left, require_all=(name == "HK" and k == 4)))
    ok = all(r.ok for r in rows)
    return Check(f"8 classical optima ({n},{k})", " / ".join(r.expected for r in rows),
                 " / ".join(r.observed for r in rows), ok, details=[d for r in rows for d in r.details])


def check_main_small(seconds: float = 900) -> Check:
    r = _theorem_row("Main", 9, 4, template_names(9, 4), {"K2", "J3"}, seconds, require_all=True)
    r.item = "9 Main optimum (9,4)"
    return r


def j3_certificate(fam: Family) -> list[str]:
    """Property certificate that a 68-member family at (10,4) is an optimal J3."""
    bad = []
    n, k = fam.n, fam.k
    want = formula_value(Bound.Main_ii, Params(n, k))
    if len(fam) != want:
        bad.append(f"size {len(fam)} != {want}")
    if not cl.are_isomorphic(fam, build("J", Params(n, k), i=3)):
        bad.append("incumbent is not a J3")
    if traces.bound_from_traces(n, k) != want:
        bad.append("trace bound differs from the J3 size")
    bad += guarded_run(fam)
    return bad


def check_main_large(seconds: float = 3600, run_search: bool = True) -> Check:
    n, k = 10, 4
    names = template_names(n, k)
    if run_search:
        r = search.solve(search.preset("Main", n, k), seconds=seconds)
        got = sorted(set(_classes(r.witnesses, names)))
        if r.status == "proved_optimal":
            ok = r.optimum == 68 and got == ["J3"]
            return Check("10 Main optimum (10,4)", "68 {J3}", f"{r.optimum} {{{','.join(got)}}} proved nodes={r.nodes}",
                         ok, details=[] if ok else [json.dumps(f.sets()) for f in r.witnesses])
        incumbent = r.witnesses[0] if r.witnesses else None
        how = f"budget exhausted at {r.optimum}; certificate"
    else:
        incumbent = relabel(names["J3"], list(range(n, 0, -1)))
        how = "certificate only"
    if incumbent is None:
        return Check("10 Main optimum (10,4)", "68 {J3}", "no incumbent", False)
    bad = j3_certificate(incumbent)
    return Check("10 Main optimum (10,4)", "68 {J3}", f"{len(incumbent)} {how} {'clean' if not bad else 'failed'}",
                 not bad, details=bad)


# 11-12: separability and degree thresholds


def check_separability(oracle_limit: int = 18) -> Check:
    bad = []
    checked = 0
    for r in (2, 3):
        for m in range(2 * r + 1, 2 * r + 4):
            for a in (r - 1, r):
                fam = separability.prop32_family(m, r, range(1, a + 1))
                checked += 1
                if len(fam) != separability.prop32_size(m, r, a) and a >= 2:
                    bad.append(f"size m={m} r={r} a={a}")
                if not separability.is_non_separable(fam):
                    bad.append(f"separable m={m} r={r} a={a}")
                if len(fam) <= oracle_limit and separability.is_non_separable_oracle(fam, oracle_limit) != \
                        separability.is_non_separable(fam):
                    bad.append(f"oracle disagrees m={m} r={r} a={a}")
    for n, k in ((9, 4), (10, 4), (11, 5)):
        rows = separability.check_rigidity(TemplateDescriptor("J", i=3), Params(n, k))
        checked += len(rows)
        bad += [f"J3({n},{k}) shift {r.x}->{r.y}" for r in rows if not r.ok]
        fam = build("J", Params(n, k), i=3)
        for r in rows:
            if 0 < r.boundary <= oracle_limit:
                reduced = separability.shift_boundary(fam, r.x, r.y).reduced
                checked += 1
                if separability.is_non_separable_oracle(reduced, oracle_limit) != r.non_separable:
                    bad.append(f"oracle disagrees on J3({n},{k}) shift {r.x}->{r.y}")
    return Check("11 non-separability", f"{checked} checks clean", f"{checked - len(bad)} clean", not bad, details=bad)


def _random_subfamily(fam: Family, rng) -> Family:
    keep = [m for m in fam if rng.random() < rng.random()]
    return fam.with_masks(keep)


def check_degree_claims(samples: int = 500, seed: int = 0, ns=range(9, 13)) -> Check:
    rng = _rng(seed, "claims")
    bad = []
    checked = 0
    for n in ns:
        p = Params(n, 4)
        g2 = build("G", p, i=2)
        g3 = build("G", p, i=3)
        core = elements(cl.g2_cores(g2)[0])
        center, E = cl.g3_witnesses(g3)[0]
        E = elements(E)
        pool2 = [g2] + [_random_subfamily(g2, rng) for _ in range(samples)]
        pool3 = [g3] + [_random_subfamily(g3, rng) for _ in range(samples)]
        for f in pool2:
            checked += 1
            if cl.g2_pair_violations(f, core):
                bad.append(f"G2({n}) pair rule")
        for f in pool3:
            checked += 1
            if cl.g3_pair_violations(f, center, E) or cl.g3_triple_violations(f, center, E):
                bad.append(f"G3({n}) pair/triple rule")
    return Check("12 degree thresholds", f"{checked} families clean", f"{checked - len(bad)} clean", not bad,
                 details=bad[:10])


# driver


def plan(grid: str, seed: int):
    """Ordered (name, thunk) pairs for a grid."""
    items = [
        ("1", lambda: check_formulas()),
        ("2", lambda: check_golden()),
        ("3", lambda: check_crossover()),
        ("4", lambda: check_trace_collapse()),
    ]
    if grid == "formulas":
        return items
    if grid == "quick":
        items += [
            ("5", lambda: check_shifting(100, seed)),
            ("6", lambda: check_guarded(12, seed, include_k2=False)),
            ("7", lambda: check_oracle([(n, k) for n, k in oracle_instances() if n <= 7])),
            ("8", lambda: check_classical(7, 3, 60)),
            ("10", lambda: check_main_large(run_search=False)),
            ("11", lambda: check_separability()),
            ("12", lambda: check_degree_claims(50, seed, range(9, 11))),
        ]
        return items
    items += [
        ("5", lambda: check_shifting(1000, seed)),
        ("6", lambda: check_guarded(200, seed)),
        ("7", lambda: check_oracle()),
        ("8", lambda: check_classical(9, 4, 600)),
        ("9", lambda: check_main_small(900)),
        ("10", lambda: check_main_large(3600)),
        ("11", lambda: check_separability()),
        ("12", lambda: check_degree_claims(500, seed)),
    ]
    return items


def run_items(items, stream=None) -> list[Check]:
    rows = []
    for name, thunk in items:
        start = time.perf_counter()
        try:
            c = thunk()
        except Exception as exc:  # every item is attempted even when one crashes
            c = Check(name, "no error", f"{type(exc).__name__}: {exc}", False)
        c.seconds = time.perf_counter() - start
        rows.append(c)
        if stream is not None:
            print(c.row(), file=stream, flush=True)
    return rows


def verify_all(grid: str = "default", seed: int = 0, report: str | None = None, items=None) -> bool:
    if grid not in GRIDS:
        raise ValueError(f"unknown grid {grid!r}; choose from {GRIDS}")
    start = time.perf_counter()
    header = "item\texpected\tobserved\tverdict\tseconds"
    print(header, flush=True)
    rows = run_items(items if items is not None else plan(grid, seed), sys.stdout)
    text = header + "\n" + "".join(r.row() + "\n" for r in rows)
    for r in rows:
        for d in r.details:
            print(f"  [{r.item}] {d}", file=sys.stderr)
    if report:
        with open(report, "w") as fh:
            fh.write(text)
        manifest = {
            "version": __version__,
            "command": sys.argv,
            "parameters": {"grid": grid, "seed": seed, "workers": search.default_workers()},
            "report_sha256": hashlib.sha256(text.encode()).hexdigest(),
            "wall_seconds": round(time.perf_counter() - start, 3),
            "verdicts": {r.item: r.verdict for r in rows},
            "details": {r.item: r.details for r in rows if r.details},
        }
        with open(report + ".manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
    return all(r.ok for r in rows)


__all__ = [
    "Check", "GOLDEN", "GRIDS", "check_classical", "check_crossover", "check_degree_claims", "check_formulas",
    "check_golden", "check_guarded", "check_main_large", "check_main_small", "check_oracle", "check_separability",
    "check_shifting", "check_trace_collapse", "guarded_run", "j3_certificate", "plan", "run_items", "verify_all",
]
