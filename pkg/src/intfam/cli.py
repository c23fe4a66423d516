"""Command line entry point: ``intfam <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys

from . import classification, constructions, search, separability, shifting, traces
from .core import Params, load_family, save_family


def _ints(text: str | None) -> tuple[int, ...] | None:
    if text is None or text == "":
        return None if text is None else ()
    return tuple(int(v) for v in text.split(","))


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_construct(a) -> int:
    desc = constructions.TemplateDescriptor(
        a.kind, i=a.i, x=a.x, E=_ints(a.E), J=_ints(a.J), E1=_ints(a.E1), E2=_ints(a.E2),
        Y=_ints(a.Y), Z=_ints(a.Z), Y0=_ints(a.Y0),
    )
    fam = constructions.build(desc, Params(a.n, a.k))
    if a.out:
        save_family(fam, a.out)
    else:
        print(fam.dumps())
    print(f"{desc.label()}({a.n},{a.k}): {len(fam)} sets", file=sys.stderr)
    return 0


def cmd_bounds(a) -> int:
    B = constructions.Bound
    cols = ["n", "k", "EKR_max", "HM_bound", "HK_bound", "Main_i", "Main_ii", "K2_minus_J3", "relation"]
    lines = ["\t".join(cols)]
    for row in constructions.crossover_table(a.k, (a.n_min, a.n_max)):
        p = Params(row.n, a.k)
        vals = [constructions.formula_value(t, p) for t in (B.EKR_max, B.HM_bound, B.HK_bound, B.Main_i, B.Main_ii)]
        lines.append("\t".join(map(str, [row.n, a.k, *vals, row.k2 - row.j3, row.relation])))
    _emit("\n".join(lines) + "\n", a.out)
    return 0


def cmd_classify(a) -> int:
    fam = load_family(a.inp)
    rep = classification.classify(fam)
    print(json.dumps(rep.to_dict(), indent=2))
    return 0


def cmd_stabilize(a) -> int:
    fam = load_family(a.inp)
    if a.guarded:
        try:
            out, frozen, log = shifting.guarded_stabilize(fam, floor=a.floor)
        except shifting.GuardedShiftError as exc:
            print(f"guarded stabilization failed: {exc}", file=sys.stderr)
            if a.log and exc.log is not None:
                _emit("\n".join(exc.log.lines()) + "\n", a.log)
            return 2
        print(f"frozen {list(frozen.elements)}", file=sys.stderr)
    else:
        out, log = shifting.stabilize(fam, frozen=_ints(a.freeze) or ())
    if a.log:
        _emit("\n".join(log.lines()) + "\n", a.log)
    if a.out:
        save_family(out, a.out)
    else:
        print(out.dumps())
    return 0


def cmd_trace(a) -> int:
    fam = load_family(a.inp)
    Y = traces.build_window(fam.n, fam.k, _ints(a.frozen) or ())
    prof = traces.trace(fam, Y)
    data = prof.to_dict()
    data["lemma_2_2"] = traces.check_lemma_2_2(fam, Y)
    data["lemma_2_3"] = traces.check_lemma_2_3(prof)
    data["cap_bound"] = traces.bound_from_traces(prof)
    data["size"] = len(fam)
    print(json.dumps(data, indent=2))
    return 0


_TEMPLATES = {"j3": ("J", 3), "j2": ("J", 2), "g2": ("G", 2), "g3": ("G", 3), "hm": ("HM", None)}


def cmd_rigidity(a) -> int:
    kind, i = _TEMPLATES[a.template.lower()]
    rows = separability.check_rigidity(constructions.TemplateDescriptor(kind, i=i), Params(a.n, a.k))
    out = ["x\ty\tblock_x\tblock_y\tboundary\ttrivial\tnon_separable\tok"]
    for r in rows:
        out.append(f"{r.x}\t{r.y}\t{r.block_x}\t{r.block_y}\t{r.boundary}\t{int(r.trivial)}\t{int(r.non_separable)}\t{int(r.ok)}")
    _emit("\n".join(out) + "\n", a.out)
    return 0 if all(r.ok for r in rows) else 2


def cmd_search(a) -> int:
    res = search.solve(search.preset(a.preset, a.n, a.k), budget=a.node_budget, workers=a.workers,
                       seconds=a.budget)
    exp = search.expected_optimum(a.preset, a.n, a.k)
    if a.out:
        search.write_result(res, a.out)
    summary = res.to_dict() | {"preset": a.preset, "expected": exp}
    print(json.dumps(summary, indent=2))
    if res.status != "proved_optimal":
        return 3
    if exp is not None and res.optimum != exp:
        return 2
    return 0


def cmd_verify_all(a) -> int:
    from .verify import verify_all

    ok = verify_all(grid=a.grid, seed=a.seed, report=a.report)
    return 0 if ok else 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="intfam", description="Intersecting families toolkit")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("construct", help="write a named family as JSON")
    p.add_argument("--kind", required=True, choices=constructions.KINDS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--i", type=int)
    p.add_argument("--x", type=int)
    for name in ("E", "J", "E1", "E2", "Y", "Z", "Y0"):
        p.add_argument(f"--{name}", help="comma separated elements")
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("bounds", help="closed-form sizes as TSV")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("classify", help="structural verdicts as JSON")
    p.add_argument("--in", dest="inp", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("stabilize", help="shift a family until stable")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--guarded", action="store_true")
    p.add_argument("--floor", type=int, default=3)
    p.add_argument("--freeze", help="comma separated elements never shifted")
    p.add_argument("--log")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stabilize)

    p = sub.add_parser("trace", help="trace profile on the window around a frozen set")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--frozen", default="")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("rigidity", help="boundary separability table for a template")
    p.add_argument("--template", required=True, choices=sorted(_TEMPLATES))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_rigidity)

    p = sub.add_parser("search", help="exact optimum for a preset")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--preset", required=True, choices=search.PRESETS)
    p.add_argument("--budget", type=float, help="wall-time limit in seconds")
    p.add_argument("--node-budget", type=int, help="search node limit")
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("verify-all", help="run the reproduction checks and write a TSV report")
    p.add_argument("--grid", choices=("default", "quick", "formulas"), default="default")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report")
    p.set_defaults(func=cmd_verify_all)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
