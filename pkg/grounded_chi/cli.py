"""
Command-line entry point.

  gen      write a generated family, scene or pierced family
  analyze  size, edges, omega, chi, order and simplicity of a file
  verify   seeded verification campaign of one operation
  bounds   the bound recurrence table
  render   SVG picture of a family, scene or dist2 trace
  dist2    run the dist2 pipeline on a scene file and write its trace
  claims   scaffold chain on a family; provenance as JSON lines

Exit codes: 0 success, 1 audit failure, 2 usage, 3 generation budget, 4 solver budget.
"""
import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__, config
from .campaigns import DEFAULT_TRIALS, TRIALS, run_campaign, summarize, update_metrics
from .decomposition import run_claim_chain, supported_chain, write_provenance
from .dist2_pipeline import exact_oracle, recursive_oracle, run_dist2
from .errors import AuditFailure, BudgetExceeded, GroundedError, ValidationError
from .family_model import (
    PiercedFamily,
    Scene,
    dumps,
    gen_bracket,
    gen_chain,
    gen_clique,
    gen_clique_with_pockets,
    gen_dist2_scene,
    gen_pierced,
    gen_pillars,
    gen_random,
    load,
    lower_half_mirrored,
    save,
    upper_half,
)
from .graph_core import build_graph, chi_exact, compute_bounds, crosscheck_bounds, omega_exact
from .grid_topology import check_simple
from .render import render_file

logger = logging.getLogger(__name__)

KINDS = ("random", "clique", "bracket", "pillars", "chain", "pockets", "scene", "pierced")
ORACLES = {"exact": exact_oracle, "recursive": recursive_oracle}


def _generate(args):
    kind = args.kind
    if kind == "random":
        gen = gen_random(args.seed, args.n, steps=args.steps)
        return gen.family, gen
    if kind == "clique":
        gen = gen_clique(args.k)
        return gen.family, gen
    if kind == "bracket":
        gen = gen_bracket(args.k)
        return gen.family, gen
    if kind == "chain":
        gen = gen_chain(args.n)
        return gen.family, gen
    if kind == "pockets":
        gen = gen_clique_with_pockets(args.k)
        return gen.family, gen
    if kind == "pillars":
        gen = gen_pillars(args.m)
        return gen.scene, gen
    if kind == "scene":
        gen = gen_dist2_scene(args.seed, args.m, args.n, steps=args.steps, max_clique=args.k)
        return gen.scene, gen
    P = gen_pierced(args.seed, args.n)
    return P, None


def cmd_gen(args):
    if args.n < 1 or args.k < 1 or args.m < 1:
        raise ValidationError("--n, --k and --m must be positive")
    obj, gen = _generate(args)
    provenance = {"kind": args.kind, "seed": args.seed}
    if gen is not None:
        provenance.update({"witness": gen.witness, "rejected": gen.rejected})
    if args.output:
        save(obj, args.output)
        provenance["output"] = str(args.output)
        print(json.dumps(provenance, sort_keys=True, default=str))
    else:
        sys.stdout.write(dumps(obj))
    return 0


def _regions(obj):
    """(ordered id -> cells, simplicity verdict) for any loadable file."""
    if isinstance(obj, PiercedFamily):
        regions = dict(obj.members)
        simple = check_simple([upper_half(c) for c in regions.values()]).passed and \
            check_simple([lower_half_mirrored(c) for c in regions.values()]).passed
        return regions, simple
    F = obj.family() if isinstance(obj, Scene) else obj
    regions = F.regions()
    return regions, check_simple(list(regions.values())).passed


def analyze(path, budget=None):
    obj = load(path)
    regions, simple = _regions(obj)
    g = build_graph(regions)
    omega, witness = omega_exact(g)
    report = {
        "file": str(path),
        "members": len(g),
        "edges": g.edge_count,
        "omega": omega,
        "omega_witness": list(witness),
        "chi": None,
        "order": list(g.ids),
        "simple": simple,
    }
    try:
        report["chi"] = chi_exact(g, budget)[0]
    except BudgetExceeded as exc:
        exc.report = report
        raise
    return report, g


def _print_report(report, as_json):
    if as_json:
        print(json.dumps(report, indent=2, sort_keys=True))
        return
    print(f"members: {report['members']}")
    print(f"edges:   {report['edges']}")
    print(f"omega:   {report['omega']} ({', '.join(report['omega_witness'])})")
    print(f"chi:     {report['chi'] if report['chi'] is not None else 'budget exceeded'}")
    print(f"order:   {' '.join(report['order'])}")
    print(f"simple:  {'yes' if report['simple'] else 'no'}")


def cmd_analyze(args):
    try:
        report, g = analyze(args.file, args.budget)
    except BudgetExceeded as exc:
        _print_report(exc.report, args.json)
        raise
    _print_report(report, args.json)
    if args.dot:
        Path(args.dot).write_text(g.to_dot(), encoding="utf-8")
        logger.info("wrote %s", args.dot)
    return 0


def cmd_verify(args):
    if args.budget:
        # workers inherit the environment
        os.environ["GROUNDED_CHI_BUDGET"] = str(args.budget)
    trials = args.trials or DEFAULT_TRIALS[args.lemma]
    out = args.out or config.REPORTS_DIR / f"{args.lemma}-s{args.seed}.jsonl"
    report = run_campaign(args.lemma, trials, seed=args.seed, workers=args.workers,
                          params={"k": args.k}, out=out)
    summary = summarize(report.records)
    print(summary.to_string(index=False))
    for r in report.failures():
        print(f"FAILED seed={r['seed']} {r['instance']}: {r['detail']}")
    if args.metrics:
        update_metrics(summary)
    return 0 if report.ok else AuditFailure.exit_code


def cmd_bounds(args):
    if args.k < 1:
        raise ValidationError("--k must be at least 1")
    table = compute_bounds(args.k)
    mismatches = crosscheck_bounds(table)
    if mismatches:
        raise AuditFailure(f"recurrence cross-check disagrees on {', '.join(mismatches)}")
    if args.json:
        print(json.dumps(table.to_json(), indent=2, sort_keys=True))
    else:
        sys.stdout.write(table.format_text())
    return 0


def cmd_render(args):
    out = args.output or Path(args.file).with_suffix(".svg")
    render_file(args.file, out)
    print(out)
    return 0


def cmd_dist2(args):
    scene = load(args.file)
    if not isinstance(scene, Scene):
        raise ValidationError(f"{args.file} is not a scene file (no role tags)")
    coloring, trace = run_dist2(scene.s, scene.pillars, scene.d, args.k, compute_bounds(max(args.k, 2)),
                                scene.frame, ORACLES[args.oracle])
    if args.trace:
        path = Path(args.trace)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(trace.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        logger.info("wrote %s", path)
    print(json.dumps(coloring.to_json(), indent=2, sort_keys=True))
    return 0


def _overrides(items):
    """name=value pairs; delta.J=value sets delta_{k,J}."""
    out = {}
    for item in items or ():
        name, _, value = item.partition("=")
        try:
            number = int(value)
        except ValueError as exc:
            raise ValidationError(f"override {item!r} needs an integer value") from exc
        if name.startswith("delta."):
            out.setdefault("delta", {})[int(name[len("delta."):])] = number
        elif name in ("bootstrap_b", "remainder", "split_chi", "step_a", "step_b"):
            out[name] = number
        else:
            raise ValidationError(f"unknown override {name!r}")
    return out


def cmd_claims(args):
    F = load(args.file)
    if isinstance(F, (Scene, PiercedFamily)):
        raise ValidationError(f"{args.file} is not a grounded family file")
    bounds = compute_bounds(max(args.k, 2))
    chain = supported_chain(F, args.k, args.a, args.budget)
    states, stopped = run_claim_chain(chain, F, args.k, bounds, _overrides(args.override), args.budget)
    if args.out:
        write_provenance(states, args.out)
    summary = {"levels": len(states), "stopped": str(stopped) if stopped else None,
               "scaffold": [m.id for m in states[-1].scaffold] if states else []}
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="grounded_chi", description="Grounded families on the half-plane grid.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=config.LOG_LEVEL)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a family or scene")
    p.add_argument("--kind", choices=KINDS, default="random")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=12)
    p.add_argument("-o", "--output", type=Path)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("analyze", help="report omega, chi and simplicity")
    p.add_argument("file", type=Path)
    p.add_argument("--json", action="store_true")
    p.add_argument("--dot", type=Path)
    p.add_argument("--budget", type=int)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="run a verification campaign")
    p.add_argument("--lemma", choices=sorted(TRIALS), required=True)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=config.WORKERS)
    p.add_argument("--out", type=Path)
    p.add_argument("--budget", type=int)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--metrics", action="store_true", help="merge the summary into data/metrics.json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds", help="print the bound table")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("render", help="SVG of a family, scene or trace file")
    p.add_argument("file", type=Path)
    p.add_argument("-o", "--output", type=Path)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("dist2", help="color the D-members of a scene")
    p.add_argument("file", type=Path)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--oracle", choices=sorted(ORACLES), default="exact")
    p.add_argument("--trace", type=Path)
    p.set_defaults(func=cmd_dist2)

    p = sub.add_parser("claims", help="build the scaffold chain of a family")
    p.add_argument("file", type=Path)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--budget", type=int)
    p.add_argument("--override", action="append", metavar="NAME=VALUE")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_claims)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except GroundedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
