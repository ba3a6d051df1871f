"""
Seeded verification campaigns.

A campaign runs one trial per seed through a named operation with its
postcondition audits. Each trial yields one record:
  {"campaign", "lemma", "seed", "status": passed|failed|skipped,
   "detail", "instance", "chi", "runtime"}
Records stream to a JSON-lines report in seed order; `summarize` folds them
into per-lemma counts with pandas and `update_metrics` merges those into
data/metrics.json.
"""
from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, product
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from . import config
from .decomposition import (
    check_cor_bracket,
    check_cor_clique,
    check_surround,
    externally_supported,
    find_bracket,
    k_cliques,
    ladder_split,
)
from .dist2_pipeline import (
    attach_to_baseline,
    audit_clips,
    audit_context,
    build_pillar_context,
    clip,
    color_rightclips,
    component_map,
    exact_oracle,
    final_four_color,
    pillar_classes,
    run_dist2,
)
from .errors import AuditFailure, GroundedError
from .family_model import (
    GroundedSet,
    Scene,
    gen_crossing_pillars,
    gen_dist2_scene,
    gen_pierced,
    gen_random,
    reduce_pierced_to_grounded,
)
from .graph_core import (
    IntersectionGraph,
    build_graph,
    chi_exact,
    compute_bounds,
    omega_exact,
    pillar_order_coloring,
)
from .grid_topology import CellSet, cut

logger = logging.getLogger(__name__)


# brute-force oracles for the solver campaign

def brute_chi(g: IntersectionGraph) -> int:
    n = len(g.ids)
    if n == 0:
        return 0
    pos = {v: i for i, v in enumerate(g.ids)}
    edges = [(pos[u], pos[v]) for u, v in g.edges]
    for k in range(1, n + 1):
        for colors in product(range(k), repeat=n):
            if all(colors[a] != colors[b] for a, b in edges):
                return k
    return n


def brute_omega(g: IntersectionGraph) -> int:
    for size in range(len(g.ids), 0, -1):
        for sub in combinations(g.ids, size):
            if all(g.has_edge(u, v) for u, v in combinations(sub, 2)):
                return size
    return 0


def random_graph(rng, max_n=8) -> IntersectionGraph:
    n = int(rng.integers(1, max_n + 1))
    p = float(rng.uniform(0.1, 0.9))
    ids = [f"v{i}" for i in range(n)]
    pairs = [(ids[a], ids[b]) for a, b in combinations(range(n), 2) if rng.random() < p]
    return IntersectionGraph.from_edges(ids, pairs)


# trials: each returns a detail dict, raises AuditFailure (or another exit-1 error) on a failed audit

def trial_solver(seed, params):
    g = random_graph(np.random.default_rng(seed), params.get("max_n", 8))
    chi, coloring = chi_exact(g)
    omega, _ = omega_exact(g)
    if not coloring.is_proper(g):
        raise AuditFailure("chi_exact coloring is not proper")
    if chi != brute_chi(g) or omega != brute_omega(g):
        raise AuditFailure(f"solver disagrees with exhaustive search on {len(g)} vertices")
    return {"instance": f"random_graph(n={len(g)}, m={g.edge_count})", "chi": chi}


def _random_family(seed, params):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(params.get("n_min", 5), params.get("n_max", 14) + 1))
    return gen_random(seed, n).family, f"gen_random(seed={seed}, n={n})"


def trial_ladder(seed, params):
    F, instance = _random_family(seed, params)
    chi = chi_exact(build_graph(F))[0]
    a, b = (1, 0) if chi > 2 else (0, 0)
    result = ladder_split(F, a, b)
    return {"instance": instance, "chi": chi, "a": a, "b": b, "h": len(result.h)}


def trial_layers(seed, params):
    F, instance = _random_family(seed, params)
    chi = chi_exact(build_graph(F))[0]
    a = max(0, (chi - 1) // 2)
    out = externally_supported(F, a)
    if chi_exact(build_graph(out))[0] <= a:
        raise AuditFailure(f"layer chi does not exceed {a}")
    return {"instance": instance, "chi": chi, "a": a, "layer": len(out)}


def trial_pillars(seed, params):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, params.get("m_max", 6) + 1))
    scene = gen_crossing_pillars(seed, m).scene
    cuts = [(r.id, cut(r, scene.s, scene.frame)) for r in scene.pillars]
    coloring = pillar_order_coloring(cuts)
    g = build_graph(dict(cuts))
    omega = omega_exact(g)[0]
    if not coloring.is_proper(g) or coloring.palette > omega:
        raise AuditFailure(f"pillar coloring uses {coloring.palette} colors, clique number {omega}")
    return {"instance": f"gen_crossing_pillars(seed={seed}, m={m})", "chi": coloring.palette}


def _dist2_scene(seed, params):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, params.get("m_max", 5) + 1))
    n_d = int(rng.integers(2, params.get("d_max", 8) + 1))
    gen = gen_dist2_scene(seed, m, n_d, max_clique=params.get("k", 2))
    return gen.scene, f"gen_dist2_scene(seed={seed}, m={m}, n_d={n_d})"


def trial_clip(seed, params):
    scene, instance = _dist2_scene(seed, params)
    ctx = build_pillar_context(scene.s, scene.pillars, scene.frame)
    probes = audit_context(ctx, seed=seed)
    view = clip(ctx, scene.d)
    omega = omega_exact(build_graph(scene.family()))[0]
    report = audit_clips(view, omega_bound=omega - 1)
    return {"instance": instance, **probes, **report}


def _right_members(scene):
    ctx = build_pillar_context(scene.s, scene.pillars, scene.frame)
    view = clip(ctx, scene.d)
    right = [x for x in scene.d if view[x.id].rightclip.row(0)]
    return ctx, view, right


def trial_attach(seed, params):
    scene, instance = _dist2_scene(seed, params)
    ctx, view, right = _right_members(scene)
    k = params.get("k", 2)
    phi_r = color_rightclips(view, right, k)
    routed = 0
    for _, ids in sorted(phi_r.classes().items()):
        attached = attach_to_baseline(ctx, [x for x in right if x.id in ids], view)
        routed += len(attached.routed)
    if routed < params.get("min_floating", 2):
        return {"instance": instance, "status": "skipped", "routed": routed}
    return {"instance": instance, "routed": routed}


def trial_final(seed, params):
    scene, instance = _dist2_scene(seed, params)
    ctx, view, right = _right_members(scene)
    k = params.get("k", 2)
    phi_r = color_rightclips(view, right, k)
    cells = 0
    for _, ids in sorted(phi_r.classes().items()):
        M = [x for x in right if x.id in ids]
        attached = attach_to_baseline(ctx, M, view)
        phi_l = exact_oracle(build_graph(attached.family), k - 1)
        for _, cell_ids in sorted(phi_l.classes().items()):
            N = [x for x in M if x.id in cell_ids]
            cmap = component_map(ctx, N, view)
            n, e = len(cmap.graph), cmap.graph.edge_count
            if n >= 3 and e > 3 * n - 6:
                raise AuditFailure(f"component graph has {e} edges on {n} vertices")
            psi = final_four_color(ctx, N, view)
            if psi.palette > 4:
                raise AuditFailure(f"final coloring uses {psi.palette} colors")
            cells += 1
    return {"instance": instance, "cells": cells}


def crossing_dist2_scene(seed, m):
    """
    gen_crossing_pillars scene plus D-members hanging from the pillars: from
    each free base cell, a column up to the first pillar cell above it. Only
    members whose leftclip and rightclip keep the base inside their pillar
    class are kept. Returns the scene and max(2, clique number of R and D).
    """
    scene = gen_crossing_pillars(seed, m).scene
    f, s = scene.frame, scene.s
    ctx = build_pillar_context(s, scene.pillars, f, disjoint=False)
    reach = ctx.pillars_union()
    bases = {r.base_span[0] for r in scene.pillars}
    hanging = []
    for x in range(1, f.width - 1):
        if x in bases:
            continue
        top = next((y for y in range(1, f.height) if (x, y) in reach), None)
        if top is not None:
            hanging.append(GroundedSet(f"H{x}", CellSet((x, y) for y in range(top + 1))))

    by_id = {r.id: r for r in scene.pillars}
    keep = []
    for pc in pillar_classes(ctx, hanging):
        if not pc.members:
            continue
        sub = build_pillar_context(s, [by_id[v] for v in pc.pillars], f)
        view = clip(sub, pc.members)
        keep.extend(x for x in pc.members if view[x.id].leftclip.row(0) and view[x.id].rightclip.row(0))
    keep.sort(key=lambda x: x.base_span[0])
    members = tuple(GroundedSet(f"D{i + 1}", x.region) for i, x in enumerate(keep))
    out = Scene(f, s, scene.pillars, members)
    return out, max(2, omega_exact(build_graph(out.family()))[0])


def trial_dist2(seed, params):
    if seed % 2:
        m = int(np.random.default_rng(seed).integers(2, params.get("m_max", 4) + 1))
        scene, k = crossing_dist2_scene(seed, m)
        instance = f"crossing_dist2_scene(seed={seed}, m={m})"
        if not scene.d:
            return {"instance": instance, "status": "skipped", "members": 0}
    else:
        scene, instance = _dist2_scene(seed, params)
        k = params.get("k", 2)
    bounds = compute_bounds(k)
    coloring, trace = run_dist2(scene.s, scene.pillars, scene.d, k, bounds, scene.frame)
    if coloring.palette > bounds.beta[k]:
        raise AuditFailure(f"palette {coloring.palette} exceeds beta_{k}={bounds.beta[k]}")
    return {"instance": instance, "chi": coloring.palette, "oracle_palette": trace.oracle_palette}


def trial_corollaries(seed, params):
    F, instance = _random_family(seed, params)
    f = F.frame
    probes = 0
    g = build_graph(F)
    for clique in k_cliques(g, 2) + k_cliques(g, 3):
        K = [F.by_id(v) for v in clique]
        for X in F.members:
            if X.id in clique:
                continue
            verdict = check_cor_clique(X, K, f)
            probes += 1
            if not verdict.holds:
                raise AuditFailure(f"{X.id} against clique {clique}: hypotheses hold, conclusion fails")
        if len(K) == 2:
            for Z in F.members:
                if Z.id in clique:
                    continue
                verdict = check_surround(Z, K[0], K[1], f)
                probes += 1
                if not verdict.holds:
                    raise AuditFailure(f"{Z.id} around {clique}: hypotheses hold, conclusion fails")
    bracket = find_bracket(F, 2)
    if bracket is not None:
        for X in F.members:
            if X.id == bracket.support.id or X.id in bracket.clique_ids:
                continue
            verdict = check_cor_bracket(X, bracket, f)
            probes += 1
            if not verdict.holds:
                raise AuditFailure(f"{X.id} against bracket {bracket.clique_ids}: conclusion fails")
    return {"instance": instance, "probes": probes}


def trial_reduction(seed, params):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, params.get("n_max", 10) + 1))
    P = gen_pierced(seed, n)
    plan = reduce_pierced_to_grounded(P)
    upper = {c.color: chi_exact(build_graph(c.upper))[1] for c in plan.classes}
    lower = {c.color: chi_exact(build_graph(c.lower))[1] for c in plan.classes}
    coloring = plan.combine(upper, lower)
    g = build_graph(dict(P.members))
    if not coloring.is_proper(g):
        raise AuditFailure("combined pierced coloring is not proper")
    if coloring.palette > plan.palette_bound(upper, lower):
        raise AuditFailure("combined palette exceeds the product bound")
    return {"instance": f"gen_pierced(seed={seed}, n={n})", "chi": coloring.palette}


def trial_smoke(seed, params):
    F, instance = _random_family(seed, params)
    g = build_graph(F)
    omega = omega_exact(g)[0]
    if omega > params.get("max_omega", 3):
        return {"instance": instance, "status": "skipped", "omega": omega}
    chi = chi_exact(g)[0]
    bound = compute_bounds(max(omega, 1)).xi[max(omega, 1)]
    if chi > bound:
        raise AuditFailure(f"chi={chi} exceeds xi_{omega}={bound}")
    return {"instance": instance, "chi": chi, "omega": omega}


TRIALS: Dict[str, Callable] = {
    "solver": trial_solver,
    "ladder": trial_ladder,
    "layers": trial_layers,
    "pillars": trial_pillars,
    "clip": trial_clip,
    "attach": trial_attach,
    "final": trial_final,
    "dist2": trial_dist2,
    "corollaries": trial_corollaries,
    "reduction": trial_reduction,
    "smoke": trial_smoke,
}

# trial counts of the full run (scripts/run_campaigns.py)
DEFAULT_TRIALS = {
    "solver": 500, "ladder": 200, "layers": 200, "pillars": 200, "clip": 200,
    "attach": 100, "final": 100, "dist2": 50, "corollaries": 300, "reduction": 100, "smoke": 500,
}


def run_trial(lemma, seed, params=None, campaign="adhoc"):
    params = params or {}
    record = {"campaign": campaign, "lemma": lemma, "seed": seed, "status": "passed",
              "detail": "", "instance": "", "chi": None}
    start = time.perf_counter()
    try:
        detail = TRIALS[lemma](seed, params)
        record["instance"] = detail.pop("instance", "")
        record["chi"] = detail.pop("chi", None)
        record["status"] = detail.pop("status", "passed")
        record["detail"] = json.dumps(detail, sort_keys=True) if detail else ""
    except GroundedError as exc:
        # exit code 1 means a postcondition audit failed; anything else is an instance we could not use
        record["status"] = "failed" if exc.exit_code == 1 else "skipped"
        record["detail"] = f"{type(exc).__name__}: {exc}"
        log = logger.warning if exc.exit_code == 1 else logger.info
        log("%s seed %s %s: %s", lemma, seed, record["status"], exc)
    except Exception:
        logger.exception("%s seed %s crashed", lemma, seed)
        record["status"] = "failed"
        record["detail"] = "unexpected error"
    record["runtime"] = round(time.perf_counter() - start, 4)
    return record


def _run_one(task):
    return run_trial(*task)


@dataclass
class VerifyReport:
    campaign: str
    lemma: str
    records: List[dict] = field(default_factory=list)

    @property
    def counts(self):
        out = {"passed": 0, "failed": 0, "skipped": 0}
        for r in self.records:
            out[r["status"]] += 1
        return out

    @property
    def ok(self):
        return self.counts["failed"] == 0

    def failures(self):
        return [r for r in self.records if r["status"] == "failed"]

    def write_jsonl(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as fh:
            for r in self.records:
                fh.write(json.dumps(r, sort_keys=True) + "\n")
        return path


def run_campaign(lemma, trials, seed=0, workers=None, params=None, out=None) -> VerifyReport:
    if lemma not in TRIALS:
        raise KeyError(lemma)
    workers = workers or config.WORKERS
    campaign = f"{lemma}-s{seed}-n{trials}"
    tasks = [(lemma, seed + i, params or {}, campaign) for i in range(trials)]
    report = VerifyReport(campaign, lemma)
    logger.info("campaign %s: %d trials on %d worker(s)", campaign, trials, workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(_run_one, tasks, chunksize=4)
            for n, record in enumerate(results, 1):
                report.records.append(record)
                if n % config.PROGRESS_EVERY == 0:
                    logger.info("%s: %d/%d done", campaign, n, trials)
    else:
        for n, task in enumerate(tasks, 1):
            report.records.append(run_trial(*task))
            if n % config.PROGRESS_EVERY == 0:
                logger.info("%s: %d/%d done", campaign, n, trials)
    report.records.sort(key=lambda r: r["seed"])
    if out is not None:
        report.write_jsonl(out)
    logger.info("campaign %s: %s", campaign, report.counts)
    return report


def summarize(records: List[dict]) -> pd.DataFrame:
    df = pd.DataFrame(records)
    if df.empty:
        return pd.DataFrame(columns=["lemma", "trials", "passed", "failed", "skipped", "mean_runtime", "max_chi"])
    df["chi"] = pd.to_numeric(df["chi"], errors="coerce")
    summary = df.groupby("lemma").agg(
        trials=("seed", "count"),
        passed=("status", lambda s: int((s == "passed").sum())),
        failed=("status", lambda s: int((s == "failed").sum())),
        skipped=("status", lambda s: int((s == "skipped").sum())),
        mean_runtime=("runtime", "mean"),
        max_chi=("chi", "max"),
    ).reset_index()
    summary["mean_runtime"] = summary["mean_runtime"].round(4)
    return summary


def update_metrics(summary: pd.DataFrame, path: Optional[Path] = None) -> dict:
    path = Path(path or config.METRICS_PATH)
    metrics = {}
    if path.exists():
        try:
            metrics = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            logger.warning("%s is not valid JSON; starting a fresh metrics file", path)
            metrics = {}
    campaigns = metrics.setdefault("campaigns", {})
    for row in summary.to_dict(orient="records"):
        lemma = row.pop("lemma")
        campaigns[lemma] = {k: (None if pd.isna(v) else (int(v) if k != "mean_runtime" else float(v)))
                            for k, v in row.items()}
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(metrics, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return metrics
