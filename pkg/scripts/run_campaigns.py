#!/usr/bin/env python3
"""
Run every verification campaign at its full trial count.

Reads:    nothing (instances are generated from seeds)
Produces: data/reports/<lemma>.jsonl, one record per instance
          data/metrics.json, per-lemma counts merged under "campaigns"

Exits 1 if any audit failed.
"""
import argparse
import logging
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT))

from grounded_chi import config  # noqa: E402
from grounded_chi.campaigns import DEFAULT_TRIALS, run_campaign, summarize, update_metrics  # noqa: E402

logger = logging.getLogger("run_campaigns")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument('--only', nargs='*', default=None, help='lemma names (default: all)')
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--workers', type=int, default=config.WORKERS)
    parser.add_argument('--scale', type=float, default=1.0, help='multiply every trial count')
    args = parser.parse_args()
    logging.basicConfig(level=config.LOG_LEVEL, format="%(levelname)s %(name)s: %(message)s")

    lemmas = args.only or list(DEFAULT_TRIALS)
    records, failed = [], []
    for lemma in lemmas:
        trials = max(1, int(DEFAULT_TRIALS[lemma] * args.scale))
        report = run_campaign(lemma, trials, seed=args.seed, workers=args.workers,
                              out=config.REPORTS_DIR / f"{lemma}.jsonl")
        records.extend(report.records)
        if not report.ok:
            failed.append(lemma)

    summary = summarize(records)
    print(summary.to_string(index=False))
    update_metrics(summary)
    print("Updated", config.METRICS_PATH)
    if failed:
        print("Audit failures in:", ", ".join(failed))
        sys.exit(1)


if __name__ == '__main__':
    main()
