#!/usr/bin/env python3
"""
Regenerate the golden fixtures.

Reads:    nothing
Produces: data/fixtures/twin_arch.json   (2-clique of arches, frame 5x3)
          data/fixtures/bracket_2.json   (2-bracket, support on the right)
          data/fixtures/chain_6.json     (path family of six sets)

The files are canonical JSON; tests compare generator output against them.
"""
import argparse
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT))

from grounded_chi import config  # noqa: E402
from grounded_chi.family_model import gen_bracket, gen_chain, gen_clique, save  # noqa: E402

FIXTURES = {
    'twin_arch.json': lambda: gen_clique(2).family,
    'bracket_2.json': lambda: gen_bracket(2).family,
    'chain_6.json': lambda: gen_chain(6).family,
}


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument('--out', type=Path, default=config.FIXTURES_DIR)
    args = parser.parse_args()
    for name, build in FIXTURES.items():
        path = args.out / name
        save(build(), path)
        print("Wrote", path)


if __name__ == '__main__':
    main()
