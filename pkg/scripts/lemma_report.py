"""Sweep all type pairs up to a nesting depth and report route agreement.

For every ordered pair (male, female) of library types the three routes must
agree: exact geometric fit, raster-sampled fit, and unification with fresh
variables.  Prints a summary table and exits nonzero on any disagreement.

Usage: python scripts/lemma_report.py [--depth N] [--raster]
  --raster also runs the (slow) grid-sampled route on every pair.
"""

import argparse
import itertools
import sys
import time

from madawipol.forms import (
    default_config,
    female_bottom_region,
    male_fits_female,
    type_form,
)
from madawipol.geometry import raster_region_contains
from madawipol.textlang import TypeApp, TypeVar, print_type
from madawipol.typesys import unify_fresh

BASE = [TypeVar("a"), TypeApp("Bool", None), TypeApp("Colour", None),
        TypeApp("WeekendDay", None)]
UNARY = ["List", "Pair", "SimpleType"]


def types_to_depth(depth: int):
    layer = list(BASE)
    out = list(layer)
    for _ in range(depth):
        layer = [TypeApp(cons, t) for cons in UNARY for t in layer]
        out.extend(layer)
    return out


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--depth", type=int, default=3)
    parser.add_argument("--raster", action="store_true",
                        help="also check the sampled-grid route (slow)")
    args = parser.parse_args()

    config = default_config()
    universe = types_to_depth(args.depth)
    print(f"{len(universe)} types to depth {args.depth}, "
          f"{len(universe) ** 2} ordered pairs")

    forms = {print_type(t): type_form(config, t) for t in universe}
    t0 = time.monotonic()
    fits = unifies = mismatches = 0
    for (sm, tm), (sf, tf) in itertools.product(
            [(print_type(t), t) for t in universe], repeat=2):
        geometric = male_fits_female(config, forms[sm], forms[sf])
        logical = unify_fresh(tm, tf) is not None
        if geometric:
            fits += 1
        if logical:
            unifies += 1
        if geometric != logical:
            mismatches += 1
            print(f"MISMATCH male={sm!r} female={sf!r} "
                  f"fit={geometric} unify={logical}")
        if args.raster and geometric != raster_region_contains(
                female_bottom_region(config, forms[sf]), forms[sm].rigid):
            mismatches += 1
            print(f"RASTER MISMATCH male={sm!r} female={sf!r}")
    dt = time.monotonic() - t0
    print(f"fitting pairs:   {fits}")
    print(f"unifiable pairs: {unifies}")
    print(f"mismatches:      {mismatches}")
    print(f"elapsed:         {dt:.2f}s")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
