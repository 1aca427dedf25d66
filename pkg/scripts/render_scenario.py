"""Render the walkthrough: five blocks assembled step by step.

Builds the assembly where a two-element list of booleans grows around a
colour block dropped into a flexible constructor, rendering an SVG after
each step into the output directory.

Usage: python scripts/render_scenario.py [--out DIR]
"""

import argparse
import pathlib
import sys

from madawipol.assembly import Assembly, JointRef
from madawipol.forms import default_config
from madawipol.render import PlaneMisses, cross_section_svg
from madawipol.textlang import print_ads, print_type
from madawipol.typesys import alpha_normalize

STEPS = [
    ("block", "Red"),
    ("block", "FlexiCons"),
    ("join", "1.male", "2.arg0"),
    ("block", "Cons:[List Bool]"),
    ("block", "Cons"),
    ("block", "Nil"),
    ("join", "5.male", "4.arg1"),
    ("join", "4.male", "3.arg1"),
]


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="out/scenario")
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    config = default_config()
    asm = Assembly(config)
    for i, step in enumerate(STEPS, start=1):
        if step[0] == "block":
            iid = asm.add_m_constructor(*_split(step[1]))
            label = f"add {step[1]} -> instance {iid}"
        else:
            result = asm.try_join(JointRef.parse(step[1]), JointRef.parse(step[2]))
            label = f"join {step[1]} -> {step[2]}: joined={result.joined}"
            if result.changed:
                label += " " + str({str(k): print_type(alpha_normalize(t))
                                    for k, t in sorted(result.changed.items(),
                                                       key=lambda kv: str(kv[0]))})
        try:
            svg = cross_section_svg(config, asm)
        except PlaneMisses:
            svg = ""
        path = out / f"step_{i:02d}.svg"
        path.write_text(svg)
        print(f"{label:60s} -> {path}")
    print("final terms:", [print_ads(t) for t in asm.read_back()])
    return 0


def _split(text: str):
    if ":[" in text:
        cons, rest = text.split(":[", 1)
        return cons, rest[:-1]
    return text, None


if __name__ == "__main__":
    sys.exit(main())
