"""Regenerate the standard config JSON shipped with the package.

Writes the same bytes to src/madawipol/data/standard_config.json (the copy
the package loads) and configs/standard_config.json (the copy external
clients POST to the service).  Run from the repository root after changing
the built-in shape library; the golden test pins the output.
"""

import pathlib
import sys

from madawipol.forms import default_config, save_config, validate_config

ROOT = pathlib.Path(__file__).resolve().parent.parent


def main() -> int:
    config = default_config()
    violations = validate_config(config)
    if violations:
        for v in violations:
            print(f"violation: {v.kind}: {v.subject}: {v.detail}", file=sys.stderr)
        return 1
    targets = [
        ROOT / "src" / "madawipol" / "data" / "standard_config.json",
        ROOT / "configs" / "standard_config.json",
    ]
    for path in targets:
        path.parent.mkdir(parents=True, exist_ok=True)
        save_config(config, path)
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
