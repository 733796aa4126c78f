#!/usr/bin/env python3
"""Write every shipped preset to <out-dir>/<name>.json for inspection or
hand-editing (default out-dir: presets/)."""

import json
import sys
from pathlib import Path

from elliptic_doa.presets import PRESETS, get_preset


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    out = Path(argv[0]) if argv else Path("presets")
    out.mkdir(parents=True, exist_ok=True)
    for name in sorted(PRESETS):
        path = out / f"{name}.json"
        path.write_text(json.dumps(get_preset(name), indent=2, sort_keys=True) + "\n")
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
