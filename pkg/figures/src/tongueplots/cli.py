"""plots <kind> --in results.csv --out figure.png"""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, MissingColumn, render


def main(argv=None):
    ap = argparse.ArgumentParser(prog="plots", description=__doc__)
    ap.add_argument("kind", choices=sorted(KINDS))
    ap.add_argument("--in", dest="in_path", required=True)
    ap.add_argument("--out", dest="out_path", required=True)
    ap.add_argument("--omega0", type=float, default=None,
                    help="base frequency for the tongue chart axis")
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code else 0
    kw = {}
    if args.kind == "tongues" and args.omega0 is not None:
        kw["omega0"] = args.omega0
    try:
        render(args.kind, args.in_path, args.out_path, **kw)
    except MissingColumn as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    print(f"wrote {args.out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
