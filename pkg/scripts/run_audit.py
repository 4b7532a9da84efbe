"""Audit every shipped series and write a tab-separated summary next to the report.

Usage: python scripts/run_audit.py [OUTDIR] [--jobs N]
"""
import argparse
import io
import sys
import time
from pathlib import Path

from horncalc.cli import run


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir", nargs="?", default="audit-out")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args(argv)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    out, err = io.StringIO(), io.StringIO()
    start = time.perf_counter()
    rc = run(["audit", "--jobs", str(args.jobs), "--summary", str(outdir / "summary.tsv")], out, err)
    elapsed = time.perf_counter() - start
    (outdir / "report.txt").write_text(out.getvalue() + err.getvalue(), encoding="utf-8")
    print(out.getvalue().splitlines()[-1])
    print(f"exit {rc} after {elapsed:.1f}s; details in {outdir}")
    return rc


if __name__ == "__main__":
    sys.exit(main())
