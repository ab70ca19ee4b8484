"""Command line entry point: one subcommand per experiment."""
from __future__ import annotations

import argparse
import json
import sys
import time

from . import harness

HELP = {
    "classgroup": "class numbers from reduced forms against the analytic formula",
    "classset": "right ideal classes, weights and the mass formula",
    "verify-average": "spectral vs geometric sides and the closed-form averages",
    "geometric": "irregular and regular orbital terms",
    "measure-check": "Plancherel identities and the two evaluations of I~",
    "equidist": "weighted equidistribution of a_p against the limit measure",
    "subconvexity": "positivity bounds against the subconvex shape",
    "ingest": "validate an eigenform coefficient file (and run the AFE average if D is given)",
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="torusrtf", description="Toric period averages on definite quaternion algebras.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, text in HELP.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("--config", help="JSON config; built-in defaults are used when omitted")
        p.add_argument("--out", default="out", help="output directory for the CSV and JSON reports")
        p.add_argument("--jobs", type=int, default=1, help="worker processes")
        p.add_argument("--tol", type=float, help="override the config tolerance")
        p.add_argument("--nmax", type=int, help="override the config nmax (Hecke index or coefficient count)")
        p.add_argument("--seed", type=int, default=0, help="recorded only; nothing numerical is random")
        if name == "ingest":
            p.add_argument("path", nargs="?", help="coefficient file (overrides the config path)")
    return ap


def load_config(args) -> dict:
    cfg = json.loads(json.dumps(harness.DEFAULTS[args.command]))
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            user = json.load(fh)
        if not isinstance(user, dict):
            raise SystemExit(f"{args.config}: config must be a JSON object")
        cfg.update(user)
    if args.tol is not None:
        cfg["tol"] = args.tol
    if args.nmax is not None:
        cfg["nmax"] = args.nmax
    if getattr(args, "path", None):
        cfg["path"] = args.path
    cfg["seed"] = args.seed
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = load_config(args)
    if args.command == "ingest" and "path" not in cfg:
        print("ingest needs a coefficient file (positional path or 'path' in the config)", file=sys.stderr)
        return 2
    t0 = time.perf_counter()
    rows = harness.run_experiment(args.command, cfg, max(1, args.jobs))
    elapsed = time.perf_counter() - t0
    csv_path, json_path = harness.write_reports(args.command, cfg, rows, args.out, elapsed)
    failed = [r for r in rows if harness.row_failed(r)]
    skipped = sum(str(r.get("status", "")).startswith("skipped") for r in rows)
    print(f"{args.command}: {len(rows)} rows, {len(failed)} failed, {skipped} skipped ({elapsed:.1f} s)")
    for r in failed[:10]:
        print("  FAIL", {k: v for k, v in r.items() if not k.startswith("_")})
    print(f"  wrote {csv_path} and {json_path}")
    return 0 if not failed else 1


if __name__ == "__main__":
    sys.exit(main())
