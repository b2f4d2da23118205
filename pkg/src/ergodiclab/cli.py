"""Command line entry point: ``ergodiclab run | list-presets | validate-config``.

Outputs land in one directory: ``report.json`` (verdicts plus provenance),
one CSV per data series and one two-column ``.dat`` file per plot.  The
output directory is taken from ``--out``, then ``$ERGODICLAB_OUT``, then
the config's ``out`` field, then ``results/<name>``.
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import metadata
import json
import logging
import math
import os
from pathlib import Path
import sys

import numpy as np

from . import config as cf
from . import presets
from .runner import LabError, run_lab

log = logging.getLogger("ergodiclab")

OUT_ENV = "ERGODICLAB_OUT"


def _version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


@dataclass
class RunReport:
    name: str
    lab: str
    tag: str
    verdicts: list
    provenance: dict
    series: dict = field(default_factory=dict, repr=False)
    plots: dict = field(default_factory=dict, repr=False)
    estimates: dict = field(default_factory=dict)

    @property
    def failed(self):
        return [v for v in self.verdicts if v["verdict"] == "fail"]

    @property
    def exit_code(self):
        return 1 if self.failed else 0

    def summary(self):
        counts = {k: sum(v["verdict"] == k for v in self.verdicts) for k in ("pass", "fail", "flagged")}
        return counts

    def to_dict(self):
        return {"name": self.name, "lab": self.lab, "tag": self.tag,
                "summary": self.summary(), "verdicts": self.verdicts, "estimates": self.estimates,
                "provenance": self.provenance}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def _seed_task(args):
    cfg, seed = args
    return run_lab(cfg, seed)


def run(cfg, jobs=1):
    """Run every seed of ``cfg`` and merge the results in seed order."""
    cf.validate(cfg)
    seeds = cf.seeds(cfg)
    tasks = [(cfg, s) for s in seeds]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_seed_task, tasks))
    else:
        results = [_seed_task(t) for t in tasks]
    verdicts, series, plots, estimates = [], {}, {}, {}
    for seed, r in zip(seeds, results):
        estimates[str(seed)] = r.estimates
        verdicts.extend(r.verdicts)
        series.update(r.series)
        plots.update(r.plots)
    provenance = {
        "config_hash": cf.config_hash(cfg),
        "seeds": seeds,
        "version": _version(),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    return RunReport(cfg["name"], cfg["lab"], cfg.get("tag", ""), _jsonable(verdicts), provenance, series, plots,
                     _jsonable(estimates))


def write_outputs(report, out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "report.json", "w") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    for name, (header, rows) in sorted(report.series.items()):
        with open(out / f"{name}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_cell(v) for v in row])
    for name, xy in sorted(report.plots.items()):
        xy = np.asarray(xy, dtype=float)
        with open(out / f"{name}.dat", "w") as fh:
            fh.write(f"# {name}\n")
            for x, y in xy:
                fh.write(f"{x!r} {y!r}\n")
    return out


def output_dir(cfg, flag=None):
    if flag:
        return Path(flag)
    if os.environ.get(OUT_ENV):
        return Path(os.environ[OUT_ENV])
    if cfg.get("out"):
        return Path(cfg["out"])
    return Path("results") / cfg["name"]


def _load(args):
    if args.preset:
        return cf.validate(presets.preset(args.preset))
    return cf.load(args.config)


def cmd_run(args):
    cfg = _load(args)
    if args.seed_offset:
        cfg = cf.with_seed_offset(cfg, args.seed_offset)
    report = run(cfg, jobs=args.jobs)
    out = write_outputs(report, output_dir(cfg, args.out))
    for v in report.verdicts:
        print(f"[{v['verdict']:>7}] {v['check']} ({v['tag']}) seed={v['seed']} "
              f"measured={v['measured']} tol={v['tolerance']}")
    s = report.summary()
    print(f"{report.name}: {s['pass']} pass, {s['fail']} fail, {s['flagged']} flagged -> {out}")
    return report.exit_code


def cmd_list(args):
    rows = presets.list_presets()
    width = max(len(n) for n, _, _ in rows)
    for name, tag, desc in rows:
        print(f"{name:<{width}}  [{tag}] {presets.TAGS[tag]}")
        if args.verbose and desc:
            print(f"{'':<{width}}    {desc}")
    return 0


def cmd_validate(args):
    cfg = _load(args)
    print(f"{cfg['name']}: valid {cfg['lab']} config (seeds {cf.seeds(cfg)})")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="ergodiclab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def source(p):
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--config", metavar="PATH", help="YAML experiment config")
        g.add_argument("--preset", metavar="NAME", help="a shipped preset (see list-presets)")

    p = sub.add_parser("run", help="run an experiment")
    source(p)
    p.add_argument("--out", metavar="DIR", help=f"output directory (overrides ${OUT_ENV})")
    p.add_argument("--seed-offset", type=int, default=0, metavar="N", help="add N to every seed")
    p.add_argument("--jobs", type=int, default=1, metavar="K", help="worker processes across seeds")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("list-presets", help="list shipped presets and their tags")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("validate-config", help="check a config against the schema")
    source(p)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except cf.ConfigError as exc:
        print(f"config error:\n{exc}", file=sys.stderr)
        return 2
    except (LabError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
