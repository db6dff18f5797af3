"""``imager`` command line: synth | image | verify | sweep."""
from __future__ import annotations

import argparse
import logging
import sys

import yaml

from .config import ConfigError, apply_override, load_config

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


def _parser():
    p = argparse.ArgumentParser(prog="imager", description="Subspace-migration imaging of thin inclusions.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="YAML experiment file")
        sp.add_argument("--seed", type=int, help="override noise.seed")
        sp.add_argument("--out", help="override output.dir")
        sp.add_argument("--set", action="append", default=[], metavar="PATH=VALUE",
                        help="override any field, e.g. --set noise.snr_db=20")

    common(sub.add_parser("synth", help="write MSR data only"))
    common(sub.add_parser("image", help="synthesize (or load), image, filter and score"))
    sw = sub.add_parser("sweep", help="Cartesian sweep over the config's sweep fields")
    common(sw)
    sw.add_argument("--workers", type=int)
    v = sub.add_parser("verify", help="check the analytical identities")
    v.add_argument("--level", choices=("fast", "full"), default="fast")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _configure(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = apply_override(cfg, "noise.seed", args.seed)
    if args.out:
        cfg = apply_override(cfg, "output.dir", args.out)
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"expected PATH=VALUE, got {item!r}", "--set")
        path, value = item.split("=", 1)
        cfg = apply_override(cfg, path, yaml.safe_load(value))
    return cfg


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.command == "verify":
        from .verify import run_verification

        report = run_verification(args.level)
        print(report.render())
        return EXIT_OK if report.ok else EXIT_FAILURE

    try:
        cfg = _configure(args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    from . import experiment

    try:
        if args.command == "synth":
            for path in experiment.run_synth(cfg):
                print(path)
        elif args.command == "image":
            summary = experiment.run_experiment(cfg)
            for name, rec in summary["maps"].items():
                print(f"{name}: peak={rec['peak']:.4g} argmax={rec['argmax']}")
        else:
            print(experiment.run_sweep(cfg, workers=args.workers))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
