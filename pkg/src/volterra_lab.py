#! /usr/bin/env python3
"""volterra-lab <mode> --config path.json [--seed N] [--out dir]

Exit codes: 0 all checks passed, 2 some check failed, 1 execution error.
"""

import argparse
import json
import logging
import sys

import tornado.options
from tornado.log import enable_pretty_logging
from eva.conf import settings

from codebase.app import make_runner
from codebase.lab.catalogue import describe
from codebase.lab.errors import ConfigError
from codebase.config import ExperimentConfig
from codebase.modes import HANDLERS
from codebase.utils.sqlalchemy import dbc


def build_parser():
    parser = argparse.ArgumentParser(
        prog="volterra-lab",
        description="Solve convolution Volterra summation equations and verify their asymptotics")
    parser.add_argument("mode", nargs="?", choices=[name for name, _ in HANDLERS],
                        help="experiment mode, overrides the config's mode")
    parser.add_argument("--config", help="JSON experiment config")
    parser.add_argument("--seed", type=int, help="master seed, overrides the config")
    parser.add_argument("--out", help="output directory for CSV series and report.json")
    parser.add_argument("--list-catalogue", action="store_true",
                        help="print the kernel, forcing and scaling catalogues")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def setup_logging(verbose):
    if verbose or settings.DEBUG == "true":
        tornado.options.options.logging = "debug"
    enable_pretty_logging()


def main(argv=None):
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)

    if args.list_catalogue:
        print(json.dumps(describe(), indent=2, sort_keys=True))
        return 0
    if not args.config:
        logging.error("--config is required")
        return 1

    if settings.RECORD_RUNS == "true":
        dbc.create_all()

    try:
        config = ExperimentConfig.load(args.config, {"mode": args.mode, "seed": args.seed})
        report = make_runner().run(config, args.out)
    except ConfigError as e:
        logging.error("invalid config: %s", e)
        print(json.dumps({"status": e.slug, "errors": [{"path": e.path, "message": str(e)}]}),
              file=sys.stderr)
        return 1

    if report.failed_checks:
        logging.warning("failed checks: %s", ", ".join(report.failed_checks))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
