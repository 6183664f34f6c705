"""Command-line driver: ``brodylab run <experiment>`` and ``brodylab list``.

Exit codes: 0 when every verdict passes, 1 on any fail or inconclusive
verdict, 2 on usage errors.
"""
import os
import sys
import logging
from typing import List, Optional

import configargparse

from ..common.errors import UsageError
from .config import load_config
from .experiments import REGISTRY, get_experiment, run_experiment
from .plotting import plot_series

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class _Parser(configargparse.ArgParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> configargparse.ArgParser:
    parser = _Parser(prog='brodylab', description='numerical laboratory for the ergodic theory of Brody curves')
    parser.add_argument('--log-level', default='INFO', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    sub = parser.add_subparsers(dest='command')
    sub.required = True

    run = sub.add_parser('run', help='run one registered experiment', allow_abbrev=False)
    run.add_argument('experiment', help='experiment name')
    run.add_argument('--config', default=None, help='config file of key = value lines')
    run.add_argument('--seed', type=int, default=None, help='overrides the config seed')
    run.add_argument('--out', default=None, help='output directory (overrides the config)')
    run.add_argument('--plot', action='store_true', help='render every CSV series to PNG')
    run.add_argument('--log-level', dest='run_log_level', default=None,
                     choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])

    sub.add_parser('list', help='print the registered experiments with their anchors')
    return parser


def _list() -> int:
    width = max(len(name) for name in REGISTRY)
    for name, exp in sorted(REGISTRY.items()):
        print(f"{name:<{width}}  {exp.anchor}")
    return EXIT_PASS


def _run(args) -> int:
    exp = get_experiment(args.experiment)
    config = load_config(exp.name, exp.schema, args.config, args.seed, args.out, args.overrides)
    report = run_experiment(config)
    if args.plot:
        for artifact in list(report.artifacts):
            if artifact.endswith('.csv'):
                plot_series(os.path.join(config.output_dir, artifact))
    print(f"{report.name}: " + ', '.join(f"{k}={v}" for k, v in report.verdicts.items()))
    return report.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args, extras = build_parser().parse_known_args(argv)
        if extras and args.command != 'run':
            raise UsageError(f"unrecognized arguments: {' '.join(extras)}")
    except UsageError as err:
        print(f"brodylab: {err}", file=sys.stderr)
        return EXIT_USAGE
    args.overrides = extras
    level = getattr(args, 'run_log_level', None) or args.log_level
    logging.basicConfig(level=getattr(logging, level), format='%(asctime)s %(name)s %(levelname)s: %(message)s')
    try:
        if args.command == 'list':
            return _list()
        return _run(args)
    except UsageError as err:
        logger.error(str(err))
        print(f"brodylab: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
