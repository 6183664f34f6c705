"""Experiment configuration: parameter schemas and ``key = value`` config files."""
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import configargparse

from ..common.errors import UsageError

logger = logging.getLogger(__name__)

DEFAULT_SEED = 0
DEFAULT_OUT = 'results'


def float_list(text: str) -> List[float]:
    """Comma-separated reals, e.g. ``0.2, 0.1, 0.05``."""
    items = [s for s in str(text).strip().strip('[]').split(',') if s.strip()]
    try:
        return [float(s) for s in items]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of reals, got {text!r}") from None


def complex_value(text: str) -> complex:
    try:
        return complex(str(text).replace(' ', ''))
    except ValueError:
        raise UsageError(f"expected a complex number such as 1+2j, got {text!r}") from None


TYPES: Dict[str, Callable[[str], Any]] = {
    'int': int,
    'float': float,
    'complex': complex_value,
    'str': str,
    'floats': float_list,
}


@dataclass(frozen=True)
class Param:
    """One entry of an experiment's parameter schema."""
    name: str
    type: str
    default: Any
    help: str = ''

    def __post_init__(self):
        if self.type not in TYPES:
            raise ValueError(f"unknown parameter type {self.type!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    params: Dict[str, Any] = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    output_dir: str = DEFAULT_OUT

    def to_dict(self) -> Dict[str, Any]:
        params = {k: ([v.real, v.imag] if isinstance(v, complex) else v) for k, v in self.params.items()}
        return {'name': self.name, 'params': params, 'seed': self.seed, 'output_dir': self.output_dir}


class SchemaParser(configargparse.ArgParser):
    """ArgParser that raises UsageError instead of exiting."""

    def error(self, message):
        raise UsageError(message)


def build_parser(name: str, schema: Sequence[Param]) -> SchemaParser:
    parser = SchemaParser(prog=f"brodylab run {name}",
                          config_file_parser_class=configargparse.DefaultConfigFileParser,
                          add_help=False, allow_abbrev=False)
    parser.add_argument('--config', is_config_file=True, help='config file of key = value lines')
    parser.add_argument('--seed', type=int, default=DEFAULT_SEED, help='64-bit seed')
    parser.add_argument('--out', default=DEFAULT_OUT, help='output directory')
    for p in schema:
        parser.add_argument(f"--{p.name}", type=TYPES[p.type], default=p.default, help=p.help)
    return parser


def load_config(name: str, schema: Sequence[Param], path: Optional[str] = None, seed: Optional[int] = None,
                out: Optional[str] = None, overrides: Sequence[str] = ()) -> ExperimentConfig:
    """Resolve an experiment's parameters: command line over config file over schema defaults.

    Raises:
        UsageError: on unknown keys or values of the wrong type.
    """
    args: List[str] = []
    if path is not None:
        args += ['--config', path]
    if seed is not None:
        args += ['--seed', str(seed)]
    if out is not None:
        args += ['--out', out]
    args += list(overrides)
    ns = build_parser(name, schema).parse_args(args=args, env_vars={})
    params = {p.name: getattr(ns, p.name) for p in schema}
    if not 0 <= ns.seed < 2 ** 64:
        raise UsageError(f"seed must be a 64-bit unsigned integer, got {ns.seed}")
    logger.debug(f"config for {name}: {params}, seed {ns.seed}")
    return ExperimentConfig(name, params, int(ns.seed), ns.out)
