"""Experiment reports: versioned JSON with 17-significant-digit floats, and CSV series."""
import json
import math
import os
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from ..common.errors import ValidationError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
VERDICTS = ('pass', 'fail', 'inconclusive')


def format_float(x: float) -> str:
    if not math.isfinite(x):
        return 'null'
    text = f"{x:.17g}"
    if all(c not in text for c in '.en'):
        text += '.0'
    return text


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = ' ' * (indent * (level + 1))
    end = ' ' * (indent * level)
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, complex):
        return _encode([obj.real, obj.imag], indent, level)
    if isinstance(obj, dict):
        if not obj:
            return '{}'
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return '{\n' + ',\n'.join(items) + '\n' + end + '}'
    if isinstance(obj, (list, tuple)):
        if not obj:
            return '[]'
        items = [f"{pad}{_encode(v, indent, level + 1)}" for v in obj]
        return '[\n' + ',\n'.join(items) + '\n' + end + ']'
    if hasattr(obj, 'to_dict'):
        return _encode(obj.to_dict(), indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON text with every float written as %.17g (non-finite floats become null)."""
    return _encode(obj, indent, 0) + '\n'


@dataclass
class ExperimentReport:
    """Metrics as (value, uncertainty) pairs and verdicts keyed by metric name."""
    name: str
    config: Dict[str, Any]
    anchor: str = ''
    metrics: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    verdicts: Dict[str, str] = field(default_factory=dict)
    details: Dict[str, Any] = field(default_factory=dict)
    artifacts: List[str] = field(default_factory=list)
    runtime_seconds: float = 0.0

    def metric(self, key: str, value: float, uncertainty: float = 0.0) -> None:
        self.metrics[key] = (float(value), float(uncertainty))

    def verdict(self, key: str, outcome) -> str:
        """Record a verdict on metric ``key``; ``outcome`` is a verdict string or a bool."""
        if key not in self.metrics:
            raise ValidationError(f"verdict {key!r} references no metric")
        if isinstance(outcome, (bool, np.bool_)):
            outcome = 'pass' if outcome else 'fail'
        if outcome not in VERDICTS:
            raise ValidationError(f"unknown verdict {outcome!r}")
        self.verdicts[key] = outcome
        return outcome

    @property
    def passed(self) -> bool:
        return bool(self.verdicts) and all(v == 'pass' for v in self.verdicts.values())

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            'schema_version': SCHEMA_VERSION,
            'name': self.name,
            'anchor': self.anchor,
            'config': self.config,
            'metrics': {k: {'value': v, 'uncertainty': u} for k, (v, u) in self.metrics.items()},
            'verdicts': dict(self.verdicts),
            'details': self.details,
            'artifacts': list(self.artifacts),
            'runtime_seconds': self.runtime_seconds,
        }

    def write(self, out_dir: str) -> str:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, f"{self.name}.json")
        with open(path, 'w') as fh:
            fh.write(dumps(self.to_dict()))
        logger.debug(f"Saved report to {path}")
        return path


def write_series(out_dir: str, name: str, series: str, columns: Sequence[str], rows) -> str:
    """Write ``<out>/<name>_<series>.csv`` with a header line and %.17g values."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{name}_{series}.csv")
    data = np.atleast_2d(np.asarray(rows, dtype=float))
    if data.size and data.shape[1] != len(columns):
        raise ValidationError(f"series {series!r} has {data.shape[1]} columns, header names {len(columns)}")
    np.savetxt(path, data, fmt='%.17g', delimiter=',', header=','.join(columns), comments='')
    return path
