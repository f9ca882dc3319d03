"""
Run configuration: YAML defaults, then SU11_* environment variables (a .env
file is read when present), then command-line flags.
"""

import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

import yaml
from dotenv import load_dotenv

from errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).parent / 'verify-config.yaml'
FORMATS = ('json', 'csv', 'text')
MIN_DIM = 8

ENV_VARS = {
    'SU11_DIM': ('dim', int),
    'SU11_TOL': ('tolerance', float),
    'SU11_FORMAT': ('format', str),
    'SU11_SEED': ('seed', int),
    'SU11_OUT': ('out', str),
    'SU11_LOG_LEVEL': ('log_level', str),
    'SU11_PUSHGATEWAY': ('pushgateway', str),
}


def parse_complex(text: str) -> complex:
    """'RE+IMi' with either part optional: '-0.5+1i', '2i', '-i', '3'"""
    text = str(text).strip().replace(' ', '')
    if text.endswith('i'):
        text = text[:-1] + 'j'
    try:
        return complex(text)
    except ValueError as e:
        raise ConfigError(f"Cannot parse complex value '{text}', expected RE+IMi") from e


def parse_scalar(value: Any):
    """Exact Fraction for rational input ('1/2', 0.5, 3), complex otherwise"""
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        exact = Fraction(value)
        return exact if exact.denominator <= 2 else value
    text = str(value).strip()
    try:
        return Fraction(text)
    except ValueError:
        pass
    z = parse_complex(text)
    return parse_scalar(z.real) if z.imag == 0 else z


def parse_range(text: str) -> List[int]:
    """Inclusive integer range '0..3' or '-3:3', or a single integer"""
    text = str(text).strip()
    for sep in ('..', ':'):
        head, found, tail = text.rpartition(sep) if sep == ':' else text.partition(sep)
        if found and head:
            try:
                lo, hi = int(head), int(tail)
            except ValueError as e:
                raise ConfigError(f"Bad range '{text}': {e}") from e
            if hi < lo:
                raise ConfigError(f"Empty range '{text}'")
            return list(range(lo, hi + 1))
    try:
        return [int(text)]
    except ValueError as e:
        raise ConfigError(f"Bad integer or range '{text}'") from e


def parse_float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in str(text).split(',') if v.strip()]
    except ValueError as e:
        raise ConfigError(f"Bad list of numbers '{text}': {e}") from e


def parse_cartan(text: str) -> Tuple[float, float, float]:
    """'phi,alpha,psi'"""
    values = parse_float_list(text)
    if len(values) != 3:
        raise ConfigError(f"Cartan angles need three values phi,alpha,psi, got '{text}'")
    return values[0], values[1], values[2]


def _normalize_grids(grids: Mapping) -> Dict[str, Dict]:
    normalized = {}
    for suite, grid in (grids or {}).items():
        grid = dict(grid or {})
        if 'labels' in grid:
            grid['labels'] = [(parse_scalar(tau), parse_scalar(eps)) for tau, eps in grid['labels']]
        if 'pairs' in grid:
            grid['pairs'] = [tuple(parse_scalar(v) for v in pair) for pair in grid['pairs']]
        normalized[suite] = grid
    return normalized


@dataclass(frozen=True)
class RunConfig:
    dim: int = 32
    tolerance: float = 1e-9
    format: str = 'json'
    seed: int = 0
    out: Optional[str] = None
    log_level: str = 'INFO'
    pushgateway: Optional[str] = None
    verifier: Dict[str, Any] = field(default_factory=dict)
    grids: Dict[str, Dict] = field(default_factory=dict)
    thresholds: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < MIN_DIM:
            raise ConfigError(f"Truncation dim must be an integer >= {MIN_DIM}, got {self.dim}")
        if not self.tolerance > 0:
            raise ConfigError(f"Tolerance must be positive, got {self.tolerance}")
        if self.format not in FORMATS:
            raise ConfigError(f"Output format must be one of {FORMATS}, got '{self.format}'")
        if not isinstance(logging.getLevelName(self.log_level), int):
            raise ConfigError(f"Unknown log level '{self.log_level}'")

    def runner_config(self) -> Dict[str, Any]:
        """The dict handed to SuiteRunner"""
        return {
            'dim': self.dim,
            'seed': self.seed,
            'grids': self.grids,
            'verifier': {**self.verifier, 'tolerance': self.tolerance},
        }


def load_yaml(path: Optional[str] = None) -> Dict[str, Any]:
    path = Path(path) if path else DEFAULT_CONFIG_PATH
    if not path.exists():
        if path != DEFAULT_CONFIG_PATH:
            raise ConfigError(f"Config file not found: {path}")
        return {}
    try:
        with open(path, 'r') as f:
            return yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in {path}: {e}") from e


def env_overrides(environ: Optional[Mapping[str, str]] = None) -> Dict[str, Any]:
    if environ is None:
        load_dotenv()
        environ = os.environ
    overrides = {}
    for name, (key, cast) in ENV_VARS.items():
        if environ.get(name):
            try:
                overrides[key] = cast(environ[name])
            except ValueError as e:
                raise ConfigError(f"Bad value for {name}: {e}") from e
    return overrides


def build_run_config(config_path: Optional[str] = None, flags: Optional[Mapping[str, Any]] = None,
                     grid_overrides: Optional[Mapping[str, Dict]] = None,
                     environ: Optional[Mapping[str, str]] = None) -> RunConfig:
    """
    Merge the YAML file, SU11_* environment variables and explicit flags (None
    flags are ignored). An explicit tolerance replaces the per-identity
    tolerances from the file, except the exact (zero) ones.
    """
    data = load_yaml(config_path)
    run = dict(data.get('run') or {})
    verifier = dict(data.get('verifier') or {})
    explicit = {**env_overrides(environ), **{k: v for k, v in (flags or {}).items() if v is not None}}
    run.update(explicit)
    if 'tolerance' in explicit:
        verifier['tolerances'] = {k: v for k, v in (verifier.get('tolerances') or {}).items() if v == 0}

    grids = _normalize_grids(data.get('grids'))
    for suite, grid in (grid_overrides or {}).items():
        grids[suite] = {**grids.get(suite, {}), **grid}

    metrics = data.get('metrics') or {}
    try:
        config = RunConfig(
            dim=int(run.get('dim', 32)),
            tolerance=float(run.get('tolerance', 1e-9)),
            format=str(run.get('format', 'json')),
            seed=int(run.get('seed', 0)),
            out=run.get('out'),
            log_level=str(run.get('log_level', 'INFO')).upper(),
            pushgateway=run.get('pushgateway') or metrics.get('pushgateway'),
            verifier=verifier,
            grids=grids,
            thresholds=data.get('thresholds') or {},
        )
    except (TypeError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"Invalid run configuration: {e}") from e
    logger.debug(f"Run configuration: dim={config.dim} tolerance={config.tolerance} format={config.format}")
    return config
