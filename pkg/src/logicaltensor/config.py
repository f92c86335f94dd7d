'''
Package-wide numeric constants and environment lookups.
'''
import os
from typing import Final, Mapping, Optional

from .errors import SpecFileError

# Amplitudes at or below this magnitude are not stored.
ZERO_TOL: Final[float] = 1e-12

# Slack for equality assertions between computed operators.
EQ_TOL: Final[float] = 1e-10

# Largest enumerable basis, (|Σ|+1)^|V| graphs.
UNIVERSE_CAP: Final[int] = 2 ** 20

# Largest dimension the block decomposition holds as dense matrices.
DENSE_DIM_CAP: Final[int] = 4096

# Random operators drawn per operator law.
DEFAULT_SAMPLES: Final[int] = 100

DEFAULT_SEED: Final[int] = 20240601

SEED_ENV_VAR: Final[str] = 'LOGICALTENSOR_SEED'

REPORT_SCHEMA: Final[str] = 'logicaltensor.suite-report/1'

SIGNIFICANT_DIGITS: Final[int] = 12


def default_seed(environ: Optional[Mapping[str, str]] = None) -> int:
    '''
    Seed used when none is given explicitly.

    Parameters
    ----------
    environ : Mapping[str, str], optional
        Environment to read from. Defaults to ``os.environ``.

    Returns
    -------
    int
        The value of ``LOGICALTENSOR_SEED`` when set, ``DEFAULT_SEED`` otherwise.
    '''
    env = os.environ if environ is None else environ
    raw = env.get(SEED_ENV_VAR)
    if raw is None or raw.strip() == '':
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise SpecFileError(f'{SEED_ENV_VAR} must be an integer, got {raw!r}') from None


def format_number(x: float) -> str:
    '''Render a real number with the report precision.'''
    return f'{x:.{SIGNIFICANT_DIGITS}g}'
