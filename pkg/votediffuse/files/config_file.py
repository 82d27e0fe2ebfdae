r"""
Simulation config files: flat key=value text with sectioned policy blocks

    [simulation]
    m = 10
    n = 3
    max_steps = 100000
    seed = 7

    [initial]
    generator = gaussian        # uniform | gaussian | explicit
    seed = 1
    rows = 0 1; 0.5 0.5         # explicit rows (or: file = profile.csv)

    [pairs]
    kind = uniform              # uniform | point_mass | edges | schedule |
                                # round_robin | sweep | blocks
    pair = 1 2                  # point_mass
    edges = 1-2, 2-3            # edges
    schedule = pairs.txt        # schedule (relative to the config file)
    burst = 1                   # sweep
    blocks = 1 2 3; 4 5 6       # blocks

    [subjects]
    kind = top_k                # full | top_k | binomial | hk | scripted
    k = 2
    p = 0.5
    eps = 0.1
    script = subjects.txt       # scripted (relative to the config file)

Agent and candidate indices are 1-based.
"""

from typing import Dict, List, Literal, Optional
from configparser import ConfigParser, Error as ConfigParserError
import logging
import os
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..engine import SimulationConfig
from ..errors import ConfigError, ParseError, VoteDiffuseError
from ..pairs import PairDistribution, PairSchedule
from ..profile import OpinionProfile, PairEvent
from ..subjects import SubjectPolicy
from .load_data import load_profile_csv, load_schedule, load_subject_script

logger = logging.getLogger(__name__)

DEFAULTS = {
    'simulation': {
        'seed': 0,
        'snapshot_every': 1000,
        'convergence_tol': 1e-12,
        'convergence_window': 1000
    },
    'initial': {
        'generator': 'uniform',
        'seed': 0
    },
    'pairs': {
        'kind': 'uniform',
        'burst': 1
    },
    'subjects': {
        'kind': 'full'
    }
}

SECTIONS = ('simulation', 'initial', 'pairs', 'subjects')


class _Section(BaseModel):

    model_config = ConfigDict(extra='forbid', frozen=True)


class SimulationSection(_Section):

    m: int = Field(ge=2)
    n: int = Field(ge=1)
    max_steps: int = Field(ge=1)
    seed: int = Field(DEFAULTS['simulation']['seed'], ge=0, lt=2 ** 64)
    snapshot_every: int = Field(DEFAULTS['simulation']['snapshot_every'], ge=1)
    convergence_tol: float = Field(DEFAULTS['simulation']['convergence_tol'], gt=0.0)
    convergence_window: int = Field(DEFAULTS['simulation']['convergence_window'], ge=1)
    convergence_mode: Optional[Literal['consensus', 'quiescence', 'off']] = None


class InitialSection(_Section):

    generator: Literal['uniform', 'gaussian', 'explicit'] = DEFAULTS['initial']['generator']
    seed: int = Field(DEFAULTS['initial']['seed'], ge=0, lt=2 ** 64)
    rows: Optional[str] = None
    file: Optional[str] = None


class PairsSection(_Section):

    kind: Literal['uniform', 'point_mass', 'edges', 'schedule', 'round_robin', 'sweep',
                  'blocks'] = DEFAULTS['pairs']['kind']
    pair: Optional[str] = None
    edges: Optional[str] = None
    schedule: Optional[str] = None
    burst: int = Field(DEFAULTS['pairs']['burst'], ge=1)
    blocks: Optional[str] = None


class SubjectsSection(_Section):

    kind: Literal['full', 'top_k', 'binomial', 'hk', 'scripted'] = DEFAULTS['subjects']['kind']
    k: Optional[int] = Field(None, ge=1)
    p: Optional[float] = None
    eps: Optional[float] = None
    script: Optional[str] = None

    @field_validator('p')
    @classmethod
    def _check_p(cls, p: Optional[float]) -> Optional[float]:

        if p is not None and not 0.0 < p <= 1.0:
            raise ValueError('p must be in (0,1]')
        return p

    @field_validator('eps')
    @classmethod
    def _check_eps(cls, eps: Optional[float]) -> Optional[float]:

        if eps is not None and not eps >= 0.0:
            raise ValueError('eps must be >= 0')
        return eps


def _validate(model: type, section: str, values: Dict[str, str]) -> BaseModel:
    """
    Validates one section, reporting the first violation as `section.key: message`
    """

    try:
        return model(**values)
    except ValidationError as exc:
        err = exc.errors()[0]
        key = '.'.join(str(x) for x in err['loc'])
        field = '{}.{}'.format(section, key) if key else section
        raise ConfigError(field, err['msg'].replace('Value error, ', ''))


def _require(value: Optional[str], field: str, kind: str) -> str:

    if value is None or not value.strip():
        raise ConfigError(field, 'required when kind = {}'.format(kind))
    return value


def _parse_indices(text: str, field: str, upper: int) -> List[int]:
    """
    Space/comma separated 1-based indices -> 0-based ints
    """

    try:
        idx = [int(tok) for tok in text.replace(',', ' ').split()]
    except ValueError:
        raise ConfigError(field, 'expected integers, got `{}`'.format(text))
    for i in idx:
        if not 1 <= i <= upper:
            raise ConfigError(field, 'index {} out of range [1, {}]'.format(i, upper))
    return [i - 1 for i in idx]


def _resolve(path: str, base_dir: str) -> str:

    return path if os.path.isabs(path) else os.path.join(base_dir, path)


def _initial_profile(section: InitialSection, base_dir: str) -> Optional[OpinionProfile]:

    if section.generator != 'explicit':
        return None
    if section.file is not None:
        return load_profile_csv(_resolve(section.file, base_dir))
    rows = _require(section.rows, 'initial.rows', 'explicit')
    try:
        values = [[float(x) for x in row.replace(',', ' ').split()]
                  for row in rows.split(';') if row.strip()]
        return OpinionProfile(values)
    except (ValueError, VoteDiffuseError) as exc:
        raise ConfigError('initial.rows', str(exc))


def _pair_source(section: PairsSection, m: int, base_dir: str):

    kind = section.kind
    try:
        if kind == 'uniform':
            return PairDistribution.uniform(m)
        if kind == 'point_mass':
            idx = _parse_indices(_require(section.pair, 'pairs.pair', kind), 'pairs.pair', m)
            if len(idx) != 2:
                raise ConfigError('pairs.pair', 'expected two agents, got {}'.format(len(idx)))
            return PairDistribution.point_mass(m, idx[0], idx[1])
        if kind == 'edges':
            edges = []
            for tok in _require(section.edges, 'pairs.edges', kind).split(','):
                idx = _parse_indices(tok.replace('-', ' '), 'pairs.edges', m)
                if len(idx) != 2:
                    raise ConfigError('pairs.edges', 'expected `i-j`, got `{}`'
                                      .format(tok.strip()))
                edges.append(PairEvent(idx[0], idx[1]))
            return PairDistribution.from_edges(m, edges)
        if kind == 'schedule':
            return load_schedule(_resolve(_require(section.schedule, 'pairs.schedule', kind),
                                          base_dir))
        if kind == 'round_robin':
            return PairSchedule.round_robin(m)
        if kind == 'sweep':
            return PairSchedule.path_sweep(m, section.burst)
        blocks = [_parse_indices(b, 'pairs.blocks', m)
                  for b in _require(section.blocks, 'pairs.blocks', kind).split(';')
                  if b.strip()]
        return PairSchedule.blocks(blocks)
    except (ConfigError, ParseError):
        raise
    except VoteDiffuseError as exc:
        raise ConfigError('pairs.' + kind, str(exc))


def _subject_policy(section: SubjectsSection, base_dir: str) -> SubjectPolicy:

    kind = section.kind
    if kind == 'full':
        return SubjectPolicy.full()
    if kind == 'top_k':
        if section.k is None:
            raise ConfigError('subjects.k', 'required when kind = top_k')
        return SubjectPolicy.top_k(section.k)
    if kind == 'binomial':
        if section.p is None:
            raise ConfigError('subjects.p', 'required when kind = binomial')
        return SubjectPolicy.binomial(section.p)
    if kind == 'hk':
        if section.eps is None:
            raise ConfigError('subjects.eps', 'required when kind = hk')
        return SubjectPolicy.hk(section.eps)
    script, cyclic = load_subject_script(
        _resolve(_require(section.script, 'subjects.script', kind), base_dir)
    )
    return SubjectPolicy.scripted(script, cyclic=cyclic)


def parse_config(text: str, base_dir: str = '.', seed: int = None,
                 source: str = None) -> SimulationConfig:
    """
    Parses config-file text into a validated SimulationConfig

    Args:
        text (str): config file contents
        base_dir (str, optional): directory relative paths are resolved against
        seed (int, optional): overrides `[simulation] seed` when supplied
        source (str, optional): filename used in error messages

    Returns:
        SimulationConfig
    """

    parser = ConfigParser(inline_comment_prefixes=('#',), interpolation=None)
    try:
        parser.read_string(text, source=source or '<config>')
    except ConfigParserError as exc:
        raise ParseError(str(exc).splitlines()[0], getattr(exc, 'lineno', None), source)
    for name in parser.sections():
        if name not in SECTIONS:
            raise ConfigError(name, 'unknown section, expected one of {}'.format(SECTIONS))
    if not parser.has_section('simulation'):
        raise ConfigError('simulation', 'section is required')

    def values(name: str) -> Dict[str, str]:
        return dict(parser.items(name)) if parser.has_section(name) else {}

    sim = values('simulation')
    if seed is not None:
        sim['seed'] = str(seed)
    sim = _validate(SimulationSection, 'simulation', sim)
    initial = _validate(InitialSection, 'initial', values('initial'))
    pairs = _validate(PairsSection, 'pairs', values('pairs'))
    subjects = _validate(SubjectsSection, 'subjects', values('subjects'))

    kwargs = sim.model_dump(exclude_none=True)
    profile = _initial_profile(initial, base_dir)
    if profile is None:
        kwargs['initial_generator'] = initial.generator
        kwargs['initial_seed'] = initial.seed
    else:
        kwargs['initial_profile'] = profile
    kwargs['pair_source'] = _pair_source(pairs, sim.m, base_dir)
    kwargs['subject_policy'] = _subject_policy(subjects, base_dir)
    config = SimulationConfig.create(**kwargs)
    logger.debug('Loaded config: {}'.format(config.echo()))
    return config


def load_config(config_fn: str, seed: int = None) -> SimulationConfig:
    """
    Loads a config file; relative schedule/script/profile paths are resolved
    against the config file's directory

    Args:
        config_fn (str): filename/path of the config file
        seed (int, optional): overrides `[simulation] seed` when supplied

    Returns:
        SimulationConfig
    """

    with open(config_fn, 'r') as config_file:
        text = config_file.read()
    return parse_config(text, os.path.dirname(os.path.abspath(config_fn)), seed, config_fn)
