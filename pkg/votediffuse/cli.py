r"""
Command-line front end

    votediffuse simulate --config run.ini --seed 7 --out run.trace
    votediffuse analyze run.trace --tol 1e-8 --min-count 10 --out reports/
    votediffuse verify --suite gossip-consensus --seeds 10

Exit codes: 0 success, 2 validation error, 3 I/O or parse error, 4 verification
failure.
"""

from typing import List, Optional, Sequence
from argparse import ArgumentParser, Namespace
from dataclasses import dataclass
import logging
import os
import sys

from .analysis import conservation_audit, consensus_report, topk_certificate,\
    verify_component_consensus
from .engine import run
from .errors import ConfigError, ParseError, VoteDiffuseError
from .files import load_config, load_trace, write_component_csv, write_consensus_csv,\
    write_spread_csv, write_text_report, format_report
from .logger import setup_logging
from .suites import SUITES, run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_VERIFICATION = 4

_DEFAULT_TOL = 1e-8
_DEFAULT_MIN_COUNT = 10


@dataclass(frozen=True)
class RunManifest:
    """
    What one CLI invocation reads, writes and runs
    """

    config_path: Optional[str] = None
    output_path: Optional[str] = None
    seeds: Sequence[int] = ()
    suite: Optional[str] = None

    def __post_init__(self):

        seeds = list(self.seeds)
        if self.suite is not None and not seeds:
            raise ConfigError('seeds', 'at least one seed is required')
        if len(set(seeds)) != len(seeds):
            raise ConfigError('seeds', 'seeds must be distinct')
        if any(s < 0 or s >= 2 ** 64 for s in seeds):
            raise ConfigError('seed', 'seeds must be in [0, 2^64)')
        if self.output_path is not None:
            parent = os.path.dirname(os.path.abspath(self.output_path))
            if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
                raise OSError('Output location is not writable: {}'.format(self.output_path))


def cmd_simulate(args: Namespace) -> int:
    """
    Runs one configured simulation and writes its trace
    """

    seeds = [args.seed] if args.seed is not None else []
    manifest = RunManifest(config_path=args.config, output_path=args.out, seeds=seeds)
    config = load_config(manifest.config_path, seed=args.seed)
    trace = run(config, verbose=args.verbose)
    trace.save(manifest.output_path)
    print('stop_reason: {}'.format(trace.stop_reason))
    print('steps: {}'.format(trace.stopped_at))
    print('conservation drift: {}'.format(repr(conservation_audit(trace))))
    return EXIT_OK


def cmd_analyze(args: Namespace) -> int:
    """
    Analyzes a trace file and writes text/CSV reports and spread plot data
    """

    trace = load_trace(args.trace)
    report = consensus_report(trace.final_profile, args.tol)
    verification = verify_component_consensus(trace, args.tol, args.min_count)
    drift = conservation_audit(trace)
    certificate = None
    if trace.subject_kind == 'top_k':
        certificate = topk_certificate(trace, args.tol, args.min_count)

    out_dir = args.out or '.'
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.splitext(os.path.basename(args.trace))[0]
    write_text_report(os.path.join(out_dir, stem + '.report.txt'), trace, report,
                      verification, drift, certificate)
    write_component_csv(os.path.join(out_dir, stem + '.components.csv'), verification)
    write_consensus_csv(os.path.join(out_dir, stem + '.classes.csv'), report)
    write_spread_csv(os.path.join(out_dir, stem + '.spread.csv'), trace)
    sys.stdout.write(format_report(trace, report, verification, drift, certificate))
    return EXIT_OK


def cmd_verify(args: Namespace) -> int:
    """
    Runs a named acceptance suite over `--seeds` consecutive seeds starting at
    `--seed` (default 0)
    """

    if args.seeds < 1:
        raise ConfigError('seeds', 'must be >= 1, got {}'.format(args.seeds))
    base = args.seed if args.seed is not None else 0
    manifest = RunManifest(seeds=range(base, base + args.seeds), suite=args.suite)
    result = run_suite(manifest.suite, manifest.seeds)
    print(result.summary())
    return EXIT_OK if result.passed else EXIT_VERIFICATION


def _parser() -> ArgumentParser:

    parser = ArgumentParser(prog='votediffuse',
                            description='Voting diffusion simulator and verification harness')
    parser.add_argument('--log-level', default='WARNING',
                        help='logging level; default = WARNING')
    sub = parser.add_subparsers(dest='command', required=True)

    sim = sub.add_parser('simulate', help='run a configured simulation, write its trace')
    sim.add_argument('--config', required=True, help='config file (INI sections)')
    sim.add_argument('--seed', type=int, default=None, help='overrides the config seed')
    sim.add_argument('--out', required=True, help='trace file (.trace or .npz)')
    sim.add_argument('--verbose', type=int, default=0,
                     help='log progress every this many steps; default = 0 (off)')
    sim.set_defaults(func=cmd_simulate)

    ana = sub.add_parser('analyze', help='analyze a trace, write reports')
    ana.add_argument('trace', help='trace file written by `simulate`')
    ana.add_argument('--tol', type=float, default=_DEFAULT_TOL,
                     help='consensus tolerance; default = 1e-8')
    ana.add_argument('--min-count', type=int, default=_DEFAULT_MIN_COUNT,
                     help='discussion-count threshold; default = 10')
    ana.add_argument('--out', default=None, help='report directory; default = .')
    ana.set_defaults(func=cmd_analyze)

    ver = sub.add_parser('verify', help='run an acceptance suite')
    ver.add_argument('--suite', required=True,
                     help='one of: {}'.format(', '.join(sorted(SUITES))))
    ver.add_argument('--seeds', type=int, default=10, help='number of seeds; default = 10')
    ver.add_argument('--seed', type=int, default=None, help='first seed; default = 0')
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv: List[str] = None) -> int:
    """
    Entry point of the `votediffuse` console script

    Returns:
        int: process exit code
    """

    args = _parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        return args.func(args)
    except (OSError, ParseError) as exc:
        logger.error(str(exc))
        return EXIT_IO
    except (VoteDiffuseError, ValueError) as exc:
        logger.error(str(exc))
        return EXIT_VALIDATION


if __name__ == '__main__':
    sys.exit(main())
