r"""Analysis reports: human-readable text and machine-readable CSV"""
from typing import List, Optional
import csv
import numpy as np

from ..analysis.certificates import TopKCertificate
from ..analysis.consensus import ConsensusReport, ConsensusVerification
from ..engine import Trace


def _members_str(members) -> str:

    return ' '.join(str(a + 1) for a in members)


def format_report(trace: Trace, report: ConsensusReport, verification: ConsensusVerification,
                  drift: float, certificate: Optional[TopKCertificate] = None) -> str:
    """
    Text summary of one analyzed trace; agents and candidates are 1-based

    Args:
        trace (Trace): analyzed trace
        report (ConsensusReport): consensus classes of the final profile
        verification (ConsensusVerification): component consensus checks
        drift (float): conservation drift
        certificate (TopKCertificate, optional): top-k' certificate, if computed

    Returns:
        str
    """

    lines = [
        'Trace: m={} n={} steps={} stop_reason={}'.format(
            trace.m, trace.n, trace.stopped_at, trace.stop_reason),
        'Conservation drift: {}'.format(repr(drift)),
        'Component consensus (tol={}, min_count={}): {}'.format(
            verification.tol, verification.min_count,
            'PASS' if verification.passed else 'FAIL'),
    ]
    for j in range(trace.n):
        comps = verification.components(j)
        lines.append('  candidate {}: {} component(s), {}'.format(
            j + 1, len(comps), 'PASS' if verification.candidate_passed(j) else 'FAIL'))
    for check in verification.failures:
        lines.append('  failure: candidate {} component [{}] spread {}'.format(
            check.candidate + 1, _members_str(check.component), repr(check.spread)))
    lines.append('Consensus classes (tol={}):'.format(report.tol))
    for j in range(trace.n):
        classes = ['[{}]={:.12g}'.format(_members_str(c.members), c.value)
                   for c in report.classes_for(j)]
        lines.append('  candidate {}: {}'.format(j + 1, ' '.join(classes)))
    if certificate is not None:
        if not certificate.applicable:
            lines.append('Top-k certificate: not applicable ({})'.format(certificate.diagnostic))
        else:
            lines.append('Top-k certificate: k={} k\'={} alpha_hat={}'.format(
                certificate.k, certificate.k_prime, certificate.alpha_hat))
            lines.append('  aggregate ranking: {}'.format(
                _members_str(certificate.aggregate_ranking)))
            lines.append('  consensual candidates: {}'.format(
                _members_str(sorted(certificate.consensual_candidates))))
            if certificate.alpha_spread is not None:
                lines.append('  pair alpha spread: {}'.format(certificate.alpha_spread))
            if certificate.diagnostic:
                lines.append('  diagnostic: {}'.format(certificate.diagnostic))
    return '\n'.join(lines) + '\n'


def write_text_report(report_fn: str, trace: Trace, report: ConsensusReport,
                      verification: ConsensusVerification, drift: float,
                      certificate: Optional[TopKCertificate] = None):

    with open(report_fn, 'w') as report_file:
        report_file.write(format_report(trace, report, verification, drift, certificate))


def write_component_csv(csv_fn: str, verification: ConsensusVerification):
    """
    One row per (candidate, component): spread, class value, pass/fail
    """

    with open(csv_fn, 'w', newline='') as csv_file:
        writer = csv.writer(csv_file)
        writer.writerow(['candidate', 'component', 'spread', 'value', 'result'])
        for c in verification.checks:
            writer.writerow([c.candidate + 1, _members_str(c.component), repr(c.spread),
                             repr(c.value), 'PASS' if c.passed else 'FAIL'])


def write_consensus_csv(csv_fn: str, report: ConsensusReport):

    with open(csv_fn, 'w', newline='') as csv_file:
        writer = csv.writer(csv_file)
        writer.writerow(['candidate', 'class', 'members', 'value', 'spread'])
        for j in sorted(report.classes):
            for idx, c in enumerate(report.classes_for(j)):
                writer.writerow([j + 1, idx + 1, _members_str(c.members), repr(c.value),
                                 repr(c.spread)])


def spread_series(trace: Trace) -> List[List]:
    """
    Returns:
        list[list]: [step, column (1-based), spread] for every snapshot and column
    """

    rows = []
    for step in sorted(trace.snapshots):
        scores = trace.snapshots[step].scores
        spread = np.ptp(scores, axis=0)
        rows.extend([step, j + 1, float(s)] for j, s in enumerate(spread))
    return rows


def write_spread_csv(csv_fn: str, trace: Trace):
    """
    Plot data: per-column spread vs. step, taken from the trace's snapshots
    """

    with open(csv_fn, 'w', newline='') as csv_file:
        writer = csv.writer(csv_file)
        writer.writerow(['step', 'column', 'spread'])
        for step, column, spread in spread_series(trace):
            writer.writerow([step, column, repr(spread)])
