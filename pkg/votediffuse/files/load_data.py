r"""Plain-text inputs: pair schedules, subject scripts, initial profiles"""
from typing import List, Tuple
import csv

from ..errors import ParseError, VoteDiffuseError
from ..pairs import PairSchedule
from ..profile import OpinionProfile, PairEvent, SubjectSet

_CYCLIC_HEADER = 'cyclic'


def _split_lines(text: str) -> List[str]:
    """
    Returns:
        list[str]: lines without line terminators; a final newline does not
            produce an extra empty line
    """

    lines = text.split('\n')
    if lines and lines[-1] == '':
        lines = lines[:-1]
    return [line.rstrip('\r') for line in lines]


def _strip_header(lines: List[str]) -> Tuple[bool, List[str], int]:
    """
    Returns:
        tuple[bool, list[str], int]: (cyclic flag, remaining lines, line offset)
    """

    if lines and lines[0].strip().lower() == _CYCLIC_HEADER:
        return (True, lines[1:], 1)
    return (False, lines, 0)


def parse_schedule(text: str, source: str = None) -> PairSchedule:
    """
    Parses a pair schedule: one pair "i j" (1-based) per line, optional first line
    "cyclic"; blank lines and lines starting with '#' are skipped

    Args:
        text (str): schedule text
        source (str, optional): filename used in error messages

    Returns:
        PairSchedule
    """

    cyclic, lines, offset = _strip_header(_split_lines(text))
    events = []
    for idx, line in enumerate(lines):
        lineno = idx + offset + 1
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue
        fields = stripped.split()
        if len(fields) != 2:
            raise ParseError('expected "i j", got `{}`'.format(stripped), lineno, source)
        try:
            i, j = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError('agent indices must be integers, got `{}`'.format(stripped),
                             lineno, source)
        if i < 1 or j < 1:
            raise ParseError('agent indices are 1-based, got `{}`'.format(stripped),
                             lineno, source)
        try:
            events.append(PairEvent(i - 1, j - 1))
        except VoteDiffuseError as exc:
            raise ParseError(str(exc), lineno, source)
    try:
        return PairSchedule(tuple(events), cyclic=cyclic)
    except VoteDiffuseError as exc:
        raise ParseError(str(exc), None, source)


def load_schedule(schedule_fn: str) -> PairSchedule:
    """
    Args:
        schedule_fn (str): filename/path of a schedule file

    Returns:
        PairSchedule
    """

    with open(schedule_fn, 'r') as sched_file:
        text = sched_file.read()
    return parse_schedule(text, schedule_fn)


def parse_subject_script(text: str, source: str = None) -> Tuple[List[SubjectSet], bool]:
    """
    Parses a subject script: one line per step holding space-separated 1-based
    candidate indices; a blank line is an empty subject set; optional first line
    "cyclic"

    Args:
        text (str): script text
        source (str, optional): filename used in error messages

    Returns:
        tuple[list[SubjectSet], bool]: (per-step subject sets, cyclic flag)
    """

    cyclic, lines, offset = _strip_header(_split_lines(text))
    script = []
    for idx, line in enumerate(lines):
        lineno = idx + offset + 1
        try:
            members = [int(f) for f in line.split()]
        except ValueError:
            raise ParseError('candidate indices must be integers, got `{}`'.format(line),
                             lineno, source)
        if any(j < 1 for j in members):
            raise ParseError('candidate indices are 1-based, got `{}`'.format(line),
                             lineno, source)
        script.append(SubjectSet(j - 1 for j in members))
    return (script, cyclic)


def load_subject_script(script_fn: str) -> Tuple[List[SubjectSet], bool]:
    """
    Args:
        script_fn (str): filename/path of a subject script

    Returns:
        tuple[list[SubjectSet], bool]: (per-step subject sets, cyclic flag)
    """

    with open(script_fn, 'r') as script_file:
        text = script_file.read()
    return parse_subject_script(text, script_fn)


def load_profile_csv(profile_fn: str) -> OpinionProfile:
    """
    Reads an opinion profile from CSV: one row per agent, one column per candidate

    Args:
        profile_fn (str): filename/path of the CSV file

    Returns:
        OpinionProfile
    """

    rows = []
    with open(profile_fn, 'r', newline='') as csv_file:
        reader = csv.reader(csv_file)
        for lineno, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                rows.append([float(cell) for cell in row])
            except ValueError:
                raise ParseError('non-numeric score in `{}`'.format(','.join(row)),
                                 lineno, profile_fn)
    try:
        return OpinionProfile(rows)
    except VoteDiffuseError as exc:
        raise ParseError(str(exc), None, profile_fn)
