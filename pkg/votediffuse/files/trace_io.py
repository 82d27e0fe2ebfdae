r"""
Trace serialization

Text layout (1-based agents and candidates):

    votediffuse-trace 1
    [header]
    key=value                 config echo, then stopped_at and stop_reason
    [events]
    t i j |S| s1 s2 ...       one line per step
    [snapshot 0]
    x11,x12,...               one CSV row per agent
    [end]

Floats are written with repr(), so reading a trace back is lossless.
"""

from typing import Dict, List, TextIO
import numpy as np

from ..engine import STOP_REASONS, Trace
from ..errors import CorruptTraceError, ParseError, VoteDiffuseError
from ..profile import OpinionProfile

_MAGIC = 'votediffuse-trace 1'


def _format_row(row: np.ndarray) -> str:

    return ','.join(repr(float(x)) for x in row)


def _write(trace: Trace, out: TextIO):

    out.write(_MAGIC + '\n')
    out.write('[header]\n')
    for key, value in trace.config.items():
        out.write('{}={}\n'.format(key, value))
    out.write('stopped_at={}\n'.format(trace.stopped_at))
    out.write('stop_reason={}\n'.format(trace.stop_reason))
    out.write('[events]\n')
    for t in range(len(trace.pairs)):
        a, b = trace.pairs[t]
        cols = np.flatnonzero(trace.subject_mask[t]) + 1
        fields = [str(t), str(int(a) + 1), str(int(b) + 1), str(len(cols))]
        fields.extend(str(int(j)) for j in cols)
        out.write(' '.join(fields) + '\n')
    for step in sorted(trace.snapshots):
        out.write('[snapshot {}]\n'.format(step))
        for row in trace.snapshots[step].scores:
            out.write(_format_row(row) + '\n')
    out.write('[end]\n')


def write_trace(trace: Trace, trace_fn: str):
    """
    Writes the line-delimited text form of a trace; identical traces give
    byte-identical files

    Args:
        trace (Trace): trace to write
        trace_fn (str): filename/path
    """

    with open(trace_fn, 'w', newline='\n') as trace_file:
        _write(trace, trace_file)


def _parse_header(lines: List[str], pos: int, source: str) -> (Dict[str, str], int):

    header = {}
    while pos < len(lines) and not lines[pos].startswith('['):
        line = lines[pos]
        if line.strip():
            if '=' not in line:
                raise ParseError('expected key=value, got `{}`'.format(line), pos + 1, source)
            key, value = line.split('=', 1)
            header[key.strip()] = value.strip()
        pos += 1
    return (header, pos)


def _header_int(header: Dict[str, str], key: str, source: str) -> int:

    if key not in header:
        raise ParseError('header is missing `{}`'.format(key), None, source)
    try:
        return int(header[key])
    except ValueError:
        raise ParseError('header `{}` must be an integer, got `{}`'.format(key, header[key]),
                         None, source)


def parse_trace(text: str, source: str = None) -> Trace:
    """
    Parses the text form produced by `write_trace`

    Args:
        text (str): trace text
        source (str, optional): filename used in error messages

    Returns:
        Trace
    """

    lines = text.split('\n')
    if not lines or lines[0].strip() != _MAGIC:
        raise ParseError('not a votediffuse trace (missing `{}`)'.format(_MAGIC), 1, source)
    if len(lines) < 2 or lines[1].strip() != '[header]':
        raise ParseError('expected [header]', 2, source)
    header, pos = _parse_header(lines, 2, source)
    m = _header_int(header, 'm', source)
    n = _header_int(header, 'n', source)
    stopped_at = _header_int(header, 'stopped_at', source)
    stop_reason = header.pop('stop_reason', None)
    header.pop('stopped_at')
    if stop_reason not in STOP_REASONS:
        raise ParseError('unknown stop_reason `{}`'.format(stop_reason), None, source)
    if m < 2 or n < 1 or stopped_at < 0:
        raise CorruptTraceError('invalid dimensions m={}, n={}, stopped_at={}'
                                .format(m, n, stopped_at), None, source)

    if pos >= len(lines) or lines[pos].strip() != '[events]':
        raise ParseError('expected [events]', pos + 1, source)
    pos += 1
    pairs = np.empty((stopped_at, 2), dtype=np.int32)
    mask = np.zeros((stopped_at, n), dtype=bool)
    t = 0
    while pos < len(lines) and not lines[pos].startswith('['):
        line = lines[pos].strip()
        lineno = pos + 1
        pos += 1
        if not line:
            continue
        try:
            fields = [int(f) for f in line.split()]
        except ValueError:
            raise ParseError('event fields must be integers, got `{}`'.format(line),
                             lineno, source)
        if len(fields) < 4 or fields[3] != len(fields) - 4:
            raise CorruptTraceError('malformed event `{}`'.format(line), lineno, source)
        if fields[0] != t:
            raise CorruptTraceError('expected event {}, got {}'.format(t, fields[0]),
                                    lineno, source)
        if t >= stopped_at:
            raise CorruptTraceError('more events than stopped_at={}'.format(stopped_at),
                                    lineno, source)
        i, j = fields[1], fields[2]
        if not (1 <= i <= m and 1 <= j <= m) or i == j:
            raise CorruptTraceError('pair ({}, {}) invalid for {} agents'.format(i, j, m),
                                    lineno, source)
        pairs[t] = (min(i, j) - 1, max(i, j) - 1)
        for s in fields[4:]:
            if not 1 <= s <= n:
                raise CorruptTraceError('candidate {} out of range for {} candidates'
                                        .format(s, n), lineno, source)
            mask[t, s - 1] = True
        t += 1
    if t != stopped_at:
        raise CorruptTraceError('found {} events, header says {}'.format(t, stopped_at),
                                pos + 1, source)

    snapshots = {}
    while pos < len(lines):
        tag = lines[pos].strip()
        lineno = pos + 1
        pos += 1
        if tag == '[end]':
            break
        if not (tag.startswith('[snapshot ') and tag.endswith(']')):
            raise ParseError('expected [snapshot STEP] or [end], got `{}`'.format(tag),
                             lineno, source)
        try:
            step = int(tag[len('[snapshot '):-1])
        except ValueError:
            raise ParseError('snapshot step must be an integer, got `{}`'.format(tag),
                             lineno, source)
        rows = []
        for _ in range(m):
            if pos >= len(lines):
                raise CorruptTraceError('snapshot {} is truncated'.format(step), pos, source)
            try:
                row = [float(x) for x in lines[pos].split(',')]
            except ValueError:
                raise ParseError('non-numeric score in `{}`'.format(lines[pos]), pos + 1, source)
            if len(row) != n:
                raise CorruptTraceError('snapshot row has {} scores, expected {}'
                                        .format(len(row), n), pos + 1, source)
            rows.append(row)
            pos += 1
        try:
            snapshots[step] = OpinionProfile(rows)
        except VoteDiffuseError as exc:
            raise CorruptTraceError(str(exc), lineno, source)
    else:
        raise ParseError('missing [end]', pos, source)
    for step in (0, stopped_at):
        if step not in snapshots:
            raise CorruptTraceError('missing snapshot at step {}'.format(step), None, source)

    return Trace(
        config=header,
        initial_profile=snapshots[0],
        pairs=pairs,
        subject_mask=mask,
        snapshots=snapshots,
        final_profile=snapshots[stopped_at],
        stopped_at=stopped_at,
        stop_reason=stop_reason
    )


def load_trace(trace_fn: str) -> Trace:
    """
    Loads a trace written by `Trace.save`; the format follows the extension

    Args:
        trace_fn (str): filename/path of a `.trace` or `.npz` file

    Returns:
        Trace
    """

    if trace_fn.endswith('.npz'):
        return load_trace_npz(trace_fn)
    with open(trace_fn, 'r') as trace_file:
        text = trace_file.read()
    return parse_trace(text, trace_fn)


def write_trace_npz(trace: Trace, trace_fn: str):
    """
    Compact binary variant: numpy arrays in a compressed .npz archive

    Args:
        trace (Trace): trace to write
        trace_fn (str): filename/path ending in `.npz`
    """

    header = dict(trace.config)
    header['stopped_at'] = str(trace.stopped_at)
    header['stop_reason'] = trace.stop_reason
    steps = sorted(trace.snapshots)
    np.savez_compressed(
        trace_fn,
        header=np.array(['{}={}'.format(k, v) for k, v in header.items()]),
        pairs=trace.pairs,
        subject_mask=trace.subject_mask,
        snapshot_steps=np.array(steps, dtype=np.int64),
        snapshot_data=np.stack([trace.snapshots[s].scores for s in steps])
    )


def load_trace_npz(trace_fn: str) -> Trace:
    """
    Args:
        trace_fn (str): filename/path of a trace written by `write_trace_npz`

    Returns:
        Trace
    """

    with np.load(trace_fn, allow_pickle=False) as data:
        try:
            header = dict(str(kv).split('=', 1) for kv in data['header'])
            pairs = np.array(data['pairs'], dtype=np.int32)
            mask = np.array(data['subject_mask'], dtype=bool)
            steps = [int(s) for s in data['snapshot_steps']]
            frames = np.array(data['snapshot_data'], dtype=np.float64)
        except (KeyError, ValueError) as exc:
            raise CorruptTraceError('incomplete trace archive: {}'.format(exc), None, trace_fn)
    stopped_at = int(header.pop('stopped_at'))
    stop_reason = header.pop('stop_reason')
    snapshots = {s: OpinionProfile(f) for s, f in zip(steps, frames)}
    if 0 not in snapshots or stopped_at not in snapshots or len(pairs) != stopped_at:
        raise CorruptTraceError('archive is inconsistent with stopped_at={}'.format(stopped_at),
                                None, trace_fn)
    return Trace(
        config=header,
        initial_profile=snapshots[0],
        pairs=pairs.reshape(-1, 2),
        subject_mask=mask.reshape(stopped_at, frames.shape[2]),
        snapshots=snapshots,
        final_profile=snapshots[stopped_at],
        stopped_at=stopped_at,
        stop_reason=stop_reason
    )
