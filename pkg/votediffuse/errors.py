r"""Exception hierarchy; every class maps onto one CLI exit code"""


class VoteDiffuseError(Exception):
    """
    Base class for all errors raised by votediffuse
    """


class DimensionError(VoteDiffuseError, IndexError):
    """
    Agent or candidate index outside the profile's dimensions
    """


class ParameterError(VoteDiffuseError, ValueError):
    """
    Invalid model parameter (k, p, eps, pair weights, opinion scores)
    """


class ScheduleExhaustedError(VoteDiffuseError, IndexError):
    """
    A finite pair schedule or subject script was asked for a step it does not hold
    """


class ConfigError(VoteDiffuseError, ValueError):

    def __init__(self, field: str, message: str):
        """
        Invalid simulation configuration

        Args:
            field (str): dotted name of the offending field, e.g. `subjects.p`
            message (str): human-readable reason
        """

        super().__init__('{}: {}'.format(field, message))
        self.field = field
        self.message = message


class ParseError(VoteDiffuseError, ValueError):

    def __init__(self, message: str, line: int = None, source: str = None):
        """
        Malformed text input

        Args:
            message (str): reason
            line (int, optional): 1-based line number of the offending line
            source (str, optional): filename the text came from
        """

        where = ''
        if source is not None:
            where += '{}:'.format(source)
        if line is not None:
            where += 'line {}: '.format(line)
        elif where:
            where += ' '
        super().__init__(where + message)
        self.line = line
        self.source = source


class CorruptTraceError(ParseError):
    """
    Trace whose events or snapshots disagree with its own dimensions
    """


class PolicyMismatchError(VoteDiffuseError, ValueError):
    """
    Analysis requested for a trace produced under a different subject policy
    """


class UnknownSuiteError(VoteDiffuseError, KeyError):
    """
    cmd_verify asked for a suite that does not exist
    """
