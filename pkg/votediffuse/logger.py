r"""Logging setup for the command-line front end"""
import logging

_FORMAT = '%(asctime)s | %(levelname)s | %(name)s | %(message)s'


def setup_logging(level: str = 'INFO') -> logging.Logger:
    """
    Attaches a single stream handler to the package logger; library modules only
    create child loggers and never configure handlers themselves

    Args:
        level (str, optional): logging level name; default = 'INFO'

    Returns:
        logging.Logger: the `votediffuse` logger
    """

    logger = logging.getLogger('votediffuse')
    logger.setLevel(level.upper())
    if not any(getattr(h, '_votediffuse', False) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(_FORMAT))
        handler._votediffuse = True
        logger.addHandler(handler)
    return logger
