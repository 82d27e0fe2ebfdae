r"""Simulation step-loop callback objects/functions"""
from typing import List, Optional, Sequence, Union
import logging
import numpy as np

from .profile import OpinionProfile, _as_scores

logger = logging.getLogger(__name__)


class CallbackOperator(object):
    """
    CallbackOperator: executes individual callback steps at each step
    """

    def __init__(self):

        self.cb = []

    def add_cb(self, cb):

        self.cb.append(cb)

    def on_run_begin(self, scores):

        for cb in self.cb:
            if not cb.on_run_begin(scores):
                return False
        return True

    def on_run_end(self, scores):

        for cb in self.cb:
            if not cb.on_run_end(scores):
                return False
        return True

    def on_step_begin(self, t):

        for cb in self.cb:
            if not cb.on_step_begin(t):
                return False
        return True

    def on_step_end(self, t, scores):

        for cb in self.cb:
            if not cb.on_step_end(t, scores):
                return False
        return True


class Callback(object):
    """
    Base Callback object; a hook returning False halts the run
    """

    def __init__(self): pass
    def on_run_begin(self, scores): return True
    def on_run_end(self, scores): return True
    def on_step_begin(self, t): return True
    def on_step_end(self, t, scores): return True


def has_converged(history: Sequence[Union[OpinionProfile, np.ndarray]], tol: float,
                  components: Optional[Sequence[Sequence[int]]] = None) -> bool:
    """
    Finite-horizon stand-in for the almost-sure limit: the most recent profile has
    within-component spread <= tol on every column, and it differs from every
    earlier profile of `history` by <= tol in max-norm

    Args:
        history (Sequence[OpinionProfile]): profiles over the convergence window,
            oldest first; at least one
        tol (float): tolerance
        components (Sequence[Sequence[int]], optional): agent partition; spread is
            only checked inside each component; default = all agents together

    Returns:
        bool
    """

    current = _as_scores(history[-1])
    if components is None:
        components = [range(current.shape[0])]
    for comp in components:
        block = current[list(comp)]
        if np.any(block.max(axis=0) - block.min(axis=0) > tol):
            return False
    for previous in history[:-1]:
        if np.max(np.abs(current - _as_scores(previous))) > tol:
            return False
    return True


class SnapshotRecorder(Callback):

    def __init__(self, every: int):
        """
        Keeps a copy of the profile every `every` steps (and at step 0)

        Args:
            every (int): snapshot cadence in steps
        """

        super().__init__()
        self._every = every
        self.snapshots = {}

    def on_run_begin(self, scores: np.ndarray) -> bool:

        self.snapshots[0] = OpinionProfile(scores)
        return True

    def on_step_end(self, t: int, scores: np.ndarray) -> bool:

        if (t + 1) % self._every == 0:
            self.snapshots[t + 1] = OpinionProfile(scores)
        return True


class ConvergenceMonitor(Callback):

    def __init__(self, tol: float, window: int, components: Optional[List[Sequence[int]]] = None):
        """
        Numerical convergence detection, evaluated every `window` steps against the
        profile recorded one window earlier

        Args:
            tol (float): spread and quiescence tolerance
            window (int): steps between checks, also the quiescence window
            components (list, optional): agent partition the spread is checked in
        """

        super().__init__()
        self._tol = tol
        self._window = window
        self._components = components
        self._reference = None
        self.converged = False

    def on_run_begin(self, scores: np.ndarray) -> bool:

        self._reference = np.array(scores, copy=True)
        return True

    def on_step_end(self, t: int, scores: np.ndarray) -> bool:
        """
        Run halted if:
            spread within every component <= tol and the profile moved <= tol over
            the last window
        """

        if (t + 1) % self._window != 0:
            return True
        if has_converged([self._reference, scores], self._tol, self._components):
            self.converged = True
            return False
        self._reference = np.array(scores, copy=True)
        return True


class EnvelopeMonitor(Callback):

    def __init__(self):
        """
        Checks after every step that each column's maximum never increases and its
        minimum never decreases
        """

        super().__init__()
        self._hi = None
        self._lo = None
        self.monotone = True
        self.widths = []

    def on_run_begin(self, scores: np.ndarray) -> bool:

        self._hi = scores.max(axis=0)
        self._lo = scores.min(axis=0)
        self.widths.append(float(np.sum(self._hi - self._lo)))
        return True

    def on_step_end(self, t: int, scores: np.ndarray) -> bool:

        hi = scores.max(axis=0)
        lo = scores.min(axis=0)
        if np.any(hi > self._hi) or np.any(lo < self._lo):
            if self.monotone:
                logger.warning('Envelope widened at step {}'.format(t))
            self.monotone = False
        self._hi, self._lo = hi, lo
        return True

    def on_run_end(self, scores: np.ndarray) -> bool:

        self.widths.append(float(np.sum(self._hi - self._lo)))
        return True


class ProgressLogger(Callback):

    def __init__(self, every: int):
        """
        Logs the step count and per-column spread every `every` steps
        """

        super().__init__()
        self._every = every

    def on_step_end(self, t: int, scores: np.ndarray) -> bool:

        if (t + 1) % self._every == 0:
            spread = scores.max(axis=0) - scores.min(axis=0)
            logger.info('Step: {} | Max spread: {}'.format(t + 1, float(spread.max())))
        return True
