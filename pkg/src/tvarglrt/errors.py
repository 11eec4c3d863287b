"""Exception and warning types raised across the package."""

import numpy as np


class TvarError(Exception):
    """Base class for all package errors."""


class InvalidArgument(TvarError, ValueError):
    pass


class DimensionMismatch(TvarError, ValueError):
    pass


class InsufficientData(TvarError, ValueError):
    pass


class RankDeficient(TvarError, np.linalg.LinAlgError):
    pass


class SingularBlock(TvarError, np.linalg.LinAlgError):
    pass


class UnstableModel(TvarError, ValueError):
    pass


class ZeroEnergy(TvarError, ValueError):
    pass


class InvalidPitchPeriod(InvalidArgument):
    pass


class DataError(TvarError, ValueError):
    """Input file missing, unreadable, or in an unsupported format."""


class ScenarioFailure(TvarError, RuntimeError):
    """A Monte-Carlo trial failed; carries the trial seed for replay."""

    def __init__(self, message, scenario=None, hypothesis=None, trial=None, seed=None):
        super().__init__(message)
        self.scenario = scenario
        self.hypothesis = hypothesis
        self.trial = trial
        self.seed = seed


class UnstableTrajectoryWarning(RuntimeWarning):
    pass
