# errors.py
"""Exception hierarchy; every class carries the console exit code it maps to."""


class RdlabError(Exception):
    """Base class for laboratory errors."""

    exit_code = 1


class ValidationError(RdlabError, ValueError):
    """Invalid input: shapes, signs, empty meshes, bad parameters."""

    exit_code = 2


class NetworkFormatError(ValidationError):
    """A network description file could not be parsed."""


class ConfigError(ValidationError):
    """A run configuration could not be parsed or is inconsistent."""


class DegenerateInputError(ValidationError):
    """An estimate's denominator vanishes (U0 = 0 and g = 0)."""


class InsufficientSnapshotsError(ValidationError):
    """Time differencing needs at least three snapshots."""


class PersistenceError(RdlabError, OSError):
    """Reading or writing an output file failed."""

    exit_code = 3


class SimulationError(RdlabError):
    """Time integration could not continue."""

    exit_code = 4

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class BlowupSuspectedError(SimulationError):
    """The step size underflowed below dt_min; carries the last valid trajectory."""


class NonFiniteStateError(BlowupSuspectedError):
    """A proposed state contained NaN or inf until dt underflowed."""
