"""Error taxonomy: bad arguments vs bad data, mirroring the dataset tools."""


class TrainerError(Exception):
    """Base class for everything this package raises on purpose."""


class InvalidParameterError(TrainerError):
    """A caller-supplied argument is out of contract."""


class InvalidDataError(TrainerError):
    """An input file or record is missing, corrupt, or mislabeled."""
