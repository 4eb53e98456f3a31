"""Exception types shared across the package."""


class PoacError(Exception):
    """Base class for all errors raised by this package."""


class InvalidCoordinateError(PoacError):
    """A coordinate lies outside the owning map."""


class MapFormatError(PoacError):
    """A map document failed to parse; the message names the line/cell."""


class ConfigError(PoacError):
    """A scenario config is invalid; carries the offending field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class IllegalActionError(PoacError):
    """A submitted action set violated the availability mask."""


class EpisodeOverError(PoacError):
    """step() was called on a terminated episode."""


class ReplayFormatError(PoacError):
    """A replay document is malformed or uses an unknown version."""


class ReplayDigestError(ReplayFormatError):
    """A replay body does not match its recorded integrity digest."""


class ProtocolError(PoacError):
    """A wire message is malformed or arrived in the wrong state."""
