"""Exception types shared across the simulator."""


class RanloopError(Exception):
    """Base class for all simulator errors."""


class ParseError(RanloopError):
    """Malformed configuration document."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(RanloopError):
    """Well-formed document with semantically invalid content."""


class EmptyInventory(RanloopError):
    """Pair selection requested on an inventory with no links."""


class MissingSample(RanloopError):
    """A tracked link has no RSRP sample at the current step."""


class UnknownUe(RanloopError):
    """Measurement event addressed to a UE with no context."""


class InconsistentTransition(RanloopError):
    """Attach of an attached UE, or detach of a detached one."""


class EmptyPeriod(RanloopError):
    """KPM granularity period closed with no samples in it."""


class BusClosed(RanloopError):
    """Publish or subscribe on a closed bus."""


class DuplicateRegistration(RanloopError):
    """Same hook (kind, matcher, policy) registered twice."""


class BlockedByPolicy(RanloopError):
    """A pre-action hook blocked a critical action; the run aborts."""

    def __init__(self, action, reason):
        super().__init__(f"action {action!r} blocked by policy: {reason}")
        self.action = action
        self.reason = reason
