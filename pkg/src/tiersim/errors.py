"""Exception types shared across the simulator."""


class SimError(Exception):
    """Base class for all simulator errors."""


class ConfigError(SimError):
    """Invalid or inconsistent configuration."""


class AddressRangeError(SimError):
    """An access event falls outside the configured guest memory range."""


class CapacityError(SimError):
    """A tier cannot hold the pages requested of it."""


class PlanError(SimError):
    """A swap plan failed validation; the whole plan is rejected."""


class TraceFormatError(SimError):
    """A trace file is malformed."""
