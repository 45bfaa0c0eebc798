"""Shared error types and resource caps."""

from dataclasses import dataclass


class SyncmcError(Exception):
    """Base class for all errors raised by this package."""


class FormulaSyntaxError(SyncmcError):
    """Raised by the formula parser; carries a 1-based source position."""

    def __init__(self, message, line, column):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class SignatureError(SyncmcError):
    """A formula or system refers to labels/vertices outside its signature."""


class SpecError(SyncmcError):
    """A system, constraint, or machine description violates an invariant."""


class ResourceLimitError(SyncmcError):
    """A configured cap was exceeded; names the cap so callers can report it."""

    def __init__(self, cap_name, limit, detail=""):
        msg = f"resource cap '{cap_name}' exceeded (limit {limit})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.cap_name = cap_name
        self.limit = limit


@dataclass(frozen=True)
class Caps:
    """Resource limits threaded through product building, evaluation and
    composition.  All values must be positive."""

    product_size: int = 10**6
    tuple_enum: int = 10**7
    firing_sequences: int = 10**5
    sat_assignments: int = 2**20
    expansion: int = 200_000

    def __post_init__(self):
        for name in ("product_size", "tuple_enum", "firing_sequences",
                     "sat_assignments", "expansion"):
            if getattr(self, name) <= 0:
                raise SpecError(f"cap '{name}' must be positive")


DEFAULT_CAPS = Caps()
