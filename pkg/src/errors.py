"""
errors.py — Exception hierarchy

Every failure the library raises derives from ``ScsError`` so that the
orchestrator in ``main.py`` can map it to a process exit code:

  ┌────────────────────────┬───────────┐
  │ Exception              │ Exit code │
  ├────────────────────────┼───────────┤
  │ VerificationFailure    │ 1         │
  │ ConfigurationError     │ 2         │
  │ IllConditionedError    │ 2         │
  │ PrecisionError         │ 3         │
  │ ResourceCapError (+)   │ 3         │
  └────────────────────────┴───────────┘
"""

from __future__ import annotations


class ScsError(Exception):
    """Base class for every error raised by the package."""

    exit_code: int = 1


class ConfigurationError(ScsError, ValueError):
    """Invalid input: unsupported root datum, malformed value, bad coweight."""

    exit_code = 2


class IllConditionedError(ScsError, ValueError):
    """The spectral parameter lies within the wall tolerance of a wall."""

    exit_code = 2


class PrecisionError(ScsError, ArithmeticError):
    """A digit outside a tracked precision window was consumed."""

    exit_code = 3


class ResourceCapError(ScsError, RuntimeError):
    """A configured resource cap would be exceeded."""

    exit_code = 3


class EnumerationCapError(ResourceCapError):
    """Weyl group or digit enumeration larger than the configured cap."""


class StateSpaceCapError(ResourceCapError):
    """Dynamic-programming state space larger than the configured cap."""


class StepCapError(ResourceCapError):
    """A simulation did not stabilise within its step cap."""


class VerificationFailure(ScsError, AssertionError):
    """A verification criterion did not hold."""

    exit_code = 1
