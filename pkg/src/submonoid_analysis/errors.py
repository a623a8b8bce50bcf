"""
Exception hierarchy shared by every module of the package.

Each exception also derives from the built-in exception that would otherwise
have been raised, so `except ValueError` keeps working for callers that do not
care about the distinction. The CLI maps each class to an exit code through
`EXIT_CODES`.
"""


class SubmonoidError(Exception):
    """Root of all errors raised by `submonoid_analysis`."""


class WordSetParseError(SubmonoidError, ValueError):
    """A word set, morphism, automaton or map file could not be parsed."""


class AlphabetError(SubmonoidError, ValueError):
    """A word uses a symbol that is not in the declared alphabet."""


class HypothesisError(SubmonoidError, ValueError):
    """
    The precondition of a construction does not hold, e.g. the automaton is
    not trim, the set is not its own minimal generating set or `Y` is not
    complete.
    """


class InvariantViolation(SubmonoidError, AssertionError):
    """
    An internal invariant failed. This signals either corrupted input that
    slipped past validation or a hypothesis that was silently violated.
    """


class ResourceBudgetError(SubmonoidError, RuntimeError):
    """A configured resource budget was exceeded, see `config.ResourceBudgets`."""


EXIT_CODES: dict[type[SubmonoidError], int] = {
    WordSetParseError: 2,
    AlphabetError: 2,
    InvariantViolation: 3,
    HypothesisError: 4,
    ResourceBudgetError: 5,
}


def exit_code_for(error: SubmonoidError) -> int:
    """
    Returns the CLI exit code for the given error, the most specific class in
    `EXIT_CODES` wins.

    Args:
        error: The error raised by the library.

    Returns:
        int: The exit code, 1 if the error class is not mapped.
    """
    for error_class in type(error).__mro__:
        if error_class in EXIT_CODES:
            return EXIT_CODES[error_class]
    return 1
