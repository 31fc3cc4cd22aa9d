"""Exception hierarchy shared by the solver modules."""


class BregFBError(Exception):
    """Base class for every error raised by :mod:`bregfb`."""


class DomainError(BregFBError, ValueError):
    """A point left the domain (or interior domain) an operation requires."""


class BracketError(DomainError):
    """No sign change could be located for a monotone root search.

    Attributes
    ----------
    bracket : tuple of float
        The last bracket that was tried.
    """

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class ConvergenceError(BregFBError, RuntimeError):
    """An iterative kernel hit its iteration cap.

    Attributes
    ----------
    best : float
        Best point found before giving up.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class DimensionError(BregFBError, ValueError):
    """Operand shapes do not agree."""


class ScheduleError(BregFBError, ValueError):
    """A step schedule violates the admissibility inequalities.

    Attributes
    ----------
    violations : list
        The :class:`~bregfb.solver.Violation` records that were found.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class ProblemFileError(BregFBError, ValueError):
    """A problem file could not be parsed or is inconsistent.

    Attributes
    ----------
    section, key : str or None
        Where the problem was found.
    line : int or None
        1-based line number when it could be located.
    """

    def __init__(self, message, section=None, key=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if section is not None:
            where.append(f"[{section}]" + (f" {key}" if key else ""))
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.section = section
        self.key = key
        self.line = line
