"""Exception hierarchy shared across the package."""


class SubradianceError(Exception):
    pass


class ParameterError(SubradianceError, ValueError):
    """An argument is outside the range an operation accepts."""


class DomainError(SubradianceError, ValueError):
    """A formula is evaluated at a pole or singular point."""


class SolverError(SubradianceError, RuntimeError):
    """Eigendecomposition failed; ``diagnostics`` carries whatever was computed."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class BranchLookupError(SubradianceError, LookupError):
    pass


class QuadratureError(SubradianceError, ArithmeticError):
    pass


class FitError(SubradianceError, ValueError):
    pass


class ConfigError(SubradianceError, ValueError):
    """Invalid run configuration, tagged with the offending key."""

    def __init__(self, key, message, accepted=None, location=None):
        self.key = key
        self.accepted = accepted
        self.location = location
        text = f"{key}: {message}"
        if accepted:
            text += f" (accepted: {accepted})"
        if location:
            text = f"{location}: {text}"
        super().__init__(text)
