"""Exception hierarchy shared by all dampwave modules."""


class DampwaveError(Exception):
    pass


class DomainError(DampwaveError, ValueError):
    """Argument outside the admissible parameter range."""


class PoleError(DampwaveError, ValueError):
    """Kummer's function requested at a pole (c a non-positive integer)."""


class ProfileUnsupported(DampwaveError, ValueError):
    pass


class ConstructionFailure(DampwaveError, RuntimeError):
    pass


class BlowupError(DampwaveError, RuntimeError):
    pass


class ConfigError(DampwaveError, ValueError):
    pass


class SupportError(DampwaveError, ValueError):
    pass


class CaseIRangeError(DampwaveError, ValueError):
    pass


class WindowError(DampwaveError, ValueError):
    pass


class ParseError(DampwaveError, ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class ValidationError(DampwaveError, ValueError):
    """Carries every violated invariant, not just the first one."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DivergenceWarning(UserWarning):
    pass
