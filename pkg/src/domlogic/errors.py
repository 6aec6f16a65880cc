"""Exception types shared across the package."""


class DomLogicError(Exception):
    """Base class for all errors raised by domlogic."""


class ParseError(DomLogicError):
    pass


class TypeMismatch(DomLogicError):
    pass


class RankExplosion(DomLogicError):
    """An enumeration exceeded the configured element cap."""


class BlowupLimit(DomLogicError):
    """A normal-form computation exceeded the configured node cap."""


class TypeCheckError(DomLogicError):
    def __init__(self, rule: str, message: str):
        super().__init__(f"{rule}: {message}")
        self.rule = rule


class SortError(DomLogicError):
    pass


class FuelOut(DomLogicError):
    """Evaluation ran out of step fuel without reaching a value."""


class Diverges(DomLogicError):
    """Evaluation was proven to loop."""


class NotNormalForm(DomLogicError):
    """A formula was expected in a particular normal form."""


class IllegalConstant(DomLogicError):
    """A constant was used outside the dialects that provide it."""
