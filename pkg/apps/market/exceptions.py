class MarketError(ValueError):
    """Base class for every solver and model error in the project."""


class DomainError(MarketError):
    """An argument lies outside the set the operation is defined on."""


class AssumptionError(MarketError):
    """Parameters break an assumption the model cannot run without."""


class DegenerateDenominatorError(MarketError):
    """A user-type threshold denominator vanished."""

    def __init__(self, name, value):
        self.name = name
        self.value = value
        super().__init__(f'{name} denominator is degenerate ({value:.3e})')
