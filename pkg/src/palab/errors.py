"""Exception taxonomy shared by all palab modules."""


class ParameterError(ValueError):
    """An argument is outside the documented domain (negative rate, bad shape, ...)."""


class ContractError(ValueError):
    """Inputs are individually valid but mutually inconsistent (marginal mismatch,
    non-Lipschitz table declared Lipschitz, ...)."""


class CapacityError(RuntimeError):
    """A requested computation would exceed the configured memory budget."""


class BudgetError(RuntimeError):
    """A sampler or rejection loop exceeded its iteration budget."""


class QuadratureError(RuntimeError):
    """A quadrature failed to reach the requested tolerance."""
