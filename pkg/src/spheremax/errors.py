"""Exception types shared by all modules."""


class SpheremaxError(Exception):
    pass


class PreconditionError(SpheremaxError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class SizeLimitError(PreconditionError):
    pass


class TableRangeError(SpheremaxError, IndexError):
    """Lookup outside the (dimension, mass) range a ThetaTable was built for."""


class CapacityError(SpheremaxError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"enumeration would produce {count} points, cap is {cap}")
        self.count = count
        self.cap = cap


class EmptySphereError(PreconditionError):
    pass


class AccuracyError(SpheremaxError, ArithmeticError):
    def __init__(self, message: str, error_estimate: float):
        super().__init__(f"{message} (estimated error {error_estimate:.3g})")
        self.error_estimate = error_estimate


class ConvergenceError(SpheremaxError, ArithmeticError):
    pass
