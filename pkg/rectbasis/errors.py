class InvalidInputError(ValueError):
    def __init__(self, *args) -> None:
        """Error occurring when a geometric or numeric input is malformed"""
        super(InvalidInputError, self).__init__(*args)


class InvalidFamilyError(InvalidInputError):
    def __init__(self, *args) -> None:
        """Error occurring when a rectangle family does not form an ordered chain"""
        super(InvalidFamilyError, self).__init__(*args)


class CapacityError(ValueError):
    def __init__(self, *args) -> None:
        """Error occurring when a computation exceeds its exact-geometry capacity or
        the range of double-precision numbers"""
        super(CapacityError, self).__init__(*args)


class InvalidSpecError(ValueError):
    def __init__(self, *args) -> None:
        """Error occurring when an angle regime description violates its invariants"""
        super(InvalidSpecError, self).__init__(*args)


class UnboundedConjugateError(ArithmeticError):
    def __init__(self, *args) -> None:
        """Error occurring when the complementary function supremum is not attained
        below the search cap"""
        super(UnboundedConjugateError, self).__init__(*args)


class UnsupportedInputError(ValueError):
    def __init__(self, *args) -> None:
        """Error occurring when a simple function has overlapping regions"""
        super(UnsupportedInputError, self).__init__(*args)


class ConfigError(ValueError):
    def __init__(self, *args) -> None:
        """Error occurring when parsing an invalid run configuration"""
        super(ConfigError, self).__init__(*args)
