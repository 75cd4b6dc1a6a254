"""Exceptions raised by the numerical laboratory
"""


class LabError(Exception):
    """Base error, ``slug`` is what a failed report shows as status"""

    slug = "lab-error"


class InputError(LabError):
    slug = "input-invalid"


class ParameterError(InputError):
    slug = "parameter-invalid"


class ConfigError(InputError):
    slug = "config-invalid"

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class NonFiniteError(LabError):
    """A computed value overflowed or became NaN"""

    slug = "overflow"

    def __init__(self, index, what="value"):
        super().__init__(f"non-finite {what} at index {index}")
        self.index = index


class NonlinearityError(LabError):
    slug = "nonlinearity-error"

    def __init__(self, name, value):
        super().__init__(f"nonlinearity {name!r} returned a non-finite value at x={value!r}")
        self.name = name
        self.value = value


class SpectralError(LabError):
    slug = "spectral-error"


class SingularMultiplierError(LabError):
    slug = "singular-multiplier"


class UndefinedRatioError(InputError):
    slug = "undefined-ratio"
