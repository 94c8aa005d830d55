class QubitException(Exception):
    pass


class NonRealParameterException(QubitException):
    """The canonical qubit form only takes real t and Λ; complex values are rejected when parsed."""

    def __init__(self, name: str, value):
        self.name = name
        self.value = value

    def __str__(self):
        return f"Parameter {self.name} must be real, got {self.value!r}"


class ParameterCountException(QubitException):
    def __init__(self, name: str, count: int):
        self.name = name
        self.count = count

    def __str__(self):
        return f"Parameter {self.name} must have exactly 3 components, got {self.count}"
