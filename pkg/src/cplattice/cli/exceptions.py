class CliException(Exception):
    pass


class ConsistencyException(CliException):
    """
    This exception represents the case where the closed-form qubit verdict and the general lattice verdict disagree.
    """

    pass
