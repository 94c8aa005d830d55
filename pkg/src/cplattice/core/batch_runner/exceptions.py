class BatchRunnerException(Exception):
    pass


class BatchConfigurationException(BatchRunnerException):
    """
    This exception represents the case where a batch runner is created with a non-positive worker count or chunk size.
    """

    pass
