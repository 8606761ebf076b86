class EventFlowError(Exception):
    """
    Base class for all errors raised by the normal flow pipeline.
    The exit code is used by the command line interface.
    """
    exit_code = 1


class UsageError(EventFlowError):
    exit_code = 2


class ParseError(UsageError):
    def __init__(self, path, line_number, message):
        super().__init__(f'{path}:{line_number}: {message}')
        self.path = path
        self.line_number = line_number


class NonConvergence(EventFlowError):
    pass


class OutOfRange(EventFlowError):
    pass


class NonPositiveDepth(EventFlowError):
    pass


class EmptyScene(EventFlowError):
    pass


class ShapeMismatch(EventFlowError):
    pass


class EmptyDataset(EventFlowError):
    pass


class TooFewSamples(EventFlowError):
    pass


class InsufficientData(EventFlowError):
    pass


class DegenerateGeometry(EventFlowError):
    pass


class ZeroSolution(EventFlowError):
    pass


class EmptyInput(EventFlowError):
    pass


class LengthMismatch(EventFlowError):
    pass


class EmptyPredictions(EventFlowError):
    pass
