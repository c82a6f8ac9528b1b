class DomainError(ValueError):
    """An argument is outside the operation's domain."""


class ParseError(ValueError):
    """A text file does not follow the expected format."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class InvalidSystemError(ValueError):
    """A file parsed fine but the system it describes fails validation."""

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


class ConstructionError(RuntimeError):
    """A randomized constructor ran out of iterations."""


class PartitionFailure(RuntimeError):
    """No partition passed verification within the resampling budget."""

    def __init__(self, message, histogram=None, attempts=0, last_report=None):
        self.histogram = dict(histogram or {})
        self.attempts = attempts
        self.last_report = last_report
        super().__init__(message)


class EmbeddingFailure(RuntimeError):
    """The pipeline could not produce a certified embedding."""

    def __init__(self, message, stage, trace=None):
        self.stage = stage
        self.trace = trace
        super().__init__(f"{stage}: {message}")
