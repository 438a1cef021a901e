class MonitorException(Exception):
    """Base exception for the monitor."""

    def __init__(self, message=None):
        super().__init__(message)
        self.message = message


class SignalDomainError(MonitorException):
    """Raised when a signal is queried or shifted outside of its time domain."""


class EvaluationError(MonitorException):
    """Raised when a robustness value cannot be computed."""


class FormulaSyntaxError(MonitorException):
    """Raised when formula text cannot be parsed."""

    def __init__(self, message=None, line: int = None, column: int = None):
        super().__init__(message)
        self.line = line
        self.column = column

    def __str__(self) -> str:
        if self.line is None:
            return str(self.message)

        return f"{self.message} (line {self.line}, column {self.column})"


class UnsupportedFormula(MonitorException):
    """Raised when a formula is outside of the fragment the engine evaluates."""


class UnknownVariable(MonitorException):
    """Raised when a formula references a variable missing from the trace."""


class RefinementError(MonitorException):
    """Raised when a refinement rewrite is applied to an invalid node."""


class OracleError(MonitorException):
    """Raised when the reference semantics fail to converge."""


class SimulationError(MonitorException):
    """Raised when a toy model cannot simulate an input."""


class ConfigurationError(MonitorException):
    """Raised when an experiment or CLI configuration is invalid."""
