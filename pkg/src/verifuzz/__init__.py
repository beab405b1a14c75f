"""Multi-strategy fuzzing harness for deductive program verifiers."""

__version__ = "0.1.0"
