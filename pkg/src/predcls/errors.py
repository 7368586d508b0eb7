"""Exception types shared across the package."""


class PredclsError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(PredclsError, ValueError):
    """A configuration value is out of range or inconsistent."""


class AnnotationParseError(PredclsError, ValueError):
    """An annotation record is structurally malformed."""


class VocabularyError(PredclsError, ValueError):
    """A class or predicate id falls outside the loaded vocabulary."""


class FeatureKeyError(PredclsError, KeyError):
    """A precomputed feature file has no entry for the requested pair."""

    def __str__(self) -> str:  # KeyError repr-quotes its args; keep the message readable
        return self.args[0] if self.args else ""


class TrainingDivergedError(PredclsError, RuntimeError):
    """The training loss became non-finite."""


class EvaluationError(PredclsError, ValueError):
    """Predictions and ground truth cannot be reconciled."""
