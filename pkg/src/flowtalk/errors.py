"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An input violates a documented precondition (shape, range, count)."""


class ConfigError(ValueError):
    """A configuration file, key, or value is malformed or inconsistent."""


class SamplerDivergence(RuntimeError):
    """The ODE state became non-finite mid-trajectory."""

    def __init__(self, step, message=""):
        self.step = step
        super().__init__(message or f"non-finite sampler state at step {step}")


class TrainingDiverged(RuntimeError):
    """A training loss became non-finite; carries the last good checkpoint."""

    def __init__(self, step, checkpoint_path=None):
        self.step = step
        self.checkpoint_path = checkpoint_path
        where = f" (last good checkpoint: {checkpoint_path})" if checkpoint_path else ""
        super().__init__(f"non-finite loss at step {step}{where}")
