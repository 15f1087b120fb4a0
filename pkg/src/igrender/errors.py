"""Exception types shared across the package."""


class IGRenderError(Exception):
    """Base class for all package errors."""


class MissingFile(IGRenderError):
    pass


class MalformedCameras(IGRenderError):
    pass


class ResolutionMismatch(IGRenderError):
    pass


class NonDivisibleResolution(IGRenderError):
    """Image sides must be divisible by 64 (six stride-2 stages)."""


class DegenerateMesh(IGRenderError):
    pass


class EmptyPath(IGRenderError):
    pass


class ShapeMismatch(IGRenderError):
    pass


class CountMismatch(IGRenderError):
    pass


class NonFiniteGradient(IGRenderError):
    pass


class ModelMismatch(IGRenderError):
    """Checkpoint architecture does not match the loaded session."""
